#include "roofbound/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace roofbound {

namespace {

Complex ipow(Complex base, int e) {
  Complex out(1.0);
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

// Amplitude index of |q0 q1 q2>: q0 is the most significant bit.
Complex three_tangle_polynomial(std::span<const Complex> a) {
  const Complex d1 = a[0] * a[0] * a[7] * a[7] + a[1] * a[1] * a[6] * a[6] + a[2] * a[2] * a[5] * a[5] +
                     a[4] * a[4] * a[3] * a[3];
  const Complex d2 = a[0] * a[7] * a[3] * a[4] + a[0] * a[7] * a[5] * a[2] + a[0] * a[7] * a[6] * a[1] +
                     a[3] * a[4] * a[5] * a[2] + a[3] * a[4] * a[6] * a[1] + a[5] * a[2] * a[6] * a[1];
  const Complex d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4];
  return 4.0 * (d1 - 2.0 * d2 + 4.0 * d3);
}

Complex concurrence_polynomial(std::span<const Complex> a) { return 2.0 * (a[0] * a[3] - a[1] * a[2]); }

Monomial term(double coefficient, std::initializer_list<int> factors, int dim) {
  Monomial m{Complex(coefficient), std::vector<int>(static_cast<std::size_t>(dim), 0)};
  for (int k : factors) ++m.exponents[static_cast<std::size_t>(k)];
  return m;
}

std::vector<Monomial> three_tangle_table() {
  // tau = 4 (d1 - 2 d2 + 4 d3): coefficients 4, -8 and 16.
  return {
      term(4, {0, 0, 7, 7}, 8),  term(4, {1, 1, 6, 6}, 8),  term(4, {2, 2, 5, 5}, 8),  term(4, {3, 3, 4, 4}, 8),
      term(-8, {0, 7, 3, 4}, 8), term(-8, {0, 7, 5, 2}, 8), term(-8, {0, 7, 6, 1}, 8), term(-8, {3, 4, 5, 2}, 8),
      term(-8, {3, 4, 6, 1}, 8), term(-8, {5, 2, 6, 1}, 8), term(16, {0, 6, 5, 3}, 8), term(16, {7, 1, 2, 4}, 8),
  };
}

std::vector<Monomial> concurrence_table() { return {term(2, {0, 3}, 4), term(-2, {1, 2}, 4)}; }

}  // namespace

InvariantSpec::InvariantSpec(std::string name, int degree, int n_qubits, std::vector<Monomial> monomials,
                             Evaluator evaluator, double max_value)
    : name_(std::move(name)),
      degree_(degree),
      n_qubits_(n_qubits),
      monomials_(std::move(monomials)),
      evaluator_(evaluator),
      max_value_(max_value) {
  for (const auto& m : monomials_) {
    if (static_cast<int>(m.exponents.size()) != dim() ||
        std::accumulate(m.exponents.begin(), m.exponents.end(), 0) != degree_) {
      throw Error(ErrorCode::kInvalidArgument, "monomial of " + name_ + " is not homogeneous of degree " +
                                                   std::to_string(degree_));
    }
    std::vector<int> f;
    for (int k = 0; k < dim(); ++k) f.insert(f.end(), static_cast<std::size_t>(m.exponents[k]), k);
    factors_.push_back(std::move(f));
  }
}

void InvariantSpec::require_dim(Eigen::Index dim_in) const {
  if (dim_in != dim()) {
    throw Error(ErrorCode::kWrongQubitCount, name_ + " needs " + std::to_string(n_qubits_) + " qubits, got dimension " +
                                                 std::to_string(dim_in));
  }
}

Complex InvariantSpec::evaluate(std::span<const Complex> a) const {
  require_dim(static_cast<Eigen::Index>(a.size()));
  return evaluator_(a);
}

double InvariantSpec::measure(const PureState& psi) const { return measure(psi.span()); }

Complex InvariantSpec::evaluate_from_table(std::span<const Complex> a) const {
  require_dim(static_cast<Eigen::Index>(a.size()));
  Complex total(0.0);
  for (const auto& m : monomials_) {
    Complex t = m.coefficient;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (m.exponents[k] != 0) t *= ipow(a[k], m.exponents[k]);
    }
    total += t;
  }
  return total;
}

CVector InvariantSpec::polynomial_gradient(std::span<const Complex> a) const {
  require_dim(static_cast<Eigen::Index>(a.size()));
  CVector g = CVector::Zero(static_cast<Eigen::Index>(a.size()));
  std::vector<Complex> prefix(static_cast<std::size_t>(degree_) + 1);
  for (std::size_t t = 0; t < monomials_.size(); ++t) {
    const auto& f = factors_[t];
    prefix[0] = monomials_[t].coefficient;
    for (std::size_t j = 0; j < f.size(); ++j) prefix[j + 1] = prefix[j] * a[static_cast<std::size_t>(f[j])];
    // Product rule over factor positions; repeated indices collect s_k a_k^(s_k - 1).
    Complex suffix(1.0);
    for (std::size_t j = f.size(); j-- > 0;) {
      g(f[j]) += prefix[j] * suffix;
      suffix *= a[static_cast<std::size_t>(f[j])];
    }
  }
  return g;
}

const InvariantSpec& three_tangle_spec() {
  static const InvariantSpec spec("three-tangle", 4, 3, three_tangle_table(), &three_tangle_polynomial, 1.0);
  return spec;
}

const InvariantSpec& concurrence_spec() {
  static const InvariantSpec spec("concurrence", 2, 2, concurrence_table(), &concurrence_polynomial, 1.0);
  return spec;
}

const InvariantSpec& spec_by_name(const std::string& name) {
  if (name == "three-tangle" || name == "tangle") return three_tangle_spec();
  if (name == "concurrence") return concurrence_spec();
  throw Error(ErrorCode::kInvalidArgument, "unknown measure '" + name + "'");
}

double three_tangle(const PureState& psi) { return three_tangle_spec().measure(psi); }

double concurrence_pure(const PureState& psi) { return concurrence_spec().measure(psi); }

double wootters_mixed(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw Error(ErrorCode::kWrongQubitCount, "Wootters concurrence needs a two-qubit state");
  Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
  // sigma_y (x) sigma_y
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const CMatrix tilde = flip * rho.matrix().conjugate() * flip;

  RVector sqrt_vals = rho.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix sqrt_rho = rho.eigenvectors() * sqrt_vals.asDiagonal() * rho.eigenvectors().adjoint();
  const CMatrix r = sqrt_rho * tilde * sqrt_rho;
  RVector l = hermitian_eigenvalues(0.5 * (r + r.adjoint())).cwiseMax(0.0).cwiseSqrt();
  std::sort(l.data(), l.data() + l.size(), std::greater<>());
  return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

CVector gradient(const InvariantSpec& spec, std::span<const Complex> a) {
  const Complex p = spec.evaluate(a);
  const double mod = std::abs(p);
  if (mod < 1e-14) return CVector::Zero(static_cast<Eigen::Index>(a.size()));
  return (p / mod) * spec.polynomial_gradient(a).conjugate();
}

CVector gradient(const InvariantSpec& spec, const PureState& psi) { return gradient(spec, psi.span()); }

double ensemble_average(const InvariantSpec& spec, const Ensemble& ensemble) {
  if (ensemble.empty()) throw Error(ErrorCode::kInvalidArgument, "ensemble_average of an empty ensemble");
  double total = 0.0;
  for (const auto& m : ensemble.members()) total += m.weight * spec.measure(m.state);
  return total;
}

}  // namespace roofbound
