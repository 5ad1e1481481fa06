#include "roofbound/zero_locus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <Eigen/Eigenvalues>

namespace roofbound {

namespace {

constexpr double kLeadingZero = 1e-10;

// Derivative of sum_k coeff[k] x^k (coefficients in ascending order).
Complex derivative(const std::vector<Complex>& coeff, Complex x) {
  Complex d(0.0);
  for (std::size_t k = coeff.size() - 1; k >= 1; --k) d = d * x + static_cast<double>(k) * coeff[k];
  return d;
}

// Newton on f(z) = P(b + z c), or on f(s) = P(s b + c) when use_reciprocal
// (then `coeff` is reversed). f is evaluated exactly, f' from the recovered
// coefficients; a step is kept only if it lowers the normalized residual.
Complex polish(const InvariantSpec& spec, const CVector& b, const CVector& c, const std::vector<Complex>& coeff,
               Complex x, bool use_reciprocal) {
  auto point = [&](Complex t) -> CVector { return use_reciprocal ? CVector(t * b + c) : CVector(b + t * c); };
  auto residual = [&](const CVector& a, Complex p) { return std::abs(p) / std::pow(a.norm(), spec.degree()); };
  CVector a = point(x);
  Complex f = spec.evaluate({a.data(), static_cast<std::size_t>(a.size())});
  for (int step = 0; step < 2; ++step) {
    const Complex df = derivative(coeff, x);
    if (std::abs(df) < 1e-300) break;
    const Complex next = x - f / df;
    const CVector an = point(next);
    const Complex fn = spec.evaluate({an.data(), static_cast<std::size_t>(an.size())});
    if (residual(an, fn) >= residual(a, f)) break;
    x = next;
    a = an;
    f = fn;
  }
  return x;
}

void add_distinct(std::vector<PureState>& pool, const PureState& psi) {
  for (const auto& q : pool) {
    if (q.overlap2(psi) >= kDistinctOverlap) return;
  }
  pool.push_back(psi);
}

// Gaussian in range coordinates scaled by sqrt(eigenvalue): directions that
// carry more of rho are drawn more often.
PureState random_range_state(const CMatrix& basis, const RVector& scale, Rng& rng) {
  return PureState::normalized(basis * (scale.asDiagonal() * random_complex_gaussian(basis.cols(), rng)));
}

RVector range_scale(const DensityMatrix& rho) { return rho.eigenvalues().head(rho.rank()).cwiseSqrt(); }

PureState descend_to_zero(const InvariantSpec& spec, const CMatrix& basis, const RVector& scale, Rng& rng) {
  const Eigen::Index r = basis.cols();
  auto value = [&](const CVector& x) {
    const CVector a = basis * x;
    return std::norm(spec.evaluate({a.data(), static_cast<std::size_t>(a.size())}));
  };
  auto start = [&] { return CVector((scale.asDiagonal() * random_complex_gaussian(r, rng)).normalized()); };
  CVector x = start();
  for (int restart = 0; restart < 4; ++restart) {
    if (restart > 0) x = start();
    double f = value(x);
    double step = 1.0;
    for (int iter = 0; iter < 500 && f > 1e-26; ++iter) {
      const CVector a = basis * x;
      const Complex p = spec.evaluate({a.data(), static_cast<std::size_t>(a.size())});
      const CVector grad_p = spec.polynomial_gradient({a.data(), static_cast<std::size_t>(a.size())});
      CVector g = 2.0 * p * (basis.adjoint() * grad_p.conjugate());
      g -= x.dot(g).real() * x;
      const double g2 = g.squaredNorm();
      if (g2 < 1e-300) break;
      step = std::min(1.0, 2.0 * step);
      bool moved = false;
      for (int trial = 0; trial < 40; ++trial) {
        const CVector cand = (x - step * g).normalized();
        const double fc = value(cand);
        if (fc <= f - 1e-4 * step * g2) {
          x = cand;
          f = fc;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (std::sqrt(f) < tol::kZeroResidual) return PureState::normalized(basis * x);
  }
  // Fallback: a root on span{iterate, random range vector} nearest to the iterate.
  const PureState current = PureState::normalized(basis * x);
  for (int attempt = 0; attempt < 20; ++attempt) {
    const PureState other = random_range_state(basis, scale, rng);
    try {
      const auto roots = zero_on_span(spec, current, other);
      const SpanRoot* best = nullptr;
      for (const auto& root : roots) {
        if (root.residual >= tol::kZeroResidual) continue;
        if (!best || root.state.overlap2(current) > best->state.overlap2(current)) best = &root;
      }
      if (best) return best->state;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateInput) throw;
    }
  }
  throw Error(ErrorCode::kDescentFailure, "descent and root fallback found no zero-E range state");
}

// psi2 is a zero, so the polynomial in z loses its leading term. Solve on the
// span with a nonzero second vector instead and map each root back to z.
std::vector<SpanRoot> roots_with_zero_endpoint(const InvariantSpec& spec, const PureState& psi1,
                                               const PureState& psi2) {
  std::optional<PureState> partner;
  if (spec.measure(psi1) > kLeadingZero) partner = psi1;
  for (double angle : {0.7, 1.9, 2.6}) {
    if (partner) break;
    PureState u = PureState::normalized(psi1.amplitudes() + std::polar(1.0, angle) * psi2.amplitudes());
    if (spec.measure(u) > kLeadingZero) partner = std::move(u);
  }
  if (!partner) throw Error(ErrorCode::kSpanInZeroLocus, "E vanishes on the whole span");
  CMatrix basis(psi1.dim(), 2);
  basis << psi1.amplitudes(), psi2.amplitudes();
  const auto qr = basis.colPivHouseholderQr();
  std::vector<SpanRoot> out = zero_on_span(spec, psi2, *partner);
  for (auto& root : out) {
    const CVector x = qr.solve(root.state.amplitudes());
    root.z = std::abs(x(0)) > 1e-12 * std::abs(x(1)) ? x(1) / x(0) : Complex(std::numeric_limits<double>::infinity(), 0.0);
  }
  return out;
}

}  // namespace

std::vector<SpanRoot> zero_on_span(const InvariantSpec& spec, const PureState& psi1, const PureState& psi2) {
  spec.require_dim(psi1.dim());
  spec.require_dim(psi2.dim());
  if (psi1.overlap2(psi2) > 1.0 - 1e-12) {
    throw Error(ErrorCode::kDegenerateInput, "span states are linearly dependent");
  }
  if (spec.measure(psi2) <= kLeadingZero) return roots_with_zero_endpoint(spec, psi1, psi2);

  const int degree = spec.degree();
  const CVector& b = psi1.amplitudes();
  const CVector& c = psi2.amplitudes();
  const int samples = degree + 1;
  std::vector<Complex> values(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * j / samples);
    const CVector a = b + w * c;
    values[static_cast<std::size_t>(j)] = spec.evaluate({a.data(), static_cast<std::size_t>(a.size())});
  }
  std::vector<Complex> coeff(static_cast<std::size_t>(samples));
  double largest = 0.0;
  for (int k = 0; k < samples; ++k) {
    Complex s(0.0);
    for (int j = 0; j < samples; ++j) {
      s += values[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * std::numbers::pi * j * k / samples);
    }
    coeff[static_cast<std::size_t>(k)] = s / static_cast<double>(samples);
    largest = std::max(largest, std::abs(coeff[static_cast<std::size_t>(k)]));
  }
  if (largest < 1e-14) throw Error(ErrorCode::kSpanInZeroLocus, "E vanishes on the whole span");

  // The leading coefficient is P(psi2) itself; use the exact value.
  coeff[static_cast<std::size_t>(degree)] = spec.evaluate(psi2.span());
  const Complex lead = coeff[static_cast<std::size_t>(degree)];
  CMatrix companion = CMatrix::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coeff[static_cast<std::size_t>(i)] / lead;
  Eigen::ComplexEigenSolver<CMatrix> solver(companion, false);
  const std::vector<Complex> reversed(coeff.rbegin(), coeff.rend());

  std::vector<SpanRoot> out;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    Complex z = solver.eigenvalues()(i);
    CVector a;
    if (std::abs(z) <= 1.0) {
      z = polish(spec, b, c, coeff, z, false);
      a = b + z * c;
    } else {
      Complex s = polish(spec, b, c, reversed, 1.0 / z, true);
      z = std::abs(s) > 0.0 ? 1.0 / s : Complex(std::numeric_limits<double>::infinity(), 0.0);
      a = s * b + c;
    }
    PureState state = PureState::normalized(a);
    const double residual = spec.measure(state);
    bool merged = false;
    for (auto& existing : out) {
      if (existing.state.overlap2(state) > 1.0 - 1e-10) {
        if (residual < existing.residual) existing = SpanRoot{z, state, residual};
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(SpanRoot{z, std::move(state), residual});
  }
  return out;
}

PureState zero_in_range(const InvariantSpec& spec, const DensityMatrix& rho, Rng& rng, ZeroSearch method) {
  spec.require_dim(rho.dim());
  if (rho.rank() == 1) {
    PureState v = PureState::normalized(rho.eigenvectors().col(0));
    if (spec.measure(v) < tol::kZeroResidual) return v;
    throw Error(ErrorCode::kNoZeroInRange, "rank-1 state with E = " + std::to_string(spec.measure(v)));
  }
  const CMatrix basis = rho.range_basis();
  const RVector scale = range_scale(rho);
  if (method == ZeroSearch::kDescent) return descend_to_zero(spec, basis, scale, rng);

  for (int attempt = 0; attempt < 50; ++attempt) {
    const PureState a = random_range_state(basis, scale, rng);
    const PureState b = random_range_state(basis, scale, rng);
    std::vector<SpanRoot> roots;
    try {
      roots = zero_on_span(spec, a, b);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kSpanInZeroLocus) return a;
      if (e.code() == ErrorCode::kDegenerateInput) continue;
      throw;
    }
    std::erase_if(roots, [](const SpanRoot& r) { return r.residual >= tol::kZeroResidual; });
    if (roots.empty()) continue;
    return roots[rng.below(roots.size())].state;
  }
  throw Error(ErrorCode::kNoZeroInRange, "root search found no zero-E state within the attempt budget");
}

std::vector<PureState> rank2_zero_states(const InvariantSpec& spec, const DensityMatrix& rho) {
  spec.require_dim(rho.dim());
  if (rho.rank() != 2) throw Error(ErrorCode::kInvalidArgument, "rank2_zero_states needs a rank-2 state");
  const CVector e1 = rho.eigenvectors().col(0);
  const CVector e2 = rho.eigenvectors().col(1);
  // Fixed generic rotations of the eigenbasis; a second angle covers the
  // case where the first second-vector happens to be a zero itself.
  for (double angle : {0.37, 0.91, 1.23, 0.58, 1.41, 0.13}) {
    const Complex phase = std::polar(1.0, 1.7 * angle + 0.3);
    const PureState u = PureState::normalized(std::cos(angle) * e1 + std::sin(angle) * phase * e2);
    const PureState v = PureState::normalized(-std::sin(angle) * std::conj(phase) * e1 + std::cos(angle) * e2);
    if (spec.measure(v) <= 1e-8) continue;
    std::vector<PureState> out;
    for (const auto& root : zero_on_span(spec, u, v)) {
      if (root.residual < tol::kZeroResidual) add_distinct(out, root.state);
    }
    return out;
  }
  // Every tried direction is a zero: the whole span is zero-E.
  return {PureState::normalized(e1), PureState::normalized(e2)};
}

std::vector<PureState> collect_zero_states(const InvariantSpec& spec, const DensityMatrix& rho, int m, Rng& rng,
                                           ZeroSearch method) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "need m >= 1 zero states");
  spec.require_dim(rho.dim());
  std::vector<PureState> pool;
  if (rho.rank() == 1) {
    pool.push_back(zero_in_range(spec, rho, rng, method));
    return pool;
  }
  const int budget = 20 * m + 20;
  int stale = 0;
  const CMatrix basis = rho.range_basis();
  const RVector scale = range_scale(rho);
  for (int attempt = 0; attempt < budget && static_cast<int>(pool.size()) < m; ++attempt) {
    const std::size_t before = pool.size();
    if (method == ZeroSearch::kRoots) {
      // Every root of a random span is a zero-E range state; keep them all.
      // On a 2D range each solve returns every zero there is.
      const PureState a = random_range_state(basis, scale, rng);
      const PureState b = random_range_state(basis, scale, rng);
      try {
        for (const auto& root : zero_on_span(spec, a, b)) {
          if (root.residual < tol::kZeroResidual) add_distinct(pool, root.state);
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kSpanInZeroLocus) {
          add_distinct(pool, a);
          add_distinct(pool, b);
        } else if (e.code() != ErrorCode::kDegenerateInput) {
          throw;
        }
      }
    } else {
      add_distinct(pool, zero_in_range(spec, rho, rng, method));
    }
    stale = pool.size() == before ? stale + 1 : 0;
    if (rho.rank() == 2 && stale >= 6) break;
  }
  // Random subset when the solves returned more roots than requested.
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);
  if (static_cast<int>(pool.size()) > m) pool.erase(pool.begin() + m, pool.end());
  return pool;
}

std::vector<PureState> zero_set_sample(const InvariantSpec& spec, const DensityMatrix& rho, int m, Rng& rng,
                                       ZeroSearch method) {
  if (rho.rank() < 2) throw Error(ErrorCode::kInvalidArgument, "zero_set_sample needs rank >= 2");
  auto pool = collect_zero_states(spec, rho, m, rng, method);
  if (static_cast<int>(pool.size()) < m) {
    throw Error(ErrorCode::kInsufficientZeroStates, "found " + std::to_string(pool.size()) + " of " +
                                                         std::to_string(m) + " distinct zero-E states");
  }
  return pool;
}

}  // namespace roofbound
