#pragma once

#include <span>
#include <string>
#include <vector>

#include "roofbound/qcore.hpp"

namespace roofbound {

/// One term C * prod_k a_k^{s_k} of a homogeneous polynomial.
struct Monomial {
  Complex coefficient;
  std::vector<int> exponents;  // length N, sums to the degree
};

/// A homogeneous pure-state polynomial measure E(psi) = |P(psi)|.
///
/// P is stored twice: as a hand-written evaluator and as an expanded monomial
/// table. Both carry the normalization constant, so the measure of a
/// maximally entangled state is 1. The two forms are cross-checked in tests;
/// gradients are taken from the table.
class InvariantSpec {
 public:
  using Evaluator = Complex (*)(std::span<const Complex>);

  InvariantSpec(std::string name, int degree, int n_qubits, std::vector<Monomial> monomials, Evaluator evaluator,
                double max_value);

  const std::string& name() const { return name_; }
  int degree() const { return degree_; }
  int n_qubits() const { return n_qubits_; }
  int dim() const { return 1 << n_qubits_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  /// Upper limit of the measure on normalized states.
  double max_value() const { return max_value_; }

  /// Pre-modulus value P(a) from the hand-written evaluator; `a` need not be normalized.
  Complex evaluate(std::span<const Complex> a) const;
  /// P(a) expanded from the monomial table.
  Complex evaluate_from_table(std::span<const Complex> a) const;
  /// Holomorphic partial derivatives dP/da_k.
  CVector polynomial_gradient(std::span<const Complex> a) const;

  double measure(std::span<const Complex> a) const { return std::abs(evaluate(a)); }
  double measure(const PureState& psi) const;
  double measure(const CVector& a) const { return measure(std::span<const Complex>(a.data(), static_cast<std::size_t>(a.size()))); }

  void require_dim(Eigen::Index dim) const;

 private:
  std::string name_;
  int degree_;
  int n_qubits_;
  std::vector<Monomial> monomials_;
  std::vector<std::vector<int>> factors_;  // amplitude index per factor, with multiplicity
  Evaluator evaluator_;
  double max_value_;
};

const InvariantSpec& three_tangle_spec();
const InvariantSpec& concurrence_spec();
/// Looks up "three-tangle" or "concurrence"; throws kInvalidArgument otherwise.
const InvariantSpec& spec_by_name(const std::string& name);

/// tau = 4 |d1 - 2 d2 + 4 d3| (Cayley hyperdeterminant of the 2x2x2 amplitude tensor).
double three_tangle(const PureState& psi);
/// C = 2 |a00 a11 - a01 a10|.
double concurrence_pure(const PureState& psi);
/// Closed-form two-qubit convex-roof concurrence max(0, l1 - l2 - l3 - l4), with
/// l_i the square roots of the spectrum of sqrt(rho) rho~ sqrt(rho).
double wootters_mixed(const DensityMatrix& rho);

/// Gradient g of E = |P| as a function on C^N, in the convention
/// dE = Re(g^dagger da), i.e. g = 2 dE/d(conj a) = (P/|P|) conj(grad P).
/// Returns zero where |P| < 1e-14.
CVector gradient(const InvariantSpec& spec, std::span<const Complex> a);
CVector gradient(const InvariantSpec& spec, const PureState& psi);

/// sum_i p_i E(psi_i). Throws on an empty ensemble.
double ensemble_average(const InvariantSpec& spec, const Ensemble& ensemble);

}  // namespace roofbound
