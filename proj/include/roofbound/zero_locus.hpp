#pragma once

#include <vector>

#include "roofbound/invariants.hpp"
#include "roofbound/qcore.hpp"

namespace roofbound {

/// A zero of E on span{psi1, psi2}: state = normalize(psi1 + z psi2).
/// z is infinite when the root is psi2 itself.
struct SpanRoot {
  Complex z;
  PureState state;
  double residual;
};

/// All zeros of E on span{psi1, psi2}.
///
/// E(psi1 + z psi2) is a polynomial in z of degree <= D whose leading
/// coefficient is P(psi2). Its coefficients are recovered from D + 1
/// evaluations on the roots of unity (an exact inverse DFT of the
/// Vandermonde system), its roots are the eigenvalues of the companion
/// matrix, and each root is polished with two Newton steps on the true
/// evaluator. Roots that give the same ray are merged.
///
/// If E(psi2) <= 1e-10 the degree drops; psi2 is then a root (z infinite)
/// and the finite roots are found on an equivalent span.
/// Throws kDegenerateInput if psi1 and psi2 are (nearly) parallel and
/// kSpanInZeroLocus if the polynomial vanishes identically.
std::vector<SpanRoot> zero_on_span(const InvariantSpec& spec, const PureState& psi1, const PureState& psi2);

enum class ZeroSearch {
  kRoots,    // random 2D span of the range, root-solve, random root
  kDescent,  // steepest descent of |P|^2 on the unit sphere of the range
};

/// A zero-E pure state in the range of rho, drawn at random.
///
/// Random range vectors (span endpoints, descent starts) are complex
/// Gaussians in eigenbasis coordinates scaled by sqrt(eigenvalue), so the
/// draw follows rho's own weighting of its range.
/// Rank-1 input returns the eigenvector when it is zero-E and throws
/// kNoZeroInRange otherwise. Descent runs in eigenbasis coordinates of rho
/// (eigenvalues above rank tolerance), so iterates never leave the range;
/// a descent stuck above tolerance after 500 iterations restarts, and a final
/// root solve on the span of the iterate and a random range vector
/// guarantees termination.
PureState zero_in_range(const InvariantSpec& spec, const DensityMatrix& rho, Rng& rng,
                        ZeroSearch method = ZeroSearch::kRoots);

/// Up to m zero-E range states with pairwise |<a|b>|^2 < 1 - 1e-6, within a
/// retry budget. Returns fewer than m only when the budget runs out; rank-2
/// ranges hold at most D distinct zeros.
std::vector<PureState> collect_zero_states(const InvariantSpec& spec, const DensityMatrix& rho, int m, Rng& rng,
                                           ZeroSearch method = ZeroSearch::kRoots);

/// Exactly m distinct zero-E range states; throws kInsufficientZeroStates
/// (reporting the count achieved) when collect_zero_states falls short.
std::vector<PureState> zero_set_sample(const InvariantSpec& spec, const DensityMatrix& rho, int m, Rng& rng,
                                       ZeroSearch method = ZeroSearch::kRoots);

/// Every zero of E on the range of a rank-2 state, computed deterministically
/// from fixed generic combinations of the two eigenvectors.
std::vector<PureState> rank2_zero_states(const InvariantSpec& spec, const DensityMatrix& rho);

inline constexpr double kDistinctOverlap = 1.0 - 1e-6;

}  // namespace roofbound
