#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "roofbound/invariants.hpp"
#include "roofbound/qcore.hpp"
#include "roofbound/sdecomp.hpp"

namespace roofbound {

inline constexpr double kNoDecomposition = std::numeric_limits<double>::infinity();

/// A pure state psi with rho = k psi psi^dagger + (1 - k) remainder and
/// E(remainder) <= remainder_bound.
struct SPoint {
  PureState psi;
  double k = kNoDecomposition;  // infinite if no certified remainder was found
  std::optional<DensityMatrix> remainder;  // empty when k is infinite or k == 1
  double remainder_bound = kNoDecomposition;
  double objective = kNoDecomposition;  // k * E(psi)
  bool warning = false;                 // membership evaluation gave up; point is the start
};

struct MembershipConfig {
  double eps_member = 1e-6;
  /// Chain restarts spent on a remainder the zero-state fit cannot certify (0 disables).
  int ub_restarts = 20;
  double resolution = 1e-3;
  /// Grid points on (0, w_max] scanned when no accepted weight is known.
  int scan_points = 16;
  /// Zero states sampled per unit of rank^2 for ranks above 2.
  int zero_samples_per_dim = 3;
};

/// Certified upper bound on E(remainder) for a state in the range of rho.
///
/// The remainder is fitted by a nonnegative combination of zero-E range
/// states (all of them for rank 2, a random sample otherwise). The fit is
/// normalized into a zero-E mixture pi, and with lambda = max_weight(remainder, pi)
/// the split remainder = lambda pi + (1 - lambda) sigma gives
/// E(remainder) <= (1 - lambda) * spec.max_value(). Remainders the fit leaves
/// above eps_member are handed to upper_bound() with cfg.ub_restarts chains.
double zero_fit_bound(const InvariantSpec& spec, const DensityMatrix& remainder, const MembershipConfig& cfg,
                      const Rng& rng);

/// Smallest weight k of psi in a decomposition rho = k psi + (1 - k) pi with
/// E(pi) <= eps_member, to absolute resolution cfg.resolution (rounded up).
///
/// Candidate weights lie in (0, w_max], w_max = 1 / <psi|rho^+|psi>. If
/// `known` is given (a point for the same psi certified elsewhere, e.g. by a
/// chain) the search bisects below known->k; otherwise it first scans a grid.
/// The accepted weights form an interval because the zero-E mixtures are
/// convex. Throws kNotInRange unless ||(I - P_rho) psi|| < 1e-9.
SPoint s_membership(const InvariantSpec& spec, const DensityMatrix& rho, const PureState& psi,
                    const MembershipConfig& cfg, const Rng& rng, const std::optional<SPoint>& known = std::nullopt);

/// The S-point certified by a chain: psi_d with weight accumulated_weight and
/// the flattened zero-E members as remainder.
SPoint chain_point(const InvariantSpec& spec, const DensityMatrix& rho, const ChainResult& chain);

struct RefineConfig {
  MembershipConfig membership;
  double initial_step = 0.3;
  double min_step = 1e-3;
  int max_evaluations = 400;
  /// Membership evaluations allowed to throw before the search gives up.
  int failure_budget = 10;
  int random_starts = 4;  // bea_search only
  int threads = 0;
};

/// Pattern search over range coordinates minimizing k(psi) E(psi), starting
/// from the chain's psi_d and from any `extra_starts`. A trial point is kept
/// only if it lowers the objective, so the result never exceeds the best start.
SPoint refine_psi_l(const InvariantSpec& spec, const DensityMatrix& rho, const ChainResult& start,
                    const RefineConfig& cfg, const Rng& rng, const std::vector<SPoint>& extra_starts = {});

struct BeaResult {
  double mu;              // weight of the zero-E part
  std::optional<DensityMatrix> rho_e;
  PureState omega;
  SPoint point;
  double objective() const { return point.objective; }
};

/// Best zero-E approximation: pattern search minimizing k(psi) alone, started
/// from psi_d of `start` (one chain is run when null), the eigenvectors of rho
/// and a few random range states. Throws kInvalidArgument for pure rho.
BeaResult bea_search(const InvariantSpec& spec, const DensityMatrix& rho, const RefineConfig& cfg, const Rng& rng,
                     const ChainResult* start = nullptr);

}  // namespace roofbound
