#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roofbound/invariants.hpp"
#include "roofbound/qcore.hpp"
#include "roofbound/zero_locus.hpp"

namespace roofbound {

struct WeightedState {
  double weight;
  PureState state;
};

/// One rank-reducing subtraction rho_parent = lambda_pi * pi + (1 - lambda_pi) * sigma.
///
/// sigma is the boundary state rho + k/D(rho,pi) (rho - pi) with the largest
/// k that keeps it PSD; lambda_pi = k / (D(rho,pi) + k) and
/// ratio = D(rho,pi) / D(sigma,pi) = 1 - lambda_pi.
struct SubtractionStep {
  DensityMatrix pi;
  double lambda_pi;
  DensityMatrix sigma;
  double k;
  double dist_parent_pi;
  double dist_sigma_pi;
  double ratio;
  std::vector<WeightedState> zero_states;  // components of pi (filled by the chain)
};

enum class PiSizing {
  kRandom,        // uniform in 1..pi_size(), drawn per step
  kSingle,        // one zero-E state per step (pi pure)
  kCaratheodory,  // exactly pi_size(): d^2 members in total
};

struct ChainConfig {
  int restarts = 200;
  PiSizing pi_sizing = PiSizing::kRandom;
  int retries = 5;
  double zero_residual = tol::kZeroResidual;
  ZeroSearch zero_search = ZeroSearch::kRoots;
  int threads = 0;  // 0: ROOFBOUND_THREADS or hardware concurrency
};

/// An S-decomposition chain and the bound it certifies.
struct ChainResult {
  std::vector<SubtractionStep> steps;
  PureState final_state;
  double final_value;
  /// prod (1 - lambda_pi): weight of final_state in the flattened ensemble.
  double accumulated_weight;
  /// prod D(rho_{i-1}, pi_i) / D(rho_i, pi_i).
  double ratio_product;
  /// ratio_product * final_value, reported as exactly 0 below 1e-9.
  double bound;
  Ensemble ensemble;
};

struct BoundResult {
  double value;
  std::optional<ChainResult> best_chain;
  /// Ensemble whose average equals `value` (up to the zero cutoff).
  Ensemble certificate;
  std::vector<double> restart_values;  // NaN for failed restarts
  std::vector<std::string> failures;
  int best_restart;
  std::uint64_t seed;
  double wall_time_s;
};

/// Largest lambda with rho - lambda * pi >= 0, i.e. 1 / lambda_max(rho^{-1/2} pi rho^{-1/2})
/// on the support of rho. Throws kSupportViolation unless
/// ||(I - P_rho) pi (I - P_rho)||_max < 1e-9.
double max_weight(const DensityMatrix& rho, const DensityMatrix& pi);

/// Maximal rank-reducing subtraction of pi from rho (zero_states left empty).
/// Throws kSupportViolation, kDegenerateInput (rho == pi), kPiAbsorbsRho
/// (lambda* >= 1 - 1e-12) or kRankNotReduced.
SubtractionStep max_subtraction(const DensityMatrix& rho, const DensityMatrix& pi);

/// rho + k / D(rho, pi) * (rho - pi) as a raw operator (may be indefinite).
CMatrix sigma_operator(const DensityMatrix& rho, const DensityMatrix& pi, double k);

/// sigma with k = lambda_min(rho), which is always a state when supp(pi) is
/// inside supp(rho). Same errors as max_subtraction except rank checks.
DensityMatrix safe_subtraction(const DensityMatrix& rho, const DensityMatrix& pi);

/// E(pi) + D(rho,pi)/D(sigma,pi) * (E(sigma) - E(pi)). Throws on d_sigma_pi <= 0.
double continuity_bound(double e_pi, double e_sigma, double d_rho_pi, double d_sigma_pi);

/// Zero-E states mixed into pi at step `step` of a chain on a rank-`original_rank`
/// state: round(3d/2) - step, capped so the chain selects at most d^2 - 1 zero
/// states in total while leaving one for each remaining step.
int pi_size(int original_rank, int step, int current_rank, int budget_left);

ChainResult chain(const InvariantSpec& spec, const DensityMatrix& rho, const ChainConfig& cfg, Rng& rng);

/// Minimum chain bound over cfg.restarts chains; restart r draws from rng.split(r).
BoundResult upper_bound(const InvariantSpec& spec, const DensityMatrix& rho, const ChainConfig& cfg, const Rng& rng);

/// Explicit ensemble of a chain: step i contributes its zero states with weight
/// (prefix) * lambda_pi * w, then final_state gets accumulated_weight. Throws
/// kInternal if it does not reconstruct `original` within 1e-9.
Ensemble flatten(const ChainResult& chain, const DensityMatrix& original);

using PureMeasure = std::function<double(const PureState&)>;

struct GeneralizedStep {
  SubtractionStep step;  // pi is the pure minimizer
  double e_pi;
};

/// One step for a measure without guaranteed zeros: pi is the pure state of
/// the range minimizing `e` (local descent), then maximal subtraction.
/// Throws kInvalidArgument for pure rho, kDescentFailure if descent fails.
GeneralizedStep generalized_step(const PureMeasure& e, const DensityMatrix& rho, Rng& rng);

struct GeneralizedChainResult {
  std::vector<GeneralizedStep> steps;
  PureState final_state;
  double final_value;
  double bound;
};

/// Iterates generalized_step to a pure state and folds the additive bounds back.
GeneralizedChainResult generalized_chain(const PureMeasure& e, const DensityMatrix& rho, Rng& rng);

}  // namespace roofbound
