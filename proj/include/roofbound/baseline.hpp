#pragma once

#include <vector>

#include "roofbound/invariants.hpp"
#include "roofbound/qcore.hpp"
#include "roofbound/sdecomp.hpp"

namespace roofbound {

/// Ensemble of rho parametrized by an m x d isometry V (m >= d = rank):
/// sqrt(p_i) psi_i = sum_j V_ij sqrt(lambda_j) e_j. Every size-m ensemble of
/// rho arises this way.
struct EnsembleParam {
  CMatrix isometry;
  DensityMatrix base;
};

/// Members with weight below 1e-12 are dropped and the rest renormalized.
/// Throws kInvalidArgument unless V has rank(base) orthonormal columns (1e-10)
/// and at least as many rows.
Ensemble ensemble_from_isometry(const EnsembleParam& param);

struct DescentConfig {
  int ensemble_size = 0;  // 0: d^2
  int iterations = 2000;
  int restarts = 10;
  double initial_step = 0.1;
  double shrink = 0.5;
  int line_search_trials = 30;
  double armijo = 1e-4;
  /// Continuation schedule: |P| is replaced by sqrt(|P|^2 + eps^2) - eps and
  /// the iterations are split evenly over the stages. The last stage should be
  /// 0 (the true objective); an empty schedule means plain descent.
  std::vector<double> smoothing = {1e-2, 1e-3, 1e-4, 1e-5, 0.0};
  int threads = 0;
};

/// Steepest descent of the ensemble average over the Stiefel manifold of
/// m x d isometries: Euclidean gradient projected to the tangent space,
/// Armijo backtracking, QR retraction. |P| is not differentiable at its
/// zeros, where plain descent zigzags, so early stages descend a smoothed
/// objective; the reported value is always the true ensemble average. Each restart starts from a Haar
/// isometry drawn from rng.split(r). Pure rho returns its measure directly.
BoundResult convex_roof_descent(const InvariantSpec& spec, const DensityMatrix& rho, const DescentConfig& cfg,
                                const Rng& rng);

/// Minimum ensemble average over `samples` Haar-random d^2 x d isometries.
BoundResult random_ensemble_oracle(const InvariantSpec& spec, const DensityMatrix& rho, int samples, const Rng& rng,
                                   int threads = 0);

}  // namespace roofbound
