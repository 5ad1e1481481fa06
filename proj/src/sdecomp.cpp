#include "roofbound/sdecomp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "roofbound/parallel.hpp"

namespace roofbound {

namespace {

constexpr double kSupportTolerance = 1e-9;
constexpr double kDeflation = 1e-9;

void check_support(const DensityMatrix& rho, const DensityMatrix& pi) {
  if (rho.dim() != pi.dim()) throw Error(ErrorCode::kDimensionMismatch, "rho and pi on different spaces");
  const CMatrix basis = rho.range_basis();
  const CMatrix perp = CMatrix::Identity(rho.dim(), rho.dim()) - basis * basis.adjoint();
  const double leak = max_abs(perp * pi.matrix() * perp);
  if (leak >= kSupportTolerance) {
    throw Error(ErrorCode::kSupportViolation, "supp(pi) not inside supp(rho): leak " + std::to_string(leak));
  }
}

// (rho - lambda pi) / (1 - lambda) with the eigenvalues outside the support of
// rho and the boundary eigenvalue set exactly to zero. Empty if the boundary
// eigenvalue is not numerically zero.
std::optional<DensityMatrix> deflated_remainder(const DensityMatrix& rho, const DensityMatrix& pi, double lambda) {
  CMatrix raw = (rho.matrix() - lambda * pi.matrix()) / (1.0 - lambda);
  raw = 0.5 * (raw + raw.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(raw);
  RVector vals = solver.eigenvalues();  // ascending
  const Eigen::Index drop = rho.dim() - rho.rank() + 1;
  if (vals(drop - 1) > kDeflation) return std::nullopt;
  if (vals(0) < -kDeflation) return std::nullopt;
  vals.head(drop).setZero();
  return DensityMatrix::from_spectrum(vals, solver.eigenvectors());
}

}  // namespace

double max_weight(const DensityMatrix& rho, const DensityMatrix& pi) {
  check_support(rho, pi);
  const Eigen::Index r = rho.rank();
  const CMatrix basis = rho.range_basis();
  const RVector inv_sqrt = rho.eigenvalues().head(r).cwiseSqrt().cwiseInverse();
  CMatrix m = inv_sqrt.asDiagonal() * (basis.adjoint() * pi.matrix() * basis) * inv_sqrt.asDiagonal();
  m = 0.5 * (m + m.adjoint()).eval();
  const double top = hermitian_eigenvalues(m).maxCoeff();
  if (!(top > 0.0)) throw Error(ErrorCode::kSupportViolation, "pi has no weight on supp(rho)");
  return 1.0 / top;
}

SubtractionStep max_subtraction(const DensityMatrix& rho, const DensityMatrix& pi) {
  const double dist = trace_distance(rho, pi);
  if (dist <= 1e-10) throw Error(ErrorCode::kDegenerateInput, "pi equals rho");
  double lambda = max_weight(rho, pi);

  std::optional<DensityMatrix> sigma;
  for (int attempt = 0; attempt < 2 && !sigma; ++attempt) {
    if (lambda >= 1.0 - 1e-12) {
      throw Error(ErrorCode::kPiAbsorbsRho, "maximal weight " + std::to_string(lambda) + " leaves no remainder");
    }
    sigma = deflated_remainder(rho, pi, lambda);
    if (sigma && sigma->rank() >= rho.rank()) sigma.reset();
    if (!sigma) lambda *= 1.0 + 1e-12;
  }
  if (!sigma) throw Error(ErrorCode::kRankNotReduced, "boundary subtraction did not reduce the rank");

#ifdef ROOFBOUND_INJECT_LAMBDA_FAULT
  lambda *= 0.9;
#endif
  const double k = dist * lambda / (1.0 - lambda);
  const double dist_sigma = trace_distance(*sigma, pi);
  return SubtractionStep{pi, lambda, std::move(*sigma), k, dist, dist_sigma, dist / dist_sigma, {}};
}

CMatrix sigma_operator(const DensityMatrix& rho, const DensityMatrix& pi, double k) {
  const double dist = trace_distance(rho, pi);
  if (dist <= 1e-10) throw Error(ErrorCode::kDegenerateInput, "pi equals rho");
  return rho.matrix() + (k / dist) * (rho.matrix() - pi.matrix());
}

DensityMatrix safe_subtraction(const DensityMatrix& rho, const DensityMatrix& pi) {
  check_support(rho, pi);
  return DensityMatrix::repaired(sigma_operator(rho, pi, rho.lambda_min()));
}

double continuity_bound(double e_pi, double e_sigma, double d_rho_pi, double d_sigma_pi) {
  if (!(d_sigma_pi > 0.0)) throw Error(ErrorCode::kInvalidArgument, "D(sigma, pi) must be positive");
  return e_pi + (d_rho_pi / d_sigma_pi) * (e_sigma - e_pi);
}

int pi_size(int original_rank, int step, int current_rank, int budget_left) {
  const int target = static_cast<int>(std::lround(1.5 * original_rank)) - step;
  const int cap = budget_left - std::max(0, current_rank - 2);
  return std::max(1, std::min(target, cap));
}

Ensemble flatten(const ChainResult& result, const DensityMatrix& original) {
  std::vector<EnsembleMember> members;
  double prefix = 1.0;
  for (const auto& step : result.steps) {
    for (const auto& z : step.zero_states) {
      const double w = prefix * step.lambda_pi * z.weight;
      if (w > 0.0) members.push_back({w, z.state});
    }
    prefix *= 1.0 - step.lambda_pi;
  }
  members.push_back({prefix, result.final_state});
  // Renormalize away rounding only; a real mismatch fails the check below.
  double total = 0.0;
  for (const auto& m : members) total += m.weight;
  if (std::abs(total - 1.0) > 1e-10) {
    throw Error(ErrorCode::kInternal, "flattened weights sum to " + std::to_string(total));
  }
  for (auto& m : members) m.weight /= total;
  Ensemble ensemble(std::move(members));
  const double err = max_abs(ensemble.reconstruct() - original.matrix());
  if (err >= 1e-9) {
    throw Error(ErrorCode::kInternal, "flattened ensemble misses rho by " + std::to_string(err));
  }
  return ensemble;
}

ChainResult chain(const InvariantSpec& spec, const DensityMatrix& rho, const ChainConfig& cfg, Rng& rng) {
  spec.require_dim(rho.dim());
  const int d = rho.rank();
  std::vector<SubtractionStep> steps;
  DensityMatrix current = rho;
  int budget = d * d - 1;
  for (int i = 0; current.rank() > 1; ++i) {
    int m = pi_size(d, i, current.rank(), budget);
    if (cfg.pi_sizing == PiSizing::kSingle) m = 1;
    if (cfg.pi_sizing == PiSizing::kRandom) m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    std::optional<SubtractionStep> step;
    std::string last_error = "no attempt";
    for (int attempt = 0; attempt <= cfg.retries && !step; ++attempt) {
      const auto zeros = collect_zero_states(spec, current, m, rng, cfg.zero_search);
      CMatrix mix = CMatrix::Zero(rho.dim(), rho.dim());
      for (const auto& z : zeros) mix.noalias() += z.projector();
      mix /= static_cast<double>(zeros.size());
      try {
        step = max_subtraction(current, DensityMatrix::repaired(mix));
        const double w = 1.0 / static_cast<double>(zeros.size());
        for (const auto& z : zeros) step->zero_states.push_back({w, z});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateInput && e.code() != ErrorCode::kPiAbsorbsRho) throw;
        last_error = e.what();
      }
    }
    if (!step) throw Error(ErrorCode::kDegenerateInput, "chain step failed after retries: " + last_error);
    budget -= static_cast<int>(step->zero_states.size());
    current = step->sigma;
    steps.push_back(std::move(*step));
  }

  PureState final_state = PureState::normalized(current.eigenvectors().col(0));
  const double final_value = spec.measure(final_state);
  double accumulated = 1.0;
  double ratios = 1.0;
  for (const auto& s : steps) {
    accumulated *= 1.0 - s.lambda_pi;
    ratios *= s.ratio;
  }
  double bound = ratios * final_value;
  if (bound < cfg.zero_residual) bound = 0.0;
  ChainResult result{std::move(steps), std::move(final_state), final_value, accumulated, ratios, bound, Ensemble{}};
  result.ensemble = flatten(result, rho);
  return result;
}

BoundResult upper_bound(const InvariantSpec& spec, const DensityMatrix& rho, const ChainConfig& cfg, const Rng& rng) {
  if (cfg.restarts < 1) throw Error(ErrorCode::kInvalidArgument, "restarts must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const auto n = static_cast<std::size_t>(cfg.restarts);
  std::vector<std::optional<ChainResult>> results(n);
  std::vector<std::string> failures(n);
  parallel_for(n, cfg.threads, [&](std::size_t r) {
    Rng stream = rng.split(r);
    try {
      results[r] = chain(spec, rho, cfg, stream);
    } catch (const Error& e) {
      failures[r] = e.what();
    }
  });

  int best = -1;
  std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> diagnostics;
  for (std::size_t r = 0; r < n; ++r) {
    if (!results[r]) {
      diagnostics.push_back("restart " + std::to_string(r) + ": " + failures[r]);
      continue;
    }
    values[r] = results[r]->bound;
    if (best < 0 || results[r]->bound < results[static_cast<std::size_t>(best)]->bound) best = static_cast<int>(r);
  }
  if (best < 0) {
    std::string msg;
    for (const auto& d : diagnostics) msg += "\n  " + d;
    throw Error(ErrorCode::kAllRestartsFailed, std::to_string(n) + " restarts failed:" + msg);
  }
  ChainResult& chosen = *results[static_cast<std::size_t>(best)];
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Ensemble certificate = chosen.ensemble;
  const double value = chosen.bound;
  return BoundResult{value,       std::move(chosen), std::move(certificate), std::move(values), std::move(diagnostics),
                     best,        rng.seed(),        std::max(elapsed, 1e-9)};
}

// ---------------------------------------------------------------------------
// Generalized step

namespace {

PureState minimize_on_range(const PureMeasure& e, const CMatrix& basis, Rng& rng) {
  const Eigen::Index r = basis.cols();
  auto value = [&](const CVector& x) { return e(PureState::normalized(basis * x)); };
  std::optional<CVector> best;
  double best_value = std::numeric_limits<double>::infinity();
  constexpr double h = 1e-6;
  for (int start = 0; start < 4; ++start) {
    CVector x = random_complex_gaussian(r, rng).normalized();
    double f = value(x);
    double step = 0.5;
    for (int iter = 0; iter < 200; ++iter) {
      CVector g(r);
      for (Eigen::Index j = 0; j < r; ++j) {
        CVector dx = CVector::Zero(r);
        dx(j) = h;
        const double re = (value((x + dx).normalized()) - value((x - dx).normalized())) / (2 * h);
        dx(j) = Complex(0.0, h);
        const double im = (value((x + dx).normalized()) - value((x - dx).normalized())) / (2 * h);
        g(j) = Complex(re, im);
      }
      g -= x.dot(g).real() * x;
      const double g2 = g.squaredNorm();
      if (g2 < 1e-24) break;
      step = std::min(1.0, 2.0 * step);
      bool moved = false;
      for (int trial = 0; trial < 30; ++trial) {
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
    if (std::isfinite(f) && f < best_value) {
      best_value = f;
      best = x;
    }
  }
  if (!best) throw Error(ErrorCode::kDescentFailure, "measure minimization over the range produced no finite value");
  return PureState::normalized(basis * *best);
}

}  // namespace

GeneralizedStep generalized_step(const PureMeasure& e, const DensityMatrix& rho, Rng& rng) {
  if (rho.rank() < 2) throw Error(ErrorCode::kInvalidArgument, "generalized step needs a mixed state");
  const PureState minimizer = minimize_on_range(e, rho.range_basis(), rng);
  SubtractionStep step = max_subtraction(rho, DensityMatrix::pure(minimizer));
  step.zero_states.push_back({1.0, minimizer});
  return GeneralizedStep{std::move(step), e(minimizer)};
}

GeneralizedChainResult generalized_chain(const PureMeasure& e, const DensityMatrix& rho, Rng& rng) {
  std::vector<GeneralizedStep> steps;
  DensityMatrix current = rho;
  while (current.rank() > 1) {
    steps.push_back(generalized_step(e, current, rng));
    current = steps.back().step.sigma;
  }
  PureState final_state = PureState::normalized(current.eigenvectors().col(0));
  const double final_value = e(final_state);
  double bound = final_value;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    bound = continuity_bound(it->e_pi, bound, it->step.dist_parent_pi, it->step.dist_sigma_pi);
  }
  return GeneralizedChainResult{std::move(steps), std::move(final_state), final_value, bound};
}

}  // namespace roofbound
