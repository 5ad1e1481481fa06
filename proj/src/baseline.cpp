#include "roofbound/baseline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "roofbound/parallel.hpp"

namespace roofbound {

namespace {

constexpr double kDropWeight = 1e-12;

struct Factor {
  CMatrix a;  // N x d, columns sqrt(lambda_j) e_j
};

Factor factor_of(const DensityMatrix& rho) {
  const int d = rho.rank();
  return {rho.range_basis() * rho.eigenvalues().head(d).cwiseSqrt().asDiagonal()};
}

std::span<const Complex> view(const CMatrix& m, Eigen::Index col) {
  return {m.col(col).data(), static_cast<std::size_t>(m.rows())};
}

// Smoothed modulus sqrt(|P|^2 + eps^2) - eps and its derivative factor
// |P| / sqrt(|P|^2 + eps^2); eps = 0 is the plain modulus.
struct Smoothed {
  double value;
  double slope;
};

Smoothed smoothed(double mod, double eps) {
  if (eps <= 0.0) return {mod, 1.0};
  const double root = std::hypot(mod, eps);
  return {root - eps, mod / root};
}

// sum_i e(w_i) p_i^(1 - D/2) over the columns w_i of W = A V^T, with e the
// smoothed modulus of P.
double objective(const InvariantSpec& spec, const CMatrix& w, double eps = 0.0) {
  const double alpha = 1.0 - 0.5 * spec.degree();
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.cols(); ++i) {
    const double p = w.col(i).squaredNorm();
    if (p < 1e-300) continue;
    total += smoothed(std::abs(spec.evaluate(view(w, i))), eps).value * std::pow(p, alpha);
  }
  return total;
}

// Euclidean gradient in the convention df = Re tr(G^dagger dV).
CMatrix euclidean_gradient(const InvariantSpec& spec, const CMatrix& a, const CMatrix& w, double eps) {
  const double alpha = 1.0 - 0.5 * spec.degree();
  CMatrix h = CMatrix::Zero(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < w.cols(); ++i) {
    const double p = w.col(i).squaredNorm();
    if (p < 1e-300) continue;
    const Smoothed e = smoothed(std::abs(spec.evaluate(view(w, i))), eps);
    h.col(i) = std::pow(p, alpha) * e.slope * gradient(spec, view(w, i)) +
               2.0 * alpha * e.value * std::pow(p, alpha - 1.0) * w.col(i);
  }
  return (a.adjoint() * h).transpose();
}

struct DescentRun {
  double value;
  CMatrix isometry;
};

DescentRun descend(const InvariantSpec& spec, const Factor& f, CMatrix v, const DescentConfig& cfg) {
  auto amplitudes = [&](const CMatrix& iso) -> CMatrix { return f.a * iso.transpose(); };
  const std::vector<double> stages = cfg.smoothing.empty() ? std::vector<double>{0.0} : cfg.smoothing;
  const int per_stage = std::max(1, cfg.iterations / static_cast<int>(stages.size()));
  for (double eps : stages) {
    double value = objective(spec, amplitudes(v), eps);
    for (int iter = 0; iter < per_stage; ++iter) {
      const CMatrix g = euclidean_gradient(spec, f.a, amplitudes(v), eps);
      const CMatrix vg = v.adjoint() * g;
      const CMatrix xi = g - v * (0.5 * (vg + vg.adjoint()));
      const double xi2 = xi.squaredNorm();
      if (xi2 < 1e-28) break;
      double t = cfg.initial_step;
      bool moved = false;
      for (int trial = 0; trial < cfg.line_search_trials; ++trial) {
        CMatrix candidate = orthonormalize_columns(v - t * xi);
        const double cv = objective(spec, amplitudes(candidate), eps);
        if (cv <= value - cfg.armijo * t * xi2) {
          v = std::move(candidate);
          value = cv;
          moved = true;
          break;
        }
        t *= cfg.shrink;
      }
      if (!moved) break;
    }
  }
  return {objective(spec, amplitudes(v)), std::move(v)};
}

BoundResult pure_result(const InvariantSpec& spec, const DensityMatrix& rho, const Rng& rng) {
  const PureState psi = PureState::normalized(rho.eigenvectors().col(0));
  return BoundResult{spec.measure(psi), std::nullopt, Ensemble({{1.0, psi}}), {spec.measure(psi)}, {}, 0,
                     rng.seed(), 1e-9};
}

BoundResult best_of(const InvariantSpec& spec, const DensityMatrix& rho, const std::vector<DescentRun>& runs,
                    const Rng& rng, std::chrono::steady_clock::time_point start) {
  std::size_t best = 0;
  std::vector<double> values;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    values.push_back(runs[r].value);
    if (runs[r].value < runs[best].value) best = r;
  }
  Ensemble certificate = ensemble_from_isometry({runs[best].isometry, rho});
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // Report the certificate's own average so value and witness agree exactly.
  return BoundResult{ensemble_average(spec, certificate), std::nullopt, std::move(certificate), std::move(values), {},
                     static_cast<int>(best), rng.seed(), std::max(elapsed, 1e-9)};
}

}  // namespace

Ensemble ensemble_from_isometry(const EnsembleParam& param) {
  const CMatrix& v = param.isometry;
  const int d = param.base.rank();
  if (v.cols() != d || v.rows() < d) {
    throw Error(ErrorCode::kInvalidArgument, "isometry must be m x " + std::to_string(d) + " with m >= " +
                                                 std::to_string(d));
  }
  const double defect = max_abs(v.adjoint() * v - CMatrix::Identity(d, d));
  if (defect > 1e-10) {
    throw Error(ErrorCode::kInvalidArgument, "isometry columns not orthonormal (defect " + std::to_string(defect) + ")");
  }
  const CMatrix w = factor_of(param.base).a * v.transpose();
  std::vector<EnsembleMember> members;
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.cols(); ++i) {
    const double p = w.col(i).squaredNorm();
    if (p < kDropWeight) continue;
    members.push_back({p, PureState::normalized(w.col(i))});
    total += p;
  }
  for (auto& m : members) m.weight /= total;
  return Ensemble(std::move(members));
}

BoundResult convex_roof_descent(const InvariantSpec& spec, const DensityMatrix& rho, const DescentConfig& cfg,
                                const Rng& rng) {
  spec.require_dim(rho.dim());
  if (cfg.iterations < 1) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  if (cfg.restarts < 1) throw Error(ErrorCode::kInvalidArgument, "restarts must be >= 1");
  if (rho.is_pure()) return pure_result(spec, rho, rng);
  const int d = rho.rank();
  const int m = cfg.ensemble_size > 0 ? cfg.ensemble_size : d * d;
  if (m < d) throw Error(ErrorCode::kInvalidArgument, "ensemble size must be >= rank");

  const auto start = std::chrono::steady_clock::now();
  const Factor f = factor_of(rho);
  std::vector<DescentRun> runs(static_cast<std::size_t>(cfg.restarts));
  parallel_for(runs.size(), cfg.threads, [&](std::size_t r) {
    Rng stream = rng.split(r);
    runs[r] = descend(spec, f, random_isometry(m, d, stream), cfg);
  });
  return best_of(spec, rho, runs, rng, start);
}

BoundResult random_ensemble_oracle(const InvariantSpec& spec, const DensityMatrix& rho, int samples, const Rng& rng,
                                   int threads) {
  spec.require_dim(rho.dim());
  if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "samples must be >= 1");
  if (rho.is_pure()) return pure_result(spec, rho, rng);
  const int d = rho.rank();
  const auto start = std::chrono::steady_clock::now();
  const Factor f = factor_of(rho);
  std::vector<DescentRun> runs(static_cast<std::size_t>(samples));
  parallel_for(runs.size(), threads, [&](std::size_t s) {
    Rng stream = rng.split(s);
    CMatrix v = random_isometry(d * d, d, stream);
    runs[s] = {objective(spec, f.a * v.transpose()), std::move(v)};
  });
  return best_of(spec, rho, runs, rng, start);
}

}  // namespace roofbound
