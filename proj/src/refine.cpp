#include "roofbound/refine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "roofbound/nnls.hpp"
#include "roofbound/parallel.hpp"
#include "roofbound/zero_locus.hpp"

namespace roofbound {

namespace {

constexpr double kRangeTolerance = 1e-9;

// Real coordinates of a Hermitian r x r matrix with the Frobenius norm kept:
// diagonal, then sqrt(2) Re and sqrt(2) Im of the upper triangle.
Eigen::VectorXd hermitian_coordinates(const CMatrix& h) {
  const Eigen::Index r = h.rows();
  Eigen::VectorXd v(r * r);
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < r; ++i) v(n++) = h(i, i).real();
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = i + 1; j < r; ++j) {
      v(n++) = std::sqrt(2.0) * h(i, j).real();
      v(n++) = std::sqrt(2.0) * h(i, j).imag();
    }
  }
  return v;
}

bool range_is_zero_locus(const InvariantSpec& spec, const CMatrix& basis) {
  Rng probe(0x5eed);
  for (int i = 0; i < 4; ++i) {
    const CVector x = random_complex_gaussian(basis.cols(), probe);
    if (spec.measure(PureState::normalized(basis * x)) > tol::kZeroResidual) return false;
  }
  return true;
}

// Zero-state fit certifier for states whose range lies in a fixed subspace.
class RangeCertifier {
 public:
  RangeCertifier(const InvariantSpec& spec, const DensityMatrix& range_of, const MembershipConfig& cfg, const Rng& rng)
      : spec_(spec), cfg_(cfg), rng_(rng), basis_(range_of.range_basis()) {
    if (range_of.rank() == 1) return;
    whole_range_zero_ = range_is_zero_locus(spec, basis_);
    if (whole_range_zero_) return;
    const int r = range_of.rank();
    exact_ = r == 2;
    if (exact_) {
      zeros_ = rank2_zero_states(spec, range_of);
    } else {
      Rng stream = rng.split(0x2e505);
      zeros_ = collect_zero_states(spec, range_of, cfg.zero_samples_per_dim * r * r, stream);
    }
    fit_ = Eigen::MatrixXd(r * r, static_cast<Eigen::Index>(zeros_.size()));
    for (std::size_t j = 0; j < zeros_.size(); ++j) {
      const CVector c = basis_.adjoint() * zeros_[j].amplitudes();
      fit_.col(static_cast<Eigen::Index>(j)) = hermitian_coordinates(c * c.adjoint());
    }
  }

  // Upper bound on E(state); `state` must live in the certifier's range.
  double bound(const DensityMatrix& state, std::uint64_t stream) const {
    if (state.rank() == 1) return spec_.measure(PureState::normalized(state.eigenvectors().col(0)));
    if (whole_range_zero_) return 0.0;
    const double e_max = spec_.max_value();
    double fit_bound = e_max;
    if (fit_.cols() > 0) {
      const auto result = nnls(fit_, hermitian_coordinates(basis_.adjoint() * state.matrix() * basis_));
      const double total = result.x.sum();
      if (total > 0.0) {
        CMatrix pi = CMatrix::Zero(state.dim(), state.dim());
        for (std::size_t j = 0; j < zeros_.size(); ++j) {
          const double w = result.x(static_cast<Eigen::Index>(j));
          if (w > 0.0) pi.noalias() += (w / total) * zeros_[j].projector();
        }
        try {
          const double lambda = max_weight(state, DensityMatrix::repaired(pi));
          fit_bound = std::max(0.0, 1.0 - lambda) * e_max;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kSupportViolation) throw;
        }
      }
    }
    if (fit_bound <= cfg_.eps_member || exact_ || cfg_.ub_restarts <= 0) return fit_bound;
    ChainConfig chain_cfg;
    chain_cfg.restarts = cfg_.ub_restarts;
    chain_cfg.threads = 1;
    try {
      return std::min(fit_bound, upper_bound(spec_, state, chain_cfg, rng_.split(stream)).value);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAllRestartsFailed) throw;
      return fit_bound;
    }
  }

 private:
  const InvariantSpec& spec_;
  MembershipConfig cfg_;
  Rng rng_;
  CMatrix basis_;
  bool whole_range_zero_ = false;
  bool exact_ = false;
  std::vector<PureState> zeros_;
  Eigen::MatrixXd fit_;
};

struct Candidate {
  bool accepted = false;
  double bound = kNoDecomposition;
  std::optional<DensityMatrix> remainder;
};

// Membership queries for many psi against one rho, sharing the certifier.
class Membership {
 public:
  Membership(const InvariantSpec& spec, const DensityMatrix& rho, const MembershipConfig& cfg, const Rng& rng)
      : spec_(spec), rho_(rho), cfg_(cfg), certifier_(spec, rho, cfg, rng) {
    const RVector vals = rho.eigenvalues().head(rho.rank());
    const CMatrix basis = rho.range_basis();
    pseudo_inverse_ = basis * vals.cwiseInverse().asDiagonal() * basis.adjoint();
    projector_ = basis * basis.adjoint();
  }

  void require_in_range(const PureState& psi) const {
    spec_.require_dim(psi.dim());
    const double leak = (psi.amplitudes() - projector_ * psi.amplitudes()).norm();
    if (leak >= kRangeTolerance) {
      throw Error(ErrorCode::kNotInRange, "psi leaves the range of rho by " + std::to_string(leak));
    }
  }

  double w_max(const PureState& psi) const {
    const double q = psi.amplitudes().dot(pseudo_inverse_ * psi.amplitudes()).real();
    return std::min(1.0, 1.0 / q);
  }

  Candidate evaluate(const PureState& psi, double w) const {
    Candidate c;
    const double top = w_max(psi);
    w = std::min(w, top);
    if (w >= 1.0 - 1e-12) {
      // psi carries all of rho: nothing is left to certify.
      c.accepted = true;
      c.bound = 0.0;
      return c;
    }
    CMatrix raw = (rho_.matrix() - w * psi.projector()) / (1.0 - w);
    DensityMatrix remainder = DensityMatrix::repaired(raw);
    const std::uint64_t stream = std::bit_cast<std::uint64_t>(w);
    if (remainder.rank() < rho_.rank()) {
      // At w_max the range shrinks; certify on the remainder's own range.
      Rng rng(stream);
      c.bound = RangeCertifier(spec_, remainder, cfg_, rng).bound(remainder, stream);
    } else {
      c.bound = certifier_.bound(remainder, stream);
    }
    c.accepted = c.bound <= cfg_.eps_member;
    c.remainder = std::move(remainder);
    return c;
  }

  SPoint point(const PureState& psi, double k, Candidate c) const {
    SPoint p{psi, k, std::move(c.remainder), c.bound, k * spec_.measure(psi), false};
    return p;
  }

  // Smallest accepted weight in (lo, hi], given that hi is accepted with `at_hi`.
  SPoint bisect(const PureState& psi, double lo, double hi, Candidate at_hi) const {
    while (hi - lo > cfg_.resolution) {
      const double mid = 0.5 * (lo + hi);
      Candidate c = evaluate(psi, mid);
      if (c.accepted) {
        hi = mid;
        at_hi = std::move(c);
      } else {
        lo = mid;
      }
    }
    return point(psi, hi, std::move(at_hi));
  }

  SPoint scan(const PureState& psi) const {
    const double top = w_max(psi);
    const int n = std::max(1, cfg_.scan_points);
    double previous = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double w = top * j / n;
      Candidate c = evaluate(psi, w);
      if (c.accepted) return bisect(psi, previous, w, std::move(c));
      previous = w;
    }
    return SPoint{psi, kNoDecomposition, std::nullopt, kNoDecomposition, kNoDecomposition, false};
  }

  // Point with k <= w if w is accepted, else nothing.
  std::optional<SPoint> below(const PureState& psi, double w) const {
    w = std::min(w, w_max(psi));
    if (!(w > 0.0)) return std::nullopt;
    Candidate c = evaluate(psi, w);
    if (!c.accepted) return std::nullopt;
    return bisect(psi, 0.0, w, std::move(c));
  }

  double measure(const PureState& psi) const { return spec_.measure(psi); }

 private:
  const InvariantSpec& spec_;
  const DensityMatrix& rho_;
  MembershipConfig cfg_;
  RangeCertifier certifier_;
  CMatrix pseudo_inverse_;
  CMatrix projector_;
};

using Objective = double (*)(const SPoint&);

double weighted_objective(const SPoint& p) { return p.objective; }
double weight_objective(const SPoint& p) { return p.k; }

// Compass search on the unit sphere of the range, in eigenbasis coordinates.
// A trial is evaluated only through Membership::below at the weight that would
// beat the incumbent, so every accepted move strictly improves `objective`.
SPoint pattern_search(const Membership& membership, const CMatrix& basis, SPoint current, Objective objective,
                      bool weight_only, const RefineConfig& cfg) {
  const Eigen::Index r = basis.cols();
  CVector x = basis.adjoint() * current.psi.amplitudes();
  double step = cfg.initial_step;
  int evaluations = 0;
  int failures = 0;
  const SPoint start = current;
  while (step >= cfg.min_step && evaluations < cfg.max_evaluations) {
    bool improved = false;
    for (Eigen::Index j = 0; j < 2 * r && !improved && evaluations < cfg.max_evaluations; ++j) {
      for (double sign : {1.0, -1.0}) {
        CVector trial = x;
        trial(j % r) += sign * step * (j < r ? Complex(1.0, 0.0) : Complex(0.0, 1.0));
        trial.normalize();
        const PureState psi = PureState::normalized(basis * trial);
        const double target = objective(current);
        double w;
        if (weight_only) {
          w = target - cfg.membership.resolution;
        } else {
          const double e = membership.measure(psi);
          w = e > 0.0 ? target / e * (1.0 - 1e-6) : 1.0;
        }
        ++evaluations;
        try {
          auto found = membership.below(psi, w);
          if (found && objective(*found) < objective(current)) {
            current = std::move(*found);
            x = trial;
            improved = true;
            break;
          }
        } catch (const Error&) {
          if (++failures > cfg.failure_budget) {
            SPoint out = start;
            out.warning = true;
            return out;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return current;
}

}  // namespace

double zero_fit_bound(const InvariantSpec& spec, const DensityMatrix& remainder, const MembershipConfig& cfg,
                      const Rng& rng) {
  spec.require_dim(remainder.dim());
  return RangeCertifier(spec, remainder, cfg, rng).bound(remainder, 0);
}

SPoint s_membership(const InvariantSpec& spec, const DensityMatrix& rho, const PureState& psi,
                    const MembershipConfig& cfg, const Rng& rng, const std::optional<SPoint>& known) {
  spec.require_dim(rho.dim());
  const Membership membership(spec, rho, cfg, rng);
  membership.require_in_range(psi);
  if (known && std::isfinite(known->k)) {
    if (auto better = membership.below(psi, known->k - cfg.resolution)) return *better;
    return *known;
  }
  return membership.scan(psi);
}

SPoint chain_point(const InvariantSpec& spec, const DensityMatrix& rho, const ChainResult& chain) {
  const double k = chain.accumulated_weight;
  // The objective is the chain's own bound, zero cutoff included.
  if (chain.steps.empty()) return SPoint{chain.final_state, 1.0, std::nullopt, 0.0, chain.bound, false};
  const auto& members = chain.ensemble.members();
  double zero_part = 0.0;
  for (std::size_t i = 0; i + 1 < members.size(); ++i) zero_part += members[i].weight * spec.measure(members[i].state);
  DensityMatrix remainder = DensityMatrix::repaired((rho.matrix() - k * chain.final_state.projector()) / (1.0 - k));
  return SPoint{chain.final_state, k, std::move(remainder), zero_part / (1.0 - k), chain.bound, false};
}

SPoint refine_psi_l(const InvariantSpec& spec, const DensityMatrix& rho, const ChainResult& start,
                    const RefineConfig& cfg, const Rng& rng, const std::vector<SPoint>& extra_starts) {
  SPoint best = chain_point(spec, rho, start);
  for (const auto& p : extra_starts) {
    if (p.objective < best.objective) best = p;
  }
  if (rho.rank() == 1 || best.objective < tol::kZeroResidual) return best;
  const Membership membership(spec, rho, cfg.membership, rng);
  return pattern_search(membership, rho.range_basis(), std::move(best), &weighted_objective, false, cfg);
}

BeaResult bea_search(const InvariantSpec& spec, const DensityMatrix& rho, const RefineConfig& cfg, const Rng& rng,
                     const ChainResult* start) {
  if (rho.rank() < 2) throw Error(ErrorCode::kInvalidArgument, "bea_search needs a mixed state");
  std::optional<ChainResult> own;
  if (!start) {
    Rng stream = rng.split(0xbea);
    own = chain(spec, rho, ChainConfig{}, stream);
    start = &*own;
  }
  const Membership membership(spec, rho, cfg.membership, rng);
  const CMatrix basis = rho.range_basis();

  std::vector<PureState> seeds;
  for (int i = 0; i < rho.rank(); ++i) seeds.push_back(PureState::normalized(rho.eigenvectors().col(i)));
  Rng draws = rng.split(0x5eed);
  for (int i = 0; i < cfg.random_starts; ++i) {
    seeds.push_back(PureState::normalized(basis * random_complex_gaussian(basis.cols(), draws)));
  }
  std::vector<std::optional<SPoint>> scanned(seeds.size());
  parallel_for(seeds.size(), cfg.threads, [&](std::size_t i) {
    try {
      scanned[i] = membership.scan(seeds[i]);
    } catch (const Error&) {
      // An unusable start is skipped; the chain point is always available.
    }
  });

  SPoint best = chain_point(spec, rho, *start);
  for (auto& p : scanned) {
    if (p && p->k < best.k) best = std::move(*p);
  }
  best = pattern_search(membership, basis, std::move(best), &weight_objective, true, cfg);
  const double mu = 1.0 - best.k;
  return BeaResult{mu, best.remainder, best.psi, std::move(best)};
}

}  // namespace roofbound
