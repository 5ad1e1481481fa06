#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>

#include "roofbound/baseline.hpp"
#include "roofbound/bench.hpp"
#include "roofbound/zero_locus.hpp"

namespace roofbound {

namespace {

class Suite {
 public:
  explicit Suite(std::string name) : name_(std::move(name)) {}

  void check(bool ok, const std::string& invariant) {
    ++checks_;
    if (!ok) ++failures_[invariant];
  }

  void error(const Error& e) {
    ++checks_;
    ++failures_["exception: " + std::string(to_string(e.code()))];
  }

  bool passed() const { return failures_.empty(); }

  void report(std::ostream& out) const {
    int failed = 0;
    for (const auto& [name, n] : failures_) failed += n;
    out << (passed() ? "[PASS] " : "[FAIL] ") << name_ << ": " << checks_ - failed << "/" << checks_ << " checks";
    if (!passed()) {
      out << "; violated:";
      for (const auto& [name, n] : failures_) out << ' ' << name << " (" << n << ")";
    }
    out << '\n';
  }

 private:
  std::string name_;
  int checks_ = 0;
  std::map<std::string, int> failures_;
};

// rho of random rank 2..8 and pi a uniform mixture of 1..3 random range states.
std::pair<DensityMatrix, DensityMatrix> random_pair(Rng& rng) {
  const int rank = 2 + static_cast<int>(rng.below(7));
  DensityMatrix rho = random_density(rank, 3, rng);
  const int m = 1 + static_cast<int>(rng.below(3));
  CMatrix pi = CMatrix::Zero(8, 8);
  for (int j = 0; j < m; ++j) {
    const PureState z = PureState::normalized(rho.range_basis() * random_complex_gaussian(rank, rng));
    pi += z.projector() / static_cast<double>(m);
  }
  return {std::move(rho), DensityMatrix::repaired(pi)};
}

Suite subtraction_identities(Rng rng, int n) {
  Suite s("subtraction-identities");
  for (int i = 0; i < n; ++i) {
    auto [rho, pi] = random_pair(rng);
    try {
      const SubtractionStep step = max_subtraction(rho, pi);
      const CMatrix rebuilt = step.lambda_pi * pi.matrix() + (1.0 - step.lambda_pi) * step.sigma.matrix();
      s.check(max_abs(rebuilt - rho.matrix()) < 1e-9, "reconstruction");
      s.check(step.sigma.rank() < rho.rank(), "rank-drop");
      const double d_pi_sigma = trace_distance(pi, step.sigma);
      const double d_rho_sigma = trace_distance(rho, step.sigma);
      s.check(std::abs(d_pi_sigma - (trace_distance(pi, rho) + d_rho_sigma)) < 1e-9, "eqa");
      s.check(std::abs(d_rho_sigma - step.k) < 1e-9, "eqb");
      s.check(std::abs(trace_distance(rho, pi) / d_pi_sigma - (1.0 - step.lambda_pi)) < 1e-9, "eps");
    } catch (const Error& e) {
      s.error(e);
    }
  }
  return s;
}

Suite safe_subtraction_suite(Rng rng, int n) {
  Suite s("subtraction-boundary");
  for (int i = 0; i < n; ++i) {
    auto [rho, pi] = random_pair(rng);
    try {
      const DensityMatrix safe = safe_subtraction(rho, pi);
      const RVector raw = hermitian_eigenvalues(sigma_operator(rho, pi, rho.lambda_min()));
      s.check(raw.minCoeff() > -1e-10 && safe.rank() >= 1, "safe-psd");
      const double lambda = max_weight(rho, pi);
      const double k = trace_distance(rho, pi) * lambda / (1.0 - lambda);
      s.check(hermitian_eigenvalues(sigma_operator(rho, pi, 10.0 * k)).minCoeff() < -1e-10, "beyond-boundary");
    } catch (const Error& e) {
      s.error(e);
    }
  }
  return s;
}

Suite continuity_suite(Rng rng, int n) {
  Suite s("continuity");
  auto top = [](const DensityMatrix& r) { return r.eigenvalues()(0); };  // convex, bounded by 1
  for (int i = 0; i < n; ++i) {
    auto [rho, pi] = random_pair(rng);
    try {
      const SubtractionStep step = max_subtraction(rho, pi);
      const double bound = continuity_bound(top(pi), top(step.sigma), step.dist_parent_pi, step.dist_sigma_pi);
      s.check(top(rho) <= bound + 1e-9, "continuity-inequality");
    } catch (const Error& e) {
      s.error(e);
    }
  }
  return s;
}

Suite wootters_oracle(Rng rng, int n) {
  Suite s("wootters-oracle");
  ChainConfig cfg;
  cfg.restarts = 20;
  cfg.threads = 1;
  for (int i = 0; i < n; ++i) {
    const int rank = 1 + i % 4;
    const DensityMatrix rho = random_density(rank, 2, rng);
    try {
      const double exact = wootters_mixed(rho);
      const BoundResult ub = upper_bound(concurrence_spec(), rho, cfg, rng.split(static_cast<std::uint64_t>(i)));
      s.check(ub.value >= exact - 1e-9, "ub-above-roof");
      if (rank == 2 && i < 12) {
        DescentConfig sd;
        sd.threads = 1;
        const BoundResult d = convex_roof_descent(concurrence_spec(), rho, sd, rng.split(1000 + i));
        s.check(d.value >= exact - 1e-9, "sd-above-roof");
        s.check(d.value - exact < 1e-3, "sd-near-roof");
      }
    } catch (const Error& e) {
      s.error(e);
    }
  }
  return s;
}

Suite chain_certificate(Rng rng, int n) {
  Suite s("chain-certificate");
  ChainConfig cfg;
  const auto& spec = three_tangle_spec();
  for (int i = 0; i < n; ++i) {
    const int rank = 1 + i % 8;
    const DensityMatrix rho = random_density(rank, 3, rng);
    try {
      const ChainResult c = chain(spec, rho, cfg, rng);
      const Ensemble& e = c.ensemble;
      s.check(max_abs(e.reconstruct() - rho.matrix()) < 1e-8, "certificate-reconstruction");
      s.check(std::abs(e.weight_sum() - 1.0) < 1e-10, "weights-sum");
      const auto entangled = std::count_if(e.members().begin(), e.members().end(),
                                           [&](const EnsembleMember& m) { return spec.measure(m.state) > 1e-9; });
      s.check(entangled == (c.final_value > 1e-9 ? 1 : 0), "single-entangled-member");
      s.check(static_cast<int>(e.size()) <= rank * rank, "caratheodory-size");
      s.check(std::abs(ensemble_average(spec, e) - c.bound) < 1e-8, "average-equals-bound");
      s.check(std::abs(c.accumulated_weight * c.final_value - c.bound) < 1e-9, "two-accountings");
      s.check(static_cast<int>(c.steps.size()) <= rank - 1, "step-count");
    } catch (const Error& e) {
      s.error(e);
    }
  }
  return s;
}

Suite span_roots(Rng rng, int n) {
  Suite s("span-roots");
  const auto& spec = three_tangle_spec();
  for (int i = 0; i < n; ++i) {
    const PureState a = random_pure(3, rng);
    const PureState b = random_pure(3, rng);
    if (spec.measure(b) <= 1e-6) continue;
    try {
      const auto roots = zero_on_span(spec, a, b);
      s.check(!roots.empty() && roots.size() <= 4, "root-count");
      s.check(std::all_of(roots.begin(), roots.end(), [](const SpanRoot& r) { return r.residual < 1e-9; }),
              "root-residual");
    } catch (const Error& e) {
      s.error(e);
    }
  }
  return s;
}

Suite invariants_suite(Rng rng, int n) {
  Suite s("invariants");
  const auto& tangle = three_tangle_spec();
  s.check(std::abs(tangle.measure(ghz_state()) - 1.0) < 1e-12, "ghz-tangle");
  s.check(tangle.measure(w_state()) < 1e-12, "w-tangle");
  for (int i = 0; i < n; ++i) {
    const PureState psi = random_pure(3, rng);
    s.check(std::abs(tangle.evaluate(psi.span()) - tangle.evaluate_from_table(psi.span())) < 1e-12, "table-matches");
    const LocalUnitary u = random_local_su2(3, rng);
    s.check(std::abs(tangle.measure(u.apply(psi)) - tangle.measure(psi)) < 1e-10, "local-invariance");
    const double t = tangle.measure(psi);
    s.check(t >= 0.0 && t <= 1.0 + 1e-12, "range");
  }
  return s;
}

}  // namespace

int run_selftest(std::uint64_t seed, std::ostream& out) {
  const Rng master(seed);
  const std::vector<std::function<Suite()>> suites = {
      [&] { return invariants_suite(master.split(1), 200); },
      [&] { return span_roots(master.split(2), 200); },
      [&] { return subtraction_identities(master.split(3), 300); },
      [&] { return safe_subtraction_suite(master.split(4), 300); },
      [&] { return continuity_suite(master.split(5), 300); },
      [&] { return chain_certificate(master.split(6), 200); },
      [&] { return wootters_oracle(master.split(7), 200); },
  };
  int failed = 0;
  for (const auto& run : suites) {
    const Suite s = run();
    s.report(out);
    if (!s.passed()) ++failed;
  }
  out << suites.size() - static_cast<std::size_t>(failed) << "/" << suites.size() << " suites passed\n";
  return failed;
}

}  // namespace roofbound
