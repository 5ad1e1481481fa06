#include <doctest.h>

#include "oracles.hpp"
#include "roofbound/bench.hpp"
#include "roofbound/sdecomp.hpp"

using namespace roofbound;

namespace {

DensityMatrix diag2(double a, double b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return DensityMatrix::from_matrix(m);
}

std::pair<DensityMatrix, DensityMatrix> random_pair(Rng& rng) {
  const int rank = 2 + static_cast<int>(rng.below(7));
  DensityMatrix rho = random_density(rank, 3, rng);
  const int m = 1 + static_cast<int>(rng.below(3));
  CMatrix pi = CMatrix::Zero(8, 8);
  for (int j = 0; j < m; ++j) {
    pi += PureState::normalized(rho.range_basis() * random_complex_gaussian(rank, rng)).projector() / double(m);
  }
  return {std::move(rho), DensityMatrix::repaired(pi)};
}

}  // namespace

TEST_CASE("maximal subtraction on the qubit case") {
  const DensityMatrix rho = diag2(0.5, 0.5);
  const DensityMatrix pi = diag2(1.0, 0.0);
  const SubtractionStep s = max_subtraction(rho, pi);
  CHECK(s.lambda_pi == doctest::Approx(0.5));
  CHECK(s.k == doctest::Approx(0.5));
  CHECK(max_abs(s.sigma.matrix() - diag2(0.0, 1.0).matrix()) < 1e-12);
  CHECK(trace_distance(rho, s.sigma) == doctest::Approx(0.5));
  CHECK(s.ratio == doctest::Approx(0.5));
  CHECK(max_abs(safe_subtraction(rho, pi).matrix() - diag2(0.0, 1.0).matrix()) < 1e-12);
}

TEST_CASE("max_weight agrees with a bisection oracle") {
  Rng rng(79);
  for (int i = 0; i < 100; ++i) {
    auto [rho, pi] = random_pair(rng);
    const double lam = max_weight(rho, pi);
    CHECK(std::abs(lam - oracle::max_weight(rho.matrix(), pi.matrix(), rho.range_basis())) < 1e-9);
  }
}

TEST_CASE("subtraction identities over random pairs") {
  Rng rng(83);
  for (int i = 0; i < 1000; ++i) {
    auto [rho, pi] = random_pair(rng);
    const SubtractionStep s = max_subtraction(rho, pi);
    const double d_rho_pi = oracle::trace_distance(rho.matrix(), pi.matrix());
    const double d_rho_sigma = oracle::trace_distance(rho.matrix(), s.sigma.matrix());
    const double d_sigma_pi = oracle::trace_distance(s.sigma.matrix(), pi.matrix());
    CHECK(s.sigma.rank() < rho.rank());
    CHECK(std::abs(d_sigma_pi - d_rho_pi - d_rho_sigma) < 1e-9);
    CHECK(std::abs(d_rho_sigma - s.k) < 1e-9);
    CHECK(std::abs(d_rho_pi / d_sigma_pi - s.ratio) < 1e-9);
    CHECK(max_abs(s.lambda_pi * pi.matrix() + (1 - s.lambda_pi) * s.sigma.matrix() - rho.matrix()) < 1e-9);

    const DensityMatrix safe = safe_subtraction(rho, pi);
    CHECK(hermitian_eigenvalues(sigma_operator(rho, pi, rho.lambda_min())).minCoeff() > -1e-10);
    CHECK(safe.rank() >= 1);
    CHECK(hermitian_eigenvalues(sigma_operator(rho, pi, 10 * s.k)).minCoeff() < -1e-10);
  }
}

TEST_CASE("subtraction errors") {
  Rng rng(89);
  const DensityMatrix rho = random_density(3, 3, rng);
  const DensityMatrix outside = DensityMatrix::pure(PureState::normalized(rho.eigenvectors().col(7)));
  try {
    max_subtraction(rho, outside);
    FAIL("expected a support violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSupportViolation);
  }
  CHECK_THROWS_AS(max_subtraction(rho, rho), Error);
  CHECK_THROWS_AS(max_subtraction(DensityMatrix::pure(w_state()), DensityMatrix::pure(w_state())), Error);
}

TEST_CASE("continuity bound") {
  CHECK(continuity_bound(0.0, 0.8, 0.2, 0.5) == doctest::Approx(0.4 * 0.8));
  CHECK(continuity_bound(0.3, 0.7, 0.4, 0.4) == doctest::Approx(0.7));
  CHECK_THROWS_AS(continuity_bound(0.0, 0.5, 0.1, 0.0), Error);

  // Convex test function lambda_max.
  Rng rng(97);
  for (int i = 0; i < 1000; ++i) {
    auto [rho, pi] = random_pair(rng);
    const SubtractionStep s = max_subtraction(rho, pi);
    const double bound =
        continuity_bound(pi.eigenvalues()(0), s.sigma.eigenvalues()(0), s.dist_parent_pi, s.dist_sigma_pi);
    CHECK(rho.eigenvalues()(0) <= bound + 1e-9);
  }
}

TEST_CASE("pi_size keeps the total within d^2") {
  for (int d = 2; d <= 8; ++d) {
    int budget = d * d - 1;
    int rank = d;
    for (int step = 0; rank > 1; ++step, --rank) {
      const int m = pi_size(d, step, rank, budget);
      CHECK(m >= 1);
      CHECK(m <= budget - (rank - 2));
      budget -= m;
    }
    CHECK(budget >= 0);
  }
}

TEST_CASE("chains on the GHZ/W family") {
  const auto& t = three_tangle_spec();
  ChainConfig cfg;
  Rng rng(101);

  const ChainResult w = chain(t, DensityMatrix::pure(w_state()), cfg, rng);
  CHECK(w.bound == 0.0);
  CHECK(w.steps.empty());
  CHECK(w.ensemble.size() == 1);

  const ChainResult g = chain(t, DensityMatrix::pure(ghz_state()), cfg, rng);
  CHECK(g.bound == doctest::Approx(1.0).epsilon(1e-12));

  cfg.restarts = 50;
  cfg.threads = 1;
  const BoundResult b3 = upper_bound(t, ghz_w_mixture(0.3), cfg, rng);
  CHECK(b3.value < 1e-9);
  CHECK(b3.value == 0.0);
  CHECK(ensemble_average(t, b3.certificate) < 1e-9);
}

TEST_CASE("upper bound is sound against the exact GHZ/W roof") {
  const auto& t = three_tangle_spec();
  ChainConfig cfg;
  cfg.restarts = 100;
  const Rng rng(103);
  for (double p : {0.65, 0.7, 0.75, 0.8, 0.9, 0.95}) {
    const BoundResult b = upper_bound(t, ghz_w_mixture(p), cfg, rng);
    CHECK(b.value >= oracle::ghzw_tangle(p) - 1e-9);
    CHECK(b.value <= oracle::ghzw_tangle(p) + 0.05);
  }
  // Frozen oracle values of the exact roof.
  CHECK(oracle::ghzw_tangle(0.6) == 0.0);
  CHECK(oracle::ghzw_tangle(0.8) == doctest::Approx(0.46036).epsilon(1e-4));
}

TEST_CASE("certificates of random chains") {
  const auto& t = three_tangle_spec();
  ChainConfig cfg;
  Rng rng(107);
  for (int i = 0; i < 300; ++i) {
    const int rank = 1 + i % 8;
    const DensityMatrix rho = random_density(rank, 3, rng);
    const ChainResult c = chain(t, rho, cfg, rng);
    const Ensemble e = flatten(c, rho);
    CHECK(max_abs(e.reconstruct() - rho.matrix()) < 1e-8);
    CHECK(std::abs(e.weight_sum() - 1.0) < 1e-10);
    CHECK(static_cast<int>(e.size()) <= rank * rank);
    int entangled = 0;
    for (const auto& m : e.members()) entangled += t.measure(m.state) > 1e-9;
    CHECK(entangled == (c.final_value > 1e-9 ? 1 : 0));
    CHECK(std::abs(ensemble_average(t, e) - c.bound) < 1e-8);
    CHECK(std::abs(c.ratio_product - c.accumulated_weight) < 1e-9);
    if (rank == 1) CHECK(e.size() == 1);
  }
}

TEST_CASE("upper_bound with one restart equals one chain on the same stream") {
  const auto& t = three_tangle_spec();
  ChainConfig cfg;
  cfg.restarts = 1;
  Rng rng(109);
  const DensityMatrix rho = random_density(4, 3, rng);
  const Rng master(7);
  const BoundResult b = upper_bound(t, rho, cfg, master);
  Rng stream = master.split(0);
  const ChainResult c = chain(t, rho, cfg, stream);
  CHECK(b.value == c.bound);
}

TEST_CASE("upper_bound is reproducible and independent of thread count") {
  const auto& t = three_tangle_spec();
  Rng rng(113);
  const DensityMatrix rho = random_density(5, 3, rng);
  ChainConfig one, many;
  one.restarts = many.restarts = 40;
  one.threads = 1;
  many.threads = 4;
  const BoundResult a = upper_bound(t, rho, one, Rng(5));
  const BoundResult b = upper_bound(t, rho, many, Rng(5));
  CHECK(a.value == b.value);
  CHECK(a.best_restart == b.best_restart);
}

TEST_CASE("concurrence upper bound never undercuts Wootters") {
  const auto& c = concurrence_spec();
  ChainConfig cfg;
  cfg.restarts = 20;
  Rng rng(127);
  for (int i = 0; i < 200; ++i) {
    const DensityMatrix rho = random_density(1 + i % 4, 2, rng);
    CHECK(upper_bound(c, rho, cfg, rng.split(i)).value >= oracle::wootters(rho.matrix()) - 1e-9);
  }
}

TEST_CASE("generalized steps") {
  Rng rng(131);
  const auto& t = three_tangle_spec();
  const PureMeasure tangle = [&](const PureState& psi) { return t.measure(psi); };
  const DensityMatrix rho = ghz_w_mixture(0.5);
  const GeneralizedStep step = generalized_step(tangle, rho, rng);
  CHECK(step.e_pi < 1e-9);
  CHECK(step.step.sigma.rank() < rho.rank());

  const PureMeasure constant = [](const PureState&) { return 0.25; };
  const GeneralizedChainResult r = generalized_chain(constant, random_density(3, 3, rng), rng);
  CHECK(r.bound == doctest::Approx(0.25));
  CHECK_THROWS_AS(generalized_step(tangle, DensityMatrix::pure(w_state()), rng), Error);
}
