#include <doctest.h>

#include "roofbound/bench.hpp"
#include "roofbound/refine.hpp"

using namespace roofbound;

TEST_CASE("membership recovers an explicit weight") {
  const auto& t = three_tangle_spec();
  MembershipConfig cfg;
  const Rng rng(137);
  for (double p : {0.2, 0.5, 0.8}) {
    const DensityMatrix rho = ghz_w_mixture(p);
    const SPoint s = s_membership(t, rho, ghz_state(), cfg, rng);
    REQUIRE(std::isfinite(s.k));
    CHECK(s.k <= p + 1e-3);
    CHECK(s.objective == doctest::Approx(s.k * 1.0));
    if (s.remainder) {
      CHECK(s.remainder_bound <= cfg.eps_member);
      CHECK(max_abs(s.k * ghz_state().projector() + (1 - s.k) * s.remainder->matrix() - rho.matrix()) < 1e-8);
    }
  }
}

TEST_CASE("membership of a zero state") {
  const auto& t = three_tangle_spec();
  MembershipConfig cfg;
  const SPoint s = s_membership(t, ghz_w_mixture(0.3), w_state(), cfg, Rng(139));
  // W is zero-E, so any finite certified weight gives objective 0.
  REQUIRE(std::isfinite(s.k));
  CHECK(s.objective == 0.0);
}

TEST_CASE("membership without any zero-E remainder") {
  const auto& t = three_tangle_spec();
  MembershipConfig cfg;
  // rho is the GHZ projector: the only state in range is GHZ itself, so k = 1.
  const SPoint s = s_membership(t, DensityMatrix::pure(ghz_state()), ghz_state(), cfg, Rng(149));
  CHECK(s.k == doctest::Approx(1.0));

  Rng rng(151);
  const DensityMatrix rho = random_density(2, 3, rng);
  const PureState outside = PureState::normalized(rho.eigenvectors().col(5));
  try {
    s_membership(t, rho, outside, cfg, rng);
    FAIL("expected kNotInRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotInRange);
  }
}

TEST_CASE("membership is monotone in the tolerance") {
  const auto& t = three_tangle_spec();
  Rng rng(157);
  const DensityMatrix rho = random_density(3, 3, rng);
  const PureState psi = PureState::normalized(rho.range_basis() * random_complex_gaussian(3, rng));
  MembershipConfig tight, loose;
  tight.eps_member = 1e-6;
  loose.eps_member = 1e-2;
  const SPoint a = s_membership(t, rho, psi, tight, Rng(1));
  const SPoint b = s_membership(t, rho, psi, loose, Rng(1));
  CHECK(b.k <= a.k + 1e-12);
}

TEST_CASE("chain point reproduces the chain bound") {
  const auto& t = three_tangle_spec();
  ChainConfig cfg;
  Rng rng(163);
  const DensityMatrix rho = random_density(3, 3, rng);
  const ChainResult c = chain(t, rho, cfg, rng);
  const SPoint s = chain_point(t, rho, c);
  CHECK(s.objective == doctest::Approx(c.bound).epsilon(1e-9));
  CHECK(s.k == doctest::Approx(c.accumulated_weight));
}

TEST_CASE("refinement never exceeds its starting chain") {
  const auto& t = three_tangle_spec();
  ChainConfig ccfg;
  ccfg.restarts = 20;
  RefineConfig rcfg;
  rcfg.max_evaluations = 100;
  Rng rng(167);
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix rho = random_density(2, 3, rng);
    const BoundResult ub = upper_bound(t, rho, ccfg, rng.split(i));
    const SPoint r = refine_psi_l(t, rho, *ub.best_chain, rcfg, rng.split(100 + i));
    CHECK(r.objective <= ub.value + 1e-6);
    CHECK(r.objective >= 0.0);
  }
}

TEST_CASE("refinement from a zero start stops at zero") {
  const auto& t = three_tangle_spec();
  ChainConfig ccfg;
  ccfg.restarts = 20;
  const DensityMatrix rho = ghz_w_mixture(0.3);
  const BoundResult ub = upper_bound(t, rho, ccfg, Rng(173));
  REQUIRE(ub.value == 0.0);
  const SPoint r = refine_psi_l(t, rho, *ub.best_chain, RefineConfig{}, Rng(179));
  CHECK(r.objective == 0.0);
}

TEST_CASE("BEA on GHZ/W mixtures") {
  const auto& t = three_tangle_spec();
  RefineConfig cfg;
  for (double p : {0.7, 0.9}) {
    const DensityMatrix rho = ghz_w_mixture(p);
    const BeaResult a = bea_search(t, rho, cfg, Rng(181));
    CHECK(a.mu >= 1 - p - 1e-3);
    if (a.rho_e) {
      CHECK(max_abs(a.mu * a.rho_e->matrix() + (1 - a.mu) * a.omega.projector() - rho.matrix()) < 1e-8);
    }
    const BeaResult b = bea_search(t, rho, cfg, Rng(191));
    CHECK(std::abs(a.mu - b.mu) < 0.02);
  }
  CHECK_THROWS_AS(bea_search(t, DensityMatrix::pure(ghz_state()), cfg, Rng(1)), Error);
}
