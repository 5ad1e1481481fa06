#include <doctest.h>

#include "oracles.hpp"
#include "roofbound/baseline.hpp"
#include "roofbound/bench.hpp"

using namespace roofbound;

TEST_CASE("identity isometry gives the spectral ensemble") {
  Rng rng(193);
  const DensityMatrix rho = random_density(3, 3, rng);
  const Ensemble e = ensemble_from_isometry({CMatrix::Identity(3, 3), rho});
  REQUIRE(e.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(e.members()[static_cast<std::size_t>(i)].weight == doctest::Approx(rho.eigenvalues()(i)));
  }
}

TEST_CASE("isometry ensembles reconstruct rho") {
  Rng rng(197);
  for (int i = 0; i < 50; ++i) {
    const int d = 1 + i % 8;
    const DensityMatrix rho = random_density(d, 3, rng);
    const Ensemble e = ensemble_from_isometry({random_isometry(d * d, d, rng), rho});
    CHECK(max_abs(e.reconstruct() - rho.matrix()) < 1e-9);
    CHECK(static_cast<int>(e.size()) <= d * d);
  }
  const DensityMatrix rho = random_density(3, 3, rng);
  CHECK_THROWS_AS(ensemble_from_isometry({CMatrix::Ones(4, 3), rho}), Error);
  CHECK_THROWS_AS(ensemble_from_isometry({random_isometry(4, 2, rng), rho}), Error);
}

TEST_CASE("descent on pure input returns the measure") {
  const auto& t = three_tangle_spec();
  const BoundResult r = convex_roof_descent(t, DensityMatrix::pure(ghz_state()), DescentConfig{}, Rng(199));
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(random_ensemble_oracle(t, DensityMatrix::pure(ghz_state()), 5, Rng(1)).value == doctest::Approx(1.0));
}

TEST_CASE("descent reaches the Wootters value") {
  const auto& c = concurrence_spec();
  Rng rng(211);
  DescentConfig cfg;
  int close = 0;
  const int n = 20;
  for (int i = 0; i < n; ++i) {
    const DensityMatrix rho = random_density(2, 2, rng);
    const double exact = oracle::wootters(rho.matrix());
    const BoundResult r = convex_roof_descent(c, rho, cfg, rng.split(i));
    CHECK(r.value >= exact - 1e-9);
    CHECK(std::abs(ensemble_average(c, r.certificate) - r.value) < 1e-12);
    if (r.value - exact < 1e-3) ++close;
  }
  CHECK(close >= 19);
}

TEST_CASE("descent on the GHZ/W zero region") {
  DescentConfig cfg;
  const BoundResult r = convex_roof_descent(three_tangle_spec(), ghz_w_mixture(0.2), cfg, Rng(223));
  CHECK(r.value < 1e-4);
}

TEST_CASE("random ensembles are sound and dominated by descent") {
  const auto& c = concurrence_spec();
  Rng rng(227);
  DescentConfig cfg;
  cfg.restarts = 3;
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix rho = random_density(2, 2, rng);
    const double oracle_value = random_ensemble_oracle(c, rho, 200, rng.split(i)).value;
    CHECK(oracle_value >= oracle::wootters(rho.matrix()) - 1e-9);
    CHECK(oracle_value >= convex_roof_descent(c, rho, cfg, rng.split(50 + i)).value - 0.02);
  }
}
