#include <doctest.h>

#include <sstream>

#include "roofbound/bench.hpp"
#include "roofbound/serialize.hpp"

using namespace roofbound;

TEST_CASE("density JSON round trip") {
  Rng rng(229);
  const DensityMatrix rho = random_density(4, 3, rng);
  const DensityMatrix back = density_from_json(Json::parse(density_to_json(rho).dump()));
  CHECK(max_abs(back.matrix() - rho.matrix()) < 1e-15);
}

TEST_CASE("malformed density documents") {
  auto code_of = [](const Json& doc) {
    try {
      density_from_json(doc);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  CHECK(code_of(Json::object()) == ErrorCode::kInvalidArgument);
  CHECK(code_of(Json{{"n_qubits", 1}, {"re", {{1, 0}}}, {"im", {{0, 0}, {0, 0}}}}) == ErrorCode::kInvalidArgument);
  CHECK(code_of(Json{{"n_qubits", 1}, {"re", {{1, "x"}, {0, 0}}}, {"im", {{0, 0}, {0, 0}}}}) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of(Json{{"n_qubits", 1}, {"re", {{2, 0}, {0, 0}}}, {"im", {{0, 0}, {0, 0}}}}) == ErrorCode::kInvalidState);
  CHECK(code_of(Json{{"n_qubits", 1}, {"re", {{1, 0}, {0, 0}}}, {"im", {{0, 0}, {0, 0}}}}) == ErrorCode::kInternal);
}

TEST_CASE("certificate JSON carries the ensemble") {
  ChainConfig cfg;
  cfg.restarts = 5;
  const BoundResult b = upper_bound(three_tangle_spec(), ghz_w_mixture(0.8), cfg, Rng(233));
  const Json doc = to_json(b);
  CHECK(doc["value"].get<double>() == b.value);
  CHECK(doc["certificate"].size() == b.certificate.size());
  CHECK(doc.contains("best_chain"));
}

TEST_CASE("GHZ/W mixture") {
  CHECK(ghz_w_mixture(0.5).rank() == 2);
  CHECK(ghz_w_mixture(1.0).is_pure());
  CHECK_THROWS_AS(ghz_w_mixture(1.5), Error);
}

TEST_CASE("statistics") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(mean({1, 2, 3, 6}) == 3.0);
  CHECK_THROWS_AS(median({}), Error);
  const auto cdf = ecdf_grid({0.0, 0.05, 0.5, 2.0});
  REQUIRE(cdf.size() == 101);
  CHECK(cdf.front().fraction == 0.25);
  CHECK(cdf.back().fraction == 1.0);
  for (std::size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i].fraction >= cdf[i - 1].fraction);
}

TEST_CASE("CSV rows") {
  RunRecord r{"bound", 7, "s", 2, std::nullopt, "chain-ub", 0.125, 0.5, 200, "2026-01-01T00:00:00Z"};
  CHECK(csv_header() == "state_id,rank,p_or_blank,algorithm,value,wall_time_s,restarts,seed");
  CHECK(csv_row(r) == "s,2,,chain-ub,0.125,0.5,200,7");
  r.p = 0.25;
  CHECK(csv_row(r) == "s,2,0.25,chain-ub,0.125,0.5,200,7");
  const Json j = to_json(r);
  CHECK(j["p"].get<double>() == 0.25);
  CHECK(j["algorithm"] == "chain-ub");
}

namespace {

// Drops the wall_time_s column, which is not reproducible.
std::string strip_times(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() > 5) cols.erase(cols.begin() + 5);
    for (const auto& c : cols) out += c + ",";
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("random study is reproducible and its summary matches the rows") {
  StudyConfig cfg;
  cfg.ranks = {2, 3};
  cfg.samples_per_rank = 8;
  cfg.restarts = 10;
  cfg.seed = 5;
  std::ostringstream csv1, nd1, csv2;
  RecordSink s1(&csv1, &nd1), s2(&csv2, nullptr);
  const StudyResult a = random_study(cfg, &s1);
  const StudyResult b = random_study(cfg, &s2);
  CHECK(strip_times(csv1.str()) == strip_times(csv2.str()));
  REQUIRE(a.summaries.size() == 2);
  for (const auto& summary : a.summaries) {
    std::vector<double> values;
    for (const auto& r : a.rows) {
      if (r.rank == summary.rank) values.push_back(r.value);
    }
    CHECK(std::abs(median(values) - summary.median) < 1e-12);
    CHECK(std::abs(mean(values) - summary.mean) < 1e-12);
    CHECK(summary.cdf.back().fraction == 1.0);
  }
  std::istringstream lines(nd1.str());
  int n = 0;
  for (std::string line; std::getline(lines, line); ++n) {
    const Json j = Json::parse(line);
    CHECK(j["wall_time_s"].get<double>() > 0.0);
    CHECK(j["value"].get<double>() >= 0.0);
  }
  CHECK(n == 16);
  // Sample i of rank d depends only on (seed, d, i).
  CHECK(max_abs(study_state(5, 3, 4).matrix() - study_state(5, 3, 4).matrix()) == 0.0);
  cfg.ranks = {9};
  CHECK_THROWS_AS(random_study(cfg), Error);
}

TEST_CASE("bench rejects steepest descent above rank five") {
  BenchConfig cfg;
  cfg.ranks = {2, 6};
  cfg.with_sd = true;
  CHECK_THROWS_AS(bench(cfg), Error);
}

TEST_CASE("selftest passes and reports every suite") {
  std::ostringstream out;
  CHECK(run_selftest(20130101, out) == 0);
  const std::string text = out.str();
  int suites = 0;
  for (std::size_t pos = 0; (pos = text.find("[PASS]", pos)) != std::string::npos; ++pos) ++suites;
  CHECK(suites >= 6);
}
