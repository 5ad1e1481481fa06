// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "roofbound/bench.hpp"
#include "roofbound/refine.hpp"
#include "roofbound/zero_locus.hpp"

using namespace roofbound;

namespace {

constexpr std::uint64_t kSeed = 20130101;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> grid11() {
  std::vector<double> p;
  for (int i = 0; i <= 10; ++i) p.push_back(i / 10.0);
  return p;
}

// The unconjugated 11-point sweep is shared by criteria 1 and 2.
const std::vector<SweepRow>& plain_sweep() {
  static const std::vector<SweepRow> rows = [] {
    SweepConfig cfg;
    cfg.points = grid11();
    cfg.restarts = 400;
    cfg.seed = kSeed;
    return ghzw_sweep(cfg);
  }();
  return rows;
}

Outcome zero_region() {
  const auto t0 = std::chrono::steady_clock::now();
  SweepConfig cfg;
  cfg.points = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  cfg.restarts = 400;
  cfg.seed = kSeed;
  const auto rows = ghzw_sweep(cfg);
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.bound);
  return {worst < 1e-9 && elapsed < 300.0,
          fmt("max bound over p = 0..0.6 is %.3g (limit 1e-9); %.1f s (limit 300 s)", worst, elapsed)};
}

Outcome endpoints() {
  const auto& rows = plain_sweep();
  const double top = rows.back().bound;
  double worst_drop = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) worst_drop = std::max(worst_drop, rows[i - 1].bound - rows[i].bound);
  std::string values;
  for (const auto& r : rows) values += fmt("%.4f ", r.bound);
  return {std::abs(top - 1.0) <= 1e-9 && worst_drop <= 0.02,
          fmt("bound(1) = %.12f; largest decrease %.3g (slack 0.02); bounds: %s", top, worst_drop, values.c_str())};
}

Outcome lu_invariance() {
  SweepConfig cfg;
  cfg.points = {0.7, 0.8, 0.9};
  cfg.restarts = 400;
  cfg.seed = kSeed;
  const auto plain = ghzw_sweep(cfg);
  cfg.conjugate = true;
  const auto conj = ghzw_sweep(cfg);
  double worst = 0.0;
  std::string pairs;
  for (std::size_t i = 0; i < plain.size(); ++i) {
    worst = std::max(worst, std::abs(plain[i].bound - conj[i].bound));
    pairs += fmt("p=%.1f: %.4f vs %.4f; ", plain[i].p, plain[i].bound, conj[i].bound);
  }
  return {worst < 0.03, fmt("max |difference| %.4f (limit 0.03); %s", worst, pairs.c_str())};
}

Outcome accuracy_gap() {
  BenchConfig cfg;
  cfg.ranks = {2, 3, 4};
  cfg.samples = 100;
  cfg.restarts = 200;
  cfg.with_sd = true;
  cfg.seed = kSeed;
  const auto rows = bench(cfg);
  const double g2 = *rows[0].gap_mean, g3 = *rows[1].gap_mean, g4 = *rows[2].gap_mean;
  const bool band = g2 > 0.0 && g2 <= 0.08;
  const bool trend = g2 >= g3 && g3 >= g4 && g2 > g4;
  return {band && trend, fmt("mean(UB - SD): rank 2 %.4f (band (0, 0.08]), rank 3 %.4f, rank 4 %.4f (must decrease); "
                             "SD time %.2f/%.2f/%.2f s, UB time %.3f/%.3f/%.3f s",
                             g2, g3, g4, *rows[0].sd_time_mean, *rows[1].sd_time_mean, *rows[2].sd_time_mean,
                             rows[0].ub_time_mean, rows[1].ub_time_mean, rows[2].ub_time_mean)};
}

Outcome scaling() {
  BenchConfig cfg;
  cfg.ranks = {2, 3, 4, 5, 6, 7, 8};
  cfg.samples = 50;
  cfg.restarts = 200;
  cfg.seed = kSeed + 1;
  const auto rows = bench(cfg);
  bool monotone = true;
  std::string times;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    times += fmt("%.4f ", rows[i].ub_time_mean);
    if (i > 0 && rows[i].ub_time_mean < rows[i - 1].ub_time_mean) monotone = false;
  }
  const double ratio = rows.back().ub_time_mean / rows.front().ub_time_mean;
  return {monotone && ratio < 16.0,
          fmt("time(8)/time(2) = %.2f (limit 16); monotone: %s; mean s per state, ranks 2..8: %s", ratio,
              monotone ? "yes" : "no", times.c_str())};
}

Outcome random_study_stats() {
  const auto t0 = std::chrono::steady_clock::now();
  StudyConfig cfg;
  cfg.restarts = 200;
  cfg.seed = kSeed;
  cfg.ranks = {2};
  cfg.samples_per_rank = 500;
  const auto r2 = random_study(cfg);
  cfg.ranks = {8};
  cfg.samples_per_rank = 200;
  const auto r8 = random_study(cfg);
  const double elapsed = seconds_since(t0);
  const double med2 = r2.summaries[0].median;
  const double mean8 = r8.summaries[0].mean;
  return {med2 >= 0.08 && med2 <= 0.14 && mean8 < 0.03 && elapsed < 7200.0,
          fmt("rank-2 median %.4f over 500 (band [0.08, 0.14]); rank-8 mean %.4f over 200 (limit 0.03); %.0f s",
              med2, mean8, elapsed)};
}

Outcome oracle_soundness() {
  const auto& c = concurrence_spec();
  Rng rng = Rng(kSeed).split(7);
  ChainConfig cfg;
  cfg.restarts = 20;
  DescentConfig sd;
  int violations = 0, rank2 = 0, close = 0;
  double worst = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const int rank = 1 + i % 4;
    const DensityMatrix rho = random_density(rank, 2, rng);
    const double exact = oracle::wootters(rho.matrix());
    const double ub = upper_bound(c, rho, cfg, rng.split(static_cast<std::uint64_t>(i))).value;
    if (ub < exact - 1e-9) ++violations;
    if (rank == 2) {
      ++rank2;
      const double gap = convex_roof_descent(c, rho, sd, rng.split(100000 + static_cast<std::uint64_t>(i))).value - exact;
      worst = std::max(worst, gap);
      if (std::abs(gap) < 1e-3) ++close;
    }
  }
  const double share = static_cast<double>(close) / rank2;
  return {violations == 0 && share >= 0.95,
          fmt("UB below Wootters on %d of 1000 states; SD within 1e-3 on %d/%d rank-2 states (%.1f%%, need 95%%), "
              "worst SD gap %.2g",
              violations, close, rank2, 100.0 * share, worst)};
}

Outcome subtraction_identities() {
  Rng rng = Rng(kSeed).split(8);
  int eqa = 0, eqb = 0, rank_drop = 0, continuity = 0, boundary = 0;
  for (int i = 0; i < 1000; ++i) {
    const int rank = 2 + static_cast<int>(rng.below(7));
    const DensityMatrix rho = random_density(rank, 3, rng);
    const int m = 1 + static_cast<int>(rng.below(3));
    CMatrix pm = CMatrix::Zero(8, 8);
    for (int j = 0; j < m; ++j) {
      pm += PureState::normalized(rho.range_basis() * random_complex_gaussian(rank, rng)).projector() / double(m);
    }
    const DensityMatrix pi = DensityMatrix::repaired(pm);
    const SubtractionStep s = max_subtraction(rho, pi);
    const double d_rho_pi = oracle::trace_distance(rho.matrix(), pi.matrix());
    const double d_rho_sigma = oracle::trace_distance(rho.matrix(), s.sigma.matrix());
    const double d_sigma_pi = oracle::trace_distance(s.sigma.matrix(), pi.matrix());
    if (std::abs(d_sigma_pi - d_rho_pi - d_rho_sigma) > 1e-9) ++eqa;
    if (std::abs(d_rho_sigma - s.k) > 1e-9) ++eqb;
    if (s.sigma.rank() >= rho.rank()) ++rank_drop;
    const double f_rho = rho.eigenvalues()(0);
    if (f_rho > continuity_bound(pi.eigenvalues()(0), s.sigma.eigenvalues()(0), d_rho_pi, d_sigma_pi) + 1e-9) ++continuity;
    if (hermitian_eigenvalues(sigma_operator(rho, pi, 10.0 * s.k)).minCoeff() >= 0.0) ++boundary;
  }
  const int total = eqa + eqb + rank_drop + continuity + boundary;
  return {total == 0, fmt("violations over 1000 pairs: eqa %d, eqb %d, rank-drop %d, continuity %d, beyond-boundary %d",
                          eqa, eqb, rank_drop, continuity, boundary)};
}

Outcome certificates() {
  const auto& t = three_tangle_spec();
  Rng rng = Rng(kSeed).split(9);
  ChainConfig cfg;
  int recon = 0, members = 0, size = 0, average = 0, n = 0;
  for (int rank = 1; rank <= 8; ++rank) {
    for (int i = 0; i < 100; ++i, ++n) {
      const DensityMatrix rho = random_density(rank, 3, rng);
      const ChainResult c = chain(t, rho, cfg, rng);
      const Ensemble& e = c.ensemble;
      if (max_abs(e.reconstruct() - rho.matrix()) > 1e-8) ++recon;
      int entangled = 0;
      for (const auto& mem : e.members()) entangled += t.measure(mem.state) > 1e-9;
      // A chain ending on a zero-E state has no entangled member; otherwise exactly one.
      if (entangled != (c.final_value > 1e-9 ? 1 : 0)) ++members;
      if (static_cast<int>(e.size()) > rank * rank) ++size;
      if (std::abs(ensemble_average(t, e) - c.bound) > 1e-8) ++average;
    }
  }
  return {recon + members + size + average == 0,
          fmt("violations over %d chains (ranks 1..8): reconstruction %d, entangled-member count %d, size > d^2 %d, "
              "average != bound %d",
              n, recon, members, size, average)};
}

Outcome root_finder() {
  const auto& t = three_tangle_spec();
  Rng rng = Rng(kSeed).split(10);
  int spans = 0, empty = 0, residual = 0, too_many = 0;
  double worst = 0.0;
  while (spans < 500) {
    const PureState a = random_pure(3, rng);
    const PureState b = random_pure(3, rng);
    if (t.measure(b) <= 1e-6) continue;
    ++spans;
    const auto roots = zero_on_span(t, a, b);
    if (roots.empty()) ++empty;
    if (roots.size() > 4) ++too_many;
    for (const auto& r : roots) {
      worst = std::max(worst, r.residual);
      if (r.residual >= 1e-9) ++residual;
    }
  }
  return {empty + residual + too_many == 0,
          fmt("500 spans: no root %d, residual >= 1e-9 %d (worst %.2g), more than 4 roots %d", empty, residual, worst,
              too_many)};
}

Outcome refinement_order() {
  const auto& t = three_tangle_spec();
  ChainConfig ccfg;
  ccfg.restarts = 200;
  RefineConfig rcfg;
  int above_chain = 0, below_refine = 0;
  double improvement = 0.0;
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix rho = study_state(kSeed + 11, 2, i);
    const Rng rng = Rng(kSeed).split(11).split(static_cast<std::uint64_t>(i));
    const BoundResult ub = upper_bound(t, rho, ccfg, rng);
    const BeaResult bea = bea_search(t, rho, rcfg, rng.split(1), &*ub.best_chain);
    const SPoint refined = refine_psi_l(t, rho, *ub.best_chain, rcfg, rng.split(2), {bea.point});
    if (refined.objective > ub.value + 1e-6) ++above_chain;
    if (bea.objective() < refined.objective - 1e-6) ++below_refine;
    improvement += ub.value - refined.objective;
  }
  return {above_chain + below_refine == 0,
          fmt("50 rank-2 states: refine above chain %d, BEA below refine %d; mean refine improvement %.4f", above_chain,
              below_refine, improvement / 50)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"GHZ/W zero region", zero_region},
      {"GHZ/W endpoints and monotonicity", endpoints},
      {"local-unitary invariance", lu_invariance},
      {"accuracy gap against steepest descent", accuracy_gap},
      {"runtime scaling in rank", scaling},
      {"random-study statistics", random_study_stats},
      {"Wootters oracle soundness", oracle_soundness},
      {"subtraction identity suite", subtraction_identities},
      {"certificate soundness", certificates},
      {"span root finder", root_finder},
      {"refinement ordering", refinement_order},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[i].first << ": " << o.detail
              << fmt(" (%.1f s)", seconds_since(t0)) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
