// Command-line harness for the upper-bound algorithm and its experiments.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "roofbound/bench.hpp"
#include "roofbound/refine.hpp"
#include "roofbound/serialize.hpp"
#include "roofbound/zero_locus.hpp"

namespace rb = roofbound;

namespace {

constexpr int kAlgorithmFailure = 1;
constexpr int kInputError = 2;

// Thrown for bad user input detected outside the library.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw InputError("not a number: '" + s + "'");
  return v;
}

// "0,0.1,0.2" or an arithmetic progression written "0,0.1,...,1".
std::vector<double> parse_points(const std::string& text) {
  const auto items = split(text, ',');
  const auto dots = std::find(items.begin(), items.end(), "...");
  if (dots == items.end()) {
    std::vector<double> out;
    for (const auto& s : items) out.push_back(to_double(s));
    return out;
  }
  if (dots - items.begin() != 2 || items.end() - dots != 2) throw InputError("use 'a,b,...,c' for a progression");
  const double a = to_double(items[0]);
  const double step = to_double(items[1]) - a;
  const double c = to_double(items[3]);
  if (!(step > 0.0) || c < a) throw InputError("progression must increase");
  std::vector<double> out;
  const int n = static_cast<int>(std::lround((c - a) / step));
  for (int i = 0; i <= n; ++i) out.push_back(a + i * step);
  return out;
}

// "2..8" or "2,4,6".
std::vector<int> parse_ranks(const std::string& text) {
  std::vector<int> out;
  if (const auto pos = text.find(".."); pos != std::string::npos) {
    const int lo = static_cast<int>(to_double(text.substr(0, pos)));
    const int hi = static_cast<int>(to_double(text.substr(pos + 2)));
    for (int r = lo; r <= hi; ++r) out.push_back(r);
  } else {
    for (const auto& s : split(text, ',')) out.push_back(static_cast<int>(to_double(s)));
  }
  if (out.empty()) throw InputError("no ranks given");
  return out;
}

bool is_input_error(rb::ErrorCode code) {
  switch (code) {
    case rb::ErrorCode::kInvalidArgument:
    case rb::ErrorCode::kInvalidState:
    case rb::ErrorCode::kWrongQubitCount:
    case rb::ErrorCode::kDimensionMismatch: return true;
    default: return false;
  }
}

// CSV to `out` (stdout if empty) plus NDJSON next to it.
struct Outputs {
  std::ofstream csv_file;
  std::ofstream ndjson_file;
  std::unique_ptr<rb::RecordSink> sink;

  explicit Outputs(const std::string& out) {
    if (out.empty()) {
      sink = std::make_unique<rb::RecordSink>(&std::cout, nullptr);
      return;
    }
    csv_file.open(out);
    if (!csv_file) throw InputError("cannot write " + out);
    ndjson_file.open(std::filesystem::path(out).replace_extension(".ndjson"));
    sink = std::make_unique<rb::RecordSink>(&csv_file, &ndjson_file);
  }
};

struct BoundOptions {
  std::string input;
  std::string measure = "three-tangle";
  int restarts = 200;
  std::uint64_t seed = 1;
  bool refine = false;
  std::string out;
};

int cmd_bound(const BoundOptions& o) {
  const auto& spec = rb::spec_by_name(o.measure);
  const rb::DensityMatrix rho = rb::read_density_file(o.input);
  spec.require_dim(rho.dim());
  rb::ChainConfig cfg;
  cfg.restarts = o.restarts;
  const rb::Rng rng(o.seed);
  const rb::BoundResult result = rb::upper_bound(spec, rho, cfg, rng);
  std::cout << "bound: " << result.value << "\n";

  auto make_record = [&](const std::string& algorithm, double value, double wall) {
    return rb::RunRecord{"bound", o.seed, std::filesystem::path(o.input).filename().string(), rho.rank(), std::nullopt,
                         algorithm, value, std::max(wall, 1e-9), o.restarts, rb::utc_timestamp()};
  };
  rb::Json records = rb::Json::array({rb::to_json(make_record("chain-ub", result.value, result.wall_time_s))});
  rb::Json doc{{"measure", spec.name()}, {"result", rb::to_json(result)}};

  if (o.refine && rho.rank() > 1) {
    rb::RefineConfig rcfg;
    const auto t0 = std::chrono::steady_clock::now();
    const rb::BeaResult bea = rb::bea_search(spec, rho, rcfg, rng.split(0xbea), &*result.best_chain);
    const auto t1 = std::chrono::steady_clock::now();
    const rb::SPoint refined = rb::refine_psi_l(spec, rho, *result.best_chain, rcfg, rng.split(0x4ef), {bea.point});
    const auto t2 = std::chrono::steady_clock::now();
    const double bea_time = std::max(1e-9, std::chrono::duration<double>(t1 - t0).count());
    const double ref_time = std::max(1e-9, std::chrono::duration<double>(t2 - t1).count());
    std::cout << "refined: " << refined.objective << (refined.warning ? " (membership search gave up)" : "") << "\n";
    std::cout << "bea: mu = " << bea.mu << ", objective = " << bea.objective() << "\n";
    records.push_back(rb::to_json(make_record("refine", refined.objective, ref_time)));
    records.push_back(rb::to_json(make_record("bea", bea.objective(), bea_time)));
    doc["refine"] = rb::to_json(refined);
    doc["bea"] = rb::to_json(bea.point);
    doc["bea"]["mu"] = bea.mu;
  }
  doc["records"] = records;
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) throw InputError("cannot write " + o.out);
    out << doc.dump(2) << "\n";
  }
  return 0;
}

int cmd_zero_locus(const std::string& input, const std::string& measure, int count, std::uint64_t seed) {
  const auto& spec = rb::spec_by_name(measure);
  const rb::DensityMatrix rho = rb::read_density_file(input);
  spec.require_dim(rho.dim());
  rb::Rng rng(seed);
  const auto states = rho.rank() == 1 ? std::vector<rb::PureState>{rb::zero_in_range(spec, rho, rng)}
                                      : rb::zero_set_sample(spec, rho, count, rng);
  std::cout << rb::zero_states_to_json(spec, states).dump(2) << "\n";
  return 0;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const rb::Error& e) {
    std::cerr << (is_input_error(e.code()) ? "input error: " : "algorithm failure: ") << e.what() << "\n";
    return is_input_error(e.code()) ? kInputError : kAlgorithmFailure;
  } catch (const std::exception& e) {
    std::cerr << "algorithm failure: " << e.what() << "\n";
    return kAlgorithmFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Upper bounds on convex-roof entanglement via zero-E subtraction chains"};
  app.require_subcommand(1);
  int code = 0;

  BoundOptions bound;
  auto* bound_cmd = app.add_subcommand("bound", "Upper bound for one density matrix (JSON file)");
  bound_cmd->add_option("input", bound.input, "Density matrix file")->required();
  bound_cmd->add_option("--measure", bound.measure, "three-tangle or concurrence");
  bound_cmd->add_option("--restarts", bound.restarts, "Chains per bound")->check(CLI::PositiveNumber);
  bound_cmd->add_option("--seed", bound.seed);
  bound_cmd->add_flag("--refine", bound.refine, "Also run psi_l refinement and the BEA search");
  bound_cmd->add_option("--out", bound.out, "Write result, certificate and run records as JSON");
  bound_cmd->callback([&] { code = guarded([&] { return cmd_bound(bound); }); });

  std::string points = "0,0.1,...,1";
  rb::SweepConfig sweep;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("ghzw-sweep", "Bounds on p GHZ + (1 - p) W mixtures");
  sweep_cmd->add_option("--points", points, "Comma list, or 'a,b,...,c'");
  sweep_cmd->add_option("--restarts", sweep.restarts)->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--conjugate", sweep.conjugate, "Conjugate each state by a random local SU(2)^3");
  sweep_cmd->add_option("--seed", sweep.seed);
  sweep_cmd->add_option("--out", sweep_out, "CSV path (NDJSON written alongside)");
  sweep_cmd->callback([&] {
    code = guarded([&] {
      sweep.points = parse_points(points);
      Outputs out(sweep_out);
      for (const auto& row : rb::ghzw_sweep(sweep, out.sink.get())) {
        std::cerr << "p = " << row.p << ": " << row.bound << "\n";
      }
      return 0;
    });
  });

  std::string study_ranks = "2..8";
  rb::StudyConfig study;
  std::string study_out;
  auto* study_cmd = app.add_subcommand("random-study", "Bounds on random three-qubit densities per rank");
  study_cmd->add_option("--ranks", study_ranks, "'2..8' or '2,4,6'");
  study_cmd->add_option("--samples-per-rank", study.samples_per_rank)->check(CLI::PositiveNumber);
  study_cmd->add_option("--restarts", study.restarts)->check(CLI::PositiveNumber);
  study_cmd->add_option("--seed", study.seed);
  study_cmd->add_option("--out", study_out, "CSV path (NDJSON and summary written alongside)");
  study_cmd->callback([&] {
    code = guarded([&] {
      study.ranks = parse_ranks(study_ranks);
      Outputs out(study_out);
      const auto result = rb::random_study(study, out.sink.get());
      if (study_out.empty()) {
        rb::write_summary_csv(std::cout, result.summaries);
      } else {
        std::ofstream summary(std::filesystem::path(study_out).replace_extension(".summary.csv"));
        rb::write_summary_csv(summary, result.summaries);
      }
      for (const auto& s : result.summaries) {
        std::cerr << "rank " << s.rank << ": median " << s.median << ", mean " << s.mean << "\n";
      }
      return 0;
    });
  });

  std::string bench_ranks = "2..8";
  rb::BenchConfig bench;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Runtime and accuracy against the steepest-descent baseline");
  bench_cmd->add_option("--ranks", bench_ranks, "'2..8' or '2,4,6'");
  bench_cmd->add_option("--samples", bench.samples)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--restarts", bench.restarts)->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--with-sd", bench.with_sd, "Also run the steepest-descent baseline (ranks <= 5)");
  bench_cmd->add_option("--sd-iterations", bench.sd.iterations)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--sd-restarts", bench.sd.restarts)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--out", bench_out, "CSV path for per-state rows (NDJSON written alongside)");
  bench_cmd->callback([&] {
    code = guarded([&] {
      bench.ranks = parse_ranks(bench_ranks);
      Outputs out(bench_out);
      const auto rows = rb::bench(bench, out.sink.get());
      std::cerr << "rank,samples,ub_time_mean,ub_mean,sd_time_mean,sd_mean,gap_mean\n";
      auto opt = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string(); };
      for (const auto& r : rows) {
        std::cerr << r.rank << ',' << r.samples << ',' << r.ub_time_mean << ',' << r.ub_mean << ','
                  << opt(r.sd_time_mean) << ',' << opt(r.sd_mean) << ',' << opt(r.gap_mean) << "\n";
      }
      return 0;
    });
  });

  std::uint64_t selftest_seed = 20130101;
  auto* selftest_cmd = app.add_subcommand("selftest", "Run the property suites");
  selftest_cmd->add_option("--seed", selftest_seed);
  selftest_cmd->callback([&] {
    code = guarded([&] { return rb::run_selftest(selftest_seed, std::cout) == 0 ? 0 : kAlgorithmFailure; });
  });

  std::string zl_input, zl_measure = "three-tangle";
  int zl_count = 4;
  std::uint64_t zl_seed = 1;
  auto* zl_cmd = app.add_subcommand("zero-locus", "Sample distinct zero-E states in the range of a density matrix");
  zl_cmd->add_option("input", zl_input, "Density matrix file")->required();
  zl_cmd->add_option("--measure", zl_measure);
  zl_cmd->add_option("--count", zl_count)->check(CLI::PositiveNumber);
  zl_cmd->add_option("--seed", zl_seed);
  zl_cmd->callback([&] { code = guarded([&] { return cmd_zero_locus(zl_input, zl_measure, zl_count, zl_seed); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  return code;
}
