#include "roofbound/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <numeric>

namespace roofbound {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

Rng sample_stream(std::uint64_t seed, int rank, int index, int which) {
  return Rng(seed).split(static_cast<std::uint64_t>(rank)).split(2 * static_cast<std::uint64_t>(index) + which);
}

RunRecord record(const std::string& command, std::uint64_t seed, std::string state_id, int rank,
                 std::optional<double> p, std::string algorithm, double value, double wall, int restarts) {
  // Coarse clocks can report 0 for trivial inputs; the record contract wants > 0.
  return RunRecord{command, seed, std::move(state_id), rank, p, std::move(algorithm), value, std::max(wall, 1e-9),
                   restarts, utc_timestamp()};
}

}  // namespace

PureState ghz_state() {
  CVector a = CVector::Zero(8);
  a(0) = a(7) = 1.0;
  return PureState::normalized(a);
}

PureState w_state() {
  CVector a = CVector::Zero(8);
  a(1) = a(2) = a(4) = 1.0;
  return PureState::normalized(a);
}

DensityMatrix ghz_w_mixture(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "mixture weight must lie in [0, 1]");
  return DensityMatrix::repaired(p * ghz_state().projector() + (1.0 - p) * w_state().projector());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json to_json(const RunRecord& r) {
  Json out{{"command", r.command},   {"seed", r.seed},           {"state_id", r.state_id},
           {"rank", r.rank},         {"algorithm", r.algorithm}, {"value", r.value},
           {"wall_time_s", r.wall_time_s}, {"restarts", r.restarts}, {"timestamp", r.timestamp}};
  out["p"] = r.p ? Json(*r.p) : Json(nullptr);
  return out;
}

std::string csv_header() { return "state_id,rank,p_or_blank,algorithm,value,wall_time_s,restarts,seed"; }

std::string csv_row(const RunRecord& r) {
  return r.state_id + "," + std::to_string(r.rank) + "," + (r.p ? format_double(*r.p) : "") + "," + r.algorithm +
         "," + format_double(r.value) + "," + format_double(r.wall_time_s) + "," + std::to_string(r.restarts) + "," +
         std::to_string(r.seed);
}

RecordSink::RecordSink(std::ostream* csv, std::ostream* ndjson) : csv_(csv), ndjson_(ndjson) {
  if (csv_) *csv_ << csv_header() << '\n' << std::flush;
}

void RecordSink::write(const RunRecord& record) {
  std::lock_guard lock(mutex_);
  if (csv_) *csv_ << csv_row(record) << '\n' << std::flush;
  if (ndjson_) *ndjson_ << to_json(record).dump() << '\n' << std::flush;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "median of no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "mean of no values");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<CdfPoint> ecdf_grid(const std::vector<double>& values, double step, double upper) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "cdf of no values");
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "cdf step must be positive");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const int n = static_cast<int>(std::lround(upper / step));
  std::vector<CdfPoint> out;
  for (int i = 0; i <= n; ++i) {
    const double x = i * step;
    const auto count = i == n ? sorted.size()
                              : static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), x + 1e-12) -
                                                         sorted.begin());
    out.push_back({x, static_cast<double>(count) / static_cast<double>(sorted.size())});
  }
  return out;
}

std::vector<SweepRow> ghzw_sweep(const SweepConfig& cfg, RecordSink* sink) {
  for (double p : cfg.points) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "sweep point outside [0, 1]");
  }
  const Rng master(cfg.seed);
  ChainConfig chain_cfg;
  chain_cfg.restarts = cfg.restarts;
  chain_cfg.threads = cfg.threads;
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    const double p = cfg.points[i];
    DensityMatrix rho = ghz_w_mixture(p);
    if (cfg.conjugate) {
      Rng u_rng = master.split(0x10ca1).split(i);
      rho = conjugate(rho, random_local_su2(3, u_rng));
    }
    const BoundResult result = upper_bound(three_tangle_spec(), rho, chain_cfg, master.split(i));
    rows.push_back({p, result.value, result.wall_time_s, cfg.conjugate});
    if (sink) {
      sink->write(record("ghzw-sweep", cfg.seed, (cfg.conjugate ? "ghzw-lu-p" : "ghzw-p") + format_p(p), rho.rank(), p,
                         "chain-ub", result.value, result.wall_time_s, cfg.restarts));
    }
  }
  return rows;
}

DensityMatrix study_state(std::uint64_t seed, int rank, int index) {
  Rng rng = sample_stream(seed, rank, index, 0);
  return random_density(rank, 3, rng);
}

StudySummary summarize(int rank, const std::vector<double>& values) {
  return StudySummary{rank, static_cast<int>(values.size()), median(values), mean(values), ecdf_grid(values)};
}

StudyResult random_study(const StudyConfig& cfg, RecordSink* sink) {
  ChainConfig chain_cfg;
  chain_cfg.restarts = cfg.restarts;
  chain_cfg.threads = cfg.threads;
  StudyResult out;
  for (int rank : cfg.ranks) {
    if (rank < 2 || rank > 8) throw Error(ErrorCode::kInvalidArgument, "ranks must lie in 2..8");
    std::vector<double> values;
    for (int i = 0; i < cfg.samples_per_rank; ++i) {
      const DensityMatrix rho = study_state(cfg.seed, rank, i);
      const BoundResult result =
          upper_bound(three_tangle_spec(), rho, chain_cfg, sample_stream(cfg.seed, rank, i, 1));
      values.push_back(result.value);
      RunRecord r = record("random-study", cfg.seed, "rank" + std::to_string(rank) + "-" + std::to_string(i), rank,
                           std::nullopt, "chain-ub", result.value, result.wall_time_s, cfg.restarts);
      if (sink) sink->write(r);
      out.rows.push_back(std::move(r));
    }
    if (!values.empty()) out.summaries.push_back(summarize(rank, values));
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<StudySummary>& summaries) {
  out << "rank,statistic,x,value\n";
  for (const auto& s : summaries) {
    out << s.rank << ",median,," << format_double(s.median) << '\n';
    out << s.rank << ",mean,," << format_double(s.mean) << '\n';
    for (const auto& c : s.cdf) out << s.rank << ",cdf," << format_double(c.x) << ',' << format_double(c.fraction) << '\n';
  }
  out << std::flush;
}

std::vector<BenchRow> bench(const BenchConfig& cfg, RecordSink* sink) {
  for (int rank : cfg.ranks) {
    if (rank < 2 || rank > 8) throw Error(ErrorCode::kInvalidArgument, "ranks must lie in 2..8");
    if (cfg.with_sd && rank > 5) {
      throw Error(ErrorCode::kInvalidArgument, "steepest descent baseline is limited to ranks <= 5");
    }
  }
  if (cfg.samples < 1) throw Error(ErrorCode::kInvalidArgument, "samples must be >= 1");
  ChainConfig chain_cfg;
  chain_cfg.restarts = cfg.restarts;
  chain_cfg.threads = cfg.threads;
  DescentConfig sd_cfg = cfg.sd;
  sd_cfg.threads = cfg.threads;

  std::vector<BenchRow> rows;
  for (int rank : cfg.ranks) {
    std::vector<double> ub_times, ub_values, sd_times, sd_values, gaps;
    for (int i = 0; i < cfg.samples; ++i) {
      const DensityMatrix rho = study_state(cfg.seed, rank, i);
      const std::string id = "rank" + std::to_string(rank) + "-" + std::to_string(i);
      const BoundResult ub = upper_bound(three_tangle_spec(), rho, chain_cfg, sample_stream(cfg.seed, rank, i, 1));
      ub_times.push_back(ub.wall_time_s);
      ub_values.push_back(ub.value);
      if (sink) sink->write(record("bench", cfg.seed, id, rank, std::nullopt, "chain-ub", ub.value, ub.wall_time_s,
                                   cfg.restarts));
      if (cfg.with_sd) {
        const BoundResult sd =
            convex_roof_descent(three_tangle_spec(), rho, sd_cfg, sample_stream(cfg.seed, rank, i, 1).split(0x5d));
        sd_times.push_back(sd.wall_time_s);
        sd_values.push_back(sd.value);
        gaps.push_back(ub.value - sd.value);
        if (sink) sink->write(record("bench", cfg.seed, id, rank, std::nullopt, "sd-baseline", sd.value,
                                     sd.wall_time_s, sd_cfg.restarts));
      }
    }
    BenchRow row{rank, cfg.samples, mean(ub_times), mean(ub_values), std::nullopt, std::nullopt, std::nullopt};
    if (cfg.with_sd) {
      row.sd_time_mean = mean(sd_times);
      row.sd_mean = mean(sd_values);
      row.gap_mean = mean(gaps);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace roofbound
