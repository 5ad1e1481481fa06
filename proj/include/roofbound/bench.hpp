#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "roofbound/baseline.hpp"
#include "roofbound/qcore.hpp"
#include "roofbound/sdecomp.hpp"
#include "roofbound/serialize.hpp"

namespace roofbound {

PureState ghz_state();
PureState w_state();
/// p |GHZ><GHZ| + (1 - p) |W><W|
DensityMatrix ghz_w_mixture(double p);

struct RunRecord {
  std::string command;
  std::uint64_t seed = 0;
  std::string state_id;
  int rank = 0;
  std::optional<double> p;
  std::string algorithm;  // chain-ub, refine, bea, sd-baseline, oracle
  double value = 0.0;
  double wall_time_s = 0.0;
  int restarts = 0;
  std::string timestamp;  // UTC, ISO 8601
};

std::string utc_timestamp();
Json to_json(const RunRecord& record);
/// state_id,rank,p_or_blank,algorithm,value,wall_time_s,restarts,seed
std::string csv_header();
std::string csv_row(const RunRecord& record);

/// Serialized CSV + NDJSON writer; every record is flushed as written, so an
/// interrupted run leaves complete rows only.
class RecordSink {
 public:
  RecordSink(std::ostream* csv, std::ostream* ndjson);
  void write(const RunRecord& record);

 private:
  std::mutex mutex_;
  std::ostream* csv_;
  std::ostream* ndjson_;
};

double median(std::vector<double> values);
double mean(const std::vector<double>& values);

struct CdfPoint {
  double x;
  double fraction;  // share of values <= x
};

/// Empirical CDF on the grid 0, step, ..., upper (values above upper are
/// counted at the last point, so the grid always ends at 1).
std::vector<CdfPoint> ecdf_grid(const std::vector<double>& values, double step = 0.01, double upper = 1.0);

struct SweepConfig {
  std::vector<double> points;
  int restarts = 400;
  bool conjugate = false;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct SweepRow {
  double p;
  double bound;
  double wall_time_s;
  bool conjugated;
};

/// Upper bounds on ghz_w_mixture(p) (optionally conjugated by a random local
/// SU(2)^3 drawn per point) for each requested p.
std::vector<SweepRow> ghzw_sweep(const SweepConfig& cfg, RecordSink* sink = nullptr);

struct StudyConfig {
  std::vector<int> ranks;
  int samples_per_rank = 500;
  int restarts = 200;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct StudySummary {
  int rank;
  int samples;
  double median;
  double mean;
  std::vector<CdfPoint> cdf;
};

struct StudyResult {
  std::vector<RunRecord> rows;
  std::vector<StudySummary> summaries;
};

/// Random three-qubit densities per rank; sample i of rank d is drawn from
/// its own stream, so any row is reproducible from (seed, d, i).
StudyResult random_study(const StudyConfig& cfg, RecordSink* sink = nullptr);
StudySummary summarize(int rank, const std::vector<double>& values);
/// rank,statistic,x,value rows: median, mean and one cdf row per grid point.
void write_summary_csv(std::ostream& out, const std::vector<StudySummary>& summaries);

/// The state sample i of rank d used by random_study and bench.
DensityMatrix study_state(std::uint64_t seed, int rank, int index);

struct BenchConfig {
  std::vector<int> ranks;
  int samples = 240;
  int restarts = 200;
  bool with_sd = false;
  DescentConfig sd;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct BenchRow {
  int rank;
  int samples;
  double ub_time_mean;
  double ub_mean;
  std::optional<double> sd_time_mean;
  std::optional<double> sd_mean;
  std::optional<double> gap_mean;  // mean(UB - SD)
};

/// Throws kInvalidArgument for ranks outside 2..8, or above 5 with SD.
std::vector<BenchRow> bench(const BenchConfig& cfg, RecordSink* sink = nullptr);

/// Runs every property suite and prints one line per suite. Returns the
/// number of failed suites; failures name the violated invariant.
int run_selftest(std::uint64_t seed, std::ostream& out);

}  // namespace roofbound
