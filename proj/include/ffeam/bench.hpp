#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ffeam/baselines.hpp"
#include "ffeam/config.hpp"
#include "ffeam/dataset.hpp"
#include "ffeam/ffeam.hpp"

namespace ffeam {

// Fill error at injected cells. rmse/mae average over the n_eval injected
// cells; table_rmse/table_mae average over every cell of the table, where
// observed cells contribute zero error.
struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t n_eval = 0;
  double table_rmse = 0.0;
  double table_mae = 0.0;
  std::size_t n_cells = 0;
};

Metrics evaluate(const NumericTable& filled, const GroundTruth& truth);

struct ColumnTTest {
  double mean_p = 1.0;
  std::vector<double> column_p;
  std::vector<bool> degenerate;  // zero-variance column pairs
};

// Welch t-test per column between the complete original and the filled table.
ColumnTTest ttest_filled_vs_original(const NumericTable& original, const NumericTable& filled);

enum class Method { means, knn, ae, ce_aann, ffeam };

std::string to_string(Method method);
Method parse_method(std::string_view text);

// Per-method hyperparameters. Seeds marked as fixed are used verbatim;
// otherwise they are derived from each run's seed.
struct MethodSettings {
  PrefillConfig prefill;
  RbfConfig rbf;
  KnnConfig knn;
  TrainConfig ffeam;
  TrainConfig ae;
  TrainConfig ce_aann;
  bool normalize = false;

  bool prefill_seed_fixed = false;
  bool rbf_seed_fixed = false;
  bool ffeam_seed_fixed = false;
  bool ae_seed_fixed = false;
  bool ce_aann_seed_fixed = false;
};

struct ImputeOutcome {
  NumericTable filled;
  std::optional<TrainLog> log;
};

ImputeOutcome impute(const NumericTable& masked, Method method, const MethodSettings& settings,
                     std::uint64_t seed);

struct DatasetSource {
  enum class Kind { builtin, csv, synthetic };
  std::string name;
  Kind kind = Kind::builtin;
  std::string path;
  std::string missing_token;
  SyntheticSpec synthetic;
};

NumericTable load_dataset(const DatasetSource& source);

struct RunConfig {
  std::vector<DatasetSource> datasets;
  std::vector<double> rates{0.2, 0.3, 0.4, 0.5};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<Method> methods{Method::means, Method::knn, Method::ae, Method::ce_aann,
                              Method::ffeam};
  MethodSettings settings;
  std::size_t min_observed_per_row = 1;
  std::size_t min_observed_per_column = 2;
  std::filesystem::path output_dir = "results";
  std::size_t threads = 1;

  std::size_t sweep_total_hidden = 20;
  std::vector<std::pair<std::size_t, std::size_t>> sweep_splits;

  KeyValueConfig source;  // as read, for the report

  // Throws ConfigError on invalid values or unknown keys.
  static RunConfig from_config(const KeyValueConfig& cfg);
  // Overrides the seed list (the CLI --seed flag).
  void override_seed(std::uint64_t seed);
};

// Method settings only (the `impute` command).
MethodSettings settings_from_config(const KeyValueConfig& cfg);

struct EvalRecord {
  std::string dataset;
  std::string method;
  double rate = 0.0;
  std::uint64_t seed = 0;
  Metrics metrics;
  std::optional<double> p_value;
  std::vector<double> column_p;
  double wall_time_s = 0.0;
  std::string config_digest;
  bool ok = true;
  std::string error;
};

struct EvalReport {
  std::vector<EvalRecord> records;

  std::size_t failures() const;
};

// One (dataset, method, rate, seed) cell of the benchmark grid. Never throws;
// failures are recorded in the returned record.
EvalRecord run_single(const std::string& dataset_name, const NumericTable& complete, Method method,
                      double rate, std::uint64_t seed, const RunConfig& cfg);

// Full dataset x method x rate x seed grid, records ordered by that nesting.
EvalReport run_benchmark(const RunConfig& cfg);

// report.csv and report.json in `dir`.
void write_report(const EvalReport& report, const RunConfig& cfg, const std::filesystem::path& dir);
std::string format_report_csv(const EvalReport& report);
// Median across seeds per (dataset, rate, method).
std::string format_summary(const EvalReport& report);

struct SweepRow {
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  double median_rmse = 0.0;
  double median_mae = 0.0;
  double median_table_rmse = 0.0;
  double median_table_mae = 0.0;
  std::vector<EvalRecord> runs;
};

struct SweepReport {
  std::string dataset;
  double rate = 0.0;
  std::size_t total_hidden = 20;
  std::vector<SweepRow> rows;

  std::size_t failures() const;
  // Row with the lowest median RMSE.
  std::size_t best_row() const;
};

// Evenly spaced default splits (5, total-5) ... (total-5, 5).
std::vector<std::pair<std::size_t, std::size_t>> default_splits(std::size_t total_hidden);

SweepReport sweep_split(const std::string& dataset_name, const NumericTable& complete, double rate,
                        std::size_t total_hidden,
                        const std::vector<std::pair<std::size_t, std::size_t>>& splits,
                        const RunConfig& cfg);

void write_sweep_report(const SweepReport& report, const RunConfig& cfg,
                        const std::filesystem::path& dir);

std::string fnv1a_hex(std::string_view text);

}  // namespace ffeam
