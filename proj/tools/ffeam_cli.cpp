// Command-line front end: inject, impute, bench, sweep, gen.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "ffeam/bench.hpp"
#include "json.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfigInvalid = 2;

ffeam::NumericTable read_input(const std::string& path, const std::string& dataset,
                               const std::string& token) {
  if (!path.empty() && !dataset.empty())
    throw ffeam::ConfigError("give either --in or --dataset, not both");
  if (!dataset.empty()) return ffeam::builtin_dataset(dataset);
  if (path.empty()) throw ffeam::ConfigError("an input is required (--in or --dataset)");
  return ffeam::load_csv(path, token);
}

void write_log(const ffeam::TrainLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ffeam::Error("cannot write " + path);
  for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) {
    nlohmann::ordered_json line;
    line["epoch"] = e + 1;
    line["mean_loss"] = log.epoch_loss[e];
    out << line.dump() << "\n";
  }
}

ffeam::KeyValueConfig read_config(const std::string& path) {
  return path.empty() ? ffeam::KeyValueConfig{} : ffeam::KeyValueConfig::load(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Missing-value imputation with feature-fusion autoencoders"};
  app.require_subcommand(1);

  // inject
  std::string in_path, dataset, out_path, truth_path, mask_path, token;
  double rate = 0.2;
  std::uint64_t seed = 0;
  std::size_t min_row = 1, min_col = 2;
  auto* inject = app.add_subcommand("inject", "Mask cells of a complete table at random");
  inject->add_option("--in", in_path, "Complete input CSV");
  inject->add_option("--dataset", dataset, "Builtin dataset (iris, wine, seeds)");
  inject->add_option("--rate", rate, "Fraction of cells to mask")->check(CLI::Range(0.0, 1.0));
  inject->add_option("--seed", seed, "Injection seed");
  inject->add_option("--out", out_path, "Masked CSV output")->required();
  inject->add_option("--truth", truth_path, "Ground-truth CSV output (row,col,value)")->required();
  inject->add_option("--mask", mask_path, "Optional 0/1 mask CSV output");
  inject->add_option("--missing-token", token, "Token written for missing cells");
  inject->add_option("--min-observed-per-row", min_row, "Row guard");
  inject->add_option("--min-observed-per-column", min_col, "Column guard");

  // impute
  std::string method_name = "ffeam", config_path, log_path;
  std::optional<std::uint64_t> seed_override;
  auto* impute = app.add_subcommand("impute", "Fill the missing cells of a CSV");
  impute->add_option("--in", in_path, "Masked input CSV")->required();
  impute->add_option("--out", out_path, "Filled CSV output")->required();
  impute->add_option("--method", method_name, "means, knn, ae, ce_aann or ffeam");
  impute->add_option("--config", config_path, "key = value config file");
  impute->add_option("--seed", seed_override, "Seed override");
  impute->add_option("--log", log_path, "Per-epoch training log (JSON lines)");
  impute->add_option("--truth", truth_path, "Ground truth CSV; prints RMSE/MAE");
  impute->add_option("--missing-token", token, "Missing-value token in the input");

  // bench
  auto* bench = app.add_subcommand("bench", "Run the dataset x method x rate x seed grid");
  bench->add_option("--config", config_path, "key = value config file");
  bench->add_option("--out", out_path, "Output directory (overrides output_dir)");
  bench->add_option("--seed", seed_override, "Run a single seed instead of the configured list");

  // sweep
  std::string splits_text;
  std::optional<std::size_t> total_hidden;
  auto* sweep = app.add_subcommand("sweep", "FFEAM over m1/m2 splits of a fixed hidden budget");
  sweep->add_option("--config", config_path, "key = value config file");
  sweep->add_option("--dataset", dataset, "Dataset name from the config (default: first)");
  sweep->add_option("--rate", rate, "Missing rate")->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--total", total_hidden, "Total hidden units");
  sweep->add_option("--splits", splits_text, "Splits such as 5:15,10:10");
  sweep->add_option("--out", out_path, "Output directory (overrides output_dir)");
  sweep->add_option("--seed", seed_override, "Run a single seed");

  // gen
  ffeam::SyntheticSpec synth;
  auto* gen = app.add_subcommand("gen", "Write a synthetic signal + noise table");
  gen->add_option("--n-samples", synth.n_samples, "Rows");
  gen->add_option("--n-valid", synth.n_valid, "Columns driven by shared factors");
  gen->add_option("--n-noise", synth.n_noise, "Independent noise columns");
  gen->add_option("--seed", synth.seed, "Generator seed");
  gen->add_option("--out", out_path, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigInvalid;
  }

  try {
    if (*inject) {
      ffeam::InjectionSpec spec{rate, seed, min_row, min_col};
      const auto table = read_input(in_path, dataset, token);
      auto [masked, truth] = ffeam::inject_missing(table, spec);
      ffeam::save_csv(masked, out_path, token);
      ffeam::save_ground_truth_csv(truth, truth_path);
      if (!mask_path.empty()) ffeam::save_mask_csv(masked, mask_path);
      std::cout << "masked " << truth.size() << " of " << table.rows() * table.cols()
                << " cells\n";
      return kOk;
    }

    if (*impute) {
      const auto cfg = read_config(config_path);
      if (cfg.has("method")) method_name = cfg.get_string("method", method_name);
      const ffeam::Method method = ffeam::parse_method(method_name);
      const auto settings = ffeam::settings_from_config(cfg);
      if (auto unknown = cfg.unused_keys(); !unknown.empty())
        throw ffeam::ConfigError("unknown config key: " + unknown.front());
      const std::uint64_t run_seed = seed_override.value_or(cfg.get_u64("seed", 0));
      const auto masked = ffeam::load_csv(in_path, token);
      const auto outcome = ffeam::impute(masked, method, settings, run_seed);
      ffeam::save_csv(outcome.filled, out_path, token);
      if (!log_path.empty()) {
        if (!outcome.log) throw ffeam::ConfigError("--log needs a trained method (ae, ce_aann, ffeam)");
        write_log(*outcome.log, log_path);
      }
      if (!truth_path.empty()) {
        // Score against the imputer input mask so observed cells are never evaluated.
        ffeam::NumericTable scored = outcome.filled;
        for (std::size_t r = 0; r < masked.rows(); ++r)
          for (std::size_t c = 0; c < masked.cols(); ++c)
            scored.set_observed(r, c, masked.observed(r, c));
        const auto metrics = ffeam::evaluate(scored, ffeam::load_ground_truth_csv(truth_path));
        std::printf("rmse=%.6f mae=%.6f n_eval=%zu\n", metrics.rmse, metrics.mae, metrics.n_eval);
      }
      return kOk;
    }

    if (*bench || *sweep) {
      const auto kv = read_config(config_path);
      auto cfg = ffeam::RunConfig::from_config(kv);
      if (seed_override) cfg.override_seed(*seed_override);
      const std::filesystem::path dir = out_path.empty() ? cfg.output_dir : std::filesystem::path(out_path);

      if (*bench) {
        const auto report = ffeam::run_benchmark(cfg);
        ffeam::write_report(report, cfg, dir);
        std::cout << ffeam::format_summary(report);
        std::cout << report.records.size() << " records, " << report.failures()
                  << " failed; report written to " << dir.string() << "\n";
        for (const auto& r : report.records) {
          if (!r.ok)
            std::cerr << "failed: " << r.dataset << " " << r.method << " rate=" << r.rate
                      << " seed=" << r.seed << ": " << r.error << "\n";
        }
        return report.failures() ? kFailed : kOk;
      }

      const std::size_t total = total_hidden.value_or(cfg.sweep_total_hidden);
      auto splits = cfg.sweep_splits;
      if (total_hidden && splits_text.empty()) splits = ffeam::default_splits(total);
      if (!splits_text.empty()) {
        ffeam::KeyValueConfig tmp;
        tmp.set("sweep.splits", splits_text);
        tmp.set("sweep.total_hidden", std::to_string(total));
        splits = ffeam::RunConfig::from_config(tmp).sweep_splits;
      }
      const ffeam::DatasetSource* src = &cfg.datasets.front();
      if (!dataset.empty()) {
        src = nullptr;
        for (const auto& d : cfg.datasets)
          if (d.name == dataset) src = &d;
        if (!src) throw ffeam::ConfigError("dataset '" + dataset + "' is not in the config");
      }
      const auto table = ffeam::load_dataset(*src);
      const auto report = ffeam::sweep_split(src->name, table, rate, total, splits, cfg);
      ffeam::write_sweep_report(report, cfg, dir);
      for (const auto& row : report.rows)
        std::printf("m1=%2zu m2=%2zu median_rmse=%.4f median_mae=%.4f\n", row.m1, row.m2,
                    row.median_rmse, row.median_mae);
      const auto& best = report.rows[report.best_row()];
      std::printf("best split: m1=%zu m2=%zu\n", best.m1, best.m2);
      return report.failures() ? kFailed : kOk;
    }

    if (*gen) {
      const auto table = ffeam::generate_synthetic(synth);
      ffeam::save_csv(table, out_path);
      return kOk;
    }
  } catch (const ffeam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
