#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ffeam/bench.hpp"
#include "ffeam/stats.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace ffeam;
using namespace ffeam::testing;

namespace {

NumericTable masked_pair(double t0, double t1) {
  Matrix m(2, 2);
  m(0, 0) = t0;
  m(1, 0) = 5.0;
  m(0, 1) = 1.0;
  m(1, 1) = t1;
  auto t = complete_table(m);
  t.set_observed(0, 0, false);
  t.set_observed(1, 1, false);
  return t;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KeyValueConfig small_config(const std::string& extra = "") {
  return KeyValueConfig::parse(
      "datasets = iris\nrates = 0.2\nseeds = 1, 2\nmethods = means, knn, ffeam\n"
      "ffeam.epochs = 5\nffeam.m1 = 3\nffeam.m2 = 3\nprefill.n_trees = 5\n" + extra);
}

}  // namespace

TEST_CASE("evaluate on hand examples") {
  const GroundTruth truth{{0, 0, 1.0}, {1, 1, 2.0}};
  const auto m = evaluate(masked_pair(1.0, 4.0), truth);
  CHECK(m.rmse == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(m.mae == 1.0);
  CHECK(m.n_eval == 2);
  CHECK(m.table_rmse == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.table_mae == 0.5);
  const auto perfect = evaluate(masked_pair(1.0, 2.0), truth);
  CHECK(perfect.rmse == 0.0);
  CHECK(perfect.mae == 0.0);
  const auto shifted = evaluate(masked_pair(1.5, 1.5), truth);
  CHECK(shifted.rmse == 0.5);
  CHECK(shifted.mae == 0.5);
}

TEST_CASE("evaluate rejects coordinate mismatches") {
  const auto t = masked_pair(1.0, 2.0);
  CHECK_THROWS_AS(evaluate(t, {}), DataError);
  CHECK_THROWS_AS(evaluate(t, GroundTruth{{0, 1, 1.0}}), DataError);
  CHECK_THROWS_AS(evaluate(t, GroundTruth{{5, 0, 1.0}}), DataError);
  auto unfilled = t;
  unfilled.set_value(0, 0, std::nan(""));
  CHECK_THROWS_AS(evaluate(unfilled, GroundTruth{{0, 0, 1.0}}), DataError);
}

TEST_CASE("evaluate ignores observed cells") {
  const auto iris = builtin_dataset("iris");
  auto [masked, truth] = inject_missing(iris, {0.3, 1, 1, 2});
  auto filled = impute_means(masked);
  const auto base = evaluate(filled, truth);
  std::mt19937_64 rng(2);
  for (std::size_t r = 0; r < filled.rows(); ++r)
    for (std::size_t c = 0; c < filled.cols(); ++c)
      if (filled.observed(r, c)) filled.set_value(r, c, double(rng() % 1000));
  const auto after = evaluate(filled, truth);
  CHECK(after.rmse == base.rmse);
  CHECK(after.mae == base.mae);
}

TEST_CASE("t-test of filled against original") {
  const auto iris = builtin_dataset("iris");
  const auto same = ttest_filled_vs_original(iris, iris);
  CHECK(same.mean_p == 1.0);
  for (double p : same.column_p) CHECK(p == 1.0);
  auto [masked, truth] = inject_missing(iris, {0.2, 3, 1, 2});
  const auto tt = ttest_filled_vs_original(iris, impute_means(masked));
  CHECK(tt.column_p.size() == 4);
  CHECK(tt.mean_p > 0.0);
  CHECK(tt.mean_p <= 1.0);
  CHECK_THROWS_AS(ttest_filled_vs_original(masked, iris), DataError);
  CHECK_THROWS_AS(ttest_filled_vs_original(iris, masked), DataError);
}

TEST_CASE("method names round trip") {
  for (auto m : {Method::means, Method::knn, Method::ae, Method::ce_aann, Method::ffeam})
    CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("mice"), ConfigError);
}

TEST_CASE("run config parsing and validation") {
  const auto rc = RunConfig::from_config(small_config());
  CHECK(rc.datasets.size() == 1);
  CHECK(rc.datasets[0].kind == DatasetSource::Kind::builtin);
  CHECK(rc.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(rc.methods.size() == 3);
  CHECK(rc.settings.ffeam.epochs == 5);
  CHECK(rc.sweep_splits.size() == 11);

  const auto defaults = RunConfig::from_config(KeyValueConfig{});
  CHECK(defaults.rates == std::vector<double>{0.2, 0.3, 0.4, 0.5});
  CHECK(defaults.seeds.size() == 5);
  CHECK(defaults.methods.size() == 5);
  CHECK(defaults.settings.knn.k == 5);
  CHECK(defaults.settings.ffeam.learning_rate == 0.1);
  CHECK(defaults.settings.ffeam.epochs == 1000);
  CHECK(defaults.settings.ffeam.batch_size == 20);

  CHECK_THROWS_AS(RunConfig::from_config(small_config("ffeam.learnig_rate = 1\n")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_config(small_config("knn.k = 0\n")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_config(KeyValueConfig::parse("rates = 1.5\n")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_config(KeyValueConfig::parse("seeds = \n")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_config(KeyValueConfig::parse("methods = mice\n")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_config(KeyValueConfig::parse("datasets = mine\n")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_config(KeyValueConfig::parse("ffeam.rbf_norm = l1\n")),
                  ConfigError);

  const auto synth = RunConfig::from_config(KeyValueConfig::parse(
      "datasets = ds\ndataset.ds.source = synthetic\ndataset.ds.n_samples = 50\n"
      "dataset.ds.n_noise = 2\nsweep.splits = 3:7, 5:5\nsweep.total_hidden = 10\n"));
  CHECK(synth.datasets[0].kind == DatasetSource::Kind::synthetic);
  CHECK(load_dataset(synth.datasets[0]).rows() == 50);
  CHECK(synth.sweep_splits == std::vector<std::pair<std::size_t, std::size_t>>{{3, 7}, {5, 5}});

  auto seeded = rc;
  seeded.override_seed(42);
  CHECK(seeded.seeds == std::vector<std::uint64_t>{42});
}

TEST_CASE("benchmark record count, ordering and determinism") {
  const auto rc = RunConfig::from_config(small_config());
  const auto a = run_benchmark(rc);
  REQUIRE(a.records.size() == 6);
  CHECK(a.failures() == 0);
  CHECK(a.records[0].method == "means");
  CHECK(a.records[1].method == "means");
  CHECK(a.records[1].seed == 2);
  CHECK(a.records[5].method == "ffeam");
  auto threaded_cfg = rc;
  threaded_cfg.threads = 3;
  const auto b = run_benchmark(threaded_cfg);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].metrics.rmse == b.records[i].metrics.rmse);
    CHECK(a.records[i].metrics.mae == b.records[i].metrics.mae);
    CHECK(a.records[i].metrics.rmse >= 0.0);
  }
}

TEST_CASE("failures are recorded without stopping the run") {
  auto cfg = RunConfig::from_config(KeyValueConfig::parse(
      "datasets = iris, broken\ndataset.broken.source = csv\ndataset.broken.path = /no/such.csv\n"
      "rates = 0.2\nseeds = 1\nmethods = means\n"));
  const auto rep = run_benchmark(cfg);
  REQUIRE(rep.records.size() == 2);
  CHECK(rep.records[0].ok);
  CHECK_FALSE(rep.records[1].ok);
  CHECK(rep.failures() == 1);
  CHECK(rep.records[1].error.find("cannot open") != std::string::npos);
}

TEST_CASE("reports are written as CSV and JSON") {
  const auto rc = RunConfig::from_config(small_config());
  const auto rep = run_benchmark(rc);
  const auto dir = std::filesystem::temp_directory_path() / "ffeam_bench_test";
  std::filesystem::remove_all(dir);
  write_report(rep, rc, dir);
  const auto csv = read_file(dir / "report.csv");
  CHECK(csv.rfind("dataset,method,rate,seed,rmse,mae", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  const auto j = nlohmann::json::parse(read_file(dir / "report.json"));
  CHECK(j["records"].size() == 6);
  CHECK(j["config"]["ffeam.epochs"] == "5");
  CHECK(j["decisions"]["rbf_norm"] == "squared");
  CHECK(j["decisions"]["knn_k"] == 5);
  CHECK(j["records"][0]["rmse"].get<double>() == rep.records[0].metrics.rmse);
  const auto summary = format_summary(rep);
  CHECK(summary.find("iris @ 20") != std::string::npos);
  CHECK(summary.find("ffeam") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep validation and consistency with the benchmark") {
  const auto iris = builtin_dataset("iris");
  auto rc = RunConfig::from_config(small_config());
  CHECK_THROWS_AS(sweep_split("iris", iris, 0.2, 20, {{5, 14}}, rc), ConfigError);
  CHECK_THROWS_AS(sweep_split("iris", iris, 0.2, 20, {}, rc), ConfigError);
  CHECK(default_splits(20).front() == std::pair<std::size_t, std::size_t>{5, 15});
  CHECK(default_splits(20).back() == std::pair<std::size_t, std::size_t>{15, 5});

  rc.settings.ffeam.m1 = 3;
  rc.settings.ffeam.m2 = 3;
  const auto sweep = sweep_split("iris", iris, 0.2, 6, {{3, 3}}, rc);
  REQUIRE(sweep.rows.size() == 1);
  const auto bench = run_benchmark(rc);
  std::vector<double> ffeam_rmse;
  for (const auto& r : bench.records)
    if (r.method == "ffeam") ffeam_rmse.push_back(r.metrics.rmse);
  CHECK(sweep.rows[0].median_rmse == median(ffeam_rmse));
  CHECK(sweep.failures() == 0);
  CHECK(sweep.best_row() == 0);
}

TEST_CASE("impute honours normalization and keeps observed cells exact") {
  const auto iris = builtin_dataset("iris");
  auto [masked, truth] = inject_missing(iris, {0.2, 1, 1, 2});
  auto settings = settings_from_config(KeyValueConfig::parse(
      "normalize = true\nffeam.epochs = 5\nffeam.m1 = 3\nffeam.m2 = 3\nprefill.n_trees = 5\n"));
  CHECK(settings.normalize);
  const auto out = impute(masked, Method::ffeam, settings, 3);
  REQUIRE(out.log.has_value());
  for (std::size_t r = 0; r < iris.rows(); ++r)
    for (std::size_t c = 0; c < iris.cols(); ++c)
      if (masked.observed(r, c)) CHECK(out.filled.value(r, c) == masked.value(r, c));
  CHECK_FALSE(impute(masked, Method::means, settings, 3).log.has_value());
}

TEST_CASE("fnv1a digest") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("iris 20%: ffeam fills are closer in distribution than autoencoder fills") {
  const auto rc = RunConfig::from_config(
      KeyValueConfig::parse("datasets = iris\nrates = 0.2\nmethods = ae, ffeam\n"));
  const auto rep = run_benchmark(rc);
  REQUIRE(rep.failures() == 0);
  double p_ae = 0.0, p_ffeam = 0.0;
  for (const auto& r : rep.records) (r.method == "ae" ? p_ae : p_ffeam) += *r.p_value / 5.0;
  CHECK(p_ffeam > p_ae);
}
