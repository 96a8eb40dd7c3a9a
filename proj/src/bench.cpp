#include "ffeam/bench.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "ffeam/stats.hpp"
#include "json.hpp"

namespace ffeam {

namespace {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

BudgetUnit parse_budget_unit(std::string_view text) {
  if (text == "epochs") return BudgetUnit::epochs;
  if (text == "steps") return BudgetUnit::steps;
  throw ConfigError("budget_unit must be 'epochs' or 'steps', got '" + std::string(text) + "'");
}

PrefillMethod parse_prefill_method(std::string_view text) {
  if (text == "forest") return PrefillMethod::forest;
  if (text == "mean") return PrefillMethod::mean;
  throw ConfigError("prefill.method must be 'forest' or 'mean', got '" + std::string(text) + "'");
}

TrainConfig read_train_config(const KeyValueConfig& cfg, const std::string& section,
                              bool& seed_fixed) {
  TrainConfig tc;
  const auto key = [&](const char* name) { return section + "." + name; };
  tc.learning_rate = cfg.get_double(key("learning_rate"), tc.learning_rate);
  tc.epochs = cfg.get_size(key("epochs"), tc.epochs);
  if (auto v = cfg.get(key("budget_unit"))) tc.budget_unit = parse_budget_unit(*v);
  tc.batch_size = cfg.get_size(key("batch_size"), tc.batch_size);
  tc.m1 = cfg.get_size(key("m1"), tc.m1);
  tc.m2 = cfg.get_size(key("m2"), tc.m2);
  if (cfg.has(key("hidden_total"))) tc.hidden_total = cfg.get_size(key("hidden_total"), 0);
  tc.adam.beta1 = cfg.get_double(key("adam_beta1"), tc.adam.beta1);
  tc.adam.beta2 = cfg.get_double(key("adam_beta2"), tc.adam.beta2);
  tc.adam.eps = cfg.get_double(key("adam_eps"), tc.adam.eps);
  tc.init_scale = cfg.get_double(key("init_scale"), tc.init_scale);
  if (auto v = cfg.get(key("rbf_norm"))) tc.rbf_norm = parse_rbf_norm(*v);
  tc.static_fill = cfg.get_bool(key("static_fill"), tc.static_fill);
  seed_fixed = cfg.has(key("seed"));
  tc.seed = cfg.get_u64(key("seed"), tc.seed);
  tc.validate();
  return tc;
}

std::pair<std::size_t, std::size_t> parse_split(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ConfigError("sweep split '" + text + "' must look like m1:m2");
  return {static_cast<std::size_t>(parse_u64(text.substr(0, colon), "sweep.splits")),
          static_cast<std::size_t>(parse_u64(text.substr(colon + 1), "sweep.splits"))};
}

json records_json(const std::vector<EvalRecord>& records) {
  json out = json::array();
  for (const auto& r : records) {
    json j;
    j["dataset"] = r.dataset;
    j["method"] = r.method;
    j["rate"] = r.rate;
    j["seed"] = r.seed;
    j["status"] = r.ok ? "ok" : "failed";
    if (r.ok) {
      j["rmse"] = r.metrics.rmse;
      j["mae"] = r.metrics.mae;
      j["table_rmse"] = r.metrics.table_rmse;
      j["table_mae"] = r.metrics.table_mae;
      j["n_eval"] = r.metrics.n_eval;
      j["p_value"] = r.p_value ? json(*r.p_value) : json(nullptr);
      j["column_p"] = r.column_p;
    } else {
      j["error"] = r.error;
    }
    j["wall_time_s"] = r.wall_time_s;
    j["config_digest"] = r.config_digest;
    out.push_back(std::move(j));
  }
  return out;
}

json decisions_json(const RunConfig& cfg) {
  const MethodSettings& s = cfg.settings;
  json d;
  d["missingness"] = "MCAR, uniform over cells";
  d["injection_guards"] = {{"min_observed_per_row", cfg.min_observed_per_row},
                           {"min_observed_per_column", cfg.min_observed_per_column}};
  d["prefill"] = {{"method", s.prefill.method == PrefillMethod::forest ? "forest" : "mean"},
                  {"n_trees", s.prefill.forest.n_trees},
                  {"max_depth", s.prefill.forest.max_depth},
                  {"min_samples_leaf", s.prefill.forest.min_samples_leaf},
                  {"feature_subsample", s.prefill.forest.feature_subsample},
                  {"bootstrap", s.prefill.forest.bootstrap},
                  {"passes", 1}};
  d["rbf_norm"] = to_string(s.ffeam.rbf_norm);
  d["rbf_width"] = "shared: max centroid distance / sqrt(2h)";
  d["knn_k"] = s.knn.k;
  d["budget_unit"] = s.ffeam.budget_unit == BudgetUnit::epochs ? "epochs" : "steps";
  d["final_fill"] = "model output y from a forward pass after training";
  d["normalize"] = s.normalize;
  d["metric_scope"] =
      "rmse/mae over injected cells; table_rmse/table_mae over all n*s cells with zero error at "
      "observed cells";
  d["ttest_aggregation"] = "mean of per-column two-sided Welch p-values";
  d["synthetic_model"] =
      "valid columns: unit-norm mix of 3 standard-normal factors + N(0, 0.1^2); noise columns: "
      "uniform(-sqrt(3), sqrt(3))";
  d["seed_derivation"] = "injection, forest, k-means, init and shuffle streams from the run seed";
  return d;
}

json config_json(const RunConfig& cfg) {
  json c = json::object();
  for (const auto& [k, v] : cfg.source.entries()) c[k] = v;
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

Metrics evaluate(const NumericTable& filled, const GroundTruth& truth) {
  if (truth.empty()) throw DataError("evaluate: ground truth is empty");
  Metrics m;
  double sq = 0.0;
  double abs = 0.0;
  for (const auto& cell : truth) {
    if (cell.row >= filled.rows() || cell.col >= filled.cols())
      throw DataError("evaluate: ground-truth cell outside the filled table");
    if (filled.observed(cell.row, cell.col))
      throw DataError("evaluate: ground-truth cell (" + std::to_string(cell.row) + ", " +
                      std::to_string(cell.col) + ") was not masked in the imputer input");
    const double v = filled.value(cell.row, cell.col);
    if (!std::isfinite(v))
      throw DataError("evaluate: cell (" + std::to_string(cell.row) + ", " +
                      std::to_string(cell.col) + ") was not filled");
    const double e = v - cell.value;
    sq += e * e;
    abs += std::fabs(e);
  }
  m.n_eval = truth.size();
  m.n_cells = filled.rows() * filled.cols();
  m.rmse = std::sqrt(sq / double(m.n_eval));
  m.mae = abs / double(m.n_eval);
  m.table_rmse = std::sqrt(sq / double(m.n_cells));
  m.table_mae = abs / double(m.n_cells);
  return m;
}

ColumnTTest ttest_filled_vs_original(const NumericTable& original, const NumericTable& filled) {
  if (original.rows() != filled.rows() || original.cols() != filled.cols())
    throw DataError("t-test: original and filled tables differ in shape");
  if (!original.fully_observed()) throw DataError("t-test: original table must be complete");
  ColumnTTest out;
  std::vector<double> a(original.rows());
  std::vector<double> b(original.rows());
  double sum = 0.0;
  for (std::size_t c = 0; c < original.cols(); ++c) {
    for (std::size_t r = 0; r < original.rows(); ++r) {
      a[r] = original.value(r, c);
      b[r] = filled.value(r, c);
      if (!std::isfinite(b[r])) throw DataError("t-test: filled table has unfilled cells");
    }
    const WelchResult w = welch_ttest(a, b);
    out.column_p.push_back(w.p_value);
    out.degenerate.push_back(w.degenerate);
    sum += w.p_value;
  }
  out.mean_p = sum / double(original.cols());
  return out;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::means:
      return "means";
    case Method::knn:
      return "knn";
    case Method::ae:
      return "ae";
    case Method::ce_aann:
      return "ce_aann";
    case Method::ffeam:
      return "ffeam";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "means") return Method::means;
  if (text == "knn") return Method::knn;
  if (text == "ae") return Method::ae;
  if (text == "ce_aann") return Method::ce_aann;
  if (text == "ffeam") return Method::ffeam;
  throw ConfigError("unknown method '" + std::string(text) +
                    "' (expected means, knn, ae, ce_aann or ffeam)");
}

ImputeOutcome impute(const NumericTable& masked, Method method, const MethodSettings& settings,
                     std::uint64_t seed) {
  NumericTable work = masked;
  ScaleInfo scale;
  if (settings.normalize) std::tie(work, scale) = normalize(masked);

  PrefillConfig pf = settings.prefill;
  if (!settings.prefill_seed_fixed) pf.forest.seed = derive_seed(seed, streams::forest);
  RbfConfig rbf = settings.rbf;
  if (!settings.rbf_seed_fixed) rbf.seed = derive_seed(seed, streams::kmeans);
  auto seeded = [seed](TrainConfig tc, bool fixed) {
    if (!fixed) tc.seed = seed;
    return tc;
  };

  ImputeOutcome out;
  switch (method) {
    case Method::means:
      out.filled = impute_means(work);
      break;
    case Method::knn:
      out.filled = impute_knn(work, settings.knn);
      break;
    case Method::ae: {
      auto r = impute_classic_ae(work, seeded(settings.ae, settings.ae_seed_fixed), pf);
      out.filled = std::move(r.filled);
      out.log = std::move(r.log);
      break;
    }
    case Method::ce_aann: {
      auto r = impute_ce_aann(work, seeded(settings.ce_aann, settings.ce_aann_seed_fixed), pf);
      out.filled = std::move(r.filled);
      out.log = std::move(r.log);
      break;
    }
    case Method::ffeam: {
      auto r = train(work, seeded(settings.ffeam, settings.ffeam_seed_fixed), pf, rbf);
      out.filled = std::move(r.filled);
      out.log = std::move(r.log);
      break;
    }
  }
  if (settings.normalize) {
    out.filled = denormalize(out.filled, scale);
    for (std::size_t r = 0; r < masked.rows(); ++r) {
      for (std::size_t c = 0; c < masked.cols(); ++c) {
        if (masked.observed(r, c)) out.filled.set_value(r, c, masked.value(r, c));
      }
    }
  }
  return out;
}

NumericTable load_dataset(const DatasetSource& source) {
  switch (source.kind) {
    case DatasetSource::Kind::builtin:
      return builtin_dataset(source.name);
    case DatasetSource::Kind::csv:
      return load_csv(source.path, source.missing_token);
    case DatasetSource::Kind::synthetic:
      return generate_synthetic(source.synthetic);
  }
  throw ConfigError("unknown dataset source");
}

MethodSettings settings_from_config(const KeyValueConfig& cfg) {
  MethodSettings s;
  s.normalize = cfg.get_bool("normalize", false);

  if (auto v = cfg.get("prefill.method")) s.prefill.method = parse_prefill_method(*v);
  ForestConfig& f = s.prefill.forest;
  f.n_trees = cfg.get_size("prefill.n_trees", f.n_trees);
  f.max_depth = cfg.get_size("prefill.max_depth", f.max_depth);
  f.min_samples_leaf = cfg.get_size("prefill.min_samples_leaf", f.min_samples_leaf);
  f.feature_subsample = cfg.get_double("prefill.feature_subsample", f.feature_subsample);
  f.bootstrap = cfg.get_bool("prefill.bootstrap", f.bootstrap);
  f.threads = cfg.get_size("prefill.threads", f.threads);
  s.prefill_seed_fixed = cfg.has("prefill.seed");
  f.seed = cfg.get_u64("prefill.seed", f.seed);

  if (cfg.has("rbf.k")) s.rbf.k = cfg.get_size("rbf.k", 0);
  s.rbf.kmeans.max_iters = cfg.get_size("rbf.kmeans_max_iters", s.rbf.kmeans.max_iters);
  s.rbf.kmeans.tol = cfg.get_double("rbf.kmeans_tol", s.rbf.kmeans.tol);
  s.rbf_seed_fixed = cfg.has("rbf.seed");
  s.rbf.seed = cfg.get_u64("rbf.seed", s.rbf.seed);

  s.knn.k = cfg.get_size("knn.k", s.knn.k);
  if (s.knn.k == 0) throw ConfigError("knn.k must be at least 1");

  s.ffeam = read_train_config(cfg, "ffeam", s.ffeam_seed_fixed);
  s.ae = read_train_config(cfg, "ae", s.ae_seed_fixed);
  s.ce_aann = read_train_config(cfg, "ce_aann", s.ce_aann_seed_fixed);
  return s;
}

RunConfig RunConfig::from_config(const KeyValueConfig& cfg) {
  RunConfig rc;
  rc.source = cfg;
  rc.settings = settings_from_config(cfg);

  for (const auto& name : cfg.get_list("datasets", {"iris"})) {
    DatasetSource src;
    src.name = name;
    const std::string prefix = "dataset." + name + ".";
    const std::string kind =
        cfg.get_string(prefix + "source", is_builtin_dataset(name) ? "builtin" : "csv");
    if (kind == "builtin") {
      if (!is_builtin_dataset(name)) throw ConfigError("no builtin dataset named '" + name + "'");
      src.kind = DatasetSource::Kind::builtin;
    } else if (kind == "csv") {
      src.kind = DatasetSource::Kind::csv;
      auto path = cfg.get(prefix + "path");
      if (!path) throw ConfigError("dataset '" + name + "' needs " + prefix + "path");
      src.path = *path;
      src.missing_token = cfg.get_string(prefix + "missing_token", "");
    } else if (kind == "synthetic") {
      src.kind = DatasetSource::Kind::synthetic;
      src.synthetic.n_samples = cfg.get_size(prefix + "n_samples", src.synthetic.n_samples);
      src.synthetic.n_valid = cfg.get_size(prefix + "n_valid", src.synthetic.n_valid);
      src.synthetic.n_noise = cfg.get_size(prefix + "n_noise", src.synthetic.n_noise);
      src.synthetic.seed = cfg.get_u64(prefix + "seed", src.synthetic.seed);
      if (src.synthetic.n_valid == 0 || src.synthetic.n_samples == 0)
        throw ConfigError("dataset '" + name + "': n_valid and n_samples must be positive");
    } else {
      throw ConfigError("dataset '" + name + "': unknown source '" + kind + "'");
    }
    rc.datasets.push_back(std::move(src));
  }

  if (cfg.has("rates")) {
    rc.rates.clear();
    for (const auto& r : cfg.get_list("rates", {})) rc.rates.push_back(parse_double(r, "rates"));
  }
  for (double r : rc.rates) {
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("rates must lie in [0, 1)");
  }
  if (cfg.has("seeds")) {
    rc.seeds.clear();
    for (const auto& s : cfg.get_list("seeds", {})) rc.seeds.push_back(parse_u64(s, "seeds"));
  }
  if (cfg.has("methods")) {
    rc.methods.clear();
    for (const auto& m : cfg.get_list("methods", {})) rc.methods.push_back(parse_method(m));
  }
  rc.output_dir = cfg.get_string("output_dir", rc.output_dir.string());
  rc.threads = std::max<std::size_t>(1, cfg.get_size("threads", rc.threads));
  rc.min_observed_per_row = cfg.get_size("inject.min_observed_per_row", rc.min_observed_per_row);
  rc.min_observed_per_column =
      cfg.get_size("inject.min_observed_per_column", rc.min_observed_per_column);

  rc.sweep_total_hidden = cfg.get_size("sweep.total_hidden", rc.sweep_total_hidden);
  for (const auto& s : cfg.get_list("sweep.splits", {})) rc.sweep_splits.push_back(parse_split(s));
  if (rc.sweep_splits.empty()) rc.sweep_splits = default_splits(rc.sweep_total_hidden);

  if (rc.datasets.empty() || rc.rates.empty() || rc.seeds.empty() || rc.methods.empty())
    throw ConfigError("datasets, rates, seeds and methods must all be non-empty");
  if (auto unknown = cfg.unused_keys(); !unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("unknown config keys: " + list);
  }
  return rc;
}

void RunConfig::override_seed(std::uint64_t seed) {
  seeds = {seed};
  source.set("seeds", std::to_string(seed));
}

std::size_t EvalReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const EvalRecord& r) { return !r.ok; }));
}

EvalRecord run_single(const std::string& dataset_name, const NumericTable& complete, Method method,
                      double rate, std::uint64_t seed, const RunConfig& cfg) {
  EvalRecord rec;
  rec.dataset = dataset_name;
  rec.method = to_string(method);
  rec.rate = rate;
  rec.seed = seed;
  rec.config_digest = fnv1a_hex(rec.method + "\n" + cfg.source.to_string());
  const auto start = std::chrono::steady_clock::now();
  try {
    InjectionSpec spec;
    spec.rate = rate;
    spec.seed = seed;
    spec.min_observed_per_row = cfg.min_observed_per_row;
    spec.min_observed_per_column = cfg.min_observed_per_column;
    const auto [masked, truth] = inject_missing(complete, spec);
    const ImputeOutcome outcome = impute(masked, method, cfg.settings, seed);
    rec.metrics = evaluate(outcome.filled, truth);
    const ColumnTTest tt = ttest_filled_vs_original(complete, outcome.filled);
    rec.p_value = tt.mean_p;
    rec.column_p = tt.column_p;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

EvalReport run_benchmark(const RunConfig& cfg) {
  struct Loaded {
    std::optional<NumericTable> table;
    std::string error;
  };
  std::vector<Loaded> data(cfg.datasets.size());
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    try {
      data[d].table = load_dataset(cfg.datasets[d]);
      if (!data[d].table->fully_observed())
        throw DataError("benchmark datasets must be complete before injection");
    } catch (const std::exception& e) {
      data[d].table.reset();
      data[d].error = e.what();
    }
  }

  struct Task {
    std::size_t dataset;
    Method method;
    double rate;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d)
    for (Method m : cfg.methods)
      for (double r : cfg.rates)
        for (std::uint64_t s : cfg.seeds) tasks.push_back({d, m, r, s});

  EvalReport report;
  report.records.resize(tasks.size());
  auto run = [&](std::size_t i) {
    const Task& t = tasks[i];
    const auto& name = cfg.datasets[t.dataset].name;
    if (!data[t.dataset].table) {
      EvalRecord rec;
      rec.dataset = name;
      rec.method = to_string(t.method);
      rec.rate = t.rate;
      rec.seed = t.seed;
      rec.config_digest = fnv1a_hex(rec.method + "\n" + cfg.source.to_string());
      rec.ok = false;
      rec.error = data[t.dataset].error;
      report.records[i] = std::move(rec);
      return;
    }
    report.records[i] = run_single(name, *data[t.dataset].table, t.method, t.rate, t.seed, cfg);
  };

  const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, std::max<std::size_t>(tasks.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) run(i);
      });
    }
  }
  return report;
}

std::string format_report_csv(const EvalReport& report) {
  std::string out =
      "dataset,method,rate,seed,rmse,mae,table_rmse,table_mae,n_eval,p_value,wall_time_s,"
      "config_digest,status,error\n";
  for (const auto& r : report.records) {
    std::string error = r.error;
    std::replace(error.begin(), error.end(), '"', '\'');
    out += r.dataset + ',' + r.method + ',' + format_double(r.rate) + ',' + std::to_string(r.seed) +
           ',';
    if (r.ok) {
      out += format_double(r.metrics.rmse) + ',' + format_double(r.metrics.mae) + ',' +
             format_double(r.metrics.table_rmse) + ',' + format_double(r.metrics.table_mae) + ',' +
             std::to_string(r.metrics.n_eval) + ',' + (r.p_value ? format_double(*r.p_value) : "");
    } else {
      out += ",,,,,";
    }
    out += ',' + format_double(r.wall_time_s) + ',' + r.config_digest + ',' +
           (r.ok ? "ok" : "failed") + ",\"" + error + "\"\n";
  }
  return out;
}

void write_report(const EvalReport& report, const RunConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.csv", format_report_csv(report));
  json j;
  j["records"] = records_json(report.records);
  j["config"] = config_json(cfg);
  j["decisions"] = decisions_json(cfg);
  write_text(dir / "report.json", j.dump(2) + "\n");
}

std::string format_summary(const EvalReport& report) {
  struct Group {
    std::vector<double> rmse, mae, table_rmse, table_mae, p;
    std::size_t failed = 0;
  };
  std::vector<std::pair<std::string, double>> panels;  // (dataset, rate) in first-seen order
  std::map<std::pair<std::string, double>, std::vector<std::string>> methods;
  std::map<std::tuple<std::string, double, std::string>, Group> groups;
  for (const auto& r : report.records) {
    const auto panel = std::pair(r.dataset, r.rate);
    if (std::find(panels.begin(), panels.end(), panel) == panels.end()) panels.push_back(panel);
    auto& ms = methods[panel];
    if (std::find(ms.begin(), ms.end(), r.method) == ms.end()) ms.push_back(r.method);
    Group& g = groups[{r.dataset, r.rate, r.method}];
    if (!r.ok) {
      ++g.failed;
      continue;
    }
    g.rmse.push_back(r.metrics.rmse);
    g.mae.push_back(r.metrics.mae);
    g.table_rmse.push_back(r.metrics.table_rmse);
    g.table_mae.push_back(r.metrics.table_mae);
    if (r.p_value) g.p.push_back(*r.p_value);
  }

  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (const auto& panel : panels) {
    out << panel.first << " @ " << panel.second * 100.0 << "% missing (median over seeds)\n";
    out << "  " << std::left << std::setw(10) << "method" << std::right << std::setw(10) << "rmse"
        << std::setw(10) << "mae" << std::setw(12) << "table_rmse" << std::setw(11) << "table_mae"
        << std::setw(9) << "p" << std::setw(8) << "failed" << "\n";
    for (const auto& m : methods[panel]) {
      const Group& g = groups[{panel.first, panel.second, m}];
      out << "  " << std::left << std::setw(10) << m << std::right << std::setw(10)
          << median(g.rmse) << std::setw(10) << median(g.mae) << std::setw(12)
          << median(g.table_rmse) << std::setw(11) << median(g.table_mae) << std::setw(9)
          << median(g.p) << std::setw(8) << g.failed << "\n";
    }
  }
  return out.str();
}

std::size_t SweepReport::failures() const {
  std::size_t n = 0;
  for (const auto& row : rows) {
    for (const auto& r : row.runs) n += r.ok ? 0 : 1;
  }
  return n;
}

std::size_t SweepReport::best_row() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].median_rmse < rows[best].median_rmse) best = i;
  }
  return best;
}

std::vector<std::pair<std::size_t, std::size_t>> default_splits(std::size_t total_hidden) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (total_hidden < 10) {
    for (std::size_t m1 = 1; m1 + 2 <= total_hidden; ++m1) out.emplace_back(m1, total_hidden - m1);
    return out;
  }
  for (std::size_t m1 = 5; m1 + 5 <= total_hidden; ++m1) out.emplace_back(m1, total_hidden - m1);
  return out;
}

SweepReport sweep_split(const std::string& dataset_name, const NumericTable& complete, double rate,
                        std::size_t total_hidden,
                        const std::vector<std::pair<std::size_t, std::size_t>>& splits,
                        const RunConfig& cfg) {
  if (splits.empty()) throw ConfigError("sweep needs at least one split");
  for (const auto& [m1, m2] : splits) {
    if (m1 + m2 != total_hidden) {
      throw ConfigError("split " + std::to_string(m1) + ":" + std::to_string(m2) +
                        " does not sum to the hidden total " + std::to_string(total_hidden));
    }
    if (m1 == 0 || m2 < 2) throw ConfigError("each split needs m1 >= 1 and m2 >= 2");
  }
  SweepReport report;
  report.dataset = dataset_name;
  report.rate = rate;
  report.total_hidden = total_hidden;
  for (const auto& [m1, m2] : splits) {
    RunConfig split_cfg = cfg;
    split_cfg.settings.ffeam.m1 = m1;
    split_cfg.settings.ffeam.m2 = m2;
    split_cfg.settings.ffeam.hidden_total = total_hidden;
    split_cfg.source.set("ffeam.m1", std::to_string(m1));
    split_cfg.source.set("ffeam.m2", std::to_string(m2));
    SweepRow row;
    row.m1 = m1;
    row.m2 = m2;
    std::vector<double> rmse, mae, trmse, tmae;
    for (std::uint64_t seed : cfg.seeds) {
      EvalRecord rec = run_single(dataset_name, complete, Method::ffeam, rate, seed, split_cfg);
      if (rec.ok) {
        rmse.push_back(rec.metrics.rmse);
        mae.push_back(rec.metrics.mae);
        trmse.push_back(rec.metrics.table_rmse);
        tmae.push_back(rec.metrics.table_mae);
      }
      row.runs.push_back(std::move(rec));
    }
    row.median_rmse = median(rmse);
    row.median_mae = median(mae);
    row.median_table_rmse = median(trmse);
    row.median_table_mae = median(tmae);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_sweep_report(const SweepReport& report, const RunConfig& cfg,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::string csv = "dataset,rate,m1,m2,median_rmse,median_mae,median_table_rmse,median_table_mae\n";
  for (const auto& row : report.rows) {
    csv += report.dataset + ',' + format_double(report.rate) + ',' + std::to_string(row.m1) + ',' +
           std::to_string(row.m2) + ',' + format_double(row.median_rmse) + ',' +
           format_double(row.median_mae) + ',' + format_double(row.median_table_rmse) + ',' +
           format_double(row.median_table_mae) + '\n';
  }
  write_text(dir / "sweep.csv", csv);

  json j;
  j["dataset"] = report.dataset;
  j["rate"] = report.rate;
  j["total_hidden"] = report.total_hidden;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["m1"] = row.m1;
    r["m2"] = row.m2;
    r["median_rmse"] = row.median_rmse;
    r["median_mae"] = row.median_mae;
    r["median_table_rmse"] = row.median_table_rmse;
    r["median_table_mae"] = row.median_table_mae;
    r["records"] = records_json(row.runs);
    rows.push_back(std::move(r));
  }
  j["splits"] = std::move(rows);
  j["config"] = config_json(cfg);
  j["decisions"] = decisions_json(cfg);
  write_text(dir / "sweep.json", j.dump(2) + "\n");
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace ffeam
