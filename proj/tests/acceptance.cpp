// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "ffeam/bench.hpp"
#include "ffeam/stats.hpp"
#include "test_util.hpp"

using namespace ffeam;
using namespace ffeam::testing;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// Median metric per (dataset, rate, method).
struct Medians {
  std::map<std::tuple<std::string, double, std::string>, std::vector<Metrics>> runs;
  std::size_t failed = 0;

  explicit Medians(const EvalReport& rep) {
    for (const auto& r : rep.records) {
      if (!r.ok) {
        ++failed;
        std::printf("  record failed: %s %s %.2f %llu: %s\n", r.dataset.c_str(), r.method.c_str(),
                    r.rate, static_cast<unsigned long long>(r.seed), r.error.c_str());
        continue;
      }
      runs[{r.dataset, r.rate, r.method}].push_back(r.metrics);
    }
  }
  double get(const std::string& d, double rate, const std::string& m,
             double Metrics::*field = &Metrics::rmse) const {
    auto it = runs.find({d, rate, m});
    if (it == runs.end()) return std::nan("");
    std::vector<double> v;
    for (const auto& x : it->second) v.push_back(x.*field);
    return median(v);
  }
};

RunConfig grid(const std::string& extra) {
  return RunConfig::from_config(KeyValueConfig::parse("seeds = 1, 2, 3, 4, 5\n" + extra));
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const auto norm = inst % 2 ? RbfNorm::as_written : RbfNorm::squared;
    const auto arch = Architecture::ffeam(2, 2, norm);
    const auto x = random_matrix(5, 3, rng);
    const auto rep = finite_difference_check(arch, random_params(arch, 3, rng), x, 1e-5);
    checked += rep.checked;
    if (rep.max_rel > worst) {
      worst = rep.max_rel;
      where = rep.worst;
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst < 1e-4 && secs < 30.0,
         fmt("100 instances, %zu partials, max relative error %.2e (%s), %.2fs", checked, worst,
             where.c_str(), secs));
}

void criterion2() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2, 2);
  bool ok = true;
  for (const auto& arch : {Architecture::ffeam(4, 4), Architecture::ce_aann(4, 4)}) {
    double max_dy = 0.0, max_dr = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const std::size_t n = 2 + rng() % 4, s = 2 + rng() % 4;
      auto x = random_matrix(n, s, rng);
      const auto p = random_params(arch, s, rng);
      const auto before = forward(arch, p, x);
      const std::size_t i = rng() % n, j = rng() % s;
      x(i, j) += u(rng);
      const auto after = forward(arch, p, x);
      max_dy = std::max(max_dy, std::fabs(after.y(i, j) - before.y(i, j)));
      max_dr = std::max(max_dr, std::fabs(after.r(i, j) - before.r(i, j)));
    }
    const bool pass = max_dy == 0.0 && max_dr > 0.0;
    ok &= pass;
    std::printf("  %s: max |dy_ij| = %.3g, max |dr_ij| = %.3g\n",
                arch.reference == ReferencePathway::rbf ? "ffeam" : "ce_aann", max_dy, max_dr);
  }
  report(2, ok, "1000 single-input perturbations per architecture leave y_ij unchanged");
}

void criteria3to4(const Medians& m, double secs) {
  const double rmse = m.get("iris", 0.2, "ffeam", &Metrics::table_rmse);
  const double mae = m.get("iris", 0.2, "ffeam", &Metrics::table_mae);
  const double rmse_masked = m.get("iris", 0.2, "ffeam");
  const double mae_masked = m.get("iris", 0.2, "ffeam", &Metrics::mae);
  report(3, rmse >= 0.10 && rmse <= 0.25 && mae >= 0.03 && mae <= 0.09 && secs < 300 && !m.failed,
         fmt("iris 20%% ffeam median rmse %.4f, mae %.4f over all cells (masked cells only: rmse "
             "%.4f, mae %.4f), %.1fs",
             rmse, mae, rmse_masked, mae_masked, secs));

  const auto r = [&](double rate, const char* method) { return m.get("iris", rate, method); };
  std::printf("  iris 20%% median masked rmse: means %.4f knn %.4f ae %.4f ce_aann %.4f ffeam %.4f\n",
              r(0.2, "means"), r(0.2, "knn"), r(0.2, "ae"), r(0.2, "ce_aann"), r(0.2, "ffeam"));
  std::printf("  iris 50%% median masked rmse: means %.4f ae %.4f ffeam %.4f\n", r(0.5, "means"),
              r(0.5, "ae"), r(0.5, "ffeam"));
  const bool at20 = r(0.2, "ffeam") < r(0.2, "ce_aann") && r(0.2, "ffeam") < r(0.2, "ae") &&
                    r(0.2, "ffeam") < r(0.2, "means") && r(0.2, "knn") < r(0.2, "means");
  const bool at50 = r(0.5, "ffeam") < r(0.5, "means") && r(0.5, "ffeam") < r(0.5, "ae");
  report(4, at20 && at50,
         fmt("iris 20%%: ffeam < ce_aann, ae, means and knn < means: %s; 50%%: ffeam < means, ae: "
             "%s (knn vs ffeam at 20%%: %.4f vs %.4f)",
             at20 ? "yes" : "no", at50 ? "yes" : "no", r(0.2, "knn"), r(0.2, "ffeam")));
}

void criterion5() {
  const auto rep = run_benchmark(grid("datasets = seeds\nrates = 0.2\nmethods = means, ae, ffeam\n"));
  const Medians m(rep);
  const double f = m.get("seeds", 0.2, "ffeam"), me = m.get("seeds", 0.2, "means"),
               ae = m.get("seeds", 0.2, "ae");
  report(5, f < me && f < ae && !m.failed,
         fmt("seeds 20%% median rmse ffeam %.4f, means %.4f, ae %.4f (over all cells: %.4f, %.4f, "
             "%.4f)",
             f, me, ae, m.get("seeds", 0.2, "ffeam", &Metrics::table_rmse),
             m.get("seeds", 0.2, "means", &Metrics::table_rmse),
             m.get("seeds", 0.2, "ae", &Metrics::table_rmse)));
}

void criterion6() {
  const auto cfg = grid("datasets = iris\nrates = 0.2\nmethods = ffeam\n");
  const auto splits = default_splits(20);
  const auto rep = sweep_split("iris", builtin_dataset("iris"), 0.2, 20, splits, cfg);
  std::string row;
  for (const auto& r : rep.rows) row += fmt(" %zu:%zu=%.4f", r.m1, r.m2, r.median_rmse);
  std::printf("  sweep median rmse:%s\n", row.c_str());
  const std::size_t best = rep.best_row();
  report(6, best != 0 && best + 1 != rep.rows.size() && !rep.failures(),
         fmt("best split m1=%zu m2=%zu (median rmse %.4f)", rep.rows[best].m1, rep.rows[best].m2,
             rep.rows[best].median_rmse));
}

void criterion7() {
  // 5 injected cells with errors 0.5, -1, 2, 0, -0.25.
  Matrix v(5, 2, 1.0);
  const double truth_vals[] = {1.0, 2.0, -3.0, 4.5, 0.25};
  const double errs[] = {0.5, -1.0, 2.0, 0.0, -0.25};
  GroundTruth truth;
  for (std::size_t i = 0; i < 5; ++i) {
    v(i, 1) = truth_vals[i] + errs[i];
    truth.push_back({i, 1, truth_vals[i]});
  }
  auto filled = complete_table(v);
  for (std::size_t i = 0; i < 5; ++i) filled.set_observed(i, 1, false);
  const auto m = evaluate(filled, truth);
  const double rmse_ref = std::sqrt(5.3125 / 5.0), mae_ref = 3.75 / 5.0;
  const bool metrics_ok = std::fabs(m.rmse - rmse_ref) < 1e-12 && std::fabs(m.mae - mae_ref) < 1e-12;

  const std::vector<double> a{5.1, 4.9, 6.2, 5.8, 6.0, 5.5, 5.3, 6.1, 5.7, 5.4};
  const std::vector<double> b{4.1, 4.5, 4.8, 5.9, 4.2, 4.7, 5.0, 3.9, 4.4, 4.6};
  const double p_ref = 0.00039227246813679295927;  // 50-digit evaluation
  const auto w = welch_ttest(a, b);
  const bool welch_ok = std::fabs(w.p_value - p_ref) < 1e-6;
  report(7, metrics_ok && welch_ok,
         fmt("rmse %.15f vs %.15f, mae %.15f vs %.15f; welch p %.12e vs %.12e", m.rmse, rmse_ref,
             m.mae, mae_ref, w.p_value, p_ref));
}

void criterion8() {
  const auto cfg = RunConfig::from_config(KeyValueConfig::parse(
      "datasets = iris\nrates = 0.2, 0.4\nseeds = 1, 2\nmethods = means, knn, ae, ce_aann, ffeam\n"
      "ffeam.epochs = 200\nae.epochs = 200\nce_aann.epochs = 200\n"));
  const auto a = run_benchmark(cfg);
  auto threaded = cfg;
  threaded.threads = 2;
  const auto b = run_benchmark(threaded);
  bool same = a.records.size() == b.records.size() && a.failures() == 0;
  for (std::size_t i = 0; same && i < a.records.size(); ++i) {
    same &= a.records[i].metrics.rmse == b.records[i].metrics.rmse &&
            a.records[i].metrics.mae == b.records[i].metrics.mae &&
            a.records[i].p_value == b.records[i].p_value;
  }
  report(8, same, fmt("%zu records reproduced bitwise across two runs", a.records.size()));
}

void criterion9() {
  const auto iris = builtin_dataset("iris");
  std::vector<double> forest, mean;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [masked, truth] = inject_missing(iris, {0.2, seed, 1, 2});
    ForestConfig fc;
    fc.seed = derive_seed(seed, streams::forest);
    forest.push_back(evaluate(forest_prefill(masked, fc), truth).rmse);
    mean.push_back(evaluate(mean_prefill(masked), truth).rmse);
  }
  report(9, median(forest) < median(mean),
         fmt("iris 20%% median prefill rmse forest %.4f vs mean %.4f", median(forest),
             median(mean)));
}

void criterion10() {
  const auto rep = run_benchmark(grid(
      "datasets = ds3_7\ndataset.ds3_7.source = synthetic\ndataset.ds3_7.n_samples = 1000\n"
      "dataset.ds3_7.n_valid = 3\ndataset.ds3_7.n_noise = 7\ndataset.ds3_7.seed = 7\n"
      "rates = 0.2\nmethods = ae, ffeam\n"));
  const Medians m(rep);
  const double f = m.get("ds3_7", 0.2, "ffeam"), ae = m.get("ds3_7", 0.2, "ae");
  report(10, f <= ae && !m.failed, fmt("synthetic 3 valid + 7 noise, 20%%: median rmse ffeam %.4f vs ae %.4f", f, ae));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion1();
  criterion2();
  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = run_benchmark(grid("datasets = iris\nrates = 0.2, 0.5\n"));
    const double secs = seconds_since(t0);
    criteria3to4(Medians(rep), secs);
  }
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("%d criteria failed; total %.1fs\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
