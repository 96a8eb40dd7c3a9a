#include "ffeam/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ffeam {

NumericTable impute_means(const NumericTable& table) { return mean_prefill(table); }

NumericTable impute_knn(const NumericTable& table, const KnnConfig& cfg) {
  if (cfg.k == 0) throw ConfigError("knn.k must be at least 1");
  table.validate();
  const std::size_t n = table.rows();
  const std::size_t s = table.cols();

  std::vector<std::size_t> complete;
  for (std::size_t r = 0; r < n; ++r) {
    if (table.complete_row(r)) complete.push_back(r);
  }
  NumericTable out = table;
  if (complete.size() == n) return out;
  if (complete.size() < cfg.k) {
    throw DataError("KNN imputation needs at least k = " + std::to_string(cfg.k) +
                    " complete rows but the table has " + std::to_string(complete.size()) +
                    "; use a smaller k or another method");
  }

  std::vector<std::pair<double, std::size_t>> dist(complete.size());
  for (std::size_t r = 0; r < n; ++r) {
    if (table.complete_row(r)) continue;
    for (std::size_t i = 0; i < complete.size(); ++i) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < s; ++c) {
        if (!table.observed(r, c)) continue;
        const double diff = table.value(r, c) - table.value(complete[i], c);
        d2 += diff * diff;
      }
      dist[i] = {std::sqrt(d2), complete[i]};
    }
    std::partial_sort(dist.begin(), dist.begin() + std::ptrdiff_t(cfg.k), dist.end());

    double weight_sum = 0.0;
    std::vector<double> fill(s, 0.0);
    for (std::size_t i = 0; i < cfg.k; ++i) {
      const double w = 1.0 / std::max(dist[i].first, cfg.distance_floor);
      weight_sum += w;
      for (std::size_t c = 0; c < s; ++c) fill[c] += w * table.value(dist[i].second, c);
    }
    for (std::size_t c = 0; c < s; ++c) {
      if (!table.observed(r, c)) out.set_value(r, c, fill[c] / weight_sum);
    }
  }
  return out;
}

TrainResult impute_classic_ae(const NumericTable& table, const TrainConfig& cfg,
                              const PrefillConfig& prefill_cfg) {
  return train_network(table, Architecture::classic_ae(cfg.m1 + cfg.m2), cfg, prefill_cfg, {});
}

TrainResult impute_ce_aann(const NumericTable& table, const TrainConfig& cfg,
                           const PrefillConfig& prefill_cfg) {
  if (cfg.m2 == 0) throw ConfigError("CE-AANN needs m2 >= 1 ordinary units");
  return train_network(table, Architecture::ce_aann(cfg.m1, cfg.m2), cfg, prefill_cfg, {});
}

}  // namespace ffeam
