#include "ffeam/prefill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace ffeam {

namespace {

struct SplitCandidate {
  bool found = false;
  std::size_t column = 0;
  double threshold = 0.0;
  double score = 0.0;  // S_L^2/n_L + S_R^2/n_R, larger is better
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const double> y, const ForestConfig& cfg,
              std::mt19937_64& rng)
      : X_(X), y_(y), cfg_(cfg), rng_(rng) {
    const std::size_t p = X.cols();
    mtry_ = static_cast<std::size_t>(std::ceil(cfg.feature_subsample * double(p) - 1e-12));
    mtry_ = std::clamp<std::size_t>(mtry_, 1, std::max<std::size_t>(p, 1));
  }

  std::vector<RegressionTree::Node> build() {
    std::vector<std::size_t> idx(y_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    nodes_.clear();
    grow(idx, 0);
    return std::move(nodes_);
  }

 private:
  std::size_t grow(std::vector<std::size_t>& idx, std::size_t depth) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    double sum = 0.0;
    double lo = y_[idx.front()];
    double hi = lo;
    for (std::size_t i : idx) {
      sum += y_[i];
      lo = std::min(lo, y_[i]);
      hi = std::max(hi, y_[i]);
    }
    nodes_[id].prediction = sum / double(idx.size());
    nodes_[id].samples = idx.size();

    const bool stop = depth >= cfg_.max_depth || idx.size() < 2 * cfg_.min_samples_leaf || lo == hi;
    if (stop) return id;

    const SplitCandidate best = find_split(idx, sum);
    if (!best.found) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : idx) {
      (X_(i, best.column) <= best.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    nodes_[id].split_column = best.column;
    nodes_[id].split_threshold = best.threshold;
    const std::size_t l = grow(left, depth + 1);
    const std::size_t r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  SplitCandidate find_split(const std::vector<std::size_t>& idx, double total) {
    const std::size_t p = X_.cols();
    std::vector<std::size_t> features(p);
    std::iota(features.begin(), features.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < p; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, p - 1);
      std::swap(features[i], features[pick(rng_)]);
    }

    const std::size_t n = idx.size();
    const double parent_score = total * total / double(n);
    SplitCandidate best;
    best.score = parent_score;
    std::vector<std::size_t> order(idx);
    std::size_t evaluated = 0;
    for (std::size_t f : features) {
      if (evaluated == mtry_) break;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return X_(a, f) < X_(b, f) || (X_(a, f) == X_(b, f) && a < b);
      });
      if (X_(order.front(), f) == X_(order.back(), f)) continue;  // constant here
      ++evaluated;
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += y_[order[i]];
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < cfg_.min_samples_leaf) continue;
        if (n_right < cfg_.min_samples_leaf) break;
        const double a = X_(order[i], f);
        const double b = X_(order[i + 1], f);
        if (!(a < b)) continue;
        const double right_sum = total - left_sum;
        const double score =
            left_sum * left_sum / double(n_left) + right_sum * right_sum / double(n_right);
        if (score > best.score * (1.0 + 1e-14) + 1e-300) {
          best.found = true;
          best.score = score;
          best.column = f;
          const double mid = 0.5 * (a + b);
          best.threshold = (mid < b) ? mid : a;
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  std::span<const double> y_;
  const ForestConfig& cfg_;
  std::mt19937_64& rng_;
  std::size_t mtry_ = 1;
  std::vector<RegressionTree::Node> nodes_;
};

void validate_forest_config(const ForestConfig& cfg) {
  if (cfg.n_trees == 0) throw ConfigError("prefill.n_trees must be positive");
  if (cfg.max_depth == 0) throw ConfigError("prefill.max_depth must be positive");
  if (cfg.min_samples_leaf == 0) throw ConfigError("prefill.min_samples_leaf must be positive");
  if (!(cfg.feature_subsample > 0.0 && cfg.feature_subsample <= 1.0))
    throw ConfigError("prefill.feature_subsample must be in (0, 1]");
}

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t id = 0;
  while (!nodes_[id].is_leaf()) {
    const Node& node = nodes_[id];
    id = x[node.split_column] <= node.split_threshold ? node.left : node.right;
  }
  return nodes_[id].prediction;
}

std::size_t RegressionTree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::size_t RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> depth_of(nodes_.size(), 0);
  std::size_t deepest = 0;
  // Children are always appended after their parent.
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    deepest = std::max(deepest, depth_of[id]);
    if (!nodes_[id].is_leaf()) {
      depth_of[nodes_[id].left] = depth_of[id] + 1;
      depth_of[nodes_[id].right] = depth_of[id] + 1;
    }
  }
  return deepest;
}

RegressionTree fit_tree(const Matrix& X, std::span<const double> y, const ForestConfig& cfg,
                        std::mt19937_64& rng) {
  if (X.rows() != y.size()) throw DataError("fit_tree: predictor rows do not match targets");
  if (y.empty()) throw DataError("fit_tree: no training samples");
  TreeBuilder builder(X, y, cfg, rng);
  return RegressionTree(builder.build());
}

RegressionForest RegressionForest::fit(const Matrix& X, std::span<const double> y,
                                       const ForestConfig& cfg) {
  validate_forest_config(cfg);
  RegressionForest forest;
  forest.trees_.resize(cfg.n_trees);
  const std::size_t n = y.size();

  auto fit_one = [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(cfg.seed, t));
    if (!cfg.bootstrap) {
      forest.trees_[t] = fit_tree(X, y, cfg, rng);
      return;
    }
    Matrix Xb(n, X.cols());
    std::vector<double> yb(n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t src = pick(rng);
      std::copy(X.row(src).begin(), X.row(src).end(), Xb.row(i).begin());
      yb[i] = y[src];
    }
    forest.trees_[t] = fit_tree(Xb, yb, cfg, rng);
  };

  const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, cfg.n_trees);
  if (workers == 1) {
    for (std::size_t t = 0; t < cfg.n_trees; ++t) fit_one(t);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < cfg.n_trees; t += workers) fit_one(t);
      });
    }
  }
  return forest;
}

double RegressionForest::predict(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict(x);
  return sum / double(trees_.size());
}

NumericTable mean_prefill(const NumericTable& table) {
  NumericTable out = table;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (table.observed(r, c)) {
        sum += table.value(r, c);
        ++count;
      }
    }
    if (count == table.rows()) continue;
    if (count == 0)
      throw DataError("column \"" + table.column_names()[c] + "\" has no observed values");
    const double mean = sum / double(count);
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (!table.observed(r, c)) out.set_value(r, c, mean);
    }
  }
  return out;
}

std::vector<std::size_t> prefill_column_order(const NumericTable& table) {
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    if (table.column_missing_count(c) > 0) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.column_missing_count(a) < table.column_missing_count(b);
  });
  return order;
}

NumericTable forest_prefill(const NumericTable& table, const ForestConfig& cfg) {
  table.validate();
  validate_forest_config(cfg);
  NumericTable work = mean_prefill(table);
  const std::size_t n = table.rows();
  const std::size_t s = table.cols();

  for (std::size_t target : prefill_column_order(table)) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> fill_rows;
    for (std::size_t r = 0; r < n; ++r) {
      (table.observed(r, target) ? train_rows : fill_rows).push_back(r);
    }
    auto predictors = [&](std::size_t r, std::span<double> dst) {
      std::size_t k = 0;
      for (std::size_t c = 0; c < s; ++c) {
        if (c != target) dst[k++] = work.value(r, c);
      }
    };
    Matrix X(train_rows.size(), s - 1);
    std::vector<double> y(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      predictors(train_rows[i], X.row(i));
      y[i] = work.value(train_rows[i], target);
    }
    ForestConfig column_cfg = cfg;
    column_cfg.seed = derive_seed(cfg.seed, target);
    const RegressionForest forest = RegressionForest::fit(X, y, column_cfg);

    std::vector<double> x(s - 1);
    for (std::size_t r : fill_rows) {
      predictors(r, x);
      work.set_value(r, target, forest.predict(x));
    }
  }
  return work;
}

NumericTable prefill(const NumericTable& table, const PrefillConfig& cfg) {
  switch (cfg.method) {
    case PrefillMethod::mean:
      return mean_prefill(table);
    case PrefillMethod::forest:
      return forest_prefill(table, cfg.forest);
  }
  throw ConfigError("unknown prefill method");
}

}  // namespace ffeam
