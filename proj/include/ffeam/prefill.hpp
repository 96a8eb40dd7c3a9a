#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ffeam/core.hpp"
#include "ffeam/dataset.hpp"

namespace ffeam {

struct ForestConfig {
  std::size_t n_trees = 50;
  std::size_t max_depth = 10;
  std::size_t min_samples_leaf = 2;
  // Fraction of predictors tried at each split, rounded up, at least one.
  double feature_subsample = 1.0 / 3.0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  // Worker threads for tree fitting; results do not depend on this.
  std::size_t threads = 1;
};

enum class PrefillMethod { forest, mean };

struct PrefillConfig {
  PrefillMethod method = PrefillMethod::forest;
  ForestConfig forest;
};

// CART regression tree stored as a flat node array; node 0 is the root.
class RegressionTree {
 public:
  struct Node {
    // Leaves have left == right == kLeaf.
    std::size_t split_column = 0;
    double split_threshold = 0.0;
    std::size_t left = kLeaf;
    std::size_t right = kLeaf;
    double prediction = 0.0;
    std::size_t samples = 0;

    bool is_leaf() const noexcept { return left == kLeaf; }
  };
  static constexpr std::size_t kLeaf = static_cast<std::size_t>(-1);

  RegressionTree() = default;
  explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> x) const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const noexcept;
  std::size_t depth() const;

 private:
  std::vector<Node> nodes_;
};

// Greedy CART fit minimizing weighted child variance. Samples go left when
// x[split_column] <= split_threshold.
RegressionTree fit_tree(const Matrix& X, std::span<const double> y, const ForestConfig& cfg,
                        std::mt19937_64& rng);

class RegressionForest {
 public:
  // Tree t is fitted from its own stream derive_seed(cfg.seed, t).
  static RegressionForest fit(const Matrix& X, std::span<const double> y, const ForestConfig& cfg);

  // Arithmetic mean of the trees' predictions.
  double predict(std::span<const double> x) const;
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<RegressionTree> trees_;
};

// Column-mean fill. The mask is left unchanged.
NumericTable mean_prefill(const NumericTable& table);

// Columns in ascending missing count, ties by index; fully observed columns
// are omitted.
std::vector<std::size_t> prefill_column_order(const NumericTable& table);

// One pass of iterative random-forest imputation in prefill_column_order.
NumericTable forest_prefill(const NumericTable& table, const ForestConfig& cfg);

NumericTable prefill(const NumericTable& table, const PrefillConfig& cfg);

}  // namespace ffeam
