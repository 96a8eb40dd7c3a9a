#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ffeam/baselines.hpp"
#include "ffeam/bench.hpp"
#include "test_util.hpp"

using namespace ffeam;
using namespace ffeam::testing;

namespace {

// Independent brute-force weighted KNN over complete donor rows.
double knn_oracle(const NumericTable& t, std::size_t row, std::size_t col, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (!t.complete_row(r)) continue;
    double s = 0.0;
    for (std::size_t c = 0; c < t.cols(); ++c)
      if (t.observed(row, c)) s += (t.value(row, c) - t.value(r, c)) * (t.value(row, c) - t.value(r, c));
    d.emplace_back(std::sqrt(s), r);
  }
  std::sort(d.begin(), d.end());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = 1.0 / std::max(d[i].first, 1e-8);
    num += w * t.value(d[i].second, col);
    den += w;
  }
  return num / den;
}

}  // namespace

TEST_CASE("KNN matches a brute-force oracle on a 6-row table") {
  const auto t = parse_csv(
      "a,b,c\n"
      "1.0,2.0,3.0\n"
      "2.0,,1.0\n"
      "0.5,1.5,2.5\n"
      "3.0,4.0,\n"
      "1.2,2.2,3.1\n"
      "2.5,3.5,0.5\n");
  const auto f = impute_knn(t, {2, 1e-8});
  CHECK(f.value(1, 1) == doctest::Approx(knn_oracle(t, 1, 1, 2)).epsilon(1e-14));
  CHECK(f.value(3, 2) == doctest::Approx(knn_oracle(t, 3, 2, 2)).epsilon(1e-14));
  // Row 1 (2, ?, 1): distances over (a, c) to rows 0, 2, 4, 5 are sqrt(5), sqrt(4.5),
  // sqrt(5.05), sqrt(0.5); nearest two are rows 5 and 2.
  const double w5 = 1 / std::sqrt(0.5), w2 = 1 / std::sqrt(4.5);
  CHECK(f.value(1, 1) == doctest::Approx((w5 * 3.5 + w2 * 1.5) / (w5 + w2)).epsilon(1e-14));
  CHECK(f.mask() == t.mask());
}

TEST_CASE("KNN fills are convex combinations of donor values") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto full = complete_table(random_matrix(40, 4, rng));
    auto [masked, truth] = inject_missing(full, {0.1, std::uint64_t(trial), 1, 2});
    const auto f = impute_knn(masked, {5, 1e-8});
    for (const auto& cell : truth) {
      double lo = 1e300, hi = -1e300;
      for (std::size_t r = 0; r < 40; ++r)
        if (masked.complete_row(r)) {
          lo = std::min(lo, masked.value(r, cell.col));
          hi = std::max(hi, masked.value(r, cell.col));
        }
      CHECK(f.value(cell.row, cell.col) >= lo - 1e-12);
      CHECK(f.value(cell.row, cell.col) <= hi + 1e-12);
      CHECK(f.value(cell.row, cell.col) ==
            doctest::Approx(knn_oracle(masked, cell.row, cell.col, 5)).epsilon(1e-12));
    }
  }
}

TEST_CASE("KNN duplicate donors use the distance floor") {
  const auto t = parse_csv("a,b\n1,5\n1,\n1,7\n2,9\n");
  const auto f = impute_knn(t, {2, 1e-8});
  CHECK(f.value(1, 1) == doctest::Approx(6.0));
}

TEST_CASE("KNN needs k complete donors") {
  const auto t = parse_csv("a,b\n1,5\n1,\n,7\n2,9\n");
  CHECK_THROWS_AS(impute_knn(t, {3, 1e-8}), DataError);
  CHECK_THROWS_AS(impute_knn(t, {0, 1e-8}), ConfigError);
}

TEST_CASE("means imputation") {
  const auto t = parse_csv("a,b\n1,5\n3,\n,7\n2,9\n");
  const auto f = impute_means(t);
  CHECK(f.value(1, 1) == 7.0);
  CHECK(f.value(2, 0) == 2.0);
}

TEST_CASE("autoencoder baselines preserve observed cells") {
  const auto iris = builtin_dataset("iris");
  auto [masked, truth] = inject_missing(iris, {0.2, 5, 1, 2});
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.m1 = 3;
  cfg.m2 = 3;
  PrefillConfig pc;
  pc.forest.n_trees = 5;
  for (const auto& res : {impute_classic_ae(masked, cfg, pc), impute_ce_aann(masked, cfg, pc)}) {
    CHECK(res.log.epoch_loss.size() == 10);
    for (std::size_t r = 0; r < iris.rows(); ++r)
      for (std::size_t c = 0; c < iris.cols(); ++c) {
        if (masked.observed(r, c))
          CHECK(res.filled.value(r, c) == masked.value(r, c));
        else
          CHECK(std::isfinite(res.filled.value(r, c)));
      }
  }
  CHECK(impute_classic_ae(masked, cfg, pc).params.w1.rows() == 6);
  cfg.m2 = 0;
  CHECK_THROWS_AS(impute_ce_aann(masked, cfg, pc), ConfigError);
}
