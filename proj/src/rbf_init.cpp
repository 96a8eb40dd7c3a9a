#include "ffeam/rbf_init.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace ffeam {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

Matrix seed_plus_plus(const Matrix& data, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = data.rows();
  Matrix centroids(k, data.cols());
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);

  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += nearest[i];
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          target -= nearest[i];
          if (target < 0.0 && nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
        while (chosen[pick] && pick > 0) --pick;  // guards the rounding tail
      } else {
        // Every remaining point coincides with a centroid; take an unused row.
        std::vector<std::size_t> unused;
        for (std::size_t i = 0; i < n; ++i) {
          if (!chosen[i]) unused.push_back(i);
        }
        std::uniform_int_distribution<std::size_t> u(0, unused.size() - 1);
        pick = unused[u(rng)];
      }
    }
    chosen[pick] = true;
    std::copy(data.row(pick).begin(), data.row(pick).end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(data.row(i), centroids.row(c)));
    }
  }
  return centroids;
}

double assign(const Matrix& data, const Matrix& centroids, std::vector<std::size_t>& assignment) {
  double objective = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(data.row(i), centroids.row(c));
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    assignment[i] = arg;
    objective += best;
  }
  return objective;
}

}  // namespace

KMeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (k == 0) throw ConfigError("k-means needs k >= 1");
  if (k > data.rows()) {
    throw ConfigError("k-means: k = " + std::to_string(k) + " exceeds the " +
                      std::to_string(data.rows()) + " data rows");
  }
  for (double v : data.flat()) {
    if (!std::isfinite(v)) throw DataError("k-means input contains non-finite values");
  }

  const std::size_t n = data.rows();
  const std::size_t s = data.cols();
  std::mt19937_64 rng(seed);
  KMeansResult result;
  result.centroids = seed_plus_plus(data, k, rng);
  result.assignment.assign(n, 0);
  result.objective.push_back(assign(data, result.centroids, result.assignment));

  Matrix sums(k, s);
  std::vector<std::size_t> counts(k);
  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    sums.fill(0.0);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = result.assignment[i];
      ++counts[c];
      for (std::size_t j = 0; j < s; ++j) sums(c, j) += data(i, j);
    }

    Matrix updated(k, s);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < s; ++j) updated(c, j) = sums(c, j) / double(counts[c]);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      double worst = -1.0;
      std::size_t far = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = result.assignment[i];
        if (counts[a] == 0) continue;
        const double d = squared_distance(data.row(i), updated.row(a));
        if (d > worst) {
          worst = d;
          far = i;
        }
      }
      std::copy(data.row(far).begin(), data.row(far).end(), updated.row(c).begin());
      --counts[result.assignment[far]];
      result.assignment[far] = c;
      counts[c] = 1;
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(squared_distance(updated.row(c), result.centroids.row(c))));
    }
    result.centroids = std::move(updated);
    result.objective.push_back(assign(data, result.centroids, result.assignment));
    result.iterations = iter + 1;
    if (shift < options.tol) break;
  }
  return result;
}

double max_centroid_distance(const Matrix& centroids) {
  double best = 0.0;
  for (std::size_t a = 0; a < centroids.rows(); ++a) {
    for (std::size_t b = a + 1; b < centroids.rows(); ++b) {
      best = std::max(best, squared_distance(centroids.row(a), centroids.row(b)));
    }
  }
  return std::sqrt(best);
}

double compute_width(const Matrix& centroids) {
  const std::size_t h = centroids.rows();
  if (h < 2) throw ConfigError("RBF width needs at least 2 centroids");
  const double c_max = max_centroid_distance(centroids);
  if (!(c_max > 0.0)) {
    throw DataError("all " + std::to_string(h) +
                    " RBF centroids coincide; re-cluster with a smaller k");
  }
  return c_max / std::sqrt(2.0 * double(h));
}

RbfBasis build_basis(const Matrix& data, std::size_t k, std::uint64_t seed,
                     const KMeansOptions& options) {
  RbfBasis basis;
  basis.centroids = kmeans(data, k, seed, options).centroids;
  basis.width = compute_width(basis.centroids);
  return basis;
}

}  // namespace ffeam
