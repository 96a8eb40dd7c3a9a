#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ffeam/core.hpp"

namespace ffeam {

struct KMeansOptions {
  std::size_t max_iters = 100;
  double tol = 1e-6;
};

struct KMeansResult {
  Matrix centroids;                    // k x s
  std::vector<std::size_t> assignment;  // per data row
  // Objective after seeding and after each Lloyd iteration.
  std::vector<double> objective;
  std::size_t iterations = 0;
};

// Lloyd's algorithm from k-means++ seeding. A cluster that empties is
// re-seeded with the point farthest from its current centroid.
KMeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

// Largest pairwise Euclidean distance between centroid rows.
double max_centroid_distance(const Matrix& centroids);

// Shared Gaussian width c_max / sqrt(2h) for h centroids.
double compute_width(const Matrix& centroids);

// Fixed RBF layer: one centroid per neuron, one shared width.
struct RbfBasis {
  Matrix centroids;
  double width = 1.0;

  std::size_t size() const noexcept { return centroids.rows(); }
  std::size_t dim() const noexcept { return centroids.cols(); }
};

struct RbfConfig {
  std::optional<std::size_t> k;  // defaults to the RBF neuron count
  KMeansOptions kmeans;
  std::uint64_t seed = 0;
};

RbfBasis build_basis(const Matrix& data, std::size_t k, std::uint64_t seed,
                     const KMeansOptions& options = {});

}  // namespace ffeam
