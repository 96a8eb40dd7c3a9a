#pragma once

#include "ffeam/dataset.hpp"
#include "ffeam/ffeam.hpp"
#include "ffeam/prefill.hpp"

namespace ffeam {

struct KnnConfig {
  std::size_t k = 5;
  double distance_floor = 1e-8;  // weights are 1 / max(d, floor)
};

// Column means of observed values.
NumericTable impute_means(const NumericTable& table);

// Each incomplete row is filled from its k nearest complete rows, with
// Euclidean distance over the row's observed coordinates and
// inverse-distance weights.
NumericTable impute_knn(const NumericTable& table, const KnnConfig& cfg);

// Single relu hidden layer of m1 + m2 ordinary units, reconstruction loss
// only, trained with the same variable-fill loop as FFEAM.
TrainResult impute_classic_ae(const NumericTable& table, const TrainConfig& cfg,
                              const PrefillConfig& prefill_cfg);

// m1 de-tracking units produce y, m2 ordinary units produce the reference r.
TrainResult impute_ce_aann(const NumericTable& table, const TrainConfig& cfg,
                           const PrefillConfig& prefill_cfg);

}  // namespace ffeam
