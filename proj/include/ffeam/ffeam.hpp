#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffeam/adam.hpp"
#include "ffeam/core.hpp"
#include "ffeam/dataset.hpp"
#include "ffeam/prefill.hpp"
#include "ffeam/rbf_init.hpp"

namespace ffeam {

// Distance used inside the Gaussian RBF activation.
enum class RbfNorm {
  squared,     // exp(-||x - mu||^2 / (2 sigma^2))
  as_written,  // exp(-||x - mu|| / (2 sigma^2)), subgradient 0 at x == mu
};

// Hidden units feeding the primary output y.
enum class OutputPathway {
  detracking,  // unit k for attribute j ignores input j
  dense,       // ordinary relu unit shared by all attributes
};

// Hidden units feeding the reference output r.
enum class ReferencePathway { rbf, dense, none };

// Network family. FFEAM = {detracking, rbf}; CE-AANN = {detracking, dense};
// classical autoencoder = {dense, none}.
struct Architecture {
  OutputPathway output = OutputPathway::detracking;
  ReferencePathway reference = ReferencePathway::rbf;
  std::size_t output_units = 10;     // m1
  std::size_t reference_units = 10;  // m2
  RbfNorm rbf_norm = RbfNorm::squared;

  static Architecture ffeam(std::size_t m1, std::size_t m2, RbfNorm norm = RbfNorm::squared);
  static Architecture ce_aann(std::size_t m1, std::size_t m2);
  static Architecture classic_ae(std::size_t hidden);
};

struct FfeamParams {
  Matrix w1;                   // m1 x s, input -> output-pathway units
  std::vector<double> b1;      // m1
  Matrix w2d;                  // m1 x s, output-pathway units -> y
  Matrix w2r;                  // m2 x s, reference units -> r
  std::vector<double> b2;      // s, shared by y and r
  Matrix ref_w1;               // m2 x s, dense reference pathway only
  std::vector<double> ref_b1;  // m2, dense reference pathway only
  RbfBasis basis;              // rbf reference pathway only; never trained
};

// Named view of one trainable tensor.
struct TensorRef {
  std::string name;
  std::span<double> values;
};

// Trainable tensors in a fixed order: w1, b1, w2d, w2r, b2, ref_w1, ref_b1
// (tensors that the architecture does not use are omitted).
std::vector<TensorRef> trainable_tensors(const Architecture& arch, FfeamParams& params);

// Weights uniform in [-init_scale, init_scale], biases zero.
FfeamParams init_params(const Architecture& arch, std::size_t n_attributes, double init_scale,
                        std::uint64_t seed, RbfBasis basis = {});

struct ForwardTrace {
  std::size_t batch = 0;
  std::size_t attributes = 0;
  // detracking: batch x m1 x s pre-activations (index (i*m1 + k)*s + j);
  // dense: batch x m1.
  std::vector<double> output_pre;
  // Reference activations, batch x m2 (RBF values or relu outputs).
  std::vector<double> reference_act;
  // RBF distance d(x_i, mu_g) or dense pre-activation, batch x m2.
  std::vector<double> reference_pre;
  Matrix y;
  Matrix r;  // empty when the architecture has no reference pathway

  double output_activation(const Architecture& arch, std::size_t i, std::size_t k,
                           std::size_t j) const;
};

ForwardTrace forward(const Architecture& arch, const FfeamParams& params, const Matrix& x);

// Two-output loss 1/2 sum (y - x)^2 + (y - r)^2; without a reference pathway
// the classical 1/(2n) sum (y - x)^2.
double loss(const Architecture& arch, const ForwardTrace& trace, const Matrix& x);

struct Gradients {
  FfeamParams params;  // same shapes as the model; basis left empty
  Matrix inputs;       // dL/dx for every cell of the batch
};

Gradients backward(const Architecture& arch, const FfeamParams& params, const ForwardTrace& trace,
                   const Matrix& x);

// Trainable fill values, one per missing cell.
class MissingVariables {
 public:
  struct Entry {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
  };
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  MissingVariables() = default;
  // One entry per masked cell of `table`, initialized from `initial`.
  MissingVariables(const NumericTable& table, const Matrix& initial);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t index_of(std::size_t row, std::size_t col) const noexcept;
  // Entry indices belonging to `row`, in column order.
  std::span<const std::size_t> row_entries(std::size_t row) const noexcept;
  std::vector<double> values() const;
  void set_values(std::span<const double> values);

 private:
  std::size_t cols_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> index_;      // rows*cols -> entry or npos
  std::vector<std::size_t> row_start_;  // CSR offsets into row_items_
  std::vector<std::size_t> row_items_;
};

enum class BudgetUnit { epochs, steps };

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 1000;
  BudgetUnit budget_unit = BudgetUnit::epochs;  // `steps` reads `epochs` as optimizer steps
  std::size_t batch_size = 20;
  std::size_t m1 = 10;
  std::size_t m2 = 10;
  std::optional<std::size_t> hidden_total;
  AdamConfig adam;
  double init_scale = 0.1;
  std::uint64_t seed = 0;
  RbfNorm rbf_norm = RbfNorm::squared;
  // Keep missing cells frozen at their pre-fill (no variable updates).
  bool static_fill = false;

  void validate() const;
};

struct TrainLog {
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  std::vector<double> trained_variables;
  std::size_t steps = 0;
};

struct TrainResult {
  NumericTable filled;
  TrainLog log;
  FfeamParams params;
};

// Pre-fill, missing cells as variables, optional k-means basis, then joint
// Adam optimization of weights and variables over shuffled mini-batches of
// every row. Missing cells of the result hold the final forward pass's y.
TrainResult train_network(const NumericTable& table, const Architecture& arch,
                          const TrainConfig& cfg, const PrefillConfig& prefill_cfg,
                          const RbfConfig& rbf_cfg);

// FFEAM with m1 de-tracking and m2 RBF units from `cfg`.
TrainResult train(const NumericTable& table, const TrainConfig& cfg,
                  const PrefillConfig& prefill_cfg, const RbfConfig& rbf_cfg);

std::string to_string(RbfNorm norm);
RbfNorm parse_rbf_norm(std::string_view text);

}  // namespace ffeam
