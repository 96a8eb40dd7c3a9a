#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ffeam {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction over a fixed set of named tensors. All tensors
// share one step counter; each owns its moment buffers.
class Adam {
 public:
  struct TensorSpec {
    std::string name;
    std::size_t size = 0;
  };

  Adam(AdamConfig config, std::vector<TensorSpec> tensors);

  // Advances the step counter and updates every tensor densely. Throws
  // NumericalError naming the first tensor whose gradient is non-finite.
  void step(double lr, std::span<const std::span<double>> values,
            std::span<const std::span<const double>> grads);

  // Advances the step counter and updates only `indices` of one tensor;
  // grads[i] belongs to indices[i]. Untouched entries keep their moments.
  void step_sparse(double lr, std::size_t tensor, std::span<double> values,
                   std::span<const std::size_t> indices, std::span<const double> grads);

  std::uint64_t steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }
  std::span<const double> first_moment(std::size_t tensor) const { return m_[tensor]; }
  std::span<const double> second_moment(std::size_t tensor) const { return v_[tensor]; }

 private:
  void check_finite(std::size_t tensor, std::span<const double> grads) const;
  void apply(std::size_t tensor, std::size_t i, double& value, double grad, double lr,
             double c1, double c2);

  AdamConfig config_;
  std::vector<TensorSpec> tensors_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::uint64_t t_ = 0;
};

}  // namespace ffeam
