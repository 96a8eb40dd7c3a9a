#include "ffeam/adam.hpp"

#include <cmath>

#include "ffeam/core.hpp"

namespace ffeam {

Adam::Adam(AdamConfig config, std::vector<TensorSpec> tensors)
    : config_(config), tensors_(std::move(tensors)) {
  for (const auto& t : tensors_) {
    m_.emplace_back(t.size, 0.0);
    v_.emplace_back(t.size, 0.0);
  }
}

void Adam::check_finite(std::size_t tensor, std::span<const double> grads) const {
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericalError("non-finite gradient in tensor '" + tensors_[tensor].name +
                           "' at entry " + std::to_string(i) + " (step " + std::to_string(t_) +
                           ")");
    }
  }
}

void Adam::apply(std::size_t tensor, std::size_t i, double& value, double grad, double lr,
                 double c1, double c2) {
  double& m = m_[tensor][i];
  double& v = v_[tensor][i];
  m = config_.beta1 * m + (1.0 - config_.beta1) * grad;
  v = config_.beta2 * v + (1.0 - config_.beta2) * grad * grad;
  value -= lr * (m / c1) / (std::sqrt(v / c2) + config_.eps);
}

void Adam::step(double lr, std::span<const std::span<double>> values,
                std::span<const std::span<const double>> grads) {
  if (values.size() != tensors_.size() || grads.size() != tensors_.size())
    throw Error("Adam::step: tensor count mismatch");
  for (std::size_t k = 0; k < tensors_.size(); ++k) {
    if (values[k].size() != tensors_[k].size || grads[k].size() != tensors_[k].size)
      throw Error("Adam::step: shape mismatch for tensor '" + tensors_[k].name + "'");
    check_finite(k, grads[k]);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, double(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, double(t_));
  for (std::size_t k = 0; k < tensors_.size(); ++k) {
    for (std::size_t i = 0; i < values[k].size(); ++i) {
      apply(k, i, values[k][i], grads[k][i], lr, c1, c2);
    }
  }
}

void Adam::step_sparse(double lr, std::size_t tensor, std::span<double> values,
                       std::span<const std::size_t> indices, std::span<const double> grads) {
  if (indices.size() != grads.size()) throw Error("Adam::step_sparse: index/gradient mismatch");
  if (values.size() != tensors_[tensor].size)
    throw Error("Adam::step_sparse: shape mismatch for tensor '" + tensors_[tensor].name + "'");
  check_finite(tensor, grads);
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, double(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, double(t_));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    apply(tensor, indices[i], values[indices[i]], grads[i], lr, c1, c2);
  }
}

}  // namespace ffeam
