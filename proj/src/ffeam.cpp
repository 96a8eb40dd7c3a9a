#include "ffeam/ffeam.hpp"

#include <cmath>
#include <random>

namespace ffeam {

namespace {

double relu(double v) { return v > 0.0 ? v : 0.0; }

void check_shapes(const Architecture& arch, const FfeamParams& params, std::size_t s) {
  const std::size_t m1 = arch.output_units;
  const std::size_t m2 = arch.reference_units;
  const bool ok_out = params.w1.rows() == m1 && params.w1.cols() == s && params.b1.size() == m1 &&
                      params.w2d.rows() == m1 && params.w2d.cols() == s && params.b2.size() == s;
  bool ok_ref = true;
  if (arch.reference != ReferencePathway::none)
    ok_ref = params.w2r.rows() == m2 && params.w2r.cols() == s;
  if (arch.reference == ReferencePathway::rbf)
    ok_ref = ok_ref && params.basis.size() == m2 && params.basis.dim() == s;
  if (arch.reference == ReferencePathway::dense)
    ok_ref = ok_ref && params.ref_w1.rows() == m2 && params.ref_w1.cols() == s &&
             params.ref_b1.size() == m2;
  if (!ok_out || !ok_ref) throw Error("network parameters do not match the architecture");
}

}  // namespace

Architecture Architecture::ffeam(std::size_t m1, std::size_t m2, RbfNorm norm) {
  return {OutputPathway::detracking, ReferencePathway::rbf, m1, m2, norm};
}

Architecture Architecture::ce_aann(std::size_t m1, std::size_t m2) {
  return {OutputPathway::detracking, ReferencePathway::dense, m1, m2, RbfNorm::squared};
}

Architecture Architecture::classic_ae(std::size_t hidden) {
  return {OutputPathway::dense, ReferencePathway::none, hidden, 0, RbfNorm::squared};
}

std::vector<TensorRef> trainable_tensors(const Architecture& arch, FfeamParams& params) {
  std::vector<TensorRef> out;
  out.push_back({"w1", params.w1.flat()});
  out.push_back({"b1", params.b1});
  out.push_back({"w2d", params.w2d.flat()});
  if (arch.reference != ReferencePathway::none) out.push_back({"w2r", params.w2r.flat()});
  out.push_back({"b2", params.b2});
  if (arch.reference == ReferencePathway::dense) {
    out.push_back({"ref_w1", params.ref_w1.flat()});
    out.push_back({"ref_b1", params.ref_b1});
  }
  return out;
}

FfeamParams init_params(const Architecture& arch, std::size_t n_attributes, double init_scale,
                        std::uint64_t seed, RbfBasis basis) {
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be non-negative");
  const std::size_t s = n_attributes;
  const std::size_t m1 = arch.output_units;
  const std::size_t m2 = arch.reference == ReferencePathway::none ? 0 : arch.reference_units;
  if (arch.reference == ReferencePathway::rbf) {
    if (basis.size() != m2)
      throw ConfigError("RBF basis has " + std::to_string(basis.size()) + " centroids but m2 = " +
                        std::to_string(m2));
    if (basis.dim() != s) throw ConfigError("RBF centroid dimension does not match attributes");
  }

  std::mt19937_64 rng(seed);
  auto draw = [&](Matrix& m) {
    if (init_scale == 0.0) return;
    std::uniform_real_distribution<double> u(-init_scale, init_scale);
    for (double& v : m.flat()) v = u(rng);
  };
  FfeamParams p;
  p.w1 = Matrix(m1, s);
  p.b1.assign(m1, 0.0);
  p.w2d = Matrix(m1, s);
  p.w2r = Matrix(m2, s);
  p.b2.assign(s, 0.0);
  draw(p.w1);
  draw(p.w2d);
  draw(p.w2r);
  if (arch.reference == ReferencePathway::dense) {
    p.ref_w1 = Matrix(m2, s);
    p.ref_b1.assign(m2, 0.0);
    draw(p.ref_w1);
  }
  if (arch.reference == ReferencePathway::rbf) p.basis = std::move(basis);
  return p;
}

double ForwardTrace::output_activation(const Architecture& arch, std::size_t i, std::size_t k,
                                       std::size_t j) const {
  const std::size_t m1 = arch.output_units;
  if (arch.output == OutputPathway::detracking)
    return relu(output_pre[(i * m1 + k) * attributes + j]);
  return relu(output_pre[i * m1 + k]);
}

ForwardTrace forward(const Architecture& arch, const FfeamParams& params, const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t s = x.cols();
  const std::size_t m1 = arch.output_units;
  const std::size_t m2 = arch.reference == ReferencePathway::none ? 0 : arch.reference_units;
  check_shapes(arch, params, s);

  ForwardTrace t;
  t.batch = n;
  t.attributes = s;
  t.y = Matrix(n, s);
  const bool detrack = arch.output == OutputPathway::detracking;
  t.output_pre.assign(detrack ? n * m1 * s : n * m1, 0.0);
  if (m2 > 0) {
    t.r = Matrix(n, s);
    t.reference_act.assign(n * m2, 0.0);
    t.reference_pre.assign(n * m2, 0.0);
  }

  std::vector<double> prefix(s + 1);
  std::vector<double> suffix(s + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (std::size_t k = 0; k < m1; ++k) {
      const auto w = params.w1.row(k);
      if (detrack) {
        // Split sums so the term for attribute j never enters unit (k, j),
        // making y_ij bitwise independent of x_ij.
        prefix[0] = 0.0;
        for (std::size_t l = 0; l < s; ++l) prefix[l + 1] = prefix[l] + w[l] * xi[l];
        suffix[s] = 0.0;
        for (std::size_t l = s; l-- > 0;) suffix[l] = suffix[l + 1] + w[l] * xi[l];
        for (std::size_t j = 0; j < s; ++j) {
          t.output_pre[(i * m1 + k) * s + j] = (prefix[j] + suffix[j + 1]) + params.b1[k];
        }
      } else {
        double sum = 0.0;
        for (std::size_t l = 0; l < s; ++l) sum += w[l] * xi[l];
        t.output_pre[i * m1 + k] = sum + params.b1[k];
      }
    }
    for (std::size_t j = 0; j < s; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < m1; ++k) sum += params.w2d(k, j) * t.output_activation(arch, i, k, j);
      t.y(i, j) = sum + params.b2[j];
    }

    if (m2 == 0) continue;
    for (std::size_t g = 0; g < m2; ++g) {
      double pre = 0.0;
      double act = 0.0;
      if (arch.reference == ReferencePathway::rbf) {
        const auto mu = params.basis.centroids.row(g);
        double d2 = 0.0;
        for (std::size_t l = 0; l < s; ++l) d2 += (xi[l] - mu[l]) * (xi[l] - mu[l]);
        pre = arch.rbf_norm == RbfNorm::squared ? d2 : std::sqrt(d2);
        const double sigma = params.basis.width;
        act = std::exp(-pre / (2.0 * sigma * sigma));
      } else {
        const auto w = params.ref_w1.row(g);
        for (std::size_t l = 0; l < s; ++l) pre += w[l] * xi[l];
        pre += params.ref_b1[g];
        act = relu(pre);
      }
      t.reference_pre[i * m2 + g] = pre;
      t.reference_act[i * m2 + g] = act;
    }
    for (std::size_t j = 0; j < s; ++j) {
      double sum = 0.0;
      for (std::size_t g = 0; g < m2; ++g) sum += params.w2r(g, j) * t.reference_act[i * m2 + g];
      t.r(i, j) = sum + params.b2[j];
    }
  }
  return t;
}

double loss(const Architecture& arch, const ForwardTrace& trace, const Matrix& x) {
  double total = 0.0;
  const bool has_ref = arch.reference != ReferencePathway::none;
  for (std::size_t i = 0; i < trace.batch; ++i) {
    for (std::size_t j = 0; j < trace.attributes; ++j) {
      const double e = trace.y(i, j) - x(i, j);
      total += e * e;
      if (has_ref) {
        const double f = trace.y(i, j) - trace.r(i, j);
        total += f * f;
      }
    }
  }
  if (!has_ref) return total / (2.0 * double(trace.batch));
  return 0.5 * total;
}

Gradients backward(const Architecture& arch, const FfeamParams& params, const ForwardTrace& trace,
                   const Matrix& x) {
  const std::size_t n = trace.batch;
  const std::size_t s = trace.attributes;
  const std::size_t m1 = arch.output_units;
  const bool has_ref = arch.reference != ReferencePathway::none;
  const std::size_t m2 = has_ref ? arch.reference_units : 0;
  const bool detrack = arch.output == OutputPathway::detracking;

  Gradients g;
  g.params.w1 = Matrix(m1, s);
  g.params.b1.assign(m1, 0.0);
  g.params.w2d = Matrix(m1, s);
  g.params.w2r = Matrix(m2, s);
  g.params.b2.assign(s, 0.0);
  if (arch.reference == ReferencePathway::dense) {
    g.params.ref_w1 = Matrix(m2, s);
    g.params.ref_b1.assign(m2, 0.0);
  }
  g.inputs = Matrix(n, s);

  const double ae_scale = has_ref ? 1.0 : 1.0 / double(n);
  std::vector<double> ey(s);
  std::vector<double> er(s);
  std::vector<double> delta(s);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    auto dx = g.inputs.row(i);
    for (std::size_t j = 0; j < s; ++j) {
      const double fit = trace.y(i, j) - xi[j];
      const double ref = has_ref ? trace.y(i, j) - trace.r(i, j) : 0.0;
      ey[j] = ae_scale * (fit + ref);
      er[j] = -ref;
      dx[j] -= ae_scale * fit;
      g.params.b2[j] += ey[j] + er[j];
    }

    for (std::size_t k = 0; k < m1; ++k) {
      for (std::size_t j = 0; j < s; ++j) {
        g.params.w2d(k, j) += ey[j] * trace.output_activation(arch, i, k, j);
      }
      const auto w = params.w1.row(k);
      if (detrack) {
        double total = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
          const bool active = trace.output_pre[(i * m1 + k) * s + j] > 0.0;
          delta[j] = active ? ey[j] * params.w2d(k, j) : 0.0;
          total += delta[j];
        }
        g.params.b1[k] += total;
        // Input l feeds unit (k, j) for every j != l.
        for (std::size_t l = 0; l < s; ++l) {
          const double upstream = total - delta[l];
          g.params.w1(k, l) += upstream * xi[l];
          dx[l] += upstream * w[l];
        }
      } else {
        if (!(trace.output_pre[i * m1 + k] > 0.0)) continue;
        double upstream = 0.0;
        for (std::size_t j = 0; j < s; ++j) upstream += ey[j] * params.w2d(k, j);
        g.params.b1[k] += upstream;
        for (std::size_t l = 0; l < s; ++l) {
          g.params.w1(k, l) += upstream * xi[l];
          dx[l] += upstream * w[l];
        }
      }
    }

    for (std::size_t gi = 0; gi < m2; ++gi) {
      const double act = trace.reference_act[i * m2 + gi];
      double rho = 0.0;
      for (std::size_t j = 0; j < s; ++j) {
        g.params.w2r(gi, j) += er[j] * act;
        rho += er[j] * params.w2r(gi, j);
      }
      if (arch.reference == ReferencePathway::rbf) {
        const double sigma = params.basis.width;
        const double dact = -act / (2.0 * sigma * sigma);  // d act / d distance
        const auto mu = params.basis.centroids.row(gi);
        const double d = trace.reference_pre[i * m2 + gi];
        for (std::size_t l = 0; l < s; ++l) {
          double dd = 0.0;
          if (arch.rbf_norm == RbfNorm::squared)
            dd = 2.0 * (xi[l] - mu[l]);
          else if (d > 0.0)
            dd = (xi[l] - mu[l]) / d;
          dx[l] += rho * dact * dd;
        }
      } else {
        if (!(trace.reference_pre[i * m2 + gi] > 0.0)) continue;
        g.params.ref_b1[gi] += rho;
        const auto w = params.ref_w1.row(gi);
        for (std::size_t l = 0; l < s; ++l) {
          g.params.ref_w1(gi, l) += rho * xi[l];
          dx[l] += rho * w[l];
        }
      }
    }
  }
  return g;
}

MissingVariables::MissingVariables(const NumericTable& table, const Matrix& initial)
    : cols_(table.cols()), index_(table.rows() * table.cols(), npos), row_start_(table.rows() + 1, 0) {
  for (std::size_t r = 0; r < table.rows(); ++r) {
    row_start_[r] = row_items_.size();
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (table.observed(r, c)) continue;
      const double v = initial(r, c);
      if (!std::isfinite(v)) throw DataError("missing variable initialized with a non-finite value");
      index_[r * cols_ + c] = entries_.size();
      row_items_.push_back(entries_.size());
      entries_.push_back({r, c, v});
    }
  }
  row_start_[table.rows()] = row_items_.size();
}

std::size_t MissingVariables::index_of(std::size_t row, std::size_t col) const noexcept {
  return index_[row * cols_ + col];
}

std::span<const std::size_t> MissingVariables::row_entries(std::size_t row) const noexcept {
  return std::span<const std::size_t>(row_items_).subspan(row_start_[row],
                                                          row_start_[row + 1] - row_start_[row]);
}

std::vector<double> MissingVariables::values() const {
  std::vector<double> out(entries_.size());
  for (std::size_t e = 0; e < entries_.size(); ++e) out[e] = entries_[e].value;
  return out;
}

void MissingVariables::set_values(std::span<const double> values) {
  if (values.size() != entries_.size()) throw Error("missing variable count mismatch");
  for (std::size_t e = 0; e < entries_.size(); ++e) entries_[e].value = values[e];
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate must be positive");
  if (epochs == 0) throw ConfigError("epochs must be at least 1");
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (m1 == 0) throw ConfigError("m1 must be at least 1");
  if (hidden_total && m1 + m2 != *hidden_total) {
    throw ConfigError("m1 + m2 = " + std::to_string(m1 + m2) + " does not match hidden_total = " +
                      std::to_string(*hidden_total));
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0))
    throw ConfigError("Adam betas must be in [0, 1)");
  if (!(adam.eps > 0.0)) throw ConfigError("adam_eps must be positive");
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be non-negative");
}

TrainResult train_network(const NumericTable& table, const Architecture& arch,
                          const TrainConfig& cfg, const PrefillConfig& prefill_cfg,
                          const RbfConfig& rbf_cfg) {
  table.validate();
  cfg.validate();
  const std::size_t n = table.rows();
  const std::size_t s = table.cols();

  const NumericTable prefilled = prefill(table, prefill_cfg);
  Matrix current = prefilled.values();
  MissingVariables vars(table, current);

  RbfBasis basis;
  if (arch.reference == ReferencePathway::rbf) {
    const std::size_t k = rbf_cfg.k.value_or(arch.reference_units);
    if (k != arch.reference_units) {
      throw ConfigError("rbf.k = " + std::to_string(k) + " must equal the RBF neuron count " +
                        std::to_string(arch.reference_units));
    }
    basis = build_basis(current, k, rbf_cfg.seed, rbf_cfg.kmeans);
  }
  if (arch.reference != ReferencePathway::none && arch.reference_units == 0)
    throw ConfigError("m2 must be at least 1 for a reference pathway");

  TrainResult result;
  result.params = init_params(arch, s, cfg.init_scale, derive_seed(cfg.seed, streams::init),
                              std::move(basis));
  FfeamParams& params = result.params;

  std::vector<Adam::TensorSpec> specs;
  for (const auto& t : trainable_tensors(arch, params)) specs.push_back({t.name, t.values.size()});
  Adam param_opt(cfg.adam, specs);
  Adam var_opt(cfg.adam, {{"missing_variables", vars.size()}});
  std::vector<double> var_values = vars.values();

  std::mt19937_64 rng(derive_seed(cfg.seed, streams::shuffle));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  const std::size_t step_budget = cfg.budget_unit == BudgetUnit::steps ? cfg.epochs : 0;
  std::size_t steps = 0;
  std::vector<std::size_t> var_idx;
  std::vector<double> var_grad;
  for (std::size_t epoch = 0;; ++epoch) {
    if (cfg.budget_unit == BudgetUnit::epochs && epoch == cfg.epochs) break;
    if (cfg.budget_unit == BudgetUnit::steps && steps == step_budget) break;

    for (std::size_t i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(order[i], order[pick(rng)]);
    }
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      if (cfg.budget_unit == BudgetUnit::steps && steps == step_budget) break;
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      Matrix xb(stop - start, s);
      for (std::size_t b = start; b < stop; ++b) {
        const auto src = current.row(order[b]);
        std::copy(src.begin(), src.end(), xb.row(b - start).begin());
      }

      const ForwardTrace trace = forward(arch, params, xb);
      const double batch_loss = loss(arch, trace, xb);
      if (!std::isfinite(batch_loss)) {
        throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batches));
      }
      Gradients grads = backward(arch, params, trace, xb);

      auto tensors = trainable_tensors(arch, params);
      auto grad_tensors = trainable_tensors(arch, grads.params);
      std::vector<std::span<double>> values;
      std::vector<std::span<const double>> gvals;
      for (std::size_t t = 0; t < tensors.size(); ++t) {
        values.push_back(tensors[t].values);
        gvals.push_back(grad_tensors[t].values);
      }
      param_opt.step(cfg.learning_rate, values, gvals);

      if (!cfg.static_fill) {
        var_idx.clear();
        var_grad.clear();
        for (std::size_t b = start; b < stop; ++b) {
          for (std::size_t e : vars.row_entries(order[b])) {
            var_idx.push_back(e);
            var_grad.push_back(grads.inputs(b - start, vars.entries()[e].col));
          }
        }
        if (!var_idx.empty()) {
          var_opt.step_sparse(cfg.learning_rate, 0, var_values, var_idx, var_grad);
          for (std::size_t e : var_idx) {
            const auto& entry = vars.entries()[e];
            current(entry.row, entry.col) = var_values[e];
          }
        }
      }
      epoch_loss += batch_loss;
      ++batches;
      ++steps;
    }
    if (batches > 0) result.log.epoch_loss.push_back(epoch_loss / double(batches));
  }

  vars.set_values(var_values);
  const ForwardTrace final_pass = forward(arch, params, current);
  result.filled = table;
  for (const auto& entry : vars.entries()) {
    result.filled.set_value(entry.row, entry.col, final_pass.y(entry.row, entry.col));
  }
  result.log.trained_variables = std::move(var_values);
  result.log.steps = steps;
  return result;
}

TrainResult train(const NumericTable& table, const TrainConfig& cfg,
                  const PrefillConfig& prefill_cfg, const RbfConfig& rbf_cfg) {
  if (cfg.m2 < 2) throw ConfigError("FFEAM needs m2 >= 2 RBF neurons");
  return train_network(table, Architecture::ffeam(cfg.m1, cfg.m2, cfg.rbf_norm), cfg, prefill_cfg,
                       rbf_cfg);
}

std::string to_string(RbfNorm norm) { return norm == RbfNorm::squared ? "squared" : "as_written"; }

RbfNorm parse_rbf_norm(std::string_view text) {
  if (text == "squared") return RbfNorm::squared;
  if (text == "as_written") return RbfNorm::as_written;
  throw ConfigError("rbf_norm must be 'squared' or 'as_written', got '" + std::string(text) + "'");
}

}  // namespace ffeam
