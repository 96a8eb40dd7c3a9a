// numpy bindings. Missing cells are exchanged as NaN.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "ffeam/bench.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ffeam::NumericTable to_table(const Array& a) {
  if (a.ndim() != 2) throw ffeam::DataError("expected a 2-D array");
  const std::size_t n = a.shape(0), s = a.shape(1);
  ffeam::Matrix m(n, s);
  std::vector<std::uint8_t> mask(n * s, 1);
  const double* p = a.data();
  for (std::size_t i = 0; i < n * s; ++i) {
    m.flat()[i] = p[i];
    mask[i] = std::isnan(p[i]) ? 0 : 1;
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < s; ++c) names.push_back("c" + std::to_string(c));
  ffeam::NumericTable t(std::move(m), std::move(mask), std::move(names));
  t.validate();
  return t;
}

Array to_array(const ffeam::NumericTable& t) {
  Array out({t.rows(), t.cols()});
  double* p = out.mutable_data();
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c)
      p[r * t.cols() + c] =
          std::isfinite(t.value(r, c)) ? t.value(r, c) : std::nan("");
  return out;
}

ffeam::KeyValueConfig to_config(const std::map<std::string, std::string>& entries) {
  ffeam::KeyValueConfig cfg;
  for (const auto& [k, v] : entries) cfg.set(k, v);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Missing-value imputation with feature-fusion autoencoders";

  py::register_exception<ffeam::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ffeam::DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ffeam::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "impute",
      [](const Array& data, const std::string& method,
         const std::map<std::string, std::string>& config, std::uint64_t seed) {
        const auto cfg = to_config(config);
        const auto settings = ffeam::settings_from_config(cfg);
        if (auto unknown = cfg.unused_keys(); !unknown.empty())
          throw ffeam::ConfigError("unknown config key: " + unknown.front());
        const auto table = to_table(data);
        ffeam::ImputeOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = ffeam::impute(table, ffeam::parse_method(method), settings, seed);
        }
        py::list losses;
        if (outcome.log)
          for (double v : outcome.log->epoch_loss) losses.append(v);
        return py::make_tuple(to_array(outcome.filled), losses);
      },
      py::arg("data"), py::arg("method") = "ffeam",
      py::arg("config") = std::map<std::string, std::string>{}, py::arg("seed") = 0,
      "Fill NaN cells; returns (filled, per-epoch mean losses).");

  m.def(
      "inject",
      [](const Array& data, double rate, std::uint64_t seed) {
        ffeam::InjectionSpec spec;
        spec.rate = rate;
        spec.seed = seed;
        auto [masked, truth] = ffeam::inject_missing(to_table(data), spec);
        py::list cells;
        for (const auto& c : truth) cells.append(py::make_tuple(c.row, c.col, c.value));
        return py::make_tuple(to_array(masked), cells);
      },
      py::arg("data"), py::arg("rate"), py::arg("seed") = 0,
      "Mask cells at random; returns (masked, [(row, col, value), ...]).");

  m.def(
      "evaluate",
      [](const Array& filled, const Array& masked, const std::vector<std::tuple<std::size_t, std::size_t, double>>& truth) {
        auto scored = to_table(masked);
        auto f = to_table(filled);
        for (std::size_t r = 0; r < scored.rows(); ++r)
          for (std::size_t c = 0; c < scored.cols(); ++c)
            if (!scored.observed(r, c)) scored.set_value(r, c, f.value(r, c));
        ffeam::GroundTruth gt;
        for (const auto& [r, c, v] : truth) gt.push_back({r, c, v});
        const auto metrics = ffeam::evaluate(scored, gt);
        py::dict out;
        out["rmse"] = metrics.rmse;
        out["mae"] = metrics.mae;
        out["n_eval"] = metrics.n_eval;
        out["table_rmse"] = metrics.table_rmse;
        out["table_mae"] = metrics.table_mae;
        return out;
      },
      py::arg("filled"), py::arg("masked"), py::arg("truth"),
      "RMSE/MAE of the fills at the masked cells.");

  m.def(
      "builtin_dataset", [](const std::string& name) { return to_array(ffeam::builtin_dataset(name)); },
      py::arg("name"));
  m.def("builtin_dataset_names", &ffeam::builtin_dataset_names);

  m.def(
      "generate_synthetic",
      [](std::size_t n_samples, std::size_t n_valid, std::size_t n_noise, std::uint64_t seed) {
        return to_array(ffeam::generate_synthetic({n_samples, n_valid, n_noise, seed}));
      },
      py::arg("n_samples") = 1000, py::arg("n_valid") = 3, py::arg("n_noise") = 7,
      py::arg("seed") = 0);
}
