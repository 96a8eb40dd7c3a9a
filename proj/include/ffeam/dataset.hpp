#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ffeam/core.hpp"

namespace ffeam {

// Dense numeric table with an observed/missing mask. Missing cells hold a
// NaN placeholder; consumers must consult the mask, never the value.
class NumericTable {
 public:
  NumericTable() = default;
  NumericTable(Matrix values, std::vector<std::string> column_names);
  NumericTable(Matrix values, std::vector<std::uint8_t> mask,
               std::vector<std::string> column_names);

  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t cols() const noexcept { return values_.cols(); }

  const Matrix& values() const noexcept { return values_; }
  Matrix& values() noexcept { return values_; }
  double value(std::size_t r, std::size_t c) const noexcept { return values_(r, c); }
  void set_value(std::size_t r, std::size_t c, double v) noexcept { values_(r, c) = v; }

  bool observed(std::size_t r, std::size_t c) const noexcept { return mask_[r * cols() + c] != 0; }
  void set_observed(std::size_t r, std::size_t c, bool obs) noexcept {
    mask_[r * cols() + c] = obs ? 1 : 0;
  }
  const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

  const std::vector<std::string>& column_names() const noexcept { return column_names_; }

  std::size_t missing_count() const noexcept;
  std::size_t column_missing_count(std::size_t c) const noexcept;
  std::size_t row_observed_count(std::size_t r) const noexcept;
  bool complete_row(std::size_t r) const noexcept { return row_observed_count(r) == cols(); }
  bool fully_observed() const noexcept { return missing_count() == 0; }

  // Throws DataError unless n >= 1, s >= 2, every row has an observed cell
  // and every column has at least two.
  void validate() const;

 private:
  Matrix values_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::string> column_names_;
};

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// True values of injected cells, sorted by (row, col).
using GroundTruth = std::vector<Cell>;

struct InjectionSpec {
  double rate = 0.2;
  std::uint64_t seed = 0;
  std::size_t min_observed_per_row = 1;
  std::size_t min_observed_per_column = 2;
};

struct SyntheticSpec {
  std::size_t n_samples = 1000;
  std::size_t n_valid = 3;
  std::size_t n_noise = 7;
  std::uint64_t seed = 0;
};

struct ScaleInfo {
  std::vector<double> min;
  std::vector<double> range;
  std::vector<bool> constant;  // columns passed through unscaled
};

NumericTable parse_csv(std::string_view text, std::string_view missing_token = "");
NumericTable load_csv(const std::filesystem::path& path, std::string_view missing_token = "");

std::string format_csv(const NumericTable& table, std::string_view missing_token = "");
void save_csv(const NumericTable& table, const std::filesystem::path& path,
              std::string_view missing_token = "");
// 0/1 matrix parallel to the table, 1 = observed.
void save_mask_csv(const NumericTable& table, const std::filesystem::path& path);
void save_ground_truth_csv(const GroundTruth& truth, const std::filesystem::path& path);
GroundTruth load_ground_truth_csv(const std::filesystem::path& path);

// Masks floor(rate * n * s) cells chosen uniformly at random, skipping cells
// whose removal would break the row/column guards.
std::pair<NumericTable, GroundTruth> inject_missing(const NumericTable& table,
                                                    const InjectionSpec& spec);

// n_valid columns mixed from three shared latent factors followed by n_noise
// independent uniform noise columns.
NumericTable generate_synthetic(const SyntheticSpec& spec);

// Per-column min-max scaling over observed cells.
std::pair<NumericTable, ScaleInfo> normalize(const NumericTable& table);
NumericTable denormalize(const NumericTable& table, const ScaleInfo& info);

// Bundled fixtures: "iris", "wine", "seeds".
NumericTable builtin_dataset(std::string_view name);
std::vector<std::string> builtin_dataset_names();
bool is_builtin_dataset(std::string_view name);

}  // namespace ffeam
