#include "ffeam/dataset.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace ffeam {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path.string());
  out << text;
}

}  // namespace

NumericTable::NumericTable(Matrix values, std::vector<std::string> column_names)
    : values_(std::move(values)),
      mask_(values_.size(), 1),
      column_names_(std::move(column_names)) {
  if (column_names_.size() != values_.cols())
    throw DataError("column name count does not match column count");
}

NumericTable::NumericTable(Matrix values, std::vector<std::uint8_t> mask,
                           std::vector<std::string> column_names)
    : values_(std::move(values)), mask_(std::move(mask)), column_names_(std::move(column_names)) {
  if (mask_.size() != values_.size()) throw DataError("mask shape does not match values");
  if (column_names_.size() != values_.cols())
    throw DataError("column name count does not match column count");
}

std::size_t NumericTable::missing_count() const noexcept {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{0}));
}

std::size_t NumericTable::column_missing_count(std::size_t c) const noexcept {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows(); ++r) n += observed(r, c) ? 0 : 1;
  return n;
}

std::size_t NumericTable::row_observed_count(std::size_t r) const noexcept {
  std::size_t n = 0;
  for (std::size_t c = 0; c < cols(); ++c) n += observed(r, c) ? 1 : 0;
  return n;
}

void NumericTable::validate() const {
  if (rows() < 1) throw DataError("table has no rows");
  if (cols() < 2) throw DataError("table needs at least 2 columns");
  for (std::size_t r = 0; r < rows(); ++r) {
    if (row_observed_count(r) == 0)
      throw DataError("row " + std::to_string(r + 1) + " has no observed values");
  }
  for (std::size_t c = 0; c < cols(); ++c) {
    if (rows() - column_missing_count(c) < 2)
      throw DataError("column \"" + column_names_[c] + "\" has fewer than 2 observed values");
  }
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) {
      if (observed(r, c) && !std::isfinite(value(r, c)))
        throw DataError("non-finite observed value at row " + std::to_string(r + 1) + ", column \"" +
                        column_names_[c] + "\"");
    }
  }
}

NumericTable parse_csv(std::string_view text, std::string_view missing_token) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw DataError("CSV is empty; a header row is required");

  std::vector<std::string> names;
  for (auto& f : split_record(lines[0])) names.emplace_back(trim(f));
  const std::size_t s = names.size();
  const std::size_t n = lines.size() - 1;

  Matrix values(n, s, kMissing);
  std::vector<std::uint8_t> mask(n * s, 0);
  for (std::size_t r = 0; r < n; ++r) {
    auto fields = split_record(lines[r + 1]);
    if (fields.size() != s) {
      throw DataError("ragged CSV: data row " + std::to_string(r + 1) + " (line " +
                      std::to_string(r + 2) + ") has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(s));
    }
    for (std::size_t c = 0; c < s; ++c) {
      std::string_view cell = trim(fields[c]);
      if (cell.empty() || cell == missing_token) continue;
      double v = 0.0;
      const char* first = cell.data();
      if (!cell.empty() && cell.front() == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError("cannot parse \"" + std::string(cell) + "\" at data row " +
                        std::to_string(r + 1) + " (line " + std::to_string(r + 2) + "), column \"" +
                        names[c] + "\"");
      }
      values(r, c) = v;
      mask[r * s + c] = 1;
    }
  }
  NumericTable table(std::move(values), std::move(mask), std::move(names));
  table.validate();
  return table;
}

NumericTable load_csv(const std::filesystem::path& path, std::string_view missing_token) {
  return parse_csv(read_file(path), missing_token);
}

std::string format_csv(const NumericTable& table, std::string_view missing_token) {
  std::string out;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    if (c) out += ',';
    out += table.column_names()[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (c) out += ',';
      // Imputed tables keep their mask, so unobserved-but-finite cells are fills.
      if (table.observed(r, c) || std::isfinite(table.value(r, c)))
        out += format_double(table.value(r, c));
      else
        out += missing_token;
    }
    out += '\n';
  }
  return out;
}

void save_csv(const NumericTable& table, const std::filesystem::path& path,
              std::string_view missing_token) {
  write_file(path, format_csv(table, missing_token));
}

void save_mask_csv(const NumericTable& table, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    if (c) out += ',';
    out += table.column_names()[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (c) out += ',';
      out += table.observed(r, c) ? '1' : '0';
    }
    out += '\n';
  }
  write_file(path, out);
}

void save_ground_truth_csv(const GroundTruth& truth, const std::filesystem::path& path) {
  std::string out = "row,col,value\n";
  for (const auto& cell : truth) {
    out += std::to_string(cell.row) + ',' + std::to_string(cell.col) + ',' +
           format_double(cell.value) + '\n';
  }
  write_file(path, out);
}

GroundTruth load_ground_truth_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  GroundTruth truth;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto f = split_record(line);
    if (f.size() != 3) throw DataError("ground truth line " + std::to_string(lineno) + " malformed");
    Cell cell;
    try {
      cell.row = std::stoull(f[0]);
      cell.col = std::stoull(f[1]);
      cell.value = std::stod(f[2]);
    } catch (const std::exception&) {
      throw DataError("ground truth line " + std::to_string(lineno) + " malformed");
    }
    truth.push_back(cell);
  }
  std::sort(truth.begin(), truth.end(), [](const Cell& a, const Cell& b) {
    return std::pair(a.row, a.col) < std::pair(b.row, b.col);
  });
  return truth;
}

std::pair<NumericTable, GroundTruth> inject_missing(const NumericTable& table,
                                                    const InjectionSpec& spec) {
  if (!(spec.rate >= 0.0 && spec.rate < 1.0)) throw ConfigError("injection rate must be in [0, 1)");
  if (!table.fully_observed()) throw DataError("inject_missing requires a fully observed table");
  const std::size_t n = table.rows();
  const std::size_t s = table.cols();
  // The small epsilon keeps e.g. 0.3 * 600 from flooring to 179.
  const auto target = static_cast<std::size_t>(std::floor(spec.rate * double(n * s) + 1e-9));

  NumericTable out = table;
  GroundTruth truth;
  if (target == 0) return {out, truth};

  std::vector<std::size_t> order(n * s);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(spec.seed, streams::injection));
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }

  std::vector<std::size_t> row_obs(n, s);
  std::vector<std::size_t> col_obs(s, n);
  std::size_t masked = 0;
  for (std::size_t idx : order) {
    if (masked == target) break;
    const std::size_t r = idx / s;
    const std::size_t c = idx % s;
    if (row_obs[r] <= spec.min_observed_per_row || col_obs[c] <= spec.min_observed_per_column)
      continue;
    --row_obs[r];
    --col_obs[c];
    truth.push_back({r, c, table.value(r, c)});
    out.set_observed(r, c, false);
    out.set_value(r, c, kMissing);
    ++masked;
  }
  if (masked < target) {
    throw DataError("missing rate " + std::to_string(spec.rate) +
                    " cannot be injected without violating row/column guards");
  }
  std::sort(truth.begin(), truth.end(), [](const Cell& a, const Cell& b) {
    return std::pair(a.row, a.col) < std::pair(b.row, b.col);
  });
  return {out, truth};
}

NumericTable generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_samples == 0) throw ConfigError("synthetic n_samples must be positive");
  if (spec.n_valid == 0) throw ConfigError("synthetic n_valid must be at least 1");
  const std::size_t s = spec.n_valid + spec.n_noise;
  if (s < 2) throw ConfigError("synthetic table needs at least 2 features");

  constexpr std::size_t kFactors = 3;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double half_width = std::sqrt(3.0);  // unit-variance uniform
  std::uniform_real_distribution<double> uniform(-half_width, half_width);

  Matrix loadings(spec.n_valid, kFactors);
  for (std::size_t c = 0; c < spec.n_valid; ++c) {
    double norm = 0.0;
    for (std::size_t f = 0; f < kFactors; ++f) {
      loadings(c, f) = normal(rng);
      norm += loadings(c, f) * loadings(c, f);
    }
    norm = std::sqrt(norm);
    for (std::size_t f = 0; f < kFactors; ++f) loadings(c, f) /= norm;
  }

  Matrix values(spec.n_samples, s);
  std::array<double, kFactors> z{};
  for (std::size_t r = 0; r < spec.n_samples; ++r) {
    for (auto& zf : z) zf = normal(rng);
    for (std::size_t c = 0; c < spec.n_valid; ++c) {
      double v = 0.0;
      for (std::size_t f = 0; f < kFactors; ++f) v += loadings(c, f) * z[f];
      values(r, c) = v + 0.1 * normal(rng);
    }
    for (std::size_t c = spec.n_valid; c < s; ++c) values(r, c) = uniform(rng);
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < spec.n_valid; ++c) names.push_back("valid_" + std::to_string(c + 1));
  for (std::size_t c = 0; c < spec.n_noise; ++c) names.push_back("noise_" + std::to_string(c + 1));
  return NumericTable(std::move(values), std::move(names));
}

std::pair<NumericTable, ScaleInfo> normalize(const NumericTable& table) {
  const std::size_t s = table.cols();
  ScaleInfo info;
  info.min.assign(s, 0.0);
  info.range.assign(s, 1.0);
  info.constant.assign(s, false);
  NumericTable out = table;
  for (std::size_t c = 0; c < s; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (!table.observed(r, c)) continue;
      lo = std::min(lo, table.value(r, c));
      hi = std::max(hi, table.value(r, c));
    }
    if (!(hi > lo)) {
      info.constant[c] = true;
      continue;
    }
    info.min[c] = lo;
    info.range[c] = hi - lo;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (table.observed(r, c)) out.set_value(r, c, (table.value(r, c) - lo) / (hi - lo));
    }
  }
  return {out, info};
}

NumericTable denormalize(const NumericTable& table, const ScaleInfo& info) {
  if (info.min.size() != table.cols()) throw DataError("scale info does not match table width");
  NumericTable out = table;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    if (info.constant[c]) continue;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      const double v = table.value(r, c);
      if (std::isfinite(v)) out.set_value(r, c, v * info.range[c] + info.min[c]);
    }
  }
  return out;
}

}  // namespace ffeam
