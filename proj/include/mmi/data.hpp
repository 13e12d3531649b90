#pragma once

// Dataset container, CSV ingestion, per-feature scaling to [-1, 1], k-fold
// splitting and seeded synthetic generators.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "mmi/common.hpp"

namespace mmi {

/// Feature matrix plus one integer label per row.
///
/// Binary tasks label samples +1 / -1, multiclass tasks use 0..C-1.
struct Dataset {
  Matrix features;
  Labels labels;

  [[nodiscard]] std::size_t size() const noexcept { return features.rows(); }
  [[nodiscard]] std::size_t dims() const noexcept { return features.cols(); }

  /// Throws unless n >= 1, d >= 1, labels align and every value is finite.
  void validate() const {
    if (features.rows() == 0) throw invalid_argument("dataset has no samples");
    if (features.cols() == 0) throw invalid_argument("dataset has no features");
    if (labels.size() != features.rows()) {
      throw dimension_error("dataset has " + std::to_string(features.rows()) + " rows but " +
                            std::to_string(labels.size()) + " labels");
    }
    if (!all_finite(features.data())) throw invalid_argument("dataset contains non-finite feature values");
  }

  [[nodiscard]] bool is_binary() const {
    return std::all_of(labels.begin(), labels.end(), [](int y) { return y == 1 || y == -1; });
  }

  /// Number of classes of a multiclass dataset (max label + 1). Throws on negative labels.
  [[nodiscard]] std::size_t class_count() const {
    int top = -1;
    for (int y : labels) {
      if (y < 0) throw invalid_argument("multiclass labels must lie in 0..C-1, found " + std::to_string(y));
      top = std::max(top, y);
    }
    return static_cast<std::size_t>(top + 1);
  }

  /// Rows selected by `indices`, in that order.
  [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.features = Matrix(indices.size(), dims());
    out.labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
      auto src = features.row(indices[r]);
      std::copy(src.begin(), src.end(), out.features.row(r).begin());
      out.labels.push_back(labels[indices[r]]);
    }
    return out;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

inline void require_binary(const Dataset& data) {
  if (!data.is_binary()) throw invalid_argument("binary task requires every label to be +1 or -1");
}

/// Counts of +1 and -1 labels.
inline std::pair<std::size_t, std::size_t> class_sizes(std::span<const int> labels) {
  std::size_t pos = 0, neg = 0;
  for (int y : labels) (y > 0 ? pos : neg)++;
  return {pos, neg};
}

// ---------------------------------------------------------------------------
// CSV ingestion

/// Which column of a CSV file holds the label: a 0-based index, a header name,
/// or (default) the last column.
class LabelColumn {
 public:
  LabelColumn() = default;
  static LabelColumn index(std::size_t i) { return LabelColumn(i); }
  static LabelColumn named(std::string name) { return LabelColumn(std::move(name)); }
  static LabelColumn last() { return {}; }

  /// Digits select an index, "last" or "" the final column, anything else a header name.
  static LabelColumn parse(std::string_view text) {
    if (text.empty() || text == "last") return last();
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size()) return index(value);
    return named(std::string(text));
  }

  [[nodiscard]] std::size_t resolve(std::size_t columns, const std::optional<std::vector<std::string>>& header) const {
    if (std::holds_alternative<std::monostate>(which_)) return columns - 1;
    if (const auto* i = std::get_if<std::size_t>(&which_)) {
      if (*i >= columns) {
        throw invalid_argument("label column index " + std::to_string(*i) + " out of range for " +
                               std::to_string(columns) + " columns");
      }
      return *i;
    }
    const auto& name = std::get<std::string>(which_);
    if (!header) throw invalid_argument("label column '" + name + "' given by name but the file has no header row");
    auto it = std::find(header->begin(), header->end(), name);
    if (it == header->end()) throw invalid_argument("label column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - header->begin());
  }

  [[nodiscard]] std::string describe() const {
    if (std::holds_alternative<std::monostate>(which_)) return "last";
    if (const auto* i = std::get_if<std::size_t>(&which_)) return std::to_string(*i);
    return std::get<std::string>(which_);
  }

 private:
  explicit LabelColumn(std::size_t i) : which_(i) {}
  explicit LabelColumn(std::string name) : which_(std::move(name)) {}
  std::variant<std::monostate, std::size_t, std::string> which_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::optional<int> parse_int(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

/// Raw table: optional header plus string cells, with 1-based source line numbers.
struct CsvTable {
  std::optional<std::vector<std::string>> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::size_t columns = 0;
};

inline CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_commas(line);
    if (first) {
      first = false;
      table.columns = cells.size();
      // A header is a first row containing any non-numeric cell.
      bool numeric = std::all_of(cells.begin(), cells.end(), [](auto c) { return parse_double(c).has_value(); });
      if (!numeric) {
        table.header.emplace(cells.begin(), cells.end());
        continue;
      }
    }
    if (cells.size() != table.columns) {
      throw parse_error(path + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                        " columns, expected " + std::to_string(table.columns));
    }
    table.rows.emplace_back(cells.begin(), cells.end());
    table.line_numbers.push_back(line_no);
  }
  return table;
}

inline double parse_feature_cell(const std::string& path, std::size_t line, std::size_t col, const std::string& cell) {
  auto v = parse_double(cell);
  if (!v) {
    throw parse_error(path + ": row " + std::to_string(line) + ", column " + std::to_string(col + 1) +
                      ": non-numeric feature value '" + cell + "'");
  }
  if (!std::isfinite(*v)) {
    throw parse_error(path + ": row " + std::to_string(line) + ", column " + std::to_string(col + 1) +
                      ": non-finite feature value '" + cell + "'");
  }
  return *v;
}

}  // namespace detail

/// Reads a labelled dataset. Rows keep file order; the label column is removed
/// from the features. Errors name the offending row (file line) and column.
inline Dataset load_csv(const std::string& path, const LabelColumn& label_column = LabelColumn::last()) {
  auto table = detail::read_csv_table(path);
  if (table.rows.empty()) throw parse_error(path + ": no data rows");
  if (table.columns < 2) throw parse_error(path + ": need at least one feature column and a label column");
  const std::size_t label_col = label_column.resolve(table.columns, table.header);

  Dataset data;
  data.features = Matrix(table.rows.size(), table.columns - 1);
  data.labels.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const auto line = table.line_numbers[r];
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_col) {
        auto y = detail::parse_int(cells[c]);
        if (!y) {
          throw parse_error(path + ": row " + std::to_string(line) + ", column " + std::to_string(c + 1) +
                            ": label '" + cells[c] + "' is not an integer");
        }
        data.labels.push_back(*y);
      } else {
        data.features(r, out_col++) = detail::parse_feature_cell(path, line, c, cells[c]);
      }
    }
  }
  return data;
}

/// Reads a feature-only table (prediction input). Zero data rows is allowed.
/// When `drop_column` is set that column is discarded (e.g. a label column).
inline Matrix load_features_csv(const std::string& path, const std::optional<LabelColumn>& drop_column = std::nullopt) {
  auto table = detail::read_csv_table(path);
  std::optional<std::size_t> drop;
  if (drop_column && table.columns > 0) drop = drop_column->resolve(table.columns, table.header);
  const std::size_t width = table.columns - (drop ? 1 : 0);
  Matrix x(table.rows.size(), width);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < table.columns; ++c) {
      if (drop && c == *drop) continue;
      x(r, out_col++) = detail::parse_feature_cell(path, table.line_numbers[r], c, table.rows[r][c]);
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Scaling

/// Per-feature range observed on a training split.
struct ScalingParams {
  Vector min;
  Vector max;

  [[nodiscard]] std::size_t dims() const noexcept { return min.size(); }

  /// Maps one raw feature vector into the scaled space.
  [[nodiscard]] Vector apply(std::span<const double> x) const {
    if (x.size() != min.size()) {
      throw dimension_error("expected " + std::to_string(min.size()) + " features, got " + std::to_string(x.size()));
    }
    Vector out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double range = max[j] - min[j];
      out[j] = range > 0.0 ? 2.0 * (x[j] - min[j]) / range - 1.0 : 0.0;
    }
    return out;
  }

  friend bool operator==(const ScalingParams&, const ScalingParams&) = default;
};

inline ScalingParams fit_scaling(const Matrix& x) {
  if (x.rows() == 0) throw invalid_argument("cannot fit scaling on an empty matrix");
  ScalingParams p{Vector(x.row(0).begin(), x.row(0).end()), Vector(x.row(0).begin(), x.row(0).end())};
  for (std::size_t i = 1; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      p.min[j] = std::min(p.min[j], x(i, j));
      p.max[j] = std::max(p.max[j], x(i, j));
    }
  }
  return p;
}

inline ScalingParams fit_scaling(const Dataset& train) { return fit_scaling(train.features); }

/// 2(x - min)/(max - min) - 1 per feature; constant features map to 0. No clamping,
/// so held-out values outside the training range land outside [-1, 1].
inline Matrix apply_scaling(const Matrix& x, const ScalingParams& params) {
  if (x.cols() != params.dims()) {
    throw dimension_error("scaling fitted on " + std::to_string(params.dims()) + " features, data has " +
                          std::to_string(x.cols()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto scaled = params.apply(x.row(i));
    std::copy(scaled.begin(), scaled.end(), out.row(i).begin());
  }
  return out;
}

inline Dataset apply_scaling(const Dataset& data, const ScalingParams& params) {
  return Dataset{apply_scaling(data.features, params), data.labels};
}

/// Appends a constant-1 column (intercept feature).
inline Matrix append_bias_column(const Matrix& x) {
  Matrix out(x.rows(), x.cols() + 1, 1.0);
  for (std::size_t i = 0; i < x.rows(); ++i) std::copy(x.row(i).begin(), x.row(i).end(), out.row(i).begin());
  return out;
}

// ---------------------------------------------------------------------------
// Folds

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // fold index per sample
  std::uint64_t seed = 0;

  [[nodiscard]] std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i] == fold) out.push_back(i);
    return out;
  }

  [[nodiscard]] std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i] != fold) out.push_back(i);
    return out;
  }
};

namespace detail {

inline void check_fold_count(std::size_t n, std::size_t k) {
  if (k < 2) throw invalid_argument("fold count must be at least 2, got " + std::to_string(k));
  if (k > n) {
    throw invalid_argument("fold count " + std::to_string(k) + " exceeds sample count " + std::to_string(n));
  }
}

}  // namespace detail

/// Random partition into k folds whose sizes differ by at most one.
inline FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  detail::check_fold_count(n, k);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  FoldPlan plan{k, std::vector<std::size_t>(n), seed};
  for (std::size_t pos = 0; pos < n; ++pos) plan.assignments[order[pos]] = pos % k;
  return plan;
}

/// Stratified variant: each class is shuffled and dealt round-robin, continuing
/// the fold counter across classes so overall fold sizes stay balanced.
inline FoldPlan make_stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  detail::check_fold_count(labels.size(), k);
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::mt19937_64 rng(seed);
  FoldPlan plan{k, std::vector<std::size_t>(labels.size()), seed};
  std::size_t counter = 0;
  for (auto& [label, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto i : members) plan.assignments[i] = counter++ % k;
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Synthetic data

/// Two unit-variance isotropic Gaussian clusters (labels +1 / -1) whose means are
/// `separation` apart along the diagonal, with round(noise_rate * 2n) labels flipped.
inline Dataset make_synthetic_gaussians(std::size_t n_per_class, std::size_t d, double separation, double noise_rate,
                                        std::uint64_t seed) {
  if (n_per_class < 1 || d < 1) throw invalid_argument("synthetic data needs n_per_class >= 1 and d >= 1");
  if (!(noise_rate >= 0.0 && noise_rate < 0.5)) throw invalid_argument("noise_rate must lie in [0, 0.5)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double offset = separation / (2.0 * std::sqrt(static_cast<double>(d)));
  const std::size_t n = 2 * n_per_class;

  Dataset data{Matrix(n, d), Labels(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i % 2 == 0 ? 1 : -1;
    data.labels[i] = y;
    for (std::size_t j = 0; j < d; ++j) data.features(i, j) = y * offset + normal(rng);
  }
  const auto flips = static_cast<std::size_t>(std::llround(noise_rate * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t t = 0; t < flips; ++t) data.labels[order[t]] = -data.labels[order[t]];
  return data;
}

/// `classes` unit-variance Gaussian clusters with labels 0..C-1. Cluster c is
/// centred at `separation` along axis c mod d.
inline Dataset make_synthetic_clusters(std::size_t n_per_class, std::size_t d, std::size_t classes, double separation,
                                       std::uint64_t seed) {
  if (n_per_class < 1 || d < 1 || classes < 2) {
    throw invalid_argument("synthetic clusters need n_per_class >= 1, d >= 1, classes >= 2");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = n_per_class * classes;
  Dataset data{Matrix(n, d), Labels(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = i % classes;
    data.labels[i] = static_cast<int>(c);
    for (std::size_t j = 0; j < d; ++j) data.features(i, j) = (j == c % d ? separation : 0.0) + normal(rng);
  }
  return data;
}

}  // namespace mmi
