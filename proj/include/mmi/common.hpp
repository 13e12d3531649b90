#pragma once

// Shared vocabulary for the mmi library: dense row-major matrices, weight
// vectors, and the exception hierarchy every module reports through.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmi {

using Vector = std::vector<double>;
using Labels = std::vector<int>;

/// Base class of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (CSV row/column or model JSON).
class parse_error : public error {
 public:
  using error::error;
};

/// Feature-count mismatch between data, scaling and weights.
class dimension_error : public error {
 public:
  using error::error;
};

/// Violated precondition on arguments (bad fold count, missing class, ...).
class invalid_argument : public error {
 public:
  using error::error;
};

/// Numerical failure during training (non-finite objective or gradient).
class numeric_error : public error {
 public:
  using error::error;
};

/// Dense row-major matrix; rows are samples, columns are features.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) throw dimension_error("row width does not match matrix columns");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw dimension_error("dot product of vectors with different lengths");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double squared_norm(std::span<const double> v) { return dot(v, v); }

inline double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

/// f = X w for every row of X.
inline Vector responses_of(const Matrix& x, std::span<const double> w) {
  if (x.cols() != w.size()) {
    throw dimension_error("weight vector has " + std::to_string(w.size()) + " entries, data has " +
                          std::to_string(x.cols()) + " features");
  }
  Vector f(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) f[i] = dot(x.row(i), w);
  return f;
}

inline bool all_finite(std::span<const double> v) {
  for (double e : v)
    if (!std::isfinite(e)) return false;
  return true;
}

}  // namespace mmi
