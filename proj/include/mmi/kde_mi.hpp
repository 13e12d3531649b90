#pragma once

// Gaussian-kernel density estimates over classification responses f_i = w.x_i,
// the plug-in entropies H(f) and H(f|y), the mutual information estimate
// I(w) = H(f) - H(f|y), and its analytic gradient with respect to w.
//
// Note on the estimator forms. The kernel is the unnormalised
// K(z) = exp(-z^2 / (2 sigma^2)) and the entropy is the unweighted sum
// H(f) = -sum_i p(f_i) log p(f_i). Textbook resubstitution estimators use a
// normalised kernel and a 1/n weight; the literal forms are kept here because
// the gradient below is the exact derivative of them. Every density then lies
// in [1/n, 1] (self term plus kernel values <= 1), so both entropies are >= 0.
// Logarithms are natural (nats).

#include <cassert>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mmi/common.hpp"
#include "mmi/data.hpp"

namespace mmi {

/// Kernel width in response units; always strictly positive.
class Bandwidth {
 public:
  explicit Bandwidth(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw invalid_argument("bandwidth must be a positive finite number, got " + std::to_string(sigma));
    }
  }
  [[nodiscard]] double value() const noexcept { return sigma_; }
  friend bool operator==(const Bandwidth&, const Bandwidth&) = default;

 private:
  double sigma_;
};

/// Responses with the labels they belong to.
struct Responses {
  Vector values;
  Labels labels;

  Responses() = default;
  Responses(Vector v, Labels y) : values(std::move(v)), labels(std::move(y)) {
    if (values.size() != labels.size()) throw dimension_error("responses and labels differ in length");
    if (!all_finite(values)) throw invalid_argument("responses must be finite");
  }
  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// Entropies in nats; mi = h_f - h_f_given_y exactly.
struct MiEstimate {
  double h_f = 0.0;
  double h_f_given_y = 0.0;
  double mi = 0.0;
};

inline double gaussian_kernel(double z, Bandwidth sigma) {
  const double s = sigma.value();
  return std::exp(-(z * z) / (2.0 * s * s));
}

/// p(f_i) = (1/n) sum_j K(f_i - f_j), self term included.
inline double density_at(std::size_t i, std::span<const double> f, Bandwidth sigma) {
  if (i >= f.size()) throw invalid_argument("sample index out of range");
  double sum = 0.0;
  for (double fj : f) sum += gaussian_kernel(f[i] - fj, sigma);
  return sum / static_cast<double>(f.size());
}

/// p(f_i | y = c) = (1/n_c) sum_{j: y_j = c} K(f_i - f_j).
inline double conditional_density_at(std::size_t i, int c, const Responses& r, Bandwidth sigma) {
  if (i >= r.size()) throw invalid_argument("sample index out of range");
  double sum = 0.0;
  std::size_t members = 0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (r.labels[j] != c) continue;
    sum += gaussian_kernel(r.values[i] - r.values[j], sigma);
    ++members;
  }
  if (members == 0) throw invalid_argument("class " + std::to_string(c) + " has no members");
  return sum / static_cast<double>(members);
}

namespace detail {

inline double neg_p_log_p(double p) { return -p * std::log(p); }

/// Symmetric n x n kernel matrix of the responses.
inline std::vector<double> kernel_matrix(std::span<const double> f, Bandwidth sigma) {
  const std::size_t n = f.size();
  const double inv_two_var = 1.0 / (2.0 * sigma.value() * sigma.value());
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double z = f[i] - f[j];
      k[i * n + j] = k[j * n + i] = std::exp(-z * z * inv_two_var);
    }
  }
  return k;
}

/// Marginal and class-conditional densities at every sample, from a kernel matrix.
struct Densities {
  Vector marginal;
  Vector conditional;
  std::map<int, std::size_t> class_counts;
};

inline Densities densities_from_kernel(const std::vector<double>& k, std::span<const int> labels) {
  const std::size_t n = labels.size();
  Densities d{Vector(n), Vector(n), {}};
  for (int y : labels) ++d.class_counts[y];
  for (std::size_t i = 0; i < n; ++i) {
    double all = 0.0, same = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      all += k[i * n + j];
      if (labels[j] == labels[i]) same += k[i * n + j];
    }
    d.marginal[i] = all / static_cast<double>(n);
    d.conditional[i] = same / static_cast<double>(d.class_counts[labels[i]]);
    assert(d.marginal[i] >= 0.5 / static_cast<double>(n));
    assert(d.conditional[i] >= 0.5 / static_cast<double>(d.class_counts[labels[i]]));
  }
  return d;
}

inline MiEstimate estimate_from_densities(const Densities& d, std::span<const int> labels) {
  const double n = static_cast<double>(labels.size());
  MiEstimate est;
  // Accumulate each class separately so the n_c/n prior multiplies the class sum.
  std::map<int, double> class_sums;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    est.h_f += neg_p_log_p(d.marginal[i]);
    class_sums[labels[i]] += neg_p_log_p(d.conditional[i]);
  }
  for (const auto& [c, sum] : class_sums) est.h_f_given_y += static_cast<double>(d.class_counts.at(c)) / n * sum;
  est.mi = est.h_f - est.h_f_given_y;
  return est;
}

}  // namespace detail

/// H(f) = -sum_i p(f_i) log p(f_i).
inline double entropy_f(std::span<const double> f, Bandwidth sigma) {
  if (f.empty()) throw invalid_argument("entropy of an empty response set");
  double h = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) h += detail::neg_p_log_p(density_at(i, f, sigma));
  return h;
}

/// H(f|y) = -sum_c (n_c/n) sum_{i: y_i = c} p(f_i|c) log p(f_i|c), over the classes present.
inline double conditional_entropy_f(const Responses& r, Bandwidth sigma) {
  if (r.size() == 0) throw invalid_argument("conditional entropy of an empty response set");
  auto k = detail::kernel_matrix(r.values, sigma);
  auto d = detail::densities_from_kernel(k, r.labels);
  return detail::estimate_from_densities(d, r.labels).h_f_given_y;
}

inline MiEstimate mutual_information(const Responses& r, Bandwidth sigma) {
  if (r.size() == 0) throw invalid_argument("mutual information of an empty response set");
  auto k = detail::kernel_matrix(r.values, sigma);
  auto d = detail::densities_from_kernel(k, r.labels);
  return detail::estimate_from_densities(d, r.labels);
}

/// grad_w p(w.x_i) = 1/(n sigma^2) sum_j K_ij (f_i - f_j)(x_j - x_i).
inline Vector grad_density_at(std::size_t i, const Matrix& x, std::span<const double> w, Bandwidth sigma) {
  if (i >= x.rows()) throw invalid_argument("sample index out of range");
  const auto f = responses_of(x, w);
  const double s2 = sigma.value() * sigma.value();
  Vector g(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.rows(); ++j) {
    const double coeff = gaussian_kernel(f[i] - f[j], sigma) * (f[i] - f[j]);
    for (std::size_t m = 0; m < x.cols(); ++m) g[m] += coeff * (x(j, m) - x(i, m));
  }
  for (double& e : g) e /= static_cast<double>(x.rows()) * s2;
  return g;
}

/// Class-restricted variant of grad_density_at with the 1/(n_c sigma^2) prefactor.
inline Vector grad_conditional_density_at(std::size_t i, int c, const Matrix& x, std::span<const int> labels,
                                          std::span<const double> w, Bandwidth sigma) {
  if (i >= x.rows()) throw invalid_argument("sample index out of range");
  if (labels.size() != x.rows()) throw dimension_error("labels and data differ in length");
  const auto f = responses_of(x, w);
  const double s2 = sigma.value() * sigma.value();
  Vector g(x.cols(), 0.0);
  std::size_t members = 0;
  for (std::size_t j = 0; j < x.rows(); ++j) {
    if (labels[j] != c) continue;
    ++members;
    const double coeff = gaussian_kernel(f[i] - f[j], sigma) * (f[i] - f[j]);
    for (std::size_t m = 0; m < x.cols(); ++m) g[m] += coeff * (x(j, m) - x(i, m));
  }
  if (members == 0) throw invalid_argument("class " + std::to_string(c) + " has no members");
  for (double& e : g) e /= static_cast<double>(members) * s2;
  return g;
}

/// MI value and gradient from one kernel matrix.
struct MiEvaluation {
  MiEstimate estimate;
  Vector gradient;
};

/// Evaluates I(w) and
///   grad I = -sum_i (log p_i + 1) grad p_i + sum_c (n_c/n) sum_{i in c} (log p_i|c + 1) grad p_i|c.
///
/// Both grad p terms are sums of K_ij (f_i - f_j)(x_j - x_i) and the class prior
/// cancels the 1/n_c prefactor, so every pair (i, j) contributes a scalar
/// coefficient c_ij = K_ij (f_i - f_j) (b_i [y_i = y_j] - a_i) / (n sigma^2). The
/// d-vector sum then collapses to sum_k x_k (sum_i c_ik - sum_j c_kj): O(n^2 + nd).
inline MiEvaluation evaluate_mutual_information(const Matrix& x, std::span<const int> labels,
                                                std::span<const double> w, Bandwidth sigma) {
  const std::size_t n = x.rows();
  if (labels.size() != n) throw dimension_error("labels and data differ in length");
  if (n == 0) throw invalid_argument("mutual information of an empty dataset");
  const auto f = responses_of(x, w);
  const auto k = detail::kernel_matrix(f, sigma);
  const auto dens = detail::densities_from_kernel(k, labels);

  MiEvaluation out{detail::estimate_from_densities(dens, labels), Vector(x.cols(), 0.0)};

  Vector a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::log(dens.marginal[i]) + 1.0;
    b[i] = std::log(dens.conditional[i]) + 1.0;
  }
  const double scale = 1.0 / (static_cast<double>(n) * sigma.value() * sigma.value());
  Vector weight(n, 0.0);  // sum_i c_ik - sum_j c_kj
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double coeff = labels[i] == labels[j] ? b[i] - a[i] : -a[i];
      const double c = k[i * n + j] * (f[i] - f[j]) * coeff;
      weight[j] += c;
      weight[i] -= c;
    }
  }
  for (std::size_t m = 0; m < n; ++m) {
    const double s = weight[m] * scale;
    auto row = x.row(m);
    for (std::size_t q = 0; q < x.cols(); ++q) out.gradient[q] += s * row[q];
  }
  return out;
}

inline Vector grad_mutual_information(const Matrix& x, std::span<const int> labels, std::span<const double> w,
                                      Bandwidth sigma) {
  return evaluate_mutual_information(x, labels, w, sigma).gradient;
}

inline Vector grad_mutual_information(const Dataset& data, std::span<const double> w, Bandwidth sigma) {
  return grad_mutual_information(data.features, data.labels, w, sigma);
}

}  // namespace mmi
