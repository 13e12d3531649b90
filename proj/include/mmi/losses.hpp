#pragma once

// The four margin losses L(f, y) of a linear classifier with f = w.x, their
// gradients in w, and the hinge active-set indicator tau.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmi/common.hpp"
#include "mmi/data.hpp"

namespace mmi {

enum class LossKind { Hinge, Squared, Logistic, Exponential };

inline constexpr std::array<LossKind, 4> all_loss_kinds{LossKind::Hinge, LossKind::Squared, LossKind::Logistic,
                                                        LossKind::Exponential};

inline std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Hinge: return "hinge";
    case LossKind::Squared: return "squared";
    case LossKind::Logistic: return "logistic";
    case LossKind::Exponential: return "exponential";
  }
  return "unknown";
}

inline LossKind parse_loss_kind(std::string_view name) {
  for (auto kind : all_loss_kinds)
    if (to_string(kind) == name) return kind;
  throw invalid_argument("unknown loss '" + std::string(name) + "' (expected hinge|squared|logistic|exponential)");
}

inline bool is_smooth(LossKind kind) { return kind != LossKind::Hinge; }

/// Exponential-loss arguments above this are clamped to keep exp() finite.
inline constexpr double exp_argument_cap = 700.0;

/// True when exp(-y f) had to be clamped at exp_argument_cap.
inline bool exp_saturates(double f, int y) { return -static_cast<double>(y) * f > exp_argument_cap; }

namespace detail {

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

/// exp(z) / (1 + exp(z)) without overflow.
inline double logistic_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

inline double loss_value(LossKind kind, double f, int y) {
  const double margin = static_cast<double>(y) * f;
  switch (kind) {
    case LossKind::Hinge: return std::max(0.0, 1.0 - margin);
    case LossKind::Squared: return (1.0 - margin) * (1.0 - margin);
    case LossKind::Logistic: return detail::softplus(-margin);
    case LossKind::Exponential: return std::exp(std::min(-margin, exp_argument_cap));
  }
  return 0.0;
}

/// Hinge active set: tau_i = 1 iff y_i w.x_i <= 1.
struct HingeState {
  std::vector<std::uint8_t> tau;
};

inline HingeState update_hinge_state(const Matrix& x, std::span<const int> labels, std::span<const double> w) {
  if (labels.size() != x.rows()) throw dimension_error("labels and data differ in length");
  HingeState state{std::vector<std::uint8_t>(x.rows())};
  for (std::size_t i = 0; i < x.rows(); ++i) state.tau[i] = labels[i] * dot(x.row(i), w) <= 1.0 ? 1 : 0;
  return state;
}

inline HingeState update_hinge_state(const Dataset& data, std::span<const double> w) {
  require_binary(data);
  return update_hinge_state(data.features, data.labels, w);
}

/// Scalar s such that grad_w L(w.x, y) = s * x.
///
/// Hinge: -tau y with tau frozen from the current iterate (a subgradient).
/// Squared: -2 (1 - y f) y, the exact derivative of (1 - y f)^2.
/// Logistic: -sigmoid(-y f) y. Exponential: -exp(-y f) y, clamped like loss_value.
inline double loss_derivative(LossKind kind, double f, int y, std::optional<std::uint8_t> tau = std::nullopt) {
  const double yd = static_cast<double>(y);
  const double margin = yd * f;
  switch (kind) {
    case LossKind::Hinge:
      if (!tau) throw invalid_argument("hinge gradient requires the hinge state tau");
      return *tau ? -yd : 0.0;
    case LossKind::Squared: return -2.0 * (1.0 - margin) * yd;
    case LossKind::Logistic: return -detail::logistic_sigmoid(-margin) * yd;
    case LossKind::Exponential: return -std::exp(std::min(-margin, exp_argument_cap)) * yd;
  }
  return 0.0;
}

inline Vector loss_gradient(LossKind kind, std::span<const double> x, int y, std::span<const double> w,
                            std::optional<std::uint8_t> tau = std::nullopt) {
  const double s = loss_derivative(kind, dot(x, w), y, tau);
  Vector g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = s * x[j];
  return g;
}

}  // namespace mmi
