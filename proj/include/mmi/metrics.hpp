#pragma once

// Confusion counts, TPR/FPR/recall/precision, ROC and recall-precision sweeps,
// trapezoidal AUC and accuracy.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "mmi/common.hpp"

namespace mmi {

/// +1 is the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  [[nodiscard]] std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// A ratio whose denominator may be zero; nullopt marks 0/0.
using Rate = std::optional<double>;

struct Rates {
  Rate tpr;
  Rate fpr;
  Rate recall;
  Rate precision;
};

inline ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) throw dimension_error("predicted and actual labels differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const bool pred_pos = predicted[i] > 0;
    const bool act_pos = actual[i] > 0;
    if (pred_pos && act_pos) ++c.tp;
    else if (pred_pos) ++c.fp;
    else if (act_pos) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace detail {
inline Rate ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace detail

inline Rates rates(const ConfusionCounts& c) {
  const auto tpr = detail::ratio(c.tp, c.tp + c.fn);
  return Rates{tpr, detail::ratio(c.fp, c.fp + c.tn), tpr, detail::ratio(c.tp, c.tp + c.fp)};
}

inline double accuracy(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) throw dimension_error("predicted and actual labels differ in length");
  if (actual.empty()) throw invalid_argument("accuracy of an empty label set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) hits += predicted[i] == actual[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(actual.size());
}

// ---------------------------------------------------------------------------
// Threshold sweeps

namespace detail {

/// Cumulative (tp, fp) after admitting each group of tied responses, scanning
/// from the largest response down. A sample is predicted positive when its
/// response is >= the threshold.
struct SweepStep {
  double threshold;
  std::size_t tp;
  std::size_t fp;
};

struct Sweep {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<SweepStep> steps;
};

inline Sweep threshold_sweep(std::span<const double> responses, std::span<const int> actual) {
  if (responses.size() != actual.size()) throw dimension_error("responses and labels differ in length");
  if (!all_finite(responses)) throw invalid_argument("responses must be finite");
  std::vector<std::size_t> order(responses.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return responses[a] > responses[b]; });
  Sweep sweep;
  for (int y : actual) (y > 0 ? sweep.positives : sweep.negatives)++;
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double t = responses[order[k]];
    while (k < order.size() && responses[order[k]] == t) {
      (actual[order[k]] > 0 ? tp : fp)++;
      ++k;
    }
    sweep.steps.push_back({t, tp, fp});
  }
  return sweep;
}

}  // namespace detail

struct RocPoint {
  double threshold;  // +inf for the (0, 0) start
  double fpr;
  double tpr;
};

/// Points run from (0, 0) to (1, 1) with both rates nondecreasing. Tied
/// responses form one diagonal step, so the trapezoidal area equals the
/// Mann-Whitney statistic with ties counted one half.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

inline RocCurve roc_curve(std::span<const double> responses, std::span<const int> actual) {
  auto sweep = detail::threshold_sweep(responses, actual);
  if (sweep.positives == 0 || sweep.negatives == 0) throw invalid_argument("ROC needs both classes present");
  const double p = static_cast<double>(sweep.positives);
  const double q = static_cast<double>(sweep.negatives);
  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  // Twice the area in units of one positive-negative pair, kept integral so the
  // final division is the only rounding.
  std::uint64_t twice_area = 0;
  std::size_t prev_tp = 0, prev_fp = 0;
  for (const auto& s : sweep.steps) {
    twice_area += static_cast<std::uint64_t>(s.fp - prev_fp) * (s.tp + prev_tp);
    curve.points.push_back({s.threshold, static_cast<double>(s.fp) / q, static_cast<double>(s.tp) / p});
    prev_tp = s.tp;
    prev_fp = s.fp;
  }
  curve.auc = static_cast<double>(twice_area) / (2.0 * p * q);
  return curve;
}

inline double auc(std::span<const double> responses, std::span<const int> actual) {
  return roc_curve(responses, actual).auc;
}

struct PrPoint {
  double threshold;  // +inf for the start point
  double recall;
  Rate precision;    // nullopt when nothing is predicted positive
};

inline std::vector<PrPoint> pr_curve(std::span<const double> responses, std::span<const int> actual) {
  auto sweep = detail::threshold_sweep(responses, actual);
  if (sweep.positives == 0) throw invalid_argument("recall-precision curve needs positive samples");
  std::vector<PrPoint> curve;
  curve.push_back({std::numeric_limits<double>::infinity(), 0.0, std::nullopt});
  for (const auto& s : sweep.steps) {
    curve.push_back({s.threshold, static_cast<double>(s.tp) / static_cast<double>(sweep.positives),
                     detail::ratio(s.tp, s.tp + s.fp)});
  }
  return curve;
}

}  // namespace mmi
