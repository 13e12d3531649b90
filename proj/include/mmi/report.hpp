#pragma once

// Text serialisation of curves, traces and cross-validation results. Doubles are
// always written in shortest round-trip form so outputs are diff-stable and
// parse back to the identical value.

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "mmi/classifier.hpp"
#include "mmi/cross_validation.hpp"
#include "mmi/metrics.hpp"
#include "mmi/optimizer.hpp"

namespace mmi {

/// Shortest decimal that round-trips; "inf" / "-inf" / "nan" for non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

/// Undefined rates are written as the literal "undefined".
inline std::string format_rate(const Rate& r) { return r ? format_double(*r) : "undefined"; }

inline nlohmann::json rate_to_json(const Rate& r) { return r ? nlohmann::json(*r) : nlohmann::json(nullptr); }

/// JSON has no infinity; the open-ended start threshold is written as null.
inline nlohmann::json threshold_to_json(double t) { return std::isfinite(t) ? nlohmann::json(t) : nlohmann::json(nullptr); }

inline void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve.points)
    out << format_double(p.threshold) << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
}

inline void write_pr_csv(std::ostream& out, const std::vector<PrPoint>& curve) {
  out << "threshold,recall,precision\n";
  for (const auto& p : curve)
    out << format_double(p.threshold) << ',' << format_double(p.recall) << ',' << format_rate(p.precision) << '\n';
}

inline nlohmann::json roc_to_json(const RocCurve& curve) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : curve.points) points.push_back({{"threshold", threshold_to_json(p.threshold)}, {"fpr", p.fpr}, {"tpr", p.tpr}});
  return {{"auc", curve.auc}, {"points", points}};
}

inline nlohmann::json pr_to_json(const std::vector<PrPoint>& curve) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : curve) {
    points.push_back({{"threshold", threshold_to_json(p.threshold)}, {"recall", p.recall}, {"precision", rate_to_json(p.precision)}});
  }
  return points;
}

inline nlohmann::json trace_record_to_json(const TraceRecord& r) {
  return {{"iteration", r.iteration},     {"objective", r.terms.objective}, {"loss", r.terms.loss},
          {"l2", r.terms.l2},             {"mi", r.terms.mi},               {"grad_norm", r.grad_norm},
          {"exp_saturated", r.exp_saturated}, {"w", r.w}};
}

/// One JSON object per line; `cls` tags records of one-vs-all submodels.
inline void write_trace_jsonl(std::ostream& out, const TrainTrace& trace, std::optional<std::size_t> cls = std::nullopt) {
  for (const auto& r : trace.records) {
    auto j = trace_record_to_json(r);
    if (cls) j["class"] = *cls;
    out << j.dump() << '\n';
  }
}

inline nlohmann::json summary_to_json(const std::optional<SummaryStats>& s) {
  if (!s) return nullptr;
  return {{"mean", s->mean}, {"stddev", s->stddev}, {"count", s->count}};
}

inline nlohmann::json fold_to_json(const FoldResult& f) {
  return {{"fold", f.fold},
          {"n_train", f.n_train},
          {"n_test", f.test_indices.size()},
          {"auc", f.auc ? nlohmann::json(*f.auc) : nlohmann::json(nullptr)},
          {"accuracy", f.accuracy},
          {"sigma", f.sigma}};
}

inline nlohmann::json cv_result_to_json(const CvResult& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) folds.push_back(fold_to_json(f));
  return {{"folds", folds},
          {"auc", summary_to_json(r.auc)},
          {"accuracy", summary_to_json(r.accuracy)},
          {"pooled_auc", r.pooled_auc ? nlohmann::json(*r.pooled_auc) : nlohmann::json(nullptr)}};
}

}  // namespace mmi
