#pragma once

// k-fold cross validation: each fold is held out in turn, the classifier (and
// its scaling) is refitted on the remaining folds and scored on the held-out one.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mmi/classifier.hpp"
#include "mmi/data.hpp"
#include "mmi/metrics.hpp"

namespace mmi {

struct CvOptions {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  bool stratified = false;
  bool multiclass = false;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t n_train = 0;
  std::vector<std::size_t> test_indices;
  /// Binary: w.x per test sample. Multiclass: the winning class response.
  Vector responses;
  Labels predicted;
  Labels actual;
  /// Undefined when the held-out fold contains a single class.
  std::optional<double> auc;
  double accuracy = 0.0;
  double sigma = 0.0;
};

struct SummaryStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
  std::size_t count = 0;
};

inline std::optional<SummaryStats> summarize(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  SummaryStats s;
  s.count = values.size();
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

struct CvResult {
  std::vector<FoldResult> folds;
  std::optional<SummaryStats> auc;       // over folds with a defined AUC (binary)
  std::optional<SummaryStats> accuracy;  // over all folds
  std::optional<double> pooled_auc;      // AUC of all held-out responses together (binary)
};

namespace detail {

inline void require_training_classes(const Dataset& train, std::size_t fold, bool multiclass, std::size_t classes) {
  if (multiclass) {
    std::vector<std::size_t> counts(classes, 0);
    for (int y : train.labels) ++counts[static_cast<std::size_t>(y)];
    for (std::size_t c = 0; c < classes; ++c) {
      if (counts[c] == 0) {
        throw invalid_argument("fold " + std::to_string(fold) + ": training split has no samples of class " +
                               std::to_string(c));
      }
    }
    return;
  }
  auto [pos, neg] = class_sizes(train.labels);
  if (pos == 0 || neg == 0) {
    throw invalid_argument("fold " + std::to_string(fold) + ": training split is missing a class");
  }
}

}  // namespace detail

inline FoldPlan plan_folds(const Dataset& data, const CvOptions& options) {
  return options.stratified ? make_stratified_folds(data.labels, options.k, options.seed)
                            : make_folds(data.size(), options.k, options.seed);
}

/// Runs one training per fold of `plan`. Binary datasets are scored by AUC and
/// accuracy, multiclass (one-vs-all) datasets by accuracy.
inline CvResult cross_validate(const Dataset& data, const TrainConfig& config, const FoldPlan& plan,
                               bool multiclass) {
  data.validate();
  if (plan.assignments.size() != data.size()) throw dimension_error("fold plan does not match dataset size");
  if (!multiclass) require_binary(data);
  const std::size_t classes = multiclass ? data.class_count() : 2;

  CvResult result;
  Vector pooled_responses;
  Labels pooled_actual;
  for (std::size_t fold = 0; fold < plan.k; ++fold) {
    const auto train_idx = plan.train_indices(fold);
    const auto test_idx = plan.test_indices(fold);
    const auto train = data.subset(train_idx);
    const auto test = data.subset(test_idx);
    detail::require_training_classes(train, fold, multiclass, classes);

    FoldResult fr;
    fr.fold = fold;
    fr.n_train = train_idx.size();
    fr.test_indices = test_idx;
    fr.actual = test.labels;
    if (multiclass) {
      const auto model = fit_one_vs_all(train, config);
      fr.sigma = model.classes.front().sigma.value();
      for (std::size_t i = 0; i < test.size(); ++i) {
        const auto r = class_responses(model, test.features.row(i));
        const int c = predict_multiclass(model, test.features.row(i));
        fr.predicted.push_back(c);
        fr.responses.push_back(r[static_cast<std::size_t>(c)]);
      }
    } else {
      const auto model = fit_binary(train, config);
      fr.sigma = model.sigma.value();
      fr.responses = responses(model, test.features);
      for (double r : fr.responses) fr.predicted.push_back(r >= 0.0 ? 1 : -1);
      auto [pos, neg] = class_sizes(test.labels);
      if (pos > 0 && neg > 0) fr.auc = auc(fr.responses, test.labels);
      pooled_responses.insert(pooled_responses.end(), fr.responses.begin(), fr.responses.end());
      pooled_actual.insert(pooled_actual.end(), test.labels.begin(), test.labels.end());
    }
    fr.accuracy = accuracy(fr.predicted, fr.actual);
    result.folds.push_back(std::move(fr));
  }

  Vector aucs, accs;
  for (const auto& f : result.folds) {
    if (f.auc) aucs.push_back(*f.auc);
    accs.push_back(f.accuracy);
  }
  result.auc = summarize(aucs);
  result.accuracy = summarize(accs);
  if (!multiclass) result.pooled_auc = auc(pooled_responses, pooled_actual);
  return result;
}

inline CvResult cross_validate(const Dataset& data, const TrainConfig& config, const CvOptions& options) {
  data.validate();
  return cross_validate(data, config, plan_folds(data, options), options.multiclass);
}

}  // namespace mmi
