#pragma once

// Composite objective
//   O(w) = (1/n) sum_i L(w.x_i, y_i) + (alpha/2) |w|^2 - beta I(w)
// and fixed-step gradient descent w <- w - eta grad O(w).

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mmi/common.hpp"
#include "mmi/data.hpp"
#include "mmi/kde_mi.hpp"
#include "mmi/losses.hpp"

namespace mmi {

/// sigma given directly.
struct FixedSigma {
  double sigma = 1.0;
  friend bool operator==(const FixedSigma&, const FixedSigma&) = default;
};

/// sigma = varsigma * median pairwise Euclidean distance of the training samples.
struct MedianScaledSigma {
  double varsigma = 0.451;
  friend bool operator==(const MedianScaledSigma&, const MedianScaledSigma&) = default;
};

using SigmaPolicy = std::variant<FixedSigma, MedianScaledSigma>;

enum class InitKind { Zeros, SeededRandom };

struct InitPolicy {
  InitKind kind = InitKind::Zeros;
  double scale = 0.01;  // stddev of the Gaussian draw for SeededRandom
  std::uint64_t seed = 0;
  friend bool operator==(const InitPolicy&, const InitPolicy&) = default;
};

struct TrainConfig {
  LossKind loss = LossKind::Hinge;
  /// false drops the loss term entirely (the MI-only regularisation case).
  bool use_loss = true;
  double alpha = 5.8;
  double beta = 44.8;
  double eta = 1e-3;
  SigmaPolicy sigma = MedianScaledSigma{0.451};
  std::size_t max_iters = 1000;
  double grad_tol = 1e-6;
  InitPolicy init;
  /// Append a constant-1 feature after scaling (an intercept; not part of f = w.x proper).
  bool augment_bias = false;

  void validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw invalid_argument("alpha must be >= 0");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw invalid_argument("beta must be >= 0");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw invalid_argument("eta must be > 0");
    if (max_iters < 1) throw invalid_argument("max_iters must be >= 1");
    if (!(grad_tol >= 0.0)) throw invalid_argument("grad_tol must be >= 0");
    if (const auto* f = std::get_if<FixedSigma>(&sigma); f && !(f->sigma > 0.0)) {
      throw invalid_argument("fixed sigma must be > 0");
    }
    if (const auto* m = std::get_if<MedianScaledSigma>(&sigma); m && !(m->varsigma > 0.0)) {
      throw invalid_argument("varsigma must be > 0");
    }
    if (init.kind == InitKind::SeededRandom && !(init.scale >= 0.0)) throw invalid_argument("init scale must be >= 0");
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Median over all n(n-1)/2 pairwise Euclidean distances between rows.
inline double median_pairwise_distance(const Matrix& x) {
  const std::size_t n = x.rows();
  if (n < 2) throw invalid_argument("median pairwise distance needs at least two samples");
  std::vector<double> dist;
  dist.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < x.cols(); ++m) {
        const double diff = x(i, m) - x(j, m);
        s += diff * diff;
      }
      dist.push_back(std::sqrt(s));
    }
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  const double upper = dist[mid];
  if (dist.size() % 2 == 1) return upper;
  const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

/// Resolved once per training run from feature-space distances; independent of w.
inline Bandwidth resolve_sigma(const Matrix& x, const SigmaPolicy& policy) {
  if (const auto* fixed = std::get_if<FixedSigma>(&policy)) {
    if (!(fixed->sigma > 0.0)) throw invalid_argument("fixed sigma must be > 0");
    return Bandwidth(fixed->sigma);
  }
  const auto& scaled = std::get<MedianScaledSigma>(policy);
  if (!(scaled.varsigma > 0.0)) throw invalid_argument("varsigma must be > 0");
  const double median = median_pairwise_distance(x);
  if (!(median > 0.0)) throw invalid_argument("degenerate bandwidth: median pairwise distance is 0");
  return Bandwidth(scaled.varsigma * median);
}

inline Bandwidth resolve_sigma(const Dataset& data, const SigmaPolicy& policy) {
  return resolve_sigma(data.features, policy);
}

/// Objective value and its parts. `l2` is the raw |w|^2.
struct ObjectiveTerms {
  double objective = 0.0;
  double loss = 0.0;
  double l2 = 0.0;
  double mi = 0.0;
};

inline double combine_terms(const ObjectiveTerms& t, const TrainConfig& config) {
  return t.loss + config.alpha / 2.0 * t.l2 - config.beta * t.mi;
}

/// Anything that evaluates the MI value and gradient the way evaluate_mutual_information does.
template <typename T>
concept MiTermLike = requires(const T& term, const Matrix& x, std::span<const int> y, std::span<const double> w,
                              Bandwidth sigma) {
  { term(x, y, w, sigma) } -> std::convertible_to<MiEvaluation>;
};

/// Default MI term: the KDE plug-in estimate.
struct KdeMiTerm {
  MiEvaluation operator()(const Matrix& x, std::span<const int> labels, std::span<const double> w,
                          Bandwidth sigma) const {
    return evaluate_mutual_information(x, labels, w, sigma);
  }
};

struct Evaluation {
  ObjectiveTerms terms;
  Vector gradient;
  bool exp_saturated = false;
};

/// Objective and total gradient (1/n) sum grad L_i + alpha w - beta grad I at w.
/// For hinge, tau is recomputed at w first. With beta = 0 the MI term is not evaluated.
template <MiTermLike MiTerm = KdeMiTerm>
Evaluation evaluate_objective(const Dataset& data, std::span<const double> w, const TrainConfig& config,
                              Bandwidth sigma, const MiTerm& mi_term = {}) {
  const auto& x = data.features;
  if (w.size() != x.cols()) throw dimension_error("weight vector length does not match feature count");
  const std::size_t n = x.rows();
  Evaluation out{{}, Vector(x.cols(), 0.0), false};

  if (config.use_loss) {
    const auto f = responses_of(x, w);
    std::optional<HingeState> hinge;
    if (config.loss == LossKind::Hinge) hinge = update_hinge_state(x, data.labels, w);
    double loss_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int y = data.labels[i];
      loss_sum += loss_value(config.loss, f[i], y);
      if (config.loss == LossKind::Exponential && exp_saturates(f[i], y)) out.exp_saturated = true;
      std::optional<std::uint8_t> tau;
      if (hinge) tau = hinge->tau[i];
      const double s = loss_derivative(config.loss, f[i], y, tau) / static_cast<double>(n);
      auto row = x.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) out.gradient[j] += s * row[j];
    }
    out.terms.loss = loss_sum / static_cast<double>(n);
  }

  out.terms.l2 = squared_norm(w);
  for (std::size_t j = 0; j < w.size(); ++j) out.gradient[j] += config.alpha * w[j];

  if (config.beta != 0.0) {
    auto mi = mi_term(x, data.labels, w, sigma);
    out.terms.mi = mi.estimate.mi;
    for (std::size_t j = 0; j < w.size(); ++j) out.gradient[j] -= config.beta * mi.gradient[j];
  }
  out.terms.objective = combine_terms(out.terms, config);
  return out;
}

inline ObjectiveTerms objective(const Dataset& data, std::span<const double> w, const TrainConfig& config,
                                Bandwidth sigma) {
  return evaluate_objective(data, w, config, sigma).terms;
}

inline Vector total_gradient(const Dataset& data, std::span<const double> w, const TrainConfig& config,
                             Bandwidth sigma) {
  return evaluate_objective(data, w, config, sigma).gradient;
}

enum class Termination { GradTol, MaxIters };

inline std::string_view to_string(Termination t) { return t == Termination::GradTol ? "grad_tol" : "max_iters"; }

/// One gradient-descent iteration, evaluated at the iterate `w` before stepping.
struct TraceRecord {
  std::size_t iteration = 0;
  ObjectiveTerms terms;
  double grad_norm = 0.0;
  Vector w;
  bool exp_saturated = false;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  Vector final_w;
  Termination reason = Termination::MaxIters;
  Bandwidth sigma{1.0};
};

inline Vector initial_weights(std::size_t d, const InitPolicy& init) {
  Vector w(d, 0.0);
  if (init.kind == InitKind::SeededRandom) {
    std::mt19937_64 rng(init.seed);
    std::normal_distribution<double> normal(0.0, init.scale);
    for (double& e : w) e = normal(rng);
  }
  return w;
}

/// Plain fixed-step gradient descent with a known bandwidth.
///
/// Each iteration recomputes tau (hinge), evaluates the gradient, records the
/// trace entry, then steps. Stops once |grad| <= grad_tol (without stepping) or
/// after max_iters records. Any non-finite objective term or gradient aborts.
template <MiTermLike MiTerm = KdeMiTerm>
TrainTrace train(const Dataset& data, const TrainConfig& config, Bandwidth sigma, const MiTerm& mi_term = {}) {
  config.validate();
  data.validate();
  require_binary(data);
  if (config.beta > 0.0) {
    auto [pos, neg] = class_sizes(data.labels);
    if (pos == 0 || neg == 0) throw invalid_argument("mutual information term needs both classes present");
  }

  TrainTrace trace;
  trace.sigma = sigma;
  Vector w = initial_weights(data.dims(), config.init);
  trace.records.reserve(std::min<std::size_t>(config.max_iters, 4096));

  for (std::size_t it = 0; it < config.max_iters; ++it) {
    auto eval = evaluate_objective(data, w, config, sigma, mi_term);
    const auto& t = eval.terms;
    for (auto [name, value] : {std::pair<std::string_view, double>{"loss", t.loss}, {"l2", t.l2}, {"mi", t.mi},
                               {"objective", t.objective}}) {
      if (!std::isfinite(value)) {
        throw numeric_error("iteration " + std::to_string(it) + ": " + std::string(name) +
                            " term is not finite (eta too large or sigma pathological)");
      }
    }
    if (!all_finite(eval.gradient)) {
      throw numeric_error("iteration " + std::to_string(it) +
                          ": gradient is not finite (eta too large or sigma pathological)");
    }
    const double gnorm = norm(eval.gradient);
    trace.records.push_back(TraceRecord{it, t, gnorm, w, eval.exp_saturated});
    if (gnorm <= config.grad_tol) {
      trace.reason = Termination::GradTol;
      trace.final_w = w;
      return trace;
    }
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= config.eta * eval.gradient[j];
  }
  trace.reason = Termination::MaxIters;
  trace.final_w = w;
  return trace;
}

/// Resolves sigma from the data with the configured policy, then trains.
template <MiTermLike MiTerm = KdeMiTerm>
TrainTrace train(const Dataset& data, const TrainConfig& config, const MiTerm& mi_term = {}) {
  return train(data, config, resolve_sigma(data, config.sigma), mi_term);
}

}  // namespace mmi
