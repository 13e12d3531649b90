#pragma once

// Binary and one-vs-all linear classifiers trained with the MI-regularised
// objective, plus JSON persistence.

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mmi/common.hpp"
#include "mmi/data.hpp"
#include "mmi/optimizer.hpp"

namespace mmi {

inline constexpr int model_format_version = 1;

/// sign(w.x) classifier over features scaled with `scaling`.
struct LinearModel {
  Vector w;
  ScalingParams scaling;
  TrainConfig config;
  Bandwidth sigma{1.0};
  bool bias = false;

  /// Raw feature count accepted by response().
  [[nodiscard]] std::size_t dims() const noexcept { return scaling.dims(); }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct OneVsAllModel {
  std::vector<LinearModel> classes;  // index = class label

  [[nodiscard]] std::size_t dims() const { return classes.empty() ? 0 : classes.front().dims(); }

  friend bool operator==(const OneVsAllModel&, const OneVsAllModel&) = default;
};

using AnyModel = std::variant<LinearModel, OneVsAllModel>;

/// Scales raw rows and appends the intercept column when requested.
inline Matrix prepare_features(const Matrix& raw, const ScalingParams& scaling, bool bias) {
  auto scaled = apply_scaling(raw, scaling);
  return bias ? append_bias_column(scaled) : scaled;
}

struct BinaryFit {
  LinearModel model;
  TrainTrace trace;
};

/// Trains on `train` with a scaling fitted elsewhere (shared one-vs-all scaling).
inline BinaryFit fit_binary_traced(const Dataset& train, const TrainConfig& config, const ScalingParams& scaling) {
  train.validate();
  require_binary(train);
  auto [pos, neg] = class_sizes(train.labels);
  if (pos == 0 || neg == 0) throw invalid_argument("training set contains a single class");
  config.validate();

  Dataset prepared{prepare_features(train.features, scaling, config.augment_bias), train.labels};
  // sigma comes from distances between the scaled samples, before any intercept column.
  const auto sigma =
      resolve_sigma(config.augment_bias ? apply_scaling(train.features, scaling) : prepared.features, config.sigma);
  auto trace = mmi::train(prepared, config, sigma);
  LinearModel model{trace.final_w, scaling, config, sigma, config.augment_bias};
  return {std::move(model), std::move(trace)};
}

inline BinaryFit fit_binary_traced(const Dataset& train, const TrainConfig& config) {
  train.validate();
  return fit_binary_traced(train, config, fit_scaling(train));
}

inline LinearModel fit_binary(const Dataset& train, const TrainConfig& config) {
  return fit_binary_traced(train, config).model;
}

inline double response(const LinearModel& model, std::span<const double> x) {
  auto scaled = model.scaling.apply(x);
  if (model.bias) scaled.push_back(1.0);
  return dot(scaled, model.w);
}

/// Zero response maps to +1.
inline int predict_binary(const LinearModel& model, std::span<const double> x) {
  return response(model, x) >= 0.0 ? 1 : -1;
}

inline Vector responses(const LinearModel& model, const Matrix& x) {
  if (x.cols() != model.dims()) {
    throw dimension_error("model expects " + std::to_string(model.dims()) + " features, input has " +
                          std::to_string(x.cols()));
  }
  Vector out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = response(model, x.row(i));
  return out;
}

struct OneVsAllFit {
  OneVsAllModel model;
  std::vector<TrainTrace> traces;
};

/// One binary problem per class (class c -> +1, rest -> -1), all sharing one scaling.
inline OneVsAllFit fit_one_vs_all_traced(const Dataset& train, const TrainConfig& config) {
  train.validate();
  const std::size_t classes = train.class_count();
  if (classes < 2) throw invalid_argument("one-vs-all needs at least two classes");
  std::vector<std::size_t> counts(classes, 0);
  for (int y : train.labels) ++counts[static_cast<std::size_t>(y)];
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) throw invalid_argument("class " + std::to_string(c) + " has no training samples");
  }
  const auto scaling = fit_scaling(train);
  OneVsAllFit out;
  for (std::size_t c = 0; c < classes; ++c) {
    Dataset relabelled{train.features, Labels(train.size())};
    for (std::size_t i = 0; i < train.size(); ++i) relabelled.labels[i] = train.labels[i] == static_cast<int>(c) ? 1 : -1;
    auto fit = fit_binary_traced(relabelled, config, scaling);
    out.model.classes.push_back(std::move(fit.model));
    out.traces.push_back(std::move(fit.trace));
  }
  return out;
}

inline OneVsAllModel fit_one_vs_all(const Dataset& train, const TrainConfig& config) {
  return fit_one_vs_all_traced(train, config).model;
}

/// Per-class responses; the scaled vector is computed once.
inline Vector class_responses(const OneVsAllModel& model, std::span<const double> x) {
  Vector out;
  out.reserve(model.classes.size());
  for (const auto& m : model.classes) out.push_back(response(m, x));
  return out;
}

/// Class with the largest response; ties go to the lowest index.
inline int predict_multiclass(const OneVsAllModel& model, std::span<const double> x) {
  if (model.classes.empty()) throw invalid_argument("empty one-vs-all model");
  const auto r = class_responses(model, x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < r.size(); ++c)
    if (r[c] > r[best]) best = c;
  return static_cast<int>(best);
}

// ---------------------------------------------------------------------------
// Persistence

inline nlohmann::json config_to_json(const TrainConfig& c) {
  nlohmann::json j;
  j["loss"] = std::string(to_string(c.loss));
  j["use_loss"] = c.use_loss;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["eta"] = c.eta;
  if (const auto* f = std::get_if<FixedSigma>(&c.sigma)) {
    j["sigma_policy"] = {{"kind", "fixed"}, {"sigma", f->sigma}};
  } else {
    j["sigma_policy"] = {{"kind", "median_scaled"}, {"varsigma", std::get<MedianScaledSigma>(c.sigma).varsigma}};
  }
  j["max_iters"] = c.max_iters;
  j["grad_tol"] = c.grad_tol;
  j["init"] = {{"kind", c.init.kind == InitKind::Zeros ? "zeros" : "seeded_random"},
               {"scale", c.init.scale},
               {"seed", c.init.seed}};
  j["augment_bias"] = c.augment_bias;
  return j;
}

inline TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.loss = parse_loss_kind(j.at("loss").get<std::string>());
  c.use_loss = j.at("use_loss").get<bool>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.eta = j.at("eta").get<double>();
  const auto& sp = j.at("sigma_policy");
  const auto kind = sp.at("kind").get<std::string>();
  if (kind == "fixed") {
    c.sigma = FixedSigma{sp.at("sigma").get<double>()};
  } else if (kind == "median_scaled") {
    c.sigma = MedianScaledSigma{sp.at("varsigma").get<double>()};
  } else {
    throw parse_error("unknown sigma policy '" + kind + "'");
  }
  c.max_iters = j.at("max_iters").get<std::size_t>();
  c.grad_tol = j.at("grad_tol").get<double>();
  const auto& init = j.at("init");
  c.init.kind = init.at("kind").get<std::string>() == "zeros" ? InitKind::Zeros : InitKind::SeededRandom;
  c.init.scale = init.at("scale").get<double>();
  c.init.seed = init.at("seed").get<std::uint64_t>();
  c.augment_bias = j.at("augment_bias").get<bool>();
  return c;
}

namespace detail {

inline nlohmann::json linear_to_json(const LinearModel& m) {
  return {{"w", m.w}, {"sigma", m.sigma.value()}, {"bias", m.bias}, {"config", config_to_json(m.config)}};
}

inline LinearModel linear_from_json(const nlohmann::json& j, const ScalingParams& scaling) {
  LinearModel m{j.at("w").get<Vector>(), scaling, config_from_json(j.at("config")),
                Bandwidth(j.at("sigma").get<double>()), j.at("bias").get<bool>()};
  if (m.w.size() != scaling.dims() + (m.bias ? 1 : 0)) throw parse_error("weight vector length does not match d");
  if (!all_finite(m.w)) throw parse_error("weight vector contains non-finite values");
  return m;
}

inline nlohmann::json scaling_to_json(const ScalingParams& s) { return {{"min", s.min}, {"max", s.max}}; }

}  // namespace detail

/// {version, kind: binary|ova, d, w | classes[], scaling {min, max}, sigma, bias, config}.
/// Doubles are written in shortest round-trip form, so loading is bit-exact.
inline nlohmann::json model_to_json(const AnyModel& model) {
  nlohmann::json j;
  j["version"] = model_format_version;
  if (const auto* bin = std::get_if<LinearModel>(&model)) {
    j["kind"] = "binary";
    j["d"] = bin->dims();
    j["scaling"] = detail::scaling_to_json(bin->scaling);
    j.update(detail::linear_to_json(*bin));
  } else {
    const auto& ova = std::get<OneVsAllModel>(model);
    j["kind"] = "ova";
    j["d"] = ova.dims();
    j["scaling"] = detail::scaling_to_json(ova.classes.at(0).scaling);
    j["classes"] = nlohmann::json::array();
    for (const auto& m : ova.classes) j["classes"].push_back(detail::linear_to_json(m));
  }
  return j;
}

inline AnyModel model_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("version").get<int>();
    if (version != model_format_version) {
      throw parse_error("model format version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(model_format_version) + ")");
    }
    const auto d = j.at("d").get<std::size_t>();
    ScalingParams scaling{j.at("scaling").at("min").get<Vector>(), j.at("scaling").at("max").get<Vector>()};
    if (scaling.min.size() != d || scaling.max.size() != d) throw parse_error("scaling length does not match d");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "binary") return detail::linear_from_json(j, scaling);
    if (kind == "ova") {
      OneVsAllModel ova;
      for (const auto& c : j.at("classes")) ova.classes.push_back(detail::linear_from_json(c, scaling));
      if (ova.classes.size() < 2) throw parse_error("one-vs-all model needs at least two classes");
      return ova;
    }
    throw parse_error("unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("malformed model: ") + e.what());
  } catch (const invalid_argument& e) {
    throw parse_error(std::string("malformed model: ") + e.what());
  }
}

inline void save_model(const std::string& path, const AnyModel& model) {
  std::ofstream out(path);
  if (!out) throw error("cannot write model to '" + path + "'");
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw error("failed writing model to '" + path + "'");
}

inline AnyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open model '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("malformed model file '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace mmi
