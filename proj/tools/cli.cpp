#include "cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mmi/mmi.hpp"

namespace mmi::cli {
namespace {

using nlohmann::json;

/// Error tagged with the pipeline stage that raised it.
struct StageError : std::runtime_error {
  StageError(std::string stage, const std::string& what) : std::runtime_error(stage + ": " + what) {}
};

template <typename F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MMI_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw StageError("cli", std::string("MMI_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return 0;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

/// Outputs are buffered and only written once the command has succeeded. Each
/// file goes to a temporary name first; any failure removes every temporary.
class OutputSet {
 public:
  std::ostringstream& file(const std::string& path) {
    paths_.push_back(path);
    return buffers_[path];
  }

  [[nodiscard]] const std::vector<std::string>& paths() const { return paths_; }

  void commit() {
    std::vector<std::pair<std::string, std::string>> staged;
    try {
      for (const auto& path : paths_) {
        const auto tmp = path + ".tmp";
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw error("cannot write '" + path + "'");
        staged.emplace_back(tmp, path);
        out << buffers_[path].str();
        out.close();
        if (!out) throw error("failed writing '" + path + "'");
      }
      for (const auto& [tmp, path] : staged) std::filesystem::rename(tmp, path);
    } catch (...) {
      std::error_code ec;
      for (const auto& [tmp, path] : staged) std::filesystem::remove(tmp, ec);
      throw;
    }
  }

 private:
  std::vector<std::string> paths_;
  std::map<std::string, std::ostringstream> buffers_;
};

struct Manifest {
  std::string command;
  std::vector<std::string> args;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  json results = json::object();
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  json to_json(const std::vector<std::string>& outputs) const {
    json j;
    j["tool"] = "mmi";
    j["version"] = version_string;
    j["command"] = command;
    j["args"] = args;
    j["config"] = config;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["inputs"] = json::array();
    for (const auto& in : inputs) j["inputs"].push_back({{"path", in}, {"sha256", sha256_file(in)}});
    j["outputs"] = outputs;
    j["results"] = results;
    j["timing"] = {
        {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()}};
    return j;
  }
};

/// Writes the manifest last and commits every buffered output.
void finish(OutputSet& outputs, const Manifest& manifest, const std::string& manifest_path) {
  auto listed = outputs.paths();
  auto& m = outputs.file(manifest_path);
  m << manifest.to_json(listed).dump(2) << '\n';
  outputs.commit();
}

// ---------------------------------------------------------------------------
// Shared training flags

struct TrainFlags {
  std::string loss = "hinge";
  double alpha = 5.8;
  double beta = 44.8;
  double eta = 1e-3;
  std::optional<double> sigma;
  double varsigma = 0.451;
  std::size_t max_iters = 1000;
  double grad_tol = 1e-6;
  std::string init = "zeros";
  double init_scale = 0.01;
  bool augment_bias = false;
  bool mi_only = false;

  void attach(CLI::App* app) {
    app->add_option("--loss", loss, "classification loss")
        ->check(CLI::IsMember({"hinge", "squared", "logistic", "exponential"}))
        ->capture_default_str();
    app->add_option("--alpha", alpha, "l2 tradeoff")->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--beta", beta, "mutual information tradeoff")->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--eta", eta, "gradient descent step")->check(CLI::PositiveNumber)->capture_default_str();
    auto* s = app->add_option("--sigma", sigma, "fixed kernel bandwidth")->check(CLI::PositiveNumber);
    auto* v = app->add_option("--varsigma", varsigma, "bandwidth = varsigma * median pairwise distance")
                  ->check(CLI::PositiveNumber)
                  ->capture_default_str();
    s->excludes(v);
    app->add_option("--max-iters", max_iters, "iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--grad-tol", grad_tol, "stop when |grad| <= this")->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--init", init, "initial weights")->check(CLI::IsMember({"zeros", "random"}))->capture_default_str();
    app->add_option("--init-scale", init_scale, "stddev of random initial weights")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_flag("--augment-bias", augment_bias, "append a constant-1 intercept feature after scaling");
    app->add_flag("--mi-only", mi_only, "drop the loss term (MI and l2 only)");
  }

  [[nodiscard]] TrainConfig config(std::uint64_t seed) const {
    TrainConfig c;
    c.loss = parse_loss_kind(loss);
    c.use_loss = !mi_only;
    c.alpha = alpha;
    c.beta = beta;
    c.eta = eta;
    if (sigma) c.sigma = FixedSigma{*sigma};
    else c.sigma = MedianScaledSigma{varsigma};
    c.max_iters = max_iters;
    c.grad_tol = grad_tol;
    c.init = InitPolicy{init == "zeros" ? InitKind::Zeros : InitKind::SeededRandom, init_scale, seed};
    c.augment_bias = augment_bias;
    c.validate();
    return c;
  }
};

void warn_saturation(const TrainTrace& trace, std::ostream& err) {
  for (const auto& r : trace.records) {
    if (r.exp_saturated) {
      err << "warning: exponential loss argument exceeded " << exp_argument_cap << " at iteration " << r.iteration
          << "; values were clamped\n";
      return;
    }
  }
}

json trace_summary(const TrainTrace& trace) {
  return {{"termination", std::string(to_string(trace.reason))},
          {"iterations", trace.records.size()},
          {"sigma", trace.sigma.value()},
          {"final_objective", trace.records.empty() ? json(nullptr) : json(trace.records.back().terms.objective)}};
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  TrainFlags flags;
  std::string data;
  std::string label_col = "last";
  std::string model = "model.json";
  std::string trace = "trace.jsonl";
  std::string manifest = "manifest.json";
  std::uint64_t seed = 0;
  bool multiclass = false;
};

void cmd_train(const TrainArgs& a, Manifest& manifest, std::ostream& err) {
  const auto config = stage("cli", [&] { return a.flags.config(a.seed); });
  const auto data = stage("data", [&] { return load_csv(a.data, LabelColumn::parse(a.label_col)); });
  manifest.config = config_to_json(config);
  manifest.config["multiclass"] = a.multiclass;
  manifest.config["label_col"] = a.label_col;
  manifest.seed = a.seed;
  manifest.inputs.push_back(a.data);

  OutputSet outputs;
  auto& trace_out = outputs.file(a.trace);
  AnyModel model;
  if (a.multiclass) {
    auto fit = stage("classifier", [&] { return fit_one_vs_all_traced(data, config); });
    json per_class = json::array();
    for (std::size_t c = 0; c < fit.traces.size(); ++c) {
      write_trace_jsonl(trace_out, fit.traces[c], c);
      warn_saturation(fit.traces[c], err);
      per_class.push_back(trace_summary(fit.traces[c]));
    }
    manifest.results["classes"] = per_class;
    model = std::move(fit.model);
  } else {
    auto fit = stage("classifier", [&] { return fit_binary_traced(data, config); });
    write_trace_jsonl(trace_out, fit.trace);
    warn_saturation(fit.trace, err);
    manifest.results = trace_summary(fit.trace);
    model = std::move(fit.model);
  }
  outputs.file(a.model) << model_to_json(model).dump(2) << '\n';
  finish(outputs, manifest, a.manifest);
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  std::string model;
  std::string data;
  std::optional<std::string> label_col;
  std::string out = "-";
  std::string manifest = "predict.manifest.json";
};

void cmd_predict(const PredictArgs& a, Manifest& manifest, std::ostream& out) {
  const auto model = stage("classifier", [&] { return load_model(a.model); });
  std::optional<LabelColumn> drop;
  if (a.label_col) drop = LabelColumn::parse(*a.label_col);
  const auto x = stage("data", [&] { return load_features_csv(a.data, drop); });
  const std::size_t d = std::visit([](const auto& m) { return m.dims(); }, model);
  if (x.rows() > 0 && x.cols() != d) {
    throw StageError("classifier", "dimension mismatch: model expects d = " + std::to_string(d) + " features, input has " +
                                       std::to_string(x.cols()));
  }
  manifest.inputs = {a.model, a.data};
  manifest.config = {{"label_col", a.label_col ? json(*a.label_col) : json(nullptr)}};

  std::ostringstream csv;
  csv << "index,response,label\n";
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double r = 0.0;
    int label = 0;
    if (const auto* bin = std::get_if<LinearModel>(&model)) {
      r = response(*bin, x.row(i));
      label = r >= 0.0 ? 1 : -1;
    } else {
      const auto& ova = std::get<OneVsAllModel>(model);
      label = predict_multiclass(ova, x.row(i));
      r = class_responses(ova, x.row(i))[static_cast<std::size_t>(label)];
    }
    csv << i << ',' << format_double(r) << ',' << label << '\n';
  }
  manifest.results = {{"rows", x.rows()}};

  OutputSet outputs;
  if (a.out != "-") outputs.file(a.out) << csv.str();
  finish(outputs, manifest, a.manifest);
  if (a.out == "-") out << csv.str();
}

// ---------------------------------------------------------------------------
// cv

struct CvArgs {
  TrainFlags flags;
  std::string data;
  std::string label_col = "last";
  std::size_t k = 10;
  std::uint64_t seed = 0;
  bool stratified = false;
  bool multiclass = false;
  bool compare_baseline = false;
  bool compare_mi_only = false;
  std::string report = "-";
  std::optional<std::string> curves_dir;
  std::string manifest = "cv.manifest.json";
};

/// Display name of a regularisation case.
std::string case_name(const TrainConfig& c) {
  if (!c.use_loss) return "MaxMutInf";
  return c.beta > 0.0 ? "Loss - MaxMutInf" : "Loss";
}

std::string case_slug(const TrainConfig& c) {
  if (!c.use_loss) return "maxmutinf";
  return c.beta > 0.0 ? "loss-maxmutinf" : "loss";
}

void cmd_cv(const CvArgs& a, Manifest& manifest, std::ostream& out) {
  const auto config = stage("cli", [&] { return a.flags.config(a.seed); });
  const auto data = stage("data", [&] { return load_csv(a.data, LabelColumn::parse(a.label_col)); });
  const CvOptions options{a.k, a.seed, a.stratified, a.multiclass};
  const auto plan = stage("data", [&] {
    data.validate();
    return plan_folds(data, options);
  });

  std::vector<TrainConfig> cases{config};
  if (a.compare_baseline) {
    auto baseline = config;
    baseline.beta = 0.0;
    baseline.use_loss = true;
    cases.push_back(baseline);
  }
  if (a.compare_mi_only) {
    auto mi_only = config;
    mi_only.use_loss = false;
    // w = 0 is a stationary point of the MI term, so the MI-only case starts from seeded noise.
    if (mi_only.init.kind == InitKind::Zeros) mi_only.init.kind = InitKind::SeededRandom;
    cases.push_back(mi_only);
  }

  json report;
  report["task"] = a.multiclass ? "multiclass" : "binary";
  report["n"] = data.size();
  report["d"] = data.dims();
  report["k"] = a.k;
  report["seed"] = a.seed;
  report["stratified"] = a.stratified;
  report["cases"] = json::array();

  OutputSet outputs;
  std::vector<std::pair<std::string, CvResult>> results;
  for (const auto& c : cases) {
    auto r = stage("metrics", [&] { return cross_validate(data, c, plan, a.multiclass); });
    auto j = cv_result_to_json(r);
    j["name"] = case_name(c);
    j["config"] = config_to_json(c);
    report["cases"].push_back(j);
    if (a.curves_dir && !a.multiclass) {
      for (const auto& f : r.folds) {
        if (!f.auc) continue;
        const auto base = (std::filesystem::path(*a.curves_dir) / (case_slug(c) + "_fold" + std::to_string(f.fold))).string();
        write_roc_csv(outputs.file(base + "_roc.csv"), roc_curve(f.responses, f.actual));
        write_pr_csv(outputs.file(base + "_pr.csv"), pr_curve(f.responses, f.actual));
      }
    }
    results.emplace_back(case_name(c), std::move(r));
  }

  // Fold-aligned metric of every case side by side (AUC for binary, accuracy for multiclass).
  json paired = json::array();
  for (std::size_t fold = 0; fold < plan.k; ++fold) {
    json row = {{"fold", fold}};
    for (const auto& [name, r] : results) {
      const auto& f = r.folds[fold];
      row[name] = a.multiclass ? json(f.accuracy) : (f.auc ? json(*f.auc) : json(nullptr));
    }
    paired.push_back(row);
  }
  report["paired"] = paired;

  manifest.config = config_to_json(config);
  manifest.config.update({{"k", a.k},
                          {"stratified", a.stratified},
                          {"multiclass", a.multiclass},
                          {"compare_baseline", a.compare_baseline},
                          {"compare_mi_only", a.compare_mi_only},
                          {"label_col", a.label_col}});
  manifest.seed = a.seed;
  manifest.inputs.push_back(a.data);
  manifest.results = {{"cases", json::array()}};
  for (const auto& [name, r] : results) {
    manifest.results["cases"].push_back(
        {{"name", name}, {"mean_auc", r.auc ? json(r.auc->mean) : json(nullptr)}, {"mean_accuracy", r.accuracy->mean}});
  }

  const auto text = report.dump(2) + "\n";
  if (a.report != "-") outputs.file(a.report) << text;
  if (a.curves_dir) std::filesystem::create_directories(*a.curves_dir);
  finish(outputs, manifest, a.manifest);
  if (a.report == "-") out << text;
}

// ---------------------------------------------------------------------------
// mi

struct MiArgs {
  std::optional<std::string> responses;
  std::optional<std::string> model;
  std::optional<std::string> data;
  std::string label_col = "last";
  std::optional<double> sigma;
  double varsigma = 0.451;
  std::string manifest = "mi.manifest.json";
};

void require_both_classes(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 1 && y != -1) throw invalid_argument("labels must be +1 or -1, found " + std::to_string(y));
  }
  auto [pos, neg] = class_sizes(labels);
  if (pos == 0 || neg == 0) throw invalid_argument("mutual information needs both classes present");
}

void cmd_mi(const MiArgs& a, Manifest& manifest, std::ostream& out) {
  Responses r;
  std::optional<Bandwidth> sigma;
  if (a.sigma) sigma = Bandwidth(*a.sigma);
  if (a.responses) {
    if (a.model || a.data) throw StageError("cli", "--responses cannot be combined with --model/--data");
    const auto table = stage("data", [&] { return load_csv(*a.responses, LabelColumn::parse(a.label_col)); });
    if (table.dims() != 1) throw StageError("data", "responses file must hold exactly one response column and a label column");
    r = stage("kde_mi", [&] { return Responses(Vector(table.features.data()), table.labels); });
    if (!sigma) sigma = stage("optimizer", [&] { return resolve_sigma(table.features, MedianScaledSigma{a.varsigma}); });
    manifest.inputs.push_back(*a.responses);
  } else if (a.model && a.data) {
    const auto model = stage("classifier", [&] { return load_model(*a.model); });
    const auto* bin = std::get_if<LinearModel>(&model);
    if (!bin) throw StageError("cli", "mi needs a binary model");
    const auto data = stage("data", [&] { return load_csv(*a.data, LabelColumn::parse(a.label_col)); });
    r = stage("classifier", [&] { return Responses(responses(*bin, data.features), data.labels); });
    if (!sigma) sigma = bin->sigma;
    manifest.inputs = {*a.model, *a.data};
  } else {
    throw StageError("cli", "give either --responses or both --model and --data");
  }
  stage("kde_mi", [&] { require_both_classes(r.labels); });
  const auto est = stage("kde_mi", [&] { return mutual_information(r, *sigma); });
  json j = {{"h_f", est.h_f}, {"h_f_given_y", est.h_f_given_y}, {"mi", est.mi}, {"sigma", sigma->value()}, {"n", r.size()}};
  manifest.config = {{"label_col", a.label_col}, {"sigma", sigma->value()}};
  manifest.results = j;
  OutputSet outputs;
  finish(outputs, manifest, a.manifest);
  out << j.dump() << '\n';
}

// ---------------------------------------------------------------------------
// roc

struct RocArgs {
  std::string data;
  std::string label_col = "last";
  bool pr = false;
  std::optional<std::string> out;
  std::string manifest = "roc.manifest.json";
};

void cmd_roc(const RocArgs& a, Manifest& manifest, std::ostream& out) {
  const auto table = stage("data", [&] { return load_csv(a.data, LabelColumn::parse(a.label_col)); });
  if (table.dims() != 1) throw StageError("data", "input must hold exactly one response column and a label column");
  stage("metrics", [&] { require_binary(table); });
  const Vector& responses = table.features.data();
  const auto curve = stage("metrics", [&] { return roc_curve(responses, table.labels); });
  const auto out_path = a.out.value_or(a.pr ? "pr.csv" : "roc.csv");
  OutputSet outputs;
  if (a.pr) write_pr_csv(outputs.file(out_path), pr_curve(responses, table.labels));
  else write_roc_csv(outputs.file(out_path), curve);
  manifest.inputs.push_back(a.data);
  manifest.config = {{"label_col", a.label_col}, {"pr", a.pr}};
  manifest.results = {{"auc", curve.auc}};
  finish(outputs, manifest, a.manifest);
  out << "AUC " << format_double(curve.auc) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear classification with mutual-information regularisation", "mmi"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string);

  std::uint64_t seed = 0;
  try {
    seed = default_seed();
  } catch (const StageError& e) {
    err << "mmi: " << e.what() << '\n';
    return 2;
  }

  TrainArgs train_args;
  train_args.seed = seed;
  auto* train = app.add_subcommand("train", "train a binary or one-vs-all model");
  train_args.flags.attach(train);
  train->add_option("--data", train_args.data, "training CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--label-col", train_args.label_col, "label column: index, header name or 'last'")->capture_default_str();
  train->add_option("--model", train_args.model, "model output path")->capture_default_str();
  train->add_option("--trace", train_args.trace, "trace output path (JSON lines)")->capture_default_str();
  train->add_option("--manifest", train_args.manifest, "manifest output path")->capture_default_str();
  train->add_option("--seed", train_args.seed, "seed for random initialisation (default $MMI_SEED or 0)");
  train->add_flag("--multiclass", train_args.multiclass, "labels are 0..C-1; train one-vs-all");

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "score a CSV with a saved model");
  predict->add_option("--model", predict_args.model, "model JSON")->required()->check(CLI::ExistingFile);
  predict->add_option("--data", predict_args.data, "input CSV")->required()->check(CLI::ExistingFile);
  predict->add_option("--label-col", predict_args.label_col, "drop this column before scoring");
  predict->add_option("--out", predict_args.out, "predictions CSV ('-' for stdout)")->capture_default_str();
  predict->add_option("--manifest", predict_args.manifest, "manifest output path")->capture_default_str();

  CvArgs cv_args;
  cv_args.seed = seed;
  auto* cv = app.add_subcommand("cv", "k-fold cross validation");
  cv_args.flags.attach(cv);
  cv->add_option("--data", cv_args.data, "dataset CSV")->required()->check(CLI::ExistingFile);
  cv->add_option("--label-col", cv_args.label_col, "label column")->capture_default_str();
  cv->add_option("--k", cv_args.k, "fold count")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30))->capture_default_str();
  cv->add_option("--seed", cv_args.seed, "fold and initialisation seed (default $MMI_SEED or 0)");
  cv->add_flag("--stratified", cv_args.stratified, "stratify folds by label");
  cv->add_flag("--multiclass", cv_args.multiclass, "labels are 0..C-1; one-vs-all, scored by accuracy");
  cv->add_flag("--compare-baseline", cv_args.compare_baseline, "also run the beta = 0 loss-only case");
  cv->add_flag("--compare-mi-only", cv_args.compare_mi_only, "also run the MI-only case");
  cv->add_option("--report", cv_args.report, "report JSON path ('-' for stdout)")->capture_default_str();
  cv->add_option("--curves-dir", cv_args.curves_dir, "write per-fold ROC and recall-precision CSVs here");
  cv->add_option("--manifest", cv_args.manifest, "manifest output path")->capture_default_str();

  MiArgs mi_args;
  auto* mi = app.add_subcommand("mi", "estimate H(f), H(f|y) and their difference");
  mi->add_option("--responses", mi_args.responses, "CSV of response,label")->check(CLI::ExistingFile);
  mi->add_option("--model", mi_args.model, "binary model JSON")->check(CLI::ExistingFile);
  mi->add_option("--data", mi_args.data, "labelled data CSV for --model")->check(CLI::ExistingFile);
  mi->add_option("--label-col", mi_args.label_col, "label column")->capture_default_str();
  auto* mi_sigma = mi->add_option("--sigma", mi_args.sigma, "bandwidth (default: the model's, or varsigma * median)")
                       ->check(CLI::PositiveNumber);
  mi->add_option("--varsigma", mi_args.varsigma, "bandwidth scale for --responses")
      ->check(CLI::PositiveNumber)
      ->capture_default_str()
      ->excludes(mi_sigma);
  mi->add_option("--manifest", mi_args.manifest, "manifest output path")->capture_default_str();

  RocArgs roc_args;
  auto* roc = app.add_subcommand("roc", "ROC (or recall-precision) sweep of scored responses");
  roc->add_option("--data", roc_args.data, "CSV of response,label")->required()->check(CLI::ExistingFile);
  roc->add_option("--label-col", roc_args.label_col, "label column")->capture_default_str();
  roc->add_flag("--pr", roc_args.pr, "emit the recall-precision sweep instead");
  roc->add_option("--out", roc_args.out, "curve CSV path (default roc.csv or pr.csv)");
  roc->add_option("--manifest", roc_args.manifest, "manifest output path")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version_string << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "mmi: " << e.what() << "\n\n" << app.help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  Manifest manifest;
  manifest.args = args;
  try {
    if (*train) {
      manifest.command = "train";
      cmd_train(train_args, manifest, err);
    } else if (*predict) {
      manifest.command = "predict";
      cmd_predict(predict_args, manifest, out);
    } else if (*cv) {
      manifest.command = "cv";
      cmd_cv(cv_args, manifest, out);
    } else if (*mi) {
      manifest.command = "mi";
      cmd_mi(mi_args, manifest, out);
    } else if (*roc) {
      manifest.command = "roc";
      cmd_roc(roc_args, manifest, out);
    }
  } catch (const std::exception& e) {
    err << "mmi " << manifest.command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mmi::cli
