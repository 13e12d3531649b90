// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mmi;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double oracle_loss(LossKind kind, double m) {
  switch (kind) {
    case LossKind::Hinge: return std::max(0.0, 1.0 - m);
    case LossKind::Squared: return (1.0 - m) * (1.0 - m);
    case LossKind::Logistic: return std::log1p(std::exp(-m));
    case LossKind::Exponential: return std::exp(-m);
  }
  return 0.0;
}

double oracle_objective(const oracle::Instance& inst, const oracle::Vec& w, LossKind kind, double alpha, double beta,
                        double sigma) {
  const auto f = oracle::responses(inst.x, w);
  double loss = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) loss += oracle_loss(kind, inst.y[i] * f[i]);
  for (double v : w) l2 += v * v;
  const double mi = beta == 0.0 ? 0.0 : oracle::mutual_information(f, inst.y, sigma);
  return loss / static_cast<double>(f.size()) + alpha / 2.0 * l2 - beta * mi;
}

TrainConfig config_for(LossKind kind, double alpha, double beta) {
  TrainConfig c;
  c.loss = kind;
  c.alpha = alpha;
  c.beta = beta;
  return c;
}

// 1. Analytic gradients against central differences (step 1e-6).
Verdict gradient_fidelity() {
  const auto start = Clock::now();
  const std::vector<LossKind> smooth{LossKind::Squared, LossKind::Logistic, LossKind::Exponential};
  double worst_loss = 0.0, worst_mi = 0.0, worst_obj = 0.0, worst_hinge = 0.0;
  std::size_t hinge_checked = 0, hinge_skipped = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = oracle::random_instance(20, 5, 1000 + seed);
    const auto data = testutil::to_dataset(inst);
    for (double sigma : {0.3, 1.0, 3.0}) {
      const Bandwidth s(sigma);
      for (auto kind : smooth) {
        const auto g = total_gradient(data, inst.w, config_for(kind, 0.0, 0.0), s);
        const auto fd = oracle::finite_difference(
            [&](const oracle::Vec& w) { return oracle_objective(inst, w, kind, 0.0, 0.0, sigma); }, inst.w);
        worst_loss = std::max(worst_loss, oracle::relative_error(g, fd));

        const auto go = total_gradient(data, inst.w, config_for(kind, 5.8, 44.8), s);
        const auto fdo = oracle::finite_difference(
            [&](const oracle::Vec& w) { return oracle_objective(inst, w, kind, 5.8, 44.8, sigma); }, inst.w);
        worst_obj = std::max(worst_obj, oracle::relative_error(go, fdo));
      }
      const auto gi = grad_mutual_information(data, inst.w, s);
      const auto fdi = oracle::finite_difference(
          [&](const oracle::Vec& w) { return oracle::mutual_information(oracle::responses(inst.x, w), inst.y, sigma); },
          inst.w);
      worst_mi = std::max(worst_mi, oracle::relative_error(gi, fdi));

      const auto f = oracle::responses(inst.x, inst.w);
      bool near_kink = false;
      for (std::size_t i = 0; i < f.size(); ++i) near_kink |= std::abs(inst.y[i] * f[i] - 1.0) <= 1e-4;
      if (near_kink) {
        ++hinge_skipped;
        continue;
      }
      ++hinge_checked;
      const auto gh = total_gradient(data, inst.w, config_for(LossKind::Hinge, 5.8, 44.8), s);
      const auto fdh = oracle::finite_difference(
          [&](const oracle::Vec& w) { return oracle_objective(inst, w, LossKind::Hinge, 5.8, 44.8, sigma); }, inst.w);
      worst_hinge = std::max(worst_hinge, oracle::relative_error(gh, fdh));
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst_loss <= 1e-5 && worst_mi <= 1e-5 && worst_obj <= 1e-5 && worst_hinge <= 1e-5 &&
                    hinge_checked > 0 && elapsed < 5.0;
  return {pass, "max rel err loss " + fmt("%.2e", worst_loss) + ", MI " + fmt("%.2e", worst_mi) + ", objective " +
                    fmt("%.2e", worst_obj) + ", hinge objective " + fmt("%.2e", worst_hinge) + " (" +
                    std::to_string(hinge_checked) + " checked, " + std::to_string(hinge_skipped) +
                    " near kink) <= 1e-5; " + fmt("%.2f", elapsed) + " s < 5 s"};
}

// 2. Estimators against the naive double-loop oracle.
Verdict estimator_oracle() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 49;
    const std::size_t d = 1 + rng() % 6;
    auto inst = oracle::random_instance(n, d, 5000 + static_cast<std::uint64_t>(t), 2.0);
    std::shuffle(inst.y.begin(), inst.y.end(), rng);
    const double sigma = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    const Bandwidth s(sigma);
    const auto f = oracle::responses(inst.x, inst.w);
    const Responses r(f, inst.y);
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(density_at(i, f, s) - oracle::density(i, f, sigma)));
    worst = std::max(worst, std::abs(entropy_f(f, s) - oracle::entropy(f, sigma)));
    worst = std::max(worst, std::abs(conditional_entropy_f(r, s) - oracle::conditional_entropy(f, inst.y, sigma)));
    worst = std::max(worst, std::abs(mutual_information(r, s).mi - oracle::mutual_information(f, inst.y, sigma)));
  }
  return {worst <= 1e-10, "max abs diff " + fmt("%.2e", worst) + " <= 1e-10 over 100 instances"};
}

// 3. Degenerate responses.
Verdict degenerate_mi() {
  double worst_const = 0.0, worst_sep = 0.0;
  for (double sigma : {0.1, 1.0, 5.0}) {
    for (std::size_t n : {2u, 7u, 40u}) {
      Labels y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 == 0 ? 1 : -1;
      worst_const = std::max(worst_const, std::abs(mutual_information(Responses(Vector(n, 0.37), y), Bandwidth(sigma)).mi));
      Vector f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = y[i] > 0 ? 1.5 + 20.0 * sigma : 1.5;
      worst_sep = std::max(worst_sep, mutual_information(Responses(f, y), Bandwidth(sigma)).h_f_given_y);
    }
  }
  return {worst_const <= 1e-12 && worst_sep <= 1e-6,
          "constant |mi| " + fmt("%.2e", worst_const) + " <= 1e-12, separated h_f|y " + fmt("%.2e", worst_sep) + " <= 1e-6"};
}

// 4. AUC against Mann-Whitney pair counting.
Verdict auc_correctness() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng() % 199;
    const int levels = 1 + static_cast<int>(rng() % 10);
    Vector r(n);
    Labels y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // quantised scores inject ties
      r[i] = std::round(std::normal_distribution<double>(0.0, 1.0)(rng) * levels) / levels;
      y[i] = i == 0 ? 1 : (i == 1 ? -1 : (rng() % 2 ? 1 : -1));
    }
    worst = std::max(worst, std::abs(auc(r, y) - oracle::mann_whitney(r, y)));
  }
  return {worst <= 1e-12, "max |auc - mann_whitney| " + fmt("%.2e", worst) + " <= 1e-12 over 200 tied instances"};
}

Dataset descent_benchmark() {
  auto raw = make_synthetic_gaussians(50, 5, 2.0, 0.1, 11);
  return apply_scaling(raw, fit_scaling(raw));
}

// 5. Monotone descent for the smooth losses.
Verdict descent_sanity() {
  const auto data = descent_benchmark();
  double worst_rise = -std::numeric_limits<double>::infinity();
  for (auto kind : {LossKind::Squared, LossKind::Logistic, LossKind::Exponential}) {
    auto c = config_for(kind, 1.0, 1.0);
    c.eta = 1e-3;
    c.max_iters = 101;
    c.grad_tol = 0.0;
    const auto trace = train(data, c);
    if (trace.records.size() < 101) return {false, "trace stopped early for " + std::string(to_string(kind))};
    for (std::size_t k = 0; k < 100; ++k) {
      worst_rise = std::max(worst_rise, trace.records[k + 1].terms.objective - trace.records[k].terms.objective);
    }
  }
  return {worst_rise <= 1e-10, "largest per-step change " + fmt("%.2e", worst_rise) + " <= 1e-10 (n = 100, d = 5)"};
}

struct Benchmark {
  Dataset data = make_synthetic_gaussians(200, 10, 2.0, 0.1, 42);
  FoldPlan plan = plan_folds(data, CvOptions{10, 7, false, false});
  std::vector<std::pair<std::string, CvResult>> cases;
  std::vector<double> seconds;
};

Benchmark& benchmark() {
  static Benchmark b;
  return b;
}

// 6. Hybrid vs. loss-only baseline for every loss, plus the paired report.
Verdict directional_reproduction(const std::string& report_path) {
  auto& b = benchmark();
  std::string detail;
  bool pass = true;
  json report = {{"n", b.data.size()}, {"d", b.data.dims()}, {"k", b.plan.k}, {"seed", b.plan.seed}};
  json paired = json::array();
  for (std::size_t f = 0; f < b.plan.k; ++f) paired.push_back({{"fold", f}});
  for (auto kind : all_loss_kinds) {
    const auto start = Clock::now();
    const auto hybrid = cross_validate(b.data, config_for(kind, 5.8, 44.8), b.plan, false);
    const auto baseline = cross_validate(b.data, config_for(kind, 5.8, 0.0), b.plan, false);
    const double elapsed = seconds_since(start);
    const std::string name(to_string(kind));
    for (std::size_t f = 0; f < b.plan.k; ++f) {
      paired[f][name + " Loss - MaxMutInf"] = *hybrid.folds[f].auc;
      paired[f][name + " Loss"] = *baseline.folds[f].auc;
    }
    const bool ok = hybrid.auc->mean >= baseline.auc->mean - 0.005 && elapsed < 60.0;
    pass &= ok;
    detail += name + " " + fmt("%.4f", hybrid.auc->mean) + " vs " + fmt("%.4f", baseline.auc->mean) + " (" +
              fmt("%.1f", elapsed) + " s); ";
    b.cases.emplace_back(name, hybrid);
  }
  report["paired"] = paired;
  std::ofstream(report_path) << report.dump(2) << '\n';
  const bool emitted = std::ifstream(report_path).good();
  return {pass && emitted, "mean AUC hybrid vs beta = 0: " + detail + "paired report " + report_path};
}

// 7. Hybrid vs. MI-only on the same folds.
Verdict three_case_comparison() {
  auto& b = benchmark();
  auto c = config_for(LossKind::Hinge, 5.8, 44.8);
  c.use_loss = false;
  // w = 0 is stationary for the MI term, so MI-only starts from seeded noise
  c.init = InitPolicy{InitKind::SeededRandom, 0.01, 7};
  const auto mi_only = cross_validate(b.data, c, b.plan, false);
  std::string detail = "MI-only " + fmt("%.4f", mi_only.auc->mean) + "; hybrid";
  bool pass = !b.cases.empty();
  for (const auto& [name, hybrid] : b.cases) {
    pass &= hybrid.auc->mean >= mi_only.auc->mean - 0.005;
    detail += " " + name + " " + fmt("%.4f", hybrid.auc->mean);
  }
  return {pass, detail};
}

// 8. One-vs-all on three clusters.
Verdict multiclass() {
  const auto data = make_synthetic_clusters(100, 4, 3, 6.0, 3);
  const auto r = cross_validate(data, TrainConfig{}, CvOptions{10, 3, false, true});
  return {r.accuracy->mean >= 0.95, "mean held-out accuracy " + fmt("%.4f", r.accuracy->mean) + " >= 0.95 (n = 300, d = 4)"};
}

// 9. Byte-identical CLI reports and a bit-exact save/load round trip.
Verdict reproducibility() {
  testutil::TempDir dir("acceptance");
  testutil::write_dataset(dir.file("data.csv"), make_synthetic_gaussians(40, 4, 2.0, 0.1, 5));
  const std::vector<std::string> args{"cv",       "--data",   dir.file("data.csv"),   "--k",        "5",
                                      "--seed",   "9",        "--compare-baseline",   "--report",   dir.file("report.json"),
                                      "--manifest", dir.file("cv.manifest.json")};
  std::ostringstream sink;
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    if (cli::run(args, sink, sink) != 0) return {false, "cv run failed: " + sink.str()};
    reports.push_back(testutil::read_text(dir.file("report.json")));
  }
  const bool same_report = reports[0] == reports[1] && !reports[0].empty();

  auto train_set = make_synthetic_gaussians(30, 6, 2.0, 0.1, 6);
  auto model = fit_binary(train_set, config_for(LossKind::Logistic, 5.8, 44.8));
  save_model(dir.file("model.json"), model);
  const auto loaded = std::get<LinearModel>(load_model(dir.file("model.json")));
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::size_t mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    Vector x(6);
    for (double& v : x) v = normal(rng);
    mismatches += response(model, x) != response(loaded, x) || predict_binary(model, x) != predict_binary(loaded, x);
  }
  return {same_report && mismatches == 0, std::string("repeat cv report ") + (same_report ? "byte-identical" : "differs") +
                                              ", " + std::to_string(mismatches) + "/100 probe mismatches after save/load"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string report_path = argc > 1 ? argv[1] : "acceptance_paired_report.json";
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 gradient fidelity", gradient_fidelity},
      {"2 estimator oracle equivalence", estimator_oracle},
      {"3 degenerate MI", degenerate_mi},
      {"4 AUC correctness", auc_correctness},
      {"5 descent sanity", descent_sanity},
      {"6 directional reproduction", [&] { return directional_reproduction(report_path); }},
      {"7 three-case comparison", three_case_comparison},
      {"8 multiclass", multiclass},
      {"9 reproducibility and persistence", reproducibility},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << "criterion " << name << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
