#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "test_util.hpp"

using namespace mmi;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  testutil::TempDir dir{"cli"};
  std::string path(const std::string& name) const { return dir.file(name); }

  std::string write_gaussians(std::size_t n_per_class, std::size_t d, std::uint64_t seed) {
    const auto p = path("data" + std::to_string(seed) + ".csv");
    testutil::write_dataset(p, make_synthetic_gaussians(n_per_class, d, 3.0, 0.05, seed));
    return p;
  }

  std::vector<std::string> train_args(const std::string& data, std::vector<std::string> extra = {}) {
    std::vector<std::string> a{"train",   "--data",     data, "--model", path("model.json"), "--trace",
                               path("trace.jsonl"), "--manifest", path("manifest.json"), "--max-iters", "40"};
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  }
};

}  // namespace

TEST_F(Cli, TrainRecordsDefaults) {
  const auto data = write_gaussians(15, 3, 1);
  auto r = run_cli(train_args(data));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = json::parse(testutil::read_text(path("manifest.json")));
  EXPECT_EQ(manifest["config"]["alpha"], 5.8);
  EXPECT_EQ(manifest["config"]["beta"], 44.8);
  EXPECT_EQ(manifest["config"]["sigma_policy"]["varsigma"], 0.451);
  EXPECT_EQ(manifest["command"], "train");
  EXPECT_EQ(manifest["inputs"][0]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(manifest["results"]["iterations"], 40);

  std::istringstream trace(testutil::read_text(path("trace.jsonl")));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(trace, line)) {
    auto rec = json::parse(line);
    EXPECT_TRUE(rec.contains("objective"));
    EXPECT_TRUE(rec.contains("mi"));
    ++lines;
  }
  EXPECT_EQ(lines, 40u);
}

TEST_F(Cli, BetaZeroIsRecorded) {
  const auto data = write_gaussians(15, 3, 1);
  ASSERT_EQ(run_cli(train_args(data, {"--beta", "0"})).code, 0);
  const auto model = json::parse(testutil::read_text(path("model.json")));
  EXPECT_EQ(model["config"]["beta"], 0.0);
}

TEST_F(Cli, InvalidFlagsWriteNothing) {
  const auto data = write_gaussians(10, 2, 1);
  for (const auto& bad : std::vector<std::vector<std::string>>{
           {"--alpha", "-1"}, {"--loss", "cubic"}, {"--eta", "0"}, {"--sigma", "1", "--varsigma", "0.4"}, {"--bogus"}}) {
    auto r = run_cli(train_args(data, bad));
    EXPECT_NE(r.code, 0) << bad[0];
    EXPECT_FALSE(r.err.empty());
    EXPECT_FALSE(std::filesystem::exists(path("model.json")));
    EXPECT_FALSE(std::filesystem::exists(path("manifest.json")));
  }
  EXPECT_NE(run_cli({"frobnicate"}).code, 0);
  EXPECT_NE(run_cli({}).code, 0);
}

TEST_F(Cli, RuntimeErrorsNameTheStage) {
  testutil::write_text(path("bad.csv"), "a,b,label\n1,2,1\n3,oops,-1\n");
  auto r = run_cli(train_args(path("bad.csv")));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("data:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("row"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(path("model.json")));

  testutil::write_text(path("one.csv"), "a,label\n1,1\n2,1\n");
  r = run_cli(train_args(path("one.csv")));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("classifier:"), std::string::npos) << r.err;
}

TEST_F(Cli, PredictMatchesLibraryBitExactly) {
  const auto data = write_gaussians(20, 4, 2);
  ASSERT_EQ(run_cli(train_args(data)).code, 0);
  auto r = run_cli({"predict", "--model", path("model.json"), "--data", data, "--label-col", "last", "--manifest",
                    path("p.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto model = std::get<LinearModel>(load_model(path("model.json")));
  const auto ds = load_csv(data, LabelColumn::last());
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "index,response,label");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ASSERT_TRUE(std::getline(csv, line));
    std::istringstream row(line);
    std::string idx, resp, label;
    std::getline(row, idx, ',');
    std::getline(row, resp, ',');
    std::getline(row, label, ',');
    EXPECT_EQ(std::stoul(idx), i);
    const double expected = response(model, ds.features.row(i));
    EXPECT_EQ(std::stod(resp), expected);
    EXPECT_EQ(std::stoi(label), expected >= 0 ? 1 : -1);
  }
}

TEST_F(Cli, PredictEmptyAndMismatchedInputs) {
  const auto data = write_gaussians(10, 3, 2);
  ASSERT_EQ(run_cli(train_args(data)).code, 0);
  testutil::write_text(path("empty.csv"), "x0,x1,x2\n");
  auto r = run_cli({"predict", "--model", path("model.json"), "--data", path("empty.csv"), "--manifest", path("p.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "index,response,label\n");

  testutil::write_text(path("wide.csv"), "a,b\n1,2\n");
  r = run_cli({"predict", "--model", path("model.json"), "--data", path("wide.csv"), "--manifest", path("p.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("d = 3"), std::string::npos) << r.err;
}

TEST_F(Cli, MulticlassTrainAndPredict) {
  testutil::write_dataset(path("clusters.csv"), make_synthetic_clusters(15, 3, 3, 8.0, 1));
  ASSERT_EQ(run_cli(train_args(path("clusters.csv"), {"--multiclass", "--beta", "1", "--alpha", "0.1", "--eta", "0.05"})).code, 0);
  auto r = run_cli({"predict", "--model", path("model.json"), "--data", path("clusters.csv"), "--label-col", "last",
                    "--manifest", path("p.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ds = load_csv(path("clusters.csv"), LabelColumn::last());
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  std::size_t correct = 0;
  for (std::size_t i = 0; std::getline(csv, line); ++i) correct += std::stoi(line.substr(line.rfind(',') + 1)) == ds.labels[i];
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(ds.size()), 0.95);
}

TEST_F(Cli, CrossValidationReport) {
  const auto data = write_gaussians(12, 3, 3);
  std::vector<std::string> args{"cv",          "--data",    data,  "--k",        "2", "--seed", "5", "--max-iters", "20",
                                "--compare-baseline", "--report", path("r1.json"), "--manifest", path("cv.json"),
                                "--curves-dir", path("curves")};
  auto r = run_cli(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(testutil::read_text(path("r1.json")));
  ASSERT_EQ(report["cases"].size(), 2u);
  EXPECT_EQ(report["cases"][0]["name"], "Loss - MaxMutInf");
  EXPECT_EQ(report["cases"][1]["name"], "Loss");
  EXPECT_EQ(report["cases"][1]["config"]["beta"], 0.0);
  EXPECT_EQ(report["cases"][0]["folds"].size(), 2u);
  ASSERT_EQ(report["paired"].size(), 2u);
  EXPECT_TRUE(report["paired"][0].contains("Loss"));
  EXPECT_TRUE(std::filesystem::exists(path("curves/loss_fold0_roc.csv")));
  EXPECT_TRUE(std::filesystem::exists(path("curves/loss-maxmutinf_fold1_pr.csv")));

  args[11] = path("r2.json");
  ASSERT_EQ(run_cli(args).code, 0);
  EXPECT_EQ(testutil::read_text(path("r1.json")), testutil::read_text(path("r2.json")));
}

TEST_F(Cli, MutualInformationFromResponses) {
  testutil::write_text(path("const.csv"), "response,label\n0.5,1\n0.5,-1\n0.5,1\n0.5,-1\n");
  auto r = run_cli({"mi", "--responses", path("const.csv"), "--sigma", "1", "--manifest", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out)["mi"].get<double>(), 0.0, 1e-12);

  testutil::write_text(path("sep.csv"), "response,label\n-50,-1\n-50,-1\n50,1\n50,1\n");
  r = run_cli({"mi", "--responses", path("sep.csv"), "--sigma", "0.5", "--manifest", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["mi"].get<double>(), j["h_f"].get<double>(), 1e-12);

  testutil::write_text(path("single.csv"), "response,label\n1,1\n2,1\n");
  r = run_cli({"mi", "--responses", path("single.csv"), "--sigma", "1", "--manifest", path("m.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("kde_mi:"), std::string::npos) << r.err;
}

TEST_F(Cli, MutualInformationFromModelMatchesLibrary) {
  const auto data = write_gaussians(15, 3, 4);
  ASSERT_EQ(run_cli(train_args(data)).code, 0);
  auto r = run_cli({"mi", "--model", path("model.json"), "--data", data, "--manifest", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto model = std::get<LinearModel>(load_model(path("model.json")));
  const auto ds = load_csv(data, LabelColumn::last());
  const auto est = mutual_information(Responses(responses(model, ds.features), ds.labels), model.sigma);
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["mi"].get<double>(), est.mi, 1e-12);
  EXPECT_NEAR(j["h_f"].get<double>(), est.h_f, 1e-12);
  EXPECT_EQ(j["sigma"].get<double>(), model.sigma.value());
}

TEST_F(Cli, RocAndPrSweeps) {
  testutil::write_text(path("perfect.csv"), "response,label\n0.9,1\n0.8,1\n0.7,-1\n0.1,-1\n");
  auto r = run_cli({"roc", "--data", path("perfect.csv"), "--out", path("roc.csv"), "--manifest", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "AUC 1\n");
  EXPECT_EQ(testutil::read_text(path("roc.csv")).substr(0, 18), "threshold,fpr,tpr\n");

  testutil::write_text(path("mixed.csv"), "response,label\n0.8,1\n0.3,1\n0.5,-1\n0.1,-1\n");
  r = run_cli({"roc", "--data", path("mixed.csv"), "--out", path("roc.csv"), "--manifest", path("m.json")});
  EXPECT_EQ(r.out, "AUC 0.75\n");

  r = run_cli({"roc", "--data", path("mixed.csv"), "--pr", "--out", path("pr.csv"), "--manifest", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pr = testutil::read_text(path("pr.csv"));
  EXPECT_EQ(pr.substr(0, pr.find('\n')), "threshold,recall,precision");
  EXPECT_NE(pr.find("inf,0,undefined"), std::string::npos) << pr;
}
