#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "mdke/checkpoint.hpp"
#include "mdke/gram_io.hpp"

namespace mdke {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("mdke_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int mdke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    out_ = out.str();
    err_ = err.str();
    return code;
  }

  std::string sphere_data(std::size_t m = 6, std::size_t n = 30) {
    const auto p = path("sphere.jsonl");
    EXPECT_EQ(mdke({"synth", "--kind", "sphere", "--m", std::to_string(m), "--n", std::to_string(n), "--seed", "1",
                    "--out", p}),
              0)
        << err_;
    return p;
  }

  std::string two_class_data(double separation) {
    const auto p = path("two.jsonl");
    EXPECT_EQ(mdke({"synth", "--kind", "two-class", "--m-per-class", "10", "--n", "30", "--separation",
                    std::to_string(separation), "--seed", "2", "--out", p}),
              0)
        << err_;
    return p;
  }

  fs::path dir_;
  std::string out_;
  std::string err_;
};

TEST_F(CliTest, MissingDatasetIsUsageError) {
  EXPECT_EQ(mdke({"train", "--data", path("nope.jsonl"), "--out", path("c.json")}), 2);
  const auto e = json::parse(err_);
  EXPECT_NE(e["error"].get<std::string>().find("dataset not found"), std::string::npos);
  EXPECT_EQ(e["exit_code"], 2);
}

TEST_F(CliTest, UnknownFlagAndMissingSubcommand) {
  EXPECT_EQ(mdke({"train", "--bogus", "1"}), 2);
  EXPECT_EQ(mdke({}), 2);
  EXPECT_EQ(mdke({"fly"}), 2);
}

TEST_F(CliTest, HelpListsEveryFlag) {
  EXPECT_EQ(mdke({"train", "--help"}), 0);
  for (const char* flag : {"--config", "--seed", "--out", "--threads", "--data", "--steps", "--batch-distributions",
                           "--samples-per-distribution", "--lr", "--epsilon", "--gamma1", "--gamma2", "--log-every"})
    EXPECT_NE(out_.find(flag), std::string::npos) << flag;
  EXPECT_EQ(mdke({"classify", "--help"}), 0);
  EXPECT_NE(out_.find("--labels"), std::string::npos);
}

TEST_F(CliTest, TrainWritesCheckpointAndMetrics) {
  const auto data = sphere_data();
  const auto ckpt = path("c.json");
  ASSERT_EQ(mdke({"train", "--data", data, "--steps", "5", "--batch-distributions", "3", "--samples-per-distribution",
                  "8", "--seed", "4", "--out", ckpt}),
            0)
      << err_;
  EXPECT_EQ(load_checkpoint(ckpt).step_count, 5u);
  const auto metrics = slurp(path("c.metrics.csv"));
  EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 6);
  const auto summary = json::parse(out_);
  EXPECT_EQ(summary["step_count"], 5);
  EXPECT_TRUE(summary.contains("full_s2_nats"));
}

TEST_F(CliTest, TrainRerunIsByteIdentical) {
  const auto data = sphere_data();
  const std::vector<std::string> base{"train", "--data", data, "--steps", "10", "--batch-distributions", "4",
                                      "--seed", "9"};
  auto a = base;
  a.insert(a.end(), {"--out", path("a.json")});
  auto b = base;
  b.insert(b.end(), {"--out", path("b.json")});
  ASSERT_EQ(mdke(a), 0) << err_;
  ASSERT_EQ(mdke(b), 0) << err_;
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.metrics.csv")), slurp(path("b.metrics.csv")));
}

TEST_F(CliTest, ConfigFileAppliesAndFlagsWin) {
  const auto data = sphere_data();
  spit(path("cfg.json"), json{{"data", data}, {"steps", 7}, {"batch_distributions", 3}, {"seed", 2}}.dump());
  ASSERT_EQ(mdke({"train", "--config", path("cfg.json"), "--steps", "4", "--out", path("c.json")}), 0) << err_;
  EXPECT_EQ(load_checkpoint(path("c.json")).step_count, 4u);
  EXPECT_EQ(load_checkpoint(path("c.json")).seed, 2u);
  spit(path("bad.json"), json{{"data", data}, {"stepz", 7}}.dump());
  EXPECT_EQ(mdke({"train", "--config", path("bad.json"), "--out", path("d.json")}), 2);
  EXPECT_NE(err_.find("stepz"), std::string::npos);
}

TEST_F(CliTest, IdenticalEntriesGiveAllOnesGram) {
  const std::string line = R"({"id":"ID","samples":[[0.1,0.2],[0.3,-0.4],[1.0,0.0]]})";
  std::string text;
  for (const char* id : {"a", "b", "c"}) {
    std::string l = line;
    l.replace(l.find("ID"), 2, id);
    text += l + "\n";
  }
  spit(path("same.jsonl"), text);
  ASSERT_EQ(mdke({"gram", "--data", path("same.jsonl"), "--gamma1", "1", "--gamma2", "1", "--out", path("g.csv")}), 0)
      << err_;
  const auto g = load_gram_csv(path("g.csv"));
  EXPECT_TRUE((g.values.array() == 1.0).all());
  EXPECT_EQ(g.ids, (std::vector<std::string>{"a", "b", "c"}));
}

TEST_F(CliTest, SlicedWassersteinWithoutCheckpoint) {
  const auto data = sphere_data();
  ASSERT_EQ(mdke({"gram", "--data", data, "--family", "sw1", "--out", path("g.csv")}), 0) << err_;
  const auto g = load_gram_csv(path("g.csv"));
  EXPECT_EQ(g.size(), 6);
  EXPECT_TRUE((g.values.diagonal().array() == 1.0).all());
  EXPECT_TRUE((g.values - g.values.transpose()).isZero(0.0));
  EXPECT_GT(g.values.minCoeff(), 0.0);
}

TEST_F(CliTest, RepeatsWriteDistinctFiles) {
  const auto data = sphere_data();
  ASSERT_EQ(mdke({"gram", "--data", data, "--samples", "10", "--repeats", "2", "--seed", "5", "--out",
                  path("g.csv")}),
            0)
      << err_;
  ASSERT_TRUE(fs::exists(path("g.r0.csv")));
  ASSERT_TRUE(fs::exists(path("g.r1.csv")));
  EXPECT_NE(slurp(path("g.r0.csv")), slurp(path("g.r1.csv")));
}

TEST_F(CliTest, GramWithCheckpointRejectsMismatchedData) {
  const auto data = sphere_data();
  ASSERT_EQ(mdke({"train", "--data", data, "--steps", "2", "--batch-distributions", "3", "--out", path("c.json")}), 0);
  const auto other = path("four.jsonl");
  ASSERT_EQ(mdke({"synth", "--kind", "sphere", "--dim", "4", "--m", "3", "--n", "5", "--out", other}), 0);
  EXPECT_EQ(mdke({"gram", "--checkpoint", path("c.json"), "--data", other, "--out", path("g.csv")}), 2);
  EXPECT_NE(err_.find("mismatch"), std::string::npos);
  ASSERT_EQ(mdke({"gram", "--checkpoint", path("c.json"), "--data", data, "--out", path("g.csv")}), 0) << err_;
  EXPECT_EQ(load_gram_csv(path("g.csv")).size(), 6);
}

TEST_F(CliTest, ClassifySeparableTaskIsPerfect) {
  const auto data = two_class_data(5.0);
  ASSERT_EQ(mdke({"gram", "--data", data, "--out", path("g.csv")}), 0) << err_;
  ASSERT_EQ(mdke({"classify", "--gram", path("g.csv"), "--labels", data, "--seed", "1"}), 0) << err_;
  const auto r = json::parse(out_);
  EXPECT_DOUBLE_EQ(r["mean"].get<double>(), 1.0);
  EXPECT_EQ(r["split_accuracies"].size(), 5u);
  EXPECT_EQ(r["c_grid_size"], 50);
  EXPECT_TRUE(r.contains("best_C"));
  EXPECT_TRUE(r.contains("variance"));
}

TEST_F(CliTest, ClassifyIdMismatchIsUsageError) {
  const auto data = two_class_data(5.0);
  ASSERT_EQ(mdke({"gram", "--data", data, "--out", path("g.csv")}), 0) << err_;
  std::string labels;
  for (int i = 0; i < 20; ++i) labels += "x" + std::to_string(i) + "," + std::to_string(i % 2) + "\n";
  spit(path("labels.csv"), "id,label\n" + labels);
  EXPECT_EQ(mdke({"classify", "--gram", path("g.csv"), "--labels", path("labels.csv")}), 2);
  EXPECT_NE(err_.find("id"), std::string::npos);
}

TEST_F(CliTest, ClassifyRepeatsReportVariance) {
  const auto data = two_class_data(0.5);
  ASSERT_EQ(mdke({"gram", "--data", data, "--samples", "5", "--repeats", "3", "--seed", "3", "--out",
                  path("g.csv")}),
            0)
      << err_;
  ASSERT_EQ(mdke({"classify", "--gram", path("g.csv"), "--repeats", "3", "--labels", data, "--holdout-fraction",
                  "0.3", "--seed", "2"}),
            0)
      << err_;
  const auto r = json::parse(out_);
  EXPECT_EQ(r["repeats"], 3);
  EXPECT_EQ(r["heldout_accuracies"].size(), 3u);
  EXPECT_GE(r["heldout_variance"].get<double>(), 0.0);
}

TEST_F(CliTest, CheckFreshEncoderPasses) {
  const auto data = sphere_data();
  ASSERT_EQ(mdke({"check", "--data", data}), 0) << err_;
  const auto r = json::parse(out_);
  for (const char* key : {"s2_nats", "v_gram", "v_gap", "j_half", "bound_slack", "eigenvalues", "min_eigenvalue"})
    EXPECT_TRUE(r.contains(key)) << key;
  EXPECT_GE(r["bound_slack"].get<double>(), -1e-9);
  for (const auto& [name, ok] : r["checks"].items()) EXPECT_TRUE(ok.get<bool>()) << name;
}

TEST_F(CliTest, CheckFlagsCorruptedGram) {
  const auto data = sphere_data();
  ASSERT_EQ(mdke({"gram", "--data", data, "--out", path("g.csv")}), 0) << err_;
  auto g = load_gram_csv(path("g.csv"));
  ASSERT_EQ(mdke({"check", "--gram", path("g.csv")}), 0) << err_;
  g.values(0, 1) += 0.1;
  save_gram_csv(path("bad.csv"), g);
  EXPECT_EQ(mdke({"check", "--gram", path("bad.csv")}), 1);
  EXPECT_NE(err_.find("gram_file_symmetric"), std::string::npos);
}

TEST_F(CliTest, ToyEndpoints) {
  ASSERT_EQ(mdke({"toy", "--spreads", "1e-6", "0.1", "2", "--out", path("toy.csv")}), 0) << err_;
  std::istringstream in(slurp(path("toy.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 38), "spread,s2,v,avg_sq_norm,mixture_sq_nor");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  ASSERT_EQ(rows.size(), 3u);
  ASSERT_EQ(rows[0].size(), 11u);
  for (std::size_t k = 5; k < 11; ++k) EXPECT_NEAR(rows[0][k], 1.0 / 6.0, 0.1 / 6.0);
  EXPECT_GE(rows[0][1], rows[1][1] - 1e-3);
  EXPECT_GE(rows[1][1], rows[2][1] - 1e-3);
  EXPECT_LE(std::abs(rows[2][2]), 0.05);
}

}  // namespace
}  // namespace mdke
