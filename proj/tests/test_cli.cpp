#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dyncomm/dyncomm.hpp"

namespace fs = std::filesystem;
using namespace dyncomm;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("dyncomm_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI with stdout captured; returns the exit status.
  int run(const std::string& args, std::string* out = nullptr, const std::string& env = "") {
    const fs::path log = dir_ / "stdout.txt";
    const std::string cmd = env + " " + std::string(DYNCOMM_CLI) + " " + args + " > " + log.string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    if (out) *out = read(log);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kFast = " --samples-first 15 --samples-later 10";

}  // namespace

TEST_F(Cli, GeneratePrintsSeedAndKSeries) {
  std::string out;
  ASSERT_EQ(run("generate --preset desk-birthdeath --seed 5 --out " + p("g"), &out), 0);
  EXPECT_NE(out.find("seed=5"), std::string::npos);
  EXPECT_NE(out.find("k_series 4 5 4 4 5 4"), std::string::npos);
  EXPECT_TRUE(fs::exists(p("g/network.txt")));
  EXPECT_TRUE(fs::exists(p("g/truth.txt")));
  EXPECT_NE(read(p("g/meta.txt")).find("seed=5"), std::string::npos);
}

TEST_F(Cli, GenerateIsByteDeterministic) {
  ASSERT_EQ(run("generate --preset desk-birthdeath --seed 8 --out " + p("a")), 0);
  ASSERT_EQ(run("generate --preset desk-birthdeath --seed 8 --out " + p("b")), 0);
  EXPECT_EQ(read(p("a/network.txt")), read(p("b/network.txt")));
  EXPECT_EQ(read(p("a/truth.txt")), read(p("b/truth.txt")));
}

TEST_F(Cli, GenerateTable2Preset) {
  std::string out;
  ASSERT_EQ(run("generate --preset birthdeath-t2 --seed 1 --out " + p("t2"), &out), 0);
  auto net = load_dynamic(p("t2/network.txt"));
  EXPECT_EQ(net.size(), 9u);
  EXPECT_EQ(net.snapshots[0].num_nodes(), 500u);
  EXPECT_EQ(load_covers(p("t2/truth.txt")).size(), 9u);
}

TEST_F(Cli, GenerateRejectsInvalidSchedule) {
  std::ofstream(p("bad.sched")) << "2 explode\n";
  EXPECT_NE(run("generate --schedule " + p("bad.sched") + " --snapshots 3 --out " + p("x")), 0);
  EXPECT_FALSE(fs::exists(p("x")));
  std::ofstream(p("late.sched")) << "9 birth\n";
  EXPECT_NE(run("generate --schedule " + p("late.sched") + " --snapshots 3 --out " + p("y")), 0);
}

TEST_F(Cli, GenerateHonoursSeedFromEnvironment) {
  std::string out;
  ASSERT_EQ(run("generate --out " + p("e"), &out, "DYNCOMM_SEED=42"), 0);
  EXPECT_NE(out.find("seed=42"), std::string::npos);
  ASSERT_EQ(run("generate --seed 3 --out " + p("f"), &out, "DYNCOMM_SEED=42"), 0);
  EXPECT_NE(out.find("seed=3"), std::string::npos);
}

TEST_F(Cli, DetectWithTruthFillsNmi) {
  ASSERT_EQ(run("generate --preset desk-birthdeath --snapshots 3 --seed 2 --out " + p("g")), 0);
  std::string out;
  ASSERT_EQ(run("detect --input " + p("g/network.txt") + " --truth " + p("g/truth.txt") + " --seed 4 --out " +
                    p("d") + kFast,
                &out),
            0);
  EXPECT_NE(out.find("seed=4"), std::string::npos);
  std::istringstream csv(read(p("d/metrics.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,nmi,modularity,k_detected");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_EQ(line.find(",,"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 3);
  EXPECT_EQ(load_covers(p("d/cover.txt")).size(), 3u);
}

TEST_F(Cli, DetectWithoutTruthLeavesNmiEmpty) {
  ASSERT_EQ(run("generate --seed 2 --out " + p("g")), 0);
  ASSERT_EQ(run("detect --input " + p("g/network.txt") + " --out " + p("d") + kFast), 0);
  std::istringstream csv(read(p("d/metrics.csv")));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("1,,", 0), 0u) << line;
}

TEST_F(Cli, DetectIsDeterministicAndChainsWork) {
  ASSERT_EQ(run("generate --seed 2 --out " + p("g")), 0);
  ASSERT_EQ(run("detect --input " + p("g/network.txt") + " --chains 3 --seed 6 --out " + p("a") + kFast), 0);
  ASSERT_EQ(run("detect --input " + p("g/network.txt") + " --chains 3 --seed 6 --out " + p("b") + kFast), 0);
  EXPECT_EQ(read(p("a/cover.txt")), read(p("b/cover.txt")));
  EXPECT_NE(read(p("a/meta.txt")).find("chains=3"), std::string::npos);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  ASSERT_EQ(run("generate --seed 2 --out " + p("g")), 0);
  std::ofstream(p("run.cfg")) << "# manifest\nalpha = 0.5\nseed = 9\nsamples-first = 5\n";
  ASSERT_EQ(run("detect --config " + p("run.cfg") + " --input " + p("g/network.txt") + " --seed 4 --out " + p("d")),
            0);
  const auto meta = read(p("d/meta.txt"));
  EXPECT_NE(meta.find("alpha=0.5"), std::string::npos);
  EXPECT_NE(meta.find("samples_first=5"), std::string::npos);
  EXPECT_NE(meta.find("seed=4"), std::string::npos);
  std::ofstream(p("bad.cfg")) << "colour=blue\n";
  EXPECT_NE(run("detect --config " + p("bad.cfg") + " --input " + p("g/network.txt") + " --out " + p("e")), 0);
}

TEST_F(Cli, DetectBadInputFailsWithoutOutput) {
  std::ofstream(p("bad.txt")) << "1 0 1\n1 2 2\n";
  EXPECT_NE(run("detect --input " + p("bad.txt") + " --out " + p("d")), 0);
  EXPECT_FALSE(fs::exists(p("d")));
  EXPECT_NE(read(dir_ / "stderr.txt").find("line 2"), std::string::npos);
  EXPECT_NE(run("detect --input " + p("missing.txt") + " --out " + p("d")), 0);
  EXPECT_NE(run("detect --input " + p("bad.txt") + " --alpha -1 --out " + p("d")), 0);
}

TEST_F(Cli, EvaluateTruthAgainstItself) {
  ASSERT_EQ(run("generate --preset desk-birthdeath --seed 3 --out " + p("g")), 0);
  std::string out;
  ASSERT_EQ(run("evaluate --cover " + p("g/truth.txt") + " --truth " + p("g/truth.txt") + " --input " +
                    p("g/network.txt"),
                &out),
            0);
  std::istringstream csv(out);
  std::string line;
  std::getline(csv, line);
  std::vector<std::size_t> ks;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string t, nmi, q, k;
    std::getline(row, t, ',');
    std::getline(row, nmi, ',');
    std::getline(row, q, ',');
    std::getline(row, k, ',');
    EXPECT_EQ(nmi, "1");
    ks.push_back(std::stoul(k));
  }
  EXPECT_EQ(ks, (std::vector<std::size_t>{4, 5, 4, 4, 5, 4}));
}

TEST_F(Cli, EvaluateAggregatesRuns) {
  ASSERT_EQ(run("generate --seed 3 --out " + p("g")), 0);
  ASSERT_EQ(run("detect --input " + p("g/network.txt") + " --seed 1 --out " + p("a") + kFast), 0);
  ASSERT_EQ(run("detect --input " + p("g/network.txt") + " --seed 2 --out " + p("b") + kFast), 0);
  std::string out;
  ASSERT_EQ(run("evaluate --aggregate --cover " + p("a/cover.txt") + " --cover " + p("b/cover.txt") + " --truth " +
                    p("g/truth.txt") + " --input " + p("g/network.txt") + " --out " + p("agg.csv"),
                &out),
            0);
  EXPECT_NE(out.find("runs=2"), std::string::npos);
  EXPECT_NE(out.find("nmi mean="), std::string::npos);
  EXPECT_EQ(read(p("agg.csv")).rfind("t,nmi_mean,nmi_std,modularity_mean,modularity_std,k_mean\n", 0), 0u);
  EXPECT_NE(run("evaluate --cover " + p("a/cover.txt") + " --cover " + p("b/cover.txt") + " --input " +
                p("g/network.txt")),
            0);
}

TEST_F(Cli, EvaluateSnapshotMismatchFails) {
  ASSERT_EQ(run("generate --seed 3 --out " + p("g")), 0);
  std::ofstream(p("late.txt")) << "4 0 1 1\n";
  EXPECT_NE(run("evaluate --cover " + p("late.txt") + " --input " + p("g/network.txt") + " --out " + p("m.csv")),
            0);
  EXPECT_FALSE(fs::exists(p("m.csv")));
  EXPECT_NE(read(dir_ / "stderr.txt").find("snapshot mismatch"), std::string::npos);
}
