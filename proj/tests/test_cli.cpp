#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(LANCASTER_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lancaster_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string file(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kSmall = "--n 80 --reps 4 --bootstraps 30 --seed 9";

}  // namespace

TEST_F(CliTest, HelpSucceeds) {
  const auto r = run_cli("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--median-heuristic"), std::string::npos);
  EXPECT_NE(r.out.find("n-1"), std::string::npos);
}

TEST_F(CliTest, PowerCurveCsvToStdout) {
  const auto r = run_cli("--experiment power_weak_pairwise --grid 0,1 " + kSmall);
  ASSERT_EQ(r.code, 0);
  const auto rows = lancaster::io::results_from_csv(r.out);
  EXPECT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].replications, 4u);
}

TEST_F(CliTest, OutputFileJsonAndPlot) {
  const auto r = run_cli("--experiment power_strong_pairwise --grid 0,0.2 --format json --out " + file("r.json") +
                         " --plot " + file("r.svg") + " " + kSmall);
  ASSERT_EQ(r.code, 0);
  const auto rows = lancaster::io::results_from_json(nlohmann::json::parse(slurp(file("r.json"))));
  EXPECT_EQ(rows.size(), 8u);
  EXPECT_NE(slurp(file("r.svg")).find("<polyline"), std::string::npos);
}

TEST_F(CliTest, ByteIdenticalAcrossWorkers) {
  const std::string base = "--experiment fpr_study --grid 0.1,0.5 " + kSmall;
  ASSERT_EQ(run_cli(base + " --workers 1 --out " + file("a.csv")).code, 0);
  ASSERT_EQ(run_cli(base + " --workers 4 --out " + file("b.csv")).code, 0);
  EXPECT_EQ(slurp(file("a.csv")), slurp(file("b.csv")));
}

TEST_F(CliTest, InputErrorsExitTwo) {
  EXPECT_EQ(run_cli("--experiment nonsense").code, 2);
  EXPECT_EQ(run_cli("--experiment fpr_study --grid 0.5,1.0 " + kSmall).code, 2);
  EXPECT_EQ(run_cli("--correction bogus").code, 2);
  EXPECT_EQ(run_cli("--alpha 2 " + kSmall).code, 2);
  EXPECT_EQ(run_cli("--sigma-x -1 " + kSmall).code, 2);
  EXPECT_EQ(run_cli("--median-heuristic --sigma-x 2").code, 2);
  EXPECT_EQ(run_cli("--unknown-flag").code, 2);
  EXPECT_EQ(run_cli("--reps 0 --grid 0 --n 50").code, 2);
}

TEST_F(CliTest, UnwritableOutputExitsThree) {
  EXPECT_EQ(run_cli("--grid 0 " + kSmall + " --out " + file("missing/dir/r.csv")).code, 3);
}

TEST_F(CliTest, SingleTestOnCsvWithShift) {
  std::ofstream csv(file("levels.csv"));
  csv << "t,a,b,c\n";
  lancaster::Stream s(4);
  const auto t = lancaster::generate({lancaster::ArKind::weak_pairwise, 200, 2.0}, s);
  double la = 0, lb = 0, lc = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    la += t.x()[i][0];
    lb += t.y()[i][0];
    lc += t.z()[i][0];
    csv << i << ',' << la << ',' << lb << ',' << lc << '\n';
  }
  csv.close();
  const auto r = run_cli("--experiment single_test --input " + file("levels.csv") +
                         " --columns a,b,c --rows 0:150 --shift c:20 --bootstraps 50 --seed 1");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n"].get<std::size_t>(), 150u);
  EXPECT_EQ(j["pairwise_hsic"].size(), 3u);
  EXPECT_TRUE(j["lancaster"].contains("reject"));

  EXPECT_EQ(run_cli("--experiment single_test --input " + file("levels.csv") + " --columns a,b,zz").code, 2);
  EXPECT_EQ(run_cli("--experiment single_test --input " + file("levels.csv") + " --columns a,b").code, 2);
  EXPECT_EQ(run_cli("--experiment single_test --input " + file("levels.csv") + " --columns a,b,c --rows 0:500").code, 2);
  EXPECT_EQ(run_cli("--experiment single_test --input " + file("levels.csv") + " --columns a,b,c --shift c:x").code,
            2);
  EXPECT_EQ(run_cli("--experiment single_test --input " + file("nope.csv") + " --columns a,b,c").code, 3);
}

TEST_F(CliTest, SingleTestOnGeneratedData) {
  const auto r = run_cli("--experiment single_test --generator strong_pairwise --grid 0.5 --n 200 --bootstraps 40");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["n"].get<std::size_t>(), 200u);
}
