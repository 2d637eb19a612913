#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "xilab/cli.hpp"

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "xilab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = xilab::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("xilab_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string write(const std::string& name, const std::string& body) {
    const auto p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }
  fs::path dir_;
};

TEST_F(CliTest, ComputeMonotoneData) {
  std::string csv = "x,y\n";
  for (int i = 1; i <= 10; ++i) csv += std::to_string(i) + "," + std::to_string(2 * i) + "\n";
  const auto r = run({"compute", write("mono.csv", csv), "--alpha", "0.05"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n=10\n"), std::string::npos);
  EXPECT_NE(r.out.find("xi=0.727273\n"), std::string::npos);
  EXPECT_NE(r.out.find("z=3.63636\n"), std::string::npos);
  EXPECT_NE(r.out.find("reject=true\n"), std::string::npos);
}

TEST_F(CliTest, ComputeTiesNeedRandomPolicy) {
  const std::string path = write("ties.csv", "x,y\n1,1\n1,2\n2,3\n3,1\n");
  EXPECT_EQ(run({"compute", path}).code, 2);
  const auto a = run({"compute", path, "--tie-policy", "random", "--seed", "4"});
  const auto b = run({"compute", path, "--tie-policy", "random", "--seed", "4"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, MissingFileIsDataErrorNamingPath) {
  const auto r = run({"compute", "/no/such/file.csv"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/no/such/file.csv"), std::string::npos);
}

TEST_F(CliTest, MalformedCsvIsDataError) {
  EXPECT_EQ(run({"compute", write("bad.csv", "x,y\n1,abc\n")}).code, 2);
  EXPECT_EQ(run({"compute", write("nohdr.csv", "1,2\n3,4\n")}).code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"compute"}).code, 1);
  EXPECT_EQ(run({"theory", "--family", "mixture", "--r", "notanumber"}).code, 1);
}

TEST_F(CliTest, TheoryMixture) {
  const auto r = run({"theory", "--family", "mixture", "--r", "0.5", "--xi-g", "0.2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("xi=0.05\n"), std::string::npos);
  EXPECT_NE(r.out.find("xi_method=closed_form\n"), std::string::npos);
}

TEST_F(CliTest, TheoryPowerAndLocalPower) {
  const auto r = run({"theory", "--family", "mixture", "--r", "0.25", "--xi-g", "0.3", "--n", "4096", "--c0", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("local_power=0.599678\n"), std::string::npos);
  EXPECT_NE(r.out.find("asymptotic_power="), std::string::npos);
}

TEST_F(CliTest, TheoryRegimeFollowsBoundaryConstant) {
  const auto base = std::vector<std::string>{"theory", "--family", "gaussian", "--rho", "0.1", "--c0"};
  auto with = [&](const std::string& c0) {
    auto args = base;
    args.push_back(c0);
    return run(args).out;
  };
  EXPECT_NE(with("0").find("regime=null\n"), std::string::npos);
  EXPECT_NE(with("1.5").find("regime=critical\n"), std::string::npos);
  const std::string inf = with("inf");
  EXPECT_NE(inf.find("regime=consistent\n"), std::string::npos);
  EXPECT_NE(inf.find("local_power=1\n"), std::string::npos);
}

TEST_F(CliTest, TheoryBadParameterIsDataError) {
  EXPECT_EQ(run({"theory", "--family", "gaussian", "--rho", "2"}).code, 2);
  EXPECT_EQ(run({"theory", "--family", "gaussian"}).code, 2);
  EXPECT_EQ(run({"theory", "--family", "banana"}).code, 2);
}

TEST_F(CliTest, ExperimentWritesFileDeterministically) {
  const std::string cfg = write("cfg.json", R"({"kind":"power","model":{"family":"gaussian"},
    "n_grid":[30],"param_grid":[0.0,0.5],"replications":100,"master_seed":5})");
  const std::string out1 = (dir_ / "a.csv").string();
  const std::string out2 = (dir_ / "b.csv").string();
  EXPECT_EQ(run({"power", "--config", cfg, "--out", out1}).code, 0);
  EXPECT_EQ(run({"power", "--config", cfg, "--out", out2}).code, 0);
  std::ifstream a(out1), b(out2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_FALSE(sa.str().empty());
  EXPECT_EQ(sa.str(), sb.str());
  const auto stdout_run = run({"power", "--config", cfg});
  EXPECT_EQ(stdout_run.out, sa.str());
}

TEST_F(CliTest, ExperimentKindMismatchIsConfigError) {
  const std::string cfg = write("cfg.json", R"({"kind":"power","model":{"family":"gaussian"},
    "n_grid":[30],"param_grid":[0.0],"replications":100,"master_seed":5})");
  EXPECT_EQ(run({"nulldist", "--config", cfg}).code, 2);
  EXPECT_EQ(run({"power", "--config", (dir_ / "missing.json").string()}).code, 2);
}

TEST_F(CliTest, Version) {
  const auto r = run({"version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("xilab ", 0), 0u);
}

}  // namespace
