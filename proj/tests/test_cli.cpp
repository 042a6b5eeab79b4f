#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "ptf_test_cli";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PTF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void strip_timing(nlohmann::json& j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    j.erase("mean_wall_time_s");
    j.erase("max_wall_time_s");
    for (auto& [key, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { fs::create_directories(kDir); }
  static void TearDownTestSuite() { fs::remove_all(kDir); }
  static std::string path(const std::string& name) { return (kDir / name).string(); }
};

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run_cli(""), 64);
  EXPECT_EQ(run_cli("solve --input x.json --method simplex"), 64);
  EXPECT_EQ(run_cli("gen --m 8 --n 8 --seed 1 --out " + path("bad.json")), 64);
  EXPECT_FALSE(fs::exists(path("bad.json")));
}

TEST_F(Cli, MissingInput) {
  EXPECT_EQ(run_cli("solve --input " + path("does_not_exist.json")), 66);
}

TEST_F(Cli, MalformedInput) {
  std::ofstream(path("broken.json")) << R"({"m":1,"n":2,"A":[1,1],"b":[2]})";
  EXPECT_EQ(run_cli("solve --input " + path("broken.json")), 65);
}

TEST_F(Cli, UnwritableBenchDir) {
  // A directory cannot be created beneath a regular file.
  std::ofstream(path("plain_file")) << "x";
  EXPECT_EQ(run_cli("bench --count 1 --out " + path("plain_file") + "/out"), 73);
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run_cli("gen --m 8 --n 20 --seed 7 --out " + path("a.json")), 0);
  ASSERT_EQ(run_cli("gen --m 8 --n 20 --seed 7 --out " + path("b.json")), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  ASSERT_EQ(run_cli("gen --m 8 --n 20 --seed 8 --out " + path("c.json")), 0);
  EXPECT_NE(slurp(path("a.json")), slurp(path("c.json")));
}

TEST_F(Cli, GenThenSolveIsReproducible) {
  ASSERT_EQ(run_cli("gen --m 8 --n 20 --seed 7 --out " + path("g.json")), 0);
  ASSERT_EQ(run_cli("solve --input " + path("g.json") + " --report " + path("r1.json") +
                    " --trace " + path("t.csv")),
            0);
  ASSERT_EQ(run_cli("solve --input " + path("g.json") + " --report " + path("r2.json")), 0);
  auto a = nlohmann::json::parse(slurp(path("r1.json")));
  auto b = nlohmann::json::parse(slurp(path("r2.json")));
  EXPECT_EQ(a["termination"], "eps_reached");
  EXPECT_LE(a["final_gap"].get<double>(), 1e-7);
  strip_timing(a);
  strip_timing(b);
  EXPECT_EQ(a, b);
  std::istringstream trace(slurp(path("t.csv")));
  std::string header;
  std::getline(trace, header);
  EXPECT_EQ(header.rfind("k,kind,alpha,v0,gap,delta,psi", 0), 0u);
}

TEST_F(Cli, R1FiniteTerminationReportsBasis) {
  std::ofstream(path("r1.json"))
      << R"({"m":1,"n":2,"A":[1,1],"b":[2],"c":[1,2],"x0":[1,1],"s0":[1,2],"y0":[0]})";
  ASSERT_EQ(run_cli("solve --input " + path("r1.json") +
                    " --finite-termination --activation always --report " + path("rep.json")),
            0);
  const auto j = nlohmann::json::parse(slurp(path("rep.json")));
  EXPECT_EQ(j["termination"], "finite_term_success");
  EXPECT_EQ(j["exact"]["basis"], nlohmann::json::array({1}));
  EXPECT_EQ(j["exact"]["x"], nlohmann::json::array({2.0, 0.0}));
}

TEST_F(Cli, LooserEpsStopsEarlier) {
  std::ofstream(path("r1b.json"))
      << R"({"m":1,"n":2,"A":[1,1],"b":[2],"c":[1,2],"x0":[1,1],"s0":[1,2],"y0":[0]})";
  ASSERT_EQ(run_cli("solve --input " + path("r1b.json") + " --report " + path("tight.json")), 0);
  ASSERT_EQ(
      run_cli("solve --input " + path("r1b.json") + " --eps 1e-2 --report " + path("loose.json")),
      0);
  const auto tight = nlohmann::json::parse(slurp(path("tight.json")));
  const auto loose = nlohmann::json::parse(slurp(path("loose.json")));
  EXPECT_LT(loose["records"].size(), tight["records"].size());
  EXPECT_GT(loose["final_gap"].get<double>(), tight["final_gap"].get<double>());
}

TEST_F(Cli, BenchSmoke) {
  const std::string out = path("bench");
  fs::create_directories(out);
  ASSERT_EQ(run_cli("bench --count 2 --jobs 1 --out " + out), 0);
  std::istringstream csv(slurp(fs::path(out) / "cells.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 6);
}
