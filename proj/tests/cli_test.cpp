#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#ifndef GDOF_CLI_PATH
#error "GDOF_CLI_PATH must name the gdof executable"
#endif
#ifndef GDOF_CONFIG_DIR
#error "GDOF_CONFIG_DIR must point at configs/"
#endif

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(GDOF_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(GDOF_CONFIG_DIR) + "/" + name; }

class TempFile {
 public:
  explicit TempFile(const std::string& name, const std::string& content = "")
      : path_(std::filesystem::temp_directory_path() / ("gdof_cli_test_" + name)) {
    if (!content.empty()) std::ofstream(path_) << content;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  [[nodiscard]] std::string str() const { return path_.string(); }
  [[nodiscard]] std::string read() const {
    std::ifstream in(path_);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

 private:
  std::filesystem::path path_;
};

TEST(Eval, TextAndJson) {
  const auto text = run("eval -K 3 -M 2 -N 3 -a 0.7");
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("sum_gdof 3.9\n"), std::string::npos);
  EXPECT_NE(text.out.find("b2_plus -\n"), std::string::npos);

  const auto j = run("eval -K 3 -M 3 -N 2 -a 2 --format json");
  ASSERT_EQ(j.code, 0);
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(j.out)["result"]["sum_gdof"].get<double>(), 4.0);
}

TEST(Eval, ErrorCodes) {
  EXPECT_EQ(run("eval -K 3 -M 2 -N 3").code, 2);            // missing alpha
  EXPECT_EQ(run("eval -K 3 -M 2 -N 3 -a abc").code, 2);     // not a number
  EXPECT_EQ(run("eval -K 1 -M 2 -N 3 -a 0.5").code, 1);     // K < 2
  EXPECT_EQ(run("eval -K 3 -M 2 -N 3 -a -0.5").code, 1);    // negative alpha
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Curve, SchemaAndBreakpoints) {
  const auto r = run("curve -K 3 -M 1 -N 1 --alpha-start 0 --alpha-stop 3 --alpha-step 0.25");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# schema=1");
  std::getline(in, line);
  EXPECT_EQ(line, "alpha,sum_gdof,active_branch,b1,b1_plus,b2,b2_plus,b3");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 13);
  EXPECT_NE(r.out.find("\n0,3,weak,3,,3,,3\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n0.5,1.5,weak,"), std::string::npos);
  EXPECT_NE(r.out.find("\n0.75,1.5,moderate_pair,"), std::string::npos);
  EXPECT_NE(r.out.find("\n3,3,strong,,,,3,3\n"), std::string::npos);
}

TEST(Curve, SinglePointAndErrors) {
  const auto r = run("curve -K 3 -M 3 -N 2 --alpha-start 2 --alpha-stop 2 --alpha-step 0.1");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\n2,4,strong,"), std::string::npos);
  EXPECT_EQ(run("curve -K 3 -M 1 -N 1 --alpha-start 1 --alpha-stop 0").code, 1);
  EXPECT_EQ(run("curve -K 3 -M 1 -N 1 --alpha-step 0").code, 1);
  EXPECT_EQ(run("curve -K 3 -M 1 -N 1 --out /nonexistent/dir/curve.csv").code, 1);
  EXPECT_EQ(run("curve -K 3 -M 1 -N 1 --format xml").code, 2);
}

TEST(Curve, Deterministic) {
  const std::string args = "curve -K 4 -M 2 -N 3 --alpha-step 0.01";
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Plan, MatchesFormula) {
  TempFile out("plan.json");
  ASSERT_EQ(run("plan -K 3 -M 2 -N 3 -a 0.4 --out " + out.str()).code, 0);
  const auto j = nlohmann::json::parse(out.read());
  EXPECT_TRUE(j["validation"]["match"].get<bool>());
  EXPECT_EQ(j["plan"]["construction"], "rate_splitting_weak");

  const auto zf = nlohmann::json::parse(run("plan -K 2 -M 2 -N 4 -a 0.5").out);
  EXPECT_EQ(zf["plan"]["construction"], "zero_forcing");
  EXPECT_TRUE(zf["validation"]["match"].get<bool>());
}

TEST(CheckMac, Verdicts) {
  const auto single = run("check-mac --problem " + config("mac_single_user_problem.json") + " --tuple " +
                          config("mac_single_user_tuple.json") + " --brute-force");
  ASSERT_EQ(single.code, 0);
  const auto j = nlohmann::json::parse(single.out);
  EXPECT_TRUE(j["verdict"]["achievable"].get<bool>());
  EXPECT_TRUE(j["brute_force_achievable"].get<bool>());

  const auto rx = nlohmann::json::parse(
      run("check-mac --problem " + config("mac_receiver_problem.json") + " --tuple " + config("mac_receiver_tuple.json")).out);
  EXPECT_TRUE(rx["verdict"]["achievable"].get<bool>());

  TempFile over("over.json", R"({"d": [1.5]})");
  const auto bad = nlohmann::json::parse(run("check-mac --problem " + config("mac_single_user_problem.json") + " --tuple " + over.str()).out);
  EXPECT_FALSE(bad["verdict"]["achievable"].get<bool>());
}

TEST(CheckMac, InputErrors) {
  TempFile broken("broken.json", "{\n  \"d\": [1.0,\n");
  EXPECT_EQ(run("check-mac --problem " + config("mac_single_user_problem.json") + " --tuple " + broken.str()).code, 2);
  TempFile wrong_key("wrong_key.json", R"({"dd": [1.0]})");
  EXPECT_EQ(run("check-mac --problem " + config("mac_single_user_problem.json") + " --tuple " + wrong_key.str()).code, 2);
  TempFile mismatch("mismatch.json", R"({"d": [1.0, 2.0]})");
  EXPECT_EQ(run("check-mac --problem " + config("mac_single_user_problem.json") + " --tuple " + mismatch.str()).code, 2);
  EXPECT_EQ(run("check-mac --problem /nonexistent.json --tuple " + config("mac_single_user_tuple.json")).code, 1);

  TempFile big_problem("big.json", R"({"M1": 21, "M2": 0, "alpha": 1, "eta": [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0], "noise_levels": [0], "N": 1})");
  TempFile big_tuple("big_tuple.json", R"({"d": [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]})");
  EXPECT_EQ(run("check-mac --problem " + big_problem.str() + " --tuple " + big_tuple.str()).code, 0);
  EXPECT_EQ(run("check-mac --problem " + big_problem.str() + " --tuple " + big_tuple.str() + " --brute-force").code, 3);
}

TEST(Ais, SisoHalfConfig) {
  TempFile out("ais.json");
  ASSERT_EQ(run("ais --config " + config("siso_half.json") + " --out " + out.str()).code, 0);
  const auto j = nlohmann::json::parse(out.read());
  EXPECT_NEAR(j["fitted_slope"].get<double>(), 0.5, 0.15);
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 1095324485U);
  EXPECT_EQ(j["points"].size(), 5U);
}

TEST(Ais, SeedEchoAndDeterminism) {
  const std::string args = "ais --config " + config("siso_half.json") + " --seed 77 --threads 2";
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(nlohmann::json::parse(a.out)["seed"].get<std::uint64_t>(), 77U);
}

TEST(Ais, BudgetAndParseErrors) {
  EXPECT_EQ(run("ais --config " + config("siso_half.json") + " --budget 10").code, 3);
  TempFile broken("broken_cfg.json", "{ \"instance\": }");
  EXPECT_EQ(run("ais --config " + broken.str()).code, 2);
  TempFile bad_instance("bad_instance.json",
                        R"({"instance": {"eta": 1, "groups": [{"streams": 2, "level1": 1, "level2": 0}], "N1": 2, "N2": 2}})");
  EXPECT_EQ(run("ais --config " + bad_instance.str()).code, 2);
}

}  // namespace
