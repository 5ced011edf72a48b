#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(BCSP_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("bcsp_cli_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

const std::string kTriangle = R"({"n":3,"arity":2,"edges":[[0,1],[1,2],[0,2]]})";

}  // namespace

TEST(Cli, AnalyzePredicateNeq) {
  auto r = run("analyze-predicate --table NEQ");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["command"], "analyze-predicate");
  EXPECT_EQ(j["result"]["bias_independent"], true);
  EXPECT_EQ(j["result"]["exponent"], 1);
}

TEST(Cli, SolveExactTriangle) {
  auto in = write_temp("tri.json", kTriangle);
  auto r = run("solve --problem dks --backend exact --bias 0.6666666666666666 --input " + in);
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_NEAR(j["result"]["value"].get<double>(), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(j["seed"], 0);
  EXPECT_FALSE(j.contains("wall_time_s"));
}

TEST(Cli, TimingAddsWallTime) {
  auto r = run("--timing analyze-predicate --table AND2");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(json::parse(r.out).contains("wall_time_s"));
}

TEST(Cli, VerifyClRedPasses) {
  auto r = run("verify --claim cl-red --n-max 8");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["failed"], 0);
  EXPECT_GT(j["passed"].get<int>(), 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("solve --problem dks --bogus 1").code, 2);
  EXPECT_EQ(run("solve --problem nope --input x").code, 2);
}

TEST(Cli, MalformedInstanceNamesField) {
  auto in = write_temp("bad.json", R"({"n":2,"arity":2,"edges":[[0,7]]})");
  auto r = run("solve --problem dks --bias 0.5 --input " + in);
  EXPECT_EQ(r.code, 2);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["error"]["type"], "StructuralError");
  EXPECT_NE(j["error"]["message"].get<std::string>().find("'edges'"), std::string::npos);
  auto missing = write_temp("missing.json", R"({"arity":2,"edges":[]})");
  r = run("solve --problem dks --bias 0.5 --input " + missing);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(json::parse(r.out)["error"]["message"].get<std::string>().find("'n'"), std::string::npos);
}

TEST(Cli, DomainErrorsExitOne) {
  auto in = write_temp("tri2.json", kTriangle);
  auto r = run("solve --problem dks --backend exact --bias 0.5 --input " + in);
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.out)["error"]["type"], "DomainError");
  r = run(R"(gadget --test hypercube --params '{"R":30,"samples":10}')");
  EXPECT_EQ(r.code, 0);
  r = run("gadget gamma --rho 1.0 --mus 0.5,0.5");
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, GadgetReport) {
  auto r = run(R"(gadget --test hypercube --assignment dictator --params '{"r":2,"mu":0.1,"rho":0.5,"R":3,"samples":20000}')");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_NEAR(j["result"]["exact"].get<double>(), 0.0325, 1e-12);
  EXPECT_TRUE(j["result"].contains("stderr"));
  EXPECT_FALSE(j["config"]["params"].contains("threads"));
  auto g = json::parse(run("gadget gamma --rho 0.5 --mus 0.5,0.5").out);
  EXPECT_NEAR(g["result"]["probability"].get<double>(), 1.0 / 3.0, 1e-9);
}

TEST(Cli, ReportsAreReproducible) {
  auto in = write_temp("w.json",
                       R"({"n":8,"arity":3,"edges":[[0,1,2],[2,3,4],[4,5,6],[1,6,7],[0,3,7]],
                          "edge_weights":[1,2,1,3,1],"vertex_weights":[1,2,1,1,3,1,2,1]})");
  std::string cmd = "solve --problem dksh --bias 0.25 --seed 17 --input " + in;
  auto a = run("--threads 1 " + cmd);
  auto b = run("--threads 4 " + cmd);
  auto c = run("--threads 1 " + cmd);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, OutputFile) {
  auto path = (std::filesystem::temp_directory_path() / "bcsp_cli_test_out.json").string();
  auto r = run("-o " + path + " analyze-predicate --table OR2");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  json j = json::parse(in);
  EXPECT_EQ(j["result"]["bias_independent"], true);
}
