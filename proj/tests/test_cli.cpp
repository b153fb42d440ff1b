#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nahm/cli.hpp"

using namespace nahm;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// A catalog with one true and one false identity.
std::filesystem::path write_catalog() {
  const auto path = std::filesystem::temp_directory_path() / "nahm_cli_test_catalog.txt";
  std::ofstream f(path);
  f << "[identity good]\nvars = [n]\nexponent = \"n^2\"\ndenoms = [q]\nrhs = \"1 / P(1,4;5)\"\n\n"
       "[identity bad]\nvars = [n]\nexponent = \"n^2\"\ndenoms = [q]\nrhs = \"1 / P(1,3;5)\"\n";
  return path;
}

}  // namespace

TEST(Cli, VerifySingle) {
  const CliResult r = run({"verify", "R.R.1", "--order", "50"});
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_EQ(r.out.rfind("PASS  R.R.1", 0), 0u);
  EXPECT_NE(r.out.find("1 passed, 0 failed"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  const CliResult r = run({"verify", "nosuch"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("unknown identity 'nosuch'"), std::string::npos);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "R.R.1", "--order", "x"}).code, kExitUsage);
  EXPECT_EQ(run({"eval", "P(1;1"}).code, kExitUsage);
  EXPECT_EQ(run({"bailey", "verify", "G9"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "And2(4,2)"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitPass);
}

TEST(Cli, FailureExitCodeAndDetails) {
  const auto cat = write_catalog();
  const CliResult r = run({"--catalog", cat.string(), "--output", "machine", "--no-timing", "verify", "all",
                     "--order", "10"});
  EXPECT_EQ(r.code, kExitFail);
  EXPECT_EQ(r.out, "bad\tFAIL\t10\t-\ngood\tPASS\t10\t-\n");
  EXPECT_NE(r.err.find("bad"), std::string::npos);
  const CliResult ff = run({"--catalog", cat.string(), "--fail-fast", "--threads", "1", "verify", "bad", "good"});
  EXPECT_EQ(ff.code, kExitFail);
  std::filesystem::remove(cat);
}

TEST(Cli, MachineOutputGolden) {
  const CliResult r = run({"--output", "machine", "--no-timing", "verify", "all", "--order", "30"});
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_EQ(r.out, slurp(std::filesystem::path(NAHM_SOURCE_DIR) / "tests/golden/verify_all_30.txt"));
}

TEST(Cli, ThreadCountDoesNotChangeOutput) {
  const std::vector<std::string> base = {"--output", "machine", "--no-timing"};
  auto with = [&](const char* threads) {
    std::vector<std::string> a = base;
    a.insert(a.end(), {"--threads", threads, "verify", "families", "--k-max", "3", "--order", "15"});
    return run(a);
  };
  const CliResult one = with("1");
  const CliResult four = with("4");
  EXPECT_EQ(one.code, kExitPass);
  EXPECT_EQ(one.out, four.out);
  EXPECT_FALSE(one.out.empty());
}

TEST(Cli, Expand) {
  const CliResult rhs = run({"expand", "table2.13.1", "--side", "rhs", "--order", "12"});
  EXPECT_EQ(rhs.code, kExitPass);
  EXPECT_EQ(rhs.out.substr(0, rhs.out.find('\n', rhs.out.find('\n') + 1) + 1), "order 48/4\n0/4 1\n");

  const CliResult lhs = run({"expand", "AG", "--k", "3", "--i", "2", "--side", "lhs", "--order", "10"});
  const CliResult rhs2 = run({"expand", "AG", "--k", "3", "--i", "2", "--side", "rhs", "--order", "10"});
  EXPECT_EQ(lhs.code, kExitPass);
  EXPECT_EQ(lhs.out, rhs2.out);

  const CliResult rr = run({"expand", "R.R.1", "--side", "lhs", "--order", "6"});
  EXPECT_EQ(rr.out, "order 24/4\n0/4 1\n4/4 1\n8/4 1\n12/4 1\n16/4 2\n20/4 2\n24/4 3\n");
}

TEST(Cli, Bailey) {
  EXPECT_EQ(run({"bailey", "verify", "G1star", "--n", "10", "--order", "30"}).code, kExitPass);
  EXPECT_EQ(run({"bailey", "chain", "G1star |> DJKLIM(q^(3/2))", "--equals", "G3", "--n", "12"}).code,
            kExitPass);
  EXPECT_EQ(run({"bailey", "chain", "G1 |> S3", "--against", "exam12-1", "--order", "20"}).code, kExitPass);
  EXPECT_EQ(run({"bailey", "chain", "G1 |> S1", "--equals", "G3", "--n", "3"}).code, kExitFail);
  EXPECT_EQ(run({"bailey", "lemma23", "--k", "6"}).code, kExitPass);
  const CliResult show = run({"bailey", "chain", "G1", "--show", "alpha", "--n", "2", "--order", "4"});
  EXPECT_EQ(show.code, kExitPass);
  EXPECT_NE(show.out.find("alpha 2\norder 16/4\n10/4 1\n14/4 1\n"), std::string::npos);
  EXPECT_EQ(show.out.find("beta"), std::string::npos);
}

TEST(Cli, ListEvalFamilies) {
  const CliResult l = run({"list", "--tag", "example13"});
  EXPECT_EQ(l.out, "eq-13-sum\ntable2.13.1\ntable2.13.2\ntable2.13.3\ntable2.13.4\n");
  const CliResult e = run({"eval", "1/P(1,4;5)", "--order", "5"});
  EXPECT_EQ(e.out, "order 20/4\n0/4 1\n4/4 1\n8/4 1\n12/4 1\n16/4 2\n20/4 2\n");
  const CliResult f = run({"families"});
  EXPECT_EQ(f.out.rfind("AG\tk >= 2, 1 <= i <= k\n", 0), 0u);
  EXPECT_EQ(run({"crosscheck", "table2.10.1"}).code, kExitPass);
}
