#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"

using ccvo::cli::cli_main;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ccvo");
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ccvo_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, UsageErrorsExitWithConfigCode) {
  EXPECT_EQ(run({}).code, ccvo::cli::kExitConfig);
  EXPECT_EQ(run({"--bogus"}).code, ccvo::cli::kExitConfig);
  EXPECT_EQ(run({"fly"}).code, ccvo::cli::kExitConfig);
  EXPECT_EQ(run({"run"}).code, ccvo::cli::kExitConfig);
  EXPECT_EQ(run({"verify", "--test", "nothing"}).code, ccvo::cli::kExitConfig);
  EXPECT_EQ(run({"run", "--scenario", "maze"}).code, ccvo::cli::kExitConfig);
  EXPECT_EQ(run({"run", "--scenario", "empty", "--k", "-1"}).code, ccvo::cli::kExitConfig);
  EXPECT_EQ(run({"batch", "--scenario", "empty", "--runs", "0"}).code, ccvo::cli::kExitConfig);
  EXPECT_EQ(run({"sweep-k", "--scenario", "empty", "--ks", "1,x"}).code, ccvo::cli::kExitConfig);
}

TEST(Cli, HelpSucceeds) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, ccvo::cli::kExitOk);
  EXPECT_NE(r.out.find("sweep-k"), std::string::npos);
}

TEST(Cli, ScenariosList) {
  const Result r = run({"scenarios", "list"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "empty\nstatic\ndynamic\ncross\nsocial\n");
}

TEST(Cli, RunWritesTrace) {
  const auto dir = scratch("run");
  const auto trace = dir / "trace.jsonl";
  const Result r = run({"run", "--scenario", "empty", "--seed", "3", "--trace", trace.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("outcome=success"), std::string::npos);
  std::ifstream in(trace);
  std::string first;
  ASSERT_TRUE(std::getline(in, first));
  EXPECT_NE(first.find("\"feasible_count\""), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, BatchWritesCsv) {
  const auto dir = scratch("batch");
  const Result r = run({"batch", "--scenario", "empty", "--runs", "3", "--workers", "1", "--out",
                        dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "runs.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
  EXPECT_NE(r.out.find("success=1.000"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, VerifySmall) {
  const Result r = run({"verify", "--test", "cantelli", "--configs", "4", "--samples", "20000"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(Cli, ConfigFileHandling) {
  const auto dir = scratch("config");
  const auto good = dir / "good.json";
  const auto bad = dir / "bad.json";
  std::ofstream(good) << R"({"planner": {"k": 0.7}})";
  std::ofstream(bad) << R"({"planner": {"k": )";
  const Result ok = run({"--config", good.string(), "config"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("\"k\": 0.7"), std::string::npos);
  EXPECT_EQ(run({"--config", bad.string(), "config"}).code, ccvo::cli::kExitConfig);
  EXPECT_EQ(run({"--config", (dir / "missing.json").string(), "config"}).code,
            ccvo::cli::kExitConfig);
  std::filesystem::remove_all(dir);
}

TEST(Cli, RandomArgumentsNeverCrash) {
  const std::vector<std::string> vocab{"run",  "batch", "sweep-k", "verify", "scenarios", "list",
                                       "config", "--scenario", "empty", "maze", "--k", "0", "-3",
                                       "1e400", "nan", "--runs", "--seed", "--ks", ",,", "--test",
                                       "moments", "--help", "--no-fov", "--n-tau", "", "--"};
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::uniform_int_distribution<int> len(0, 5);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> args;
    for (int j = len(rng); j > 0; --j) args.push_back(vocab[pick(rng)]);
    // Skip argument lists that would start long-running work.
    const bool heavy = std::find(args.begin(), args.end(), "batch") != args.end() ||
                       std::find(args.begin(), args.end(), "sweep-k") != args.end() ||
                       std::find(args.begin(), args.end(), "verify") != args.end();
    if (heavy) continue;
    const Result r = run(args);
    EXPECT_TRUE(r.code == 0 || r.code == 1 || r.code == 2);
  }
}
