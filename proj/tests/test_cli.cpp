#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "slc/cli.hpp"

using namespace slc;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("slc_cli_test_" + name);
  fs::remove_all(d);
  return d;
}

std::vector<std::string> bst_args(const fs::path& out) {
  const std::string c = SLC_CORPUS_DIR;
  return {"--spec", c + "/bst/bst.sl", "--program", c + "/bst/remove.ir", "--entry", "remove", "--out", out.string()};
}

struct Run {
  int rc;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  int rc = run_cli(args, o, e);
  return {rc, o.str(), e.str()};
}

}  // namespace

TEST(Cli, MissingEntryIsUsageError) {
  auto args = bst_args(fresh_dir("missing"));
  args.erase(args.begin() + 4, args.begin() + 6);
  EXPECT_EQ(run(args).rc, kExitError);
}

TEST(Cli, BadIntDomain) {
  for (const char* d : {"5:1", "abc", "1:", "-3"}) {
    auto args = bst_args(fresh_dir("domain"));
    args.push_back(std::string("--int-domain=") + d);
    auto r = run(args);
    EXPECT_EQ(r.rc, kExitError) << d;
    EXPECT_NE(r.err.find("--int-domain"), std::string::npos) << d;
  }
}

TEST(Cli, UnknownEntry) {
  auto args = bst_args(fresh_dir("entry"));
  args[5] = "nosuch";
  EXPECT_EQ(run(args).rc, kExitError);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).rc, kExitOk); }

TEST(Cli, BstFullCoverage) {
  fs::path out = fresh_dir("bst");
  auto r = run(bst_args(out));
  ASSERT_EQ(r.rc, kExitOk) << r.err;
  for (const char* f : {"suite.json", "coverage.json", "coverage.txt", "tree.dot", "log.txt", "timing.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  json c = json::parse(read_file(out / "coverage.json"));
  EXPECT_DOUBLE_EQ(c["percent"].get<double>(), 100.0);
  EXPECT_TRUE(c["goal_reached"].get<bool>());
  json s = json::parse(read_file(out / "suite.json"));
  EXPECT_EQ(s["entry"], "remove");
  ASSERT_FALSE(s["tests"].empty());
  for (const auto& t : s["tests"]) {
    EXPECT_TRUE(t["valid"].get<bool>());
    EXPECT_EQ(t["steps"].back()["op"], "call");
  }
}

TEST(Cli, SpecOnlyMakesNoConcolicCalls) {
  fs::path out = fresh_dir("speconly");
  auto args = bst_args(out);
  args.insert(args.end(), {"--spec-only", "--unfold-depth", "2"});
  ASSERT_EQ(run(args).rc, kExitOk);
  json c = json::parse(read_file(out / "coverage.json"));
  EXPECT_EQ(c["solver_calls"]["concolic"].get<std::size_t>(), 0U);
  EXPECT_GT(c["solver_calls"]["spec"].get<std::size_t>(), 0U);
  EXPECT_EQ(c["mode"], "spec-only");
}

// Reports other than timing.json are byte-identical across runs.
TEST(Cli, Deterministic) {
  fs::path a = fresh_dir("det_a");
  fs::path b = fresh_dir("det_b");
  auto args_a = bst_args(a);
  auto args_b = bst_args(b);
  args_a.push_back("--exhaustive");
  args_b.push_back("--exhaustive");
  args_a.insert(args_a.end(), {"--max-iterations", "30"});
  args_b.insert(args_b.end(), {"--max-iterations", "30"});
  int ra = run(args_a).rc;
  int rb = run(args_b).rc;
  EXPECT_EQ(ra, rb);
  for (const char* f : {"suite.json", "coverage.json", "coverage.txt", "tree.dot"}) {
    EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
  }
}

TEST(Cli, BudgetExhaustionWritesPartialOutputs) {
  fs::path out = fresh_dir("budget");
  auto args = bst_args(out);
  args.insert(args.end(), {"--exhaustive", "--max-iterations", "1"});
  ASSERT_EQ(run(args).rc, kExitBudget);
  json c = json::parse(read_file(out / "coverage.json"));
  EXPECT_TRUE(c["budget_exhausted"].get<bool>());
  EXPECT_TRUE(fs::exists(out / "suite.json"));
}

TEST(Cli, JsonReportOnStdout) {
  fs::path out = fresh_dir("json");
  auto args = bst_args(out);
  args.insert(args.end(), {"--report", "json"});
  auto r = run(args);
  ASSERT_EQ(r.rc, kExitOk);
  EXPECT_EQ(json::parse(r.out)["entry"], "remove");
}
