#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tree_ot/cli.hpp"

using namespace tree_ot::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "tree_ot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const char* name) { return (fs::path(TREE_OT_SCENARIO_DIR) / name).string(); }

fs::path scratch(const char* name) {
  auto dir = fs::temp_directory_path() / "tree_ot_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST(Cli, Tp1SweepSucceeds) {
  auto r = invoke({"check-tp1", "--max-ids", "2"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("0 violations"), std::string::npos) << r.out;
  auto j = invoke({"--format", "json", "check-tp1", "--max-ids", "1"});
  ASSERT_EQ(j.code, kOk);
  auto parsed = nlohmann::json::parse(j.out);
  EXPECT_EQ(parsed["violations"], 0);
  EXPECT_EQ(parsed["trees"], 5);
}

TEST(Cli, Tp2WithItStarSample) {
  auto r = invoke({"check-tp2", "--max-ids", "1", "--itstar-samples", "50", "--itstar-size", "3"});
  EXPECT_EQ(r.code, kOk) << r.out << r.err;
}

TEST(Cli, LegacyAndFalsifierSucceed) {
  EXPECT_EQ(invoke({"check-legacy", "--max-edges", "2", "--tp2-max-edges", "1"}).code, kOk);
  auto r = invoke({"--format", "json", "falsify-del1", "--depth", "1"});
  ASSERT_EQ(r.code, kOk) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["satisfying"], 0);
  EXPECT_TRUE(j["exhausted"].get<bool>());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kUsage);
  EXPECT_EQ(invoke({"check-tp1", "--bogus"}).code, kUsage);
  EXPECT_EQ(invoke({"--format", "yaml", "check-tp1"}).code, kUsage);
  EXPECT_EQ(invoke({"fuzz", "--mode", "sideways"}).code, kUsage);
  auto r = invoke({"simulate", scratch("missing.json").string()});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST(Cli, MalformedScenarioIsUsageError) {
  auto p = scratch("bad.json");
  write(p, R"({"sites": 1, "script": [{"site": 3, "op": {"kind": "add", "parent": "data"}}]})");
  EXPECT_EQ(invoke({"simulate", p.string()}).code, kUsage);
  write(p, "{not json");
  EXPECT_EQ(invoke({"simulate", p.string()}).code, kUsage);
}

TEST(Cli, SimulateIsDeterministic) {
  for (const char* name : {"mv-cycle.json", "edit-under-delete.json", "random-mixed.json"}) {
    auto a = invoke({"--format", "json", "simulate", scenario(name)});
    auto b = invoke({"--format", "json", "simulate", scenario(name)});
    ASSERT_EQ(a.code, kOk) << name << ": " << a.err;
    EXPECT_EQ(a.out, b.out) << name;
  }
  auto seeded = invoke({"simulate", scenario("random-mixed.json"), "--seed", "5"});
  EXPECT_EQ(seeded.code, kOk);
  EXPECT_NE(seeded.out, invoke({"simulate", scenario("random-mixed.json")}).out);
}

TEST(Cli, ReplayReproducesSavedReport) {
  auto report = scratch("report.json");
  auto r = invoke({"--format", "json", "-o", report.string(), "simulate", scenario("random-mixed.json")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(invoke({"replay", report.string()}).code, kOk);

  auto j = nlohmann::json::parse(std::ifstream(report));
  j["replicas"][0]["state"] = "tampered";
  auto edited = scratch("edited.json");
  write(edited, j.dump(2));
  EXPECT_EQ(invoke({"replay", edited.string()}).code, kFindings);
}

TEST(Cli, FuzzReportsFindingsThroughExitCode) {
  EXPECT_EQ(invoke({"fuzz", "--runs", "20", "--mode", "word"}).code, kOk);
  auto r = invoke({"--format", "json", "fuzz", "--runs", "200", "--mode", "mv-cycle", "--no-shrink"});
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(r.code, j["diverged"].get<int>() > 0 ? kFindings : kOk);
}
