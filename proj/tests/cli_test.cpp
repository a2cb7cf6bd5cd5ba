#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <random>

#include "levers/decision.hpp"
#include "levers/io.hpp"

namespace levers {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("levers-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string fixture(const std::string& name) { return (fs::path(LEVERS_FIXTURES) / name).string(); }

Run levers(const std::string& args) {
  const auto err_path = scratch() / "stderr.txt";
  const auto command = std::string(LEVERS_CLI) + " " + args + " 2>" + err_path.string();
  Run run;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return run;
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) run.out.append(buffer.data(), n);
  const int raw = pclose(pipe);
  run.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  run.err = read_file(err_path);
  return run;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

TEST(Cli, AnalyzePathFixture) {
  const auto out = scratch() / "path-report.json";
  const auto run = levers("analyze " + fixture("path.json") + " --out " + quoted(out));
  ASSERT_EQ(run.status, 0) << run.err;
  const auto report = json::parse(read_file(out));
  ASSERT_EQ(report["configurations"].size(), 1u);
  EXPECT_EQ(report["configurations"][0]["members"], json::array({"a"}));
}

TEST(Cli, AnalyzeOutputIsTheLibraryReport) {
  for (const auto* name : {"path.json", "star.json", "cycle.json", "two_components.json"}) {
    const auto run = levers(std::string("analyze ") + fixture(name));
    ASSERT_EQ(run.status, 0) << name;
    EXPECT_EQ(run.out, serialize_report(analyze(parse_graph(read_file(fixture(name)))))) << name;
  }
}

TEST(Cli, ClassifyStar) {
  const auto run = levers("classify " + fixture("star.json") + " --json");
  ASSERT_EQ(run.status, 0);
  const auto classes = json::parse(run.out);
  EXPECT_EQ(classes["always"], json::array({"a"}));
  EXPECT_EQ(classes["sometimes"], json::array({"b", "c"}));
  EXPECT_EQ(classes["never"], json::array());
}

TEST(Cli, SelfLoopsExitTwo) {
  for (const auto* command : {"analyze", "classify"}) {
    const auto run = levers(std::string(command) + " " + fixture("self_loop.json"));
    EXPECT_EQ(run.status, 2) << command;
    EXPECT_NE(run.err.find("self-loops present on: a"), std::string::npos) << run.err;
  }
}

TEST(Cli, TruncationExitsThree) {
  const auto out = scratch() / "truncated.json";
  const auto run = levers("analyze " + fixture("star.json") + " --budget-configs 1 --out " + quoted(out));
  EXPECT_EQ(run.status, 3);
  const auto report = json::parse(read_file(out));
  EXPECT_TRUE(report["truncated"].get<bool>());
  EXPECT_EQ(report["configurations"].size(), 1u);
}

TEST(Cli, BadInputExitsOne) {
  const auto bad = scratch() / "bad.json";
  write_file(bad, R"({"factors":[{"id":"a"}],"influences":[{"source":"a","target":"X","sign":"Positive","strength":"Weak"}]})");
  const auto run = levers("analyze " + quoted(bad));
  EXPECT_EQ(run.status, 1);
  EXPECT_NE(run.err.find("influences[0].target"), std::string::npos) << run.err;
}

TEST(Cli, RankWithPerspective) {
  const auto report = scratch() / "star-report.json";
  ASSERT_EQ(levers("analyze " + fixture("star.json") + " --out " + quoted(report)).status, 0);
  auto run = levers("rank " + quoted(report) + " --csv");
  ASSERT_EQ(run.status, 0);
  EXPECT_EQ(run.out, "rank,score,members,warnings\n1,3,a;c,\n2,4,a;b,\n");
  run = levers("rank " + quoted(report) + " --perspective Industry --csv");
  ASSERT_EQ(run.status, 0);
  EXPECT_EQ(run.out, "rank,score,members,warnings\n1,2,a;b,\n2,3,a;c,\n");
  run = levers("rank " + quoted(report) + " --perspective Nobody");
  EXPECT_EQ(run.status, 1);
}

TEST(Cli, SimulateWritesTrajectory) {
  const auto csv = scratch() / "trajectory.csv";
  const auto run = levers("simulate " + fixture("cycle.json") + " --mapping sigmoid --csv " + quoted(csv));
  ASSERT_EQ(run.status, 0);
  EXPECT_NE(run.out.find("converged"), std::string::npos);
  EXPECT_NE(run.out.find("0.570879"), std::string::npos);
  EXPECT_EQ(read_file(csv).substr(0, 4), "a,b\n");
  EXPECT_NE(levers("simulate " + fixture("cycle.json") + " --mapping cubic").status, 0);
}

TEST(Cli, Comparisons) {
  const auto a = scratch() / "cmp-a.json";
  const auto b = scratch() / "cmp-b.json";
  ASSERT_EQ(levers("analyze " + fixture("star.json") + " --out " + quoted(a)).status, 0);
  ASSERT_EQ(levers("analyze " + fixture("path.json") + " --out " + quoted(b)).status, 0);
  auto run = levers("compare-scenarios " + quoted(a) + " " + quoted(b) + " --json");
  ASSERT_EQ(run.status, 0);
  EXPECT_EQ(json::parse(run.out)["only_first"], json::array({"b", "c"}));

  run = levers("compare-perspectives " + fixture("star.json") + " 'Local authority' Industry --json");
  ASSERT_EQ(run.status, 0);
  EXPECT_EQ(json::parse(run.out)["disagreements"].size(), 2u);
}

TEST(Cli, ExportDot) {
  const auto report = scratch() / "dot-report.json";
  ASSERT_EQ(levers("analyze " + fixture("star.json") + " --out " + quoted(report)).status, 0);
  const auto run = levers("export-dot " + fixture("star.json") + " --report " + quoted(report));
  ASSERT_EQ(run.status, 0);
  EXPECT_EQ(run.out.rfind("digraph", 0), 0u);
  EXPECT_NE(run.out.find("fillcolor=grey"), std::string::npos);
}

}  // namespace
}  // namespace levers
