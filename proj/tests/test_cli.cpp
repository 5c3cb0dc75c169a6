#include <sstream>

#include <gtest/gtest.h>

#include "subsum/cli.hpp"
#include "support/files.hpp"

namespace subsum::cli {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::write_file;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "subsum");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture_path(const std::string& name) { return (fs::path(SUBSUM_FIXTURES) / name).string(); }

bool contains(const std::string& hay, std::string_view needle) { return hay.find(needle) != std::string::npos; }

// -- check -----------------------------------------------------------------------

TEST(Check, ExampleIsClean) {
  auto r = cli({"check", fixture_path("example.sub")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, ": ok"));
}

TEST(Check, RuleFixtures) {
  for (int n = 1; n <= 9; ++n) {
    const std::string stem = "rules/v" + std::to_string(n);
    auto pass = cli({"check", fixture_path(stem + "_pass.sub")});
    EXPECT_EQ(pass.code, 0) << stem << pass.err;
    auto fail = cli({"check", fixture_path(stem + "_fail.sub")});
    EXPECT_EQ(fail.code, 1) << stem;
    EXPECT_TRUE(contains(fail.err, "error[V" + std::to_string(n) + "]")) << stem << fail.err;
  }
}

TEST(Check, DiagnosticFormat) {
  auto r = cli({"check", fixture_path("rules/v7_fail.sub")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind(fixture_path("rules/v7_fail.sub") + ":49:3: error[V7]", 0), 0u) << r.err;
}

TEST(Check, SyntaxError) {
  auto dir = testing::scratch("cli_syntax");
  write_file(dir / "bad.sub", "system s {\n  module m layer x { }\n}\n");
  auto r = cli({"check", (dir / "bad.sub").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.err, "bad.sub:2:18: error[syntax]")) << r.err;
}

TEST(Check, MissingFile) {
  EXPECT_EQ(cli({"check", "/nonexistent/x.sub"}).code, 2);
}

// -- fmt -------------------------------------------------------------------------

TEST(Fmt, CheckWriteCycle) {
  auto dir = testing::scratch("cli_fmt");
  const auto canonical = read_file(fixture_path("example.sub"));
  write_file(dir / "a.sub", canonical);
  EXPECT_EQ(cli({"fmt", "--check", (dir / "a.sub").string()}).code, 0);

  std::string messy;
  for (char c : canonical) {
    messy += c;
    if (c == '\n') messy += "      ";
  }
  write_file(dir / "b.sub", messy);
  auto r = cli({"fmt", "--check", (dir / "b.sub").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.err, "not canonically formatted"));
  EXPECT_EQ(cli({"fmt", "--write", (dir / "b.sub").string()}).code, 0);
  EXPECT_EQ(cli({"fmt", "--check", (dir / "b.sub").string()}).code, 0);
  EXPECT_EQ(read_file(dir / "b.sub"), canonical);

  auto print = cli({"fmt", (dir / "a.sub").string()});
  EXPECT_EQ(print.code, 0);
  EXPECT_EQ(print.out, canonical);
}

TEST(Fmt, ParseFailureAndUsage) {
  auto dir = testing::scratch("cli_fmt_bad");
  write_file(dir / "bad.sub", "system {");
  EXPECT_EQ(cli({"fmt", "--check", (dir / "bad.sub").string()}).code, 2);
  EXPECT_EQ(cli({"fmt", "--check", "--write", (dir / "bad.sub").string()}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
}

TEST(Cli, Version) {
  auto r = cli({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "0.1.0"));
}

// -- gen -------------------------------------------------------------------------

TEST(Gen, WritesProjectAndPreservesRegions) {
  auto dir = testing::scratch("cli_gen");
  const auto out = (dir / "out").string();
  auto r = cli({"gen", fixture_path("example.sub"), "--out", out, "--docs", "--tests"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* id : {"sonar", "collide", "feelforce", "runaway", "turn", "forward", "wander", "avoid"}) {
    EXPECT_TRUE(fs::exists(dir / "out/src/modules" / (std::string(id) + ".cpp"))) << id;
  }
  EXPECT_TRUE(fs::exists(dir / "out/CMakeLists.txt"));
  EXPECT_TRUE(fs::exists(dir / "out/docs/index.md"));
  EXPECT_TRUE(contains(r.out, "wrote     "));
  for (const auto& e : fs::directory_iterator(dir / "out")) {
    EXPECT_EQ(e.path().filename().string().rfind(".subsum-stage", 0), std::string::npos);
  }

  // Fill a region, regenerate: the body survives and nothing else changes.
  const auto unit = dir / "out/src/modules/turn.cpp";
  auto text = read_file(unit);
  const std::string marker = "// USER CODE BEGIN turn.step\n";
  text.insert(text.find(marker) + marker.size(), "  io.request_wakeup(50);\n");
  write_file(unit, text);
  auto again = cli({"gen", fixture_path("example.sub"), "--out", out, "--docs", "--tests"});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(read_file(unit), text);
  EXPECT_FALSE(contains(again.out, "wrote     "));

  auto reset = cli({"gen", fixture_path("example.sub"), "--out", out, "--overwrite-regions"});
  ASSERT_EQ(reset.code, 0) << reset.err;
  EXPECT_FALSE(contains(read_file(unit), "request_wakeup(50)"));
}

TEST(Gen, ConflictThenForce) {
  auto dir = testing::scratch("cli_gen_conflict");
  const auto out = (dir / "out").string();
  ASSERT_EQ(cli({"gen", fixture_path("example.sub"), "--out", out}).code, 0);
  const auto unit = dir / "out/src/modules/avoid.cpp";
  auto text = read_file(unit);
  const std::string marker = "// USER CODE BEGIN avoid.step\n";
  text.insert(text.find(marker) + marker.size(), "  io.request_wakeup(7);\n");
  text.insert(text.find("void Behavior::step"), "// hand edit\n");
  write_file(unit, text);
  const auto before_main = read_file(dir / "out/src/main.cpp");

  auto r = cli({"gen", fixture_path("example.sub"), "--out", out});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "avoid.cpp: error[io-conflict]")) << r.err;
  EXPECT_EQ(read_file(unit), text);

  auto forced = cli({"gen", fixture_path("example.sub"), "--out", out, "--force"});
  EXPECT_EQ(forced.code, 0) << forced.err;
  const auto after = read_file(unit);
  EXPECT_FALSE(contains(after, "// hand edit"));
  EXPECT_TRUE(contains(after, "io.request_wakeup(7);"));
  EXPECT_EQ(read_file(dir / "out/src/main.cpp"), before_main);
}

TEST(Gen, InvalidModelWritesNothing) {
  auto dir = testing::scratch("cli_gen_invalid");
  auto r = cli({"gen", fixture_path("rules/v4_fail.sub"), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.err, "error[V4]"));
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_EQ(cli({"gen", fixture_path("example.sub"), "--out", (dir / "o2").string(), "--project", "9x"}).code, 2);
  EXPECT_EQ(cli({"gen", "/nonexistent.sub", "--out", (dir / "o3").string()}).code, 2);
}

// -- dot -------------------------------------------------------------------------

TEST(Dot, StdoutFileAndErrors) {
  auto dir = testing::scratch("cli_dot");
  auto a = cli({"dot", fixture_path("example.sub")});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out.rfind("digraph", 0), 0u);
  EXPECT_EQ(cli({"dot", fixture_path("example.sub"), "--out", (dir / "x.dot").string()}).code, 0);
  EXPECT_EQ(read_file(dir / "x.dot"), a.out);
  EXPECT_EQ(cli({"dot", fixture_path("rules/v9_fail.sub")}).code, 1);
  EXPECT_EQ(cli({"dot", "/nonexistent.sub"}).code, 2);
}

// -- sim -------------------------------------------------------------------------

TEST(Sim, PrintsMetricsAndWritesFiles) {
  auto dir = testing::scratch("cli_sim");
  const auto world = fixture_path("rooms.json");
  auto r = cli({"sim", world, "--seed", "1", "--csv", (dir / "p.csv").string(), "--svg",
                (dir / "p.svg").string(), "--trace", (dir / "t.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "coverage_cells: "));
  EXPECT_TRUE(contains(r.out, "collisions: 0"));
  EXPECT_EQ(read_file(dir / "p.csv").rfind("t_ms,x,y\n", 0), 0u);
  EXPECT_EQ(read_file(dir / "t.csv").rfind("t_ms,kind,subject,detail\n", 0), 0u);
  EXPECT_TRUE(contains(read_file(dir / "p.svg"), "<svg"));

  auto again = cli({"sim", world, "--seed", "1", "--csv", (dir / "q.csv").string()});
  EXPECT_EQ(read_file(dir / "p.csv"), read_file(dir / "q.csv"));
}

TEST(Sim, LayerComparison) {
  auto coverage_of = [](const std::string& out) {
    return std::stoul(out.substr(out.find("coverage_cells: ") + 16));
  };
  const auto world = fixture_path("rooms.json");
  auto low = cli({"sim", world, "--layers", "0", "--seed", "2"});
  auto both = cli({"sim", world, "--layers", "0,1", "--seed", "2"});
  ASSERT_EQ(low.code, 0);
  ASSERT_EQ(both.code, 0);
  EXPECT_LT(coverage_of(low.out), coverage_of(both.out));

  auto cmp = cli({"sim", world, "--compare", "--seed", "2"});
  ASSERT_EQ(cmp.code, 0);
  EXPECT_TRUE(contains(cmp.out, "layer 0:      coverage_cells " + std::to_string(coverage_of(low.out))));
  EXPECT_TRUE(contains(cmp.out, "layers 0,1:   coverage_cells " + std::to_string(coverage_of(both.out))));
}

TEST(Sim, ZeroTicksAndErrors) {
  auto dir = testing::scratch("cli_sim_err");
  const auto world = fixture_path("rooms.json");
  auto zero = cli({"sim", world, "--ticks", "0"});
  EXPECT_EQ(zero.code, 0);
  EXPECT_TRUE(contains(zero.out, "coverage_cells: 1\n"));
  write_file(dir / "bad.json", R"({"size":[4,4]})");
  auto bad = cli({"sim", (dir / "bad.json").string()});
  EXPECT_EQ(bad.code, 2);
  EXPECT_TRUE(contains(bad.err, "/start"));
  EXPECT_EQ(cli({"sim", world, "--layers", "zero"}).code, 2);
  EXPECT_EQ(cli({"sim", world, "--layers", "0,9"}).code, 2);
  EXPECT_EQ(cli({"sim", world, "--ticks", "-1"}).code, 2);
  EXPECT_EQ(cli({"sim", "/nonexistent.json"}).code, 2);
  write_file(dir / "still.json", R"({"v_cruise":0})");
  auto still = cli({"sim", world, "--params", (dir / "still.json").string()});
  EXPECT_EQ(still.code, 0) << still.err;
  EXPECT_TRUE(contains(still.out, "coverage_cells: 1\n"));
  write_file(dir / "typo.json", R"({"v_crusie":0})");
  auto typo = cli({"sim", world, "--params", (dir / "typo.json").string()});
  EXPECT_EQ(typo.code, 2);
  EXPECT_TRUE(contains(typo.err, "/v_crusie"));
}

}  // namespace
}  // namespace subsum::cli
