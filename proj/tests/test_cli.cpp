#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "tubemeasure/io.hpp"

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  std::string cmd = std::string(TUBEMEASURE_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string shape(const char* name) { return std::string(TUBEMEASURE_DATA) + "/shapes/" + name; }
std::string cover(const char* name) { return std::string(TUBEMEASURE_DATA) + "/covers/" + name; }

tubemeasure::io::json parse(const CliRun& r) { return tubemeasure::io::json::parse(r.out); }

}  // namespace

TEST(CliBounds, UnitBall) {
  CliRun r = run("bounds --shape " + shape("unit_ball.json") + " --samples 10000");
  ASSERT_EQ(r.code, 0);
  auto j = parse(r);
  EXPECT_NEAR(j["lower"].get<double>(), 2.0944, 1e-4);
  EXPECT_NEAR(j["upper"].get<double>(), 3.1416, 1e-4);
  EXPECT_EQ(j["config"]["samples"], 10000);
}

TEST(CliBounds, BuiltinTetrahedron) {
  CliRun r = run("bounds --builtin tetrahedron --samples 10000 --grid-points 256");
  ASSERT_EQ(r.code, 0);
  auto j = parse(r);
  EXPECT_LE(j["lower"].get<double>(), j["upper"].get<double>());
}

TEST(CliBounds, InputErrorsExitTwo) {
  EXPECT_EQ(run("bounds --shape " + shape("slab.json")).code, 2);
  EXPECT_EQ(run("bounds --shape " + shape("bad_field.json")).code, 2);
  EXPECT_EQ(run("bounds --shape /nonexistent.json").code, 2);
  EXPECT_EQ(run("bounds --builtin unit-cube --samples 10").code, 2);
  EXPECT_EQ(run("nosuchcommand").code, 2);
}

TEST(CliPlank, Widths) {
  CliRun sq = run("plank --shape " + shape("unit_square.json"));
  ASSERT_EQ(sq.code, 0);
  EXPECT_NEAR(parse(sq)["width"].get<double>(), 1.0, 1e-12);
  CliRun tri = run("plank --shape " + shape("triangle.json"));
  ASSERT_EQ(tri.code, 0);
  EXPECT_NEAR(parse(tri)["width"].get<double>(), 0.8660254, 1e-7);
  EXPECT_EQ(run("plank --shape " + shape("segment.json")).code, 2);
  EXPECT_EQ(run("plank --shape " + shape("nonconvex.json")).code, 2);
}

TEST(CliCover, GridFileAndSearch) {
  CliRun grid = run("cover --builtin unit-cube --parallel 0 0 1 0.25 --samples 20000");
  ASSERT_EQ(grid.code, 0);
  auto g = parse(grid);
  EXPECT_EQ(g["tubes"], 16);
  EXPECT_EQ(g["cost"].get<double>(), 1.0);
  EXPECT_TRUE(g["covered"].get<bool>());

  CliRun thin = run("cover --shape " + shape("unit_cube.json") + " --cover " + cover("thin_tube.json") +
                 " --samples 10000");
  ASSERT_EQ(thin.code, 0);
  auto t = parse(thin);
  EXPECT_FALSE(t["covered"].get<bool>());
  EXPECT_TRUE(t["uncovered_point"].is_array());

  CliRun cloud = run("cover --shape " + shape("cloud_lines.json") + " --search --samples 1000");
  ASSERT_EQ(cloud.code, 0);
  auto c = parse(cloud);
  EXPECT_LE(c["cost"].get<double>(), c["baseline_cost"].get<double>());
  EXPECT_TRUE(c["covered"].get<bool>());

  EXPECT_EQ(run("cover --builtin unit-cube").code, 2);
  EXPECT_EQ(run("cover --builtin unit-cube --parallel 0 1 0.25").code, 2);
}

TEST(CliPackAndRefine, ExactOutput) {
  CliRun p = run("pack --dim 2 --depth 2");
  ASSERT_EQ(p.code, 0);
  EXPECT_EQ(parse(p)["square_count"], 4);
  EXPECT_EQ(run("pack --dim 9 --depth 2").code, 2);
  CliRun r = run("refine --a 3/4 --b 5/6");
  ASSERT_EQ(r.code, 0);
  auto j = parse(r);
  EXPECT_EQ(j["delta"]["num"], 1);
  EXPECT_EQ(j["delta"]["den"], 12);
  EXPECT_EQ(j["count_a"], 9);
  EXPECT_EQ(j["count_b"], 10);
  EXPECT_EQ(run("refine --a 0 --b 1/2").code, 2);
  CliRun csv = run("refine --a 1/2 --b 1/3 --format csv");
  EXPECT_NE(csv.out.find("delta.den,6"), std::string::npos);
}

TEST(CliProof, ExitCodes) {
  CliRun a = run("proof --dim 3 --depth 6");
  EXPECT_EQ(a.code, 0);
  EXPECT_TRUE(parse(a)["passed"].get<bool>());
  EXPECT_EQ(run("proof --dim 2 --depth 1").code, 0);
  EXPECT_EQ(run("proof --dim 9").code, 2);
  CliRun adv = run("proof --dim 3 --depth 4 --adversarial");
  EXPECT_EQ(adv.code, 1);
  EXPECT_EQ(parse(adv)["failed_step"], "select_square_E");
}

TEST(CliProof, ByteIdenticalForSameSeed) {
  CliRun a = run("proof --dim 4 --depth 4 --seed 7");
  CliRun b = run("proof --dim 4 --depth 4 --seed 7");
  EXPECT_EQ(a.out, b.out);
  CliRun c = run("bounds --builtin unit-cube --samples 20000 --seed 3");
  CliRun d = run("bounds --builtin unit-cube --samples 20000 --seed 3");
  EXPECT_EQ(c.out, d.out);
}
