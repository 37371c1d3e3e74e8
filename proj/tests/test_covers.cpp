#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tubemeasure/tubemeasure.hpp"

using namespace tubemeasure;

namespace {

Shape unit_cube() { return Cuboid::aligned(Vector{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}); }

}  // namespace

TEST(CoverCost, AdditiveAndOrderIndependent) {
  std::vector<CoverTube> tubes;
  Rng rng(4);
  for (int i = 0; i < 40; ++i) {
    if (i % 2)
      tubes.emplace_back(Tube(rng.normal_vector(3), rng.direction(3), rng.uniform(0.01, 2.0)));
    else
      tubes.emplace_back(SquareTube(Frame::from_axis(rng.direction(3)), rng.normal_vector(3),
                                    Rational::from_double(rng.uniform(0.01, 1.0))));
  }
  TubeCover all(tubes);
  std::vector<CoverTube> a(tubes.begin(), tubes.begin() + 17), b(tubes.begin() + 17, tubes.end());
  std::vector<double> parts{cover_cost(TubeCover(a)), cover_cost(TubeCover(b))};
  // Exact summation: concatenation costs the correctly rounded sum of all terms.
  EXPECT_EQ(cover_cost(TubeCover(a).concat(TubeCover(b))), cover_cost(all));
  EXPECT_NEAR(parts[0] + parts[1], cover_cost(all), 1e-12 * cover_cost(all));
  std::shuffle(tubes.begin(), tubes.end(), std::mt19937_64(1));
  EXPECT_EQ(cover_cost(TubeCover(tubes)), cover_cost(all));
}

TEST(CoverCost, MixedDimensionsRejected) {
  EXPECT_THROW(TubeCover({Tube(Vector{0, 0}, Direction::axis(2, 0), 1.0),
                          Tube(Vector{0, 0, 0}, Direction::axis(3, 0), 1.0)}),
               DimensionError);
  EXPECT_THROW(TubeCover(std::vector<CoverTube>{}), ParameterError);
}

TEST(CoverCheck, SingleColumnCoversCube) {
  TubeCover c({SquareTube(Frame::standard(3), Vector{0.5, 0.5, 0}, Rational(1, 2))});
  CoverCheck chk = cover_check(unit_cube(), c, 20'000, 1);
  EXPECT_TRUE(chk.covered);
  EXPECT_EQ(cover_cost(c), 1.0);
}

TEST(CoverCheck, ThinTubeLeavesWitness) {
  TubeCover c({Tube(Vector{0.5, 0.5, 0}, Direction::axis(3, 2), 0.05)});
  CoverCheck chk = cover_check(unit_cube(), c, 10'000, 1);
  ASSERT_FALSE(chk.covered);
  ASSERT_TRUE(chk.uncovered_point.has_value());
  EXPECT_TRUE(contains(unit_cube(), *chk.uncovered_point));
  EXPECT_FALSE(point_covered(c, *chk.uncovered_point));
}

TEST(CoverCheck, CloudPointsTestedExactly) {
  Shape cloud = PointCloud({Vector{0, 0}, Vector{1, 0}, Vector{5, 5}});
  TubeCover c({Tube(Vector{0, 0}, Direction::axis(2, 0), 0.1)});
  CoverCheck chk = cover_check(cloud, c, 1000, 0);
  ASSERT_FALSE(chk.covered);
  EXPECT_EQ((*chk.uncovered_point)[0], 5.0);
}

TEST(ParallelCover, CubeSixteenTubes) {
  ParallelCover pc = parallel_cover_from_projection(unit_cube(), Direction::axis(3, 2), 0.25);
  EXPECT_EQ(pc.cover.size(), 16u);
  EXPECT_EQ(pc.cost, 1.0);
  EXPECT_EQ(square_cover_cost(pc.cover), Rational(1));
  EXPECT_TRUE(cover_check(unit_cube(), pc.cover, 50'000, 3).covered);
}

TEST(ParallelCover, CostApproachesShadowForBall) {
  Shape ball = Ball(Vector{0, 0, 0}, 1.0);
  double prev = 1e300;
  for (double h : {0.5, 0.25, 0.125, 0.0625}) {
    ParallelCover pc = parallel_cover_from_projection(ball, Direction::axis(3, 2), h);
    EXPECT_GE(pc.cost, std::numbers::pi - 1e-12);
    EXPECT_LE(pc.cost, prev);
    prev = pc.cost;
    EXPECT_TRUE(cover_check(ball, pc.cover, 20'000, 2).covered);
  }
  // Cells meeting the unit disk lie within sqrt(2) h of it.
  EXPECT_LE(prev, std::numbers::pi * std::pow(1.0 + std::sqrt(2.0) * 0.0625, 2));
}

TEST(ParallelCover, TiltedDirectionStillCovers) {
  Shape tet = ConvexPolytope::from_vertices(
      std::vector<Vector>{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}});
  ParallelCover pc = parallel_cover_from_projection(tet, Direction(Vector{0.3, -0.2, 1.0}), 0.2);
  EXPECT_TRUE(cover_check(tet, pc.cover, 50'000, 5).covered);
  EXPECT_GE(pc.cost, pc.shadow.value - 1e-9);
}

TEST(ParallelCover, RejectsUnboundedAndTinySteps) {
  Shape prod = Shape::make_product(Ball(Vector{0, 0}, 1.0), Direction::axis(3, 2));
  EXPECT_THROW(parallel_cover_from_projection(prod, Direction::axis(3, 2), 0.1), UnboundedShapeError);
  EXPECT_THROW(parallel_cover_from_projection(unit_cube(), Direction::axis(3, 2), 1e-5), ParameterError);
}

TEST(CoverSearch, CloudOnLinesBeatsBaseline) {
  std::vector<Vector> pts;
  for (int i = 0; i < 8; ++i) {
    pts.push_back({0.0, 0.0, double(i)});
    pts.push_back({double(i), 0.0, 0.0});
  }
  CoverSearchResult r = cover_search(PointCloud(pts), 64, 1);
  EXPECT_LE(r.cost, r.baseline_cost);
  EXPECT_TRUE(cover_check(PointCloud(pts), r.cover, 0, 0).covered);
  EXPECT_LE(r.cover.size(), 4u);
}

TEST(CoverSearch, VolumetricNeverWorseThanSeed) {
  SearchSettings cfg;
  cfg.validation_samples = 20'000;
  CoverSearchResult r = cover_search(unit_cube(), 8, 3, cfg);
  EXPECT_LE(r.cost, r.baseline_cost);
  EXPECT_GE(r.cost, r.min_shadow - 1e-9);
  EXPECT_FALSE(r.notable);
}

TEST(CoverSearch, Deterministic) {
  SearchSettings cfg;
  cfg.validation_samples = 5'000;
  Shape tet = ConvexPolytope::from_vertices(
      std::vector<Vector>{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}});
  CoverSearchResult a = cover_search(tet, 6, 9, cfg);
  CoverSearchResult b = cover_search(tet, 6, 9, cfg);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.cover.size(), b.cover.size());
}
