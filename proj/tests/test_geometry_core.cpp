#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "tubemeasure/tubemeasure.hpp"

using namespace tubemeasure;

namespace {

// Independent oracle: pi^(m/2) / Gamma(m/2 + 1).
double gamma_ball(int m) { return std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0 + 1.0); }

}  // namespace

TEST(Rational, NormalisesAndCompares) {
  Rational a(6, -8);
  EXPECT_EQ(a.num(), -3);
  EXPECT_EQ(a.den(), 4);
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(3, 4) * Rational(2, 3), Rational(1, 2));
  EXPECT_EQ(Rational(3, 4) / Rational(3, 8), Rational(2));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_EQ(Rational::parse("10/4"), Rational(5, 2));
  EXPECT_EQ(Rational::parse("7"), Rational(7));
  EXPECT_THROW(Rational::parse("1/0"), ParseError);
  EXPECT_THROW(Rational::parse("x"), ParseError);
}

TEST(Rational, FromDoubleIsExact) {
  EXPECT_EQ(Rational::from_double(0.375), Rational(3, 8));
  Rational r = Rational::from_double(0.1);
  EXPECT_EQ(r.to_double(), 0.1);
  EXPECT_EQ(Rational::dyadic_floor(0.7, 4), Rational(11, 16));
}

TEST(Rational, GcdMatchesIntegerOracle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    std::int64_t p1 = 1 + static_cast<std::int64_t>(rng() % 500), q1 = 1 + static_cast<std::int64_t>(rng() % 500);
    std::int64_t p2 = 1 + static_cast<std::int64_t>(rng() % 500), q2 = 1 + static_cast<std::int64_t>(rng() % 500);
    Rational g = rational_gcd(Rational(p1, q1), Rational(p2, q2));
    // Over the common denominator q1*q2 the gcd is gcd(p1 q2, p2 q1) / (q1 q2).
    Rational oracle(std::gcd(p1 * q2, p2 * q1), q1 * q2);
    EXPECT_EQ(g, oracle);
  }
}

TEST(Rational, OverflowIsReported) {
  Rational big(std::int64_t{1} << 62);
  EXPECT_THROW(big * big, ParameterError);
}

TEST(ExactSum, OrderIndependent) {
  std::vector<double> xs{1e16, 1.0, -1e16, 3.0, 1e-3};
  double s1 = exact_sum(xs);
  std::reverse(xs.begin(), xs.end());
  EXPECT_EQ(s1, exact_sum(xs));
  EXPECT_EQ(s1, 4.001);
}

TEST(VectorAndFrame, DirectionValidation) {
  EXPECT_THROW(Direction(Vector(3)), ParameterError);
  Direction d(Vector{3, 4});
  EXPECT_NEAR(d[0], 0.6, 1e-15);
  EXPECT_THROW(check_dim(9), DimensionError);
  EXPECT_THROW(check_dim(0), DimensionError);
}

TEST(VectorAndFrame, FromAxisIsOrthonormal) {
  Rng rng(3);
  for (int n = 2; n <= 8; ++n) {
    Direction a = rng.direction(n);
    Frame f = Frame::from_axis(a);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) EXPECT_NEAR(dot(f.vector(i).vec(), f.vector(j).vec()), i == j ? 1.0 : 0.0, 1e-12);
    Vector x = rng.normal_vector(n);
    Vector back = f.to_world(f.to_local(x));
    EXPECT_NEAR(distance(back, x), 0.0, 1e-12);
  }
}

TEST(VectorAndFrame, GeneralizedCrossGivesParallelotopeVolume) {
  std::vector<Vector> vs{{1, 0, 0}, {0, 2, 0}};
  Vector n = linalg::generalized_cross(vs);
  EXPECT_NEAR(norm(n), 2.0, 1e-15);
  EXPECT_NEAR(dot(n, vs[0]), 0.0, 1e-15);
  EXPECT_NEAR(dot(n, vs[1]), 0.0, 1e-15);
}

TEST(Hull, CubeFacetsAndVolume) {
  std::vector<Vector> pts;
  for (int m = 0; m < 8; ++m) pts.push_back({double(m & 1), double((m >> 1) & 1), double((m >> 2) & 1)});
  pts.push_back({0.5, 0.5, 0.5});
  HullResult h = convex_hull(pts);
  EXPECT_EQ(h.facets.size(), 6u);
  EXPECT_EQ(h.extreme.size(), 8u);
  EXPECT_NEAR(h.volume, 1.0, 1e-12);
}

TEST(Hull, RandomSimplexVolumeMatchesDeterminant) {
  Rng rng(11);
  for (int n = 2; n <= 6; ++n) {
    std::vector<Vector> pts;
    for (int i = 0; i <= n; ++i) pts.push_back(rng.normal_vector(n));
    std::vector<double> m(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i * n + j)] = pts[i + 1][j] - pts[0][j];
    double oracle = std::abs(linalg::determinant(m, n)) / linalg::factorial(n);
    EXPECT_NEAR(ConvexPolytope::from_points(pts).volume(), oracle, 1e-10 * std::max(1.0, oracle));
  }
}

TEST(Hull, DegenerateInputThrows) {
  std::vector<Vector> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  EXPECT_THROW(convex_hull(pts), DegenerateShapeError);
}

TEST(Shapes, PolytopeFromVerticesRejectsInteriorPoints) {
  std::vector<Vector> pts{{0, 0}, {2, 0}, {1, 0.5}, {2, 2}, {0, 2}};
  EXPECT_THROW(ConvexPolytope::from_vertices(pts), GeometryError);
  EXPECT_NO_THROW(ConvexPolytope::from_points(pts));
}

TEST(Shapes, Membership) {
  Shape ball = Ball(Vector{0, 0, 0}, 1.0);
  EXPECT_TRUE(contains(ball, Vector{0.5, 0.5, 0.5}));
  EXPECT_FALSE(contains(ball, Vector{1, 1, 0}));
  Shape cube = Cuboid::aligned(Vector{0, 0}, {1, 2});
  EXPECT_TRUE(contains(cube, Vector{1, -2}));
  EXPECT_FALSE(contains(cube, Vector{1.01, 0}));
  Shape prod = Shape::make_product(Ball(Vector{0, 0}, 1.0), Direction::axis(3, 2));
  EXPECT_TRUE(contains(prod, Vector{0.5, 0.5, 1e6}));
  EXPECT_FALSE(is_bounded(prod));
  EXPECT_THROW(diameter(prod), UnboundedShapeError);
}

TEST(Shapes, UnionDimensionsMustAgree) {
  EXPECT_THROW(Shape::make_union({Ball(Vector{0, 0}, 1.0), Ball(Vector{0, 0, 0}, 1.0)}, 2), DimensionError);
  EXPECT_THROW(Ball(Vector{0, 0}, -1.0), ParameterError);
}

TEST(Geometry, UnitBallVolumes) {
  for (int m = 0; m <= 8; ++m) EXPECT_NEAR(unit_ball_volume(m), gamma_ball(m), 1e-12);
}

TEST(Geometry, Diameters) {
  EXPECT_DOUBLE_EQ(diameter(Ball(Vector{1, 2, 3}, 2.0)), 4.0);
  EXPECT_NEAR(diameter(Cuboid::aligned(Vector{0, 0, 0}, {0.5, 0.5, 0.5})), std::sqrt(3.0), 1e-15);
  Shape u = Shape::make_union({Ball(Vector{0, 0}, 1.0), Ball(Vector{4, 0}, 1.0)}, 2);
  EXPECT_DOUBLE_EQ(diameter(u), 6.0);
}

TEST(Geometry, MonteCarloVolumeOfUnion) {
  Shape u = Shape::make_union({Cuboid::aligned(Vector{0, 0}, {1, 1}), Cuboid::aligned(Vector{1, 1}, {1, 1})}, 2);
  Estimate e = mc_volume(u, 200'000, 5);
  EXPECT_NEAR(e.value, 7.0, 4.0 * e.std_error + 1e-9);
  EXPECT_GT(e.std_error, 0.0);
  EXPECT_THROW(mc_volume(u, 10, 5), ParameterError);
}

TEST(Geometry, MonteCarloDeterministicAcrossThreadCounts) {
  Shape u = Shape::make_union({Ball(Vector{0, 0, 0}, 1.0), Ball(Vector{1, 0, 0}, 1.0)}, 3);
  Estimate one = mc_volume(u, McSettings{100'000, 9, 1});
  Estimate four = mc_volume(u, McSettings{100'000, 9, 4});
  EXPECT_EQ(one.value, four.value);
  EXPECT_EQ(one.std_error, four.std_error);
  // Two unit balls at distance 1: 2 * (4/3)pi - lens volume (5/12)pi.
  double oracle = 8.0 * std::numbers::pi / 3.0 - 5.0 * std::numbers::pi / 12.0;
  EXPECT_NEAR(one.value, oracle, 4.0 * one.std_error);
}

TEST(Geometry, ShadowAreasClosedForms) {
  Shape cube = Cuboid::aligned(Vector{0, 0, 0}, {0.5, 0.5, 0.5});
  EXPECT_NEAR(shadow_area(cube, Direction(Vector{1, 1, 1})).value, std::sqrt(3.0), 1e-12);
  // Cauchy: the polytope facet formula matches the cuboid closed form.
  std::vector<Vector> pts;
  for (int m = 0; m < 8; ++m) pts.push_back({m & 1 ? 0.5 : -0.5, m & 2 ? 1.0 : -1.0, m & 4 ? 1.5 : -1.5});
  Shape poly = ConvexPolytope::from_points(pts);
  Shape box = Cuboid::aligned(Vector{0, 0, 0}, {0.5, 1.0, 1.5});
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    Direction d = rng.direction(3);
    EXPECT_NEAR(shadow_area(poly, d).value, shadow_area(box, d).value, 1e-10);
  }
  EXPECT_NEAR(shadow_area(Ball(Vector{0, 0, 0, 0}, 2.0), Direction::axis(4, 0)).value, gamma_ball(3) * 8.0, 1e-12);
}

TEST(Geometry, ShadowOfDisjointUnionIsSumOfMembers) {
  Shape u = Shape::make_union({Ball(Vector{0, 0}, 1.0), Ball(Vector{4, 0}, 1.0)}, 2);
  Estimate e = shadow_area(u, Direction::axis(2, 0), McSettings{200'000, 3, 0});
  EXPECT_NEAR(e.value, 2.0, 4.0 * e.std_error + 1e-9);
  Estimate f = shadow_area(u, Direction::axis(2, 1), McSettings{200'000, 3, 0});
  EXPECT_NEAR(f.value, 4.0, 4.0 * f.std_error + 1e-9);
}

TEST(Tubes, MembershipIsClosed) {
  Tube t(Vector{0, 0, 0}, Direction::axis(3, 2), 1.0);
  EXPECT_TRUE(point_in_tube(Vector{1, 0, 5}, t));
  EXPECT_FALSE(point_in_tube(Vector{1, 0.01, 5}, t));
  SquareTube st(Frame::standard(3), Vector{0, 0, 0}, Rational(1, 2));
  EXPECT_TRUE(point_in_square_tube(Vector{0.5, -0.5, 100}, st));
  EXPECT_FALSE(point_in_square_tube(Vector{0.51, 0, 0}, st));
  EXPECT_THROW(Tube(Vector{0, 0}, Direction::axis(2, 0), 0.0), ParameterError);
}

TEST(Random, BatchResultsIndependentOfThreads) {
  auto body = [](std::size_t, std::uint64_t s, std::size_t count) {
    Rng rng(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += rng.uniform();
    return acc;
  };
  auto a = run_batches<double>(50'000, 42, body, 1);
  auto b = run_batches<double>(50'000, 42, body, 3);
  EXPECT_EQ(a, b);
}
