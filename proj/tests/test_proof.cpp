#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "tubemeasure/tubemeasure.hpp"

using namespace tubemeasure;

namespace {

// Disjointness oracle for axis-parallel cubes: two closed cubes have
// disjoint interiors iff along some axis the centres are at least the sum
// of the half-widths apart.
bool interiors_disjoint(const PackingSquare& a, const PackingSquare& b) {
  for (std::size_t j = 0; j < a.center.size(); ++j) {
    Rational gap = a.center[j] - b.center[j];
    if (gap < Rational(0)) gap = Rational(0) - gap;
    if (gap >= a.half_width + b.half_width) return true;
  }
  return false;
}

// Exact containment: the corner farthest from the origin lies in the ball.
bool inside_ball(const PackingSquare& s, const Rational& r) {
  Rational sum(0);
  for (const auto& c : s.center) {
    Rational far = (c < Rational(0) ? Rational(0) - c : c) + s.half_width;
    sum += far * far;
  }
  return sum <= r * r;
}

}  // namespace

TEST(Packing, IntervalSplitsExactly) {
  SquarePacking p = ball_square_packing(1, 1.0, 1);
  auto sq = p.squares();
  ASSERT_EQ(sq.size(), 2u);
  EXPECT_EQ(sq[0].center[0], Rational(-1, 2));
  EXPECT_EQ(sq[1].center[0], Rational(1, 2));
  EXPECT_EQ(sq[0].half_width, Rational(1, 2));
  EXPECT_DOUBLE_EQ(p.covered_fraction(), 1.0);
}

TEST(Packing, DepthTwoDisk) {
  SquarePacking p = ball_square_packing(2, 1.0, 2);
  auto sq = p.squares();
  ASSERT_EQ(sq.size(), 4u);
  for (const auto& s : sq) {
    EXPECT_EQ(s.half_width, Rational(1, 4));
    EXPECT_EQ(s.center[0] * s.center[0], Rational(1, 16));
    EXPECT_EQ(s.center[1] * s.center[1], Rational(1, 16));
  }
  EXPECT_DOUBLE_EQ(p.total_measure(), 1.0);
}

TEST(Packing, DisjointContainedAndBounded) {
  for (int m = 1; m <= 4; ++m) {
    SquarePacking p = ball_square_packing(m, 1.0, m <= 2 ? 6 : 4);
    auto sq = p.squares();
    ASSERT_EQ(sq.size(), p.square_count());
    for (std::size_t i = 0; i < sq.size(); ++i) {
      EXPECT_TRUE(inside_ball(sq[i], p.packed_radius()));
      for (std::size_t j = i + 1; j < sq.size(); ++j) ASSERT_TRUE(interiors_disjoint(sq[i], sq[j]));
    }
    EXPECT_LE(p.total_measure(), p.ball_measure());
  }
}

TEST(Packing, CoverageNondecreasingAndConverges) {
  double prev = -1.0;
  for (int d = 1; d <= 10; ++d) {
    double f = ball_square_packing(2, 1.0, d).covered_fraction();
    EXPECT_GE(f, prev);
    prev = f;
  }
  EXPECT_GE(prev, 0.99);
}

TEST(Packing, OrbitSizesMatchExpansion) {
  SquarePacking p = ball_square_packing(3, 1.0, 5);
  std::set<std::vector<Rational>> seen;
  std::uint64_t n = 0;
  p.for_each_square([&](const PackingSquare& s) {
    ++n;
    seen.insert(s.center);
  });
  EXPECT_EQ(n, p.square_count());
  EXPECT_EQ(seen.size(), n);
}

TEST(Packing, InvalidParameters) {
  EXPECT_THROW(ball_square_packing(0, 1.0, 2), ParameterError);
  EXPECT_THROW(ball_square_packing(8, 1.0, 2), ParameterError);
  EXPECT_THROW(ball_square_packing(2, 1.0, 21), ParameterError);
  EXPECT_THROW(ball_square_packing(2, -1.0, 2), ParameterError);
}

TEST(Subdivision, PlanarTubeExact) {
  auto tubes = subdivide_tube(Tube(Vector{0, 0}, Direction::axis(2, 1), 1.0), 1);
  ASSERT_EQ(tubes.size(), 2u);
  double total = 0.0;
  for (const auto& t : tubes) {
    EXPECT_EQ(t.half_width, Rational(1, 2));
    total += square_tube_exact_measure(t);
  }
  EXPECT_DOUBLE_EQ(total, 2.0);
}

TEST(Subdivision, SpatialTubeConverges) {
  Tube t(Vector{1, 2, 3}, Direction(Vector{1, 1, 0}), 1.0);
  TubeSubdivision two = subdivide(t, 2);
  EXPECT_EQ(two.packing.square_count(), 4u);
  EXPECT_DOUBLE_EQ(two.total_measure(), 1.0);
  TubeSubdivision ten = subdivide(t, 10);
  EXPECT_GE(ten.total_measure(), 0.99 * std::numbers::pi);
  EXPECT_LE(ten.total_measure(), tube_exact_measure(t));
  EXPECT_NEAR(ten.tube_measure() - ten.total_measure(), ten.deficit(), 1e-12);
  // Each square tube stays inside the round tube.
  for (const auto& st : two.square_tubes()) {
    double h = st.half_width.to_double();
    EXPECT_LE(distance_to_axis(st.anchor, t.point, t.axis), 1.0);
    for (double sx : {-h, h})
      for (double sy : {-h, h}) {
        Vector corner = st.anchor + st.frame.cross()[0].vec() * sx + st.frame.cross()[1].vec() * sy;
        EXPECT_LE(distance_to_axis(corner, t.point, t.axis), 1.0 + 1e-12);
      }
  }
}

TEST(Pigeonhole, Examples) {
  EXPECT_EQ(pigeonhole_select(std::vector<double>{1, 1}, std::vector<double>{0.95, 0.95}, 0.1), 0u);
  EXPECT_EQ(pigeonhole_select(std::vector<double>{4, 1}, std::vector<double>{3.0, 1.0}, 0.2), 1u);
  EXPECT_EQ(pigeonhole_select(std::vector<double>{1}, std::vector<double>{1}, 0.5), 0u);
  EXPECT_THROW(pigeonhole_select(std::vector<double>{1, 1}, std::vector<double>{0.1, 0.1}, 0.1), NoWitnessError);
  EXPECT_THROW(pigeonhole_select(std::vector<double>{}, std::vector<double>{}, 0.1), ParameterError);
  EXPECT_THROW(pigeonhole_select(std::vector<double>{1}, std::vector<double>{1, 2}, 0.1), ParameterError);
}

TEST(Pigeonhole, MatchesFullScan) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    std::size_t k = 1 + rng() % 20;
    double eps = 0.01 + 0.5 * U(rng);
    std::vector<double> m(k), w(k);
    for (std::size_t i = 0; i < k; ++i) {
      m[i] = 0.1 + U(rng);
      w[i] = m[i] * U(rng) * 1.3;
    }
    double sm = std::accumulate(m.begin(), m.end(), 0.0), sw = std::accumulate(w.begin(), w.end(), 0.0);
    if (sw < (1.0 - eps) * sm) {
      EXPECT_THROW(pigeonhole_select(m, w, eps), NoWitnessError);
      continue;
    }
    std::size_t idx = pigeonhole_select(m, w, eps);
    std::size_t scan = 0;
    while (w[scan] < (1.0 - eps) * m[scan]) ++scan;
    EXPECT_EQ(idx, scan);
  }
}

TEST(Refinement, Examples) {
  Refinement r = common_refinement(Rational(3, 4), Rational(5, 6));
  EXPECT_EQ(r.delta, Rational(1, 12));
  EXPECT_EQ(r.count_a, 9);
  EXPECT_EQ(r.count_b, 10);
  Refinement s = common_refinement(Rational(1, 2), Rational(1, 2));
  EXPECT_EQ(s.delta, Rational(1, 2));
  EXPECT_EQ(s.count_a, 1);
  Refinement t = common_refinement(Rational(2), Rational(3));
  EXPECT_EQ(t.delta, Rational(1));
  EXPECT_EQ(t.count_b, 3);
  EXPECT_THROW(common_refinement(Rational(0), Rational(1)), ParameterError);
}

TEST(Cuboids, InscribedWithExactDiameter) {
  Cuboid c = cuboid_in_ball(Ball(Vector{0, 0, 0}, 1.0), Direction::axis(3, 0), 0.5);
  EXPECT_NEAR(c.half_lengths.back() * 2.0, std::sqrt(3.5), 1e-12);
  EXPECT_NEAR(c.volume(), 0.25 * std::sqrt(3.5), 1e-12);
  Cuboid d = cuboid_in_ball(Ball(Vector{0, 0}, 1.0), Direction::axis(2, 1), 1.0);
  EXPECT_NEAR(d.volume(), std::sqrt(3.0), 1e-12);
  Rng rng(8);
  for (int n = 2; n <= 6; ++n) {
    Ball b(rng.normal_vector(n), 0.7);
    Cuboid q = cuboid_in_ball(b, rng.direction(n), 0.3);
    double far = 0.0;
    auto vs = q.vertices();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      EXPECT_LE(distance(vs[i], b.center), 0.7 + 1e-12);
      for (std::size_t j = i + 1; j < vs.size(); ++j) far = std::max(far, distance(vs[i], vs[j]));
    }
    EXPECT_NEAR(far, 1.4, 1e-12);
  }
  EXPECT_THROW(cuboid_in_ball(Ball(Vector{0, 0, 0}, 1.0), Direction::axis(3, 0), 1.5), GeometryError);
}

TEST(Cuboids, AlignmentContainsBoth) {
  AlignedCuboidPair p = align_cuboids(Ball(Vector{0, 0, 0}, 1.0), Ball(Vector{5, 0, 0}, 1.0), 0.5);
  EXPECT_TRUE(aligned_pair_contained(p));
  EXPECT_EQ(p.enclosing.half_width, Rational(1, 4));
  EXPECT_NEAR(std::abs(p.enclosing.frame.axis()[0]), 1.0, 1e-15);
  for (const auto& v : p.first.vertices()) EXPECT_TRUE(point_in_square_tube(v, p.enclosing));
  EXPECT_EQ(cover_cost(TubeCover({p.enclosing})), 0.25);
  EXPECT_THROW(align_cuboids(Ball(Vector{0, 0, 0}, 1.0), Ball(Vector{0, 0, 0}, 1.0), 0.5), ParameterError);
  EXPECT_THROW(align_cuboids(Ball(Vector{0, 0, 0}, 1.0), Ball(Vector{5, 0, 0}, 2.0), 0.5), ParameterError);
}

TEST(Parameters, ChosenValues) {
  ProofParameters a = choose_parameters(2, Rational(1, 2));
  EXPECT_NEAR(a.p, 0.4330127, 1e-7);
  EXPECT_NEAR(a.eps, 0.0869, 1e-4);
  EXPECT_NEAR(a.eta, 0.4330127, 1e-7);
  ProofParameters b = choose_parameters(3, Rational(1));
  EXPECT_NEAR(b.p, 0.3061862, 1e-7);
  EXPECT_NEAR(b.eta, 0.6123724, 1e-7);
  for (int n = 2; n <= 8; ++n) {
    ProofParameters p = choose_parameters(n, Rational(1, 3));
    EXPECT_TRUE(p.p_admissible());
    EXPECT_TRUE(p.eps_admissible());
  }
  EXPECT_THROW(choose_parameters(9, Rational(1)), ParameterError);
}

TEST(Contradiction, ExamplesAndForms) {
  ContradictionResult r = contradiction_check(ProofParameters::make(2, 0.5, 0.1, Rational(1, 2)));
  EXPECT_NEAR(r.rhs, 2.0 * (std::sqrt(0.75) - 0.1 / 0.5), 1e-12);
  EXPECT_TRUE(r.contradiction);
  ContradictionResult f = contradiction_check(ProofParameters::make(3, 0.6, 0.3, Rational(1)));
  EXPECT_NEAR(f.rhs, 2.0 * (std::sqrt(0.28) - 0.3 / 0.36), 1e-12);
  EXPECT_FALSE(f.contradiction);
  for (int n = 2; n <= 8; ++n) {
    ContradictionResult c = contradiction_check(choose_parameters(n, Rational(3, 7)));
    EXPECT_GT(c.rhs, 1.0 + 1e-6);
    EXPECT_NEAR(c.rhs, c.rhs_raw, 1e-12);
  }
  EXPECT_THROW(ProofParameters::make(3, 0.9, 0.1, Rational(1)), ParameterError);
}

TEST(Walkthrough, AllStepsPass) {
  for (auto [n, depth] : std::vector<std::pair<int, int>>{{2, 1}, {2, 4}, {3, 6}, {5, 8}, {8, 4}}) {
    auto report = run_proof_walkthrough(n, depth, 0);
    EXPECT_TRUE(report["passed"].get<bool>()) << "n=" << n << " depth=" << depth << " failed at "
                                              << report["failed_step"].dump();
    EXPECT_TRUE(report["steps"].back()["outputs"]["contradiction"].get<bool>());
  }
}

TEST(Walkthrough, AdversarialWeightsStopAtPigeonhole) {
  WalkthroughOptions opt;
  opt.adversarial = true;
  auto report = run_proof_walkthrough(3, 4, 1, opt);
  EXPECT_FALSE(report["passed"].get<bool>());
  EXPECT_EQ(report["failed_step"], "select_square_E");
  EXPECT_NE(report["steps"].back()["error"].get<std::string>().find("pigeonhole"), std::string::npos);
}

TEST(Walkthrough, Deterministic) {
  EXPECT_EQ(run_proof_walkthrough(4, 4, 11).dump(), run_proof_walkthrough(4, 4, 11).dump());
  EXPECT_NE(run_proof_walkthrough(4, 4, 11).dump(), run_proof_walkthrough(4, 4, 12).dump());
}
