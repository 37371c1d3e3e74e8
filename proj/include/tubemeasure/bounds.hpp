#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tubemeasure/error.hpp"
#include "tubemeasure/geometry.hpp"
#include "tubemeasure/random.hpp"
#include "tubemeasure/shape.hpp"
#include "tubemeasure/tube.hpp"

namespace tubemeasure {

/// Cross-sectional area gamma_{n-1} r^{n-1}; for a single tube this is
/// its tube-measure.
inline double tube_exact_measure(const Tube& t) {
  return unit_ball_volume(t.dim() - 1) * std::pow(t.radius, t.dim() - 1);
}

/// (2 delta)^{n-1}, exactly.
inline Rational square_tube_exact_measure_rational(const SquareTube& st) {
  Rational side = Rational(2) * st.half_width;
  Rational out(1);
  for (int i = 0; i + 1 < st.dim(); ++i) out *= side;
  return out;
}

inline double square_tube_exact_measure(const SquareTube& st) {
  return std::pow(2.0 * st.half_width.to_double(), st.dim() - 1);
}

struct OptimizerSettings {
  int grid_points = 2048;
  int refine_starts = 4;
  int max_evaluations = 4000;          // per refinement start
  double simplex_tolerance = 1e-13;    // chart-coordinate size at which refinement stops
  std::size_t max_exact_candidates = 200'000;
  int mc_grid_points = 96;             // grid size when shadows are sampled
  int mc_max_evaluations = 80;
  McSettings shadow_mc{20'000, 0, 0};
};

/// Best direction found together with the shadow area it produces.
struct DirectionBound {
  double value = 0.0;
  double std_error = 0.0;
  Direction direction;
};

/// Quasi-uniform directions on the half sphere {d ~ -d}, canonicalized.
/// n = 2: equally spaced angles. n = 3: Fibonacci lattice. n > 3: an
/// additive-recurrence low-discrepancy sequence pushed through Box-Muller.
inline std::vector<Direction> sphere_grid(int n, int count) {
  check_dim(n, 2);
  if (count < 1) throw ParameterError("direction grid needs at least one point");
  std::vector<Direction> out;
  out.reserve(static_cast<std::size_t>(count));
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      double th = std::numbers::pi * (k + 0.5) / count;
      out.push_back(Direction(Vector{std::cos(th), std::sin(th)}).canonical());
    }
    return out;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - (k + 0.5) / count;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = golden * k;
      out.push_back(Direction(Vector{rho * std::cos(phi), rho * std::sin(phi), z}).canonical());
    }
    return out;
  }
  const int pairs = (n + 1) / 2;
  const int d = 2 * pairs;
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  std::vector<double> alpha(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) alpha[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
  for (int k = 0; out.size() < static_cast<std::size_t>(count); ++k) {
    Vector g(n);
    for (int p = 0; p < pairs; ++p) {
      double u1 = std::fmod(0.5 + (k + 1) * alpha[2 * p], 1.0);
      double u2 = std::fmod(0.5 + (k + 1) * alpha[2 * p + 1], 1.0);
      if (u1 <= 0.0) u1 = 0x1.0p-53;
      double rad = std::sqrt(-2.0 * std::log(u1));
      if (2 * p < n) g[2 * p] = rad * std::cos(2.0 * std::numbers::pi * u2);
      if (2 * p + 1 < n) g[2 * p + 1] = rad * std::sin(2.0 * std::numbers::pi * u2);
    }
    if (norm(g) > 1e-12) out.push_back(Direction(g).canonical());
  }
  return out;
}

namespace detail {

/// Shadow of a convex body is h_Z(d) for a zonotope Z generated by facet
/// normals; its minimum on the sphere sits at a facet normal of Z, which is
/// orthogonal to n-1 of the generators. Returns those candidates.
inline std::vector<Direction> zonotope_candidates(const Shape& s, std::size_t limit, std::uint64_t seed) {
  const int n = s.dim();
  std::vector<Vector> gens;
  auto add = [&](const Vector& v) {
    for (const auto& g : gens)
      if (std::abs(std::abs(dot(g, v)) - 1.0) < 1e-12) return;
    gens.push_back(v);
  };
  if (const auto* p = s.get_if<ConvexPolytope>()) {
    for (const auto& f : p->facets()) add(f.normal);
  } else if (const auto* c = s.get_if<Cuboid>()) {
    for (int i = 0; i < n; ++i) add(c->frame.vector(i).vec());
  } else {
    return {};
  }
  const int k = n - 1;
  const int g = static_cast<int>(gens.size());
  std::vector<Direction> out;
  if (g < k) return out;
  auto emit = [&](const std::vector<int>& idx) {
    std::vector<Vector> vs;
    for (int i : idx) vs.push_back(gens[i]);
    Vector c = linalg::generalized_cross(vs);
    if (norm(c) > 1e-9) out.push_back(Direction(c).canonical());
  };
  // Number of k-subsets, saturating at limit + 1.
  double total = 1.0;
  for (int i = 0; i < k; ++i) total = total * (g - i) / (i + 1);
  if (total <= static_cast<double>(limit)) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      emit(idx);
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == g - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  } else {
    Rng rng(seed ^ 0x5a17e0ULL);
    for (std::size_t t = 0; t < limit; ++t) {
      std::vector<int> idx;
      while (static_cast<int>(idx.size()) < k) {
        int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(g)));
        if (std::find(idx.begin(), idx.end(), c) == idx.end()) idx.push_back(c);
      }
      emit(idx);
    }
  }
  return out;
}

inline bool better(const DirectionBound& a, const DirectionBound& b) {
  if (a.value != b.value) return a.value < b.value;
  return lex_less(a.direction.vec(), b.direction.vec());
}

/// Nelder-Mead on f(normalize(d0 + sum u_i t_i)) over the tangent chart at d0.
template <typename Objective>
DirectionBound refine_direction(const DirectionBound& start, Objective f, double step, int max_evals, double tol) {
  const int n = start.direction.dim();
  const int k = n - 1;
  Frame chart = Frame::from_axis(start.direction);
  auto to_dir = [&](const std::vector<double>& u) {
    Vector v = start.direction.vec();
    for (int i = 0; i < k; ++i) v += u[i] * chart.cross()[i].vec();
    return Direction(v).canonical();
  };
  struct Vertex {
    std::vector<double> u;
    DirectionBound val;
  };
  int evals = 0;
  auto eval = [&](std::vector<double> u) {
    ++evals;
    Direction d = to_dir(u);
    Estimate e = f(d);
    return Vertex{std::move(u), {e.value, e.std_error, d}};
  };
  std::vector<Vertex> simplex;
  simplex.push_back({std::vector<double>(static_cast<std::size_t>(k), 0.0), start});
  for (int i = 0; i < k; ++i) {
    std::vector<double> u(static_cast<std::size_t>(k), 0.0);
    u[i] = step;
    simplex.push_back(eval(u));
  }
  auto order = [&] {
    std::sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return better(a.val, b.val); });
  };
  auto combine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
  };
  while (evals < max_evals) {
    order();
    double size = 0.0;
    for (std::size_t v = 1; v < simplex.size(); ++v)
      for (int i = 0; i < k; ++i) size = std::max(size, std::abs(simplex[v].u[i] - simplex[0].u[i]));
    if (size < tol) break;
    std::vector<double> centroid(static_cast<std::size_t>(k), 0.0);
    for (std::size_t v = 0; v + 1 < simplex.size(); ++v)
      for (int i = 0; i < k; ++i) centroid[i] += simplex[v].u[i] / k;
    Vertex& worst = simplex.back();
    Vertex reflected = eval(combine(centroid, worst.u, -1.0));
    if (better(reflected.val, simplex.front().val)) {
      Vertex expanded = eval(combine(centroid, worst.u, -2.0));
      worst = better(expanded.val, reflected.val) ? expanded : reflected;
    } else if (better(reflected.val, simplex[simplex.size() - 2].val)) {
      worst = reflected;
    } else {
      Vertex contracted = eval(combine(centroid, worst.u, 0.5));
      if (better(contracted.val, worst.val)) {
        worst = contracted;
      } else {
        for (std::size_t v = 1; v < simplex.size(); ++v) simplex[v] = eval(combine(simplex[0].u, simplex[v].u, 0.5));
      }
    }
  }
  order();
  return simplex.front().val;
}

}  // namespace detail

/// Minimum shadow area over a direction search: every direction gives a
/// valid upper bound on the tube-measure (cover by parallel tubes), so the
/// result is an upper bound whether or not the search is globally optimal.
/// Polytopes and cuboids additionally try the finite set of directions that
/// contains the exact optimum.
inline DirectionBound upper_bound_min_projection(const Shape& s, const OptimizerSettings& cfg = {}) {
  require_bounded(s, "minimum projection");
  const int n = s.dim();
  check_dim(n, 2);
  if (const auto* b = s.get_if<Ball>()) {
    return {unit_ball_volume(n - 1) * std::pow(b->radius, n - 1), 0.0, Direction::axis(n, n - 1)};
  }
  if (const auto* u = s.get_if<Union>(); u && u->members.size() == 1)
    return upper_bound_min_projection(u->members.front(), cfg);
  if (!has_volume(s)) return {0.0, 0.0, Direction::axis(n, n - 1)};

  const bool sampled = s.is<Union>();
  auto objective = [&](const Direction& d) { return shadow_area(s, d, cfg.shadow_mc); };

  std::vector<DirectionBound> scored;
  auto score = [&](const std::vector<Direction>& dirs) {
    for (const auto& d : dirs) {
      Estimate e = objective(d);
      scored.push_back({e.value, e.std_error, d});
    }
  };
  score(sphere_grid(n, sampled ? cfg.mc_grid_points : cfg.grid_points));
  if (!sampled) score(detail::zonotope_candidates(s, cfg.max_exact_candidates, cfg.shadow_mc.seed));
  std::sort(scored.begin(), scored.end(), detail::better);

  DirectionBound best = scored.front();
  double spacing = std::pow(2.0 * std::numbers::pi / (sampled ? cfg.mc_grid_points : cfg.grid_points), 1.0 / (n - 1));
  int starts = std::min<int>(cfg.refine_starts, static_cast<int>(scored.size()));
  for (int i = 0; i < starts; ++i) {
    DirectionBound r = detail::refine_direction(scored[i], objective, 0.5 * spacing,
                                                sampled ? cfg.mc_max_evaluations : cfg.max_evaluations,
                                                cfg.simplex_tolerance);
    if (detail::better(r, best)) best = r;
  }
  return best;
}

/// |E| / diam(E) with the volume's standard error carried through.
inline Estimate lower_bound_volume_diam(const Shape& s, const McSettings& mc = {}) {
  require_bounded(s, "volume/diameter bound");
  double diam = diameter(s);
  if (!(diam > 0.0)) throw DegenerateShapeError("volume/diameter bound needs positive diameter");
  Estimate vol = mc_volume(s, mc);
  return {vol.value / diam, vol.std_error / diam};
}

/// Tube-measure of A x R, which equals the (n-1)-measure of A.
inline Estimate product_measure(const Shape& base, const McSettings& mc = {}) {
  require_bounded(base, "product measure");
  return mc_volume(base, mc);
}

/// 2R|A| / (2R + diam A): the tube-measure lower bound for A x [-R, R].
inline double truncated_product_lower(const Shape& base, double half_length, const McSettings& mc = {}) {
  if (!(half_length > 0.0)) throw ParameterError("truncation half length must be positive");
  double area = product_measure(base, mc).value;
  if (area == 0.0) return 0.0;
  double two_r = 2.0 * half_length;
  return two_r * area / (two_r + diameter(base));
}

/// Minimal width of a planar convex body. For polygons, rotating calipers:
/// min over hull edges of the largest vertex distance to the edge line.
/// The returned direction is parallel to the supporting lines, so that the
/// shadow along it has length equal to the width.
inline DirectionBound plank_value_2d(const Shape& s) {
  if (s.dim() != 2) throw DimensionError("plank value is defined for planar shapes");
  if (const auto* b = s.get_if<Ball>()) return {2.0 * b->radius, 0.0, Direction::axis(2, 1)};
  const auto* poly = s.get_if<ConvexPolytope>();
  if (!poly) throw ParameterError("plank value needs a convex polygon or a disk");

  std::vector<Vector> pts = poly->vertices();
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) { return lex_less(a, b); });
  auto cross = [](const Vector& o, const Vector& a, const Vector& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Vector> hull;
  for (int pass = 0; pass < 2; ++pass) {
    std::size_t base = hull.size();
    for (const auto& p : pts) {
      while (hull.size() >= base + 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0) hull.pop_back();
      hull.push_back(p);
    }
    hull.pop_back();
    std::reverse(pts.begin(), pts.end());
  }
  const std::size_t m = hull.size();
  if (m < 3) throw DegenerateShapeError("polygon needs three non-collinear vertices");

  auto dist = [&](std::size_t i, std::size_t j) {
    const Vector& a = hull[i];
    const Vector& b = hull[(i + 1) % m];
    return cross(a, b, hull[j]) / distance(a, b);
  };
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_edge = 0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (j == i) j = (j + 1) % m;
    while (dist(i, (j + 1) % m) >= dist(i, j) && (j + 1) % m != i) j = (j + 1) % m;
    double w = dist(i, j);
    if (w < best) {
      best = w;
      best_edge = i;
    }
  }
  Vector edge = hull[(best_edge + 1) % m] - hull[best_edge];
  return {best, 0.0, Direction(edge).canonical()};
}

/// Both tube-measure bounds for a bounded shape.
struct BoundReport {
  double lower = 0.0;
  double lower_std_error = 0.0;
  double upper = 0.0;
  double upper_std_error = 0.0;
  Direction witness_direction;
  std::string method;

  bool consistent() const { return lower - 3.0 * lower_std_error <= upper + 3.0 * upper_std_error; }
};

inline BoundReport compute_bounds(const Shape& s, const OptimizerSettings& opt = {}, const McSettings& mc = {}) {
  require_bounded(s, "bounds");
  BoundReport r;
  DirectionBound up = upper_bound_min_projection(s, opt);
  r.upper = up.value;
  r.upper_std_error = up.std_error;
  r.witness_direction = up.direction;
  std::ostringstream method;
  method << "upper: min shadow area over " << (s.is<Union>() ? "sampled" : "exact") << " projections; lower: ";
  double diam = diameter(s);
  if (diam > 0.0) {
    Estimate lo = lower_bound_volume_diam(s, mc);
    r.lower = lo.value;
    r.lower_std_error = lo.std_error;
    method << "volume/diameter";
  } else {
    method << "zero (single point)";
  }
  r.method = method.str();
  return r;
}

}  // namespace tubemeasure
