#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "tubemeasure/error.hpp"
#include "tubemeasure/random.hpp"
#include "tubemeasure/shape.hpp"
#include "tubemeasure/tube.hpp"
#include "tubemeasure/vector.hpp"

namespace tubemeasure {

/// A value with its Monte-Carlo standard error (zero for closed forms).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Sampling knobs shared by the Monte-Carlo estimators.
struct McSettings {
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: TUBEMEASURE_THREADS or hardware concurrency
};

/// Volume of the unit ball in R^m for 0 <= m <= 8.
inline double unit_ball_volume(int m) {
  if (m < 0 || m > kMaxDim) throw DimensionError("unit ball volume defined here for 0 <= m <= 8");
  int k = m / 2;
  double pi_k = std::pow(std::numbers::pi, k);
  if (m % 2 == 0) return pi_k / linalg::factorial(k);
  // gamma_{2k+1} = 2 k! (4 pi)^k / (2k+1)!
  return 2.0 * linalg::factorial(k) * std::pow(4.0, k) * pi_k / linalg::factorial(m);
}

inline bool has_volume(const Shape& s) {
  if (s.is<PointCloud>()) return false;
  if (const auto* u = s.get_if<Union>()) {
    for (const auto& m : u->members)
      if (has_volume(m)) return true;
    return false;
  }
  return true;
}

inline double diameter(const Shape& s) {
  require_bounded(s, "diameter");
  if (const auto* c = s.get_if<Cuboid>()) {
    double sum = 0.0;
    for (double h : c->half_lengths) sum += 4.0 * h * h;
    return std::sqrt(sum);
  }
  if (const auto* b = s.get_if<Ball>()) return 2.0 * b->radius;
  auto gens = generators(s);
  double best = 0.0;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i; j < gens.size(); ++j)
      best = std::max(best, distance(gens[i].point, gens[j].point) + gens[i].radius + gens[j].radius);
  return best;
}

/// Width of the shape along `d`: max minus min of d.x over the shape.
inline double extent_along(const Shape& s, const Direction& d) {
  auto gens = generators(s);
  if (gens.empty()) return 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& g : gens) {
    double t = dot(g.point, d.vec());
    lo = std::min(lo, t - g.radius);
    hi = std::max(hi, t + g.radius);
  }
  return hi - lo;
}

/// Uniform point in a bounded shape with positive volume. Clouds carry no
/// volume and are ignored inside unions.
inline Vector sample_uniform(const Shape& s, Rng& rng) {
  if (const auto* b = s.get_if<Ball>()) {
    int n = b->dim();
    Vector g = rng.normal_vector(n);
    double len = norm(g);
    double rad = b->radius * std::pow(rng.uniform(), 1.0 / n);
    return b->center + (rad / len) * g;
  }
  if (const auto* c = s.get_if<Cuboid>()) {
    Vector local(c->dim());
    for (int i = 0; i < c->dim(); ++i) local[i] = rng.uniform(-c->half_lengths[i], c->half_lengths[i]);
    return c->center + c->frame.to_world(local);
  }
  if (!has_volume(s)) throw DegenerateShapeError("cannot sample a shape with zero volume");
  Box box = bounding_box(s);
  for (int attempt = 0; attempt < 10'000'000; ++attempt) {
    Vector x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
    if (contains(s, x)) return x;
  }
  throw GeometryError("rejection sampling failed to hit the shape");
}

namespace detail {

/// Hit-or-miss over `box` with an arbitrary indicator; deterministic for any
/// thread count.
template <typename Indicator>
Estimate hit_or_miss(const Box& box, Indicator hit, const McSettings& mc) {
  double box_volume = box.empty() ? 0.0 : box.volume();
  if (!(box_volume > 0.0)) return {};
  const int n = box.dim();
  auto counts = run_batches<std::size_t>(
      mc.samples, mc.seed,
      [&](std::size_t, std::uint64_t seed, std::size_t count) {
        Rng rng(seed);
        std::size_t hits = 0;
        Vector x(n);
        for (std::size_t k = 0; k < count; ++k) {
          for (int i = 0; i < n; ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
          if (hit(x)) ++hits;
        }
        return hits;
      },
      mc.threads);
  std::size_t hits = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  double p = static_cast<double>(hits) / static_cast<double>(mc.samples);
  return {box_volume * p, box_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(mc.samples))};
}

}  // namespace detail

/// Lebesgue measure in R^n. Balls, cuboids and polytopes use closed forms;
/// clouds have measure zero; unions use hit-or-miss over their bounding box.
inline Estimate mc_volume(const Shape& s, const McSettings& mc) {
  if (mc.samples < 1000) throw ParameterError("Monte-Carlo volume needs at least 1000 samples");
  require_bounded(s, "volume");
  if (const auto* b = s.get_if<Ball>()) return {unit_ball_volume(b->dim()) * std::pow(b->radius, b->dim()), 0.0};
  if (const auto* c = s.get_if<Cuboid>()) return {c->volume(), 0.0};
  if (const auto* p = s.get_if<ConvexPolytope>()) return {p->volume(), 0.0};
  if (s.is<PointCloud>()) return {};
  const auto& u = std::get<Union>(s.variant());
  if (u.members.size() == 1) return mc_volume(u.members.front(), mc);
  if (!has_volume(s)) return {};
  return detail::hit_or_miss(bounding_box(s), [&](const Vector& x) { return contains(s, x); }, mc);
}

inline Estimate mc_volume(const Shape& s, std::size_t samples, std::uint64_t seed) {
  return mc_volume(s, McSettings{samples, seed, 0});
}

/// Monte-Carlo |E n T|.
inline Estimate mc_intersection_volume(const Shape& s, const Tube& t, const McSettings& mc) {
  require_bounded(s, "intersection volume");
  if (t.dim() != s.dim()) throw DimensionError("tube and shape disagree in dimension");
  if (!has_volume(s)) return {};
  return detail::hit_or_miss(
      bounding_box(s), [&](const Vector& x) { return contains(s, x) && point_in_tube(x, t); }, mc);
}

/// (n-1)-measure of the orthogonal projection of `s` onto d-perp.
/// Exact for balls, cuboids, polytopes and clouds; unions of several
/// members are sampled over the bounding box of their shadow.
inline Estimate shadow_area(const Shape& s, const Direction& d, const McSettings& mc = {20'000, 0, 0}) {
  require_bounded(s, "shadow area");
  if (s.dim() != d.dim()) throw DimensionError("direction and shape disagree in dimension");
  if (s.dim() < 2) throw DimensionError("shadow area needs ambient dimension >= 2");
  const int n = s.dim();
  if (const auto* b = s.get_if<Ball>()) return {unit_ball_volume(n - 1) * std::pow(b->radius, n - 1), 0.0};
  if (const auto* c = s.get_if<Cuboid>()) {
    // Cauchy: half the sum over the 2n faces of |d.normal| * face area.
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double face = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) face *= 2.0 * c->half_lengths[j];
      total += std::abs(dot(d.vec(), c->frame.vector(i).vec())) * face;
    }
    return {total, 0.0};
  }
  if (const auto* p = s.get_if<ConvexPolytope>()) {
    double total = 0.0;
    for (const auto& f : p->facets()) total += std::abs(dot(d.vec(), f.normal)) * f.measure;
    return {0.5 * total, 0.0};
  }
  if (s.is<PointCloud>()) return {};
  const auto& u = std::get<Union>(s.variant());
  if (u.members.size() == 1) return shadow_area(u.members.front(), d, mc);
  if (!has_volume(s)) return {};

  Frame frame = Frame::from_axis(d);
  Box box{Vector(n - 1), Vector(n - 1)};
  for (int i = 0; i + 1 < n; ++i) {
    box.lo[i] = std::numeric_limits<double>::infinity();
    box.hi[i] = -std::numeric_limits<double>::infinity();
  }
  for (const auto& g : generators(s)) {
    Vector y = frame.cross_coords(g.point);
    for (int i = 0; i + 1 < n; ++i) {
      box.lo[i] = std::min(box.lo[i], y[i] - g.radius);
      box.hi[i] = std::max(box.hi[i], y[i] + g.radius);
    }
  }
  return detail::hit_or_miss(
      box,
      [&](const Vector& y) {
        Vector local(n);
        for (int i = 0; i + 1 < n; ++i) local[i] = y[i];
        return line_meets(s, frame.to_world(local), d);
      },
      mc);
}

}  // namespace tubemeasure
