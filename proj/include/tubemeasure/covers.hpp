#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tubemeasure/bounds.hpp"
#include "tubemeasure/error.hpp"
#include "tubemeasure/fsum.hpp"
#include "tubemeasure/geometry.hpp"
#include "tubemeasure/random.hpp"
#include "tubemeasure/shape.hpp"
#include "tubemeasure/tube.hpp"

namespace tubemeasure {

using CoverTube = std::variant<Tube, SquareTube>;

/// Finite family of round and square tubes in a common R^n.
class TubeCover {
 public:
  TubeCover() = default;
  explicit TubeCover(std::vector<CoverTube> tubes) : tubes_(std::move(tubes)) {
    if (tubes_.empty()) throw ParameterError("a tube cover needs at least one tube");
    int n = tube_dim(tubes_.front());
    for (const auto& t : tubes_)
      if (tube_dim(t) != n) throw DimensionError("cover tubes disagree in dimension");
  }

  static int tube_dim(const CoverTube& t) {
    return std::visit([](const auto& x) { return x.dim(); }, t);
  }

  int dim() const { return tube_dim(tubes_.front()); }
  const std::vector<CoverTube>& tubes() const { return tubes_; }
  std::size_t size() const { return tubes_.size(); }

  TubeCover concat(const TubeCover& other) const {
    std::vector<CoverTube> all = tubes_;
    all.insert(all.end(), other.tubes_.begin(), other.tubes_.end());
    return TubeCover(std::move(all));
  }

 private:
  std::vector<CoverTube> tubes_;
};

inline double tube_cost(const CoverTube& t) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Tube>) return tube_exact_measure(x);
        else return square_tube_exact_measure(x);
      },
      t);
}

/// Sum of gamma_{n-1} r^{n-1} over round tubes and (2 delta)^{n-1} over
/// square tubes, summed without rounding error before the final rounding,
/// so the value is independent of tube order.
inline double cover_cost(const TubeCover& c) {
  std::vector<double> terms;
  terms.reserve(c.size());
  for (const auto& t : c.tubes()) terms.push_back(tube_cost(t));
  return exact_sum(terms);
}

/// Exact cost of the square tubes alone.
inline Rational square_cover_cost(const TubeCover& c) {
  Rational total(0);
  for (const auto& t : c.tubes())
    if (const auto* st = std::get_if<SquareTube>(&t)) total += square_tube_exact_measure_rational(*st);
  return total;
}

inline bool point_covered(const TubeCover& c, const Vector& p) {
  for (const auto& t : c.tubes()) {
    bool in = std::visit(
        [&](const auto& x) -> bool {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Tube>) return point_in_tube(p, x);
          else return point_in_square_tube(p, x);
        },
        t);
    if (in) return true;
  }
  return false;
}

struct CoverCheck {
  bool covered = true;
  std::optional<Vector> uncovered_point;  // first failure in test order
  std::size_t points_tested = 0;
};

namespace detail {

inline void collect_cloud_points(const Shape& s, std::vector<Vector>& out) {
  if (const auto* c = s.get_if<PointCloud>()) {
    out.insert(out.end(), c->points.begin(), c->points.end());
  } else if (const auto* u = s.get_if<Union>()) {
    for (const auto& m : u->members) collect_cloud_points(m, out);
  }
}

}  // namespace detail

/// Tests every cloud point of `s` exactly, then `samples` uniform points of
/// its volumetric part. Sampling is batched and deterministic in `seed`.
inline CoverCheck cover_check(const Shape& s, const TubeCover& c, std::size_t samples, std::uint64_t seed, int threads = 0) {
  require_bounded(s, "cover check");
  if (s.dim() != c.dim()) throw DimensionError("shape and cover disagree in dimension");
  CoverCheck result;
  std::vector<Vector> exact;
  detail::collect_cloud_points(s, exact);
  for (const auto& p : exact) {
    ++result.points_tested;
    if (!point_covered(c, p)) {
      result.covered = false;
      result.uncovered_point = p;
      return result;
    }
  }
  if (samples == 0 || !has_volume(s)) return result;
  auto misses = run_batches<std::optional<Vector>>(
      samples, seed,
      [&](std::size_t, std::uint64_t batch_seed, std::size_t count) -> std::optional<Vector> {
        Rng rng(batch_seed);
        for (std::size_t k = 0; k < count; ++k) {
          Vector x = sample_uniform(s, rng);
          if (!point_covered(c, x)) return x;
        }
        return std::nullopt;
      },
      threads);
  result.points_tested += samples;
  for (auto& m : misses) {
    if (m) {
      result.covered = false;
      result.uncovered_point = *m;
      break;
    }
  }
  return result;
}

namespace detail {

/// Conservative test for "the closed box [lo, hi] meets conv(pts)" in R^m.
/// Returns false only with a separating direction as certificate.
inline bool box_meets_hull(const Vector& lo, const Vector& hi, std::span<const Vector> pts,
                           std::span<const Vector> extra_normals) {
  const int m = lo.dim();
  auto separated_by = [&](const Vector& u) {
    double qmin = std::numeric_limits<double>::infinity();
    for (const auto& q : pts) qmin = std::min(qmin, dot(u, q));
    double bmax = 0.0;
    for (int i = 0; i < m; ++i) bmax += u[i] > 0.0 ? u[i] * hi[i] : u[i] * lo[i];
    return qmin > bmax;
  };
  for (int i = 0; i < m; ++i) {
    Vector e = Vector::unit(m, i);
    if (separated_by(e) || separated_by(-e)) return false;
  }
  for (const auto& u : extra_normals)
    if (separated_by(u)) return false;
  if (m <= 1) return true;
  // Frank-Wolfe on dist(x, box)^2 over conv(pts); each iterate proposes a
  // separating direction.
  Vector x = pts.front();
  for (int it = 0; it < 64; ++it) {
    Vector clamped = x;
    for (int i = 0; i < m; ++i) clamped[i] = std::clamp(x[i], lo[i], hi[i]);
    Vector g = x - clamped;
    if (squared_norm(g) == 0.0) return true;
    if (separated_by(g)) return false;
    const Vector* s = &pts.front();
    for (const auto& q : pts)
      if (dot(g, q) < dot(g, *s)) s = &q;
    Vector step = *s - x;
    double denom = squared_norm(step);
    if (denom == 0.0) break;
    double t = std::clamp(-dot(g, step) / denom, 0.0, 1.0);
    if (t == 0.0) break;
    x += t * step;
  }
  return true;
}

/// Outward edge normals of the planar hull of `pts`, used as exact
/// separating-axis candidates in two dimensions.
inline std::vector<Vector> planar_hull_normals(std::vector<Vector> pts) {
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
  std::vector<Vector> normals;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    Vector e = hull[(i + 1) % hull.size()] - hull[i];
    // Hull is counter-clockwise; the separating direction points inward.
    if (norm(e) > 0.0) normals.push_back(Vector{-e[1], e[0]});
  }
  return normals;
}

/// One convex piece of a shadow, in cross-section coordinates.
struct ShadowPiece {
  enum class Kind { disk, hull, point } kind = Kind::point;
  Vector center;
  double radius = 0.0;
  std::vector<Vector> pts;
  std::vector<Vector> normals;
};

inline void shadow_pieces(const Shape& s, const Frame& frame, std::vector<ShadowPiece>& out) {
  using Kind = ShadowPiece::Kind;
  if (const auto* b = s.get_if<Ball>()) {
    out.push_back({Kind::disk, frame.cross_coords(b->center), b->radius, {}, {}});
  } else if (const auto* u = s.get_if<Union>()) {
    for (const auto& m : u->members) shadow_pieces(m, frame, out);
  } else if (const auto* c = s.get_if<PointCloud>()) {
    for (const auto& p : c->points) out.push_back({Kind::point, frame.cross_coords(p), 0.0, {}, {}});
  } else if (s.is<ProductSet>()) {
    throw UnboundedShapeError("cannot cover the shadow of an unbounded product");
  } else {
    ShadowPiece piece{Kind::hull, {}, 0.0, {}, {}};
    std::vector<Generator> gens;
    collect_generators(s, gens);
    for (const auto& g : gens) piece.pts.push_back(frame.cross_coords(g.point));
    if (frame.dim() == 3) piece.normals = planar_hull_normals(piece.pts);
    out.push_back(std::move(piece));
  }
}

inline bool cell_meets_piece(const Vector& lo, const Vector& hi, const ShadowPiece& p) {
  using Kind = ShadowPiece::Kind;
  switch (p.kind) {
    case Kind::disk: {
      double d2 = 0.0;
      for (int i = 0; i < lo.dim(); ++i) {
        double c = std::clamp(p.center[i], lo[i], hi[i]);
        d2 += (p.center[i] - c) * (p.center[i] - c);
      }
      return d2 <= p.radius * p.radius;
    }
    case Kind::point:
      for (int i = 0; i < lo.dim(); ++i)
        if (p.center[i] < lo[i] || p.center[i] > hi[i]) return false;
      return true;
    case Kind::hull:
      return box_meets_hull(lo, hi, p.pts, p.normals);
  }
  return true;
}

}  // namespace detail

struct ParallelCover {
  TubeCover cover;
  double cost = 0.0;
  Estimate shadow;       // shadow area along the tube axis
  double slack = 0.0;    // cost - shadow
};

/// Cover by parallel square tubes of side `grid_step` along `d`: a grid over
/// the bounding box of the shadow, keeping every cell that meets the shadow.
/// With an empty `shift` the grid is centred on that box; otherwise its
/// origin is moved back by `shift` (one entry per cross axis, each in
/// [0, grid_step)).
inline ParallelCover parallel_cover_from_projection(const Shape& s, const Direction& d, double grid_step,
                                                    std::span<const double> shift = {}) {
  require_bounded(s, "parallel cover");
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) throw ParameterError("grid step must be positive");
  const int n = s.dim();
  if (d.dim() != n) throw DimensionError("direction and shape disagree in dimension");
  check_dim(n, 2);
  const int m = n - 1;
  if (!shift.empty() && static_cast<int>(shift.size()) != m) throw DimensionError("grid shift needs n-1 entries");

  Frame frame = Frame::from_axis(d);
  std::vector<detail::ShadowPiece> pieces;
  detail::shadow_pieces(s, frame, pieces);
  if (pieces.empty()) throw ParameterError("cannot cover an empty shape");

  Vector lo(m), hi(m);
  for (int i = 0; i < m; ++i) {
    lo[i] = std::numeric_limits<double>::infinity();
    hi[i] = -std::numeric_limits<double>::infinity();
  }
  for (const auto& p : pieces) {
    auto grow = [&](const Vector& y, double r) {
      for (int i = 0; i < m; ++i) {
        lo[i] = std::min(lo[i], y[i] - r);
        hi[i] = std::max(hi[i], y[i] + r);
      }
    };
    if (p.kind == detail::ShadowPiece::Kind::hull) {
      for (const auto& y : p.pts) grow(y, 0.0);
    } else {
      grow(p.center, p.radius);
    }
  }

  std::vector<long long> counts(static_cast<std::size_t>(m));
  Vector origin(m);
  double total = 1.0;
  for (int i = 0; i < m; ++i) {
    double span = hi[i] - lo[i];
    if (shift.empty()) {
      counts[i] = std::max(1LL, static_cast<long long>(std::ceil(span / grid_step - 1e-9)));
      origin[i] = 0.5 * (lo[i] + hi[i]) - 0.5 * static_cast<double>(counts[i]) * grid_step;
    } else {
      origin[i] = lo[i] - shift[i];
      counts[i] = std::max(1LL, static_cast<long long>(std::ceil((hi[i] - origin[i]) / grid_step)));
    }
    total *= static_cast<double>(counts[i]);
  }
  if (total > 5e6) throw ParameterError("grid step too small: more than 5e6 candidate cells");

  Rational half_width = Rational::from_double(0.5 * grid_step);
  std::vector<CoverTube> tubes;
  std::vector<long long> idx(static_cast<std::size_t>(m), 0);
  for (;;) {
    Vector clo(m), chi(m), centre(n);
    for (int i = 0; i < m; ++i) {
      clo[i] = origin[i] + static_cast<double>(idx[i]) * grid_step;
      chi[i] = clo[i] + grid_step;
      centre[i] = clo[i] + 0.5 * grid_step;
    }
    bool keep = std::any_of(pieces.begin(), pieces.end(),
                            [&](const detail::ShadowPiece& p) { return detail::cell_meets_piece(clo, chi, p); });
    if (keep) tubes.emplace_back(SquareTube(frame, frame.to_world(centre), half_width));
    int pos = 0;
    while (pos < m && ++idx[pos] == counts[pos]) idx[pos++] = 0;
    if (pos == m) break;
  }
  ParallelCover out{TubeCover(std::move(tubes)), 0.0, {}, 0.0};
  out.cost = cover_cost(out.cover);
  out.shadow = shadow_area(s, d);
  out.slack = out.cost - out.shadow.value;
  return out;
}

struct SearchSettings {
  double grid_step = 0.0;              // 0: diameter / 16
  double fit_tolerance = 1e-9;         // relative to max(1, diameter)
  std::size_t validation_samples = 100'000;
  OptimizerSettings optimizer;
};

struct CoverSearchResult {
  TubeCover cover;
  double cost = 0.0;
  double baseline_cost = 0.0;          // projection cover at the witness direction
  double min_shadow = 0.0;
  std::string strategy;
  bool notable = false;                // strictly cheaper than the minimal shadow found
  std::string notes;
};

namespace detail {

/// Greedy RANSAC-style cover of a finite point set: candidate axes through
/// random pairs of uncovered points, each scored by points covered per unit
/// cost with the radius set to the largest residual among those points.
inline TubeCover greedy_line_cover(const std::vector<Vector>& pts, int budget, std::uint64_t seed, double tol) {
  const int n = pts.front().dim();
  const double gamma = unit_ball_volume(n - 1);
  Rng rng(seed);
  std::vector<std::size_t> open(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) open[i] = i;
  std::vector<CoverTube> tubes;
  while (!open.empty()) {
    struct Best {
      double score = -1.0;
      std::size_t count = 0;
      Tube tube;
    } best;
    const std::size_t u = open.size();
    const int trials = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(1, budget)), u * u));
    std::vector<double> residuals(u);
    for (int t = 0; t < trials && u >= 2; ++t) {
      std::size_t a = open[rng.below(u)], b = open[rng.below(u)];
      if (a == b || distance(pts[a], pts[b]) <= tol) continue;
      Direction axis(pts[b] - pts[a]);
      for (std::size_t k = 0; k < u; ++k) residuals[k] = distance_to_axis(pts[open[k]], pts[a], axis);
      std::vector<double> sorted = residuals;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t q = 2; q <= u; ++q) {
        double r = std::max(sorted[q - 1], tol);
        double score = static_cast<double>(q) / (gamma * std::pow(r, n - 1));
        if (score > best.score || (score == best.score && q > best.count)) {
          best = {score, q, Tube(pts[a], axis, r)};
        }
      }
    }
    if (best.count == 0) best.tube = Tube(pts[open.front()], Direction::axis(n, n - 1), tol);
    std::vector<std::size_t> rest;
    for (std::size_t k : open)
      if (!point_in_tube(pts[k], best.tube)) rest.push_back(k);
    if (rest.size() == open.size()) throw InvariantError("greedy line cover made no progress");
    open = std::move(rest);
    tubes.emplace_back(best.tube);
  }
  return TubeCover(std::move(tubes));
}

}  // namespace detail

/// Best-effort search for a cheap finite cover. Seeds with the projection
/// cover along the minimal-shadow direction; point sets then try greedy
/// line fitting, other shapes try `budget` perturbed directions and grid
/// offsets. The result is never costlier than the seed.
inline CoverSearchResult cover_search(const Shape& s, int budget, std::uint64_t seed, const SearchSettings& cfg = {}) {
  require_bounded(s, "cover search");
  const int n = s.dim();
  check_dim(n, 2);
  double diam = diameter(s);
  double step = cfg.grid_step > 0.0 ? cfg.grid_step : (diam > 0.0 ? diam / 16.0 : 1.0);

  DirectionBound witness = upper_bound_min_projection(s, cfg.optimizer);
  ParallelCover seed_cover = parallel_cover_from_projection(s, witness.direction, step);
  CoverSearchResult out{seed_cover.cover, seed_cover.cost, seed_cover.cost, witness.value, "projection", false, ""};

  if (!has_volume(s)) {
    std::vector<Vector> pts;
    detail::collect_cloud_points(s, pts);
    double tol = cfg.fit_tolerance * std::max(1.0, diam);
    TubeCover greedy = detail::greedy_line_cover(pts, budget, seed, tol);
    double cost = cover_cost(greedy);
    if (cost < out.cost) {
      out.cover = std::move(greedy);
      out.cost = cost;
      out.strategy = "greedy line fit";
    }
  } else {
    Rng rng(derive_seed(seed, 1));
    Frame chart = Frame::from_axis(witness.direction);
    double angle = std::sqrt(2.0 * std::numbers::pi / cfg.optimizer.grid_points);
    for (int it = 0; it < budget; ++it) {
      Vector v = witness.direction.vec();
      for (int i = 0; i + 1 < n; ++i) v += rng.uniform(-angle, angle) * chart.cross()[i].vec();
      std::vector<double> shift(static_cast<std::size_t>(n - 1));
      for (auto& x : shift) x = rng.uniform(0.0, step);
      ParallelCover trial = parallel_cover_from_projection(s, Direction(v), step, shift);
      if (trial.cost < out.cost) {
        out.cover = std::move(trial.cover);
        out.cost = trial.cost;
        out.strategy = "perturbed projection grid";
      }
    }
  }
  CoverCheck check = cover_check(s, out.cover, cfg.validation_samples, derive_seed(seed, 2));
  if (!check.covered) throw InvariantError("cover search produced a cover that misses a sampled point");
  if (out.cost < witness.value - 1e-12) {
    out.notable = true;
    out.notes = "cover is strictly cheaper than the best single-direction shadow";
  }
  return out;
}

}  // namespace tubemeasure
