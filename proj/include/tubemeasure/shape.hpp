#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "tubemeasure/error.hpp"
#include "tubemeasure/hull.hpp"
#include "tubemeasure/vector.hpp"

namespace tubemeasure {

struct Ball {
  Vector center;
  double radius = 0.0;

  Ball() = default;
  Ball(Vector c, double r) : center(std::move(c)), radius(r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("ball radius must be positive");
    if (!center.is_finite()) throw ParameterError("ball center must be finite");
  }
  int dim() const { return center.dim(); }
};

/// Box center + sum_i (+/-half_lengths[i]) * frame.vector(i).
struct Cuboid {
  Vector center;
  Frame frame;
  std::vector<double> half_lengths;

  Cuboid() = default;
  Cuboid(Vector c, Frame f, std::vector<double> h) : center(std::move(c)), frame(std::move(f)), half_lengths(std::move(h)) {
    if (frame.dim() != center.dim() || static_cast<int>(half_lengths.size()) != center.dim())
      throw DimensionError("cuboid center, frame and half lengths disagree in dimension");
    for (double x : half_lengths)
      if (!(x > 0.0) || !std::isfinite(x)) throw ParameterError("cuboid half lengths must be positive");
  }
  /// Axis-aligned box.
  static Cuboid aligned(Vector c, std::vector<double> h) {
    int n = c.dim();
    return Cuboid(std::move(c), Frame::standard(n), std::move(h));
  }

  int dim() const { return center.dim(); }

  double volume() const {
    double v = 1.0;
    for (double h : half_lengths) v *= 2.0 * h;
    return v;
  }

  /// All 2^n corners; bit i of the index selects the sign along frame.vector(i).
  std::vector<Vector> vertices() const {
    int n = dim();
    std::vector<Vector> out;
    out.reserve(std::size_t{1} << n);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      Vector v = center;
      for (int i = 0; i < n; ++i) v += ((mask >> i) & 1u ? 1.0 : -1.0) * half_lengths[i] * frame.vector(i).vec();
      out.push_back(v);
    }
    return out;
  }

  bool contains(const Vector& x) const {
    Vector local = frame.to_local(x - center);
    for (int i = 0; i < dim(); ++i)
      if (std::abs(local[i]) > half_lengths[i]) return false;
    return true;
  }
};

/// Convex hull of finitely many points with its facet description.
class ConvexPolytope {
 public:
  ConvexPolytope() = default;

  /// Hull of arbitrary points; interior points are dropped.
  static ConvexPolytope from_points(std::span<const Vector> points) {
    HullResult hull = convex_hull(points);
    ConvexPolytope p;
    for (int idx : hull.extreme) p.vertices_.push_back(points[idx]);
    p.facets_ = std::move(hull.facets);
    for (auto& f : p.facets_) {
      for (int& v : f.vertices) v = static_cast<int>(std::lower_bound(hull.extreme.begin(), hull.extreme.end(), v) - hull.extreme.begin());
    }
    p.volume_ = hull.volume;
    p.tolerance_ = hull.tolerance;
    return p;
  }

  /// Like from_points, but every input point must lie on the boundary of
  /// the hull; an interior point means the list is not in convex position.
  static ConvexPolytope from_vertices(std::span<const Vector> vertices) {
    HullResult hull = convex_hull(vertices);
    for (const auto& v : vertices) {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& f : hull.facets) worst = std::max(worst, dot(f.normal, v) - f.offset);
      if (worst < -hull.tolerance) throw GeometryError("polytope vertices are not in convex position");
    }
    return from_points(vertices);
  }

  int dim() const { return vertices_.empty() ? 0 : vertices_.front().dim(); }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  double volume() const { return volume_; }
  double tolerance() const { return tolerance_; }

  bool contains(const Vector& x) const {
    for (const auto& f : facets_)
      if (dot(f.normal, x) > f.offset + tolerance_) return false;
    return true;
  }

 private:
  std::vector<Vector> vertices_;
  std::vector<Facet> facets_;
  double volume_ = 0.0;
  double tolerance_ = 0.0;
};

struct PointCloud {
  std::vector<Vector> points;

  PointCloud() = default;
  explicit PointCloud(std::vector<Vector> pts) : points(std::move(pts)) {
    if (points.empty()) throw ParameterError("point cloud must be nonempty");
    for (const auto& p : points) {
      if (p.dim() != points.front().dim()) throw DimensionError("cloud points disagree in dimension");
      if (!p.is_finite()) throw ParameterError("cloud point has non-finite coordinates");
    }
  }
  int dim() const { return points.front().dim(); }
};

class Shape;

/// A x R: the base lives in the (n-1)-dimensional cross section of the frame
/// built from `axis`.
struct ProductSet {
  std::shared_ptr<const Shape> base;
  Direction axis;

  int dim() const { return axis.dim(); }
  Frame frame() const { return Frame::from_axis(axis); }
};

struct Union {
  std::vector<Shape> members;
  int ambient_dim = 0;

  int dim() const { return ambient_dim; }
};

class Shape {
 public:
  using Variant = std::variant<Ball, Cuboid, ConvexPolytope, ProductSet, Union, PointCloud>;

  Shape(Ball b) : v_(std::move(b)) {}              // NOLINT(google-explicit-constructor)
  Shape(Cuboid c) : v_(std::move(c)) {}            // NOLINT(google-explicit-constructor)
  Shape(ConvexPolytope p) : v_(std::move(p)) {}    // NOLINT(google-explicit-constructor)
  Shape(PointCloud c) : v_(std::move(c)) {}        // NOLINT(google-explicit-constructor)
  Shape(ProductSet p) : v_(std::move(p)) {         // NOLINT(google-explicit-constructor)
    const auto& ps = std::get<ProductSet>(v_);
    if (!ps.base) throw ParameterError("product set needs a base shape");
    if (ps.base->dim() != ps.axis.dim() - 1) throw DimensionError("product base must have dimension n-1");
  }
  Shape(Union u) : v_(std::move(u)) {              // NOLINT(google-explicit-constructor)
    const auto& un = std::get<Union>(v_);
    check_dim(un.ambient_dim);
    for (const auto& m : un.members)
      if (m.dim() != un.ambient_dim) throw DimensionError("union members disagree in dimension");
  }

  static Shape make_union(std::vector<Shape> members, int dim) { return Shape(Union{std::move(members), dim}); }
  static Shape make_product(Shape base, const Direction& axis) {
    return Shape(ProductSet{std::make_shared<const Shape>(std::move(base)), axis});
  }

  const Variant& variant() const { return v_; }
  template <typename T>
  const T* get_if() const { return std::get_if<T>(&v_); }
  template <typename T>
  bool is() const { return std::holds_alternative<T>(v_); }

  int dim() const {
    return std::visit([](const auto& s) { return s.dim(); }, v_);
  }

  std::string kind() const {
    static const char* names[] = {"ball", "cuboid", "polytope", "product", "union", "cloud"};
    return names[v_.index()];
  }

 private:
  Variant v_;
};

/// Every bounded shape is contained in the convex hull of a finite family of
/// balls (radius 0 for plain points), and that hull has the same diameter
/// and bounding box as the shape.
struct Generator {
  Vector point;
  double radius = 0.0;
};

inline bool is_bounded(const Shape& s) {
  if (s.is<ProductSet>()) return false;
  if (const auto* u = s.get_if<Union>())
    return std::all_of(u->members.begin(), u->members.end(), [](const Shape& m) { return is_bounded(m); });
  return true;
}

inline void require_bounded(const Shape& s, const char* what) {
  if (!is_bounded(s)) throw UnboundedShapeError(std::string(what) + " needs a bounded shape, got an unbounded product");
}

inline void collect_generators(const Shape& s, std::vector<Generator>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Ball>) {
          out.push_back({x.center, x.radius});
        } else if constexpr (std::is_same_v<T, Cuboid>) {
          for (auto& v : x.vertices()) out.push_back({v, 0.0});
        } else if constexpr (std::is_same_v<T, ConvexPolytope>) {
          for (const auto& v : x.vertices()) out.push_back({v, 0.0});
        } else if constexpr (std::is_same_v<T, PointCloud>) {
          for (const auto& v : x.points) out.push_back({v, 0.0});
        } else if constexpr (std::is_same_v<T, Union>) {
          for (const auto& m : x.members) collect_generators(m, out);
        } else {
          throw UnboundedShapeError("product sets are unbounded");
        }
      },
      s.variant());
}

inline std::vector<Generator> generators(const Shape& s) {
  std::vector<Generator> out;
  collect_generators(s, out);
  return out;
}

struct Box {
  Vector lo;
  Vector hi;

  int dim() const { return lo.dim(); }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < lo.dim(); ++i) v *= std::max(0.0, hi[i] - lo[i]);
    return v;
  }
  bool empty() const { return lo.dim() == 0; }
};

/// Axis-aligned bounding box; empty (dimension 0) for an empty union.
inline Box bounding_box(const Shape& s) {
  require_bounded(s, "bounding box");
  auto gens = generators(s);
  if (gens.empty()) return {};
  int n = s.dim();
  Box b{Vector(n), Vector(n)};
  for (int i = 0; i < n; ++i) {
    b.lo[i] = std::numeric_limits<double>::infinity();
    b.hi[i] = -std::numeric_limits<double>::infinity();
  }
  for (const auto& g : gens)
    for (int i = 0; i < n; ++i) {
      b.lo[i] = std::min(b.lo[i], g.point[i] - g.radius);
      b.hi[i] = std::max(b.hi[i], g.point[i] + g.radius);
    }
  return b;
}

/// Point membership. Clouds and products follow exact set semantics.
inline bool contains(const Shape& s, const Vector& x) {
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return squared_norm(x - v.center) <= v.radius * v.radius;
        } else if constexpr (std::is_same_v<T, Cuboid> || std::is_same_v<T, ConvexPolytope>) {
          return v.contains(x);
        } else if constexpr (std::is_same_v<T, PointCloud>) {
          return std::any_of(v.points.begin(), v.points.end(), [&](const Vector& p) { return p == x; });
        } else if constexpr (std::is_same_v<T, Union>) {
          return std::any_of(v.members.begin(), v.members.end(), [&](const Shape& m) { return contains(m, x); });
        } else {
          return contains(*v.base, v.frame().cross_coords(x));
        }
      },
      s.variant());
}

/// True when the line through `x` with direction `d` meets the shape, i.e.
/// when the projection of `x` along `d` lies in the shadow of the shape.
inline bool line_meets(const Shape& s, const Vector& x, const Direction& d) {
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Ball>) {
          Vector w = v.center - x;
          double t = dot(w, d.vec());
          return squared_norm(w) - t * t <= v.radius * v.radius;
        } else if constexpr (std::is_same_v<T, Cuboid>) {
          Vector local = v.frame.to_local(x - v.center);
          Vector dir = v.frame.to_local(d.vec());
          double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
          for (int i = 0; i < v.dim(); ++i) {
            double h = v.half_lengths[i];
            if (dir[i] == 0.0) {
              if (std::abs(local[i]) > h) return false;
              continue;
            }
            double t1 = (-h - local[i]) / dir[i], t2 = (h - local[i]) / dir[i];
            lo = std::max(lo, std::min(t1, t2));
            hi = std::min(hi, std::max(t1, t2));
          }
          return lo <= hi;
        } else if constexpr (std::is_same_v<T, ConvexPolytope>) {
          double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
          for (const auto& f : v.facets()) {
            double a = dot(f.normal, d.vec());
            double b = f.offset + v.tolerance() - dot(f.normal, x);
            if (std::abs(a) < 1e-15) {
              if (b < 0.0) return false;
            } else if (a > 0.0) {
              hi = std::min(hi, b / a);
            } else {
              lo = std::max(lo, b / a);
            }
          }
          return lo <= hi;
        } else if constexpr (std::is_same_v<T, PointCloud>) {
          return std::any_of(v.points.begin(), v.points.end(), [&](const Vector& p) {
            Vector w = p - x;
            double t = dot(w, d.vec());
            return squared_norm(w) - t * t <= 0.0;
          });
        } else if constexpr (std::is_same_v<T, Union>) {
          return std::any_of(v.members.begin(), v.members.end(), [&](const Shape& m) { return line_meets(m, x, d); });
        } else {
          throw UnboundedShapeError("shadow of an unbounded product set");
        }
      },
      s.variant());
}

}  // namespace tubemeasure
