#pragma once

#include <cmath>

#include "tubemeasure/error.hpp"
#include "tubemeasure/rational.hpp"
#include "tubemeasure/vector.hpp"

namespace tubemeasure {

/// Closed r-neighbourhood of the line {point + t * axis}.
struct Tube {
  Vector point;
  Direction axis;
  double radius = 0.0;

  Tube() = default;
  Tube(Vector p, Direction a, double r) : point(std::move(p)), axis(std::move(a)), radius(r) {
    require_same_dim(point, axis.vec());
    if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("tube radius must be positive");
  }
  int dim() const { return point.dim(); }
};

/// Rigid copy of [-delta, delta]^{n-1} x R: the cross coordinates of
/// (x - anchor) in `frame` must lie in [-delta, delta].
struct SquareTube {
  Frame frame;
  Vector anchor;
  Rational half_width;

  SquareTube() = default;
  SquareTube(Frame f, Vector a, Rational delta) : frame(std::move(f)), anchor(std::move(a)), half_width(delta) {
    require_same_dim(anchor, frame.axis().vec());
    if (half_width <= Rational(0)) throw ParameterError("square tube half width must be positive");
  }
  int dim() const { return anchor.dim(); }
};

/// Distance from `p` to the axis line of `t`.
inline double distance_to_axis(const Vector& p, const Vector& point, const Direction& axis) {
  Vector w = p - point;
  double t = dot(w, axis.vec());
  return std::sqrt(std::max(0.0, squared_norm(w) - t * t));
}

inline bool point_in_tube(const Vector& p, const Tube& t) {
  require_same_dim(p, t.point);
  return distance_to_axis(p, t.point, t.axis) <= t.radius;
}

/// Closed-set membership. `slack` widens the cross section by an absolute
/// amount and defaults to zero.
inline bool point_in_square_tube(const Vector& p, const SquareTube& st, double slack = 0.0) {
  require_same_dim(p, st.anchor);
  Vector cross = st.frame.cross_coords(p - st.anchor);
  double delta = st.half_width.to_double() + slack;
  for (int i = 0; i < cross.dim(); ++i)
    if (std::abs(cross[i]) > delta) return false;
  return true;
}

}  // namespace tubemeasure
