#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tubemeasure/bounds.hpp"
#include "tubemeasure/covers.hpp"
#include "tubemeasure/error.hpp"
#include "tubemeasure/fsum.hpp"
#include "tubemeasure/geometry.hpp"
#include "tubemeasure/packing.hpp"
#include "tubemeasure/rational.hpp"
#include "tubemeasure/shape.hpp"
#include "tubemeasure/tube.hpp"

namespace tubemeasure {

//---------------------------------------------------------------------------//
// Pigeonhole selection
//---------------------------------------------------------------------------//

struct PigeonholeTotals {
  double mass = 0.0;
  double weight = 0.0;
};

/// Lazy form over `count` implicit entries whose totals are known in
/// advance. Entries are generated only until the first qualifying one.
inline std::uint64_t pigeonhole_select_lazy(std::uint64_t count, const std::function<double(std::uint64_t)>& mass,
                                            const std::function<double(std::uint64_t)>& weight, double eps,
                                            const PigeonholeTotals& totals) {
  if (count == 0) throw ParameterError("pigeonhole selection needs at least one entry");
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("pigeonhole epsilon must lie in (0, 1)");
  if (totals.weight < (1.0 - eps) * totals.mass)
    throw NoWitnessError("pigeonhole precondition fails: sum of weights below (1 - eps) times sum of masses");
  for (std::uint64_t i = 0; i < count; ++i) {
    double m = mass(i), w = weight(i);
    if (!(m > 0.0)) throw ParameterError("pigeonhole masses must be positive");
    if (!(w >= 0.0)) throw ParameterError("pigeonhole weights must be nonnegative");
    if (w >= (1.0 - eps) * m) return i;
  }
  throw NoWitnessError("no entry reaches (1 - eps) of its mass despite the aggregate inequality");
}

/// Streaming form: two passes over `count` implicit entries, the first
/// summing masses and weights exactly.
inline std::uint64_t pigeonhole_select_stream(std::uint64_t count, const std::function<double(std::uint64_t)>& mass,
                                              const std::function<double(std::uint64_t)>& weight, double eps) {
  std::vector<double> ms, ws;
  for (std::uint64_t i = 0; i < count; ++i) {
    ms.push_back(mass(i));
    ws.push_back(weight(i));
  }
  return pigeonhole_select_lazy(
      count, [&](std::uint64_t i) { return ms[i]; }, [&](std::uint64_t i) { return ws[i]; }, eps,
      {exact_sum(ms), exact_sum(ws)});
}

/// Smallest index i with w_i >= (1 - eps) m_i, given sum w >= (1 - eps) sum m.
/// A failed precondition raises NoWitnessError.
inline std::size_t pigeonhole_select(std::span<const double> masses, std::span<const double> weights, double eps) {
  if (masses.size() != weights.size()) throw ParameterError("pigeonhole lists differ in length");
  return pigeonhole_select_stream(
      masses.size(), [&](std::uint64_t i) { return masses[i]; }, [&](std::uint64_t i) { return weights[i]; }, eps);
}

//---------------------------------------------------------------------------//
// Tube subdivision
//---------------------------------------------------------------------------//

/// A round tube split into parallel square tubes, one per packing square of
/// its cross-section. Squares stay in orbit form until expanded.
struct TubeSubdivision {
  Tube tube;
  Frame frame;
  SquarePacking packing;

  SquareTube square_tube(const PackingSquare& sq) const {
    Vector anchor = tube.point;
    for (int j = 0; j < packing.dim(); ++j) anchor = anchor + frame.cross()[j].vec() * sq.center[j].to_double();
    return SquareTube(frame, anchor, sq.half_width);
  }
  std::vector<SquareTube> square_tubes(std::uint64_t limit = 1'000'000) const {
    std::vector<SquareTube> out;
    for (const auto& sq : packing.squares(limit)) out.push_back(square_tube(sq));
    return out;
  }
  /// Sum of (2 delta_i)^(n-1), correctly rounded.
  double total_measure() const {
    std::vector<double> terms;
    for (const auto& c : packing.classes())
      terms.push_back(static_cast<double>(c.multiplicity) *
                      std::pow(2.0 * packing.half_width(c.level).to_double(), packing.dim()));
    return exact_sum(terms);
  }
  double tube_measure() const { return unit_ball_volume(packing.dim()) * std::pow(tube.radius, packing.dim()); }
  double deficit() const { return (1.0 - packing.covered_fraction()) * tube_measure(); }
};

inline TubeSubdivision subdivide(const Tube& t, int max_depth) {
  const int n = t.dim();
  if (n < 2) throw DimensionError("tube subdivision needs n >= 2");
  return {t, Frame::from_axis(t.axis), ball_square_packing(n - 1, t.radius, max_depth)};
}

/// Square tubes sharing the axis of `t` whose cross-sections pack its disk.
inline std::vector<SquareTube> subdivide_tube(const Tube& t, int max_depth) {
  return subdivide(t, max_depth).square_tubes();
}

//---------------------------------------------------------------------------//
// Common refinement of rational widths
//---------------------------------------------------------------------------//

struct Refinement {
  Rational delta;
  std::int64_t count_a = 0;
  std::int64_t count_b = 0;
};

/// Largest delta dividing both widths; a square tube of half-width a splits
/// into count_a^(n-1) tubes of half-width delta.
inline Refinement common_refinement(const Rational& a, const Rational& b) {
  if (a <= Rational(0) || b <= Rational(0)) throw ParameterError("refinement widths must be positive");
  Refinement r;
  r.delta = rational_gcd(a, b);
  Rational qa = a / r.delta, qb = b / r.delta;
  if (qa.den() != 1 || qb.den() != 1) throw InvariantError("rational gcd does not divide its arguments");
  r.count_a = qa.num();
  r.count_b = qb.num();
  return r;
}

//---------------------------------------------------------------------------//
// Eccentric cuboids
//---------------------------------------------------------------------------//

/// Cuboid centred in `ball` with n-1 edges eta and the long edge
/// L = sqrt(4 delta^2 - (n-1) eta^2) along `axis`; its diameter is 2 delta.
inline Cuboid cuboid_in_ball(const Ball& ball, const Direction& axis, double eta) {
  const int n = ball.dim();
  if (axis.dim() != n) throw DimensionError("cuboid axis and ball disagree in dimension");
  if (!(eta > 0.0)) throw ParameterError("short edge must be positive");
  double delta = ball.radius;
  double long_sq = 4.0 * delta * delta - (n - 1) * eta * eta;
  if (!(long_sq > 0.0)) throw GeometryError("short edge too large: (n-1) eta^2 must be below 4 delta^2");
  std::vector<double> half(static_cast<std::size_t>(n), 0.5 * eta);
  half.back() = 0.5 * std::sqrt(long_sq);
  return Cuboid(ball.center, Frame::from_axis(axis), std::move(half));
}

struct AlignedCuboidPair {
  Cuboid first;
  Cuboid second;
  SquareTube enclosing;  // half-width eta / 2 around the line of centres
};

/// Cuboids in two disjoint equal balls, both with the long axis on the line
/// through the centres and sharing one cross frame.
inline AlignedCuboidPair align_cuboids(const Ball& b1, const Ball& b2, double eta) {
  require_same_dim(b1.center, b2.center);
  if (std::abs(b1.radius - b2.radius) > 1e-12 * std::max(b1.radius, b2.radius))
    throw ParameterError("aligned cuboids need balls of equal radius");
  double gap = distance(b1.center, b2.center);
  if (!(gap > b1.radius + b2.radius)) throw ParameterError("aligned cuboids need disjoint balls");
  Direction axis(b2.center - b1.center);
  Frame frame = Frame::from_axis(axis);
  AlignedCuboidPair pair{cuboid_in_ball(b1, axis, eta), cuboid_in_ball(b2, axis, eta),
                         SquareTube(frame, b1.center, Rational::from_double(0.5 * eta))};
  pair.second.frame = pair.first.frame;
  return pair;
}

/// Every vertex of both cuboids inside the enclosing tube, allowing a
/// rounding slack of 1e-12 relative to the coordinate scale.
inline bool aligned_pair_contained(const AlignedCuboidPair& pair) {
  double scale = 1.0;
  for (const auto* c : {&pair.first, &pair.second})
    for (int i = 0; i < c->dim(); ++i) scale = std::max(scale, std::abs(c->center[i]));
  double slack = 1e-12 * scale;
  for (const auto* c : {&pair.first, &pair.second})
    for (const auto& v : c->vertices())
      if (!point_in_square_tube(v, pair.enclosing, slack)) return false;
  return true;
}

//---------------------------------------------------------------------------//
// Parameters and the final inequality
//---------------------------------------------------------------------------//

struct ProofParameters {
  int n = 2;
  double p = 0.0;
  double eps = 0.0;
  Rational delta;
  double eta = 0.0;

  /// sqrt(3 / (4 (n-1))): the supremum of admissible p.
  static double p_sup(int n) { return std::sqrt(3.0 / (4.0 * (n - 1))); }

  static ProofParameters make(int n, double p, double eps, const Rational& delta) {
    ProofParameters out{n, p, eps, delta, 2.0 * delta.to_double() * p};
    out.validate();
    return out;
  }

  /// Structural constraints: p in (0, sup), eps > 0, delta > 0,
  /// eta = 2 delta p and (n-1) eta^2 < 4 delta^2.
  void validate() const {
    if (n < 2 || n > kMaxDim) throw ParameterError("proof dimension must be in [2, 8]");
    if (!(p > 0.0 && p < p_sup(n))) throw ParameterError("p must lie in (0, sqrt(3/(4(n-1))))");
    if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
    if (delta <= Rational(0)) throw ParameterError("delta must be positive");
    double d = delta.to_double();
    if (std::abs(eta - 2.0 * d * p) > 1e-12 * std::max(1.0, eta)) throw ParameterError("eta must equal 2 delta p");
    if (!((n - 1) * eta * eta < 4.0 * d * d)) throw ParameterError("(n-1) eta^2 must be below 4 delta^2");
  }

  double root_term() const { return std::sqrt(1.0 - (n - 1) * p * p); }

  /// sqrt(1 - (n-1) p^2) - eps / p^(n-1) > 1/2: small enough epsilon.
  bool eps_admissible() const { return root_term() - eps / std::pow(p, n - 1) > 0.5; }
  bool p_admissible() const { return root_term() > 0.5; }
};

/// p at half its supremum, eps at half its bound, eta = 2 delta p.
inline ProofParameters choose_parameters(int n, const Rational& delta) {
  if (n < 2 || n > kMaxDim) throw ParameterError("proof dimension must be in [2, 8]");
  double p = 0.5 * ProofParameters::p_sup(n);
  double root = std::sqrt(1.0 - (n - 1) * p * p);
  double eps = 0.5 * std::pow(p, n - 1) * (root - 0.5);
  return ProofParameters::make(n, p, eps, delta);
}

struct ContradictionResult {
  double rhs = 0.0;          // 2 (sqrt(1 - (n-1)(eta/2delta)^2) - eps (2delta/eta)^(n-1))
  double rhs_raw = 0.0;      // 2 (|C| / (2 delta eta^(n-1)) - eps (2delta/eta)^(n-1))
  double cuboid_volume = 0.0;
  bool contradiction = false;
};

inline ContradictionResult contradiction_check(const ProofParameters& params) {
  params.validate();
  const int n = params.n;
  const double delta = params.delta.to_double();
  const double eta = params.eta;
  const double ratio = eta / (2.0 * delta);
  const double penalty = params.eps * std::pow(2.0 * delta / eta, n - 1);

  ContradictionResult r;
  r.rhs = 2.0 * (std::sqrt(1.0 - (n - 1) * ratio * ratio) - penalty);
  Cuboid c = cuboid_in_ball(Ball(Vector(n), delta), Direction::axis(n, n - 1), eta);
  r.cuboid_volume = c.volume();
  r.rhs_raw = 2.0 * (r.cuboid_volume / (2.0 * delta * std::pow(eta, n - 1)) - penalty);
  if (std::abs(r.rhs - r.rhs_raw) > 1e-12 * std::max(1.0, std::abs(r.rhs)))
    throw InvariantError("the two forms of the final inequality disagree");
  r.contradiction = r.rhs > 1.0;
  return r;
}

}  // namespace tubemeasure
