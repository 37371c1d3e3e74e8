#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "tubemeasure/bounds.hpp"
#include "tubemeasure/covers.hpp"
#include "tubemeasure/error.hpp"
#include "tubemeasure/packing.hpp"
#include "tubemeasure/rational.hpp"
#include "tubemeasure/shape.hpp"
#include "tubemeasure/tube.hpp"

namespace tubemeasure::io {

using json = nlohmann::ordered_json;

//---------------------------------------------------------------------------//
// Scalars and vectors
//---------------------------------------------------------------------------//

inline json to_json(const Rational& r) { return json{{"num", r.num()}, {"den", r.den()}}; }

inline json to_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.dim(); ++i) out.push_back(v[i]);
  return out;
}

inline json to_json(const Direction& d) { return to_json(d.vec()); }

inline json to_json(const Frame& f) {
  json cross = json::array();
  for (const auto& c : f.cross()) cross.push_back(to_json(c));
  return json{{"axis", to_json(f.axis())}, {"cross", cross}};
}

inline void require_fields(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw ParseError(what + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.count(item.key())) throw ParseError("unknown field '" + item.key() + "' in " + what);
}

inline const json& field(const json& j, const char* name, const std::string& what) {
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(what + " is missing field '" + name + "'");
  return *it;
}

/// {"num", "den"}, an integer, or a "p/q" string.
inline Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  require_fields(j, {"num", "den"}, "rational");
  const json& num = field(j, "num", "rational");
  const json& den = field(j, "den", "rational");
  if (!num.is_number_integer() || !den.is_number_integer()) throw ParseError("rational parts must be integers");
  if (den.get<std::int64_t>() == 0) throw ParseError("rational denominator is zero");
  return Rational(num.get<std::int64_t>(), den.get<std::int64_t>());
}

/// A JSON number or an exact rational.
inline double real_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_object() || j.is_string()) return rational_from_json(j).to_double();
  throw ParseError(what + " must be a number");
}

inline Vector vector_from_json(const json& j, int dim, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array");
  if (static_cast<int>(j.size()) != dim)
    throw DimensionError(what + " has " + std::to_string(j.size()) + " coordinates, expected " + std::to_string(dim));
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = real_from_json(j[static_cast<std::size_t>(i)], what);
  if (!v.is_finite()) throw ParseError(what + " has non-finite coordinates");
  return v;
}

inline Direction direction_from_json(const json& j, int dim, const std::string& what) {
  return Direction(vector_from_json(j, dim, what));
}

inline Frame frame_from_json(const json& j, int dim) {
  require_fields(j, {"axis", "cross"}, "frame");
  Direction axis = direction_from_json(field(j, "axis", "frame"), dim, "frame axis");
  const json& cross = field(j, "cross", "frame");
  if (!cross.is_array() || static_cast<int>(cross.size()) != dim - 1)
    throw ParseError("frame needs " + std::to_string(dim - 1) + " cross directions");
  std::vector<Direction> cs;
  for (const auto& c : cross) cs.push_back(Direction::from_unit(vector_from_json(c, dim, "frame cross direction")));
  return Frame(Direction::from_unit(axis.vec()), std::move(cs));
}

inline std::vector<Vector> points_from_json(const json& j, int dim, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError(what + " must be a nonempty array of points");
  std::vector<Vector> out;
  for (const auto& p : j) out.push_back(vector_from_json(p, dim, what));
  return out;
}

//---------------------------------------------------------------------------//
// Shapes
//---------------------------------------------------------------------------//

inline Shape shape_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("shape must be a JSON object");
  const json& dj = field(j, "dim", "shape");
  if (!dj.is_number_integer()) throw ParseError("shape dim must be an integer");
  int dim = dj.get<int>();
  check_dim(dim);
  const json& kj = field(j, "kind", "shape");
  if (!kj.is_string()) throw ParseError("shape kind must be a string");
  const std::string kind = kj.get<std::string>();

  if (kind == "ball") {
    require_fields(j, {"dim", "kind", "center", "radius"}, "ball");
    return Ball(vector_from_json(field(j, "center", "ball"), dim, "ball center"),
                real_from_json(field(j, "radius", "ball"), "ball radius"));
  }
  if (kind == "cuboid") {
    require_fields(j, {"dim", "kind", "center", "half_lengths", "frame"}, "cuboid");
    Vector c = vector_from_json(field(j, "center", "cuboid"), dim, "cuboid center");
    Vector h = vector_from_json(field(j, "half_lengths", "cuboid"), dim, "cuboid half_lengths");
    std::vector<double> hs(h.coords().begin(), h.coords().end());
    Frame f = j.contains("frame") ? frame_from_json(j["frame"], dim) : Frame::standard(dim);
    return Cuboid(c, std::move(f), std::move(hs));
  }
  if (kind == "polytope") {
    require_fields(j, {"dim", "kind", "vertices", "points"}, "polytope");
    if (j.contains("vertices") == j.contains("points"))
      throw ParseError("polytope needs exactly one of 'vertices' or 'points'");
    if (j.contains("vertices")) {
      auto vs = points_from_json(j["vertices"], dim, "polytope vertices");
      return ConvexPolytope::from_vertices(vs);
    }
    auto ps = points_from_json(j["points"], dim, "polytope points");
    return ConvexPolytope::from_points(ps);
  }
  if (kind == "cloud") {
    require_fields(j, {"dim", "kind", "points"}, "cloud");
    return PointCloud(points_from_json(field(j, "points", "cloud"), dim, "cloud points"));
  }
  if (kind == "product") {
    require_fields(j, {"dim", "kind", "base", "axis"}, "product");
    Shape base = shape_from_json(field(j, "base", "product"));
    Direction axis = j.contains("axis") ? direction_from_json(j["axis"], dim, "product axis") : Direction::axis(dim, dim - 1);
    return Shape::make_product(std::move(base), axis);
  }
  if (kind == "union") {
    require_fields(j, {"dim", "kind", "members"}, "union");
    const json& ms = field(j, "members", "union");
    if (!ms.is_array() || ms.empty()) throw ParseError("union members must be a nonempty array");
    std::vector<Shape> members;
    for (const auto& m : ms) members.push_back(shape_from_json(m));
    return Shape::make_union(std::move(members), dim);
  }
  throw ParseError("unknown shape kind '" + kind + "'");
}

inline json shape_to_json(const Shape& s) {
  json out{{"dim", s.dim()}, {"kind", s.kind()}};
  if (const auto* b = s.get_if<Ball>()) {
    out["center"] = to_json(b->center);
    out["radius"] = b->radius;
  } else if (const auto* c = s.get_if<Cuboid>()) {
    out["center"] = to_json(c->center);
    out["half_lengths"] = c->half_lengths;
    out["frame"] = to_json(c->frame);
  } else if (const auto* p = s.get_if<ConvexPolytope>()) {
    json vs = json::array();
    for (const auto& v : p->vertices()) vs.push_back(to_json(v));
    out["vertices"] = vs;
  } else if (const auto* pc = s.get_if<PointCloud>()) {
    json ps = json::array();
    for (const auto& v : pc->points) ps.push_back(to_json(v));
    out["points"] = ps;
  } else if (const auto* pr = s.get_if<ProductSet>()) {
    out["base"] = shape_to_json(*pr->base);
    out["axis"] = to_json(pr->axis);
  } else if (const auto* u = s.get_if<Union>()) {
    json ms = json::array();
    for (const auto& m : u->members) ms.push_back(shape_to_json(m));
    out["members"] = ms;
  }
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Shape read_shape(const std::string& path) { return shape_from_json(read_json_file(path)); }

/// Regular simplex inscribed in the unit sphere of R^3.
inline Shape builtin_shape(const std::string& name) {
  if (name == "unit-ball") return Ball(Vector(3), 1.0);
  if (name == "unit-cube") return Cuboid::aligned(Vector{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5});
  if (name == "tetrahedron") {
    const double s = 1.0 / std::sqrt(3.0);
    std::vector<Vector> vs{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    return ConvexPolytope::from_vertices(vs);
  }
  throw ParseError("unknown built-in shape '" + name + "'");
}

//---------------------------------------------------------------------------//
// Covers
//---------------------------------------------------------------------------//

inline json to_json(const CoverTube& t) {
  if (const auto* r = std::get_if<Tube>(&t))
    return json{{"kind", "round"}, {"point", to_json(r->point)}, {"axis", to_json(r->axis)}, {"r", r->radius}};
  const auto& s = std::get<SquareTube>(t);
  return json{{"kind", "square"}, {"anchor", to_json(s.anchor)}, {"frame", to_json(s.frame)}, {"delta", to_json(s.half_width)}};
}

inline json to_json(const TubeCover& c) {
  json out = json::array();
  for (const auto& t : c.tubes()) out.push_back(to_json(t));
  return out;
}

inline CoverTube cover_tube_from_json(const json& j, int dim) {
  if (!j.is_object()) throw ParseError("cover entry must be a JSON object");
  const std::string kind = field(j, "kind", "cover entry").get<std::string>();
  if (kind == "round") {
    require_fields(j, {"kind", "point", "axis", "r"}, "round tube");
    return Tube(vector_from_json(field(j, "point", "round tube"), dim, "tube point"),
                direction_from_json(field(j, "axis", "round tube"), dim, "tube axis"),
                real_from_json(field(j, "r", "round tube"), "tube radius"));
  }
  if (kind == "square") {
    require_fields(j, {"kind", "anchor", "frame", "delta"}, "square tube");
    Frame f = j.contains("frame") ? frame_from_json(j["frame"], dim) : Frame::standard(dim);
    return SquareTube(std::move(f), vector_from_json(field(j, "anchor", "square tube"), dim, "square tube anchor"),
                      rational_from_json(field(j, "delta", "square tube")));
  }
  throw ParseError("unknown cover entry kind '" + kind + "'");
}

/// A list of tubes; `dim` is taken from the first entry when zero.
inline TubeCover cover_from_json(const json& j, int dim = 0) {
  if (!j.is_array() || j.empty()) throw ParseError("cover must be a nonempty array");
  if (dim == 0) {
    const json& first = j.front();
    const char* key = first.contains("point") ? "point" : "anchor";
    if (!first.contains(key) || !first[key].is_array()) throw ParseError("cannot infer cover dimension");
    dim = static_cast<int>(first[key].size());
    check_dim(dim);
  }
  std::vector<CoverTube> tubes;
  for (const auto& t : j) tubes.push_back(cover_tube_from_json(t, dim));
  return TubeCover(std::move(tubes));
}

//---------------------------------------------------------------------------//
// Reports
//---------------------------------------------------------------------------//

inline json to_json(const BoundReport& r) {
  return json{{"lower", r.lower},
              {"lower_std_error", r.lower_std_error},
              {"upper", r.upper},
              {"upper_std_error", r.upper_std_error},
              {"witness_direction", to_json(r.witness_direction)},
              {"method", r.method},
              {"consistent", r.consistent()}};
}

inline json to_json(const PackingSquare& sq) {
  json c = json::array();
  for (const auto& x : sq.center) c.push_back(to_json(x));
  return json{{"level", sq.level}, {"center", c}, {"half_width", to_json(sq.half_width)}};
}

/// Summary, per-level table and orbit classes; individual squares are
/// listed only when there are at most `square_limit` of them.
inline json to_json(const SquarePacking& p, std::uint64_t square_limit = 4096) {
  json levels = json::array();
  for (const auto& l : p.levels())
    levels.push_back({{"level", l.level},
                      {"half_width", to_json(l.half_width)},
                      {"squares", l.squares},
                      {"covered_fraction", l.covered_fraction}});
  json classes = json::array();
  for (const auto& c : p.classes()) {
    PackingSquare rep = p.make_square(c.level, c.folded);
    json centre = json::array();
    for (const auto& x : rep.center) centre.push_back(to_json(x));
    classes.push_back({{"level", c.level},
                       {"representative", centre},
                       {"half_width", to_json(rep.half_width)},
                       {"multiplicity", c.multiplicity}});
  }
  json out{{"dim", p.dim()},
           {"radius", p.radius()},
           {"packed_radius", to_json(p.packed_radius())},
           {"max_depth", p.max_depth()},
           {"square_count", p.square_count()},
           {"total_measure", p.total_measure()},
           {"ball_measure", p.ball_measure()},
           {"covered_fraction", p.covered_fraction()},
           {"levels", levels},
           {"classes", classes}};
  if (p.square_count() <= square_limit) {
    json squares = json::array();
    p.for_each_square([&](const PackingSquare& sq) { squares.push_back(to_json(sq)); });
    out["squares"] = squares;
  }
  return out;
}

/// Copies the members of object `src` into `dst`, in order.
inline void merge_into(json& dst, const json& src) {
  for (const auto& item : src.items()) dst[item.key()] = item.value();
}

//---------------------------------------------------------------------------//
// CSV
//---------------------------------------------------------------------------//

/// Shortest round-trip decimal form, as used by the JSON writer.
inline std::string format_number(double x) { return json(x).dump(); }

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Flattens a JSON object into key,value rows; nested keys are joined with
/// dots and array entries are indexed.
inline void flatten_csv(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& item : j.items()) flatten_csv(item.value(), prefix.empty() ? item.key() : prefix + "." + item.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten_csv(j[i], prefix + "." + std::to_string(i), out);
  } else {
    out << csv_escape(prefix) << ',' << csv_escape(j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

inline std::string to_csv(const json& j) {
  std::ostringstream out;
  out << "key,value\n";
  flatten_csv(j, "", out);
  return out.str();
}

}  // namespace tubemeasure::io
