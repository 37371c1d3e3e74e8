#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "tubemeasure/error.hpp"
#include "tubemeasure/vector.hpp"

namespace tubemeasure {

/// Supporting hyperplane piece of a convex polytope: {x : normal.x = offset}
/// with outward unit normal and (n-1)-dimensional measure.
struct Facet {
  Vector normal;
  double offset = 0.0;
  double measure = 0.0;
  std::vector<int> vertices;  // indices into the hull's input point list
};

struct HullResult {
  std::vector<Facet> facets;   // coplanar simplices merged
  std::vector<int> extreme;    // sorted indices of hull vertices
  double volume = 0.0;
  double tolerance = 0.0;      // absolute distance tolerance used
};

namespace detail {

struct SimplexFacet {
  std::vector<int> vertices;  // sorted
  Vector normal;
  double offset = 0.0;
  double measure = 0.0;
  std::vector<int> outside;
  bool alive = true;
};

inline double coordinate_scale(std::span<const Vector> pts) {
  double scale = 0.0;
  int n = pts.front().dim();
  for (int i = 0; i < n; ++i) {
    double lo = pts.front()[i], hi = lo;
    for (const auto& p : pts) {
      lo = std::min(lo, p[i]);
      hi = std::max(hi, p[i]);
    }
    scale = std::max({scale, hi - lo, std::abs(lo), std::abs(hi)});
  }
  return scale;
}

inline HullResult hull_1d(std::span<const Vector> pts, double eps) {
  auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) { return a[0] < b[0]; });
  if ((*hi)[0] - (*lo)[0] <= eps) throw DegenerateShapeError("interval has zero length");
  HullResult r;
  int ilo = static_cast<int>(lo - pts.begin()), ihi = static_cast<int>(hi - pts.begin());
  r.facets.push_back({Vector{-1.0}, -(*lo)[0], 1.0, {ilo}});
  r.facets.push_back({Vector{1.0}, (*hi)[0], 1.0, {ihi}});
  r.extreme = {std::min(ilo, ihi), std::max(ilo, ihi)};
  r.volume = (*hi)[0] - (*lo)[0];
  r.tolerance = eps;
  return r;
}

}  // namespace detail

/// Quickhull in any dimension 1..kMaxDim with simplicial facets, merged into
/// geometric facets at the end. Throws DegenerateShapeError when the points
/// do not span a full-dimensional body.
inline HullResult convex_hull(std::span<const Vector> pts, double rel_tol = 1e-10) {
  using detail::SimplexFacet;
  if (pts.empty()) throw DegenerateShapeError("convex hull of no points");
  const int n = pts.front().dim();
  for (const auto& p : pts) {
    if (p.dim() != n) throw DimensionError("hull points disagree in dimension");
    if (!p.is_finite()) throw ParameterError("hull point has non-finite coordinates");
  }
  const double eps = rel_tol * std::max(1.0, detail::coordinate_scale(pts));
  if (n == 1) return detail::hull_1d(pts, eps);
  if (static_cast<int>(pts.size()) < n + 1) throw DegenerateShapeError("too few points for a full-dimensional hull");

  // Initial simplex: greedily maximize distance to the current affine span.
  std::vector<int> simplex;
  {
    int first = 0;
    for (int i = 1; i < static_cast<int>(pts.size()); ++i)
      if (lex_less(pts[i], pts[first])) first = i;
    simplex.push_back(first);
    std::vector<Vector> basis;
    for (int k = 1; k <= n; ++k) {
      int best = -1;
      double best_d = -1.0;
      for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
        Vector v = pts[i] - pts[first];
        for (const auto& b : basis) v -= dot(v, b) * b;
        double d = norm(v);
        if (d > best_d) {
          best_d = d;
          best = i;
        }
      }
      if (best_d <= eps) throw DegenerateShapeError("polytope is not full-dimensional");
      Vector v = pts[best] - pts[first];
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) v -= dot(v, b) * b;
      basis.push_back(v * (1.0 / norm(v)));
      simplex.push_back(best);
    }
  }
  Vector interior(n);
  for (int idx : simplex) interior += pts[idx];
  interior *= 1.0 / (n + 1);

  const double ridge_factor = linalg::factorial(n - 1);
  auto make_facet = [&](std::vector<int> verts) {
    std::sort(verts.begin(), verts.end());
    std::vector<Vector> edges;
    for (std::size_t i = 1; i < verts.size(); ++i) edges.push_back(pts[verts[i]] - pts[verts[0]]);
    Vector normal = linalg::generalized_cross(edges);
    double len = norm(normal);
    SimplexFacet f;
    f.vertices = std::move(verts);
    f.measure = len / ridge_factor;
    if (len > 0.0) normal *= 1.0 / len;
    if (dot(normal, interior - pts[f.vertices[0]]) > 0.0) normal = -normal;
    f.normal = normal;
    f.offset = dot(normal, pts[f.vertices[0]]);
    return f;
  };
  auto signed_distance = [&](const SimplexFacet& f, int i) { return dot(f.normal, pts[i]) - f.offset; };

  std::vector<SimplexFacet> facets;
  for (int drop = 0; drop <= n; ++drop) {
    std::vector<int> verts;
    for (int k = 0; k <= n; ++k)
      if (k != drop) verts.push_back(simplex[k]);
    facets.push_back(make_facet(std::move(verts)));
  }

  std::vector<char> in_simplex(pts.size(), 0);
  for (int idx : simplex) in_simplex[idx] = 1;
  auto assign = [&](const std::vector<int>& candidates, std::size_t first_facet) {
    for (int i : candidates) {
      for (std::size_t f = first_facet; f < facets.size(); ++f) {
        if (facets[f].alive && signed_distance(facets[f], i) > eps) {
          facets[f].outside.push_back(i);
          break;
        }
      }
    }
  };
  {
    std::vector<int> rest;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
      if (!in_simplex[i]) rest.push_back(i);
    assign(rest, 0);
  }

  for (;;) {
    std::size_t fi = facets.size();
    for (std::size_t f = 0; f < facets.size(); ++f)
      if (facets[f].alive && !facets[f].outside.empty()) {
        fi = f;
        break;
      }
    if (fi == facets.size()) break;

    int apex = facets[fi].outside.front();
    double far = signed_distance(facets[fi], apex);
    for (int i : facets[fi].outside) {
      double d = signed_distance(facets[fi], i);
      if (d > far) {
        far = d;
        apex = i;
      }
    }

    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < facets.size(); ++f)
      if (facets[f].alive && signed_distance(facets[f], apex) > eps) visible.push_back(f);

    std::map<std::vector<int>, int> ridge_count;
    std::vector<int> orphans;
    for (std::size_t f : visible) {
      const auto& verts = facets[f].vertices;
      for (std::size_t drop = 0; drop < verts.size(); ++drop) {
        std::vector<int> ridge;
        for (std::size_t k = 0; k < verts.size(); ++k)
          if (k != drop) ridge.push_back(verts[k]);
        ++ridge_count[ridge];
      }
      for (int i : facets[f].outside)
        if (i != apex) orphans.push_back(i);
      facets[f].alive = false;
      facets[f].outside.clear();
    }
    std::size_t first_new = facets.size();
    for (const auto& [ridge, count] : ridge_count) {
      if (count != 1) continue;
      std::vector<int> verts = ridge;
      verts.push_back(apex);
      facets.push_back(make_facet(std::move(verts)));
    }
    std::sort(orphans.begin(), orphans.end());
    assign(orphans, first_new);
  }

  // Merge coplanar simplices.
  HullResult result;
  result.tolerance = eps;
  for (const auto& f : facets) {
    if (!f.alive || f.measure <= 0.0) continue;
    auto it = std::find_if(result.facets.begin(), result.facets.end(), [&](const Facet& g) {
      return dot(g.normal, f.normal) > 1.0 - 1e-9 && std::abs(g.offset - f.offset) <= eps;
    });
    if (it == result.facets.end()) {
      result.facets.push_back({f.normal, f.offset, f.measure, f.vertices});
    } else {
      it->measure += f.measure;
      it->vertices.insert(it->vertices.end(), f.vertices.begin(), f.vertices.end());
    }
  }
  std::vector<int> extreme;
  for (auto& f : result.facets) {
    std::sort(f.vertices.begin(), f.vertices.end());
    f.vertices.erase(std::unique(f.vertices.begin(), f.vertices.end()), f.vertices.end());
    extreme.insert(extreme.end(), f.vertices.begin(), f.vertices.end());
  }
  std::sort(extreme.begin(), extreme.end());
  extreme.erase(std::unique(extreme.begin(), extreme.end()), extreme.end());
  result.extreme = std::move(extreme);
  // Divergence theorem: |P| = (1/n) sum_F offset_F * |F|.
  double vol = 0.0;
  for (const auto& f : result.facets) vol += f.offset * f.measure;
  result.volume = vol / n;
  return result;
}

}  // namespace tubemeasure
