#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tubemeasure/bounds.hpp"
#include "tubemeasure/io.hpp"
#include "tubemeasure/proof.hpp"
#include "tubemeasure/random.hpp"

namespace tubemeasure {

struct WalkthroughOptions {
  /// Synthetic square-tube weights that break the (1 - eps) aggregate bound.
  bool adversarial = false;
  /// Tubes in each synthetic cover family.
  int family_size = 4;
};

namespace detail {

using io::json;
using io::to_json;

/// Measure ratios rho_i = w_i / m_i in (1 - 2 eps, 1]. Honest ratios are
/// shrunk towards 1 until sum w >= (1 - eps) sum m; adversarial ones all
/// stay below 1 - 1.5 eps, so the aggregate bound fails.
inline std::vector<double> synthetic_ratios(std::span<const double> masses, double eps, std::uint64_t seed,
                                            bool adversarial) {
  std::vector<double> u(masses.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = hashed_unit(seed, i);
  if (adversarial) {
    for (auto& x : u) x = 0.75 + 0.25 * x;
  } else {
    std::vector<double> loss(masses.size());
    for (std::size_t i = 0; i < u.size(); ++i) loss[i] = 2.0 * eps * u[i] * masses[i];
    double total_loss = exact_sum(loss);
    double allowed = eps * exact_sum(masses);
    if (total_loss > 0.9 * allowed) {
      double shrink = 0.9 * allowed / total_loss;
      for (auto& x : u) x *= shrink;
    }
  }
  std::vector<double> rho(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) rho[i] = 1.0 - 2.0 * eps * u[i];
  return rho;
}

struct StepFailure {
  std::string message;
};

class Report {
 public:
  Report(int n, int depth, std::uint64_t seed, const WalkthroughOptions& opt) {
    doc_["n"] = n;
    doc_["depth"] = depth;
    doc_["seed"] = seed;
    doc_["adversarial"] = opt.adversarial;
    doc_["steps"] = json::array();
  }

  /// Runs `body(inputs, outputs)`; returns its pass flag. Exceptions from the
  /// library become a failed step carrying the message.
  template <typename Body>
  bool step(const std::string& name, Body&& body) {
    json entry{{"name", name}, {"inputs", json::object()}, {"outputs", json::object()}, {"pass", false}};
    bool pass = false;
    try {
      pass = body(entry["inputs"], entry["outputs"]);
    } catch (const Error& e) {
      entry["error"] = e.what();
    }
    entry["pass"] = pass;
    doc_["steps"].push_back(std::move(entry));
    if (!pass && failed_.empty()) failed_ = name;
    return pass;
  }

  json finish() {
    doc_["passed"] = failed_.empty();
    doc_["failed_step"] = failed_.empty() ? json(nullptr) : json(failed_);
    return std::move(doc_);
  }

 private:
  json doc_;
  std::string failed_;
};

struct TubeFamily {
  std::vector<Tube> tubes;
  std::vector<double> masses;
};

/// Seeded round tubes with dyadic radii, standing in for a near-optimal cover.
inline TubeFamily synthetic_family(int n, int size, std::uint64_t seed) {
  static constexpr std::array<double, 4> kRadii{0.5, 0.75, 1.0, 1.25};
  Rng rng(seed);
  TubeFamily fam;
  for (int i = 0; i < size; ++i) {
    Vector point(n);
    for (int j = 0; j < n; ++j) point[j] = rng.uniform(-2.0, 2.0);
    Direction axis = rng.direction(n);
    double r = kRadii[(static_cast<std::size_t>(i) + rng.below(4)) % kRadii.size()];
    fam.tubes.emplace_back(point, axis, r);
    fam.masses.push_back(tube_exact_measure(fam.tubes.back()));
  }
  return fam;
}

struct SelectedSquare {
  SquareTube tube;
  double ratio = 1.0;
};

struct Side {
  std::string label;         // "E" or "complement"
  std::uint64_t seed = 0;
  bool adversarial = false;
  std::optional<Tube> tube;
  std::optional<TubeSubdivision> subdivision;
  std::optional<SelectedSquare> square;
  std::optional<SelectedSquare> subtube;
};

inline bool select_tube(Side& side, int n, const ProofParameters& pe, const WalkthroughOptions& opt, json& in,
                        json& out) {
  TubeFamily fam = synthetic_family(n, opt.family_size, derive_seed(side.seed, 1));
  auto rho = synthetic_ratios(fam.masses, pe.eps, derive_seed(side.seed, 2), false);
  std::vector<double> weights(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) weights[i] = rho[i] * fam.masses[i];
  json tubes = json::array();
  for (const auto& t : fam.tubes) tubes.push_back(to_json(CoverTube(t)));
  in["eps"] = pe.eps;
  in["family"] = tubes;
  in["masses"] = fam.masses;
  in["weights"] = weights;
  std::size_t idx = pigeonhole_select(fam.masses, weights, pe.eps);
  side.tube = fam.tubes[idx];
  out["index"] = idx;
  out["tube"] = to_json(CoverTube(*side.tube));
  out["mass"] = fam.masses[idx];
  out["weight"] = weights[idx];
  return weights[idx] >= (1.0 - pe.eps) * fam.masses[idx];
}

inline bool subdivide_side(Side& side, int depth, const ProofParameters& pe, json& in, json& out) {
  in["tube"] = to_json(CoverTube(*side.tube));
  in["max_depth"] = depth;
  side.subdivision = subdivide(*side.tube, depth);
  const auto& sub = *side.subdivision;
  const auto& pk = sub.packing;
  double total = sub.total_measure();
  double tube_measure = sub.tube_measure();
  json levels = json::array();
  for (const auto& l : pk.levels())
    levels.push_back({{"level", l.level}, {"half_width", to_json(l.half_width)}, {"squares", l.squares},
                      {"covered_fraction", l.covered_fraction}});
  out["square_tubes"] = pk.square_count();
  out["orbit_classes"] = pk.classes().size();
  out["levels"] = levels;
  out["sum_square_measures"] = total;
  out["tube_measure"] = tube_measure;
  out["covered_fraction"] = pk.covered_fraction();
  out["deficit"] = sub.deficit();
  out["finite_stage_suffices"] = pk.covered_fraction() >= 1.0 - pe.eps;
  if (pk.square_count() == 0) throw GeometryError("no square fits the cross-section at this depth");
  bool sum_ok = total <= tube_measure * (1.0 + 1e-12);
  bool deficit_ok = std::abs((tube_measure - total) - sub.deficit()) <= 1e-9 * tube_measure;
  out["partial_sum_bounded"] = sum_ok;
  out["deficit_consistent"] = deficit_ok;
  return sum_ok && deficit_ok;
}

/// Pigeonhole over the square tubes of the subdivision. Squares in one orbit
/// share a ratio, so the smallest qualifying square is the first member of
/// the first qualifying orbit.
inline bool select_square(Side& side, const ProofParameters& pe, json& in, json& out) {
  const auto& sub = *side.subdivision;
  const auto& pk = sub.packing;
  const auto& classes = pk.classes();
  std::vector<double> masses(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i)
    masses[i] = static_cast<double>(classes[i].multiplicity) *
                std::pow(2.0 * pk.half_width(classes[i].level).to_double(), pk.dim());
  auto rho = synthetic_ratios(masses, pe.eps, derive_seed(side.seed, 3), side.adversarial);
  std::vector<double> weights(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) weights[i] = rho[i] * masses[i];
  in["eps"] = pe.eps;
  in["adversarial"] = side.adversarial;
  in["sum_masses"] = exact_sum(masses);
  in["sum_weights"] = exact_sum(weights);
  in["precondition"] = exact_sum(weights) >= (1.0 - pe.eps) * exact_sum(masses);
  std::size_t cls = pigeonhole_select(masses, weights, pe.eps);
  std::uint64_t square_index = 0;
  for (std::size_t i = 0; i < cls; ++i) square_index += classes[i].multiplicity;
  PackingSquare sq = pk.make_square(classes[cls].level, pk.class_members(classes[cls]).front());
  side.square = SelectedSquare{sub.square_tube(sq), rho[cls]};
  out["square_index"] = square_index;
  out["square"] = to_json(sq);
  out["square_tube"] = to_json(CoverTube(side.square->tube));
  out["ratio"] = rho[cls];
  return rho[cls] >= 1.0 - pe.eps;
}

/// Splits the selected square tube into count^(n-1) tubes of half-width
/// delta and picks one by pigeonhole. Ratios come in pairs rho +/- v that
/// preserve the parent's mean, so the totals are known without a full scan.
inline bool select_subtube(Side& side, const Rational& delta, std::int64_t count, const ProofParameters& pe,
                           json& in, json& out) {
  const SquareTube& parent = side.square->tube;
  const int m = parent.dim() - 1;
  const double rho = side.square->ratio;
  const double mass = std::pow(2.0 * delta.to_double(), m);
  const double true_count = std::pow(static_cast<double>(count), m);
  std::uint64_t n_sub = true_count >= 9.0e18 ? std::numeric_limits<std::uint64_t>::max()
                                             : static_cast<std::uint64_t>(std::llround(true_count));
  const std::uint64_t paired = n_sub - (n_sub % 2);
  const std::uint64_t seed = derive_seed(side.seed, 4);
  auto ratio = [&](std::uint64_t i) {
    if (i >= paired) return rho;
    double v = std::min(1.0 - rho, rho) * hashed_unit(seed, i / 2);
    bool up = (splitmix64(derive_seed(seed, i / 2)) & 1u) != 0;
    return ((i % 2 == 0) == up) ? rho + v : rho - v;
  };
  in["parent_half_width"] = to_json(parent.half_width);
  in["delta"] = to_json(delta);
  in["count_per_axis"] = count;
  in["subtubes"] = true_count;
  in["parent_ratio"] = rho;
  PigeonholeTotals totals{true_count * mass, rho * true_count * mass};
  std::uint64_t idx = pigeonhole_select_lazy(
      n_sub, [&](std::uint64_t) { return mass; }, [&](std::uint64_t i) { return ratio(i) * mass; }, pe.eps, totals);

  Vector anchor = parent.anchor;
  std::uint64_t rest = idx;
  json multi = json::array();
  for (int j = 0; j < m; ++j) {
    auto k = static_cast<std::int64_t>(rest % static_cast<std::uint64_t>(count));
    rest /= static_cast<std::uint64_t>(count);
    multi.push_back(k);
    Rational offset = Rational(2 * k + 1 - count) * delta;
    anchor = anchor + parent.frame.cross()[j].vec() * offset.to_double();
  }
  side.subtube = SelectedSquare{SquareTube(parent.frame, anchor, delta), ratio(idx)};
  out["index"] = idx;
  out["cell"] = multi;
  out["square_tube"] = to_json(CoverTube(side.subtube->tube));
  out["ratio"] = side.subtube->ratio;
  return side.subtube->ratio >= 1.0 - pe.eps;
}

inline double max_vertex_distance(const Cuboid& c) {
  auto vs = c.vertices();
  double best = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) best = std::max(best, distance(vs[i], vs[j]));
  return best;
}

}  // namespace detail

/// Runs every constructive step of the argument on synthetic measure data
/// and returns the JSON report. Steps stop at the first failure.
inline io::json run_proof_walkthrough(int n, int depth, std::uint64_t seed, const WalkthroughOptions& opt = {}) {
  using detail::json;
  using io::to_json;
  if (n < 2 || n > kMaxDim) throw ParameterError("proof dimension must be in [2, 8]");
  if (depth < 1 || depth > 20) throw ParameterError("depth must be in [1, 20]");
  if (opt.family_size < 1) throw ParameterError("family size must be positive");

  detail::Report report(n, depth, seed, opt);
  const ProofParameters pe = choose_parameters(n, Rational(1));
  detail::Side e{"E", derive_seed(seed, 100), opt.adversarial, {}, {}, {}, {}};
  detail::Side c{"complement", derive_seed(seed, 200), false, {}, {}, {}, {}};
  Rational delta;
  std::int64_t count_e = 0, count_c = 0;
  std::optional<Ball> b1, b2;
  std::optional<AlignedCuboidPair> pair;
  std::optional<ProofParameters> params;

  auto run = [&]() {
    if (!report.step("choose_p_eps", [&](json& in, json& out) {
          in["n"] = n;
          out["p"] = pe.p;
          out["p_sup"] = ProofParameters::p_sup(n);
          out["eps"] = pe.eps;
          out["root_term"] = pe.root_term();
          out["p_admissible"] = pe.p_admissible();
          out["eps_admissible"] = pe.eps_admissible();
          return pe.p_admissible() && pe.eps_admissible();
        }))
      return;
    for (detail::Side* side : {&e, &c}) {
      if (!report.step("select_tube_" + side->label,
                       [&](json& in, json& out) { return detail::select_tube(*side, n, pe, opt, in, out); }))
        return;
      if (!report.step("subdivide_tube_" + side->label,
                       [&](json& in, json& out) { return detail::subdivide_side(*side, depth, pe, in, out); }))
        return;
      if (!report.step("select_square_" + side->label,
                       [&](json& in, json& out) { return detail::select_square(*side, pe, in, out); }))
        return;
    }
    if (!report.step("common_refinement", [&](json& in, json& out) {
          const Rational& a = e.square->tube.half_width;
          const Rational& b = c.square->tube.half_width;
          in["delta_E"] = to_json(a);
          in["delta_complement"] = to_json(b);
          Refinement r = common_refinement(a, b);
          delta = r.delta;
          count_e = r.count_a;
          count_c = r.count_b;
          out["delta"] = to_json(r.delta);
          out["count_E"] = r.count_a;
          out["count_complement"] = r.count_b;
          return Rational(r.count_a) * r.delta == a && Rational(r.count_b) * r.delta == b;
        }))
      return;
    if (!report.step("select_subtube_E",
                     [&](json& in, json& out) { return detail::select_subtube(e, delta, count_e, pe, in, out); }))
      return;
    if (!report.step("select_subtube_complement",
                     [&](json& in, json& out) { return detail::select_subtube(c, delta, count_c, pe, in, out); }))
      return;
    if (!report.step("place_balls", [&](json& in, json& out) {
          const SquareTube& r1 = e.subtube->tube;
          const SquareTube& r2 = c.subtube->tube;
          const double d = delta.to_double();
          in["radius"] = d;
          Vector c1 = r1.anchor, c2 = r2.anchor;
          int shifts = 0;
          while (distance(c1, c2) <= 2.0 * d * (1.0 + 1e-9) && shifts < 16) {
            ++shifts;
            c2 = r2.anchor + r2.frame.axis().vec() * (4.0 * d * shifts);
          }
          out["shifts"] = shifts;
          out["center_1"] = to_json(c1);
          out["center_2"] = to_json(c2);
          out["separation"] = distance(c1, c2);
          if (distance(c1, c2) <= 2.0 * d) throw GeometryError("tubes too entangled to separate two balls");
          b1 = Ball(c1, d);
          b2 = Ball(c2, d);
          // A ball of radius delta centred on the axis fits the cross-section.
          double off1 = 0.0, off2 = 0.0;
          Vector x1 = r1.frame.cross_coords(c1 - r1.anchor), x2 = r2.frame.cross_coords(c2 - r2.anchor);
          for (int i = 0; i < x1.dim(); ++i) {
            off1 = std::max(off1, std::abs(x1[i]));
            off2 = std::max(off2, std::abs(x2[i]));
          }
          double scale = std::max({1.0, norm(c1), norm(c2)});
          out["axis_offset_1"] = off1;
          out["axis_offset_2"] = off2;
          return off1 <= 1e-12 * scale && off2 <= 1e-12 * scale;
        }))
      return;
    if (!report.step("parameters", [&](json& in, json& out) {
          in["p"] = pe.p;
          in["eps"] = pe.eps;
          in["delta"] = to_json(delta);
          params = ProofParameters::make(n, pe.p, pe.eps, delta);
          out["eta"] = params->eta;
          out["eta_over_2delta"] = params->eta / (2.0 * delta.to_double());
          out["p_admissible"] = params->p_admissible();
          out["eps_admissible"] = params->eps_admissible();
          return params->p_admissible() && params->eps_admissible();
        }))
      return;
    if (!report.step("cuboids_and_alignment", [&](json& in, json& out) {
          in["eta"] = params->eta;
          pair = align_cuboids(*b1, *b2, params->eta);
          const double d = delta.to_double();
          double diam1 = detail::max_vertex_distance(pair->first);
          double diam2 = detail::max_vertex_distance(pair->second);
          double reach = 0.0;
          for (const auto* cub : {&pair->first, &pair->second})
            for (const auto& v : cub->vertices()) reach = std::max(reach, distance(v, cub->center));
          bool contained = aligned_pair_contained(*pair);
          double tube_cost = square_tube_exact_measure(pair->enclosing);
          double eta_power = std::pow(params->eta, n - 1);
          out["half_lengths"] = pair->first.half_lengths;
          out["volume"] = pair->first.volume();
          out["diameter_1"] = diam1;
          out["diameter_2"] = diam2;
          out["max_vertex_radius"] = reach;
          out["enclosing_tube"] = to_json(CoverTube(pair->enclosing));
          out["enclosing_cost"] = tube_cost;
          out["eta_power"] = eta_power;
          out["contained"] = contained;
          bool diam_ok = std::abs(diam1 - 2.0 * d) <= 1e-12 * std::max(1.0, d) &&
                         std::abs(diam2 - 2.0 * d) <= 1e-12 * std::max(1.0, d);
          bool inscribed = reach <= d * (1.0 + 1e-12);
          bool cost_ok = std::abs(tube_cost - eta_power) <= 1e-12 * eta_power;
          return contained && diam_ok && inscribed && cost_ok;
        }))
      return;
    if (!report.step("measure_bounds", [&](json& in, json& out) {
          Shape c1 = pair->first;
          in["cuboid"] = io::shape_to_json(c1);
          Estimate lower = lower_bound_volume_diam(c1);
          double upper = shadow_area(c1, pair->enclosing.frame.axis()).value;
          double eta_power = std::pow(params->eta, n - 1);
          out["lower"] = lower.value;
          out["upper_along_axis"] = upper;
          out["union_upper"] = square_tube_exact_measure(pair->enclosing);
          out["eta_power"] = eta_power;
          return lower.value <= upper * (1.0 + 1e-12) && std::abs(upper - eta_power) <= 1e-9 * eta_power;
        }))
      return;
    report.step("contradiction", [&](json& in, json& out) {
      in["n"] = n;
      in["p"] = params->p;
      in["eps"] = params->eps;
      in["delta"] = to_json(params->delta);
      in["eta"] = params->eta;
      ContradictionResult r = contradiction_check(*params);
      out["rhs"] = r.rhs;
      out["rhs_raw"] = r.rhs_raw;
      out["cuboid_volume"] = r.cuboid_volume;
      out["contradiction"] = r.contradiction;
      return r.contradiction;
    });
  };
  run();
  return report.finish();
}

}  // namespace tubemeasure
