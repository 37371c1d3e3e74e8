// Command-line front end: bounds, plank width, covers, packings, refinement
// and the proof walkthrough. Exit status: 0 success, 1 invariant or step
// failure, 2 input error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tubemeasure/tubemeasure.hpp"

namespace tb = tubemeasure;
using tb::io::json;

namespace {

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t samples = 1'000'000;
  int grid_points = 2048;
  std::string format = "json";
};

json config_echo(const std::string& command, const RunConfig& cfg) {
  return json{{"command", command},
              {"seed", cfg.seed},
              {"samples", cfg.samples},
              {"grid_points", cfg.grid_points},
              {"format", cfg.format}};
}

void emit(const json& doc, const RunConfig& cfg) {
  if (cfg.format == "csv")
    std::cout << tb::io::to_csv(doc);
  else
    std::cout << doc.dump(2) << '\n';
}

tb::Shape load_shape(const std::string& path, const std::string& builtin) {
  if (!path.empty() && !builtin.empty()) throw tb::ParseError("give either --shape or --builtin, not both");
  if (!builtin.empty()) return tb::io::builtin_shape(builtin);
  if (path.empty()) throw tb::ParseError("a shape is required (--shape FILE or --builtin NAME)");
  return tb::io::read_shape(path);
}

tb::McSettings mc_settings(const RunConfig& cfg) {
  if (cfg.samples < 1000) throw tb::ParameterError("--samples must be at least 1000");
  return {cfg.samples, cfg.seed, 0};
}

int cmd_bounds(const RunConfig& cfg, const std::string& shape_path, const std::string& builtin) {
  tb::Shape s = load_shape(shape_path, builtin);
  tb::OptimizerSettings opt;
  if (cfg.grid_points < 1) throw tb::ParameterError("--grid-points must be positive");
  opt.grid_points = cfg.grid_points;
  opt.shadow_mc.seed = cfg.seed;
  tb::BoundReport r = tb::compute_bounds(s, opt, mc_settings(cfg));
  json doc{{"config", config_echo("bounds", cfg)}, {"shape", {{"dim", s.dim()}, {"kind", s.kind()}}}};
  tb::io::merge_into(doc, tb::io::to_json(r));
  emit(doc, cfg);
  return r.consistent() ? 0 : 1;
}

int cmd_plank(const RunConfig& cfg, const std::string& shape_path, const std::string& builtin) {
  tb::Shape s = load_shape(shape_path, builtin);
  tb::DirectionBound w = tb::plank_value_2d(s);
  json doc{{"config", config_echo("plank", cfg)},
           {"shape", {{"dim", s.dim()}, {"kind", s.kind()}}},
           {"width", w.value},
           {"direction", tb::io::to_json(w.direction)}};
  emit(doc, cfg);
  return 0;
}

json check_json(const tb::CoverCheck& chk) {
  json out{{"covered", chk.covered}, {"points_tested", chk.points_tested}};
  out["uncovered_point"] = chk.uncovered_point ? tb::io::to_json(*chk.uncovered_point) : json(nullptr);
  return out;
}

int cmd_cover(const RunConfig& cfg, const std::string& shape_path, const std::string& builtin,
              const std::string& cover_path, bool search, int budget, const std::vector<double>& parallel) {
  tb::Shape s = load_shape(shape_path, builtin);
  const int modes = (!cover_path.empty() ? 1 : 0) + (search ? 1 : 0) + (!parallel.empty() ? 1 : 0);
  if (modes != 1) throw tb::ParseError("give exactly one of --cover, --search or --parallel");
  const std::size_t samples = mc_settings(cfg).samples;
  json doc{{"config", config_echo("cover", cfg)}, {"shape", {{"dim", s.dim()}, {"kind", s.kind()}}}};

  if (!cover_path.empty()) {
    tb::TubeCover cover = tb::io::cover_from_json(tb::io::read_json_file(cover_path), s.dim());
    doc["mode"] = "file";
    doc["tubes"] = cover.size();
    doc["cost"] = tb::cover_cost(cover);
    tb::io::merge_into(doc, check_json(tb::cover_check(s, cover, samples, cfg.seed)));
  } else if (!parallel.empty()) {
    if (static_cast<int>(parallel.size()) != s.dim() + 1)
      throw tb::ParseError("--parallel takes the n direction coordinates followed by the grid step");
    tb::Vector d(std::span<const double>(parallel.data(), static_cast<std::size_t>(s.dim())));
    tb::ParallelCover pc = tb::parallel_cover_from_projection(s, tb::Direction(d), parallel.back());
    doc["mode"] = "parallel";
    doc["direction"] = tb::io::to_json(tb::Direction(d));
    doc["grid_step"] = parallel.back();
    doc["tubes"] = pc.cover.size();
    doc["cost"] = pc.cost;
    doc["shadow"] = {{"value", pc.shadow.value}, {"std_error", pc.shadow.std_error}};
    tb::io::merge_into(doc, check_json(tb::cover_check(s, pc.cover, samples, cfg.seed)));
    doc["cover"] = tb::io::to_json(pc.cover);
  } else {
    tb::SearchSettings ss;
    ss.validation_samples = samples;
    ss.optimizer.grid_points = cfg.grid_points;
    ss.optimizer.shadow_mc.seed = cfg.seed;
    tb::CoverSearchResult res = tb::cover_search(s, budget, cfg.seed, ss);
    doc["mode"] = "search";
    doc["budget"] = budget;
    doc["strategy"] = res.strategy;
    doc["tubes"] = res.cover.size();
    doc["cost"] = res.cost;
    doc["baseline_cost"] = res.baseline_cost;
    doc["min_shadow"] = res.min_shadow;
    doc["notable"] = res.notable;
    doc["notes"] = res.notes;
    tb::io::merge_into(doc, check_json(tb::cover_check(s, res.cover, samples, cfg.seed)));
    doc["cover"] = tb::io::to_json(res.cover);
  }
  emit(doc, cfg);
  return 0;
}

int cmd_pack(const RunConfig& cfg, int dim, int depth, double radius) {
  tb::SquarePacking p = tb::ball_square_packing(dim, radius, depth);
  json doc{{"config", config_echo("pack", cfg)}};
  tb::io::merge_into(doc, tb::io::to_json(p));
  emit(doc, cfg);
  return 0;
}

int cmd_refine(const RunConfig& cfg, const std::string& a, const std::string& b) {
  tb::Rational ra = tb::Rational::parse(a), rb = tb::Rational::parse(b);
  tb::Refinement r = tb::common_refinement(ra, rb);
  json doc{{"config", config_echo("refine", cfg)},
           {"a", tb::io::to_json(ra)},
           {"b", tb::io::to_json(rb)},
           {"delta", tb::io::to_json(r.delta)},
           {"count_a", r.count_a},
           {"count_b", r.count_b}};
  emit(doc, cfg);
  return 0;
}

int cmd_proof(const RunConfig& cfg, int n, int depth, bool adversarial) {
  if (n < 2 || n > tb::kMaxDim) throw tb::ParameterError("proof dimension must be in [2, 8]");
  tb::WalkthroughOptions opt;
  opt.adversarial = adversarial;
  json report = tb::run_proof_walkthrough(n, depth, cfg.seed, opt);
  json doc{{"config", config_echo("proof", cfg)}};
  tb::io::merge_into(doc, report);
  emit(doc, cfg);
  if (!report["passed"].get<bool>()) {
    std::cerr << "error: step '" << report["failed_step"].get<std::string>() << "' failed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tube-measure bounds, covers and proof walkthrough"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string shape_path, builtin, cover_path, rat_a, rat_b;
  int dim = 3, depth = 4, budget = 64;
  double radius = 1.0;
  bool search = false, adversarial = false;
  std::vector<double> parallel;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    sub->add_option("--samples", cfg.samples, "Monte Carlo samples")->capture_default_str();
    sub->add_option("--grid-points", cfg.grid_points, "Direction grid size")->capture_default_str();
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  };
  auto shape_opts = [&](CLI::App* sub) {
    sub->add_option("--shape", shape_path, "Shape JSON file");
    sub->add_option("--builtin", builtin, "Built-in shape")
        ->check(CLI::IsMember({"tetrahedron", "unit-ball", "unit-cube"}));
  };

  auto* bounds = app.add_subcommand("bounds", "Lower and upper bounds for the tube-measure of a shape");
  common(bounds);
  shape_opts(bounds);
  auto* plank = app.add_subcommand("plank", "Minimal width of a planar convex shape");
  common(plank);
  shape_opts(plank);
  auto* cover = app.add_subcommand("cover", "Cost and coverage of a tube cover");
  common(cover);
  shape_opts(cover);
  cover->add_option("--cover", cover_path, "Cover JSON file");
  cover->add_flag("--search", search, "Search for a cheap cover");
  cover->add_option("--budget", budget, "Tube budget for --search")->capture_default_str();
  cover->add_option("--parallel", parallel, "Direction coordinates then grid step")->expected(3, 9);
  auto* pack = app.add_subcommand("pack", "Dyadic square packing of a ball");
  common(pack);
  pack->add_option("--dim", dim, "Dimension of the ball")->capture_default_str();
  pack->add_option("--depth", depth, "Maximum depth")->capture_default_str();
  pack->add_option("--radius", radius, "Ball radius")->capture_default_str();
  auto* refine = app.add_subcommand("refine", "Common refinement of two rational widths");
  common(refine);
  refine->add_option("--a", rat_a, "First width p/q")->required();
  refine->add_option("--b", rat_b, "Second width p/q")->required();
  auto* proof = app.add_subcommand("proof", "Walk through every step of the argument");
  common(proof);
  proof->add_option("--dim", dim, "Ambient dimension")->capture_default_str();
  proof->add_option("--depth", depth, "Subdivision depth")->capture_default_str();
  proof->add_flag("--adversarial", adversarial, "Use weights that break the pigeonhole precondition");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*bounds) return cmd_bounds(cfg, shape_path, builtin);
    if (*plank) return cmd_plank(cfg, shape_path, builtin);
    if (*cover) return cmd_cover(cfg, shape_path, builtin, cover_path, search, budget, parallel);
    if (*pack) return cmd_pack(cfg, dim, depth, radius);
    if (*refine) return cmd_refine(cfg, rat_a, rat_b);
    if (*proof) return cmd_proof(cfg, dim, depth, adversarial);
  } catch (const tb::InvariantError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const tb::NoWitnessError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const tb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
