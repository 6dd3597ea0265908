#include "cli.hpp"

#include "hypercurv/asymptotics.hpp"
#include "hypercurv/errors.hpp"
#include "hypercurv/height_field.hpp"
#include "hypercurv/p_laplacian.hpp"
#include "hypercurv/report.hpp"
#include "hypercurv/rigidity.hpp"
#include "hypercurv/verification.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <iostream>
#include <optional>
#include <sstream>

namespace hypercurv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Usage problems (bad flags, malformed descriptors) map to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string surface;
  std::string point;
  std::string grid;
  std::string levels = "1,2,3,4";
  std::optional<double> p;
  std::uint64_t seed = 7;
  std::string out;
  std::string profile = "strict";
  std::string suite = "all";
  int samples = 100;
};

// strict: analytic catalog data; fd: sampled grids, whose derivatives carry
// interpolation error.
struct Profile {
  double fd_step_scale;  // multiple of default_fd_step
  double gap_tol;        // relative gap for principal-curvature clusters
};

Profile profile_of(const std::string& name) {
  if (name == "fd") return {10.0, 1e-3};
  return {1.0, 1e-6};
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) throw UsageError(flag + ": cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

struct LoadedSurface {
  HeightField field;
  json input;
};

// Accepts a descriptor file or an inline JSON object.
LoadedSurface load_surface(const std::string& arg) {
  if (arg.empty()) throw UsageError("--surface is required");
  json desc;
  fs::path base;
  json input;
  try {
    if (!arg.empty() && arg.front() == '{') {
      desc = json::parse(arg);
      input["surface_path"] = nullptr;
    } else {
      std::ifstream in(arg);
      if (!in) throw UsageError("--surface: cannot open " + arg);
      desc = json::parse(in);
      base = fs::path(arg).parent_path();
      input["surface_path"] = arg;
    }
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("--surface: invalid JSON: ") + e.what());
  }
  if (!desc.is_object()) throw UsageError("--surface: descriptor must be a JSON object");
  HeightField field = surface_from_json(desc, base);
  input["surface"] = desc;
  return {std::move(field), std::move(input)};
}

GridSpec load_grid(const std::string& text) {
  if (text.empty()) throw UsageError("--grid is required");
  return GridSpec::parse(text);
}

Window box_of(const GridSpec& g) { return {g.origin, g.upper()}; }

class Session {
 public:
  Session(std::string command, const Options& o, std::ostream& out) : opts_(o), out_(out) {
    manifest_.command = std::move(command);
    manifest_.seed = o.seed;
    manifest_.config["tolerance_profile"] = o.profile;
    if (!o.out.empty()) fs::create_directories(o.out);
  }

  RunManifest& manifest() { return manifest_; }

  // Path for an output file; empty when --out was not given.
  std::optional<fs::path> output(const std::string& name) {
    if (opts_.out.empty()) return std::nullopt;
    fs::path p = fs::path(opts_.out) / name;
    manifest_.outputs.push_back(p.generic_string());
    return p;
  }

  void emit(json report, const std::string& file) {
    if (auto p = output(file)) {
      report["manifest"] = to_json(manifest_);
      std::ofstream f(*p);
      if (!f) throw DataError("cannot write " + p->string());
      f << report.dump(2) << '\n';
    } else {
      report["manifest"] = to_json(manifest_);
    }
    out_ << report.dump(2) << '\n';
  }

 private:
  const Options& opts_;
  std::ostream& out_;
  RunManifest manifest_;
};

int cmd_analyze(const Options& o, std::ostream& out) {
  Session s("analyze", o, out);
  LoadedSurface surf = load_surface(o.surface);
  if (o.point.empty()) throw UsageError("--point is required");
  const Vec x = to_vec(parse_list(o.point, "--point"));
  if (x.size() != surf.field.dim()) throw UsageError("--point: expected " + std::to_string(surf.field.dim()) + " coordinates");
  if (!surf.field.evaluable(x)) throw UsageError("--point lies outside the surface domain");
  const double step = profile_of(o.profile).fd_step_scale * default_fd_step(x);
  s.manifest().input = surf.input;
  s.manifest().input["point"] = to_json(x);
  s.manifest().config["fd_step"] = step;
  s.emit(point_report(surf.field, x, step), "analyze.json");
  return kSuccess;
}

int cmd_scan(const Options& o, std::ostream& out) {
  Session s("scan", o, out);
  LoadedSurface surf = load_surface(o.surface);
  const GridSpec grid = load_grid(o.grid);
  if (grid.dim() != surf.field.dim()) throw UsageError("--grid dimension does not match the surface");
  s.manifest().input = surf.input;
  s.manifest().config["grid"] = to_json(grid);
  auto csv = s.output("scan.csv");
  if (!csv) throw UsageError("scan writes CSV and requires --out");
  const std::size_t rows = write_scan_csv(surf.field, grid, *csv);
  s.emit({{"rows", rows}, {"nodes", grid.node_count()}}, "scan.json");
  return kSuccess;
}

int cmd_classify(const Options& o, std::ostream& out) {
  Session s("classify", o, out);
  LoadedSurface surf = load_surface(o.surface);
  const std::vector<double> levels = parse_list(o.levels, "--levels");
  std::optional<GridSpec> grid;
  if (!o.grid.empty()) grid = load_grid(o.grid);
  if (o.samples < 1) throw UsageError("--samples must be positive");
  const Profile prof = profile_of(o.profile);
  s.manifest().input = surf.input;
  s.manifest().config["levels"] = levels;
  s.manifest().config["samples"] = o.samples;
  s.manifest().config["gap_tolerance"] = prof.gap_tol;
  if (grid) s.manifest().config["grid"] = to_json(*grid);

  const ClassifyOutcome c = classify_surface(surf.field, levels, o.samples, o.seed, grid, prof.gap_tol);
  json report = to_json(c.verdict);
  report["recession"] = to_json(c.recession);
  report["constancy"] = {{"structure", to_string(c.constancy.structure)},
                         {"samples", c.constancy.samples},
                         {"kappa0", c.constancy.kappa0},
                         {"kappa_transverse", c.constancy.kappa_transverse},
                         {"var_kappa0", c.constancy.var_kappa0},
                         {"var_kappa_transverse", c.constancy.var_kappa_transverse},
                         {"product_defect", c.constancy.product_defect},
                         {"min_ricci_eig", c.constancy.min_ricci_eig},
                         {"detail", c.constancy.detail}};
  report["domain_convexity"] = surf.field.is_catalog() ? "catalog" : "assumed";
  s.emit(report, "classify.json");
  return kSuccess;
}

SolverConfig solver_config(const Options& o, int n) {
  SolverConfig cfg;
  cfg.p = o.p.value_or(static_cast<double>(n));
  try {
    cfg.validate();
  } catch (const ParameterError& e) {
    throw UsageError(std::string("--p: ") + e.what());
  }
  return cfg;
}

json solver_json(const SolverConfig& c) {
  return {{"p", c.p}, {"epsilon", c.epsilon}, {"max_iterations", c.max_iterations}, {"gradient_tolerance", c.gradient_tolerance},
          {"armijo", c.armijo}, {"backtrack", c.backtrack}};
}

int cmd_solve(const Options& o, std::ostream& out) {
  Session s("solve", o, out);
  LoadedSurface surf = load_surface(o.surface);
  const GridSpec grid = load_grid(o.grid);
  if (grid.dim() != surf.field.dim()) throw UsageError("--grid dimension does not match the surface");
  const SolverConfig cfg = solver_config(o, grid.dim());
  s.manifest().input = surf.input;
  s.manifest().config["grid"] = to_json(grid);
  s.manifest().config["solver"] = solver_json(cfg);

  // Dirichlet data h = log f on the box boundary; the interior starts at the
  // boundary mean.
  std::vector<double> values(grid.node_count(), 0.0);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!grid.on_box_boundary(i)) continue;
    const Vec x = grid.position(i);
    if (!surf.field.evaluable(x)) throw UsageError("--grid boundary leaves the surface domain at node " + std::to_string(i));
    values[i] = std::log(surf.field.value(x));
    sum += values[i];
    ++count;
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!grid.on_box_boundary(i)) values[i] = sum / static_cast<double>(count);
  const SolveResult r = solve_p_harmonic(GridFunction::with_box_boundary(grid, std::move(values)), cfg);
  if (auto stem = s.output("solution.json")) {
    s.output("solution.csv");
    write_grid(r.solution, stem->replace_extension());
  }
  if (auto trace = s.output("energy_trace.csv")) write_energy_trace(r, *trace);
  json report{{"converged", r.converged},
              {"stop_reason", r.stop_reason},
              {"iterations", r.iterations},
              {"residual", r.residual},
              {"initial_energy", r.trace.front().energy},
              {"final_energy", r.trace.back().energy}};
  s.emit(report, "solve.json");
  return r.converged ? kSuccess : kFailure;
}

int cmd_probe(const Options& o, std::ostream& out) {
  Session s("probe", o, out);
  LoadedSurface surf = load_surface(o.surface);
  const GridSpec grid = load_grid(o.grid);
  if (grid.dim() != surf.field.dim()) throw UsageError("--grid dimension does not match the surface");
  const SolverConfig cfg = solver_config(o, grid.dim());
  s.manifest().input = surf.input;
  s.manifest().config["grid"] = to_json(grid);
  s.manifest().config["solver"] = solver_json(cfg);
  s.manifest().config["witness_box"] = {{"lo", to_json(grid.origin)}, {"hi", to_json(grid.upper())}};
  const ProbeResult r = viscosity_probe(surf.field, box_of(grid), cfg, grid.spacing);
  json report{{"subharmonic", r.subharmonic},
              {"min_margin", r.min_margin},
              {"tolerance", r.tolerance},
              {"worst_point", to_json(r.worst_point)},
              {"excised_nodes", r.excised_nodes},
              {"solver_converged", r.solver_converged},
              {"iterations", r.iterations}};
  s.emit(report, "probe.json");
  return r.solver_converged ? kSuccess : kFailure;
}

int cmd_boundary(const Options& o, std::ostream& out) {
  Session s("boundary", o, out);
  LoadedSurface surf = load_surface(o.surface);
  const std::vector<double> levels = parse_list(o.levels, "--levels");
  std::optional<GridSpec> grid;
  if (!o.grid.empty()) grid = load_grid(o.grid);
  s.manifest().input = surf.input;
  s.manifest().config["levels"] = levels;
  if (grid) s.manifest().config["grid"] = to_json(*grid);
  s.emit(to_json(recession_report(surf.field, levels, grid)), "boundary.json");
  return kSuccess;
}

int cmd_verify(const Options& o, std::ostream& out) {
  std::vector<int> ids;
  if (o.suite == "all") {
    for (int id = 1; id <= kCriterionCount; ++id) ids.push_back(id);
  } else {
    for (double v : parse_list(o.suite, "--suite")) {
      if (v != std::floor(v) || v < 1 || v > kCriterionCount) throw UsageError("--suite: expected 'all' or criterion numbers 1-8");
      ids.push_back(static_cast<int>(v));
    }
  }
  RunManifest m;
  m.command = "verify";
  m.seed = o.seed;
  m.config["suite"] = o.suite;
  json results = json::array();
  int failed = 0;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, o.seed);
    out << format_result(r) << std::endl;
    failed += r.passed ? 0 : 1;
    results.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    const fs::path p = fs::path(o.out) / "verify.json";
    m.outputs.push_back(p.generic_string());
    std::ofstream f(p);
    // Timings are left out so that the file is reproducible.
    f << json{{"criteria", results}, {"failed", failed}, {"manifest", to_json(m)}}.dump(2) << '\n';
  }
  return failed ? kFailure : kSuccess;
}

void add_surface(CLI::App* c, Options& o) { c->add_option("--surface", o.surface, "surface descriptor (JSON file or inline object)")->required(); }
void add_common(CLI::App* c, Options& o) {
  c->add_option("--seed", o.seed, "seed for sampled points");
  c->add_option("--out", o.out, "output directory");
  c->add_option("--tolerance-profile", o.profile, "strict or fd")->check(CLI::IsMember({"strict", "fd"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"hypercurv: curvature lab for graphs in the upper half-space model"};
  app.name("hypercurv");
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "point report at --point");
  add_surface(analyze, o);
  analyze->add_option("--point", o.point, "comma-separated coordinates")->required();
  add_common(analyze, o);

  auto* scan = app.add_subcommand("scan", "CSV of pointwise quantities over --grid");
  add_surface(scan, o);
  scan->add_option("--grid", o.grid, "lo:hi:nodes per axis, comma-separated")->required();
  add_common(scan, o);

  auto* classify = app.add_subcommand("classify", "global verdict from spectrum constancy and asymptotic boundary");
  add_surface(classify, o);
  classify->add_option("--levels", o.levels, "sublevel depths M");
  classify->add_option("--grid", o.grid, "analysis grid (default: the surface window)");
  classify->add_option("--samples", o.samples, "sample points for the constancy scan");
  add_common(classify, o);

  auto* solve = app.add_subcommand("solve", "p-harmonic Dirichlet problem with boundary data log f");
  add_surface(solve, o);
  solve->add_option("--grid", o.grid, "box and spacing")->required();
  solve->add_option("--p", o.p, "exponent (default n)");
  add_common(solve, o);

  auto* probe = app.add_subcommand("probe", "n-subharmonic comparison on the --grid box");
  add_surface(probe, o);
  probe->add_option("--grid", o.grid, "witness box and spacing")->required();
  probe->add_option("--p", o.p, "exponent (must equal n)");
  add_common(probe, o);

  auto* boundary = app.add_subcommand("boundary", "sublevel components and boundary point count");
  add_surface(boundary, o);
  boundary->add_option("--levels", o.levels, "sublevel depths M");
  boundary->add_option("--grid", o.grid, "analysis grid (default: the surface window)");
  add_common(boundary, o);

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--suite", o.suite, "'all' or comma-separated criterion numbers");
  add_common(verify, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze(o, out);
    if (*scan) return cmd_scan(o, out);
    if (*classify) return cmd_classify(o, out);
    if (*solve) return cmd_solve(o, out);
    if (*probe) return cmd_probe(o, out);
    if (*boundary) return cmd_boundary(o, out);
    if (*verify) return cmd_verify(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    out << json{{"error", e.what()}, {"command", args.empty() ? "" : args.front()}}.dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace hypercurv::cli
