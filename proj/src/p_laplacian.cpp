#include "hypercurv/p_laplacian.hpp"

#include "hypercurv/errors.hpp"
#include "hypercurv/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace hypercurv {

namespace {

// Cell/edge bookkeeping for one lattice. Edge k of a cell joins corner
// offsets lo[k] -> hi[k] along one axis; each cell has n 2^{n-1} edges.
class CellLattice {
 public:
  explicit CellLattice(const GridSpec& spec) : spec_(spec) {
    const int n = spec.dim();
    std::vector<std::size_t> stride(n, 1);
    for (int d = 1; d < n; ++d) stride[d] = stride[d - 1] * static_cast<std::size_t>(spec.dims[d - 1]);
    const int corners = 1 << n;
    std::vector<std::size_t> corner_offset(corners, 0);
    for (int b = 0; b < corners; ++b)
      for (int d = 0; d < n; ++d)
        if (b & (1 << d)) corner_offset[b] += stride[d];
    for (int d = 0; d < n; ++d)
      for (int b = 0; b < corners; ++b)
        if (!(b & (1 << d))) {
          edge_lo_.push_back(corner_offset[b]);
          edge_hi_.push_back(corner_offset[b | (1 << d)]);
        }
    corners_ = corner_offset;

    cell_base_.reserve(spec.cell_count());
    std::vector<int> multi(n, 0);
    for (std::size_t c = 0; c < spec.cell_count(); ++c) {
      cell_base_.push_back(spec.index(multi));
      for (int d = 0; d < n; ++d) {
        if (++multi[d] < spec.dims[d] - 1) break;
        multi[d] = 0;
      }
    }
    weight_ = 1.0 / (static_cast<double>(1 << (n - 1)) * spec.spacing * spec.spacing);
    volume_ = std::pow(spec.spacing, n);
  }

  std::size_t cells() const { return cell_base_.size(); }
  std::size_t base(std::size_t c) const { return cell_base_[c]; }
  const std::vector<std::size_t>& edge_lo() const { return edge_lo_; }
  const std::vector<std::size_t>& edge_hi() const { return edge_hi_; }
  const std::vector<std::size_t>& corners() const { return corners_; }
  double weight() const { return weight_; }
  double volume() const { return volume_; }

  bool finite_cell(std::span<const double> u, std::size_t c) const {
    const std::size_t b = cell_base_[c];
    return std::all_of(corners_.begin(), corners_.end(), [&](std::size_t o) { return std::isfinite(u[b + o]); });
  }

  // Averaged squared edge gradient of the cell.
  double squared_gradient(std::span<const double> u, std::size_t c) const {
    const std::size_t b = cell_base_[c];
    double s = 0.0;
    for (std::size_t k = 0; k < edge_lo_.size(); ++k) {
      const double diff = u[b + edge_hi_[k]] - u[b + edge_lo_[k]];
      s += diff * diff;
    }
    return weight_ * s;
  }

 private:
  GridSpec spec_;
  std::vector<std::size_t> cell_base_;
  std::vector<std::size_t> edge_lo_, edge_hi_, corners_;
  double weight_ = 0.0;
  double volume_ = 0.0;
};

void check_masked_infinities(const GridFunction& u) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!std::isfinite(u.value(i)) && !u.is_boundary(i)) throw DataError("p-Dirichlet energy: -inf at an unmasked node");
}

struct GradientEval {
  std::vector<double> gradient;
  std::vector<double> shifted;  // s_c + eps^2 per cell
};

GradientEval evaluate_gradient(const CellLattice& lat, std::span<const double> u, double p, double eps) {
  GradientEval out;
  out.gradient.assign(u.size(), 0.0);
  out.shifted.assign(lat.cells(), 0.0);
  const auto& lo = lat.edge_lo();
  const auto& hi = lat.edge_hi();
  for (std::size_t c = 0; c < lat.cells(); ++c) {
    if (!lat.finite_cell(u, c)) {
      out.shifted[c] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double s = lat.squared_gradient(u, c) + eps * eps;
    out.shifted[c] = s;
    if (s == 0.0) continue;  // all edge differences vanish
    const double coef = lat.volume() * p * std::pow(s, 0.5 * p - 1.0) * lat.weight();
    const std::size_t b = lat.base(c);
    for (std::size_t k = 0; k < lo.size(); ++k) {
      const double diff = u[b + hi[k]] - u[b + lo[k]];
      out.gradient[b + hi[k]] += coef * diff;
      out.gradient[b + lo[k]] -= coef * diff;
    }
  }
  return out;
}

// Per-cell data for evaluating E(u + alpha d) - E(u) without cancellation.
struct LineModel {
  std::vector<double> shifted;  // s_c + eps^2
  std::vector<double> cross;    // w sum du dd
  std::vector<double> quad;     // w sum dd^2
};

LineModel line_model(const CellLattice& lat, std::span<const double> u, std::span<const double> dir, const std::vector<double>& shifted) {
  LineModel m;
  m.shifted = shifted;
  m.cross.assign(lat.cells(), 0.0);
  m.quad.assign(lat.cells(), 0.0);
  const auto& lo = lat.edge_lo();
  const auto& hi = lat.edge_hi();
  for (std::size_t c = 0; c < lat.cells(); ++c) {
    if (std::isnan(shifted[c])) continue;
    const std::size_t b = lat.base(c);
    double cross = 0.0, quad = 0.0;
    for (std::size_t k = 0; k < lo.size(); ++k) {
      const double du = u[b + hi[k]] - u[b + lo[k]];
      const double dd = dir[b + hi[k]] - dir[b + lo[k]];
      cross += du * dd;
      quad += dd * dd;
    }
    m.cross[c] = lat.weight() * cross;
    m.quad[c] = lat.weight() * quad;
  }
  return m;
}

double energy_change(const CellLattice& lat, const LineModel& m, double p, double alpha, std::vector<double>& scratch) {
  scratch.assign(lat.cells(), 0.0);
  const double half_p = 0.5 * p;
  for (std::size_t c = 0; c < lat.cells(); ++c) {
    const double s0 = m.shifted[c];
    if (std::isnan(s0)) continue;
    const double ds = alpha * (2.0 * m.cross[c] + alpha * m.quad[c]);
    double delta;
    if (s0 > 0.0)
      delta = std::pow(s0, half_p) * std::expm1(half_p * std::log1p(ds / s0));
    else
      delta = std::pow(std::max(ds, 0.0), half_p);
    scratch[c] = lat.volume() * delta;
  }
  return pairwise_sum(scratch);
}

double energy_of(const CellLattice& lat, std::span<const double> u, double p, double eps) {
  std::vector<double> per_cell(lat.cells(), 0.0);
  for (std::size_t c = 0; c < lat.cells(); ++c) {
    if (!lat.finite_cell(u, c)) continue;
    per_cell[c] = lat.volume() * std::pow(lat.squared_gradient(u, c) + eps * eps, 0.5 * p);
  }
  return pairwise_sum(per_cell);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(p >= 2.0) || !std::isfinite(p)) throw ParameterError("solver: p must be >= 2");
  if (!(epsilon > 0.0)) throw ParameterError("solver: regularization epsilon must be positive");
  if (!(tolerance >= 0.0)) throw ParameterError("solver: tolerance must be >= 0");
  if (!(gradient_tolerance > 0.0)) throw ParameterError("solver: gradient tolerance must be positive");
  if (max_iterations < 1) throw ParameterError("solver: max_iterations must be >= 1");
  if (!(armijo > 0.0 && armijo < 1.0)) throw ParameterError("solver: armijo parameter must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ParameterError("solver: backtrack factor must lie in (0, 1)");
  if (max_backtracks < 1) throw ParameterError("solver: max_backtracks must be >= 1");
}

double p_dirichlet_energy(const GridFunction& u, double p, double epsilon) {
  if (!(p >= 1.0)) throw ParameterError("p-Dirichlet energy: p must be >= 1");
  if (!(epsilon >= 0.0)) throw ParameterError("p-Dirichlet energy: epsilon must be >= 0");
  check_masked_infinities(u);
  const CellLattice lat(u.spec());
  return energy_of(lat, u.values(), p, epsilon);
}

std::vector<double> p_dirichlet_gradient(const GridFunction& u, double p, double epsilon) {
  check_masked_infinities(u);
  const CellLattice lat(u.spec());
  return evaluate_gradient(lat, u.values(), p, epsilon).gradient;
}

SolveResult solve_p_harmonic(const GridFunction& boundary_data, const SolverConfig& config) {
  config.validate();
  const GridSpec& spec = boundary_data.spec();
  const int n = spec.dim();
  const std::size_t count = boundary_data.size();

  std::vector<double> u(boundary_data.values().begin(), boundary_data.values().end());
  std::vector<std::size_t> free_nodes;
  std::vector<double> boundary_values;
  for (std::size_t i = 0; i < count; ++i) {
    if (boundary_data.is_boundary(i)) {
      if (!std::isfinite(u[i])) throw DataError("solve_p_harmonic: boundary values must be finite");
      boundary_values.push_back(u[i]);
    } else {
      free_nodes.push_back(i);
    }
  }
  const double boundary_mean = boundary_values.empty() ? 0.0 : pairwise_sum(boundary_values) / static_cast<double>(boundary_values.size());
  for (std::size_t i : free_nodes)
    if (!std::isfinite(u[i])) u[i] = boundary_mean;

  const CellLattice lat(spec);
  const double p = config.p;
  const double eps = config.epsilon;
  const double volume = lat.volume();

  SolveResult result;
  double energy = energy_of(lat, u, p, eps);
  result.trace.push_back({0, energy, 0.0});

  std::vector<double> dir(count, 0.0), prev_grad(count, 0.0), scratch;
  double prev_gg = 0.0;
  double prev_slope = 0.0;
  double prev_alpha = 0.0;
  bool restart = true;

  auto residual_of = [&](const std::vector<double>& g) {
    double r = 0.0;
    for (std::size_t i : free_nodes) r = std::max(r, std::abs(g[i]));
    return r / volume;
  };

  int iter = 0;
  for (;;) {
    GradientEval ge = evaluate_gradient(lat, u, p, eps);
    std::vector<double>& grad = ge.gradient;
    for (std::size_t i = 0; i < count; ++i)
      if (boundary_data.is_boundary(i)) grad[i] = 0.0;
    result.residual = residual_of(grad);
    if (free_nodes.empty() || result.residual <= config.gradient_tolerance) {
      result.converged = true;
      result.stop_reason = "gradient tolerance";
      break;
    }
    if (iter >= config.max_iterations) {
      result.stop_reason = "max iterations";
      break;
    }

    double gg = 0.0;
    for (std::size_t i : free_nodes) gg += grad[i] * grad[i];
    double beta = 0.0;
    if (config.direction == DescentDirection::ConjugateGradient && !restart && prev_gg > 0.0) {
      double num = 0.0;
      for (std::size_t i : free_nodes) num += grad[i] * (grad[i] - prev_grad[i]);
      beta = std::max(0.0, num / prev_gg);  // Polak-Ribiere+
    }
    for (std::size_t i : free_nodes) dir[i] = -grad[i] + beta * dir[i];
    double slope = 0.0;
    for (std::size_t i : free_nodes) slope += grad[i] * dir[i];
    if (!(slope < 0.0)) {
      for (std::size_t i : free_nodes) dir[i] = -grad[i];
      slope = -gg;
    }

    double alpha;
    if (prev_alpha > 0.0 && prev_slope < 0.0) {
      alpha = prev_alpha * prev_slope / slope;
    } else {
      double dmax = 0.0;
      for (std::size_t i : free_nodes) dmax = std::max(dmax, std::abs(dir[i]));
      alpha = std::pow(spec.spacing, 2 - n) / (4.0 * n * p * dmax) * std::max(1.0, std::abs(slope) / dmax);
      alpha = std::min(alpha, 1.0 / dmax);
    }

    const LineModel model = line_model(lat, u, dir, ge.shifted);
    double change = energy_change(lat, model, p, alpha, scratch);
    const double curvature = change - slope * alpha;
    if (curvature > 0.0) {
      const double candidate = -slope * alpha * alpha / (2.0 * curvature);
      const double candidate_change = energy_change(lat, model, p, candidate, scratch);
      if (candidate_change < change) {
        alpha = candidate;
        change = candidate_change;
      }
    }
    int backtracks = 0;
    while (!(change <= config.armijo * alpha * slope) && backtracks < config.max_backtracks) {
      alpha *= config.backtrack;
      change = energy_change(lat, model, p, alpha, scratch);
      ++backtracks;
    }
    if (!(change <= config.armijo * alpha * slope)) {
      if (!restart) {
        restart = true;  // retry along steepest descent
        prev_alpha = 0.0;
        continue;
      }
      result.stop_reason = "line search stalled";
      break;
    }

    for (std::size_t i : free_nodes) u[i] += alpha * dir[i];
    energy += change;
    ++iter;
    result.trace.push_back({iter, energy, alpha});

    prev_grad = grad;
    prev_gg = gg;
    prev_slope = slope;
    prev_alpha = alpha;
    restart = false;

    if (config.tolerance > 0.0 && -change < config.tolerance * std::abs(energy)) {
      GradientEval check = evaluate_gradient(lat, u, p, eps);
      for (std::size_t i = 0; i < count; ++i)
        if (boundary_data.is_boundary(i)) check.gradient[i] = 0.0;
      result.residual = residual_of(check.gradient);
      result.converged = true;
      result.stop_reason = "relative energy decrease";
      break;
    }
  }
  result.iterations = iter;
  result.solution = boundary_data.with_values(std::move(u));
  return result;
}

void write_energy_trace(const SolveResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setprecision(17) << "iteration,energy,step\n";
  for (const EnergyTraceEntry& e : result.trace) out << e.iteration << ',' << e.energy << ',' << e.step << '\n';
}

ComparisonReport comparison_check(const GridFunction& u, const GridFunction& v, double tolerance) {
  const GridSpec& a = u.spec();
  const GridSpec& b = v.spec();
  if (a.dims != b.dims || a.spacing != b.spacing || a.origin != b.origin)
    throw PreconditionError("comparison_check: u and v live on different grids");
  ComparisonReport r;
  r.tolerance = tolerance;
  r.min_difference = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double ui = u.value(i);
    if (u.is_boundary(i) || v.is_boundary(i)) {
      if (std::isfinite(ui) && !(v.value(i) >= ui - tolerance))
        throw PreconditionError("comparison_check: v does not dominate u on the boundary");
      continue;
    }
    if (!std::isfinite(ui)) continue;
    const double diff = v.value(i) - ui;
    r.min_difference = std::min(r.min_difference, diff);
    if (diff < -tolerance) r.violating.push_back(i);
  }
  return r;
}

GridSpec grid_over_box(const Window& box, double spacing) {
  if (!(spacing > 0.0)) throw ParameterError("grid_over_box: spacing must be positive");
  GridSpec spec;
  spec.origin = box.lo;
  spec.spacing = spacing;
  for (Eigen::Index d = 0; d < box.lo.size(); ++d) {
    const double cells = (box.hi[d] - box.lo[d]) / spacing;
    const long rounded = std::lround(cells);
    if (std::abs(cells - static_cast<double>(rounded)) > 1e-9 * std::max(1.0, cells))
      throw ParameterError("grid_over_box: box side is not a whole number of spacings");
    spec.dims.push_back(static_cast<int>(rounded) + 1);
  }
  spec.validate();
  return spec;
}

ProbeResult viscosity_probe(const HeightField& field, const Window& subdomain, const SolverConfig& config, double spacing) {
  const int n = field.dim();
  if (subdomain.lo.size() != n || subdomain.hi.size() != n) throw ParameterError("viscosity_probe: box dimension mismatch");
  if (std::abs(config.p - n) > 0.0) throw PreconditionError("viscosity_probe: requires p = n");

  ProbeResult r;
  r.grid = grid_over_box(subdomain, spacing);
  const std::size_t count = r.grid.node_count();
  std::vector<double> h(count);
  std::vector<std::uint8_t> boundary(count);
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const Vec x = r.grid.position(i);
    if (!field.domain().in_box(x)) throw PreconditionError("viscosity_probe: subdomain leaves the field's domain");
    boundary[i] = r.grid.on_box_boundary(i) ? 1 : 0;
    if (field.domain().masked(x) || !field.evaluable(x)) {
      h[i] = -std::numeric_limits<double>::infinity();
      boundary[i] = 1;
      ++r.excised_nodes;
      continue;
    }
    h[i] = std::log(field.value(x));
    lowest = std::min(lowest, h[i]);
  }
  const GridFunction height(r.grid, h, boundary);

  std::vector<double> data = h;
  for (double& value : data)
    if (!std::isfinite(value)) value = lowest;
  const SolveResult solved = solve_p_harmonic(height.with_values(std::move(data)), config);
  r.solver_converged = solved.converged;
  r.iterations = solved.iterations;

  r.tolerance = 10.0 * spacing * spacing;
  r.min_margin = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (boundary[i] || !std::isfinite(h[i])) continue;
    const double margin = solved.solution.value(i) - h[i];
    if (margin < r.min_margin) {
      r.min_margin = margin;
      worst = i;
    }
  }
  r.worst_point = r.grid.position(worst);
  r.subharmonic = r.min_margin >= -r.tolerance;
  return r;
}

}  // namespace hypercurv
