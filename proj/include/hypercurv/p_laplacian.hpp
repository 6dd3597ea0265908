#pragma once

#include "hypercurv/grid_function.hpp"
#include "hypercurv/height_field.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hypercurv {

enum class DescentDirection { ConjugateGradient, SteepestDescent };

struct SolverConfig {
  double p = 3.0;                     // >= 2
  double epsilon = 1e-8;              // gradient regularization
  int max_iterations = 20000;
  double tolerance = 0.0;             // relative energy decrease per iteration; 0 disables
  double gradient_tolerance = 1e-10;  // max |dE/du_i| / h^n over free nodes
  double armijo = 1e-4;               // sufficient-decrease parameter
  double backtrack = 0.5;             // step shrink factor
  int max_backtracks = 60;
  DescentDirection direction = DescentDirection::ConjugateGradient;

  void validate() const;  // throws ParameterError
};

/// h^n * sum over cells of (|Du|_cell^2 + eps^2)^{p/2}, where |Du|_cell^2
/// averages the squared forward differences over the 2^{n-1} cell edges
/// along each axis. Cells touching a masked -inf node are skipped; -inf on
/// an unmasked node is a DataError.
double p_dirichlet_energy(const GridFunction& u, double p, double epsilon);

/// dE/du at every node (boundary nodes included).
std::vector<double> p_dirichlet_gradient(const GridFunction& u, double p, double epsilon);

struct EnergyTraceEntry {
  int iteration = 0;
  double energy = 0.0;
  double step = 0.0;
};

struct SolveResult {
  GridFunction solution;
  std::vector<EnergyTraceEntry> trace;  // iteration 0 is the initial guess
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // max |dE/du| / h^n over free nodes at exit
  std::string stop_reason;
};

/// Minimizes the regularized p-Dirichlet energy over non-boundary nodes with
/// the boundary nodes held fixed. Finite interior values of `boundary_data`
/// are the initial guess (others start at the boundary mean). Every accepted
/// step satisfies the Armijo condition, so the trace never increases.
SolveResult solve_p_harmonic(const GridFunction& boundary_data, const SolverConfig& config);

/// iteration,energy,step with 17 significant digits.
void write_energy_trace(const SolveResult& result, const std::filesystem::path& path);

struct ComparisonReport {
  double min_difference = 0.0;  // min over non-boundary nodes of v - u
  double tolerance = 0.0;
  std::vector<std::size_t> violating;  // nodes with v - u < -tolerance
  bool holds() const { return violating.empty(); }
};

/// Requires equal grids and v >= u - tolerance on boundary nodes
/// (PreconditionError otherwise).
ComparisonReport comparison_check(const GridFunction& u, const GridFunction& v, double tolerance = 1e-8);

struct ProbeResult {
  bool subharmonic = false;
  double min_margin = 0.0;  // min over finite interior nodes of v - h
  double tolerance = 0.0;   // 10 * spacing^2
  int excised_nodes = 0;
  Vec worst_point;
  bool solver_converged = false;
  int iterations = 0;
  GridSpec grid;
};

/// Samples h = log f on `subdomain` at `spacing`, solves the p-harmonic
/// Dirichlet problem with boundary values h and checks v >= h - 10 spacing^2
/// in the interior. Masked nodes are excised (Dirichlet, with the smallest
/// finite h as value). Requires config.p == n and the box inside the field's
/// box/support.
ProbeResult viscosity_probe(const HeightField& field, const Window& subdomain, const SolverConfig& config, double spacing = 1.0 / 16.0);

/// Uniform grid over a box; every side must be a whole number of spacings.
GridSpec grid_over_box(const Window& box, double spacing);

}  // namespace hypercurv
