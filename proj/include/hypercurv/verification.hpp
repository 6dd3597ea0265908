#pragma once

#include "hypercurv/grid_function.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hypercurv {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  // seconds; exceeding it fails the criterion
};

inline constexpr int kCriterionCount = 8;

/// Runs one acceptance criterion (1..8). Sample points come from a generator
/// seeded with (seed, id), so results are reproducible per criterion.
CriterionResult run_criterion(int id, std::uint64_t seed);

std::vector<CriterionResult> run_acceptance(std::uint64_t seed);

/// "PASS  3  two-route ricci  (0.41 s, limit 10 s)  <detail>"
std::string format_result(const CriterionResult& r);

/// Solves the 2^n-cell lattice Laplacian (2n+1 point stencil) with the
/// Dirichlet data of `boundary_data` by sparse Cholesky. Independent of the
/// p-Laplacian energy code; used as the p = 2 oracle.
GridFunction linear_laplace_oracle(const GridFunction& boundary_data);

}  // namespace hypercurv
