#pragma once

#include "hypercurv/grid_function.hpp"
#include "hypercurv/height_field.hpp"

#include <optional>
#include <vector>

namespace hypercurv {

/// Face-connected set of grid nodes where h = log f < -M (masked nodes count
/// as h = -inf). Diameter is the largest Euclidean distance between nodes.
struct Component {
  std::vector<std::size_t> nodes;
  double diameter = 0.0;
  bool contains_masked = false;
};

/// Components of {h < -M} on `grid`; nodes outside the field's box/support
/// are never included. Empty sublevel sets give an empty list.
std::vector<Component> sublevel_components(const HeightField& field, const GridSpec& grid, double level);

struct RecessionReport {
  GridSpec grid;
  std::vector<double> levels;
  std::vector<int> counts;             // per level
  std::vector<double> max_diameters;   // per level (0 when no component)
  int decaying_components = 0;
  bool includes_projection_point = false;  // p0 at infinity, for unbounded domains
  int boundary_points = 0;
  bool fat_recession_set = false;  // a component survives every level without shrinking
};

/// Default analysis grid: the field's analysis window with 65 nodes per axis
/// (17 for n >= 4).
GridSpec default_analysis_grid(const HeightField& field);

/// Counts asymptotic boundary points: a component of the lowest level whose
/// descendants at the highest level have at most half its diameter is one
/// point; unbounded domains add p0. Levels must be strictly increasing.
RecessionReport recession_report(const HeightField& field, const std::vector<double>& levels,
                                 const std::optional<GridSpec>& grid = std::nullopt);

nlohmann::json to_json(const RecessionReport& report);

}  // namespace hypercurv
