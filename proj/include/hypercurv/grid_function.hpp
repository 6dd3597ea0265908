#pragma once

#include "hypercurv/numerics.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hypercurv {

/// Uniform lattice geometry: node counts per axis, one spacing, origin.
/// Linear node index runs with axis 0 fastest.
struct GridSpec {
  std::vector<int> dims;
  double spacing = 0.0;
  Vec origin;

  int dim() const { return static_cast<int>(dims.size()); }
  std::size_t node_count() const;
  std::size_t cell_count() const;
  Vec upper() const;  // coordinates of the last node

  std::size_t index(std::span<const int> multi) const;
  std::vector<int> multi_index(std::size_t linear) const;
  Vec position(std::size_t linear) const;
  bool on_box_boundary(std::size_t linear) const;

  /// Throws ParameterError unless every axis has >= 3 nodes, spacing > 0,
  /// and origin has the right size.
  void validate() const;

  /// Box [lo, hi] sampled with `nodes` per axis; the box must have equal
  /// side lengths up to rounding so that a single spacing fits.
  static GridSpec from_box(const Vec& lo, const Vec& hi, int nodes);

  /// Parses "lo:hi:nodes,lo:hi:nodes,..." (one triple per axis).
  static GridSpec parse(const std::string& text);
};

nlohmann::json to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);

/// Node values on a GridSpec plus a per-node boundary (Dirichlet / excised)
/// flag. -inf is only allowed where the flag is set.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridSpec spec, std::vector<double> values, std::vector<std::uint8_t> boundary);

  /// Boundary flag set exactly on the topological boundary of the box.
  static GridFunction with_box_boundary(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim(); }
  double spacing() const { return spec_.spacing; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  std::span<const std::uint8_t> boundary() const { return boundary_; }
  double value(std::size_t i) const { return values_[i]; }
  bool is_boundary(std::size_t i) const { return boundary_[i] != 0; }

  GridFunction with_values(std::vector<double> values) const;

 private:
  void validate() const;

  GridSpec spec_;
  std::vector<double> values_;
  std::vector<std::uint8_t> boundary_;
};

/// Writes `<stem>.json` (header: dims, spacing, origin, values file name)
/// and `<stem>.csv` (x1..xn, value, boundary; 17 significant digits).
void write_grid(const GridFunction& grid, const std::filesystem::path& stem);

/// Loads a grid from its JSON header; the CSV is resolved relative to it.
GridFunction read_grid(const std::filesystem::path& header_path);

}  // namespace hypercurv
