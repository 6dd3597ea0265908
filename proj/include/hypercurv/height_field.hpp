#pragma once

#include "hypercurv/grid_function.hpp"
#include "hypercurv/numerics.hpp"

#include "json.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace hypercurv {

/// Second-order jet of a height function x_{n+1} = f(x_1, ..., x_n).
struct Jet2 {
  Vec x;
  double f = 0.0;
  Vec grad;
  Mat hess;

  int dim() const { return static_cast<int>(x.size()); }
};

struct Ball {
  Vec center;
  double radius = 0.0;
};

/// Axis-aligned (possibly infinite) box, optional open support ball, and
/// excised balls where f is not evaluated.
struct Domain {
  Vec lo;
  Vec hi;
  std::optional<Ball> support;
  std::vector<Ball> excised;

  bool unbounded() const;
  bool in_box(const Vec& x) const;
  bool masked(const Vec& x) const;  // inside an excised ball
  bool contains(const Vec& x) const { return in_box(x) && !masked(x); }
};

enum class CapSide { Lower, Upper };

struct Horosphere {
  double height;
};
struct GeodesicSphereCap {
  double center_height;
  double radius;
  CapSide side;
};
struct EquidistantCone {
  double slope;
  double mask_radius;
};
struct TiltedPlane {
  double slope;
};
struct SampledGrid {
  std::shared_ptr<const GridFunction> grid;
  int order;  // polynomial degree per axis
};

using SurfaceKind = std::variant<Horosphere, GeodesicSphereCap, EquidistantCone, TiltedPlane, SampledGrid>;

enum class CatalogKind { Horosphere, GeodesicSphereCap, EquidistantCone, TiltedPlane };

struct CatalogParams {
  double height = 1.0;         // horosphere level c
  double center_height = 2.0;  // sphere cap a
  double radius = 1.0;         // sphere cap b
  CapSide side = CapSide::Lower;
  double slope = 1.0;          // cone or plane
  double mask_radius = 1e-3;   // cone
};

class HeightField {
 public:
  static HeightField horosphere(double height, int n);
  static HeightField sphere_cap(double center_height, double radius, CapSide side, int n);
  static HeightField equidistant_cone(double slope, int n, double mask_radius = 1e-3);
  static HeightField tilted_plane(double slope, int n);
  static HeightField sampled(GridFunction grid, int order = 4);

  int dim() const { return dim_; }
  const SurfaceKind& kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  bool is_catalog() const { return !std::holds_alternative<SampledGrid>(kind_); }
  std::string kind_name() const;

  /// True when x is in the unmasked domain and f can be evaluated there.
  bool evaluable(const Vec& x) const;

  /// f(x); throws DomainError outside the unmasked domain.
  double value(const Vec& x) const;

  /// Exact derivatives for catalog kinds, interpolated for sampled grids.
  Jet2 jet(const Vec& x) const;

 private:
  HeightField(SurfaceKind kind, int dim, Domain domain);
  void require_domain(const Vec& x) const;
  Jet2 sampled_jet(const SampledGrid& s, const Vec& x, bool want_derivatives) const;

  SurfaceKind kind_;
  int dim_;
  Domain domain_;
};

HeightField make_catalog_surface(CatalogKind kind, const CatalogParams& params, int n);

inline Jet2 eval_jet(const HeightField& field, const Vec& x) { return field.jet(x); }

/// Builds a field from a descriptor such as
/// {"kind": "equidistant_cone", "n": 3, "slope": 1.0, "mask_radius": 1e-3}.
/// Sampled grids use {"kind": "sampled_grid", "header": "<file>.json", "order": 4};
/// relative paths resolve against `base_dir`.
HeightField surface_from_json(const nlohmann::json& descriptor, const std::filesystem::path& base_dir = {});
nlohmann::json surface_to_json(const HeightField& field);

/// Max componentwise deviation of the jet from central differences of f.
struct JetResidual {
  double grad = 0.0;
  double hess = 0.0;
  double max() const { return grad > hess ? grad : hess; }
};
JetResidual fd_validate_jet(const HeightField& field, const Vec& x, double step);

/// 1e-4 * max(1, |x|).
double default_fd_step(const Vec& x);

/// Samples `field` on every node of `spec` (masked nodes become -inf and are
/// flagged boundary) and wraps the result as a SampledGrid field.
GridFunction sample_to_grid(const HeightField& field, const GridSpec& spec);

/// Random interior points from the field's canonical sample region:
/// annulus 0.5 <= |x| <= 2 (cone), |x| <= 0.8 b (cap), x1 in [0.5, 2] (plane),
/// [-1, 1]^n (horosphere), interior of the grid away from the stencil (sampled).
std::vector<Vec> sample_points(const HeightField& field, int count, std::mt19937_64& rng);

/// Finite window used for grid-based analysis of the field.
struct Window {
  Vec lo;
  Vec hi;
};
Window analysis_window(const HeightField& field);

}  // namespace hypercurv
