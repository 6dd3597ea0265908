#include "hypercurv/height_field.hpp"

#include "hypercurv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hypercurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_point(const Vec& x) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ')';
  return os.str();
}

void require_dim(int n) {
  if (n < 2) throw ParameterError("height field: dimension n must be >= 2");
}

Domain whole_space(int n) {
  Domain d;
  d.lo = Vec::Constant(n, -kInf);
  d.hi = Vec::Constant(n, kInf);
  return d;
}

// Lagrange basis on integer nodes start..start+m evaluated at t, with first
// and second derivatives in t.
struct Basis1d {
  std::vector<double> w0, w1, w2;
};

Basis1d lagrange_basis(int start, int m, double t) {
  Basis1d b;
  b.w0.assign(m + 1, 0.0);
  b.w1.assign(m + 1, 0.0);
  b.w2.assign(m + 1, 0.0);
  std::vector<double> a(m + 1);
  for (int k = 0; k <= m; ++k) {
    double denom = 1.0;
    for (int j = 0; j <= m; ++j) {
      a[j] = t - (start + j);
      if (j != k) denom *= static_cast<double>(k - j);
    }
    double p0 = 1.0, p1 = 0.0, p2 = 0.0;
    for (int j = 0; j <= m; ++j) {
      if (j == k) continue;
      p0 *= a[j];
      double prod1 = 1.0;
      for (int i = 0; i <= m; ++i)
        if (i != k && i != j) prod1 *= a[i];
      p1 += prod1;
      for (int l = 0; l <= m; ++l) {
        if (l == k || l == j) continue;
        double prod2 = 1.0;
        for (int i = 0; i <= m; ++i)
          if (i != k && i != j && i != l) prod2 *= a[i];
        p2 += prod2;
      }
    }
    b.w0[k] = p0 / denom;
    b.w1[k] = p1 / denom;
    b.w2[k] = p2 / denom;
  }
  return b;
}

}  // namespace

bool Domain::unbounded() const {
  if (support) return false;
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) return true;
  return false;
}

bool Domain::in_box(const Vec& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
  if (support && !((x - support->center).norm() < support->radius)) return false;
  return true;
}

bool Domain::masked(const Vec& x) const {
  return std::any_of(excised.begin(), excised.end(),
                     [&](const Ball& b) { return (x - b.center).norm() <= b.radius; });
}

HeightField::HeightField(SurfaceKind kind, int dim, Domain domain)
    : kind_(std::move(kind)), dim_(dim), domain_(std::move(domain)) {}

HeightField HeightField::horosphere(double height, int n) {
  require_dim(n);
  if (!(height > 0.0) || !std::isfinite(height)) throw ParameterError("horosphere: height c must be positive");
  return HeightField(Horosphere{height}, n, whole_space(n));
}

HeightField HeightField::sphere_cap(double center_height, double radius, CapSide side, int n) {
  require_dim(n);
  if (!(radius > 0.0) || !(center_height > radius) || !std::isfinite(center_height))
    throw ParameterError("geodesic sphere cap: requires center_height > radius > 0");
  Domain d;
  d.lo = Vec::Constant(n, -radius);
  d.hi = Vec::Constant(n, radius);
  d.support = Ball{Vec::Zero(n), radius};
  return HeightField(GeodesicSphereCap{center_height, radius, side}, n, std::move(d));
}

HeightField HeightField::equidistant_cone(double slope, int n, double mask_radius) {
  require_dim(n);
  if (!(slope > 0.0) || !std::isfinite(slope)) throw ParameterError("equidistant cone: slope must be positive");
  if (!(mask_radius > 0.0)) throw ParameterError("equidistant cone: mask radius must be positive");
  Domain d = whole_space(n);
  d.excised.push_back(Ball{Vec::Zero(n), mask_radius});
  return HeightField(EquidistantCone{slope, mask_radius}, n, std::move(d));
}

HeightField HeightField::tilted_plane(double slope, int n) {
  require_dim(n);
  if (!(slope > 0.0) || !std::isfinite(slope)) throw ParameterError("tilted plane: slope must be positive");
  Domain d = whole_space(n);
  d.lo[0] = 0.0;
  return HeightField(TiltedPlane{slope}, n, std::move(d));
}

HeightField HeightField::sampled(GridFunction grid, int order) {
  if (order < 2) throw ParameterError("sampled grid: interpolation order must be >= 2");
  const GridSpec& spec = grid.spec();
  require_dim(spec.dim());
  for (int d : spec.dims)
    if (d < order + 1) throw ParameterError("sampled grid: too few nodes for the interpolation order");
  Domain d;
  d.lo = spec.origin;
  d.hi = spec.upper();
  const int n = spec.dim();
  return HeightField(SampledGrid{std::make_shared<const GridFunction>(std::move(grid)), order}, n, std::move(d));
}

HeightField make_catalog_surface(CatalogKind kind, const CatalogParams& p, int n) {
  switch (kind) {
    case CatalogKind::Horosphere:
      return HeightField::horosphere(p.height, n);
    case CatalogKind::GeodesicSphereCap:
      return HeightField::sphere_cap(p.center_height, p.radius, p.side, n);
    case CatalogKind::EquidistantCone:
      return HeightField::equidistant_cone(p.slope, n, p.mask_radius);
    case CatalogKind::TiltedPlane:
      return HeightField::tilted_plane(p.slope, n);
  }
  throw ParameterError("unknown catalog kind");
}

std::string HeightField::kind_name() const {
  struct Namer {
    std::string operator()(const Horosphere&) const { return "horosphere"; }
    std::string operator()(const GeodesicSphereCap&) const { return "geodesic_sphere_cap"; }
    std::string operator()(const EquidistantCone&) const { return "equidistant_cone"; }
    std::string operator()(const TiltedPlane&) const { return "tilted_plane"; }
    std::string operator()(const SampledGrid&) const { return "sampled_grid"; }
  };
  return std::visit(Namer{}, kind_);
}

void HeightField::require_domain(const Vec& x) const {
  if (x.size() != dim_) throw DomainError("point dimension does not match field dimension");
  if (!domain_.contains(x)) throw DomainError("point " + format_point(x) + " is outside the unmasked domain");
}

bool HeightField::evaluable(const Vec& x) const {
  if (x.size() != dim_ || !domain_.contains(x)) return false;
  if (const auto* s = std::get_if<SampledGrid>(&kind_)) {
    try {
      sampled_jet(*s, x, false);
    } catch (const DomainError&) {
      return false;
    }
  }
  return true;
}

double HeightField::value(const Vec& x) const {
  require_domain(x);
  struct Eval {
    const HeightField& self;
    const Vec& x;
    double operator()(const Horosphere& h) const { return h.height; }
    double operator()(const GeodesicSphereCap& c) const {
      const double w = std::sqrt(c.radius * c.radius - x.squaredNorm());
      return c.side == CapSide::Lower ? c.center_height - w : c.center_height + w;
    }
    double operator()(const EquidistantCone& c) const { return c.slope * x.norm(); }
    double operator()(const TiltedPlane& p) const {
      if (!(x[0] > 0.0)) throw DomainError("tilted plane: requires x1 > 0");
      return p.slope * x[0];
    }
    double operator()(const SampledGrid& s) const { return self.sampled_jet(s, x, false).f; }
  };
  return std::visit(Eval{*this, x}, kind_);
}

Jet2 HeightField::jet(const Vec& x) const {
  require_domain(x);
  const int n = dim_;
  Jet2 j;
  j.x = x;
  j.grad = Vec::Zero(n);
  j.hess = Mat::Zero(n, n);
  const Mat eye = Mat::Identity(n, n);
  if (const auto* h = std::get_if<Horosphere>(&kind_)) {
    j.f = h->height;
  } else if (const auto* c = std::get_if<GeodesicSphereCap>(&kind_)) {
    const double w = std::sqrt(c->radius * c->radius - x.squaredNorm());
    const double sign = c->side == CapSide::Lower ? 1.0 : -1.0;
    j.f = c->center_height - sign * w;
    j.grad = sign * x / w;
    j.hess = sign * (eye / w + x * x.transpose() / (w * w * w));
  } else if (const auto* c = std::get_if<EquidistantCone>(&kind_)) {
    const double r = x.norm();
    j.f = c->slope * r;
    j.grad = c->slope * x / r;
    j.hess = c->slope * (eye / r - x * x.transpose() / (r * r * r));
  } else if (const auto* p = std::get_if<TiltedPlane>(&kind_)) {
    if (!(x[0] > 0.0)) throw DomainError("tilted plane: requires x1 > 0");
    j.f = p->slope * x[0];
    j.grad[0] = p->slope;
  } else {
    return sampled_jet(std::get<SampledGrid>(kind_), x, true);
  }
  return j;
}

Jet2 HeightField::sampled_jet(const SampledGrid& s, const Vec& x, bool want_derivatives) const {
  const GridFunction& grid = *s.grid;
  const GridSpec& spec = grid.spec();
  const int n = spec.dim();
  const int m = s.order;
  const double h = spec.spacing;

  std::vector<int> start(n);
  std::vector<Basis1d> basis(n);
  for (int d = 0; d < n; ++d) {
    const double t = (x[d] - spec.origin[d]) / h;
    int first = (m % 2 == 0) ? static_cast<int>(std::lround(t)) - m / 2 : static_cast<int>(std::floor(t)) - (m - 1) / 2;
    first = std::clamp(first, 0, spec.dims[d] - 1 - m);
    start[d] = first;
    basis[d] = lagrange_basis(first, m, t);
  }

  Jet2 j;
  j.x = x;
  j.f = 0.0;
  j.grad = Vec::Zero(n);
  j.hess = Mat::Zero(n, n);
  std::vector<int> offset(n, 0);
  std::vector<int> node(n);
  const std::size_t stencil = static_cast<std::size_t>(std::pow(m + 1, n));
  for (std::size_t k = 0; k < stencil; ++k) {
    for (int d = 0; d < n; ++d) node[d] = start[d] + offset[d];
    const double u = grid.value(spec.index(node));
    if (!std::isfinite(u)) throw DomainError("sampled grid: interpolation stencil touches a masked node near " + format_point(x));

    double w = u;
    for (int d = 0; d < n; ++d) w *= basis[d].w0[offset[d]];
    j.f += w;
    if (want_derivatives) {
      for (int a = 0; a < n; ++a) {
        double ga = u * basis[a].w1[offset[a]];
        double haa = u * basis[a].w2[offset[a]];
        for (int d = 0; d < n; ++d)
          if (d != a) {
            ga *= basis[d].w0[offset[d]];
            haa *= basis[d].w0[offset[d]];
          }
        j.grad[a] += ga / h;
        j.hess(a, a) += haa / (h * h);
        for (int b = a + 1; b < n; ++b) {
          double hab = u * basis[a].w1[offset[a]] * basis[b].w1[offset[b]];
          for (int d = 0; d < n; ++d)
            if (d != a && d != b) hab *= basis[d].w0[offset[d]];
          j.hess(a, b) += hab / (h * h);
        }
      }
    }
    for (int d = 0; d < n; ++d) {
      if (++offset[d] <= m) break;
      offset[d] = 0;
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) j.hess(b, a) = j.hess(a, b);
  if (!(j.f > 0.0)) throw DomainError("sampled grid: interpolated f is not positive at " + format_point(x));
  return j;
}

HeightField surface_from_json(const nlohmann::json& desc, const std::filesystem::path& base_dir) {
  try {
    const std::string kind = desc.at("kind").get<std::string>();
    if (kind == "sampled_grid") {
      std::filesystem::path header = desc.at("header").get<std::string>();
      if (header.is_relative()) header = base_dir / header;
      return HeightField::sampled(read_grid(header), desc.value("order", 4));
    }
    const int n = desc.at("n").get<int>();
    CatalogParams p;
    if (kind == "horosphere") {
      p.height = desc.contains("c") ? desc.at("c").get<double>() : desc.value("height", 1.0);
      return make_catalog_surface(CatalogKind::Horosphere, p, n);
    }
    if (kind == "geodesic_sphere_cap") {
      p.center_height = desc.value("center_height", 2.0);
      p.radius = desc.value("radius", 1.0);
      const std::string cap = desc.value("cap", std::string("lower"));
      if (cap != "lower" && cap != "upper") throw ParameterError("geodesic_sphere_cap: cap must be lower or upper");
      p.side = cap == "lower" ? CapSide::Lower : CapSide::Upper;
      return make_catalog_surface(CatalogKind::GeodesicSphereCap, p, n);
    }
    if (kind == "equidistant_cone") {
      p.slope = desc.value("slope", 1.0);
      p.mask_radius = desc.value("mask_radius", 1e-3);
      return make_catalog_surface(CatalogKind::EquidistantCone, p, n);
    }
    if (kind == "tilted_plane") {
      p.slope = desc.value("slope", 1.0);
      return make_catalog_surface(CatalogKind::TiltedPlane, p, n);
    }
    throw ParameterError("unknown surface kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("surface descriptor: ") + e.what());
  }
}

nlohmann::json surface_to_json(const HeightField& field) {
  nlohmann::json j{{"kind", field.kind_name()}, {"n", field.dim()}};
  if (const auto* h = std::get_if<Horosphere>(&field.kind())) {
    j["c"] = h->height;
  } else if (const auto* c = std::get_if<GeodesicSphereCap>(&field.kind())) {
    j["center_height"] = c->center_height;
    j["radius"] = c->radius;
    j["cap"] = c->side == CapSide::Lower ? "lower" : "upper";
  } else if (const auto* c = std::get_if<EquidistantCone>(&field.kind())) {
    j["slope"] = c->slope;
    j["mask_radius"] = c->mask_radius;
  } else if (const auto* p = std::get_if<TiltedPlane>(&field.kind())) {
    j["slope"] = p->slope;
  } else if (const auto* s = std::get_if<SampledGrid>(&field.kind())) {
    j["order"] = s->order;
    j["grid"] = to_json(s->grid->spec());
  }
  return j;
}

double default_fd_step(const Vec& x) { return 1e-4 * std::max(1.0, x.norm()); }

JetResidual fd_validate_jet(const HeightField& field, const Vec& x, double step) {
  if (!(step > 0.0)) throw ParameterError("fd_validate_jet: step must be positive");
  const int n = field.dim();
  auto f_at = [&](const Vec& y) {
    if (!field.evaluable(y)) throw DomainError("fd_validate_jet: finite-difference stencil leaves the domain");
    return field.value(y);
  };
  const Jet2 jet = field.jet(x);
  const double f0 = f_at(x);
  JetResidual r;
  for (int i = 0; i < n; ++i) {
    Vec ei = Vec::Zero(n);
    ei[i] = step;
    const double fp = f_at(x + ei);
    const double fm = f_at(x - ei);
    r.grad = std::max(r.grad, std::abs(jet.grad[i] - (fp - fm) / (2.0 * step)));
    r.hess = std::max(r.hess, std::abs(jet.hess(i, i) - (fp - 2.0 * f0 + fm) / (step * step)));
    for (int k = i + 1; k < n; ++k) {
      Vec ek = Vec::Zero(n);
      ek[k] = step;
      const double mixed = (f_at(x + ei + ek) - f_at(x + ei - ek) - f_at(x - ei + ek) + f_at(x - ei - ek)) / (4.0 * step * step);
      r.hess = std::max(r.hess, std::abs(jet.hess(i, k) - mixed));
    }
  }
  return r;
}

GridFunction sample_to_grid(const HeightField& field, const GridSpec& spec) {
  spec.validate();
  if (spec.dim() != field.dim()) throw ParameterError("sample_to_grid: dimension mismatch");
  const std::size_t count = spec.node_count();
  std::vector<double> values(count);
  std::vector<std::uint8_t> boundary(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec x = spec.position(i);
    const bool ok = field.domain().contains(x);
    values[i] = ok ? field.value(x) : -kInf;
    boundary[i] = (!ok || spec.on_box_boundary(i)) ? 1 : 0;
  }
  return GridFunction(spec, std::move(values), std::move(boundary));
}

std::vector<Vec> sample_points(const HeightField& field, int count, std::mt19937_64& rng) {
  const int n = field.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto direction = [&]() {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return Vec(v / v.norm());
  };
  std::vector<Vec> points;
  points.reserve(count);
  while (static_cast<int>(points.size()) < count) {
    Vec x(n);
    if (std::holds_alternative<EquidistantCone>(field.kind())) {
      x = (0.5 + 1.5 * unit(rng)) * direction();
    } else if (const auto* c = std::get_if<GeodesicSphereCap>(&field.kind())) {
      x = 0.8 * c->radius * std::pow(unit(rng), 1.0 / n) * direction();
    } else if (std::holds_alternative<TiltedPlane>(field.kind())) {
      for (int i = 0; i < n; ++i) x[i] = -1.0 + 2.0 * unit(rng);
      x[0] = 0.5 + 1.5 * unit(rng);
    } else if (const auto* s = std::get_if<SampledGrid>(&field.kind())) {
      const GridSpec& spec = s->grid->spec();
      for (int i = 0; i < n; ++i) {
        const double margin = (s->order / 2 + 1) * spec.spacing;
        const double lo = spec.origin[i] + margin;
        const double hi = spec.origin[i] + spec.spacing * (spec.dims[i] - 1) - margin;
        x[i] = lo + (hi - lo) * unit(rng);
      }
    } else {
      for (int i = 0; i < n; ++i) x[i] = -1.0 + 2.0 * unit(rng);
    }
    if (field.evaluable(x)) points.push_back(std::move(x));
  }
  return points;
}

Window analysis_window(const HeightField& field) {
  const int n = field.dim();
  Window w{Vec::Constant(n, -1.0), Vec::Constant(n, 1.0)};
  if (const auto* c = std::get_if<GeodesicSphereCap>(&field.kind())) {
    w.lo = Vec::Constant(n, -c->radius);
    w.hi = Vec::Constant(n, c->radius);
  } else if (std::holds_alternative<TiltedPlane>(field.kind())) {
    w.lo[0] = 0.0;
    w.hi[0] = 2.0;
  } else if (const auto* s = std::get_if<SampledGrid>(&field.kind())) {
    w.lo = s->grid->spec().origin;
    w.hi = s->grid->spec().upper();
  }
  return w;
}

}  // namespace hypercurv
