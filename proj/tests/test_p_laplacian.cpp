#include "doctest.h"

#include "hypercurv/errors.hpp"
#include "hypercurv/p_laplacian.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

using namespace hypercurv;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Window box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  Window w{Vec(static_cast<Eigen::Index>(lo.size())), Vec(static_cast<Eigen::Index>(hi.size()))};
  Eigen::Index i = 0;
  for (double v : lo) w.lo[i++] = v;
  i = 0;
  for (double v : hi) w.hi[i++] = v;
  return w;
}

template <class F>
GridFunction boundary_data(const GridSpec& spec, F&& f, double interior = 0.0) {
  std::vector<double> v(spec.node_count(), interior);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (spec.on_box_boundary(i)) v[i] = f(spec.position(i));
  return GridFunction::with_box_boundary(spec, std::move(v));
}

template <class F>
double max_error(const GridFunction& u, F&& f) {
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u.value(i) - f(u.spec().position(i))));
  return e;
}

bool monotone(const SolveResult& r) {
  for (std::size_t k = 1; k < r.trace.size(); ++k)
    if (r.trace[k].energy > r.trace[k - 1].energy) return false;
  return true;
}

// Discrete Laplace equation (2n+1 point stencil) solved directly.
std::vector<double> laplace_direct(const GridFunction& g) {
  const GridSpec& s = g.spec();
  std::vector<int> id(g.size(), -1);
  int m = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!g.is_boundary(i)) id[i] = m++;
  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (id[i] < 0) continue;
    t.emplace_back(id[i], id[i], 2.0 * s.dim());
    auto mi = s.multi_index(i);
    for (int a = 0; a < s.dim(); ++a)
      for (int d : {-1, 1}) {
        auto nb = mi;
        nb[a] += d;
        const std::size_t j = s.index(nb);
        if (id[j] >= 0)
          t.emplace_back(id[i], id[j], -1.0);
        else
          b[id[i]] += g.value(j);
      }
  }
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  const Eigen::VectorXd x = lu.solve(b);
  std::vector<double> out(g.values().begin(), g.values().end());
  for (std::size_t i = 0; i < g.size(); ++i)
    if (id[i] >= 0) out[i] = x[id[i]];
  return out;
}

// Gauss-Legendre (2 points per axis) integral of |x|^-3 over the cells whose
// corners all carry finite values.
double covered_cell_integral(const GridFunction& g) {
  const GridSpec& s = g.spec();
  const double h = s.spacing;
  const double q = 0.5 / std::sqrt(3.0);
  double total = 0.0;
  for (int k = 0; k + 1 < s.dims[2]; ++k)
    for (int j = 0; j + 1 < s.dims[1]; ++j)
      for (int i = 0; i + 1 < s.dims[0]; ++i) {
        bool inside = true;
        for (int c = 0; c < 8 && inside; ++c) {
          const int m[3] = {i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)};
          inside = std::isfinite(g.value(s.index(m)));
        }
        if (!inside) continue;
        const int m0[3] = {i, j, k};
        const Vec lo = s.position(s.index(m0));
        for (int c = 0; c < 8; ++c) {
          Vec x = lo;
          for (int a = 0; a < 3; ++a) x[a] += h * (0.5 + (((c >> a) & 1) ? q : -q));
          total += std::pow(x.norm(), -3.0) * h * h * h / 8.0;
        }
      }
  return total;
}

GridFunction annulus_log_radius(double spacing) {
  const int nodes = static_cast<int>(std::lround(4.0 / spacing)) + 1;
  const GridSpec s = GridSpec::from_box(Vec::Constant(3, -2.0), Vec::Constant(3, 2.0), nodes);
  std::vector<double> v(s.node_count());
  std::vector<std::uint8_t> b(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = s.position(i).norm();
    const bool outside = r < 0.5 || r > 2.0;
    v[i] = outside ? kNegInf : std::log(r);
    b[i] = outside || s.on_box_boundary(i);
  }
  return GridFunction(s, v, b);
}

}  // namespace

TEST_CASE("energy of constant and affine data") {
  const GridSpec s = GridSpec::parse("0:1:9,0:1:9,0:1:9");
  const GridFunction c = boundary_data(s, [](const Vec&) { return 3.0; }, 3.0);
  CHECK(p_dirichlet_energy(c, 3.0, 0.0) == 0.0);
  std::vector<double> v(s.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.position(i)[0];
  const GridFunction x1 = GridFunction::with_box_boundary(s, v);
  CHECK(p_dirichlet_energy(x1, 3.0, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(p_dirichlet_energy(x1, 2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(p_dirichlet_energy(x1, 0.5, 0.0), ParameterError);
}

TEST_CASE("energy of log|x| on the annulus") {
  // The exact integral over the annulus is 4 pi log 4. Cells straddling the
  // two spheres are dropped, which costs O(spacing); against the integral
  // over the cells actually covered the discretization error is far below 2%.
  const GridFunction g16 = annulus_log_radius(1.0 / 16.0);
  const GridFunction g32 = annulus_log_radius(1.0 / 32.0);
  const double e16 = p_dirichlet_energy(g16, 3.0, 0.0);
  const double e32 = p_dirichlet_energy(g32, 3.0, 0.0);
  const double covered32 = covered_cell_integral(g32);
  CHECK(std::abs(e32 / covered32 - 1.0) <= 0.02);
  const double exact = 4.0 * std::numbers::pi * std::log(4.0);
  const double d16 = exact - e16, d32 = exact - e32;
  CHECK(d32 > 0.0);
  CHECK(d32 / exact <= 0.05);
  CHECK(d16 / d32 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("energy gradient matches finite differences") {
  const GridSpec s = GridSpec::parse("0:0.5:6,0:0.5:6,0:0.5:6");
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(s.node_count());
  for (double& x : v) x = g(rng);
  const GridFunction u = GridFunction::with_box_boundary(s, v);
  for (double p : {2.0, 3.0, 4.5}) {
    const std::vector<double> grad = p_dirichlet_gradient(u, p, 1e-3);
    for (std::size_t i : {std::size_t{0}, std::size_t{43}, std::size_t{86}, std::size_t{129}}) {
      const double h = 1e-6;
      auto w = v;
      w[i] += h;
      const double ep = p_dirichlet_energy(u.with_values(w), p, 1e-3);
      w[i] -= 2 * h;
      const double em = p_dirichlet_energy(u.with_values(w), p, 1e-3);
      CHECK(grad[i] == doctest::Approx((ep - em) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("cells touching masked nodes are skipped") {
  const GridSpec s = GridSpec::parse("0:1:5,0:1:5");
  std::vector<double> v(s.node_count(), 0.0);
  std::vector<std::uint8_t> b(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = s.position(i)[0];
    b[i] = s.on_box_boundary(i);
  }
  v[12] = kNegInf;
  b[12] = 1;
  const GridFunction u(s, v, b);
  // 16 cells of area 1/16, |Du| = 1; four of them touch the masked centre.
  CHECK(p_dirichlet_energy(u, 2.0, 0.0) == doctest::Approx(12.0 / 16.0));
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.p = 1.5;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = SolverConfig{};
  c.epsilon = 0.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = SolverConfig{};
  c.armijo = 1.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = SolverConfig{};
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("constant and affine boundary data are reproduced") {
  const GridSpec s = GridSpec::parse("0:1:9,0:1:9,0:1:9");
  SolverConfig cfg;
  const SolveResult c = solve_p_harmonic(boundary_data(s, [](const Vec&) { return -1.25; }), cfg);
  CHECK(c.converged);
  // For p > 2 the energy is flat to third order near a constant, so the
  // gradient stop leaves a small offset.
  CHECK(max_error(c.solution, [](const Vec&) { return -1.25; }) <= 1e-6);
  auto affine = [](const Vec& x) { return 0.3 * x[0] - 1.1 * x[1] + 0.7 * x[2] + 0.2; };
  for (double p : {2.0, 3.0, 4.0}) {
    cfg.p = p;
    const SolveResult r = solve_p_harmonic(boundary_data(s, affine), cfg);
    CHECK(r.converged);
    CHECK(monotone(r));
    CHECK(max_error(r.solution, affine) <= 1e-8);
  }
}

TEST_CASE("log|x| is reproduced for p = n = 3") {
  const GridSpec s = grid_over_box(box({0.5, -0.5, -0.5}, {1.5, 0.5, 0.5}), 1.0 / 16.0);
  CHECK(s.dims == std::vector<int>{17, 17, 17});
  const SolveResult r = solve_p_harmonic(boundary_data(s, [](const Vec& x) { return std::log(x.norm()); }), SolverConfig{});
  CHECK(r.converged);
  CHECK(monotone(r));
  CHECK(max_error(r.solution, [](const Vec& x) { return std::log(x.norm()); }) <= 1e-3);
  CHECK(r.trace.back().energy == doctest::Approx(p_dirichlet_energy(r.solution, 3.0, 1e-8)).epsilon(1e-12));
}

TEST_CASE("p = 2 matches a direct linear solve") {
  const GridSpec s = GridSpec::parse("-1:1:17,-1:1:17,-1:1:17");
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GridFunction data = boundary_data(s, [&](const Vec&) { return u(rng); });
  SolverConfig cfg;
  cfg.p = 2.0;
  const SolveResult r = solve_p_harmonic(data, cfg);
  CHECK(r.converged);
  const std::vector<double> ref = laplace_direct(data);
  double dev = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) dev = std::max(dev, std::abs(ref[i] - r.solution.value(i)));
  CHECK(dev <= 1e-8);
}

TEST_CASE("different initial guesses reach the same minimizer") {
  const GridSpec s = GridSpec::parse("0.5:1.5:13,-0.5:0.5:13,-0.5:0.5:13");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto bc = [](const Vec& x) { return std::log(x.norm()) + 0.2 * x[1] * x[2]; };
  std::vector<GridFunction> solutions;
  for (int k = 0; k < 2; ++k) {
    std::vector<double> v(s.node_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.on_box_boundary(i) ? bc(s.position(i)) : u(rng);
    const SolveResult r = solve_p_harmonic(GridFunction::with_box_boundary(s, v), SolverConfig{});
    CHECK(r.converged);
    CHECK(monotone(r));
    solutions.push_back(r.solution);
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < s.node_count(); ++i) diff = std::max(diff, std::abs(solutions[0].value(i) - solutions[1].value(i)));
  CHECK(diff <= 1e-6);
}

TEST_CASE("steepest descent option and iteration cap") {
  const GridSpec s = GridSpec::parse("0:1:7,0:1:7,0:1:7");
  auto bc = [](const Vec& x) { return x[0] * x[0] - x[1]; };
  SolverConfig cfg;
  cfg.direction = DescentDirection::SteepestDescent;
  cfg.gradient_tolerance = 1e-8;
  const SolveResult sd = solve_p_harmonic(boundary_data(s, bc), cfg);
  CHECK(sd.converged);
  CHECK(monotone(sd));
  const SolveResult cg = solve_p_harmonic(boundary_data(s, bc), SolverConfig{});
  CHECK(max_error(sd.solution, [&](const Vec& x) {
          return cg.solution.value(s.index(std::vector<int>{int(std::lround(x[0] * 6)), int(std::lround(x[1] * 6)), int(std::lround(x[2] * 6))}));
        }) <= 1e-6);

  cfg = SolverConfig{};
  cfg.max_iterations = 3;
  const SolveResult capped = solve_p_harmonic(boundary_data(s, bc), cfg);
  CHECK_FALSE(capped.converged);
  CHECK(capped.stop_reason == "max iterations");
  CHECK(capped.iterations == 3);
  CHECK(capped.trace.size() == 4);
}

TEST_CASE("energy trace file") {
  const GridSpec s = GridSpec::parse("0:1:5,0:1:5");
  const SolveResult r = solve_p_harmonic(boundary_data(s, [](const Vec& x) { return x[0] * x[1]; }), SolverConfig{});
  const auto path = std::filesystem::temp_directory_path() / "hypercurv_trace.csv";
  write_energy_trace(r, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,energy,step");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == r.trace.size());
}

TEST_CASE("comparison check") {
  const GridSpec s = grid_over_box(box({0.5, -0.5, -0.5}, {1.5, 0.5, 0.5}), 1.0 / 16.0);
  auto logr = [](const Vec& x) { return std::log(x.norm()); };
  std::vector<double> v(s.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = logr(s.position(i));
  const GridFunction u = GridFunction::with_box_boundary(s, v);
  const ComparisonReport same = comparison_check(u, u);
  CHECK(same.holds());
  CHECK(same.min_difference == 0.0);

  // log|x| is 3-harmonic: the solver output sits on it up to discretization.
  const SolveResult r = solve_p_harmonic(boundary_data(s, logr), SolverConfig{});
  const ComparisonReport cone = comparison_check(u, r.solution, 1e-3);
  CHECK(cone.holds());

  // log x1 is strictly 3-superharmonic, so the 3-harmonic function with the
  // same boundary values lies below it: comparison fails.
  auto logx = [](const Vec& x) { return std::log(x[0]); };
  const GridSpec s2 = grid_over_box(box({1, -1.5, -1.5}, {2, 1.5, 1.5}), 1.0 / 16.0);
  std::vector<double> w(s2.node_count());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = logx(s2.position(i));
  const GridFunction up = GridFunction::with_box_boundary(s2, w);
  const SolveResult vp = solve_p_harmonic(boundary_data(s2, logx), SolverConfig{});
  const ComparisonReport plane = comparison_check(up, vp.solution);
  CHECK_FALSE(plane.holds());
  // Continuum slab value: min over t of log2 (t - 1) - log t, at t = 1/log 2.
  const double t = 1.0 / std::log(2.0);
  const double slab = std::log(2.0) * (t - 1.0) - std::log(t);
  CHECK(plane.min_difference == doctest::Approx(slab).epsilon(0.05));

  CHECK_THROWS_AS(comparison_check(u, up), PreconditionError);
  auto lowered = v;
  lowered[0] -= 1.0;
  CHECK_THROWS_AS(comparison_check(u, u.with_values(lowered)), PreconditionError);
}

TEST_CASE("viscosity probe") {
  SolverConfig cfg;
  const ProbeResult h = viscosity_probe(HeightField::horosphere(1.0, 3), box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}), cfg);
  CHECK(h.subharmonic);
  CHECK(std::abs(h.min_margin) <= 1e-12);
  CHECK(h.tolerance == doctest::Approx(10.0 / 256.0));

  const ProbeResult c = viscosity_probe(HeightField::equidistant_cone(1.0, 3), box({0.5, -0.5, -0.5}, {1.5, 0.5, 0.5}), cfg);
  CHECK(c.subharmonic);
  CHECK(std::abs(c.min_margin) <= 1e-3);
  CHECK(c.excised_nodes == 0);

  const ProbeResult apex = viscosity_probe(HeightField::equidistant_cone(1.0, 3), box({-1, -1, -1}, {1, 1, 1}), cfg);
  CHECK(apex.subharmonic);
  CHECK(apex.excised_nodes == 1);

  const ProbeResult p = viscosity_probe(HeightField::tilted_plane(1.0, 3), box({1, -1.5, -1.5}, {2, 1.5, 1.5}), cfg);
  CHECK_FALSE(p.subharmonic);
  CHECK(p.min_margin < -p.tolerance);
  CHECK(p.worst_point[0] == doctest::Approx(1.0 / std::log(2.0)).epsilon(0.05));

  // Nonnegative Ricci catalog fields pass.
  CHECK(viscosity_probe(HeightField::sphere_cap(2.0, 1.0, CapSide::Lower, 3), box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}), cfg).subharmonic);
  CHECK(viscosity_probe(HeightField::equidistant_cone(3.0, 3), box({-0.5, 0.25, -0.5}, {0.5, 1.25, 0.5}), cfg).subharmonic);

  SolverConfig p4;
  p4.p = 4.0;
  CHECK_THROWS_AS(viscosity_probe(HeightField::horosphere(1.0, 3), box({0, 0, 0}, {1, 1, 1}), p4), PreconditionError);
  CHECK_THROWS_AS(viscosity_probe(HeightField::tilted_plane(1.0, 3), box({-1, 0, 0}, {1, 1, 1}), cfg), PreconditionError);
  CHECK_THROWS_AS(viscosity_probe(HeightField::sphere_cap(2.0, 1.0, CapSide::Lower, 3), box({-1, -1, -1}, {1, 1, 1}), cfg), PreconditionError);
}

TEST_CASE("grid over box") {
  const GridSpec g = grid_over_box(box({0, 0}, {1, 2}), 0.25);
  CHECK(g.dims == std::vector<int>{5, 9});
  CHECK_THROWS_AS(grid_over_box(box({0, 0}, {1, 0.3}), 0.25), ParameterError);
}
