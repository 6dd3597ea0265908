#include "doctest.h"

#include "hypercurv/errors.hpp"
#include "hypercurv/grid_function.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

using namespace hypercurv;

namespace {

GridSpec cube(int nodes, double lo, double hi, int n = 3) {
  return GridSpec::from_box(Vec::Constant(n, lo), Vec::Constant(n, hi), nodes);
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hypercurv_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("linear index round trip, axis 0 fastest") {
  GridSpec g;
  g.dims = {3, 4, 5};
  g.spacing = 0.5;
  g.origin = Vec::Zero(3);
  g.validate();
  CHECK(g.node_count() == 60);
  CHECK(g.cell_count() == 24);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const std::vector<int> m = g.multi_index(i);
    CHECK(g.index(m) == i);
  }
  const int m[] = {1, 0, 0};
  CHECK(g.index(m) == 1);
  const Vec x = g.position(g.node_count() - 1);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 1.5);
  CHECK(x[2] == 2.0);
  CHECK((g.upper() - x).norm() == 0.0);
}

TEST_CASE("box boundary count is N^n - (N-2)^n") {
  for (int n : {2, 3, 4}) {
    const GridSpec g = cube(6, 0.0, 1.0, n);
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.node_count(); ++i) count += g.on_box_boundary(i) ? 1 : 0;
    CHECK(count == static_cast<std::size_t>(std::pow(6, n) - std::pow(4, n)));
  }
}

TEST_CASE("grid spec validation") {
  GridSpec g;
  g.dims = {2, 5};
  g.spacing = 1.0;
  g.origin = Vec::Zero(2);
  CHECK_THROWS_AS(g.validate(), ParameterError);
  g.dims = {3, 3};
  g.spacing = 0.0;
  CHECK_THROWS_AS(g.validate(), ParameterError);
  g.spacing = 1.0;
  g.origin = Vec::Zero(3);
  CHECK_THROWS_AS(g.validate(), ParameterError);
  CHECK_THROWS_AS(GridSpec::from_box(Vec::Zero(2), Vec::Constant(2, 1.0), 2), ParameterError);
  Vec hi(2);
  hi << 1.0, 2.0;
  CHECK_THROWS_AS(GridSpec::from_box(Vec::Zero(2), hi, 5), ParameterError);
}

TEST_CASE("grid spec text parsing") {
  const GridSpec g = GridSpec::parse("0:1:5,-1:0:5,2:3:5");
  CHECK(g.dims == std::vector<int>{5, 5, 5});
  CHECK(g.spacing == doctest::Approx(0.25));
  CHECK(g.origin[1] == -1.0);
  CHECK(g.upper()[2] == doctest::Approx(3.0));
  CHECK(GridSpec::parse("0:2:9,0:1:5").dims == std::vector<int>{9, 5});
  CHECK_THROWS_AS(GridSpec::parse("0:1:5,0:2:5"), ParameterError);
  CHECK_THROWS_AS(GridSpec::parse("0:1"), ParameterError);
  CHECK_THROWS_AS(GridSpec::parse("a:1:5"), ParameterError);
  CHECK_THROWS_AS(GridSpec::parse(""), ParameterError);
  CHECK_THROWS_AS(GridSpec::parse("0:1:2"), ParameterError);
}

TEST_CASE("grid spec json round trip") {
  const GridSpec g = GridSpec::parse("0.5:1.5:33,-0.5:0.5:33");
  const GridSpec back = grid_spec_from_json(to_json(g));
  CHECK(back.dims == g.dims);
  CHECK(back.spacing == g.spacing);
  CHECK(back.origin == g.origin);
  CHECK_THROWS_AS(grid_spec_from_json(nlohmann::json{{"dims", {3, 3}}}), ParameterError);
}

TEST_CASE("grid function invariants") {
  const GridSpec g = cube(3, 0.0, 1.0, 2);
  std::vector<double> v(g.node_count(), 1.0);
  std::vector<std::uint8_t> b(g.node_count(), 0);
  CHECK_THROWS_AS(GridFunction(g, v, b), DataError);  // box boundary not flagged

  const GridFunction ok = GridFunction::with_box_boundary(g, v);
  CHECK(ok.is_boundary(0));
  CHECK_FALSE(ok.is_boundary(4));

  auto bad = v;
  bad[4] = -std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(GridFunction::with_box_boundary(g, bad), DataError);
  bad[4] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(GridFunction::with_box_boundary(g, bad), DataError);
  bad[4] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(GridFunction::with_box_boundary(g, bad), DataError);

  // -inf is fine on a flagged node.
  bad[4] = -std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> flags(ok.boundary().begin(), ok.boundary().end());
  flags[4] = 1;
  CHECK_NOTHROW(GridFunction(g, bad, flags));
  CHECK_THROWS_AS(ok.with_values(std::vector<double>(3, 0.0)), DataError);
}

TEST_CASE("grid files round trip bit for bit") {
  const auto dir = scratch_dir("grid_io");
  const GridSpec g = GridSpec::parse("-1:1:9,0:2:9");
  std::vector<double> v(g.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(1.0 + g.position(i).sum()) / 3.0;
  std::vector<std::uint8_t> b(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) b[i] = g.on_box_boundary(i) ? 1 : 0;
  v[40] = -std::numeric_limits<double>::infinity();
  b[40] = 1;
  const GridFunction original(g, v, b);
  write_grid(original, dir / "field");
  CHECK(std::filesystem::exists(dir / "field.json"));
  CHECK(std::filesystem::exists(dir / "field.csv"));

  const GridFunction back = read_grid(dir / "field.json");
  REQUIRE(back.size() == original.size());
  CHECK(back.spec().dims == g.dims);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.value(i) == original.value(i));
    CHECK(back.is_boundary(i) == original.is_boundary(i));
  }
  CHECK_THROWS_AS(read_grid(dir / "missing.json"), DataError);
}
