#include "hypercurv/grid_function.hpp"

#include "hypercurv/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hypercurv {

std::size_t GridSpec::node_count() const {
  std::size_t count = 1;
  for (int d : dims) count *= static_cast<std::size_t>(d);
  return count;
}

std::size_t GridSpec::cell_count() const {
  std::size_t count = 1;
  for (int d : dims) count *= static_cast<std::size_t>(d - 1);
  return count;
}

Vec GridSpec::upper() const {
  Vec hi = origin;
  for (int d = 0; d < dim(); ++d) hi[d] += spacing * (dims[d] - 1);
  return hi;
}

std::size_t GridSpec::index(std::span<const int> multi) const {
  std::size_t linear = 0;
  for (int d = dim() - 1; d >= 0; --d) linear = linear * static_cast<std::size_t>(dims[d]) + static_cast<std::size_t>(multi[d]);
  return linear;
}

std::vector<int> GridSpec::multi_index(std::size_t linear) const {
  std::vector<int> multi(dims.size());
  for (int d = 0; d < dim(); ++d) {
    multi[d] = static_cast<int>(linear % static_cast<std::size_t>(dims[d]));
    linear /= static_cast<std::size_t>(dims[d]);
  }
  return multi;
}

Vec GridSpec::position(std::size_t linear) const {
  Vec x(dim());
  for (int d = 0; d < dim(); ++d) {
    const auto i = static_cast<int>(linear % static_cast<std::size_t>(dims[d]));
    linear /= static_cast<std::size_t>(dims[d]);
    x[d] = origin[d] + spacing * i;
  }
  return x;
}

bool GridSpec::on_box_boundary(std::size_t linear) const {
  for (int d = 0; d < dim(); ++d) {
    const auto i = static_cast<int>(linear % static_cast<std::size_t>(dims[d]));
    linear /= static_cast<std::size_t>(dims[d]);
    if (i == 0 || i == dims[d] - 1) return true;
  }
  return false;
}

void GridSpec::validate() const {
  if (dims.empty()) throw ParameterError("grid: no axes");
  for (int d : dims)
    if (d < 3) throw ParameterError("grid: every axis needs at least 3 nodes");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ParameterError("grid: spacing must be positive");
  if (origin.size() != dim()) throw ParameterError("grid: origin dimension mismatch");
  if (!origin.allFinite()) throw ParameterError("grid: origin must be finite");
}

GridSpec GridSpec::from_box(const Vec& lo, const Vec& hi, int nodes) {
  if (lo.size() != hi.size() || lo.size() == 0) throw ParameterError("grid: box corner dimension mismatch");
  if (nodes < 3) throw ParameterError("grid: every axis needs at least 3 nodes");
  GridSpec spec;
  spec.dims.assign(lo.size(), nodes);
  spec.origin = lo;
  spec.spacing = (hi[0] - lo[0]) / (nodes - 1);
  for (Eigen::Index d = 1; d < lo.size(); ++d) {
    const double h = (hi[d] - lo[d]) / (nodes - 1);
    if (std::abs(h - spec.spacing) > 1e-12 * std::abs(spec.spacing))
      throw ParameterError("grid: box sides must share one spacing");
  }
  spec.validate();
  return spec;
}

GridSpec GridSpec::parse(const std::string& text) {
  std::vector<double> lo, hi;
  std::vector<int> nodes;
  std::stringstream axes(text);
  std::string axis;
  while (std::getline(axes, axis, ',')) {
    std::stringstream parts(axis);
    std::string a, b, c;
    if (!std::getline(parts, a, ':') || !std::getline(parts, b, ':') || !std::getline(parts, c, ':'))
      throw ParameterError("grid spec: expected lo:hi:nodes per axis, got '" + axis + "'");
    try {
      lo.push_back(std::stod(a));
      hi.push_back(std::stod(b));
      nodes.push_back(std::stoi(c));
    } catch (const std::exception&) {
      throw ParameterError("grid spec: cannot parse '" + axis + "'");
    }
  }
  if (lo.empty()) throw ParameterError("grid spec: empty");
  GridSpec spec;
  spec.dims = nodes;
  spec.origin = Eigen::Map<Vec>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  spec.spacing = (hi[0] - lo[0]) / (nodes[0] - 1);
  for (std::size_t d = 1; d < lo.size(); ++d) {
    const double h = (hi[d] - lo[d]) / (nodes[d] - 1);
    if (std::abs(h - spec.spacing) > 1e-12 * std::abs(spec.spacing))
      throw ParameterError("grid spec: all axes must share one spacing");
  }
  spec.validate();
  return spec;
}

nlohmann::json to_json(const GridSpec& spec) {
  return {{"dims", spec.dims},
          {"spacing", spec.spacing},
          {"origin", std::vector<double>(spec.origin.data(), spec.origin.data() + spec.origin.size())}};
}

GridSpec grid_spec_from_json(const nlohmann::json& j) {
  GridSpec spec;
  try {
    spec.dims = j.at("dims").get<std::vector<int>>();
    spec.spacing = j.at("spacing").get<double>();
    const auto origin = j.at("origin").get<std::vector<double>>();
    spec.origin = Eigen::Map<const Vec>(origin.data(), static_cast<Eigen::Index>(origin.size()));
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("grid header: ") + e.what());
  }
  spec.validate();
  return spec;
}

GridFunction::GridFunction(GridSpec spec, std::vector<double> values, std::vector<std::uint8_t> boundary)
    : spec_(std::move(spec)), values_(std::move(values)), boundary_(std::move(boundary)) {
  validate();
}

GridFunction GridFunction::with_box_boundary(GridSpec spec, std::vector<double> values) {
  spec.validate();
  std::vector<std::uint8_t> boundary(spec.node_count());
  for (std::size_t i = 0; i < boundary.size(); ++i) boundary[i] = spec.on_box_boundary(i) ? 1 : 0;
  return GridFunction(std::move(spec), std::move(values), std::move(boundary));
}

GridFunction GridFunction::with_values(std::vector<double> values) const {
  return GridFunction(spec_, std::move(values), boundary_);
}

void GridFunction::validate() const {
  spec_.validate();
  const std::size_t count = spec_.node_count();
  if (values_.size() != count) throw DataError("grid: value count does not match dims");
  if (boundary_.size() != count) throw DataError("grid: boundary mask size does not match dims");
  for (std::size_t i = 0; i < count; ++i) {
    if (spec_.on_box_boundary(i) && boundary_[i] == 0)
      throw DataError("grid: boundary mask must cover the box boundary");
    if (std::isnan(values_[i])) throw DataError("grid: NaN node value");
    if (std::isinf(values_[i]) && (values_[i] > 0 || boundary_[i] == 0))
      throw DataError("grid: -inf is only allowed at masked nodes");
  }
}

void write_grid(const GridFunction& grid, const std::filesystem::path& stem) {
  auto header_path = stem;
  header_path += ".json";
  auto csv_path = stem;
  csv_path += ".csv";

  nlohmann::json header = to_json(grid.spec());
  header["values"] = csv_path.filename().string();
  std::ofstream hout(header_path);
  if (!hout) throw DataError("cannot write " + header_path.string());
  hout << header.dump(2) << '\n';

  std::ofstream out(csv_path);
  if (!out) throw DataError("cannot write " + csv_path.string());
  out << std::setprecision(17);
  for (int d = 0; d < grid.dim(); ++d) out << 'x' << (d + 1) << ',';
  out << "value,boundary\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.spec().position(i);
    for (int d = 0; d < grid.dim(); ++d) out << x[d] << ',';
    out << grid.value(i) << ',' << (grid.is_boundary(i) ? 1 : 0) << '\n';
  }
}

GridFunction read_grid(const std::filesystem::path& header_path) {
  std::ifstream hin(header_path);
  if (!hin) throw DataError("cannot read " + header_path.string());
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hin);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("grid header: ") + e.what());
  }
  GridSpec spec = grid_spec_from_json(header);
  std::filesystem::path csv_path = header.value("values", header_path.stem().string() + ".csv");
  if (csv_path.is_relative()) csv_path = header_path.parent_path() / csv_path;

  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot read " + csv_path.string());
  std::string line;
  std::getline(in, line);  // column names
  const std::size_t count = spec.node_count();
  std::vector<double> values;
  std::vector<std::uint8_t> boundary;
  values.reserve(count);
  boundary.reserve(count);
  const int n = spec.dim();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != n + 2) throw DataError("grid csv: expected x1..xn,value,boundary");
    const std::size_t i = values.size();
    if (i >= count) throw DataError("grid csv: more rows than nodes");
    const Vec expected = spec.position(i);
    for (int d = 0; d < n; ++d) {
      const double x = std::strtod(cells[d].c_str(), nullptr);
      if (std::abs(x - expected[d]) > 1e-9 * std::max(1.0, spec.spacing * spec.dims[d]))
        throw DataError("grid csv: node coordinates out of order at row " + std::to_string(i + 1));
    }
    values.push_back(std::strtod(cells[n].c_str(), nullptr));
    boundary.push_back(cells[n + 1] == "0" ? 0 : 1);
  }
  if (values.size() != count) throw DataError("grid csv: fewer rows than nodes");
  return GridFunction(std::move(spec), std::move(values), std::move(boundary));
}

}  // namespace hypercurv
