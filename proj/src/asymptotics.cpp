#include "hypercurv/asymptotics.hpp"

#include "hypercurv/errors.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace hypercurv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log f at a node, -inf on masked nodes or where f degenerates to 0 inside
// the box, NaN outside the box or support.
double node_height(const HeightField& field, const Vec& x) {
  const Domain& d = field.domain();
  if (!d.in_box(x)) return std::numeric_limits<double>::quiet_NaN();
  if (d.masked(x)) return kNegInf;
  try {
    const double f = field.value(x);
    return f > 0.0 ? std::log(f) : kNegInf;
  } catch (const DomainError&) {
    return kNegInf;
  }
}

double component_diameter(const GridSpec& spec, const std::vector<std::size_t>& nodes, const std::vector<int>& label, int id) {
  const int n = spec.dim();
  // Extreme points of a node set are nodes with a face neighbour outside it.
  std::vector<Vec> rim;
  for (std::size_t node : nodes) {
    std::vector<int> multi = spec.multi_index(node);
    bool edge = false;
    for (int d = 0; d < n && !edge; ++d)
      for (int s : {-1, 1}) {
        const int orig = multi[d];
        multi[d] += s;
        const bool outside = multi[d] < 0 || multi[d] >= spec.dims[d] || label[spec.index(multi)] != id;
        multi[d] = orig;
        if (outside) {
          edge = true;
          break;
        }
      }
    if (edge) rim.push_back(spec.position(node));
  }
  double best = 0.0;
  for (std::size_t a = 0; a < rim.size(); ++a)
    for (std::size_t b = a + 1; b < rim.size(); ++b) best = std::max(best, (rim[a] - rim[b]).squaredNorm());
  return std::sqrt(best);
}

std::vector<Component> label_components(const HeightField& field, const GridSpec& spec, double level, std::vector<int>& label) {
  const int n = spec.dim();
  const std::size_t count = spec.node_count();
  std::vector<std::uint8_t> inside(count, 0);
  std::vector<std::uint8_t> masked(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec x = spec.position(i);
    const double h = node_height(field, x);
    if (std::isnan(h)) continue;
    if (h == kNegInf) masked[i] = 1;
    inside[i] = h < -level ? 1 : 0;
  }

  label.assign(count, -1);
  std::vector<Component> components;
  std::deque<std::size_t> queue;
  for (std::size_t seed = 0; seed < count; ++seed) {
    if (!inside[seed] || label[seed] >= 0) continue;
    const int id = static_cast<int>(components.size());
    Component comp;
    label[seed] = id;
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t node = queue.front();
      queue.pop_front();
      comp.nodes.push_back(node);
      comp.contains_masked = comp.contains_masked || masked[node];
      std::vector<int> multi = spec.multi_index(node);
      for (int d = 0; d < n; ++d)
        for (int s : {-1, 1}) {
          const int orig = multi[d];
          multi[d] = orig + s;
          if (multi[d] >= 0 && multi[d] < spec.dims[d]) {
            const std::size_t nb = spec.index(multi);
            if (inside[nb] && label[nb] < 0) {
              label[nb] = id;
              queue.push_back(nb);
            }
          }
          multi[d] = orig;
        }
    }
    components.push_back(std::move(comp));
  }
  for (std::size_t c = 0; c < components.size(); ++c)
    components[c].diameter = component_diameter(spec, components[c].nodes, label, static_cast<int>(c));
  return components;
}

}  // namespace

std::vector<Component> sublevel_components(const HeightField& field, const GridSpec& grid, double level) {
  grid.validate();
  if (grid.dim() != field.dim()) throw ParameterError("sublevel_components: grid dimension mismatch");
  std::vector<int> label;
  return label_components(field, grid, level, label);
}

GridSpec default_analysis_grid(const HeightField& field) {
  const Window w = analysis_window(field);
  return GridSpec::from_box(w.lo, w.hi, field.dim() >= 4 ? 17 : 65);
}

RecessionReport recession_report(const HeightField& field, const std::vector<double>& levels, const std::optional<GridSpec>& grid) {
  if (levels.empty()) throw ParameterError("recession_report: no levels");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (!(levels[i] > levels[i - 1])) throw ParameterError("recession_report: levels must be increasing");

  RecessionReport report;
  report.grid = grid ? *grid : default_analysis_grid(field);
  report.grid.validate();
  if (report.grid.dim() != field.dim()) throw ParameterError("recession_report: grid dimension mismatch");
  report.levels = levels;

  std::vector<int> first_label;
  std::vector<Component> first;
  std::vector<Component> last;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::vector<int> label;
    std::vector<Component> comps = label_components(field, report.grid, levels[i], label);
    report.counts.push_back(static_cast<int>(comps.size()));
    double widest = 0.0;
    for (const Component& c : comps) widest = std::max(widest, c.diameter);
    report.max_diameters.push_back(widest);
    if (i == 0) {
      first = comps;
      first_label = std::move(label);
    }
    if (i + 1 == levels.size()) last = std::move(comps);
  }

  // Sublevel sets are nested, so each surviving component lies in exactly
  // one component of the lowest level.
  std::vector<double> descendant_diameter(first.size(), -1.0);
  for (const Component& c : last) {
    const int parent = first_label[c.nodes.front()];
    if (parent < 0) continue;
    descendant_diameter[parent] = std::max(descendant_diameter[parent], c.diameter);
  }
  for (std::size_t p = 0; p < first.size(); ++p) {
    if (descendant_diameter[p] < 0.0) continue;  // vanished: h bounded below there
    if (descendant_diameter[p] <= 0.5 * first[p].diameter || (first[p].diameter == 0.0 && descendant_diameter[p] == 0.0))
      ++report.decaying_components;
    else
      report.fat_recession_set = true;
  }
  report.includes_projection_point = field.domain().unbounded();
  report.boundary_points = report.decaying_components + (report.includes_projection_point ? 1 : 0);
  return report;
}

nlohmann::json to_json(const RecessionReport& report) {
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t i = 0; i < report.levels.size(); ++i)
    comps.push_back({{"count", report.counts[i]}, {"max_diameter", report.max_diameters[i]}});
  return {{"levels", report.levels},
          {"components", comps},
          {"boundary_points", report.boundary_points},
          {"decaying_components", report.decaying_components},
          {"includes_projection_point", report.includes_projection_point},
          {"fat_recession_set", report.fat_recession_set},
          {"grid", to_json(report.grid)}};
}

}  // namespace hypercurv
