#include "hypercurv/report.hpp"

#include "hypercurv/errors.hpp"
#include "hypercurv/ricci_inequalities.hpp"

#include <fstream>
#include <iomanip>

namespace hypercurv {

nlohmann::json to_json(const RunManifest& m) {
  return {{"command", m.command}, {"input", m.input}, {"config", m.config}, {"outputs", m.outputs}, {"seed", m.seed}, {"version", m.version}};
}

nlohmann::json to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json point_report(const HeightField& field, const Vec& x, double step) {
  const Jet2 jet = field.jet(x);
  const PointAnalysis a = analyze_jet(jet);
  const RegimeReport regime = classify_point(jet);

  nlohmann::json residuals;
  try {
    residuals["codazzi"] = codazzi_residual(field, x, step);
    residuals["gauss"] = gauss_residual(field, x, step);
  } catch (const DomainError&) {
    residuals["codazzi"] = nullptr;
    residuals["gauss"] = nullptr;
  }

  nlohmann::json j{{"x", to_json(x)},
                   {"f", jet.f},
                   {"g", to_json(a.forms.g)},
                   {"II", to_json(a.spectrum.second_form)},
                   {"kappas", to_json(a.spectrum.kappas)},
                   {"H", a.spectrum.mean},
                   {"ricci_eigs", to_json(a.ricci_eigs)},
                   {"residuals", residuals},
                   {"regime", to_string(regime.regime)}};
  if (regime.factors) {
    j["factors"] = {{"A", regime.factors->a}, {"B", regime.factors->b}, {"AB_minus_n_minus_1", regime.factors->product - (field.dim() - 1)}};
  }
  if (regime.density) {
    j["density"] = regime.density->density;
    j["density_critical_point"] = regime.density->critical;
  }
  return j;
}

std::size_t write_scan_csv(const HeightField& field, const GridSpec& grid, const std::filesystem::path& path) {
  grid.validate();
  if (grid.dim() != field.dim()) throw ParameterError("scan: grid dimension mismatch");
  const int n = field.dim();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setprecision(17);
  for (int d = 0; d < n; ++d) out << 'x' << (d + 1) << ',';
  out << "f,H,";
  for (int d = 0; d < n; ++d) out << "kappa" << (d + 1) << ',';
  out << "min_ric_eig,A,B,AB_minus_(n-1),density,regime\n";

  std::size_t rows = 0;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const Vec x = grid.position(i);
    if (!field.evaluable(x)) continue;
    const Jet2 jet = field.jet(x);
    const PointAnalysis a = analyze_jet(jet);
    const RegimeReport r = classify_point(jet);
    for (int d = 0; d < n; ++d) out << x[d] << ',';
    out << jet.f << ',' << a.spectrum.mean << ',';
    for (int d = 0; d < n; ++d) out << a.spectrum.kappas[d] << ',';
    out << r.min_ricci_eig << ',' << r.factors->a << ',' << r.factors->b << ',' << r.factors->product - (n - 1) << ','
        << r.density->density << ',' << to_string(r.regime) << '\n';
    ++rows;
  }
  return rows;
}

}  // namespace hypercurv
