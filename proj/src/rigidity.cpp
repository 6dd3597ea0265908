#include "hypercurv/rigidity.hpp"

#include "hypercurv/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hypercurv {

namespace {

constexpr double kConstancyVariance = 1e-12;
constexpr double kProductDefect = 1e-8;
constexpr double kHorosphereKappa = 1e-8;
constexpr double kNonnegRicci = 1e-6;

}  // namespace

FlatDirectionReport flat_direction_check(const Jet2& jet, int n, double null_tol) {
  if (n < 3) throw ParameterError("flat_direction_check: requires n >= 3");
  const PointAnalysis a = analyze_jet(jet);
  const GeneralizedEigen ric = ricci_operator_spectrum(a.ricci, a.forms.g);
  if (ric.values.minCoeff() < -null_tol)
    throw PreconditionError("flat_direction_check: Ricci curvature is negative at this point");

  FlatDirectionReport r;
  r.mean = a.spectrum.mean;
  r.all_kappas_positive = a.spectrum.kappas.minCoeff() > 0.0;
  const double disc = r.mean * r.mean - 4.0 * (n - 1);
  if (disc >= 0.0) r.kappa0_expected = 0.5 * (r.mean - std::sqrt(disc));

  const Mat& g = a.forms.g;
  const std::vector<EigenCluster> clusters = cluster_eigenvalues(a.spectrum.kappas);
  for (Eigen::Index c = 0; c < ric.values.size(); ++c) {
    if (std::abs(ric.values[c]) > null_tol) continue;
    const Vec v = ric.vectors.col(c);
    ++r.null_space_dim;
    const double kappa = v.dot(a.spectrum.second_form * v);
    r.null_kappas.push_back(kappa);
    if (r.kappa0_expected) r.root_deviation = std::max(r.root_deviation, std::abs(kappa - *r.kappa0_expected));

    double best = std::numeric_limits<double>::infinity();
    for (const EigenCluster& cl : clusters) {
      const Mat basis = a.spectrum.frame.middleCols(cl.first, cl.size);
      const Vec projected = basis * (basis.transpose() * (g * v));
      const Vec rest = v - projected;
      const double angle = std::atan2(std::sqrt(std::max(0.0, rest.dot(g * rest))), std::sqrt(std::max(0.0, projected.dot(g * projected))));
      best = std::min(best, angle);
    }
    r.principal_alignment = std::max(r.principal_alignment, best);
  }
  if (r.null_space_dim > 0) {
    double s = 0.0;
    for (double k : r.null_kappas) s += k;
    r.kappa0 = s / r.null_space_dim;
  }
  return r;
}

double commutation_residual(const Mat& ricci, const Mat& g, const Mat& shape) {
  const Mat sharp = g.llt().solve(ricci);
  const Mat commutator = sharp * shape - shape * sharp;
  return commutator.norm() / (sharp.norm() * shape.norm() + std::numeric_limits<double>::min());
}

std::string to_string(SpectrumStructure s) {
  switch (s) {
    case SpectrumStructure::Split:
      return "Split";
    case SpectrumStructure::Umbilic:
      return "Umbilic";
    case SpectrumStructure::Irregular:
      return "Irregular";
  }
  return "Unknown";
}

SplitSpectrum split_spectrum(const Vec& kappas, int n, double gap_tol) {
  const std::vector<EigenCluster> clusters = cluster_eigenvalues(kappas, gap_tol);
  SplitSpectrum out;
  if (clusters.size() == 1) {
    out.umbilic = true;
    out.kappa0 = out.kappa_transverse = clusters.front().mean;
    return out;
  }
  if (clusters.size() == 2) {
    const EigenCluster& lo = clusters[0];
    const EigenCluster& hi = clusters[1];
    if (lo.size == 1 && hi.size == n - 1) {
      out.kappa0 = lo.mean;
      out.kappa_transverse = hi.mean;
      return out;
    }
    if (hi.size == 1 && lo.size == n - 1) {
      out.kappa0 = hi.mean;
      out.kappa_transverse = lo.mean;
      return out;
    }
  }
  std::ostringstream os;
  os << "principal curvatures form " << clusters.size() << " clusters, not a {1, n-1} split";
  throw StructureError(os.str());
}

ConstancyResult constancy_scan(const HeightField& field, const std::vector<Vec>& samples, int n, double gap_tol) {
  if (n < 3) throw ParameterError("constancy_scan: requires n >= 3");
  ConstancyResult out;
  out.samples = static_cast<int>(samples.size());
  if (samples.empty()) {
    out.detail = "no samples";
    return out;
  }
  std::vector<double> k0(samples.size()), kt(samples.size());
  int umbilic = 0;
  out.min_ricci_eig = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const PointAnalysis a = analyze_jet(field.jet(samples[i]));
    out.min_ricci_eig = std::min(out.min_ricci_eig, a.ricci_eigs.minCoeff());
    try {
      const SplitSpectrum s = split_spectrum(a.spectrum.kappas, n, gap_tol);
      umbilic += s.umbilic ? 1 : 0;
      k0[i] = s.kappa0;
      kt[i] = s.kappa_transverse;
    } catch (const StructureError& e) {
      out.structure = SpectrumStructure::Irregular;
      out.detail = "sample " + std::to_string(i) + ": " + e.what();
      return out;
    }
  }
  if (umbilic == out.samples) {
    out.structure = SpectrumStructure::Umbilic;
  } else if (umbilic == 0) {
    out.structure = SpectrumStructure::Split;
  } else {
    out.structure = SpectrumStructure::Irregular;
    out.detail = "umbilic and split samples mixed";
    return out;
  }
  const MeanVariance m0 = mean_variance(k0);
  const MeanVariance mt = mean_variance(kt);
  out.kappa0 = m0.mean;
  out.kappa_transverse = mt.mean;
  out.var_kappa0 = m0.variance;
  out.var_kappa_transverse = mt.variance;
  for (std::size_t i = 0; i < samples.size(); ++i) out.product_defect = std::max(out.product_defect, std::abs(k0[i] * kt[i] - 1.0));
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::EquidistantTube:
      return "EquidistantTube";
    case Verdict::Horosphere:
      return "Horosphere";
    case Verdict::SingleEndCandidate:
      return "SingleEndCandidate";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Unknown";
}

GlobalVerdict classify_global(const ConstancyResult& c, const RecessionReport& recession, int n) {
  GlobalVerdict v;
  v.boundary_points = recession.boundary_points;
  const bool nonneg_ricci = c.samples > 0 && c.min_ricci_eig >= -kNonnegRicci;
  if (recession.boundary_points > 2 && nonneg_ricci) {
    throw ContradictionError("classify_global: " + std::to_string(recession.boundary_points) +
                             " asymptotic boundary points on a nonnegative-Ricci field (n = " + std::to_string(n) + ")");
  }
  if (c.structure != SpectrumStructure::Irregular && c.samples > 0) {
    v.kappa0 = c.kappa0;
    v.kappa_transverse = c.kappa_transverse;
    v.variances = {c.var_kappa0, c.var_kappa_transverse};
  }
  const bool constant = c.var_kappa0 <= kConstancyVariance && c.var_kappa_transverse <= kConstancyVariance;

  if (c.structure == SpectrumStructure::Umbilic && constant && std::abs(c.kappa0 - 1.0) <= kHorosphereKappa) {
    v.verdict = Verdict::Horosphere;
    v.reason = "all principal curvatures equal 1";
  } else if (recession.boundary_points == 2 && c.structure == SpectrumStructure::Split && constant && c.product_defect <= kProductDefect) {
    v.verdict = Verdict::EquidistantTube;
    v.reason = "two boundary points, constant split spectrum with kappa0 * kappa_t = 1";
  } else if (recession.boundary_points == 1) {
    v.verdict = Verdict::SingleEndCandidate;
    v.reason = "single asymptotic boundary point";
  } else {
    v.verdict = Verdict::Inconclusive;
    v.reason = "no rule applies (boundary points = " + std::to_string(recession.boundary_points) + ", spectrum " +
               to_string(c.structure) + (c.detail.empty() ? "" : ": " + c.detail) + ")";
  }
  return v;
}

nlohmann::json to_json(const GlobalVerdict& v) {
  nlohmann::json j{{"verdict", to_string(v.verdict)}, {"boundary_points", v.boundary_points}, {"variances", v.variances}, {"reason", v.reason}};
  j["kappa0"] = v.kappa0 ? nlohmann::json(*v.kappa0) : nlohmann::json(nullptr);
  j["kappa_transverse"] = v.kappa_transverse ? nlohmann::json(*v.kappa_transverse) : nlohmann::json(nullptr);
  return j;
}

ClassifyOutcome classify_surface(const HeightField& field, const std::vector<double>& levels, int sample_count,
                                 std::uint64_t seed, const std::optional<GridSpec>& grid, double gap_tol) {
  if (sample_count < 1) throw ParameterError("classify_surface: need at least one sample");
  std::mt19937_64 rng(seed);
  const int n = field.dim();
  ClassifyOutcome out;
  out.constancy = constancy_scan(field, sample_points(field, sample_count, rng), n, gap_tol);
  out.recession = recession_report(field, levels, grid);
  out.verdict = classify_global(out.constancy, out.recession, n);
  return out;
}

}  // namespace hypercurv
