#pragma once

#include "hypercurv/asymptotics.hpp"
#include "hypercurv/curvature.hpp"
#include "hypercurv/height_field.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hypercurv {

/// Ricci-null directions at one point and how they sit against the
/// principal frame.
struct FlatDirectionReport {
  int null_space_dim = 0;
  std::vector<double> null_kappas;  // II(v, v) for each g-unit null eigenvector v
  std::optional<double> kappa0;     // mean of null_kappas
  std::optional<double> kappa0_expected;  // (H - sqrt(H^2 - 4(n-1))) / 2 when real
  double mean = 0.0;
  double principal_alignment = 0.0;  // max angle (rad) to the nearest principal eigenspace
  double root_deviation = 0.0;       // max |null kappa - kappa0_expected|
  bool all_kappas_positive = false;

  bool empty() const { return null_space_dim == 0; }
};

/// Requires n >= 3 (ParameterError) and min Ricci eigenvalue >= -null_tol
/// (PreconditionError). No null eigenvalue gives an empty report.
FlatDirectionReport flat_direction_check(const Jet2& jet, int n, double null_tol = 1e-6);

/// ||Ric# S - S Ric#||_F / (||Ric#||_F ||S||_F + eps) with Ric# = g^-1 Ric.
double commutation_residual(const Mat& ricci, const Mat& g, const Mat& shape);

enum class SpectrumStructure { Split, Umbilic, Irregular };
std::string to_string(SpectrumStructure s);

struct ConstancyResult {
  SpectrumStructure structure = SpectrumStructure::Irregular;
  int samples = 0;
  double kappa0 = 0.0;             // mean multiplicity-1 curvature (or umbilic value)
  double kappa_transverse = 0.0;   // mean multiplicity-(n-1) curvature
  double var_kappa0 = 0.0;
  double var_kappa_transverse = 0.0;
  double product_defect = 0.0;     // max |kappa0 kappa_t - 1|
  double min_ricci_eig = 0.0;      // over all samples
  std::string detail;
};

/// Splits each sample's spectrum into multiplicity {1, n-1} clusters (relative
/// gap `gap_tol`) and accumulates across-sample statistics in sample order.
/// A sample that fits neither the split nor the umbilic pattern makes the
/// whole scan Irregular.
ConstancyResult constancy_scan(const HeightField& field, const std::vector<Vec>& samples, int n, double gap_tol = 1e-6);

/// Splits one sorted spectrum; throws StructureError on any other pattern.
struct SplitSpectrum {
  bool umbilic = false;
  double kappa0 = 0.0;
  double kappa_transverse = 0.0;
};
SplitSpectrum split_spectrum(const Vec& sorted_kappas, int n, double gap_tol = 1e-6);

enum class Verdict { EquidistantTube, Horosphere, SingleEndCandidate, Inconclusive };
std::string to_string(Verdict v);

struct GlobalVerdict {
  Verdict verdict = Verdict::Inconclusive;
  int boundary_points = 0;
  std::optional<double> kappa0;
  std::optional<double> kappa_transverse;
  std::vector<double> variances;
  std::string reason;
};

/// Two boundary points with a constant split spectrum and kappa0 kappa_t = 1
/// is an equidistant tube; kappa = 1 everywhere is a horosphere; a single
/// boundary point is a single-end candidate; anything else is inconclusive.
/// More than two boundary points on a nonnegative-Ricci field throws
/// ContradictionError.
GlobalVerdict classify_global(const ConstancyResult& constancy, const RecessionReport& recession, int n);

nlohmann::json to_json(const GlobalVerdict& verdict);

/// Constancy scan over seeded sample points plus the recession report,
/// combined into a verdict.
struct ClassifyOutcome {
  ConstancyResult constancy;
  RecessionReport recession;
  GlobalVerdict verdict;
};
ClassifyOutcome classify_surface(const HeightField& field, const std::vector<double>& levels, int sample_count,
                                 std::uint64_t seed, const std::optional<GridSpec>& grid = std::nullopt,
                                 double gap_tol = 1e-6);

}  // namespace hypercurv
