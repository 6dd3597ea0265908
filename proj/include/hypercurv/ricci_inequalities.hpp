#pragma once

#include "hypercurv/curvature.hpp"
#include "hypercurv/height_field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hypercurv {

/// Jet rotated so that e_1 points along Df (f_1 = |Df|, f_j = 0 for j >= 2).
struct AdaptedJet {
  Jet2 jet;      // rotated jet; jet.x is the original point
  Mat rotation;  // orthogonal; rotated grad = rotation * grad
  bool degenerate = false;
};

/// Householder rotation of the jet into gradient-adapted coordinates.
/// |Df| <= 1e-14 gives the identity with `degenerate` set.
AdaptedJet adapted_frame(const Jet2& jet);

/// H1 = sum f_ij f_i f_j, H2 = sum f_ik f_kj f_i f_j.
double hessian_quadratic(const Jet2& jet);
double hessian_square_quadratic(const Jet2& jet);

/// Ric along the normalized gradient from f, Df, D^2 f via H1 and H2 (valid
/// in any Euclidean coordinates). Throws UndefinedDirectionError when Df = 0.
double grad_direction_ricci(const Jet2& jet);

/// The same quantity in gradient-adapted coordinates:
/// f^2/(1+f1^2)^2 ((1+f1^2)/f + f11) sum_{i>=2}(f_ii + 1/f) - (n-1) - f^2/(1+f1^2)^2 sum_{i>=2} f_1i^2.
double grad_direction_ricci_adapted(const Jet2& jet);

/// Two-factor split of the mean curvature in adapted coordinates.
struct KeyFactors {
  double a = 0.0;  // f (1+f1^2)^{-3/2} (f11 + (1+f1^2)/f)
  double b = 0.0;  // f (1+f1^2)^{-1/2} sum_{i>=2} (f_ii + 1/f)
  double product = 0.0;
  bool product_ok = false;   // a*b >= (n-1) - 1e-9
  double sum_check = 0.0;    // |a + b - H|
  bool degenerate = false;   // Df = 0; identity frame used
  // Square-root form sqrt((n-1) A') sqrt(B') >= (n-1)(1+f1^2)/f, evaluated
  // only when both unnormalized brackets are nonnegative.
  bool sqrt_form_applicable = false;
  double sqrt_form_lhs = 0.0;
  double sqrt_form_rhs = 0.0;
  bool sqrt_form_ok = false;
};
KeyFactors key_factors(const Jet2& jet);

struct MeanBoundReport {
  bool applicable = false;  // ric_min >= -1e-9
  double mean = 0.0;
  int n = 0;
  bool mean_ok = true;              // H >= n - 1e-9
  bool per_direction_ok = true;     // kappa_i H >= n-1 + kappa_i^2 - 1e-9
  double min_direction_slack = 0.0; // min_i kappa_i H - (n-1) - kappa_i^2
  bool violated = false;
  std::string counterexample;       // point, kappas, H when violated
};
MeanBoundReport mean_bound_check(const ShapeSpectrum& spectrum, double ric_min, int n,
                                 const std::optional<Vec>& point = std::nullopt);

/// (n-1) (log f)_11 + sum_{i>=2} (log f)_ii in gradient-adapted coordinates,
/// i.e. |D log f|^{-(n-2)} Div(|D log f|^{n-2} D log f). At critical points
/// the value is Lap(log f) and `critical` is set.
struct DensityResult {
  double density = 0.0;
  double weak_value = 0.0;  // |D log f|^{n-2} * density (0 at critical points for n > 2)
  bool critical = false;
};
DensityResult n_subharmonic_density(const Jet2& jet, int n);

enum class Regime { NotConvex, StrictlyConvex, NonnegRicci, NonnegSectional, Horoconvex };
std::string to_string(Regime r);

struct RegimeReport {
  Regime regime = Regime::NotConvex;
  double min_ricci_eig = 0.0;
  double mean = 0.0;
  std::optional<KeyFactors> factors;
  std::optional<DensityResult> density;
  bool n_laplacian_dimension = true;  // false for n = 2
};

/// Strongest regime whose condition, and every weaker one, holds on kappa
/// (tolerance 1e-9): kappa_i > 0; kappa_i H >= n-1 + kappa_i^2;
/// kappa_i kappa_j >= 1 (i != j); kappa_i >= 1.
RegimeReport convexity_classify(const Vec& kappas, const Vec& ric_eigs, int n);

/// Full pointwise report: regime plus factors and density from the jet.
RegimeReport classify_point(const Jet2& jet);

}  // namespace hypercurv
