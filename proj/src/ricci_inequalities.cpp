#include "hypercurv/ricci_inequalities.hpp"

#include "hypercurv/errors.hpp"

#include <cmath>
#include <sstream>

namespace hypercurv {

namespace {

constexpr double kInequalityTol = 1e-9;
constexpr double kDegenerateGradient = 1e-14;

}  // namespace

AdaptedJet adapted_frame(const Jet2& jet) {
  const int n = jet.dim();
  AdaptedJet out;
  out.jet = jet;
  out.rotation = Mat::Identity(n, n);
  const double norm = jet.grad.norm();
  if (norm <= kDegenerateGradient) {
    out.degenerate = true;
    return out;
  }
  Vec v = jet.grad / norm;
  v[0] -= 1.0;
  const double vv = v.squaredNorm();
  if (vv > 1e-28) out.rotation -= 2.0 * v * v.transpose() / vv;
  out.jet.grad = out.rotation * jet.grad;
  out.jet.hess = symmetrized(out.rotation * jet.hess * out.rotation.transpose());
  return out;
}

double hessian_quadratic(const Jet2& jet) { return jet.grad.dot(jet.hess * jet.grad); }

double hessian_square_quadratic(const Jet2& jet) {
  const Vec hg = jet.hess * jet.grad;
  return hg.squaredNorm();
}

double grad_direction_ricci(const Jet2& jet) {
  const int n = jet.dim();
  const double q = jet.grad.squaredNorm();
  if (!(std::sqrt(q) > kDegenerateGradient)) throw UndefinedDirectionError("gradient-direction Ricci: Df = 0");
  const double f = jet.f;
  const double h1 = hessian_quadratic(jet);
  const double h2 = hessian_square_quadratic(jet);
  const double lap = jet.hess.trace();
  const double bracket = (n - 2) * h1 + lap * q * (1.0 + q) + f * h1 * lap - h1 * q - f * h2;
  return -(n - 1) * q / (1.0 + q) + f / (q * (1.0 + q) * (1.0 + q)) * bracket;
}

double grad_direction_ricci_adapted(const Jet2& jet) {
  const AdaptedJet adapted = adapted_frame(jet);
  if (adapted.degenerate) throw UndefinedDirectionError("gradient-direction Ricci: Df = 0");
  const Jet2& a = adapted.jet;
  const int n = a.dim();
  const double f = a.f;
  const double f1sq = a.grad[0] * a.grad[0];
  const double w = 1.0 + f1sq;
  double tangential = 0.0;
  double mixed = 0.0;
  for (int i = 1; i < n; ++i) {
    tangential += a.hess(i, i) + 1.0 / f;
    mixed += a.hess(0, i) * a.hess(0, i);
  }
  const double c = f * f / (w * w);
  return c * (w / f + a.hess(0, 0)) * tangential - (n - 1) - c * mixed;
}

KeyFactors key_factors(const Jet2& jet) {
  const int n = jet.dim();
  const AdaptedJet adapted = adapted_frame(jet);
  const Jet2& a = adapted.jet;
  const double f = a.f;
  const double f1 = a.grad[0];
  const double w = 1.0 + f1 * f1;

  KeyFactors k;
  k.degenerate = adapted.degenerate;
  const double a_bracket = a.hess(0, 0) + w / f;
  double b_bracket = 0.0;
  for (int i = 1; i < n; ++i) b_bracket += a.hess(i, i) + 1.0 / f;
  k.a = f * std::pow(w, -1.5) * a_bracket;
  k.b = f / std::sqrt(w) * b_bracket;
  k.product = k.a * k.b;
  k.product_ok = k.product >= (n - 1) - kInequalityTol;

  const FundamentalForms forms = fundamental_forms(jet);
  k.sum_check = std::abs(k.a + k.b - shape_spectrum(jet, forms).mean);

  if (a_bracket >= 0.0 && b_bracket >= 0.0) {
    k.sqrt_form_applicable = true;
    k.sqrt_form_lhs = std::sqrt((n - 1) * a_bracket) * std::sqrt(b_bracket);
    k.sqrt_form_rhs = (n - 1) * w / f;
    k.sqrt_form_ok = k.sqrt_form_lhs >= k.sqrt_form_rhs - kInequalityTol * std::max(1.0, k.sqrt_form_rhs);
  }
  return k;
}

MeanBoundReport mean_bound_check(const ShapeSpectrum& spectrum, double ric_min, int n, const std::optional<Vec>& point) {
  MeanBoundReport r;
  r.mean = spectrum.mean;
  r.n = n;
  r.applicable = ric_min >= -kInequalityTol;
  double slack = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < spectrum.kappas.size(); ++i) {
    const double k = spectrum.kappas[i];
    slack = std::min(slack, k * r.mean - (n - 1) - k * k);
  }
  r.min_direction_slack = slack;
  if (!r.applicable) return r;
  r.mean_ok = r.mean >= n - kInequalityTol;
  r.per_direction_ok = slack >= -kInequalityTol;
  r.violated = !(r.mean_ok && r.per_direction_ok);
  if (r.violated) {
    std::ostringstream os;
    os.precision(17);
    os << "mean-curvature bound violated";
    if (point) {
      os << " at x=(";
      for (Eigen::Index i = 0; i < point->size(); ++i) os << (i ? "," : "") << (*point)[i];
      os << ")";
    }
    os << " kappa=(";
    for (Eigen::Index i = 0; i < spectrum.kappas.size(); ++i) os << (i ? "," : "") << spectrum.kappas[i];
    os << ") H=" << r.mean << " Ric_min=" << ric_min;
    r.counterexample = os.str();
  }
  return r;
}

DensityResult n_subharmonic_density(const Jet2& jet, int n) {
  if (!(jet.f > 0.0)) throw DomainError("density: f must be positive");
  // u = log f
  Jet2 u;
  u.x = jet.x;
  u.f = std::log(jet.f);
  u.grad = jet.grad / jet.f;
  u.hess = jet.hess / jet.f - jet.grad * jet.grad.transpose() / (jet.f * jet.f);

  DensityResult out;
  const AdaptedJet adapted = adapted_frame(u);
  if (adapted.degenerate) {
    out.critical = true;
    out.density = u.hess.trace();
    out.weak_value = n == 2 ? out.density : 0.0;
    return out;
  }
  const Mat& uh = adapted.jet.hess;
  double tangential = 0.0;
  for (int i = 1; i < u.dim(); ++i) tangential += uh(i, i);
  out.density = (n - 1) * uh(0, 0) + tangential;
  out.weak_value = std::pow(u.grad.norm(), n - 2) * out.density;
  return out;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::NotConvex:
      return "NotConvex";
    case Regime::StrictlyConvex:
      return "StrictlyConvex";
    case Regime::NonnegRicci:
      return "NonnegRicci";
    case Regime::NonnegSectional:
      return "NonnegSectional";
    case Regime::Horoconvex:
      return "Horoconvex";
  }
  return "Unknown";
}

RegimeReport convexity_classify(const Vec& kappas, const Vec& ric_eigs, int n) {
  RegimeReport r;
  r.mean = kappas.sum();
  r.min_ricci_eig = ric_eigs.size() ? ric_eigs.minCoeff() : 0.0;
  r.n_laplacian_dimension = n >= 3;
  const Eigen::Index m = kappas.size();

  bool strict = true, ricci = true, sectional = true, horo = true;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double k = kappas[i];
    strict = strict && k > kInequalityTol;
    ricci = ricci && k * r.mean >= (n - 1) + k * k - kInequalityTol;
    horo = horo && k >= 1.0 - kInequalityTol;
    for (Eigen::Index j = 0; j < m; ++j)
      if (j != i) sectional = sectional && k * kappas[j] >= 1.0 - kInequalityTol;
  }
  if (strict) {
    r.regime = Regime::StrictlyConvex;
    if (ricci) {
      r.regime = Regime::NonnegRicci;
      if (sectional) {
        r.regime = Regime::NonnegSectional;
        if (horo) r.regime = Regime::Horoconvex;
      }
    }
  }
  return r;
}

RegimeReport classify_point(const Jet2& jet) {
  const PointAnalysis a = analyze_jet(jet);
  RegimeReport r = convexity_classify(a.spectrum.kappas, a.ricci_eigs, jet.dim());
  r.factors = key_factors(jet);
  r.density = n_subharmonic_density(jet, jet.dim());
  return r;
}

}  // namespace hypercurv
