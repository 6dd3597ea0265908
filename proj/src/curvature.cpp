#include "hypercurv/curvature.hpp"

#include "hypercurv/errors.hpp"

#include <cmath>

namespace hypercurv {

namespace {

// B_ij = delta_ij + f_i f_j + f f_ij, the numerator of II.
Mat second_form_numerator(const Jet2& jet) {
  const int n = jet.dim();
  return Mat::Identity(n, n) + jet.grad * jet.grad.transpose() + jet.f * jet.hess;
}

void require_positive(const Jet2& jet) {
  if (!(jet.f > 0.0)) throw DomainError("jet: f must be positive (upper half-space)");
}

// Christoffel symbols Gamma^l_ij at y, stored at [(l * n + i) * n + j].
struct Christoffel {
  int n = 0;
  std::vector<double> data;
  double operator()(int l, int i, int j) const { return data[(l * n + i) * n + j]; }
};

Mat metric_at(const HeightField& field, const Vec& y) {
  if (!field.evaluable(y)) throw DomainError("finite-difference stencil leaves the domain");
  return fundamental_forms(field.jet(y)).g;
}

Christoffel christoffel_at(const HeightField& field, const Vec& y, double step) {
  const int n = field.dim();
  // dg[k](i, j) = d_k g_ij
  std::vector<Mat> dg(n);
  for (int k = 0; k < n; ++k) {
    Vec e = Vec::Zero(n);
    e[k] = step;
    dg[k] = (metric_at(field, y + e) - metric_at(field, y - e)) / (2.0 * step);
  }
  const Mat g_inv = fundamental_forms(field.jet(y)).g_inv;
  Christoffel gamma{n, std::vector<double>(static_cast<std::size_t>(n) * n * n, 0.0)};
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += g_inv(l, m) * (dg[i](m, j) + dg[j](m, i) - dg[m](i, j));
        gamma.data[(l * n + i) * n + j] = 0.5 * s;
      }
  return gamma;
}

}  // namespace

FundamentalForms fundamental_forms(const Jet2& jet) {
  require_positive(jet);
  const int n = jet.dim();
  const Mat eye = Mat::Identity(n, n);
  const Mat dfdf = jet.grad * jet.grad.transpose();
  FundamentalForms out;
  out.grad_norm_sq = jet.grad.squaredNorm();
  out.g = (eye + dfdf) / (jet.f * jet.f);
  out.g_inv = jet.f * jet.f * (eye - dfdf / (1.0 + out.grad_norm_sq));
  out.normal = Vec(n + 1);
  const double scale = jet.f / std::sqrt(1.0 + out.grad_norm_sq);
  out.normal.head(n) = -scale * jet.grad;
  out.normal[n] = scale;
  return out;
}

ShapeSpectrum shape_spectrum(const Jet2& jet, const FundamentalForms& forms) {
  require_positive(jet);
  const int n = jet.dim();
  const double w = std::sqrt(1.0 + forms.grad_norm_sq);
  ShapeSpectrum s;
  s.second_form = second_form_numerator(jet) / (jet.f * jet.f * w);
  s.shape = forms.g_inv * s.second_form;
  const GeneralizedEigen eig = generalized_symmetric_eigen(s.second_form, forms.g);
  s.kappas = eig.values;
  s.frame = eig.vectors;
  s.mean = s.shape.trace();
  const double h1 = jet.grad.dot(jet.hess * jet.grad);
  s.mean_closed_form = (n + jet.f * jet.hess.trace() - jet.f * h1 / (1.0 + forms.grad_norm_sq)) / w;
  return s;
}

Mat ricci_coordinate(const Jet2& jet, const FundamentalForms& forms) {
  require_positive(jet);
  const int n = jet.dim();
  const double q = forms.grad_norm_sq;
  const Mat b = second_form_numerator(jet);
  // P^{jl} = delta_jl - f_j f_l / (1 + |Df|^2)
  const Mat p = Mat::Identity(n, n) - jet.grad * jet.grad.transpose() / (1.0 + q);
  Mat ric(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) s += p(j, l) * (b(i, k) * b(j, l) - b(i, l) * b(j, k));
      ric(i, k) = -(n - 1) * forms.g(i, k) + s / (jet.f * jet.f * (1.0 + q));
    }
  return ric;
}

Mat ricci_from_shape(const ShapeSpectrum& spectrum, const FundamentalForms& forms, int n) {
  const Mat& s = spectrum.shape;
  const Mat op = -(n - 1) * Mat::Identity(n, n) + spectrum.mean * s - s * s;
  return symmetrized(forms.g * op);
}

GeneralizedEigen ricci_operator_spectrum(const Mat& ricci, const Mat& g) { return generalized_symmetric_eigen(ricci, g); }

double ricci_along_gradient(const Mat& ricci, const Jet2& jet) {
  const double df = jet.grad.norm();
  if (!(df > 0.0)) throw UndefinedDirectionError("Ricci along gradient: Df = 0");
  const Vec v = jet.f / (df * std::sqrt(1.0 + df * df)) * jet.grad;
  return v.dot(ricci * v);
}

double codazzi_residual(const HeightField& field, const Vec& x, double step) {
  if (!(step > 0.0)) throw ParameterError("codazzi_residual: step must be positive");
  const int n = field.dim();
  if (!field.evaluable(x)) throw DomainError("codazzi_residual: point outside the domain");
  const Jet2 jet = field.jet(x);
  const FundamentalForms forms = fundamental_forms(jet);
  const Mat second = shape_spectrum(jet, forms).second_form;
  const Christoffel gamma = christoffel_at(field, x, step);

  std::vector<Mat> d_second(n);
  for (int k = 0; k < n; ++k) {
    Vec e = Vec::Zero(n);
    e[k] = step;
    const Vec xp = x + e, xm = x - e;
    if (!field.evaluable(xp) || !field.evaluable(xm)) throw DomainError("codazzi_residual: stencil leaves the domain");
    const Jet2 jp = field.jet(xp), jm = field.jet(xm);
    d_second[k] = (shape_spectrum(jp, fundamental_forms(jp)).second_form - shape_spectrum(jm, fundamental_forms(jm)).second_form) / (2.0 * step);
  }
  // (nabla_i II)_jk = d_i II_jk - Gamma^l_ij II_lk - Gamma^l_ik II_jl
  auto cov = [&](int i, int j, int k) {
    double s = d_second[i](j, k);
    for (int l = 0; l < n; ++l) s -= gamma(l, i, j) * second(l, k) + gamma(l, i, k) * second(j, l);
    return s;
  };
  double residual = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) residual = std::max(residual, std::abs(cov(i, j, k) - cov(j, i, k)));
  return residual;
}

double gauss_residual(const HeightField& field, const Vec& x, double step) {
  if (!(step > 0.0)) throw ParameterError("gauss_residual: step must be positive");
  const int n = field.dim();
  if (!field.evaluable(x)) throw DomainError("gauss_residual: point outside the domain");
  const Jet2 jet = field.jet(x);
  const FundamentalForms forms = fundamental_forms(jet);
  const Mat& g = forms.g;
  const Mat second = shape_spectrum(jet, forms).second_form;
  const Christoffel gamma = christoffel_at(field, x, step);

  // dgamma[k] holds d_k Gamma
  std::vector<Christoffel> dgamma;
  dgamma.reserve(n);
  for (int k = 0; k < n; ++k) {
    Vec e = Vec::Zero(n);
    e[k] = step;
    const Christoffel gp = christoffel_at(field, x + e, step);
    const Christoffel gm = christoffel_at(field, x - e, step);
    Christoffel d{n, std::vector<double>(gp.data.size())};
    for (std::size_t a = 0; a < d.data.size(); ++a) d.data[a] = (gp.data[a] - gm.data[a]) / (2.0 * step);
    dgamma.push_back(std::move(d));
  }

  // R(d_i, d_j) d_l = R^m_{lij} d_m with
  // R^m_{lij} = d_i Gamma^m_jl - d_j Gamma^m_il + Gamma^m_ip Gamma^p_jl - Gamma^m_jp Gamma^p_il,
  // and R_ijkl = <R(d_i, d_j) d_l, d_k> so that R_ijij is the sectional numerator.
  auto riemann_up = [&](int m, int l, int i, int j) {
    double s = dgamma[i](m, j, l) - dgamma[j](m, i, l);
    for (int p = 0; p < n; ++p) s += gamma(m, i, p) * gamma(p, j, l) - gamma(m, j, p) * gamma(p, i, l);
    return s;
  };
  double residual = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double intrinsic = 0.0;
          for (int m = 0; m < n; ++m) intrinsic += g(k, m) * riemann_up(m, l, i, j);
          const double gauss = -(g(i, k) * g(j, l) - g(i, l) * g(j, k)) + second(i, k) * second(j, l) - second(i, l) * second(j, k);
          residual = std::max(residual, std::abs(intrinsic - gauss));
        }
  return residual;
}

PointAnalysis analyze_jet(const Jet2& jet) {
  PointAnalysis a;
  a.jet = jet;
  a.forms = fundamental_forms(jet);
  a.spectrum = shape_spectrum(jet, a.forms);
  a.ricci = ricci_coordinate(jet, a.forms);
  a.ricci_eigs = ricci_operator_spectrum(a.ricci, a.forms.g).values;
  return a;
}

}  // namespace hypercurv
