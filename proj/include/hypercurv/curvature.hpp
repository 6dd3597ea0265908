#pragma once

#include "hypercurv/height_field.hpp"
#include "hypercurv/numerics.hpp"

namespace hypercurv {

/// First-order data of the graph in the upper half-space model.
struct FundamentalForms {
  Mat g;                      // f^-2 (delta_ij + f_i f_j)
  Mat g_inv;                  // f^2 (delta_ij - f_i f_j / (1 + |Df|^2))
  double grad_norm_sq = 0.0;  // |Df|^2
  Vec normal;                 // upward unit normal, Euclidean length f
};

FundamentalForms fundamental_forms(const Jet2& jet);

struct ShapeSpectrum {
  Mat second_form;  // II_ij
  Mat shape;        // S = g^-1 II
  Vec kappas;       // ascending
  double mean = 0.0;              // trace(S)
  double mean_closed_form = 0.0;  // (n + f Lap f - f H1 / (1+|Df|^2)) / sqrt(1+|Df|^2)
  Mat frame;                      // g-orthonormal principal directions (columns)
};

/// Principal curvatures are the generalized eigenvalues of (II, g), taken
/// with the upward normal so that convex catalog surfaces have kappa > 0.
ShapeSpectrum shape_spectrum(const Jet2& jet, const FundamentalForms& forms);

/// Ricci tensor from the coordinate double-contraction formula in f, Df, D^2 f.
Mat ricci_coordinate(const Jet2& jet, const FundamentalForms& forms);

/// Ricci tensor through the Gauss equation: g (-(n-1) I + H S - S^2).
Mat ricci_from_shape(const ShapeSpectrum& spectrum, const FundamentalForms& forms, int n);

/// Eigenvalues of the Ricci operator g^-1 Ric (ascending) with g-orthonormal
/// eigenvectors.
GeneralizedEigen ricci_operator_spectrum(const Mat& ricci, const Mat& g);

/// Ric(v, v) for v the g-normalized g-gradient of f. Requires Df != 0.
double ricci_along_gradient(const Mat& ricci, const Jet2& jet);

/// max_{i,j,k} |(nabla_i II)_jk - (nabla_j II)_ik| with Christoffel symbols
/// and derivatives of II taken by central differences of step `step`.
double codazzi_residual(const HeightField& field, const Vec& x, double step);

/// max_{ijkl} |R_ijkl - (-(g_ik g_jl - g_il g_jk) + II_ik II_jl - II_il II_jk)|
/// with R the intrinsic Riemann tensor of g from finite-differenced
/// Christoffel symbols.
double gauss_residual(const HeightField& field, const Vec& x, double step);

/// Everything the point report needs, computed once.
struct PointAnalysis {
  Jet2 jet;
  FundamentalForms forms;
  ShapeSpectrum spectrum;
  Mat ricci;
  Vec ricci_eigs;
};
PointAnalysis analyze_jet(const Jet2& jet);

}  // namespace hypercurv
