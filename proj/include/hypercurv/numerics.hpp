#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace hypercurv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Pairwise (cascade) summation in fixed index order; deterministic and
/// accurate to O(log N * eps) relative.
double pairwise_sum(std::span<const double> values);

/// Mean and population variance with pairwise accumulation.
struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
};
MeanVariance mean_variance(std::span<const double> values);

/// Solution of A v = lambda B v for symmetric A and symmetric positive
/// definite B, computed by Cholesky whitening. Eigenvalues ascend and the
/// eigenvectors are B-orthonormal (V^T B V = I).
struct GeneralizedEigen {
  Vec values;
  Mat vectors;
};
GeneralizedEigen generalized_symmetric_eigen(const Mat& a, const Mat& b);

/// Groups of (sorted ascending) eigenvalues whose consecutive relative gap
/// is below `relative_gap`.
struct EigenCluster {
  int first = 0;  // index of first member
  int size = 0;
  double mean = 0.0;
};
std::vector<EigenCluster> cluster_eigenvalues(const Vec& sorted_values, double relative_gap = 1e-6);

inline Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace hypercurv
