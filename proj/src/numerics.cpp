#include "hypercurv/numerics.hpp"

#include "hypercurv/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hypercurv {

namespace {

double cascade(const double* data, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += data[i];
    return s;
  }
  const std::size_t half = count / 2;
  return cascade(data, half) + cascade(data + half, count - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return cascade(values.data(), values.size()); }

MeanVariance mean_variance(std::span<const double> values) {
  MeanVariance out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / n;
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(), [&](double v) { return (v - out.mean) * (v - out.mean); });
  out.variance = pairwise_sum(sq) / n;
  return out;
}

GeneralizedEigen generalized_symmetric_eigen(const Mat& a, const Mat& b) {
  const Eigen::LLT<Mat> llt(symmetrized(b));
  if (llt.info() != Eigen::Success) throw NumericError("generalized eigensolve: metric is not positive definite");
  // C = L^{-1} A L^{-T}
  const Mat tmp = llt.matrixL().solve(symmetrized(a));
  const Mat c = symmetrized(llt.matrixL().solve(tmp.transpose()));
  const Eigen::SelfAdjointEigenSolver<Mat> es(c);
  if (es.info() != Eigen::Success) throw NumericError("generalized eigensolve: symmetric eigensolver failed");
  GeneralizedEigen out;
  out.values = es.eigenvalues();
  out.vectors = llt.matrixU().solve(es.eigenvectors());
  return out;
}

std::vector<EigenCluster> cluster_eigenvalues(const Vec& sorted_values, double relative_gap) {
  std::vector<EigenCluster> clusters;
  const int n = static_cast<int>(sorted_values.size());
  int start = 0;
  auto close = [&](int first, int size) {
    EigenCluster c;
    c.first = first;
    c.size = size;
    c.mean = sorted_values.segment(first, size).sum() / size;
    clusters.push_back(c);
  };
  for (int i = 1; i <= n; ++i) {
    if (i == n) {
      if (n > 0) close(start, n - start);
      break;
    }
    const double lo = sorted_values[i - 1];
    const double hi = sorted_values[i];
    const double scale = std::max(std::abs(lo), std::abs(hi));
    if (hi - lo > relative_gap * scale) {
      close(start, i - start);
      start = i;
    }
  }
  return clusters;
}

}  // namespace hypercurv
