#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

namespace reprosurv::stats {

/// Upper tail P(X > x) of a chi-square with `df` degrees of freedom.
inline double chi_square_sf(double x, double df) {
  if (!(x > 0.0)) return 1.0;
  if (!std::isfinite(x)) return 0.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

/// Symmetric pseudo-inverse; returns the numerical rank through `rank`.
inline Eigen::MatrixXd symmetric_pinv(const Eigen::MatrixXd& m, int* rank = nullptr,
                                      double rel_tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double largest = values.cwiseAbs().maxCoeff();
  Eigen::VectorXd inverted = Eigen::VectorXd::Zero(values.size());
  int r = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > rel_tol * largest && values[i] > 0.0) {
      inverted[i] = 1.0 / values[i];
      ++r;
    }
  }
  if (rank) *rank = r;
  return eig.eigenvectors() * inverted.asDiagonal() * eig.eigenvectors().transpose();
}

/// Average ranks (1-based) with ties sharing the mean rank.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return std::nan("");
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace reprosurv::stats
