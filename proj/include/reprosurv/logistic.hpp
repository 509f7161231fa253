#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reprosurv/cox.hpp"
#include "reprosurv/error.hpp"
#include "reprosurv/ingest.hpp"

namespace reprosurv {

struct LogisticOptions {
  double ridge = 1e-3;  // on standardized columns; the intercept is not penalized
  double tol = 1e-7;
  int max_iter = 100;
};

struct LogisticFit {
  double intercept = 0.0;
  Eigen::VectorXd beta;  // original units
  Eigen::MatrixXd covariance;
  std::vector<FeatureTest> tests;
  int iterations = 0;
  double ridge = 0.0;
};

/// Ridge logistic regression of the event flag on the encoded columns, with
/// per-feature Wald tests from the model-based covariance.
inline LogisticFit fit_logistic(const EncodedDataset& ds, const LogisticOptions& options = {}) {
  const std::size_t positives = ds.event_count();
  if (positives == 0 || positives == ds.rows()) throw ModelError("fit_logistic: both classes must be present");

  const auto standardizer = detail::Standardizer::fit(ds.x);
  const Eigen::Index n = ds.x.rows(), d = ds.x.cols();
  Eigen::MatrixXd design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = standardizer.apply(ds.x);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = ds.events[static_cast<std::size_t>(i)] ? 1.0 : 0.0;

  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, options.ridge);
  penalty[0] = 0.0;

  auto objective = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd eta = design * w;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // log(1 + exp(eta)) without overflow
      const double softplus = eta[i] > 0 ? eta[i] + std::log1p(std::exp(-eta[i])) : std::log1p(std::exp(eta[i]));
      ll += y[i] * eta[i] - softplus;
    }
    return ll - 0.5 * w.dot(penalty.cwiseProduct(w));
  };
  auto information = [&](const Eigen::VectorXd& w) {
    const Eigen::ArrayXd prob = 1.0 / (1.0 + (-(design * w).array()).exp());
    const Eigen::VectorXd weight = (prob * (1.0 - prob)).matrix();
    Eigen::MatrixXd info = design.transpose() * weight.asDiagonal() * design;
    info.diagonal() += penalty;
    return std::pair<Eigen::MatrixXd, Eigen::VectorXd>(info, prob.matrix());
  };

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  double current = objective(w);
  LogisticFit fit;
  fit.ridge = options.ridge;
  bool converged = false;
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    const auto [info, prob] = information(w);
    const Eigen::VectorXd grad = design.transpose() * (y - prob) - penalty.cwiseProduct(w);
    fit.iterations = iter;
    if (grad.norm() <= options.tol) {
      converged = true;
      break;
    }
    if (iter == options.max_iter) break;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info + 1e-12 * Eigen::MatrixXd::Identity(d + 1, d + 1));
    const Eigen::VectorXd step = ldlt.solve(grad);
    const double slack = 1e-12 * (1.0 + std::abs(current));  // rounding near the optimum
    double scale = 1.0;
    Eigen::VectorXd candidate = w + step;
    double value = objective(candidate);
    for (int h = 0; h < 40 && !(value >= current - slack); ++h) {
      scale *= 0.5;
      candidate = w + scale * step;
      value = objective(candidate);
    }
    if (!(value >= current - slack)) {
      if (grad.norm() <= std::sqrt(options.tol)) {
        converged = true;
        break;
      }
      throw ConvergenceError("fit_logistic: step halving exhausted",
                             std::vector<double>(w.data(), w.data() + w.size()));
    }
    w = candidate;
    current = value;
  }
  if (!converged) {
    throw ConvergenceError("fit_logistic: no convergence; increase the ridge penalty",
                           std::vector<double>(w.data(), w.data() + w.size()));
  }

  const Eigen::MatrixXd cov_w = detail::spd_inverse(information(w).first, "fit_logistic");
  // Map (intercept, standardized slopes) back to original units.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(d + 1, d + 1);
  jac(0, 0) = 1.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    jac(j + 1, j + 1) = 1.0 / standardizer.scale[j];
    jac(0, j + 1) = -standardizer.center[j] / standardizer.scale[j];
  }
  const Eigen::VectorXd original = jac * w;
  const Eigen::MatrixXd cov = jac * cov_w * jac.transpose();
  fit.intercept = original[0];
  fit.beta = original.tail(d);
  fit.covariance = cov.bottomRightCorner(d, d);
  fit.tests = grouped_wald(fit.beta, fit.covariance, ds.groups, ds.columns);
  return fit;
}

}  // namespace reprosurv
