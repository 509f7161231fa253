#pragma once

// Linear Cox proportional-hazards regression.
//
// The partial likelihood is evaluated by sweeping distinct event times in
// decreasing order, so risk-set sums are running totals. Tied event times use
// the Efron correction by default: for the m deaths at one time the l-th term
// removes the fraction l/m of the dying subjects' weight from the risk set.
// Breslow is the same sweep with that fraction fixed at zero.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reprosurv/csv.hpp"
#include "reprosurv/error.hpp"
#include "reprosurv/ingest.hpp"
#include "reprosurv/stats.hpp"
#include "reprosurv/survival.hpp"

namespace reprosurv {

enum class Ties { efron, breslow };

struct CoxOptions {
  double ridge = 1e-3;  // L2 penalty on standardized coefficients
  double tol = 1e-7;    // gradient 2-norm at convergence
  int max_iter = 100;
  Ties ties = Ties::efron;
};

namespace detail {

// Per-term quantities of one tied event time: Efron denominator, weighted
// covariate mean of the (partially reduced) risk set and, on request, its
// weighted covariance.
struct TieStep {
  double denom = 0.0;
  double fraction = 0.0;  // l / m
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct EventBlock {
  double time = 0.0;
  std::vector<std::size_t> deaths;
  std::vector<TieStep> steps;
};

struct CoxSweep {
  std::vector<EventBlock> blocks;  // increasing time
  Eigen::VectorXd eta;
  std::vector<double> weight;  // exp(eta - shift)
  double shift = 0.0;
};

inline void check_inputs(const Eigen::MatrixXd& x, std::span<const double> durations, const std::vector<bool>& events,
                         const Eigen::VectorXd& beta) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (durations.size() != n || events.size() != n) throw ArgumentError("cox: row count mismatch");
  if (beta.size() != x.cols()) throw ArgumentError("cox: coefficient length does not match columns");
  if (!beta.allFinite()) throw NumericError("cox: non-finite coefficients");
}

inline CoxSweep cox_sweep(const Eigen::MatrixXd& x, std::span<const double> durations, const std::vector<bool>& events,
                          const Eigen::VectorXd& beta, Ties ties, bool with_cov) {
  check_inputs(x, durations, events, beta);
  const std::size_t n = durations.size();
  const Eigen::Index d = x.cols();

  CoxSweep sweep;
  sweep.eta = x * beta;
  sweep.shift = n ? sweep.eta.maxCoeff() : 0.0;
  sweep.weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sweep.weight[i] = std::exp(sweep.eta[static_cast<Eigen::Index>(i)] - sweep.shift);
    if (!std::isfinite(sweep.weight[i])) throw NumericError("cox: non-finite risk weight");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return durations[a] > durations[b]; });

  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd s2 = with_cov ? Eigen::MatrixXd::Zero(d, d) : Eigen::MatrixXd();

  for (std::size_t pos = 0; pos < n;) {
    const double t = durations[order[pos]];
    EventBlock block;
    block.time = t;
    double d0 = 0.0;
    Eigen::VectorXd d1 = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd d2 = with_cov ? Eigen::MatrixXd::Zero(d, d) : Eigen::MatrixXd();
    for (; pos < n && durations[order[pos]] == t; ++pos) {
      const std::size_t i = order[pos];
      const double w = sweep.weight[i];
      const auto xi = x.row(static_cast<Eigen::Index>(i)).transpose();
      s0 += w;
      s1.noalias() += w * xi;
      if (with_cov) s2.noalias() += w * xi * xi.transpose();
      if (events[i]) {
        block.deaths.push_back(i);
        d0 += w;
        d1.noalias() += w * xi;
        if (with_cov) d2.noalias() += w * xi * xi.transpose();
      }
    }
    if (block.deaths.empty()) continue;

    const std::size_t m = block.deaths.size();
    block.steps.resize(m);
    for (std::size_t l = 0; l < m; ++l) {
      TieStep& step = block.steps[l];
      step.fraction = ties == Ties::efron ? static_cast<double>(l) / static_cast<double>(m) : 0.0;
      step.denom = s0 - step.fraction * d0;
      if (!(step.denom > 0.0)) throw NumericError("cox: empty risk set denominator");
      step.mean = (s1 - step.fraction * d1) / step.denom;
      if (with_cov) {
        step.cov = (s2 - step.fraction * d2) / step.denom - step.mean * step.mean.transpose();
      }
    }
    sweep.blocks.push_back(std::move(block));
  }
  std::reverse(sweep.blocks.begin(), sweep.blocks.end());
  return sweep;
}

inline double sweep_loglik(const CoxSweep& sweep) {
  double ll = 0.0;
  for (const auto& block : sweep.blocks) {
    for (const std::size_t i : block.deaths) ll += sweep.eta[static_cast<Eigen::Index>(i)];
    for (const auto& step : block.steps) ll -= std::log(step.denom) + sweep.shift;
  }
  return ll;
}

inline Eigen::VectorXd sweep_gradient(const CoxSweep& sweep, const Eigen::MatrixXd& x) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.cols());
  for (const auto& block : sweep.blocks) {
    for (const std::size_t i : block.deaths) g += x.row(static_cast<Eigen::Index>(i)).transpose();
    for (const auto& step : block.steps) g -= step.mean;
  }
  return g;
}

/// Sum of the risk-set covariances, i.e. minus the log-likelihood Hessian.
inline Eigen::MatrixXd sweep_information(const CoxSweep& sweep, Eigen::Index d) {
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(d, d);
  for (const auto& block : sweep.blocks) {
    for (const auto& step : block.steps) info += step.cov;
  }
  return info;
}

/// Per-subject score residuals (rows); they sum to the gradient.
inline Eigen::MatrixXd sweep_score_residuals(const CoxSweep& sweep, const Eigen::MatrixXd& x,
                                             std::span<const double> durations) {
  const Eigen::Index n = x.rows(), d = x.cols();
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, d);

  // Cumulative hazard-style sums over event blocks with time <= t.
  const std::size_t nb = sweep.blocks.size();
  std::vector<double> block_time(nb);
  std::vector<double> h0(nb);
  std::vector<Eigen::VectorXd> h1(nb);
  double acc0 = 0.0;
  Eigen::VectorXd acc1 = Eigen::VectorXd::Zero(d);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& block = sweep.blocks[b];
    for (const auto& step : block.steps) {
      acc0 += 1.0 / step.denom;
      acc1 += step.mean / step.denom;
    }
    block_time[b] = block.time;
    h0[b] = acc0;
    h1[b] = acc1;
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto it = std::upper_bound(block_time.begin(), block_time.end(), durations[static_cast<std::size_t>(i)]);
    if (it == block_time.begin()) continue;
    const std::size_t b = static_cast<std::size_t>(it - block_time.begin()) - 1;
    const double w = sweep.weight[static_cast<std::size_t>(i)];
    u.row(i) = -w * (x.row(i) * h0[b] - h1[b].transpose());
  }

  for (const auto& block : sweep.blocks) {
    const double m = static_cast<double>(block.deaths.size());
    Eigen::VectorXd mean_bar = Eigen::VectorXd::Zero(d);
    for (const auto& step : block.steps) mean_bar += step.mean / m;
    for (const std::size_t i : block.deaths) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double w = sweep.weight[i];
      u.row(ii) += x.row(ii) - mean_bar.transpose();
      // A dying subject only carries weight (1 - l/m) into the l-th term.
      for (const auto& step : block.steps) {
        u.row(ii) += w * step.fraction * (x.row(ii) - step.mean.transpose()) / step.denom;
      }
    }
  }
  return u;
}

/// Column standardization used for optimization; constant columns keep scale 1.
struct Standardizer {
  Eigen::VectorXd center;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& x) {
    Standardizer s;
    const auto n = static_cast<double>(x.rows());
    s.center = x.colwise().mean().transpose();
    s.scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double var = (x.col(j).array() - s.center[j]).square().sum() / n;
      s.scale[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    return (x.rowwise() - center.transpose()).array().rowwise() / scale.transpose().array();
  }
};

}  // namespace detail

/// Log partial likelihood at `beta` (unpenalized).
inline double cox_partial_loglik(const Eigen::MatrixXd& x, std::span<const double> durations,
                                 const std::vector<bool>& events, const Eigen::VectorXd& beta,
                                 Ties ties = Ties::efron) {
  return detail::sweep_loglik(detail::cox_sweep(x, durations, events, beta, ties, false));
}

inline Eigen::VectorXd cox_gradient(const Eigen::MatrixXd& x, std::span<const double> durations,
                                    const std::vector<bool>& events, const Eigen::VectorXd& beta,
                                    Ties ties = Ties::efron) {
  return detail::sweep_gradient(detail::cox_sweep(x, durations, events, beta, ties, false), x);
}

/// Hessian of the log partial likelihood (negative semi-definite).
inline Eigen::MatrixXd cox_hessian(const Eigen::MatrixXd& x, std::span<const double> durations,
                                   const std::vector<bool>& events, const Eigen::VectorXd& beta,
                                   Ties ties = Ties::efron) {
  return -detail::sweep_information(detail::cox_sweep(x, durations, events, beta, ties, true), x.cols());
}

inline double cox_partial_loglik(const EncodedDataset& ds, const Eigen::VectorXd& beta, Ties ties = Ties::efron) {
  return cox_partial_loglik(ds.x, ds.durations, ds.events, beta, ties);
}
inline Eigen::VectorXd cox_gradient(const EncodedDataset& ds, const Eigen::VectorXd& beta, Ties ties = Ties::efron) {
  return cox_gradient(ds.x, ds.durations, ds.events, beta, ties);
}
inline Eigen::MatrixXd cox_hessian(const EncodedDataset& ds, const Eigen::VectorXd& beta, Ties ties = Ties::efron) {
  return cox_hessian(ds.x, ds.durations, ds.events, beta, ties);
}

/// Score test U' I^-1 U of beta = `beta` (1 df per column, unpenalized).
inline double cox_score_test(const EncodedDataset& ds, const Eigen::VectorXd& beta, Ties ties = Ties::efron) {
  const auto sweep = detail::cox_sweep(ds.x, ds.durations, ds.events, beta, ties, true);
  const Eigen::VectorXd u = detail::sweep_gradient(sweep, ds.x);
  const Eigen::MatrixXd info = detail::sweep_information(sweep, ds.x.cols());
  return u.dot(stats::symmetric_pinv(info) * u);
}

struct CoxFit {
  Eigen::VectorXd beta;  // per encoded column, original units
  Eigen::MatrixXd model_covariance;
  Eigen::MatrixXd robust_covariance;
  double log_partial_likelihood = 0.0;  // unpenalized, at the optimum
  std::vector<double> objective_trace;  // penalized objective per iterate
  int iterations = 0;
  double ridge = 0.0;
  Ties ties = Ties::efron;
  std::vector<std::string> columns;
  std::vector<ColumnGroup> groups;
  Eigen::VectorXd center;  // standardization applied during the fit
  Eigen::VectorXd scale;

  Eigen::VectorXd hazard_ratio() const { return beta.array().exp(); }
  Eigen::VectorXd model_se() const { return model_covariance.diagonal().cwiseMax(0.0).cwiseSqrt(); }
  Eigen::VectorXd robust_se() const { return robust_covariance.diagonal().cwiseMax(0.0).cwiseSqrt(); }

  /// Coefficients in the standardized space the fit was run in.
  Eigen::VectorXd standardized_beta() const { return beta.cwiseProduct(scale); }

  Eigen::VectorXd predict_margin(const Eigen::MatrixXd& rows) const {
    if (rows.cols() != beta.size()) throw ArgumentError("cox: row width does not match the model");
    return rows * beta;
  }
};

namespace detail {

inline Eigen::MatrixXd destandardize(const Eigen::MatrixXd& cov_z, const Eigen::VectorXd& scale) {
  const Eigen::VectorXd inv = scale.cwiseInverse();
  return inv.asDiagonal() * cov_z * inv.asDiagonal();
}

/// Inverse of a symmetric positive-definite matrix; throws when singular.
inline Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-14) {
    throw NumericError(std::string(what) + ": information matrix is singular; increase the ridge penalty");
  }
  return ldlt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

}  // namespace detail

/// Sandwich H^-1 (sum u_i u_i') H^-1 from per-subject score residuals.
inline Eigen::MatrixXd robust_covariance(const EncodedDataset& ds, const CoxFit& fit) {
  const Eigen::MatrixXd z = detail::Standardizer{fit.center, fit.scale}.apply(ds.x);
  const Eigen::VectorXd gamma = fit.standardized_beta();
  const auto sweep = detail::cox_sweep(z, ds.durations, ds.events, gamma, fit.ties, true);
  const Eigen::MatrixXd info = detail::sweep_information(sweep, z.cols()) +
                               fit.ridge * Eigen::MatrixXd::Identity(z.cols(), z.cols());
  const Eigen::MatrixXd inv = detail::spd_inverse(info, "robust_covariance");
  const Eigen::MatrixXd u = detail::sweep_score_residuals(sweep, z, ds.durations);
  const Eigen::MatrixXd meat = u.transpose() * u;
  const Eigen::MatrixXd cov_z = inv * meat * inv;
  return detail::destandardize(0.5 * (cov_z + cov_z.transpose()), fit.scale);
}

/// Ridge-penalized Cox regression by Newton-Raphson with step halving,
/// started at zero on internally standardized columns.
inline CoxFit fit_cox(const EncodedDataset& ds, const CoxOptions& options = {}) {
  if (ds.rows() < 2) throw ModelError("fit_cox: need at least two subjects");
  if (ds.event_count() == 0) throw ModelError("fit_cox: no events in the data");
  if (options.ridge < 0.0 || !(options.tol > 0.0) || options.max_iter < 1) {
    throw ArgumentError("fit_cox: invalid options");
  }
  const Eigen::Index d = ds.x.cols();
  const auto standardizer = detail::Standardizer::fit(ds.x);
  const Eigen::MatrixXd z = standardizer.apply(ds.x);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);

  auto objective = [&](const Eigen::VectorXd& g) {
    return cox_partial_loglik(z, ds.durations, ds.events, g, options.ties) - 0.5 * options.ridge * g.squaredNorm();
  };

  CoxFit fit;
  fit.ridge = options.ridge;
  fit.ties = options.ties;
  fit.columns = ds.columns;
  fit.groups = ds.groups;
  fit.center = standardizer.center;
  fit.scale = standardizer.scale;

  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(d);
  double current = objective(gamma);
  fit.objective_trace.push_back(current);
  bool converged = false;

  for (int iter = 0; iter <= options.max_iter; ++iter) {
    const auto sweep = detail::cox_sweep(z, ds.durations, ds.events, gamma, options.ties, true);
    const Eigen::VectorXd grad = detail::sweep_gradient(sweep, z) - options.ridge * gamma;
    fit.iterations = iter;
    if (grad.norm() <= options.tol) {
      converged = true;
      break;
    }
    if (iter == options.max_iter) break;

    Eigen::MatrixXd info = detail::sweep_information(sweep, d) + options.ridge * eye;
    Eigen::VectorXd step;
    for (double damping = 0.0;; damping = damping == 0.0 ? 1e-10 * (1.0 + info.trace()) : damping * 10.0) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(info + damping * eye);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        step = ldlt.solve(grad);
        if (step.allFinite() && step.dot(grad) > 0.0) break;
      }
      if (damping > 1e12) throw NumericError("fit_cox: cannot form a Newton step");
    }

    // Near the optimum the change in objective drops below rounding error, so
    // ascent is judged with a small relative slack.
    const double slack = 1e-12 * (1.0 + std::abs(current));
    double scale = 1.0;
    Eigen::VectorXd candidate = gamma + step;
    double value = objective(candidate);
    int halvings = 0;
    while (!(value >= current - slack) && halvings < 40) {
      scale *= 0.5;
      candidate = gamma + scale * step;
      value = objective(candidate);
      ++halvings;
    }
    if (!(value >= current - slack)) {
      // No ascent along the Newton direction: either at the optimum to
      // machine precision or stuck.
      if (grad.norm() <= std::sqrt(options.tol)) {
        converged = true;
        break;
      }
      std::vector<double> last(gamma.data(), gamma.data() + gamma.size());
      throw ConvergenceError("fit_cox: step halving exhausted with gradient norm " + std::to_string(grad.norm()),
                             std::move(last));
    }
    gamma = candidate;
    current = value;
    fit.objective_trace.push_back(current);
  }
  if (!converged) {
    Eigen::VectorXd beta = gamma.cwiseQuotient(standardizer.scale);
    throw ConvergenceError("fit_cox: no convergence after " + std::to_string(options.max_iter) +
                               " iterations; increase the ridge penalty",
                           std::vector<double>(beta.data(), beta.data() + beta.size()));
  }

  // A monotone likelihood (e.g. perfect separation) lets the gradient vanish
  // only as a coefficient runs off; e^20 per standard deviation is that case.
  for (Eigen::Index j = 0; j < d; ++j) {
    if (std::abs(gamma[j]) > 20.0) {
      const Eigen::VectorXd beta = gamma.cwiseQuotient(standardizer.scale);
      const auto k = static_cast<std::size_t>(j);
      const std::string name = k < ds.columns.size() ? ds.columns[k] : std::to_string(k);
      throw ConvergenceError("fit_cox: coefficient of '" + name +
                                 "' diverges (monotone likelihood); increase the ridge penalty",
                             std::vector<double>(beta.data(), beta.data() + beta.size()));
    }
  }
  fit.beta = gamma.cwiseQuotient(standardizer.scale);
  if (!fit.hazard_ratio().allFinite()) throw NumericError("fit_cox: hazard ratio overflow");
  fit.log_partial_likelihood = cox_partial_loglik(z, ds.durations, ds.events, gamma, options.ties);

  const auto sweep = detail::cox_sweep(z, ds.durations, ds.events, gamma, options.ties, true);
  const Eigen::MatrixXd info = detail::sweep_information(sweep, d) + options.ridge * eye;
  fit.model_covariance = detail::destandardize(detail::spd_inverse(info, "fit_cox"), standardizer.scale);
  fit.robust_covariance = robust_covariance(ds, fit);
  return fit;
}

/// Joint Wald test of one source feature.
struct FeatureTest {
  std::string feature;
  std::size_t df = 0;
  double statistic = 0.0;
  std::optional<double> p_value;  // empty when the standard error is zero
};

/// Wald tests per column group. A one-hot group is tested through the
/// contrasts of its categories against the last one: with every row holding
/// exactly one active category, adding a constant to all of its coefficients
/// leaves the model unchanged, so only the contrasts are identified.
inline std::vector<FeatureTest> grouped_wald(const Eigen::VectorXd& beta, const Eigen::MatrixXd& cov,
                                             const std::vector<ColumnGroup>& groups,
                                             const std::vector<std::string>& columns = {}) {
  std::vector<ColumnGroup> effective = groups;
  if (effective.empty()) {
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      effective.push_back({j < static_cast<Eigen::Index>(columns.size()) ? columns[static_cast<std::size_t>(j)]
                                                                          : "x" + std::to_string(j),
                           EncodingKind::numeric, static_cast<std::size_t>(j), 1, {}});
    }
  }
  std::vector<FeatureTest> out;
  for (const auto& group : effective) {
    FeatureTest test;
    test.feature = group.feature;
    const auto first = static_cast<Eigen::Index>(group.first);
    const auto k = static_cast<Eigen::Index>(group.count);
    const Eigen::VectorXd b = beta.segment(first, k);
    const Eigen::MatrixXd v = cov.block(first, first, k, k);

    Eigen::MatrixXd contrast;
    if (group.kind == EncodingKind::one_hot && k > 1) {
      contrast = Eigen::MatrixXd::Zero(k - 1, k);
      contrast.leftCols(k - 1).setIdentity();
      contrast.col(k - 1).setConstant(-1.0);
    } else {
      contrast = Eigen::MatrixXd::Identity(k, k);
    }
    const Eigen::VectorXd lb = contrast * b;
    const Eigen::MatrixXd lv = contrast * v * contrast.transpose();
    int rank = 0;
    const Eigen::MatrixXd inv = stats::symmetric_pinv(lv, &rank);
    test.df = static_cast<std::size_t>(rank);
    if (rank == 0) {
      test.statistic = std::numeric_limits<double>::quiet_NaN();
    } else {
      test.statistic = lb.dot(inv * lb);
      test.p_value = stats::chi_square_sf(test.statistic, rank);
    }
    out.push_back(std::move(test));
  }
  return out;
}

inline std::vector<FeatureTest> wald_pvalues(const CoxFit& fit, bool use_robust = true) {
  return grouped_wald(fit.beta, use_robust ? fit.robust_covariance : fit.model_covariance, fit.groups, fit.columns);
}

/// Schoenfeld residuals, one row per death in increasing time order.
struct SchoenfeldResiduals {
  std::vector<double> times;
  std::vector<std::size_t> subjects;
  Eigen::MatrixXd unscaled;  // deaths x d, original units
  Eigen::MatrixXd scaled;    // beta + deaths * V r, V the model covariance

  csv::Table to_table(std::size_t column) const {
    csv::Table table;
    table.header = {"time", "subject", "residual", "scaled_residual"};
    const auto c = static_cast<Eigen::Index>(column);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      table.rows.push_back({csv::format_number(times[k]), std::to_string(subjects[k]),
                            csv::format_number(unscaled(kk, c)), csv::format_number(scaled(kk, c))});
    }
    return table;
  }
};

inline SchoenfeldResiduals schoenfeld_residuals(const EncodedDataset& ds, const CoxFit& fit) {
  const auto sweep = detail::cox_sweep(ds.x, ds.durations, ds.events, fit.beta, fit.ties, false);
  SchoenfeldResiduals out;
  const Eigen::Index d = ds.x.cols();
  std::size_t total = 0;
  for (const auto& block : sweep.blocks) total += block.deaths.size();
  out.unscaled.resize(static_cast<Eigen::Index>(total), d);
  Eigen::Index row = 0;
  for (const auto& block : sweep.blocks) {
    Eigen::VectorXd mean_bar = Eigen::VectorXd::Zero(d);
    for (const auto& step : block.steps) mean_bar += step.mean / static_cast<double>(block.deaths.size());
    for (const std::size_t i : block.deaths) {
      out.times.push_back(block.time);
      out.subjects.push_back(i);
      out.unscaled.row(row++) = ds.x.row(static_cast<Eigen::Index>(i)) - mean_bar.transpose();
    }
  }
  out.scaled = (static_cast<double>(total) * out.unscaled * fit.model_covariance).rowwise() + fit.beta.transpose();
  return out;
}

enum class TimeTransform { km, rank };

inline std::string_view to_string(TimeTransform t) { return t == TimeTransform::km ? "km" : "rank"; }

struct PhTestEntry {
  std::string column;
  TimeTransform transform = TimeTransform::km;
  double statistic = 0.0;
  double p_value = 1.0;
};

struct PhTestResult {
  std::vector<PhTestEntry> entries;
};

/// Proportional-hazards check per column: score test for adding x_k * g(t)
/// to the fitted model, where g is the centered time transform (1 - KM(t) or
/// the rank of the event time). The variance is the efficient information
/// I_gg - I_gb I_bb^-1 I_bg built from the risk-set covariances, so the test
/// needs no approximation of those covariances by their average.
inline PhTestResult ph_assumption_test(const EncodedDataset& ds, const CoxFit& fit, TimeTransform transform) {
  if (ds.event_count() < 2) throw ModelError("ph_assumption_test: need at least two events");
  const Eigen::Index d = ds.x.cols();
  const Eigen::MatrixXd z = detail::Standardizer{fit.center, fit.scale}.apply(ds.x);
  const auto sweep = detail::cox_sweep(z, ds.durations, ds.events, fit.standardized_beta(), fit.ties, true);

  // g at each event block.
  const std::size_t nb = sweep.blocks.size();
  std::vector<double> g(nb);
  if (transform == TimeTransform::km) {
    const auto curve = kaplan_meier(make_samples(ds.durations, ds.events));
    for (std::size_t b = 0; b < nb; ++b) g[b] = 1.0 - curve.at(sweep.blocks[b].time);
  } else {
    std::vector<double> death_times;
    for (const auto& block : sweep.blocks) {
      for (std::size_t k = 0; k < block.deaths.size(); ++k) death_times.push_back(block.time);
    }
    const auto ranks = stats::average_ranks(death_times);
    std::size_t k = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      g[b] = ranks[k];
      k += sweep.blocks[b].deaths.size();
    }
  }
  double g_mean = 0.0, deaths = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    g_mean += g[b] * static_cast<double>(sweep.blocks[b].deaths.size());
    deaths += static_cast<double>(sweep.blocks[b].deaths.size());
  }
  g_mean /= deaths;

  Eigen::MatrixXd i_bb = fit.ridge * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd i_bg = Eigen::MatrixXd::Zero(d, d);  // column k: I_b,gk
  Eigen::VectorXd i_gg = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd score = Eigen::VectorXd::Zero(d);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& block = sweep.blocks[b];
    const double gc = g[b] - g_mean;
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd mean_bar = Eigen::VectorXd::Zero(d);
    for (const auto& step : block.steps) {
      info += step.cov;
      mean_bar += step.mean / static_cast<double>(block.deaths.size());
    }
    i_bb += info;
    i_bg += gc * info;
    i_gg += gc * gc * info.diagonal();
    for (const std::size_t i : block.deaths) {
      score += gc * (z.row(static_cast<Eigen::Index>(i)).transpose() - mean_bar);
    }
  }

  const Eigen::MatrixXd i_bb_inv = detail::spd_inverse(i_bb, "ph_assumption_test");
  PhTestResult result;
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::VectorXd cross = i_bg.col(k);
    const double variance = i_gg[k] - cross.dot(i_bb_inv * cross);
    PhTestEntry entry;
    entry.column = k < static_cast<Eigen::Index>(ds.columns.size()) ? ds.columns[static_cast<std::size_t>(k)]
                                                                     : "x" + std::to_string(k);
    entry.transform = transform;
    if (variance > 1e-12 * std::max(1.0, i_gg[k])) {
      entry.statistic = score[k] * score[k] / variance;
      entry.p_value = stats::chi_square_sf(entry.statistic, 1.0);
    }
    result.entries.push_back(std::move(entry));
  }
  return result;
}

/// Coefficient table: feature, beta, exp(beta), standard error.
inline csv::Table coefficient_table(const CoxFit& fit, bool use_robust = true) {
  csv::Table table;
  table.header = {"feature", "beta", "exp_beta", "std_err", "model_std_err", "robust_std_err", "ridge"};
  const Eigen::VectorXd model = fit.model_se();
  const Eigen::VectorXd robust = fit.robust_se();
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
    table.rows.push_back({fit.columns.at(static_cast<std::size_t>(j)), csv::format_number(fit.beta[j]),
                          csv::format_number(std::exp(fit.beta[j])),
                          csv::format_number(use_robust ? robust[j] : model[j]), csv::format_number(model[j]),
                          csv::format_number(robust[j]), csv::format_number(fit.ridge)});
  }
  return table;
}

}  // namespace reprosurv
