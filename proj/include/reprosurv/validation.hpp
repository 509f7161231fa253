#pragma once

// k-fold cross-validated concordance and seeded random search over the
// boosted-model hyperparameters.

#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reprosurv/boosted.hpp"
#include "reprosurv/cox.hpp"
#include "reprosurv/csv.hpp"
#include "reprosurv/error.hpp"
#include "reprosurv/ingest.hpp"
#include "reprosurv/rng.hpp"
#include "reprosurv/survival.hpp"

namespace reprosurv {

struct FoldScore {
  std::size_t fold = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  double concordance = 0.5;
  bool skipped = false;
  std::string note;
};

struct CvResult {
  std::vector<FoldScore> folds;
  double mean = 0.5;  // over evaluated folds

  std::size_t skipped() const {
    return static_cast<std::size_t>(std::count_if(folds.begin(), folds.end(), [](const FoldScore& f) { return f.skipped; }));
  }

  csv::Table to_table() const {
    csv::Table table;
    table.header = {"fold", "train_rows", "test_rows", "concordance", "skipped", "note"};
    for (const auto& f : folds) {
      table.rows.push_back({std::to_string(f.fold), std::to_string(f.train_rows), std::to_string(f.test_rows),
                            f.skipped ? "" : csv::format_number(f.concordance), f.skipped ? "1" : "0", f.note});
    }
    table.rows.push_back({"mean", "", "", csv::format_number(mean), "", ""});
    return table;
  }
};

/// Trains on each training split and returns held-out risk scores
/// (higher = shorter expected time).
using FitAndScore = std::function<Eigen::VectorXd(const EncodedDataset& train, const Eigen::MatrixXd& test_rows)>;

/// Seeded shuffle into k contiguous folds; concordance on each held-out fold
/// with the signed-label convention. Folds whose training split has no event,
/// or whose held-out split has no comparable pair, are skipped and reported.
inline CvResult cross_validate(const EncodedDataset& ds, std::size_t k, std::uint64_t seed, const FitAndScore& model) {
  if (k < 2) throw ArgumentError("cross_validate: need at least 2 folds");
  if (ds.rows() < k) throw ArgumentError("cross_validate: fewer rows than folds");

  std::vector<std::size_t> perm(ds.rows());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);

  CvResult result;
  double total = 0.0;
  std::size_t evaluated = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t lo = f * ds.rows() / k, hi = (f + 1) * ds.rows() / k;
    std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(lo), perm.begin() + static_cast<std::ptrdiff_t>(hi));
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(lo));
    train.insert(train.end(), perm.begin() + static_cast<std::ptrdiff_t>(hi), perm.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());

    FoldScore score;
    score.fold = f;
    score.train_rows = train.size();
    score.test_rows = test.size();
    const EncodedDataset train_ds = ds.subset(train);
    const EncodedDataset test_ds = ds.subset(test);
    if (train_ds.event_count() == 0) {
      score.skipped = true;
      score.note = "training split has no events";
    } else {
      const Eigen::VectorXd risk = model(train_ds, test_ds.x);
      const auto labels = test_ds.signed_labels();
      const auto counts = concordance_counts(std::span<const double>(risk.data(), static_cast<std::size_t>(risk.size())), labels);
      if (counts.concordant + counts.discordant + counts.tied == 0) {
        score.skipped = true;
        score.note = "held-out split has no comparable pair";
      } else {
        score.concordance = counts.index();
        total += score.concordance;
        ++evaluated;
      }
    }
    result.folds.push_back(std::move(score));
  }
  result.mean = evaluated ? total / static_cast<double>(evaluated) : 0.5;
  return result;
}

inline CvResult cross_validate(const EncodedDataset& ds, const BoostConfig& config, std::size_t k, std::uint64_t seed) {
  return cross_validate(ds, k, seed, [&](const EncodedDataset& train, const Eigen::MatrixXd& rows) {
    return predict_margin(fit_boosted(train, config), rows);
  });
}

inline CvResult cross_validate(const EncodedDataset& ds, const CoxOptions& options, std::size_t k, std::uint64_t seed) {
  return cross_validate(ds, k, seed, [&](const EncodedDataset& train, const Eigen::MatrixXd& rows) {
    return fit_cox(train, options).predict_margin(rows);
  });
}

/// Ranges of the random search.
struct SearchSpace {
  int depth_min = 3, depth_max = 10;
  double eta_min = 0.003, eta_max = 0.5;  // log-uniform
  double subsample_min = 0.2, subsample_max = 0.7;
  int rounds_min = 10, rounds_max = 300;
  double colsample_bytree_min = 0.3, colsample_bytree_max = 1.0;
  double colsample_bylevel_min = 0.5, colsample_bylevel_max = 1.0;
  double lambda_min = 0.1, lambda_max = 2.0;

  /// Trial `t` depends only on (seed, t), so a larger budget extends the
  /// same sequence of configurations.
  BoostConfig sample(std::uint64_t seed, std::size_t trial) const {
    Rng rng = Rng::derive(seed, trial);
    BoostConfig c;
    c.max_depth = static_cast<int>(rng.uniform_int(depth_min, depth_max));
    c.eta = rng.log_uniform(eta_min, eta_max);
    c.subsample = rng.uniform(subsample_min, subsample_max);
    c.rounds = static_cast<int>(rng.uniform_int(rounds_min, rounds_max));
    c.colsample_bytree = rng.uniform(colsample_bytree_min, colsample_bytree_max);
    c.colsample_bylevel = rng.uniform(colsample_bylevel_min, colsample_bylevel_max);
    c.lambda = rng.uniform(lambda_min, lambda_max);
    c.seed = seed;
    return c;
  }
};

struct Trial {
  std::size_t index = 0;
  BoostConfig config;
  double score = 0.0;
  double best_so_far = 0.0;
};

struct SearchResult {
  BoostConfig best;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<Trial> trials;

  csv::Table to_table() const {
    csv::Table table;
    table.header = {"trial", "max_depth", "eta", "subsample", "rounds", "colsample_bytree", "colsample_bylevel",
                    "lambda", "cv_concordance", "best_so_far"};
    for (const auto& t : trials) {
      const auto& c = t.config;
      table.rows.push_back({std::to_string(t.index), std::to_string(c.max_depth), csv::format_number(c.eta),
                            csv::format_number(c.subsample), std::to_string(c.rounds),
                            csv::format_number(c.colsample_bytree), csv::format_number(c.colsample_bylevel),
                            csv::format_number(c.lambda), csv::format_number(t.score),
                            csv::format_number(t.best_so_far)});
    }
    return table;
  }
};

/// Random search maximizing mean k-fold concordance. Every trial is scored on
/// the same folds (`cv_seed`); the first trial wins ties.
inline SearchResult hyperparameter_search(const EncodedDataset& ds, std::size_t budget, std::uint64_t seed,
                                          std::size_t folds = 10, std::uint64_t cv_seed = 42,
                                          const SearchSpace& space = {}) {
  if (budget < 1) throw ArgumentError("hyperparameter_search: budget must be at least 1");
  SearchResult result;
  for (std::size_t t = 0; t < budget; ++t) {
    Trial trial;
    trial.index = t;
    trial.config = space.sample(seed, t);
    trial.score = cross_validate(ds, trial.config, folds, cv_seed).mean;
    if (trial.score > result.best_score) {
      result.best_score = trial.score;
      result.best = trial.config;
    }
    trial.best_so_far = result.best_score;
    result.trials.push_back(trial);
  }
  return result;
}

}  // namespace reprosurv
