#pragma once

// Gradient-boosted regression trees on the Cox partial likelihood. Each round
// fits one tree to the per-subject first and second derivatives of the
// negative log partial likelihood with respect to the current margins.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "reprosurv/error.hpp"
#include "reprosurv/ingest.hpp"
#include "reprosurv/rng.hpp"

namespace reprosurv {

struct BoostConfig {
  double eta = 0.3;
  int max_depth = 6;
  double subsample = 1.0;
  double colsample_bytree = 1.0;
  double colsample_bylevel = 1.0;
  double lambda = 1.0;  // L2 penalty on leaf weights
  int rounds = 10;
  std::uint64_t seed = 0;
  double min_child_hessian = 1e-6;

  void validate() const {
    auto unit = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!unit(eta)) throw ConfigError("boost: eta must lie in (0, 1]");
    if (!unit(subsample) || !unit(colsample_bytree) || !unit(colsample_bylevel)) {
      throw ConfigError("boost: subsample and colsample ratios must lie in (0, 1]");
    }
    if (max_depth < 0) throw ConfigError("boost: max_depth must be non-negative");
    if (rounds < 1) throw ConfigError("boost: rounds must be at least 1");
    if (lambda < 0.0 || min_child_hessian < 0.0) throw ConfigError("boost: lambda must be non-negative");
  }

  /// Tuned configuration reported for the study data (120 rounds).
  static BoostConfig tuned_preset() {
    BoostConfig c;
    c.eta = 0.02126844892731846;
    c.max_depth = 8;
    c.subsample = 0.20210001379297854;
    c.colsample_bytree = 0.37002203782589316;
    c.colsample_bylevel = 0.7085528974300124;
    c.lambda = 1.497998138207469;
    c.rounds = 120;
    c.seed = 42;
    return c;
  }
};

inline nlohmann::json to_json(const BoostConfig& c) {
  return {{"eta", c.eta},
          {"max_depth", c.max_depth},
          {"subsample", c.subsample},
          {"colsample_bytree", c.colsample_bytree},
          {"colsample_bylevel", c.colsample_bylevel},
          {"lambda", c.lambda},
          {"rounds", c.rounds},
          {"seed", c.seed},
          {"min_child_hessian", c.min_child_hessian}};
}

inline BoostConfig boost_config_from_json(const nlohmann::json& j) {
  BoostConfig c;
  c.eta = j.at("eta").get<double>();
  c.max_depth = j.at("max_depth").get<int>();
  c.subsample = j.at("subsample").get<double>();
  c.colsample_bytree = j.at("colsample_bytree").get<double>();
  c.colsample_bylevel = j.at("colsample_bylevel").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.rounds = j.at("rounds").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.min_child_hessian = j.value("min_child_hessian", 1e-6);
  return c;
}

/// Split nodes send x[feature] < threshold to the left child.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf weight before learning-rate scaling

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  template <typename Row>
  int leaf_index(const Row& row) const {
    int k = 0;
    while (!nodes[static_cast<std::size_t>(k)].is_leaf()) {
      const auto& node = nodes[static_cast<std::size_t>(k)];
      k = row(node.feature) < node.threshold ? node.left : node.right;
    }
    return k;
  }

  template <typename Row>
  double evaluate(const Row& row) const {
    return nodes[static_cast<std::size_t>(leaf_index(row))].value;
  }

  int depth() const {
    std::vector<int> level(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto& node = nodes[k];
      if (node.is_leaf()) continue;
      level[static_cast<std::size_t>(node.left)] = level[k] + 1;
      level[static_cast<std::size_t>(node.right)] = level[k] + 1;
      deepest = std::max(deepest, level[k] + 1);
    }
    return deepest;
  }
};

struct TreeEnsemble {
  double base_margin = 0.0;
  double learning_rate = 1.0;
  std::vector<RegressionTree> trees;
  std::vector<std::string> feature_names;
  BoostConfig config;
  std::vector<double> training_loss;  // per round, not serialized

  std::size_t width() const { return feature_names.size(); }
};

/// Log-hazard margins f(x) = base + eta * sum of leaf weights.
inline Eigen::VectorXd predict_margin(const TreeEnsemble& model, const Eigen::MatrixXd& rows) {
  if (static_cast<std::size_t>(rows.cols()) != model.width()) {
    throw ArgumentError("predict_margin: row width " + std::to_string(rows.cols()) + " does not match model width " +
                        std::to_string(model.width()));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Constant(rows.rows(), model.base_margin);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const auto row = rows.row(i);
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += tree.evaluate(row);
    out[i] += model.learning_rate * sum;
  }
  return out;
}

inline nlohmann::json to_json(const TreeEnsemble& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    std::vector<int> feature, left, right;
    std::vector<double> threshold, leaf_value;
    for (const auto& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.is_leaf() ? 0.0 : node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      leaf_value.push_back(node.is_leaf() ? node.value : 0.0);
    }
    trees.push_back({{"feature", feature},
                     {"threshold", threshold},
                     {"left", left},
                     {"right", right},
                     {"leaf_value", leaf_value}});
  }
  return {{"format", "reprosurv.tree_ensemble"},
          {"version", 1},
          {"base_margin", model.base_margin},
          {"learning_rate", model.learning_rate},
          {"feature_names", model.feature_names},
          {"config", to_json(model.config)},
          {"trees", trees}};
}

namespace detail {

inline TreeEnsemble parse_tree_ensemble(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "reprosurv.tree_ensemble" || j.value("version", 0) != 1) {
    throw ConfigError("model JSON: unsupported format or version");
  }
  TreeEnsemble model;
  model.base_margin = j.at("base_margin").get<double>();
  model.learning_rate = j.at("learning_rate").get<double>();
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  if (j.contains("config")) model.config = boost_config_from_json(j.at("config"));
  const auto width = static_cast<int>(model.feature_names.size());
  for (const auto& t : j.at("trees")) {
    const auto feature = t.at("feature").get<std::vector<int>>();
    const auto threshold = t.at("threshold").get<std::vector<double>>();
    const auto left = t.at("left").get<std::vector<int>>();
    const auto right = t.at("right").get<std::vector<int>>();
    const auto leaf = t.at("leaf_value").get<std::vector<double>>();
    const std::size_t n = feature.size();
    if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || leaf.size() != n) {
      throw ConfigError("model JSON: tree arrays must be non-empty and of equal length");
    }
    RegressionTree tree;
    for (std::size_t k = 0; k < n; ++k) {
      TreeNode node{feature[k], threshold[k], left[k], right[k], leaf[k]};
      if (!node.is_leaf()) {
        const auto valid = [&](int c) { return c > static_cast<int>(k) && c < static_cast<int>(n); };
        if (node.feature >= width || !valid(node.left) || !valid(node.right) || !std::isfinite(node.threshold)) {
          throw ConfigError("model JSON: malformed split node");
        }
      }
      tree.nodes.push_back(node);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace detail

/// Parses the model format written by `to_json`; any structural problem,
/// including missing keys or wrong value types, is a ConfigError.
inline TreeEnsemble tree_ensemble_from_json(const nlohmann::json& j) {
  try {
    return detail::parse_tree_ensemble(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model JSON: ") + e.what());
  }
}

struct GradHess {
  Eigen::VectorXd gradient;
  Eigen::VectorXd hessian;  // diagonal
};

namespace detail {

/// Subjects sorted by increasing duration, reused across boosting rounds.
struct TimeOrder {
  std::vector<std::size_t> order;

  explicit TimeOrder(std::span<const double> durations) : order(durations.size()) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return durations[a] < durations[b]; });
  }
};

inline GradHess breslow_grad_hess(std::span<const double> durations, const std::vector<bool>& events,
                                  const Eigen::VectorXd& margins, const TimeOrder& time_order, double* loss) {
  const std::size_t n = durations.size();
  if (events.size() != n || static_cast<std::size_t>(margins.size()) != n) {
    throw ArgumentError("cox_grad_hess: length mismatch");
  }
  if (!margins.allFinite()) throw NumericError("cox_grad_hess: non-finite margins");
  GradHess out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))};
  if (loss) *loss = 0.0;
  if (n == 0) return out;

  // Everything stays in the log domain: with diverging margins a late risk
  // set can be ~1e-300 of the earliest one, and 0 * inf must not appear.
  // Each row's terms exp(m_i - log S0_k) are at most 1 because i is in risk
  // set k.
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const auto log_add = [](double x, double y) {
    if (x == kNegInf) return y;
    if (y == kNegInf) return x;
    const double hi = std::max(x, y);
    return hi + std::log1p(std::exp(std::min(x, y) - hi));
  };

  const auto& order = time_order.order;
  // log S0 at each position: log-sum-exp over the suffix of the sorted order.
  std::vector<double> log_risk(n);
  double suffix = kNegInf;
  for (std::size_t pos = n; pos-- > 0;) {
    suffix = log_add(suffix, margins[static_cast<Eigen::Index>(order[pos])]);
    log_risk[pos] = suffix;
  }

  double log_a = kNegInf, log_b = kNegInf;  // log of running sums d_k / S0_k and d_k / S0_k^2
  for (std::size_t pos = 0; pos < n;) {
    const double t = durations[order[pos]];
    const std::size_t start = pos;
    double deaths = 0.0;
    while (pos < n && durations[order[pos]] == t) {
      if (events[order[pos]]) deaths += 1.0;
      ++pos;
    }
    if (deaths > 0.0) {
      const double log_s0 = log_risk[start];
      log_a = log_add(log_a, std::log(deaths) - log_s0);
      log_b = log_add(log_b, std::log(deaths) - 2.0 * log_s0);
      if (loss) *loss += deaths * log_s0;
    }
    for (std::size_t k = start; k < pos; ++k) {
      const auto ii = static_cast<Eigen::Index>(order[k]);
      const double m = margins[ii];
      const double wa = std::exp(m + log_a), wwb = std::exp(2.0 * m + log_b);
      out.gradient[ii] = wa - (events[order[k]] ? 1.0 : 0.0);
      out.hessian[ii] = wa - wwb;
      if (loss && events[order[k]]) *loss -= m;
    }
  }
  if (!out.gradient.allFinite() || !out.hessian.allFinite()) throw NumericError("cox_grad_hess: non-finite result");
  return out;
}

}  // namespace detail

/// Derivatives of the negative Breslow log partial likelihood with respect
/// to each subject's margin.
inline GradHess cox_grad_hess(std::span<const double> durations, const std::vector<bool>& events,
                              const Eigen::VectorXd& margins) {
  return detail::breslow_grad_hess(durations, events, margins, detail::TimeOrder(durations), nullptr);
}

/// Negative Breslow log partial likelihood at `margins`.
inline double cox_negative_loglik(std::span<const double> durations, const std::vector<bool>& events,
                                  const Eigen::VectorXd& margins) {
  double loss = 0.0;
  detail::breslow_grad_hess(durations, events, margins, detail::TimeOrder(durations), &loss);
  return loss;
}

namespace detail {

inline double leaf_weight(double g, double h, double lambda) {
  const double denom = h + lambda;
  return denom > 0.0 ? -g / denom : 0.0;
}

inline double split_gain(double gl, double hl, double gr, double hr, double lambda) {
  auto score = [&](double g, double h) { return h + lambda > 0.0 ? g * g / (h + lambda) : 0.0; };
  return 0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr));
}

/// Row order per feature, computed once per fit.
struct SortedColumns {
  std::vector<std::vector<std::size_t>> order;

  explicit SortedColumns(const Eigen::MatrixXd& x) : order(static_cast<std::size_t>(x.cols())) {
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      auto& o = order[static_cast<std::size_t>(f)];
      o.resize(static_cast<std::size_t>(x.rows()));
      std::iota(o.begin(), o.end(), 0);
      std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) {
        return x(static_cast<Eigen::Index>(a), f) < x(static_cast<Eigen::Index>(b), f);
      });
    }
  }
};

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  double gl = 0.0, hl = 0.0;
};

/// Exact greedy, level-wise tree growth. `in_sample[i]` selects the rows used.
inline RegressionTree grow_tree(const Eigen::MatrixXd& x, const SortedColumns& sorted, const Eigen::VectorXd& grad,
                                const Eigen::VectorXd& hess, const std::vector<char>& in_sample,
                                const BoostConfig& config, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(x.rows());
  const std::size_t d = static_cast<std::size_t>(x.cols());

  RegressionTree tree;
  tree.nodes.emplace_back();
  std::vector<int> row_slot(n, -1);  // position in the current level's frontier
  std::vector<int> frontier{0};
  std::vector<double> node_g{0.0}, node_h{0.0};
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_sample[i]) continue;
    row_slot[i] = 0;
    node_g[0] += grad[static_cast<Eigen::Index>(i)];
    node_h[0] += hess[static_cast<Eigen::Index>(i)];
  }

  const std::size_t tree_count = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(config.colsample_bytree * static_cast<double>(d))));
  const auto tree_features = rng.sample_indices(d, tree_count);

  for (int depth = 0; depth < config.max_depth && !frontier.empty(); ++depth) {
    const std::size_t level_count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(config.colsample_bylevel * static_cast<double>(tree_features.size()))));
    std::vector<std::size_t> level_features;
    for (const std::size_t k : rng.sample_indices(tree_features.size(), level_count)) {
      level_features.push_back(tree_features[k]);
    }

    const std::size_t slots = frontier.size();
    std::vector<SplitCandidate> best(slots);
    std::vector<double> run_g(slots), run_h(slots), last(slots);
    std::vector<char> seen(slots);
    for (const std::size_t f : level_features) {
      std::fill(run_g.begin(), run_g.end(), 0.0);
      std::fill(run_h.begin(), run_h.end(), 0.0);
      std::fill(seen.begin(), seen.end(), 0);
      for (const std::size_t i : sorted.order[f]) {
        const int slot = row_slot[i];
        if (slot < 0) continue;
        const auto s = static_cast<std::size_t>(slot);
        const double v = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
        if (seen[s] && v != last[s]) {
          const double gl = run_g[s], hl = run_h[s];
          const double gr = node_g[s] - gl, hr = node_h[s] - hl;
          if (hl >= config.min_child_hessian && hr >= config.min_child_hessian) {
            const double gain = split_gain(gl, hl, gr, hr, config.lambda);
            if (gain > best[s].gain) {
              double threshold = 0.5 * (last[s] + v);
              if (!(threshold > last[s]) || !(threshold <= v)) threshold = v;
              best[s] = {gain, static_cast<int>(f), threshold, gl, hl};
            }
          }
        }
        run_g[s] += grad[static_cast<Eigen::Index>(i)];
        run_h[s] += hess[static_cast<Eigen::Index>(i)];
        last[s] = v;
        seen[s] = 1;
      }
    }

    std::vector<int> next_frontier;
    std::vector<double> next_g, next_h;
    std::vector<int> child_slot(slots * 2, -1);
    for (std::size_t s = 0; s < slots; ++s) {
      const int node_index = frontier[s];
      if (best[s].feature < 0 || !(best[s].gain > 1e-12)) {
        tree.nodes[static_cast<std::size_t>(node_index)].value = leaf_weight(node_g[s], node_h[s], config.lambda);
        continue;
      }
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[static_cast<std::size_t>(node_index)];
      node.feature = best[s].feature;
      node.threshold = best[s].threshold;
      node.left = left;
      node.right = left + 1;
      child_slot[2 * s] = static_cast<int>(next_frontier.size());
      next_frontier.push_back(left);
      next_g.push_back(best[s].gl);
      next_h.push_back(best[s].hl);
      child_slot[2 * s + 1] = static_cast<int>(next_frontier.size());
      next_frontier.push_back(left + 1);
      next_g.push_back(node_g[s] - best[s].gl);
      next_h.push_back(node_h[s] - best[s].hl);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int slot = row_slot[i];
      if (slot < 0) continue;
      const auto s = static_cast<std::size_t>(slot);
      if (child_slot[2 * s] < 0) {
        row_slot[i] = -1;
        continue;
      }
      const auto& node = tree.nodes[static_cast<std::size_t>(frontier[s])];
      const bool go_left = x(static_cast<Eigen::Index>(i), node.feature) < node.threshold;
      row_slot[i] = child_slot[2 * s + (go_left ? 0 : 1)];
    }
    frontier = std::move(next_frontier);
    node_g = std::move(next_g);
    node_h = std::move(next_h);
  }
  for (std::size_t s = 0; s < frontier.size(); ++s) {
    tree.nodes[static_cast<std::size_t>(frontier[s])].value = leaf_weight(node_g[s], node_h[s], config.lambda);
  }
  return tree;
}

}  // namespace detail

/// Boosts `config.rounds` trees; deterministic for a fixed `config.seed`.
inline TreeEnsemble fit_boosted(const EncodedDataset& ds, const BoostConfig& config) {
  config.validate();
  if (ds.event_count() == 0) throw ModelError("fit_boosted: no events in the data");
  if (!ds.x.allFinite()) throw ArgumentError("fit_boosted: design matrix has non-finite entries");

  TreeEnsemble model;
  model.learning_rate = config.eta;
  model.feature_names = ds.columns;
  model.config = config;

  const std::size_t n = ds.rows();
  const detail::TimeOrder time_order(ds.durations);
  const detail::SortedColumns sorted(ds.x);
  Rng rng(config.seed);
  Eigen::VectorXd margins = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), model.base_margin);
  std::vector<char> in_sample(n, 1);

  for (int round = 0; round < config.rounds; ++round) {
    double loss = 0.0;
    const GradHess gh = detail::breslow_grad_hess(ds.durations, ds.events, margins, time_order, &loss);
    model.training_loss.push_back(loss);
    if (config.subsample < 1.0) {
      for (std::size_t i = 0; i < n; ++i) in_sample[i] = rng.bernoulli(config.subsample) ? 1 : 0;
    }
    RegressionTree tree = detail::grow_tree(ds.x, sorted, gh.gradient, gh.hessian, in_sample, config, rng);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      margins[i] += config.eta * tree.evaluate(ds.x.row(i));
    }
    model.trees.push_back(std::move(tree));
  }
  double final_loss = 0.0;
  detail::breslow_grad_hess(ds.durations, ds.events, margins, time_order, &final_loss);
  model.training_loss.push_back(final_loss);
  return model;
}

}  // namespace reprosurv
