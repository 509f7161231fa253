#pragma once

// Exact path-dependent TreeSHAP for TreeEnsemble models, with Shapley
// interaction values. Conditional expectations weight each branch by the
// share of background rows that reach it, so the background set plays the
// role of the training covers.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reprosurv/boosted.hpp"
#include "reprosurv/csv.hpp"
#include "reprosurv/error.hpp"
#include "reprosurv/ingest.hpp"

namespace reprosurv {

struct ShapAttribution {
  double base_value = 0.0;  // expected margin over the background
  Eigen::MatrixXd values;   // rows x features, log-hazard units
  std::vector<Eigen::MatrixXd> interactions;  // per row, features x features (optional)
  Eigen::MatrixXd feature_values;             // the explained rows
  std::vector<std::string> feature_names;

  bool has_interactions() const { return !interactions.empty(); }
  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t features() const { return static_cast<std::size_t>(values.cols()); }

  std::optional<std::size_t> feature_index(std::string_view name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
      if (feature_names[j] == name) return j;
    }
    return std::nullopt;
  }
};

namespace detail {

struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double pweight = 0.0;
};

inline void extend_path(PathElement* path, int depth, double zero_fraction, double one_fraction, int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  for (int i = depth - 1; i >= 0; --i) {
    path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) / static_cast<double>(depth + 1);
    path[i].pweight = zero_fraction * path[i].pweight * (depth - i) / static_cast<double>(depth + 1);
  }
}

inline void unwind_path(PathElement* path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[depth].pweight;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = path[i].pweight;
      path[i].pweight = next * (depth + 1) / static_cast<double>((i + 1) * one);
      next = tmp - path[i].pweight * zero * (depth - i) / static_cast<double>(depth + 1);
    } else {
      path[i].pweight = path[i].pweight * (depth + 1) / (zero * (depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

inline double unwound_path_sum(const PathElement* path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[depth].pweight;
  double total = 0.0;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = next * (depth + 1) / static_cast<double>((i + 1) * one);
      total += tmp;
      next = path[i].pweight - tmp * zero * (depth - i) / static_cast<double>(depth + 1);
    } else if (zero != 0.0) {
      total += path[i].pweight / zero / ((depth - i) / static_cast<double>(depth + 1));
    }
  }
  return total;
}

/// One tree prepared for explanation: branch shares from the background and
/// leaf values already scaled by the learning rate.
struct ExplainedTree {
  const RegressionTree* tree = nullptr;
  std::vector<double> share;  // share of the parent's background rows; 1 at the root
  std::vector<double> leaf;   // eta * leaf weight
  int depth = 0;
  double expected = 0.0;

  ExplainedTree(const RegressionTree& t, double eta, const Eigen::MatrixXd& background) : tree(&t) {
    const std::size_t m = t.nodes.size();
    std::vector<double> cover(m, 0.0);
    for (Eigen::Index r = 0; r < background.rows(); ++r) {
      const auto row = background.row(r);
      int k = 0;
      cover[0] += 1.0;
      while (!t.nodes[static_cast<std::size_t>(k)].is_leaf()) {
        const auto& node = t.nodes[static_cast<std::size_t>(k)];
        k = row(node.feature) < node.threshold ? node.left : node.right;
        cover[static_cast<std::size_t>(k)] += 1.0;
      }
    }
    share.assign(m, 1.0);
    leaf.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const auto& node = t.nodes[k];
      if (node.is_leaf()) {
        leaf[k] = eta * node.value;
        continue;
      }
      const auto l = static_cast<std::size_t>(node.left), r = static_cast<std::size_t>(node.right);
      if (cover[k] > 0.0) {
        share[l] = cover[l] / cover[k];
        share[r] = cover[r] / cover[k];
      } else {
        share[l] = share[r] = 0.5;  // unreached by the background: split evenly
      }
    }
    depth = t.depth();
    expected = expectation(0);
  }

  double expectation(int k) const {
    const auto& node = tree->nodes[static_cast<std::size_t>(k)];
    if (node.is_leaf()) return leaf[static_cast<std::size_t>(k)];
    return share[static_cast<std::size_t>(node.left)] * expectation(node.left) +
           share[static_cast<std::size_t>(node.right)] * expectation(node.right);
  }

  std::size_t path_capacity() const {
    return static_cast<std::size_t>((depth + 2) * (depth + 3) / 2 + 1);
  }

  /// Adds this tree's SHAP values for `row` to `phi`. With condition = +1 / -1
  /// the feature `condition_feature` is held present / absent.
  template <typename Row>
  void shap(const Row& row, double* phi, std::vector<PathElement>& storage, int condition = 0,
            int condition_feature = -1) const {
    if (storage.size() < path_capacity()) storage.resize(path_capacity());
    recurse(row, phi, 0, 0, storage.data(), 1.0, 1.0, -1, condition, condition_feature, 1.0);
  }

 private:
  template <typename Row>
  void recurse(const Row& row, double* phi, int node_index, int depth, PathElement* parent_path,
               double parent_zero, double parent_one, int parent_feature, int condition, int condition_feature,
               double condition_fraction) const {
    if (condition_fraction == 0.0) return;
    // A cold branch with no background cover has both fractions zero, so
    // every path weight below it vanishes (and unwinding would divide by 0).
    if (parent_zero == 0.0 && parent_one == 0.0) return;
    PathElement* path = parent_path + depth + 1;
    std::copy(parent_path, parent_path + depth + 1, path);
    if (condition == 0 || condition_feature != parent_feature) {
      extend_path(path, depth, parent_zero, parent_one, parent_feature);
    }
    const auto& node = tree->nodes[static_cast<std::size_t>(node_index)];
    if (node.is_leaf()) {
      const double value = leaf[static_cast<std::size_t>(node_index)];
      for (int i = 1; i <= depth; ++i) {
        const double w = unwound_path_sum(path, depth, i);
        const PathElement& el = path[i];
        phi[el.feature] += w * (el.one_fraction - el.zero_fraction) * value * condition_fraction;
      }
      return;
    }

    const int split = node.feature;
    const bool left_hot = row(split) < node.threshold;
    const int hot = left_hot ? node.left : node.right;
    const int cold = left_hot ? node.right : node.left;
    const double hot_zero = share[static_cast<std::size_t>(hot)];
    const double cold_zero = share[static_cast<std::size_t>(cold)];
    double incoming_zero = 1.0, incoming_one = 1.0;

    // A feature already on the path is unwound and re-extended with the
    // combined fractions.
    int path_index = 0;
    for (; path_index <= depth; ++path_index) {
      if (path[path_index].feature == split) break;
    }
    if (path_index != depth + 1) {
      incoming_zero = path[path_index].zero_fraction;
      incoming_one = path[path_index].one_fraction;
      unwind_path(path, depth, path_index);
      depth -= 1;
    }

    double hot_condition = condition_fraction;
    double cold_condition = condition_fraction;
    if (condition > 0 && split == condition_feature) {
      cold_condition = 0.0;
      depth -= 1;
    } else if (condition < 0 && split == condition_feature) {
      hot_condition *= hot_zero;
      cold_condition *= cold_zero;
      depth -= 1;
    }
    recurse(row, phi, hot, depth + 1, path, hot_zero * incoming_zero, incoming_one, split, condition,
            condition_feature, hot_condition);
    recurse(row, phi, cold, depth + 1, path, cold_zero * incoming_zero, 0.0, split, condition, condition_feature,
            cold_condition);
  }
};

inline std::vector<ExplainedTree> prepare(const TreeEnsemble& model, const Eigen::MatrixXd& background,
                                          const Eigen::MatrixXd& rows) {
  if (background.rows() == 0) throw ArgumentError("tree_shap: background set is empty");
  if (static_cast<std::size_t>(background.cols()) != model.width() ||
      static_cast<std::size_t>(rows.cols()) != model.width()) {
    throw ArgumentError("tree_shap: row width does not match the model");
  }
  std::vector<ExplainedTree> trees;
  trees.reserve(model.trees.size());
  for (const auto& t : model.trees) trees.emplace_back(t, model.learning_rate, background);
  return trees;
}

inline double ensemble_expectation(const TreeEnsemble& model, const std::vector<ExplainedTree>& trees) {
  double base = model.base_margin;
  for (const auto& t : trees) base += t.expected;
  return base;
}

}  // namespace detail

/// Per-row, per-feature SHAP values; base_value + row sum = predicted margin.
inline ShapAttribution tree_shap(const TreeEnsemble& model, const Eigen::MatrixXd& background,
                                 const Eigen::MatrixXd& rows) {
  const auto trees = detail::prepare(model, background, rows);
  ShapAttribution out;
  out.feature_names = model.feature_names;
  out.feature_values = rows;
  out.base_value = detail::ensemble_expectation(model, trees);
  out.values = Eigen::MatrixXd::Zero(rows.rows(), rows.cols());

  std::vector<detail::PathElement> storage;
  std::vector<double> phi(static_cast<std::size_t>(rows.cols()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    std::fill(phi.begin(), phi.end(), 0.0);
    const auto row = rows.row(r);
    for (const auto& t : trees) t.shap(row, phi.data(), storage);
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out.values(r, j) = phi[static_cast<std::size_t>(j)];
  }
  return out;
}

inline ShapAttribution tree_shap(const TreeEnsemble& model, const EncodedDataset& background,
                                 const Eigen::MatrixXd& rows) {
  return tree_shap(model, background.x, rows);
}

/// SHAP values plus the Shapley interaction index. Off-diagonal entries are
/// half the change in feature k's SHAP value between conditioning j present
/// and absent; the diagonal takes the remainder so that each row of the
/// interaction matrix sums to the SHAP value.
inline ShapAttribution shap_interactions(const TreeEnsemble& model, const Eigen::MatrixXd& background,
                                         const Eigen::MatrixXd& rows) {
  const auto trees = detail::prepare(model, background, rows);
  ShapAttribution out = tree_shap(model, background, rows);
  const Eigen::Index d = rows.cols();

  // Features split on by each tree; conditioning on any other is a no-op.
  std::vector<std::vector<int>> used(trees.size());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    for (const auto& node : trees[t].tree->nodes) {
      if (!node.is_leaf()) used[t].push_back(node.feature);
    }
    std::sort(used[t].begin(), used[t].end());
    used[t].erase(std::unique(used[t].begin(), used[t].end()), used[t].end());
  }

  std::vector<detail::PathElement> storage;
  std::vector<double> on(static_cast<std::size_t>(d)), off(static_cast<std::size_t>(d));
  out.interactions.assign(static_cast<std::size_t>(rows.rows()), Eigen::MatrixXd());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const auto row = rows.row(r);
    Eigen::MatrixXd inter = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t t = 0; t < trees.size(); ++t) {
      for (const int j : used[t]) {
        std::fill(on.begin(), on.end(), 0.0);
        std::fill(off.begin(), off.end(), 0.0);
        trees[t].shap(row, on.data(), storage, +1, j);
        trees[t].shap(row, off.data(), storage, -1, j);
        for (Eigen::Index k = 0; k < d; ++k) {
          if (k != j) inter(j, k) += 0.5 * (on[static_cast<std::size_t>(k)] - off[static_cast<std::size_t>(k)]);
        }
      }
    }
    for (Eigen::Index j = 0; j < d; ++j) inter(j, j) = out.values(r, j) - (inter.row(j).sum() - inter(j, j));
    out.interactions[static_cast<std::size_t>(r)] = std::move(inter);
  }
  return out;
}

inline ShapAttribution shap_interactions(const TreeEnsemble& model, const EncodedDataset& background,
                                         const Eigen::MatrixXd& rows) {
  return shap_interactions(model, background.x, rows);
}

struct FeatureImportance {
  std::size_t index = 0;
  std::string feature;
  double mean_abs = 0.0;
};

/// Features by decreasing mean |phi|; ties keep feature order.
inline std::vector<FeatureImportance> summary_ranking(const ShapAttribution& attr) {
  if (attr.rows() == 0) throw ArgumentError("summary_ranking: empty attribution");
  std::vector<FeatureImportance> out;
  for (std::size_t j = 0; j < attr.features(); ++j) {
    out.push_back({j, j < attr.feature_names.size() ? attr.feature_names[j] : "x" + std::to_string(j),
                   attr.values.col(static_cast<Eigen::Index>(j)).cwiseAbs().mean()});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) { return a.mean_abs > b.mean_abs; });
  return out;
}

namespace detail {

/// Linear-interpolation quantile of sorted data.
inline double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

/// Summary export: one row per feature in ranking order.
inline csv::Table summary_table(const ShapAttribution& attr) {
  csv::Table table;
  table.header = {"rank", "feature", "mean_abs_shap", "min", "q25", "median", "q75", "max"};
  std::size_t rank = 1;
  for (const auto& item : summary_ranking(attr)) {
    const auto col = attr.values.col(static_cast<Eigen::Index>(item.index));
    std::vector<double> v(col.data(), col.data() + col.size());
    std::sort(v.begin(), v.end());
    table.rows.push_back({std::to_string(rank++), item.feature, csv::format_number(item.mean_abs),
                          csv::format_number(v.front()), csv::format_number(detail::quantile(v, 0.25)),
                          csv::format_number(detail::quantile(v, 0.5)), csv::format_number(detail::quantile(v, 0.75)),
                          csv::format_number(v.back())});
  }
  return table;
}

/// Per-sample SHAP values with the feature values beside them (long form).
inline csv::Table values_table(const ShapAttribution& attr) {
  csv::Table table;
  table.header = {"row", "feature", "feature_value", "shap"};
  for (std::size_t j = 0; j < attr.features(); ++j) {
    for (std::size_t r = 0; r < attr.rows(); ++r) {
      const auto rr = static_cast<Eigen::Index>(r), jj = static_cast<Eigen::Index>(j);
      table.rows.push_back({std::to_string(r), attr.feature_names.at(j), csv::format_number(attr.feature_values(rr, jj)),
                            csv::format_number(attr.values(rr, jj))});
    }
  }
  return table;
}

/// Column with the largest mean |interaction| with `feature`.
inline std::size_t strongest_interaction(const ShapAttribution& attr, std::size_t feature) {
  if (!attr.has_interactions()) throw ArgumentError("dependence_export: interaction values are required");
  const Eigen::Index d = static_cast<Eigen::Index>(attr.features());
  Eigen::VectorXd mean_abs = Eigen::VectorXd::Zero(d);
  for (const auto& m : attr.interactions) mean_abs += m.row(static_cast<Eigen::Index>(feature)).cwiseAbs().transpose();
  std::size_t best = feature == 0 && d > 1 ? 1 : 0;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (static_cast<std::size_t>(k) == feature) continue;
    if (mean_abs[k] > mean_abs[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(k);
  }
  return best;
}

struct DependenceTable {
  std::string feature;
  std::string color_feature;
  std::vector<double> feature_value;
  std::vector<double> shap;
  std::vector<double> color_value;

  csv::Table to_table() const {
    csv::Table table;
    table.header = {"row", feature, "shap", color_feature};
    for (std::size_t r = 0; r < shap.size(); ++r) {
      table.rows.push_back({std::to_string(r), csv::format_number(feature_value[r]), csv::format_number(shap[r]),
                            csv::format_number(color_value[r])});
    }
    return table;
  }
};

/// Dependence data for one feature, coloured by `color_feature` or, when
/// absent, by the feature with the strongest mean interaction.
inline DependenceTable dependence_export(const ShapAttribution& attr, std::string_view feature,
                                         std::optional<std::string> color_feature = std::nullopt) {
  const auto f = attr.feature_index(feature);
  if (!f) throw ArgumentError("dependence_export: unknown feature '" + std::string(feature) + "'");
  std::size_t c = 0;
  if (color_feature) {
    const auto idx = attr.feature_index(*color_feature);
    if (!idx) throw ArgumentError("dependence_export: unknown color feature '" + *color_feature + "'");
    c = *idx;
  } else {
    c = strongest_interaction(attr, *f);
  }
  DependenceTable out;
  out.feature = attr.feature_names[*f];
  out.color_feature = attr.feature_names[c];
  for (std::size_t r = 0; r < attr.rows(); ++r) {
    const auto rr = static_cast<Eigen::Index>(r);
    out.feature_value.push_back(attr.feature_values(rr, static_cast<Eigen::Index>(*f)));
    out.shap.push_back(attr.values(rr, static_cast<Eigen::Index>(*f)));
    out.color_value.push_back(attr.feature_values(rr, static_cast<Eigen::Index>(c)));
  }
  return out;
}

}  // namespace reprosurv
