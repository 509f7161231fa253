#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reprosurv/shap.hpp"
#include "reprosurv/synthetic.hpp"

using namespace reprosurv;

namespace {

TreeEnsemble wrap(std::vector<RegressionTree> trees, int d, double eta = 1.0, double base = 0.0) {
  TreeEnsemble m;
  m.trees = std::move(trees);
  m.learning_rate = eta;
  m.base_margin = base;
  for (int j = 0; j < d; ++j) m.feature_names.push_back("f" + std::to_string(j));
  return m;
}

RegressionTree stump(int feature, double threshold, double left, double right) {
  RegressionTree t;
  t.nodes.resize(3);
  t.nodes[0].feature = feature;
  t.nodes[0].threshold = threshold;
  t.nodes[0].left = 1;
  t.nodes[0].right = 2;
  t.nodes[1].value = left;
  t.nodes[2].value = right;
  return t;
}

// Random ensemble plus a background that may leave some nodes unreached.
struct Case {
  TreeEnsemble model;
  Eigen::MatrixXd background;
  Eigen::MatrixXd rows;
};

Case random_case(std::uint64_t seed, int d, int trees, int depth, Eigen::Index background_rows) {
  Rng rng(seed);
  std::vector<RegressionTree> ts;
  for (int k = 0; k < trees; ++k) ts.push_back(oracle::random_tree(rng, depth, d));
  Case c{wrap(std::move(ts), d, 0.3, rng.normal()), oracle::random_rows(rng, background_rows, d),
         oracle::random_rows(rng, 3, d)};
  return c;
}

std::function<double(std::uint32_t)> game(const Case& c, Eigen::Index r) {
  return [&c, r](std::uint32_t mask) {
    return oracle::ensemble_conditional(c.model, c.background, c.rows.row(r), mask);
  };
}

TreeEnsemble fitted_model() {
  const auto schema = default_boost_schema();
  const auto ds = impute_censoring(load_csv_text(synthetic_study_csv({}), schema).records, schema, ImputeStrategy::mean());
  BoostConfig c;
  c.rounds = 30;
  c.max_depth = 4;
  c.eta = 0.1;
  return fit_boosted(ds, c);
}

}  // namespace

TEST(TreeShap, MatchesExhaustiveShapleyValues) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const int d = 2 + static_cast<int>(seed % 5);  // 2..6 features
    const auto c = random_case(seed, d, 3, 1 + static_cast<int>(seed % 4), seed % 3 == 0 ? 3 : 40);
    const auto attr = tree_shap(c.model, c.background, c.rows);
    for (Eigen::Index r = 0; r < c.rows.rows(); ++r) {
      const Eigen::VectorXd expect = oracle::shapley(game(c, r), d);
      for (int j = 0; j < d; ++j) EXPECT_NEAR(attr.values(r, j), expect[j], 1e-8) << "seed " << seed << " row " << r;
    }
    EXPECT_NEAR(attr.base_value, game(c, 0)(0u), 1e-10);
  }
}

TEST(TreeShap, UnreachedBackgroundNodesSplitEvenly) {
  // Every background row goes left, so the right subtree has zero cover.
  RegressionTree t;
  t.nodes.resize(5);
  t.nodes[0] = {0, 0.0, 1, 2, 0.0};
  t.nodes[1].value = 1.0;
  t.nodes[2] = {1, 0.0, 3, 4, 0.0};
  t.nodes[3].value = 2.0;
  t.nodes[4].value = 6.0;
  const auto model = wrap({t}, 2);
  Eigen::MatrixXd background(2, 2);
  background << -1, -1, -2, 1;
  Eigen::MatrixXd row(1, 2);
  row << 1, 1;
  const auto attr = tree_shap(model, background, row);
  Case c{model, background, row};
  const Eigen::VectorXd expect = oracle::shapley(game(c, 0), 2);
  EXPECT_NEAR(attr.values(0, 0), expect[0], 1e-12);
  EXPECT_NEAR(attr.values(0, 1), expect[1], 1e-12);
  EXPECT_NEAR(attr.base_value + attr.values.row(0).sum(), 6.0, 1e-12);
}

TEST(TreeShap, StumpGivesTheWholeDifferenceToItsFeature) {
  const auto model = wrap({stump(0, 0.5, -1.0, 3.0)}, 2);
  Eigen::MatrixXd background(4, 2);
  background << 0, 9, 0, 9, 0, 9, 1, 9;  // 3 left, 1 right: expectation 0
  Eigen::MatrixXd row(1, 2);
  row << 1, 0;
  const auto attr = tree_shap(model, background, row);
  EXPECT_DOUBLE_EQ(attr.base_value, 0.0);
  EXPECT_DOUBLE_EQ(attr.values(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(attr.values(0, 1), 0.0);
}

TEST(TreeShap, ConstantModelHasZeroAttributions) {
  RegressionTree leaf;
  leaf.nodes.resize(1);
  leaf.nodes[0].value = 2.5;
  const auto model = wrap({leaf, leaf}, 3, 0.5, 1.0);
  Rng rng(1);
  const auto attr = tree_shap(model, oracle::random_rows(rng, 5, 3), oracle::random_rows(rng, 4, 3));
  EXPECT_DOUBLE_EQ(attr.base_value, 3.5);
  EXPECT_EQ(attr.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TreeShap, LocalAccuracyOnAFittedModel) {
  const auto model = fitted_model();
  const auto schema = default_boost_schema();
  const auto ds = impute_censoring(load_csv_text(synthetic_study_csv({}), schema).records, schema, ImputeStrategy::mean());
  const auto attr = tree_shap(model, ds, ds.x);
  const Eigen::VectorXd margin = predict_margin(model, ds.x);
  for (Eigen::Index r = 0; r < ds.x.rows(); ++r) {
    EXPECT_NEAR(attr.base_value + attr.values.row(r).sum(), margin[r], 1e-6) << "row " << r;
  }
}

TEST(TreeShap, AdditiveAcrossTrees) {
  const auto c = random_case(5, 4, 2, 3, 30);
  const auto both = tree_shap(c.model, c.background, c.rows);
  auto first = c.model, second = c.model;
  first.trees.pop_back();
  second.trees.erase(second.trees.begin());
  second.base_margin = 0.0;
  const auto a = tree_shap(first, c.background, c.rows), b = tree_shap(second, c.background, c.rows);
  EXPECT_LT((both.values - a.values - b.values).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(both.base_value, a.base_value + b.base_value, 1e-12);
}

TEST(TreeShap, SymmetricFeaturesGetEqualCredit) {
  // f = [x0 >= 0] + [x1 >= 0] with a symmetric background.
  const auto model = wrap({stump(0, 0.0, 0.0, 1.0), stump(1, 0.0, 0.0, 1.0)}, 2);
  Eigen::MatrixXd background(2, 2);
  background << -1, -1, 1, 1;
  Eigen::MatrixXd row(1, 2);
  row << 1, 1;
  const auto attr = tree_shap(model, background, row);
  EXPECT_DOUBLE_EQ(attr.values(0, 0), attr.values(0, 1));
}

TEST(TreeShap, RejectsEmptyBackgroundAndWidthMismatch) {
  const auto model = wrap({stump(0, 0.0, 0.0, 1.0)}, 2);
  EXPECT_THROW(tree_shap(model, Eigen::MatrixXd(0, 2), Eigen::MatrixXd::Zero(1, 2)), ArgumentError);
  EXPECT_THROW(tree_shap(model, Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(1, 3)), ArgumentError);
}

TEST(ShapInteractions, MatchExhaustiveInteractionIndex) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int d = 2 + static_cast<int>(seed % 4);
    const auto c = random_case(seed + 100, d, 2, 1 + static_cast<int>(seed % 3), seed % 4 == 0 ? 2 : 30);
    const auto attr = shap_interactions(c.model, c.background, c.rows);
    ASSERT_TRUE(attr.has_interactions());
    for (Eigen::Index r = 0; r < c.rows.rows(); ++r) {
      const Eigen::MatrixXd expect = oracle::shapley_interactions(game(c, r), d);
      EXPECT_LT((attr.interactions[static_cast<std::size_t>(r)] - expect).cwiseAbs().maxCoeff(), 1e-8)
          << "seed " << seed << " row " << r;
    }
  }
}

TEST(ShapInteractions, AdditiveModelHasNoInteractions) {
  const auto model = wrap({stump(0, 0.0, -1.0, 1.0), stump(1, 0.0, 2.0, 0.0), stump(2, 0.3, 0.0, 1.0)}, 3);
  Rng rng(3);
  const auto attr = shap_interactions(model, oracle::random_rows(rng, 50, 3), oracle::random_rows(rng, 6, 3));
  for (const auto& m : attr.interactions) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        if (j != k) {
          EXPECT_NEAR(m(j, k), 0.0, 1e-12);
        }
      }
    }
  }
}

TEST(ShapInteractions, NestedSplitInteracts) {
  // x1 matters only when x0 goes right.
  RegressionTree t;
  t.nodes.resize(5);
  t.nodes[0] = {0, 0.0, 1, 2, 0.0};
  t.nodes[1].value = 0.0;
  t.nodes[2] = {1, 0.0, 3, 4, 0.0};
  t.nodes[3].value = 0.0;
  t.nodes[4].value = 4.0;
  const auto model = wrap({t}, 2);
  Eigen::MatrixXd background(4, 2);
  background << -1, -1, -1, 1, 1, -1, 1, 1;
  Eigen::MatrixXd row(1, 2);
  row << 1, 1;
  const auto attr = shap_interactions(model, background, row);
  EXPECT_GT(std::abs(attr.interactions[0](0, 1)), 0.1);
}

TEST(ShapInteractions, SymmetricAndRowsSumToShapValues) {
  const auto model = fitted_model();
  const auto schema = default_boost_schema();
  const auto ds = impute_censoring(load_csv_text(synthetic_study_csv({}), schema).records, schema, ImputeStrategy::mean());
  const Eigen::MatrixXd rows = ds.x.topRows(20);
  const auto attr = shap_interactions(model, ds, rows);
  for (std::size_t r = 0; r < attr.rows(); ++r) {
    const auto& m = attr.interactions[r];
    EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((m.rowwise().sum().transpose() - attr.values.row(static_cast<Eigen::Index>(r))).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(ShapSummary, RankingOrdersByMeanAbsoluteValueAndKeepsTies) {
  ShapAttribution attr;
  attr.feature_names = {"a", "b", "c", "d"};
  attr.values.resize(2, 4);
  attr.values << 1, -3, 1, 0, -1, 3, -1, 0.5;
  attr.feature_values = Eigen::MatrixXd::Zero(2, 4);
  const auto ranking = summary_ranking(attr);
  ASSERT_EQ(ranking.size(), 4u);
  EXPECT_EQ(ranking[0].feature, "b");
  EXPECT_EQ(ranking[1].feature, "a");
  EXPECT_EQ(ranking[2].feature, "c");
  EXPECT_EQ(ranking[3].feature, "d");
  EXPECT_DOUBLE_EQ(ranking[0].mean_abs, 3.0);
  const auto table = summary_table(attr);
  EXPECT_EQ(table.rows.size(), 4u);
  EXPECT_EQ(table.rows[0][1], "b");
}

TEST(ShapSummary, ValuesTableIsLongFormat) {
  const auto c = random_case(9, 3, 2, 2, 20);
  auto attr = tree_shap(c.model, c.background, c.rows);
  EXPECT_EQ(values_table(attr).rows.size(), 9u);
}

TEST(ShapDependence, ExplicitAndAutomaticColouring) {
  const auto model = fitted_model();
  const auto schema = default_boost_schema();
  const auto ds = impute_censoring(load_csv_text(synthetic_study_csv({}), schema).records, schema, ImputeStrategy::mean());
  const auto attr = shap_interactions(model, ds, ds.x);
  const auto& name = attr.feature_names[0];
  const auto automatic = dependence_export(attr, name);
  EXPECT_EQ(automatic.feature_value.size(), ds.rows());
  EXPECT_EQ(automatic.to_table().rows.size(), ds.rows());
  EXPECT_NE(automatic.color_feature, name);
  const auto chosen = dependence_export(attr, name, attr.feature_names[1]);
  EXPECT_EQ(chosen.color_feature, attr.feature_names[1]);
  EXPECT_THROW(dependence_export(attr, "no such feature"), ArgumentError);
  EXPECT_THROW(dependence_export(attr, name, std::string("nope")), ArgumentError);
}

TEST(ShapDependence, AutomaticColourNeedsInteractions) {
  const auto c = random_case(10, 3, 2, 2, 20);
  const auto attr = tree_shap(c.model, c.background, c.rows);
  EXPECT_THROW(dependence_export(attr, "f0"), ArgumentError);
  EXPECT_NO_THROW(dependence_export(attr, "f0", std::string("f1")));
}
