#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "reprosurv/rng.hpp"
#include "reprosurv/survival.hpp"

using namespace reprosurv;

TEST(KaplanMeier, HandComputedFixture) {
  const std::vector<double> t{1, 2, 2, 3, 4, 5};
  const std::vector<bool> e{true, true, false, true, false, true};
  const auto curve = kaplan_meier(make_samples(t, e));
  ASSERT_EQ(curve.times, (std::vector<double>{1, 2, 3, 5}));
  EXPECT_DOUBLE_EQ(curve.survival[0], 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(curve.survival[1], 5.0 / 6.0 * 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(curve.survival[2], 5.0 / 6.0 * 4.0 / 5.0 * 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(curve.survival[3], 0.0);
  EXPECT_EQ(curve.at_risk, (std::vector<std::size_t>{6, 5, 3, 1}));
  EXPECT_EQ(curve.at(0.5), 1.0);
  EXPECT_EQ(curve.at(2.0), curve.survival[1]);
  EXPECT_EQ(curve.at(4.5), curve.survival[2]);
}

TEST(KaplanMeier, NoEventsGivesFlatCurve) {
  const std::vector<double> t{1, 2};
  const std::vector<bool> e{false, false};
  const auto curve = kaplan_meier(make_samples(t, e));
  EXPECT_TRUE(curve.times.empty());
  EXPECT_EQ(curve.at(10), 1.0);
}

TEST(KaplanMeier, EmptyInputThrows) {
  EXPECT_THROW(kaplan_meier({}), ArgumentError);
}

TEST(KaplanMeier, MonotoneNonIncreasing) {
  const auto in = oracle::random_instance(5, 80, 1, true);
  const auto curve = kaplan_meier(make_samples(in.t, in.e));
  for (std::size_t k = 1; k < curve.survival.size(); ++k) EXPECT_LE(curve.survival[k], curve.survival[k - 1]);
}

TEST(LogRank, HandComputedFixture) {
  const std::vector<SurvivalSample> a{{1, true}, {2, true}};
  const std::vector<SurvivalSample> b{{3, true}, {4, true}};
  const auto r = log_rank_test(a, b);
  EXPECT_DOUBLE_EQ(r.observed_a, 2.0);
  EXPECT_DOUBLE_EQ(r.expected_a, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.variance, 17.0 / 36.0);
  EXPECT_NEAR(r.statistic, 49.0 / 17.0, 1e-14);
  EXPECT_NEAR(r.p_value, std::erfc(std::sqrt(49.0 / 34.0)), 1e-14);
}

TEST(LogRank, IdenticalGroupsGiveZero) {
  const std::vector<SurvivalSample> a{{1, true}, {2, false}, {3, true}};
  const auto r = log_rank_test(a, a);
  EXPECT_NEAR(r.statistic, 0.0, 1e-14);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(LogRank, EmptyGroupThrows) {
  const std::vector<SurvivalSample> a{{1, true}};
  EXPECT_THROW(log_rank_test(a, {}), ArgumentError);
}

TEST(Concordance, Examples) {
  const std::vector<double> labels{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(concordance(std::vector<double>{4, 3, 2, 1}, labels), 1.0);
  EXPECT_DOUBLE_EQ(concordance(std::vector<double>{1, 2, 3, 4}, labels), 0.0);
  EXPECT_DOUBLE_EQ(concordance(std::vector<double>{1, 1, 1, 1}, labels), 0.5);
  EXPECT_DOUBLE_EQ(concordance(std::vector<double>{1, 2}, std::vector<double>{-1, -2}), 0.5);
}

TEST(Concordance, CensoredSubjectOnlyComparedWhenLongerThanEvent) {
  // Event at 5 and censored at 3: not comparable. Censored at 7: comparable.
  EXPECT_DOUBLE_EQ(concordance(std::vector<double>{1, 0}, std::vector<double>{5, -3}), 0.5);
  const auto c = concordance_counts(std::vector<double>{1, 0}, std::vector<double>{5, -7});
  EXPECT_EQ(c.concordant, 1.0);
  EXPECT_EQ(c.discordant + c.tied, 0.0);
}

TEST(Concordance, MatchesPairEnumerationOnRandomSets) {
  Rng rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, 60));
    std::vector<double> risk(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      risk[i] = static_cast<double>(rng.uniform_int(0, 8));  // plenty of ties
      const double t = static_cast<double>(rng.uniform_int(1, 15));
      labels[i] = rng.bernoulli(0.6) ? t : -t;
    }
    EXPECT_NEAR(concordance(risk, labels), oracle::concordance(risk, labels), 1e-15) << "rep " << rep;
  }
}
