// Monte Carlo checks of the Cox inference layer on simulated data.

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reprosurv/cox.hpp"

using namespace reprosurv;

TEST(CoxSimulation, RobustAndModelStandardErrorsAgreeUnderCorrectModel) {
  const auto ds = oracle::simulate_ph(101, 600);
  const CoxFit fit = fit_cox(ds);
  const Eigen::VectorXd model = fit.model_se(), robust = fit.robust_se();
  for (Eigen::Index j = 0; j < 2; ++j) {
    EXPECT_NEAR(robust[j] / model[j], 1.0, 0.25) << fit.columns[static_cast<std::size_t>(j)];
  }
}

TEST(CoxSimulation, WaldCoverageOfPlantedCoefficient) {
  int covered = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const CoxFit fit = fit_cox(oracle::simulate_ph(2000 + static_cast<std::uint64_t>(r), 200));
    const double se = fit.robust_se()[0];
    if (std::abs(fit.beta[0] - 0.5) <= 1.96 * se) ++covered;
  }
  EXPECT_GE(covered, 88);
  EXPECT_LE(covered, 100);
}

TEST(CoxSimulation, PhTestHoldsItsLevelUnderTheNull) {
  for (auto transform : {TimeTransform::rank, TimeTransform::km}) {
    int rejections = 0, tests = 0;
    for (int r = 0; r < 200; ++r) {
      const auto ds = oracle::simulate_ph(5000 + static_cast<std::uint64_t>(r), 150);
      const auto result = ph_assumption_test(ds, fit_cox(ds), transform);
      for (const auto& e : result.entries) {
        ++tests;
        if (e.p_value < 0.05) ++rejections;
      }
    }
    const double rate = static_cast<double>(rejections) / tests;
    EXPECT_NEAR(rate, 0.05, 0.03) << to_string(transform);
  }
}

TEST(CoxSimulation, PhTestDetectsCrossingHazards) {
  const auto ds = oracle::simulate_crossover(77, 300);
  const CoxFit fit = fit_cox(ds);
  for (auto transform : {TimeTransform::rank, TimeTransform::km}) {
    const auto result = ph_assumption_test(ds, fit, transform);
    EXPECT_LT(result.entries[0].p_value, 1e-3) << to_string(transform);
  }
}
