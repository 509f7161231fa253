// Library tour on a synthetic study table: Kaplan-Meier, a ridge Cox fit,
// the boosted model and its leading SHAP features.

#include <iomanip>
#include <iostream>

#include "reprosurv/reprosurv.hpp"

int main() {
  using namespace reprosurv;

  const FeatureSchema linear_schema = default_linear_schema();
  const LoadedRecords loaded = load_csv_text(synthetic_study_csv(), linear_schema);
  const EncodedDataset linear = impute_censoring(loaded.records, linear_schema, ImputeStrategy::mean());
  std::cout << linear.rows() << " papers, " << linear.event_count() << " reproduced, " << linear.cols()
            << " encoded columns\n";

  const auto curve = kaplan_meier(make_samples(linear.durations, linear.events));
  std::cout << "share not reproduced after 100 days: " << curve.at(100.0) << "\n";

  const CoxFit fit = fit_cox(linear);
  std::cout << "\nhazard ratios\n";
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
    std::cout << "  " << std::left << std::setw(40) << fit.columns[static_cast<std::size_t>(j)]
              << std::exp(fit.beta[j]) << "\n";
  }
  std::cout << "linear CV concordance: " << cross_validate(linear, CoxOptions{}, 10, 42).mean << "\n";

  const FeatureSchema boost_schema = default_boost_schema();
  const EncodedDataset boosted =
      impute_censoring(load_csv_text(synthetic_study_csv(), boost_schema).records, boost_schema, ImputeStrategy::mean());
  const TreeEnsemble model = fit_boosted(boosted, BoostConfig::tuned_preset());
  std::cout << "boosted CV concordance: " << cross_validate(boosted, BoostConfig::tuned_preset(), 10, 42).mean << "\n";

  const ShapAttribution attr = tree_shap(model, boosted.x, boosted.x);
  std::cout << "\ntop SHAP features\n";
  const auto ranking = summary_ranking(attr);
  for (std::size_t k = 0; k < 5 && k < ranking.size(); ++k) {
    std::cout << "  " << ranking[k].feature << "  " << ranking[k].mean_abs << "\n";
  }
  return 0;
}
