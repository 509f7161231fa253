#pragma once

// Seeded generator of study-shaped CSV files with planted hazard effects.
// Used by the tests, the demo and the acceptance property run when the real
// study table is not available.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "reprosurv/csv.hpp"
#include "reprosurv/rng.hpp"

namespace reprosurv {

struct SyntheticOptions {
  std::size_t rows = 183;
  std::uint64_t seed = 7;
  double baseline_rate = 0.01;   // events per day at zero log-hazard
  double censoring_rate = 0.004; // follow-up ends at an exponential time
  double max_follow_up = 1500.0;
};

/// Log-hazard effects planted in the generator, in raw units.
struct PlantedEffects {
  double readability_excellent = 1.5;
  double readability_good = 0.9;
  double readability_low = -0.8;
  double pseudo_code = 0.6;            // Yes or Code-Like
  double equations_per_page = -0.25;
  double hyperparameters_yes = 0.4;
  double code_available = 0.2;
};

inline csv::Table synthetic_study_table(const SyntheticOptions& options = {}, const PlantedEffects& effects = {}) {
  Rng rng(options.seed);
  csv::Table table;
  table.header = {"Paper", "Year Published", "Year Attempted", "Has Appendix", "Uses Exemplar Toy Problem",
                  "Exact Compute Used", "Looks Intimidating", "Data Available", "Code Available",
                  "Number of Authors", "Pages", "Num References", "Number of Equations", "Number of Proofs",
                  "Number of Tables", "Number of Graphs/Plots", "Number of Other Figures",
                  "Conceptualization Figures", "Hyperparameters Specified", "Paper Readability",
                  "Algorithm Difficulty", "Pseudo Code", "Rigor vs Empirical", "Compute Needed", "Reproduced",
                  "Days to Reproduce"};

  const auto pick = [&](const std::vector<std::string>& options_list, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = rng.uniform() * total;
    for (std::size_t k = 0; k < options_list.size(); ++k) {
      if (u < weights[k]) return options_list[k];
      u -= weights[k];
    }
    return options_list.back();
  };
  const auto yes_no = [&](double p) { return std::string(rng.bernoulli(p) ? "Yes" : "No"); };
  const auto count = [&](double mean) {
    return static_cast<int>(std::floor(rng.exponential(1.0 / std::max(mean, 1e-9)) + 0.5));
  };

  for (std::size_t i = 0; i < options.rows; ++i) {
    const auto published = rng.uniform_int(1985, 2018);
    const auto attempted = rng.uniform_int(std::max<std::int64_t>(published, 2012), 2019);
    const int pages = static_cast<int>(rng.uniform_int(6, 40));
    const int equations = count(pages * rng.uniform(0.2, 5.0));
    const std::string readability = pick({"Low", "Ok", "Good", "Excellent"}, {0.2, 0.35, 0.3, 0.15});
    const std::string pseudo = pick({"No", "Step-Code", "Yes", "Code-Like"}, {0.4, 0.2, 0.25, 0.15});
    const std::string hyper = pick({"No", "Partial", "Yes"}, {0.3, 0.35, 0.35});
    const std::string code = yes_no(0.3);

    double eta = 0.0;
    if (readability == "Excellent") eta += effects.readability_excellent;
    if (readability == "Good") eta += effects.readability_good;
    if (readability == "Low") eta += effects.readability_low;
    if (pseudo == "Yes" || pseudo == "Code-Like") eta += effects.pseudo_code;
    if (hyper == "Yes") eta += effects.hyperparameters_yes;
    if (code == "Yes") eta += effects.code_available;
    eta += effects.equations_per_page * static_cast<double>(equations) / pages;

    const double event_time = rng.exponential(options.baseline_rate * std::exp(eta));
    const double follow_up = std::min(options.max_follow_up, rng.exponential(options.censoring_rate));
    const bool reproduced = event_time <= follow_up;

    table.rows.push_back({
        "paper-" + std::to_string(i + 1),
        std::to_string(published),
        std::to_string(attempted),
        yes_no(0.5),
        yes_no(0.3),
        yes_no(0.4),
        yes_no(0.3),
        yes_no(0.6),
        code,
        std::to_string(rng.uniform_int(1, 8)),
        std::to_string(pages),
        std::to_string(count(pages * 1.5)),
        std::to_string(equations),
        std::to_string(count(pages * 0.1)),
        std::to_string(count(pages * 0.15)),
        std::to_string(count(pages * 0.3)),
        std::to_string(count(pages * 0.1)),
        std::to_string(count(pages * 0.05)),
        hyper,
        readability,
        pick({"Low", "Medium", "High"}, {0.3, 0.45, 0.25}),
        pseudo,
        pick({"Balance", "Empirical", "Theory"}, {0.4, 0.4, 0.2}),
        pick({"Desktop", "Workstation", "Cluster"}, {0.5, 0.3, 0.2}),
        reproduced ? "Yes" : "No",
        reproduced ? std::to_string(std::max(1, static_cast<int>(std::ceil(event_time)))) : "",
    });
  }
  return table;
}

inline std::string synthetic_study_csv(const SyntheticOptions& options = {}, const PlantedEffects& effects = {}) {
  const csv::Table table = synthetic_study_table(options, effects);
  std::ostringstream out;
  csv::Writer writer(out);
  writer.row(table.header);
  for (const auto& r : table.rows) writer.row(r);
  return out.str();
}

}  // namespace reprosurv
