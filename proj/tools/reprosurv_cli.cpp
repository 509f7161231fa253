// Command-line front end for the reproducibility survival pipeline.
//
// Exit codes: 0 success, 2 argument or config error, 3 data error,
// 4 convergence or numeric error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "reprosurv/reprosurv.hpp"

namespace {

using namespace reprosurv;

int exit_code(const Error& e) {
  switch (e.category()) {
    case Error::Category::argument: return 2;
    case Error::Category::data: return 3;
    case Error::Category::numeric: return 4;
  }
  return 1;
}

void list_files(const std::string& root, const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << "  wrote " << root << "/" << f << "\n";
}

void print_tests(const LinearReport& r, double alpha) {
  std::cout << "linear Cox: " << r.fit.beta.size() << " columns, " << r.fit.iterations
            << " Newton iterations, CV concordance " << csv::format_number(r.cv.mean) << "\n";
  for (const auto& t : r.cox_tests) {
    if (t.p_value && *t.p_value < alpha) {
      std::cout << "  significant: " << t.feature << " (p = " << csv::format_number(*t.p_value) << ")\n";
    }
  }
  for (const auto& e : r.ph_rank.entries) {
    if (e.p_value < alpha) std::cout << "  PH flag (rank): " << e.column << " (p = " << csv::format_number(e.p_value) << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survival analysis of research reproducibility: linear and boosted hazard models with SHAP."};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string impute = "mean";
  std::string config_file;
  app.add_option("--data", cfg.data, "Study CSV (one row per paper)");
  app.add_option("--schema", cfg.schema, "Feature schema for the linear models (default: built-in)");
  app.add_option("--boost-schema", cfg.boost_schema, "Feature schema for the boosted model (default: built-in)");
  app.add_option("--impute", impute, "Censoring-time imputation: mean | median | const:N")->capture_default_str();
  app.add_option("--ridge", cfg.ridge, "Ridge penalty on standardized coefficients")->capture_default_str();
  app.add_option("--folds", cfg.folds, "Cross-validation folds")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for CV shuffles and the search")->capture_default_str();
  app.add_option("--trials", cfg.trials, "Random-search budget (0 = use the tuned preset)")->capture_default_str();
  app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
  app.add_option("--config", config_file, "key = value file; its entries override flags");

  auto* ingest_cmd = app.add_subcommand("ingest", "Encode the dataset and write audit tables");
  auto* linear_cmd = app.add_subcommand("linear", "Cox and logistic regression, PH tests, residuals, KM curves");
  auto* boost_cmd = app.add_subcommand("boost", "Fit and cross-validate the boosted Cox model");
  auto* search_cmd = app.add_subcommand("search", "Random hyperparameter search (budget from --trials, default 100)");
  auto* shap_cmd = app.add_subcommand("shap", "Boosted model plus SHAP summary and dependence exports");
  auto* plot_cmd = app.add_subcommand("plot", "Render SVG views of existing output tables");
  auto* all_cmd = app.add_subcommand("report-all", "Every analysis followed by the plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.impute = ImputeStrategy::parse(impute);
    if (!config_file.empty()) apply_config_file(cfg, config_file);

    if (*ingest_cmd) {
      list_files(cfg.out, run_ingest(cfg));
    } else if (*linear_cmd) {
      const auto r = run_linear_report(cfg);
      print_tests(r, cfg.alpha);
      list_files(cfg.out, r.files);
    } else if (*boost_cmd || *shap_cmd) {
      const auto r = run_boosted_report(cfg, static_cast<bool>(*shap_cmd));
      std::cout << "boosted Cox: " << r.model.trees.size() << " trees, CV concordance "
                << csv::format_number(r.cv.mean) << "\n";
      list_files(cfg.out, r.files);
    } else if (*search_cmd) {
      const auto r = run_search(cfg);
      std::cout << "search: " << r.trials.size() << " trials, best CV concordance " << csv::format_number(r.best_score)
                << "\n"
                << to_json(r.best).dump(2) << "\n";
    } else if (*plot_cmd) {
      const auto r = emit_plots(cfg.out);
      list_files(cfg.out, r.written);
      for (const auto& m : r.missing) std::cerr << "missing input, skipped: " << cfg.out << "/" << m << "\n";
      if (!r.missing.empty()) return 3;
    } else if (*all_cmd) {
      const auto r = run_all(cfg);
      print_tests(r.linear, cfg.alpha);
      std::cout << "boosted Cox: CV concordance " << csv::format_number(r.boosted.cv.mean) << "\n";
      list_files(cfg.out, r.linear.files);
      list_files(cfg.out, r.boosted.files);
      list_files(cfg.out, r.plots.written);
      for (const auto& m : r.plots.missing) std::cerr << "missing input, skipped: " << cfg.out << "/" << m << "\n";
      if (!r.plots.missing.empty()) return 3;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
