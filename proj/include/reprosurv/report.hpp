#pragma once

// End-to-end pipeline: ingest, linear hazard analysis, boosted model with
// SHAP exports, and SVG views of the exported tables. Every output is a pure
// function of the RunConfig, so seeded runs are byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reprosurv/boosted.hpp"
#include "reprosurv/cox.hpp"
#include "reprosurv/csv.hpp"
#include "reprosurv/error.hpp"
#include "reprosurv/ingest.hpp"
#include "reprosurv/logistic.hpp"
#include "reprosurv/shap.hpp"
#include "reprosurv/survival.hpp"
#include "reprosurv/svg.hpp"
#include "reprosurv/validation.hpp"

namespace reprosurv {

struct RunConfig {
  std::string data;
  std::string schema;        // linear schema file; empty = built-in layout
  std::string boost_schema;  // boosted schema file; empty = built-in layout
  ImputeStrategy impute = ImputeStrategy::mean();
  double ridge = 1e-3;
  std::size_t folds = 10;
  std::uint64_t seed = 42;  // CV shuffles and the search sequence
  std::size_t trials = 0;   // 0 = use `boost` as given
  BoostConfig boost = BoostConfig::tuned_preset();
  std::string out = "reprosurv-out";
  double alpha = 0.05;

  void validate() const {
    if (data.empty()) throw ArgumentError("no dataset given (--data)");
    if (out.empty()) throw ArgumentError("no output directory given (--out)");
    if (!(ridge >= 0.0)) throw ConfigError("ridge must be non-negative");
    if (folds < 2) throw ConfigError("folds must be at least 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    boost.validate();
  }
};

namespace detail {

inline double config_number(const std::string& key, const std::string& value) {
  const auto v = csv::parse_number(value);
  if (!v) throw ConfigError("config key '" + key + "' needs a number, got '" + value + "'");
  return *v;
}

inline std::uint64_t config_count(const std::string& key, const std::string& value) {
  const double v = config_number(key, value);
  if (v < 0 || v != std::floor(v)) throw ConfigError("config key '" + key + "' needs a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

}  // namespace detail

/// `key = value` lines; `#` starts a comment. Keys mirror the CLI flags plus
/// the boosted-model parameters (eta, max_depth, subsample, colsample_bytree,
/// colsample_bylevel, lambda, rounds, boost_seed).
inline void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::lower(detail::trim(trimmed.substr(0, eq)));
    const std::string value = detail::trim(trimmed.substr(eq + 1));
    if (key == "data") cfg.data = value;
    else if (key == "schema") cfg.schema = value;
    else if (key == "boost_schema") cfg.boost_schema = value;
    else if (key == "impute") cfg.impute = ImputeStrategy::parse(value);
    else if (key == "ridge") cfg.ridge = detail::config_number(key, value);
    else if (key == "folds") cfg.folds = detail::config_count(key, value);
    else if (key == "seed") cfg.seed = detail::config_count(key, value);
    else if (key == "trials") cfg.trials = detail::config_count(key, value);
    else if (key == "out") cfg.out = value;
    else if (key == "alpha") cfg.alpha = detail::config_number(key, value);
    else if (key == "eta") cfg.boost.eta = detail::config_number(key, value);
    else if (key == "max_depth") cfg.boost.max_depth = static_cast<int>(detail::config_count(key, value));
    else if (key == "subsample") cfg.boost.subsample = detail::config_number(key, value);
    else if (key == "colsample_bytree") cfg.boost.colsample_bytree = detail::config_number(key, value);
    else if (key == "colsample_bylevel") cfg.boost.colsample_bylevel = detail::config_number(key, value);
    else if (key == "lambda") cfg.boost.lambda = detail::config_number(key, value);
    else if (key == "rounds") cfg.boost.rounds = static_cast<int>(detail::config_count(key, value));
    else if (key == "boost_seed") cfg.boost.seed = detail::config_count(key, value);
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  apply_config_text(cfg, buffer.str());
}

struct LoadedStudy {
  FeatureSchema schema;
  LoadedRecords loaded;
  EncodedDataset data;
};

inline FeatureSchema schema_for(const std::string& path, bool boosted) {
  if (!path.empty()) return FeatureSchema::from_file(path);
  return boosted ? default_boost_schema() : default_linear_schema();
}

inline LoadedStudy load_study(const RunConfig& cfg, bool boosted, std::optional<ImputeStrategy> impute = std::nullopt) {
  if (cfg.data.empty()) throw ArgumentError("no dataset given (--data)");
  LoadedStudy study;
  study.schema = schema_for(boosted ? cfg.boost_schema : cfg.schema, boosted);
  study.loaded = load_csv(cfg.data, study.schema);
  if (study.loaded.records.empty()) throw SchemaError("dataset has no usable rows: " + cfg.data);
  study.data = impute_censoring(study.loaded.records, study.schema, impute.value_or(cfg.impute));
  return study;
}

/// Output directory that creates parents on demand and records what it wrote.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  const std::vector<std::string>& written() const { return written_; }

  void table(const std::string& relative, const csv::Table& t) {
    csv::write_file(prepare(relative).string(), t);
    written_.push_back(relative);
  }

  void text(const std::string& relative, const std::string& content) {
    std::ofstream out(prepare(relative), std::ios::binary);
    if (!out) throw ArgumentError("cannot write " + (root_ / relative).string());
    out << content;
    written_.push_back(relative);
  }

 private:
  std::filesystem::path prepare(const std::string& relative) {
    const auto path = root_ / relative;
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw ArgumentError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    return path;
  }

  std::filesystem::path root_;
  std::vector<std::string> written_;
};

/// File-name-safe version of a feature or column name.
inline std::string slug(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '.';
    if (keep) out.push_back(c);
    else if (out.empty() || out.back() != '_') out.push_back('_');
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "feature" : out;
}

namespace detail {

inline std::string p_cell(const std::optional<double>& p) { return p ? csv::format_number(*p) : ""; }

inline const FeatureTest* find_test(const std::vector<FeatureTest>& tests, const std::string& feature) {
  for (const auto& t : tests) {
    if (t.feature == feature) return &t;
  }
  return nullptr;
}

inline csv::Table ingest_summary(const LoadedStudy& study, const ImputeStrategy& impute) {
  const auto& ds = study.data;
  csv::Table t;
  t.header = {"rows", "columns", "events", "censored", "dropped_untimed", "ignored_censored_time", "impute",
              "censoring_time"};
  t.rows.push_back({std::to_string(ds.rows()), std::to_string(ds.cols()), std::to_string(ds.event_count()),
                    std::to_string(ds.rows() - ds.event_count()), std::to_string(study.loaded.dropped_untimed),
                    std::to_string(study.loaded.ignored_censored_time), impute.describe(),
                    ds.censoring_constant ? csv::format_number(*ds.censoring_constant) : ""});
  return t;
}

inline std::string coefficient_text(const CoxFit& fit) {
  const Eigen::VectorXd se = fit.robust_se();
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %12s %12s %12s %10s\n", "feature", "beta", "exp(beta)", "robust se", "p");
  out << line;
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
    const double z2 = se[j] > 0 ? (fit.beta[j] / se[j]) * (fit.beta[j] / se[j]) : 0.0;
    const double p = se[j] > 0 ? stats::chi_square_sf(z2, 1.0) : 1.0;
    std::snprintf(line, sizeof line, "%-40s %12.4f %12.4f %12.4f %10.4f\n",
                  fit.columns[static_cast<std::size_t>(j)].c_str(), fit.beta[j], std::exp(fit.beta[j]), se[j], p);
    out << line;
  }
  std::snprintf(line, sizeof line, "\nlog partial likelihood %.6f, ridge %g, %d Newton iterations\n",
                fit.log_partial_likelihood, fit.ridge, fit.iterations);
  out << line;
  return out.str();
}

/// Equal-width bins of the observed (event) durations.
inline csv::Table duration_histogram(const EncodedDataset& ds, std::size_t bins = 20) {
  std::vector<double> observed;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    if (ds.events[i]) observed.push_back(ds.durations[i]);
  }
  csv::Table t;
  t.header = {"bin_lo", "bin_hi", "count"};
  if (observed.empty()) return t;
  const double top = *std::max_element(observed.begin(), observed.end());
  const double width = std::max(1.0, std::ceil(top / static_cast<double>(bins)));
  std::vector<std::size_t> counts(bins, 0);
  for (double d : observed) counts[std::min(bins - 1, static_cast<std::size_t>(d / width))]++;
  for (std::size_t b = 0; b < bins; ++b) {
    t.rows.push_back({csv::format_number(width * static_cast<double>(b)), csv::format_number(width * static_cast<double>(b + 1)),
                      std::to_string(counts[b])});
  }
  return t;
}

inline void append_curve(csv::Table& t, const std::string& group, const StepSurvivalCurve& curve) {
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    t.rows.push_back({group, csv::format_number(curve.times[k]), csv::format_number(curve.survival[k]),
                      std::to_string(curve.at_risk[k]), std::to_string(curve.events[k])});
  }
}

/// Kaplan-Meier curves for all rows and for each level of the readability
/// group when present.
inline csv::Table km_curves(const EncodedDataset& ds) {
  csv::Table t;
  t.header = {"group", "time", "survival", "at_risk", "events"};
  const auto all = make_samples(ds.durations, ds.events);
  append_curve(t, "all", kaplan_meier(all));
  for (const auto& g : ds.groups) {
    if (g.feature != "Paper Readability" || g.kind != EncodingKind::one_hot) continue;
    for (std::size_t c = 0; c < g.count; ++c) {
      std::vector<SurvivalSample> members;
      for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (ds.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(g.first + c)) == 1.0) members.push_back(all[i]);
      }
      if (!members.empty()) append_curve(t, g.feature + "=" + g.categories[c], kaplan_meier(members));
    }
  }
  return t;
}

/// Log-rank test of each one-hot level and each two-valued column against the rest.
inline csv::Table log_rank_table(const EncodedDataset& ds) {
  csv::Table t;
  t.header = {"feature", "level", "statistic", "p_value", "observed", "expected"};
  const auto all = make_samples(ds.durations, ds.events);
  for (const auto& g : ds.groups) {
    for (std::size_t c = 0; c < g.count; ++c) {
      const auto col = static_cast<Eigen::Index>(g.first + c);
      std::vector<double> distinct;
      for (std::size_t i = 0; i < ds.rows(); ++i) distinct.push_back(ds.x(static_cast<Eigen::Index>(i), col));
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      if (distinct.size() != 2) continue;
      std::vector<SurvivalSample> a, b;
      for (std::size_t i = 0; i < ds.rows(); ++i) {
        (ds.x(static_cast<Eigen::Index>(i), col) == distinct[1] ? a : b).push_back(all[i]);
      }
      const auto r = log_rank_test(a, b);
      const std::string level = g.kind == EncodingKind::one_hot ? g.categories[c] : csv::format_number(distinct[1]);
      t.rows.push_back({g.feature, level, csv::format_number(r.statistic), csv::format_number(r.p_value),
                        csv::format_number(r.observed_a), csv::format_number(r.expected_a)});
    }
  }
  return t;
}

}  // namespace detail

struct LinearReport {
  CoxFit fit;
  std::vector<FeatureTest> cox_tests;        // robust
  std::vector<FeatureTest> cox_model_tests;  // model-based
  std::optional<LogisticFit> logistic;
  PhTestResult ph_km, ph_rank;
  CvResult cv;
  std::vector<FeatureTest> alternate_tests;  // under the other imputation
  std::string alternate_impute;
  std::vector<std::string> files;
};

inline LinearReport run_linear_report(const RunConfig& cfg) {
  cfg.validate();
  const LoadedStudy study = load_study(cfg, false);
  const EncodedDataset& ds = study.data;
  OutputDir out(std::filesystem::path(cfg.out) / "linear");
  LinearReport report;

  CoxOptions options;
  options.ridge = cfg.ridge;
  report.fit = fit_cox(ds, options);
  report.cox_tests = wald_pvalues(report.fit, true);
  report.cox_model_tests = wald_pvalues(report.fit, false);
  LogisticOptions lopts;
  lopts.ridge = cfg.ridge;
  try {
    report.logistic = fit_logistic(ds, lopts);
  } catch (const ModelError&) {
    report.logistic.reset();  // single-class data: the logistic column stays empty
  }
  report.ph_km = ph_assumption_test(ds, report.fit, TimeTransform::km);
  report.ph_rank = ph_assumption_test(ds, report.fit, TimeTransform::rank);
  report.cv = cross_validate(ds, options, cfg.folds, cfg.seed);

  out.table("ingest_summary.csv", detail::ingest_summary(study, cfg.impute));
  out.table("coefficients.csv", coefficient_table(report.fit, true));
  out.text("coefficients.txt", detail::coefficient_text(report.fit));

  csv::Table pvalues;
  pvalues.header = {"feature", "df", "logistic_p", "cox_p", "cox_model_p"};
  for (const auto& t : report.cox_tests) {
    const FeatureTest* model = detail::find_test(report.cox_model_tests, t.feature);
    const FeatureTest* logit = report.logistic ? detail::find_test(report.logistic->tests, t.feature) : nullptr;
    pvalues.rows.push_back({t.feature, std::to_string(t.df), logit ? detail::p_cell(logit->p_value) : "",
                            detail::p_cell(t.p_value), model ? detail::p_cell(model->p_value) : ""});
  }
  out.table("pvalues.csv", pvalues);

  csv::Table ph;
  ph.header = {"column", "transform", "statistic", "p_value", "flagged"};
  for (const auto* result : {&report.ph_km, &report.ph_rank}) {
    for (const auto& e : result->entries) {
      ph.rows.push_back({e.column, std::string(to_string(e.transform)), csv::format_number(e.statistic),
                         csv::format_number(e.p_value), e.p_value < cfg.alpha ? "1" : "0"});
    }
  }
  out.table("ph_tests.csv", ph);

  const SchoenfeldResiduals residuals = schoenfeld_residuals(ds, report.fit);
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    out.table("residuals/" + slug(ds.columns[j]) + ".csv", residuals.to_table(j));
  }
  out.table("km_curves.csv", detail::km_curves(ds));
  out.table("logrank.csv", detail::log_rank_table(ds));
  out.table("duration_histogram.csv", detail::duration_histogram(ds));
  out.table("cv_linear.csv", report.cv.to_table());

  // Sensitivity of the significance calls to the censoring-time imputation.
  if (cfg.impute.kind != ImputeStrategy::Kind::constant) {
    const ImputeStrategy other =
        cfg.impute.kind == ImputeStrategy::Kind::mean ? ImputeStrategy::median() : ImputeStrategy::mean();
    const LoadedStudy alt = load_study(cfg, false, other);
    report.alternate_tests = wald_pvalues(fit_cox(alt.data, options), true);
    report.alternate_impute = other.describe();
    csv::Table sens;
    sens.header = {"feature", "p_" + cfg.impute.describe(), "p_" + other.describe(), "significant_" + cfg.impute.describe(),
                   "significant_" + other.describe()};
    for (const auto& t : report.cox_tests) {
      const FeatureTest* a = detail::find_test(report.alternate_tests, t.feature);
      const auto sig = [&](const FeatureTest* x) { return x && x->p_value && *x->p_value < cfg.alpha ? "1" : "0"; };
      sens.rows.push_back({t.feature, detail::p_cell(t.p_value), a ? detail::p_cell(a->p_value) : "", sig(&t), sig(a)});
    }
    out.table("imputation_sensitivity.csv", sens);
  }
  for (const auto& f : out.written()) report.files.push_back("linear/" + f);
  return report;
}

struct BoostedReport {
  BoostConfig config;
  std::optional<SearchResult> search;
  TreeEnsemble model;
  CvResult cv;
  std::optional<ShapAttribution> shap;
  std::vector<std::string> files;
};

/// Searches (when a trial budget is set), fits, cross-validates and, when
/// asked, exports SHAP summary and dependence data.
inline BoostedReport run_boosted_report(const RunConfig& cfg, bool with_shap = true) {
  cfg.validate();
  const LoadedStudy study = load_study(cfg, true);
  const EncodedDataset& ds = study.data;
  OutputDir out(std::filesystem::path(cfg.out) / "boost");
  BoostedReport report;

  report.config = cfg.boost;
  if (cfg.trials > 0) {
    report.search = hyperparameter_search(ds, cfg.trials, cfg.seed, cfg.folds, cfg.seed);
    report.config = report.search->best;
    out.table("trials.csv", report.search->to_table());
  }
  report.model = fit_boosted(ds, report.config);
  report.cv = cross_validate(ds, report.config, cfg.folds, cfg.seed);
  out.text("model.json", to_json(report.model).dump(2) + "\n");
  out.table("cv_scores.csv", report.cv.to_table());

  if (with_shap) {
    report.shap = shap_interactions(report.model, ds.x, ds.x);
    out.table("shap_summary.csv", summary_table(*report.shap));
    out.table("shap_values.csv", values_table(*report.shap));
    for (const auto& feature : study.schema.dependence_features) {
      if (!report.shap->feature_index(feature)) continue;
      out.table("shap_dependence/" + slug(feature) + ".csv", dependence_export(*report.shap, feature).to_table());
    }
  }
  for (const auto& f : out.written()) report.files.push_back("boost/" + f);
  return report;
}

/// Search only; writes the trial log and the winning configuration.
inline SearchResult run_search(const RunConfig& cfg) {
  cfg.validate();
  const LoadedStudy study = load_study(cfg, true);
  const std::size_t budget = cfg.trials > 0 ? cfg.trials : 100;
  SearchResult result = hyperparameter_search(study.data, budget, cfg.seed, cfg.folds, cfg.seed);
  OutputDir out(std::filesystem::path(cfg.out) / "search");
  out.table("trials.csv", result.to_table());
  out.text("best_config.json", to_json(result.best).dump(2) + "\n");
  return result;
}

/// Encoded tables for both layouts, for auditing the ingest step.
inline std::vector<std::string> run_ingest(const RunConfig& cfg) {
  if (cfg.data.empty()) throw ArgumentError("no dataset given (--data)");
  OutputDir out(std::filesystem::path(cfg.out) / "ingest");
  const LoadedStudy linear = load_study(cfg, false);
  const LoadedStudy boosted = load_study(cfg, true);
  out.table("summary.csv", detail::ingest_summary(linear, cfg.impute));
  out.table("encoded_linear.csv", to_table(linear.data));
  out.table("encoded_boost.csv", to_table(boosted.data));
  std::vector<std::string> files;
  for (const auto& f : out.written()) files.push_back("ingest/" + f);
  return files;
}

struct PlotReport {
  std::vector<std::string> written;
  std::vector<std::string> missing;
};

namespace detail {

inline std::optional<csv::Table> try_read(const std::filesystem::path& path, std::vector<std::string>& missing,
                                          const std::string& relative) {
  if (!std::filesystem::exists(path)) {
    missing.push_back(relative);
    return std::nullopt;
  }
  return csv::read_file(path.string());
}

inline double cell_number(const csv::Table& t, const csv::Row& row, std::string_view column) {
  const auto idx = t.column(column);
  if (!idx || *idx >= row.size()) throw SchemaError("plot input lacks column '" + std::string(column) + "'");
  return csv::parse_number(row[*idx]).value_or(std::numeric_limits<double>::quiet_NaN());
}

inline std::string cell(const csv::Table& t, const csv::Row& row, std::string_view column) {
  const auto idx = t.column(column);
  if (!idx || *idx >= row.size()) throw SchemaError("plot input lacks column '" + std::string(column) + "'");
  return row[*idx];
}

}  // namespace detail

/// Renders SVG views of the tables under `out_dir`. Missing inputs are listed
/// and skipped.
inline PlotReport emit_plots(const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  OutputDir out(root / "plots");
  PlotReport report;

  if (auto t = detail::try_read(root / "linear/duration_histogram.csv", report.missing, "linear/duration_histogram.csv")) {
    std::vector<svg::Bin> bins;
    for (const auto& row : t->rows) {
      bins.push_back({detail::cell_number(*t, row, "bin_lo"), detail::cell_number(*t, row, "bin_hi"),
                      detail::cell_number(*t, row, "count"),
                      "[" + detail::cell(*t, row, "bin_lo") + ", " + detail::cell(*t, row, "bin_hi") +
                          "): " + detail::cell(*t, row, "count")});
    }
    out.text("duration_histogram.svg", svg::histogram(bins, "Time to reproduce (observed rows)", "days"));
  }

  if (auto t = detail::try_read(root / "linear/km_curves.csv", report.missing, "linear/km_curves.csv")) {
    std::vector<svg::Curve> curves;
    for (const auto& row : t->rows) {
      const std::string group = detail::cell(*t, row, "group");
      if (curves.empty() || curves.back().name != group) curves.push_back({group, {}, {}, {}});
      curves.back().times.push_back(detail::cell_number(*t, row, "time"));
      curves.back().survival.push_back(detail::cell_number(*t, row, "survival"));
      curves.back().labels.push_back(detail::cell(*t, row, "time") + ": " + detail::cell(*t, row, "survival"));
    }
    out.text("km_curves.svg", svg::step_curves(curves, "Kaplan-Meier estimate"));
  }

  auto summary = detail::try_read(root / "boost/shap_summary.csv", report.missing, "boost/shap_summary.csv");
  auto values = detail::try_read(root / "boost/shap_values.csv", report.missing, "boost/shap_values.csv");
  if (summary && values) {
    std::map<std::string, std::vector<svg::Point>> by_feature;
    for (const auto& row : values->rows) {
      const std::string feature = detail::cell(*values, row, "feature");
      by_feature[feature].push_back({detail::cell_number(*values, row, "shap"), 0.0,
                                     detail::cell_number(*values, row, "feature_value"),
                                     feature + " = " + detail::cell(*values, row, "feature_value") +
                                         ", shap " + detail::cell(*values, row, "shap")});
    }
    std::vector<std::pair<std::string, std::vector<svg::Point>>> rows;
    for (const auto& row : summary->rows) {
      const std::string feature = detail::cell(*summary, row, "feature");
      rows.emplace_back(feature + " (" + detail::cell(*summary, row, "mean_abs_shap") + ")", by_feature[feature]);
    }
    out.text("shap_summary.svg", svg::shap_summary(rows, "SHAP values per feature"));
  }

  const fs::path dep_dir = root / "boost/shap_dependence";
  if (!fs::is_directory(dep_dir)) {
    report.missing.push_back("boost/shap_dependence/");
  } else {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dep_dir)) {
      if (entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      const csv::Table t = csv::read_file(file.string());
      if (t.header.size() < 4) throw SchemaError("dependence table has too few columns: " + file.string());
      const std::string& feature = t.header[1];
      const std::string& color = t.header[3];
      std::vector<svg::Point> pts;
      for (const auto& row : t.rows) {
        pts.push_back({detail::cell_number(t, row, feature), detail::cell_number(t, row, "shap"),
                       detail::cell_number(t, row, color),
                       feature + " = " + detail::cell(t, row, feature) + ", shap " + detail::cell(t, row, "shap") + ", " +
                           color + " = " + detail::cell(t, row, color)});
      }
      out.text("shap_dependence/" + file.stem().string() + ".svg",
               svg::scatter(pts, feature, "SHAP value for " + feature, color, "Dependence: " + feature));
    }
  }
  for (const auto& f : out.written()) report.written.push_back("plots/" + f);
  return report;
}

struct FullReport {
  LinearReport linear;
  BoostedReport boosted;
  PlotReport plots;
};

inline FullReport run_all(const RunConfig& cfg) {
  FullReport report;
  report.linear = run_linear_report(cfg);
  report.boosted = run_boosted_report(cfg, true);
  report.plots = emit_plots(cfg.out);
  return report;
}

}  // namespace reprosurv
