#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "reprosurv/report.hpp"
#include "reprosurv/synthetic.hpp"

using namespace reprosurv;
namespace fs = std::filesystem;

namespace {

class ReportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("reprosurv_report_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    data_ = (root_ / "study.csv").string();
    std::ofstream(data_, std::ios::binary) << synthetic_study_csv({});
  }
  void TearDown() override { fs::remove_all(root_); }

  RunConfig config(const std::string& out) const {
    RunConfig cfg;
    cfg.data = data_;
    cfg.out = (root_ / out).string();
    cfg.folds = 5;
    cfg.boost.rounds = 20;
    return cfg;
  }

  fs::path root_;
  std::string data_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(RunConfigTest, ParsesKeysAndComments) {
  RunConfig cfg;
  apply_config_text(cfg, "# comment\n data = a.csv \nRIDGE=0.5\nfolds = 4 # trailing\nimpute = median\neta = 0.1\n"
                         "max_depth = 3\nrounds = 7\nboost_seed = 9\n\n");
  EXPECT_EQ(cfg.data, "a.csv");
  EXPECT_DOUBLE_EQ(cfg.ridge, 0.5);
  EXPECT_EQ(cfg.folds, 4u);
  EXPECT_EQ(cfg.impute.describe(), "median");
  EXPECT_DOUBLE_EQ(cfg.boost.eta, 0.1);
  EXPECT_EQ(cfg.boost.max_depth, 3);
  EXPECT_EQ(cfg.boost.rounds, 7);
  EXPECT_EQ(cfg.boost.seed, 9u);
}

TEST(RunConfigTest, RejectsUnknownKeysAndBadValues) {
  RunConfig cfg;
  EXPECT_THROW(apply_config_text(cfg, "colour = blue\n"), ConfigError);
  EXPECT_THROW(apply_config_text(cfg, "folds = 2.5\n"), ConfigError);
  EXPECT_THROW(apply_config_text(cfg, "ridge = lots\n"), ConfigError);
  EXPECT_THROW(apply_config_text(cfg, "just words\n"), ConfigError);
  EXPECT_THROW(apply_config_file(cfg, "/nonexistent/config.conf"), ConfigError);
}

TEST(RunConfigTest, ValidateChecksRanges) {
  RunConfig cfg;
  EXPECT_THROW(cfg.validate(), ArgumentError);  // no data
  cfg.data = "x.csv";
  EXPECT_NO_THROW(cfg.validate());
  cfg.folds = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.folds = 10;
  cfg.alpha = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Slug, IsFileNameSafe) {
  const auto s = slug("Paper Readability_Excellent / x");
  EXPECT_EQ(s.find_first_of(" /\\:"), std::string::npos);
  EXPECT_FALSE(s.empty());
}

TEST_F(ReportTest, FullRunWritesEveryTableAndPlot) {
  const auto cfg = config("out");
  const auto r = run_all(cfg);
  EXPECT_TRUE(r.plots.missing.empty());
  for (const char* f : {"linear/coefficients.csv", "linear/pvalues.csv", "linear/ph_tests.csv", "linear/km_curves.csv",
                        "linear/logrank.csv", "linear/duration_histogram.csv", "linear/cv_linear.csv",
                        "linear/imputation_sensitivity.csv", "boost/model.json", "boost/cv_scores.csv",
                        "boost/shap_summary.csv", "boost/shap_values.csv", "plots/km_curves.svg",
                        "plots/duration_histogram.svg", "plots/shap_summary.svg"}) {
    EXPECT_TRUE(fs::exists(fs::path(cfg.out) / f)) << f;
  }
  EXPECT_FALSE(fs::is_empty(fs::path(cfg.out) / "boost/shap_dependence"));
  EXPECT_FALSE(fs::is_empty(fs::path(cfg.out) / "plots/shap_dependence"));
  EXPECT_NE(slurp(fs::path(cfg.out) / "plots/km_curves.svg").find("<title>"), std::string::npos);
}

TEST_F(ReportTest, RepeatedRunsAreByteIdentical) {
  const auto a = config("a"), b = config("b");
  run_all(a);
  run_all(b);
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.out)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a.out);
    ASSERT_TRUE(fs::exists(fs::path(b.out) / rel)) << rel;
    EXPECT_EQ(slurp(entry.path()), slurp(fs::path(b.out) / rel)) << rel;
    ++compared;
  }
  EXPECT_GT(compared, 20u);
}

TEST_F(ReportTest, PlotsListMissingInputs) {
  const auto r = emit_plots((root_ / "empty").string());
  EXPECT_TRUE(r.written.empty());
  EXPECT_EQ(r.missing.size(), 5u);
}

TEST_F(ReportTest, SearchWritesTrialsAndBestConfig) {
  auto cfg = config("search");
  cfg.trials = 3;
  const auto r = run_search(cfg);
  EXPECT_EQ(r.trials.size(), 3u);
  EXPECT_TRUE(fs::exists(fs::path(cfg.out) / "search/trials.csv"));
  const auto best = boost_config_from_json(nlohmann::json::parse(slurp(fs::path(cfg.out) / "search/best_config.json")));
  EXPECT_EQ(to_json(best).dump(), to_json(r.best).dump());
}

TEST_F(ReportTest, HeaderOnlyDataIsADataError) {
  auto cfg = config("bad");
  const auto text = synthetic_study_csv({});
  std::ofstream(data_, std::ios::binary) << text.substr(0, text.find('\n') + 1);
  EXPECT_THROW(run_linear_report(cfg), SchemaError);
}

TEST_F(ReportTest, MissingDataFileIsAnArgumentError) {
  auto cfg = config("missing");
  cfg.data = (root_ / "nope.csv").string();
  EXPECT_THROW(run_linear_report(cfg), ArgumentError);
}

TEST_F(ReportTest, ShippedSchemaFilesMatchTheBuiltInLayouts) {
  RunConfig builtin = config("schemas");
  RunConfig shipped = builtin;
  shipped.schema = REPROSURV_SOURCE_DIR "/config/linear_schema.conf";
  shipped.boost_schema = REPROSURV_SOURCE_DIR "/config/boost_schema.conf";
  apply_config_file(shipped, REPROSURV_SOURCE_DIR "/config/run.conf");
  shipped.data = builtin.data;
  shipped.out = builtin.out;
  for (bool boosted : {false, true}) {
    const auto a = load_study(builtin, boosted), b = load_study(shipped, boosted);
    EXPECT_EQ(a.data.columns, b.data.columns);
    EXPECT_EQ(a.data.x, b.data.x);
    EXPECT_EQ(a.schema.dependence_features, b.schema.dependence_features);
  }
  EXPECT_EQ(to_json(shipped.boost).dump(), to_json(BoostConfig::tuned_preset()).dump());
}
