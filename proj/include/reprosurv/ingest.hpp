#pragma once

// Study-table ingestion: declarative feature schema, CSV loading, encoding to a
// dense design matrix, and imputation of censoring times for failed attempts.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "reprosurv/csv.hpp"
#include "reprosurv/error.hpp"
#include "reprosurv/stats.hpp"

namespace reprosurv {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

/// Category labels compare case-insensitively after trimming.
inline bool same_label(std::string_view a, std::string_view b) {
  return lower(trim(a)) == lower(trim(b));
}

}  // namespace detail

enum class EncodingKind { numeric, per_page, ordinal, one_hot, skip };

inline std::string_view to_string(EncodingKind kind) {
  switch (kind) {
    case EncodingKind::numeric: return "numeric";
    case EncodingKind::per_page: return "per_page";
    case EncodingKind::ordinal: return "ordinal";
    case EncodingKind::one_hot: return "onehot";
    case EncodingKind::skip: return "skip";
  }
  return "?";
}

struct OrdinalLevel {
  std::string label;
  double value = 0.0;
};

struct Category {
  std::string label;                 // spelling used for the one-hot column name
  std::vector<std::string> aliases;  // further spellings accepted in the data
};

struct EncodingRule {
  std::string source;  // CSV header
  EncodingKind kind = EncodingKind::numeric;
  std::string output;  // column name, or one-hot column prefix
  std::vector<OrdinalLevel> levels;
  std::vector<Category> categories;

  bool is_categorical() const {
    return kind == EncodingKind::ordinal || kind == EncodingKind::one_hot;
  }
  std::size_t width() const {
    switch (kind) {
      case EncodingKind::skip: return 0;
      case EncodingKind::one_hot: return categories.size();
      default: return 1;
    }
  }
};

/// Ordered feature encodings plus the columns carrying the survival label.
///
/// Text form, one `key = value` per line, `#` starts a comment:
///
///     event_column = Reproduced
///     event_true = 1, Yes
///     event_false = 0, No
///     duration_column = Days to Reproduce
///     page_column = Pages
///     feature = <source header> | <rule> [| <output name>]
///     dependence = <encoded column>, <encoded column>, ...
///
/// where <rule> is one of `numeric`, `per_page`, `binary`, `skip`,
/// `ordinal(Low=0, Ok=1, ...)` or `onehot(No, Partial, Yes=Y=yes)`. In a one-hot
/// list, `Label=alias` accepts extra spellings for a category. `binary` is an
/// ordinal rule with the usual yes/no, true/false, 1/0 spellings.
struct FeatureSchema {
  std::vector<EncodingRule> features;
  std::string event_column = "Reproduced";
  std::vector<std::string> event_true{"1", "yes", "true", "y"};
  std::vector<std::string> event_false{"0", "no", "false", "n"};
  std::string duration_column = "Days to Reproduce";
  std::string page_column = "Pages";
  std::vector<std::string> dependence_features;

  std::size_t column_count() const {
    std::size_t total = 0;
    for (const auto& f : features) total += f.width();
    return total;
  }

  const EncodingRule* find(std::string_view source) const {
    for (const auto& f : features) {
      if (f.source == source) return &f;
    }
    return nullptr;
  }

  static FeatureSchema parse(std::string_view text);

  static FeatureSchema from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schema file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
  }
};

namespace detail {

inline EncodingRule parse_rule(const std::string& spec, std::size_t line_no) {
  const auto fields = split(spec, '|');
  if (fields.size() < 2 || fields.size() > 3 || fields[0].empty()) {
    throw ConfigError("schema line " + std::to_string(line_no) +
                      ": expected 'feature = source | rule [| output]'");
  }
  EncodingRule rule;
  rule.source = fields[0];
  rule.output = fields.size() == 3 && !fields[2].empty() ? fields[2] : fields[0];

  const std::string& body = fields[1];
  const auto open = body.find('(');
  const std::string name = lower(trim(body.substr(0, open)));
  std::string args;
  if (open != std::string::npos) {
    const auto close = body.rfind(')');
    if (close == std::string::npos || close < open) {
      throw ConfigError("schema line " + std::to_string(line_no) + ": unbalanced parentheses");
    }
    args = body.substr(open + 1, close - open - 1);
  }

  auto bad = [&](const std::string& why) {
    return ConfigError("schema line " + std::to_string(line_no) + ": " + why);
  };

  if (name == "numeric") {
    rule.kind = EncodingKind::numeric;
  } else if (name == "per_page") {
    rule.kind = EncodingKind::per_page;
  } else if (name == "skip") {
    rule.kind = EncodingKind::skip;
  } else if (name == "binary") {
    rule.kind = EncodingKind::ordinal;
    for (const char* label : {"0", "no", "false", "n"}) rule.levels.push_back({label, 0.0});
    for (const char* label : {"1", "yes", "true", "y"}) rule.levels.push_back({label, 1.0});
  } else if (name == "ordinal") {
    rule.kind = EncodingKind::ordinal;
    for (const auto& item : split(args, ',')) {
      const auto eq = item.rfind('=');
      if (eq == std::string::npos) throw bad("ordinal level '" + item + "' lacks '=value'");
      const auto value = csv::parse_number(item.substr(eq + 1));
      if (!value) throw bad("ordinal level '" + item + "' has a non-numeric value");
      rule.levels.push_back({trim(item.substr(0, eq)), *value});
    }
    if (rule.levels.empty()) throw bad("ordinal rule needs at least one level");
  } else if (name == "onehot") {
    rule.kind = EncodingKind::one_hot;
    for (const auto& item : split(args, ',')) {
      auto spellings = split(item, '=');
      if (spellings.front().empty()) throw bad("empty one-hot category");
      Category category{spellings.front(), {}};
      category.aliases.assign(spellings.begin() + 1, spellings.end());
      rule.categories.push_back(std::move(category));
    }
    if (rule.categories.empty()) throw bad("onehot rule needs at least one category");
  } else {
    throw bad("unknown encoding rule '" + name + "'");
  }
  if (rule.kind != EncodingKind::ordinal && rule.kind != EncodingKind::one_hot && !args.empty()) {
    throw bad("rule '" + name + "' takes no arguments");
  }
  return rule;
}

}  // namespace detail

inline FeatureSchema FeatureSchema::parse(std::string_view text) {
  FeatureSchema schema;
  schema.features.clear();
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("schema line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = detail::lower(detail::trim(trimmed.substr(0, eq)));
    const std::string value = detail::trim(trimmed.substr(eq + 1));
    if (key == "feature") {
      schema.features.push_back(detail::parse_rule(value, line_no));
    } else if (key == "event_column") {
      schema.event_column = value;
    } else if (key == "event_true") {
      schema.event_true = detail::split(value, ',');
    } else if (key == "event_false") {
      schema.event_false = detail::split(value, ',');
    } else if (key == "duration_column") {
      schema.duration_column = value;
    } else if (key == "page_column") {
      schema.page_column = value;
    } else if (key == "dependence") {
      schema.dependence_features = detail::split(value, ',');
    } else {
      throw ConfigError("schema line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (schema.features.empty()) throw ConfigError("schema declares no features");
  for (std::size_t i = 0; i < schema.features.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (schema.features[i].source == schema.features[j].source) {
        throw ConfigError("feature '" + schema.features[i].source + "' declared twice");
      }
    }
  }
  return schema;
}

// Defaults use the study-table column names; a renamed CSV header only
// needs the left-hand side of a `feature` line edited.
inline constexpr std::string_view kSchemaCommon = R"(
event_column = Reproduced
event_true = 1, Yes, yes, True, true
event_false = 0, No, no, False, false
duration_column = Days to Reproduce
page_column = Pages
feature = Year Published | numeric | Year
feature = Year Attempted | numeric
feature = Has Appendix | binary
feature = Uses Exemplar Toy Problem | binary
feature = Exact Compute Used | binary
feature = Looks Intimidating | binary
feature = Data Available | binary
feature = Code Available | binary | Author Code Available
feature = Number of Authors | numeric
feature = Pages | numeric
feature = Num References | per_page | Normalized Num References
feature = Number of Equations | per_page | Normalized Number of Equations
feature = Number of Proofs | per_page | Normalized Number of Proofs
feature = Number of Tables | per_page | Normalized Number of Tables
feature = Number of Graphs/Plots | per_page | Normalized Number of Graphs/Plots
feature = Number of Other Figures | per_page | Normalized Number of Other Figures
feature = Conceptualization Figures | per_page | Normalized Conceptualization Figures
feature = Hyperparameters Specified | onehot(No, Partial, Yes)
)";

/// One-hot layout of the linear hazard model (34 encoded columns).
inline std::string default_linear_schema_text() {
  return std::string(kSchemaCommon) + R"(feature = Paper Readability | onehot(Excellent, Good, Ok, Low)
feature = Algorithm Difficulty | onehot(High, Medium, Low) | Algo Difficulty
feature = Pseudo Code | onehot(Code-Like, Yes, Step-Code, No=None)
feature = Rigor vs Empirical | onehot(Balance, Empirical, Theory)
feature = Compute Needed | skip
)";
}

/// Ordinal layout used by the boosted model.
inline std::string default_boost_schema_text() {
  return std::string(kSchemaCommon) + R"(feature = Paper Readability | ordinal(Low=0, Ok=1, Good=2, Excellent=3)
feature = Algorithm Difficulty | ordinal(Low=0, Medium=1, High=2)
feature = Pseudo Code | ordinal(None=0, No=0, Step-Code=1, Yes=2, Code-like=3)
feature = Rigor vs Empirical | onehot(Balance, Empirical, Theory)
feature = Compute Needed | skip
dependence = Normalized Number of Equations, Pages, Normalized Number of Proofs, Normalized Num References, Normalized Number of Tables, Normalized Number of Graphs/Plots, Year, Year Attempted, Normalized Conceptualization Figures
)";
}

inline FeatureSchema default_linear_schema() { return FeatureSchema::parse(default_linear_schema_text()); }
inline FeatureSchema default_boost_schema() { return FeatureSchema::parse(default_boost_schema_text()); }

using RawValue = std::variant<double, std::string>;

struct RawPaperRecord {
  std::map<std::string, RawValue> features;  // keyed by source header
  bool reproduced = false;
  std::optional<double> duration_days;
  std::optional<double> pages;  // raw page count, before any transform
  std::size_t source_row = 0;   // 1-based data row in the CSV
};

struct LoadedRecords {
  std::vector<RawPaperRecord> records;
  std::size_t dropped_untimed = 0;       // reproduced rows with no recorded duration
  std::size_t ignored_censored_time = 0; // censored rows whose source duration was discarded
};

/// Parses CSV text against `schema`. Categorical cells are kept as strings,
/// numeric and per-page cells are parsed.
inline LoadedRecords load_csv_text(std::string_view text, const FeatureSchema& schema) {
  const csv::Table table = csv::parse(text);
  if (table.header.empty()) throw SchemaError("CSV has no header row");

  auto require = [&](const std::string& name) {
    const auto idx = table.column(name);
    if (!idx) throw SchemaError("missing required column '" + name + "'");
    return *idx;
  };

  const std::size_t event_col = require(schema.event_column);
  const std::size_t duration_col = require(schema.duration_column);
  bool needs_pages = false;
  std::vector<std::pair<const EncodingRule*, std::size_t>> columns;
  for (const auto& rule : schema.features) {
    if (rule.kind == EncodingKind::skip) continue;
    columns.emplace_back(&rule, require(rule.source));
    needs_pages = needs_pages || rule.kind == EncodingKind::per_page;
  }
  const std::optional<std::size_t> page_col =
      needs_pages ? std::optional<std::size_t>(require(schema.page_column)) : table.column(schema.page_column);

  auto cell = [&](const csv::Row& row, std::size_t col, std::size_t row_no) -> const std::string& {
    if (col >= row.size()) {
      throw ParseError("row " + std::to_string(row_no) + " is missing column '" + table.header[col] + "'",
                       row_no, table.header[col]);
    }
    return row[col];
  };
  auto number = [&](const csv::Row& row, std::size_t col, std::size_t row_no) {
    const std::string& text = cell(row, col, row_no);
    const auto value = csv::parse_number(text);
    if (!value) {
      throw ParseError("malformed number '" + text + "' at row " + std::to_string(row_no) + ", column '" +
                           table.header[col] + "'",
                       row_no, table.header[col]);
    }
    return *value;
  };

  LoadedRecords out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t row_no = r + 1;
    RawPaperRecord record;
    record.source_row = row_no;

    const std::string& event_text = cell(row, event_col, row_no);
    auto matches = [&](const std::vector<std::string>& labels) {
      return std::any_of(labels.begin(), labels.end(),
                         [&](const std::string& l) { return detail::same_label(l, event_text); });
    };
    if (matches(schema.event_true)) {
      record.reproduced = true;
    } else if (matches(schema.event_false)) {
      record.reproduced = false;
    } else {
      throw ParseError("unrecognized event value '" + event_text + "' at row " + std::to_string(row_no),
                       row_no, schema.event_column);
    }

    if (!detail::trim(cell(row, duration_col, row_no)).empty()) {
      const double days = number(row, duration_col, row_no);
      if (!(days > 0.0)) {
        throw ParseError("duration must be positive at row " + std::to_string(row_no), row_no,
                         schema.duration_column);
      }
      if (record.reproduced) {
        record.duration_days = days;
      } else {
        ++out.ignored_censored_time;
      }
    }
    if (record.reproduced && !record.duration_days) {
      ++out.dropped_untimed;
      continue;
    }

    if (page_col) {
      const std::string& text = cell(row, *page_col, row_no);
      if (needs_pages || !detail::trim(text).empty()) record.pages = number(row, *page_col, row_no);
    }
    for (const auto& [rule, col] : columns) {
      if (rule->is_categorical()) {
        record.features[rule->source] = detail::trim(cell(row, col, row_no));
      } else {
        record.features[rule->source] = number(row, col, row_no);
      }
    }
    out.records.push_back(std::move(record));
  }
  return out;
}

inline LoadedRecords load_csv(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open dataset: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_csv_text(buffer.str(), schema);
}

/// Encoded columns that came from one source feature.
struct ColumnGroup {
  std::string feature;  // source feature name
  EncodingKind kind = EncodingKind::numeric;
  std::size_t first = 0;
  std::size_t count = 1;
  std::vector<std::string> categories;  // one-hot labels, in column order
};

struct EncodedDataset {
  Eigen::MatrixXd x;               // n x d
  std::vector<double> durations;   // days; censored rows hold the imputed constant
  std::vector<bool> events;        // true = reproduced
  std::vector<std::string> columns;
  std::vector<ColumnGroup> groups;
  std::optional<double> censoring_constant;

  std::size_t rows() const { return durations.size(); }
  std::size_t cols() const { return columns.size(); }

  std::size_t event_count() const {
    return static_cast<std::size_t>(std::count(events.begin(), events.end(), true));
  }

  /// Positive = event time, negative = censored at |label|.
  std::vector<double> signed_labels() const {
    std::vector<double> labels(rows());
    for (std::size_t i = 0; i < rows(); ++i) labels[i] = events[i] ? durations[i] : -durations[i];
    return labels;
  }

  std::optional<std::size_t> column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    return std::nullopt;
  }

  EncodedDataset subset(const std::vector<std::size_t>& indices) const {
    EncodedDataset out;
    out.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
    out.durations.reserve(indices.size());
    out.events.reserve(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
      out.x.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(indices[k]));
      out.durations.push_back(durations[indices[k]]);
      out.events.push_back(events[indices[k]]);
    }
    out.columns = columns;
    out.groups = groups;
    out.censoring_constant = censoring_constant;
    return out;
  }
};

namespace detail {

inline double ordinal_value(const EncodingRule& rule, const std::string& label) {
  for (const auto& level : rule.levels) {
    if (same_label(level.label, label)) return level.value;
  }
  throw EncodingError("feature '" + rule.source + "': unseen category '" + label + "'");
}

inline std::size_t category_index(const EncodingRule& rule, const std::string& label) {
  for (std::size_t c = 0; c < rule.categories.size(); ++c) {
    const auto& category = rule.categories[c];
    if (same_label(category.label, label)) return c;
    for (const auto& alias : category.aliases) {
      if (same_label(alias, label)) return c;
    }
  }
  throw EncodingError("feature '" + rule.source + "': unseen category '" + label + "'");
}

}  // namespace detail

/// Builds the design matrix. Censored durations are left NaN until imputed.
inline EncodedDataset encode(const std::vector<RawPaperRecord>& records, const FeatureSchema& schema) {
  EncodedDataset ds;
  for (const auto& rule : schema.features) {
    if (rule.kind == EncodingKind::skip) continue;
    ColumnGroup group{rule.source, rule.kind, ds.columns.size(), rule.width(), {}};
    if (rule.kind == EncodingKind::one_hot) {
      for (const auto& category : rule.categories) {
        group.categories.push_back(category.label);
        ds.columns.push_back(rule.output + "_" + category.label);
      }
    } else {
      ds.columns.push_back(rule.output);
    }
    ds.groups.push_back(std::move(group));
  }

  const auto n = static_cast<Eigen::Index>(records.size());
  ds.x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(ds.columns.size()));
  ds.durations.resize(records.size());
  ds.events.resize(records.size());

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& record = records[static_cast<std::size_t>(i)];
    ds.events[i] = record.reproduced;
    ds.durations[i] = record.reproduced && record.duration_days ? *record.duration_days : std::nan("");

    std::size_t g = 0;
    for (const auto& rule : schema.features) {
      if (rule.kind == EncodingKind::skip) continue;
      const auto col = static_cast<Eigen::Index>(ds.groups[g++].first);
      const auto it = record.features.find(rule.source);
      if (it == record.features.end()) {
        throw EncodingError("row " + std::to_string(record.source_row) + " has no value for '" + rule.source + "'");
      }
      const RawValue& value = it->second;

      auto as_number = [&]() -> double {
        if (const double* d = std::get_if<double>(&value)) return *d;
        const auto parsed = csv::parse_number(std::get<std::string>(value));
        if (!parsed) {
          throw EncodingError("feature '" + rule.source + "' expects a number, got '" +
                              std::get<std::string>(value) + "'");
        }
        return *parsed;
      };
      auto as_label = [&]() -> std::string {
        if (const std::string* s = std::get_if<std::string>(&value)) return *s;
        return csv::format_number(std::get<double>(value));
      };

      switch (rule.kind) {
        case EncodingKind::numeric:
          ds.x(i, col) = as_number();
          break;
        case EncodingKind::per_page: {
          if (!record.pages || !(*record.pages > 0.0)) {
            throw EncodingError("row " + std::to_string(record.source_row) +
                                ": per-page feature '" + rule.source + "' needs a positive page count");
          }
          ds.x(i, col) = as_number() / *record.pages;
          break;
        }
        case EncodingKind::ordinal:
          ds.x(i, col) = detail::ordinal_value(rule, as_label());
          break;
        case EncodingKind::one_hot:
          ds.x(i, col + static_cast<Eigen::Index>(detail::category_index(rule, as_label()))) = 1.0;
          break;
        case EncodingKind::skip:
          break;
      }
    }
  }
  return ds;
}

struct ImputeStrategy {
  enum class Kind { mean, median, constant };
  Kind kind = Kind::mean;
  double value = 0.0;

  static ImputeStrategy mean() { return {Kind::mean, 0.0}; }
  static ImputeStrategy median() { return {Kind::median, 0.0}; }
  static ImputeStrategy constant(double c) { return {Kind::constant, c}; }

  /// Accepts `mean`, `median` or `const:N`.
  static ImputeStrategy parse(std::string_view text) {
    const std::string t = detail::lower(detail::trim(text));
    if (t == "mean") return mean();
    if (t == "median") return median();
    if (t.rfind("const:", 0) == 0) {
      const auto c = csv::parse_number(t.substr(6));
      if (!c || !(*c > 0.0)) throw ConfigError("imputation constant must be a positive number: " + t);
      return constant(*c);
    }
    throw ConfigError("unknown imputation strategy '" + std::string(text) + "' (mean|median|const:N)");
  }

  std::string describe() const {
    switch (kind) {
      case Kind::mean: return "mean";
      case Kind::median: return "median";
      case Kind::constant: return "const:" + csv::format_number(value);
    }
    return "?";
  }
};

/// Duration assigned to every censored record under `strategy`.
inline double censoring_time(const std::vector<RawPaperRecord>& records, const ImputeStrategy& strategy) {
  if (strategy.kind == ImputeStrategy::Kind::constant) {
    if (!(strategy.value > 0.0)) throw ConfigError("imputation constant must be positive");
    return strategy.value;
  }
  std::vector<double> observed;
  for (const auto& r : records) {
    if (r.reproduced && r.duration_days) observed.push_back(*r.duration_days);
  }
  if (observed.empty()) {
    throw ConfigError("imputation by " + strategy.describe() + " needs at least one observed duration");
  }
  if (strategy.kind == ImputeStrategy::Kind::median) return stats::median(std::move(observed));
  return std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
}

/// Encodes `records` and fills censored durations with the strategy's constant.
inline EncodedDataset impute_censoring(const std::vector<RawPaperRecord>& records, const FeatureSchema& schema,
                                       const ImputeStrategy& strategy) {
  const double constant = censoring_time(records, strategy);
  EncodedDataset ds = encode(records, schema);
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    if (!ds.events[i]) ds.durations[i] = constant;
  }
  ds.censoring_constant = constant;
  return ds;
}

/// Category label of a one-hot group for one row.
inline std::string decode_category(const EncodedDataset& ds, const ColumnGroup& group, std::size_t row) {
  if (group.kind != EncodingKind::one_hot) throw ArgumentError("group '" + group.feature + "' is not one-hot");
  for (std::size_t c = 0; c < group.count; ++c) {
    if (ds.x(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(group.first + c)) == 1.0) {
      return group.categories[c];
    }
  }
  throw EncodingError("row " + std::to_string(row) + " has no active category for '" + group.feature + "'");
}

/// Audit export: duration, event, then every encoded column.
inline csv::Table to_table(const EncodedDataset& ds) {
  csv::Table table;
  table.header = {"duration", "event"};
  table.header.insert(table.header.end(), ds.columns.begin(), ds.columns.end());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    csv::Row row{csv::format_number(ds.durations[i]), ds.events[i] ? "1" : "0"};
    for (std::size_t j = 0; j < ds.cols(); ++j) {
      row.push_back(csv::format_number(ds.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace reprosurv
