#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "reprosurv/csv.hpp"
#include "reprosurv/error.hpp"
#include "reprosurv/stats.hpp"

namespace reprosurv {

struct SurvivalSample {
  double duration = 0.0;  // days, > 0
  bool event = false;     // true = reproduced
};

inline std::vector<SurvivalSample> make_samples(std::span<const double> durations, const std::vector<bool>& events) {
  if (durations.size() != events.size()) throw ArgumentError("durations and events differ in length");
  std::vector<SurvivalSample> samples(durations.size());
  for (std::size_t i = 0; i < durations.size(); ++i) samples[i] = {durations[i], events[i]};
  return samples;
}

/// Product-limit estimate, one step per distinct event time.
struct StepSurvivalCurve {
  std::vector<double> times;
  std::vector<double> survival;  // S(t) just after times[k]
  std::vector<std::size_t> at_risk;
  std::vector<std::size_t> events;

  /// Right-continuous S(t); 1 before the first event.
  double at(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 1.0;
    return survival[static_cast<std::size_t>(it - times.begin()) - 1];
  }

  csv::Table to_table() const {
    csv::Table table;
    table.header = {"time", "survival", "at_risk", "events"};
    for (std::size_t k = 0; k < times.size(); ++k) {
      table.rows.push_back({csv::format_number(times[k]), csv::format_number(survival[k]),
                            std::to_string(at_risk[k]), std::to_string(events[k])});
    }
    return table;
  }
};

inline StepSurvivalCurve kaplan_meier(std::span<const SurvivalSample> samples) {
  if (samples.empty()) throw ArgumentError("kaplan_meier: empty sample set");
  std::vector<SurvivalSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const SurvivalSample& a, const SurvivalSample& b) { return a.duration < b.duration; });

  StepSurvivalCurve curve;
  double s = 1.0;
  std::size_t remaining = sorted.size();
  for (std::size_t i = 0; i < sorted.size();) {
    const double t = sorted[i].duration;
    std::size_t deaths = 0, leaving = 0;
    for (; i < sorted.size() && sorted[i].duration == t; ++i, ++leaving) deaths += sorted[i].event ? 1 : 0;
    if (deaths > 0) {
      s *= 1.0 - static_cast<double>(deaths) / static_cast<double>(remaining);
      curve.times.push_back(t);
      curve.survival.push_back(s);
      curve.at_risk.push_back(remaining);
      curve.events.push_back(deaths);
    }
    remaining -= leaving;
  }
  return curve;
}

struct LogRankResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double observed_a = 0.0;
  double expected_a = 0.0;
  double variance = 0.0;
};

/// Unweighted two-sample log-rank test (chi-square, 1 df).
inline LogRankResult log_rank_test(std::span<const SurvivalSample> group_a, std::span<const SurvivalSample> group_b) {
  if (group_a.empty() || group_b.empty()) throw ArgumentError("log_rank_test: both groups must be non-empty");

  struct Tagged {
    double t;
    bool event;
    bool in_a;
  };
  std::vector<Tagged> all;
  all.reserve(group_a.size() + group_b.size());
  for (const auto& s : group_a) all.push_back({s.duration, s.event, true});
  for (const auto& s : group_b) all.push_back({s.duration, s.event, false});
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.t < b.t; });

  LogRankResult result;
  double n_a = static_cast<double>(group_a.size());
  double n_b = static_cast<double>(group_b.size());
  for (std::size_t i = 0; i < all.size();) {
    const double t = all[i].t;
    double d_a = 0, d_b = 0, leave_a = 0, leave_b = 0;
    for (; i < all.size() && all[i].t == t; ++i) {
      (all[i].in_a ? leave_a : leave_b) += 1;
      if (all[i].event) (all[i].in_a ? d_a : d_b) += 1;
    }
    const double d = d_a + d_b;
    const double n = n_a + n_b;
    if (d > 0 && n_a > 0 && n_b > 0) {
      result.observed_a += d_a;
      result.expected_a += d * n_a / n;
      if (n > 1) result.variance += d * (n_a / n) * (n_b / n) * (n - d) / (n - 1);
    }
    n_a -= leave_a;
    n_b -= leave_b;
  }
  if (result.variance > 0.0) {
    const double diff = result.observed_a - result.expected_a;
    result.statistic = diff * diff / result.variance;
    result.p_value = stats::chi_square_sf(result.statistic, 1.0);
  }
  return result;
}

/// Pair counts behind the concordance index.
struct ConcordanceCounts {
  double concordant = 0;
  double discordant = 0;
  double tied = 0;

  double index() const {
    const double total = concordant + discordant + tied;
    if (total == 0) return 0.5;
    return (2.0 * concordant + tied) / (2.0 * total);
  }
};

namespace detail {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  /// Count of inserted positions < i.
  std::size_t prefix(std::size_t i) const {
    std::size_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::size_t> tree_;
};

}  // namespace detail

/// A pair (i, j) is comparable when j is an event and |label_i| > label_j.
/// It is concordant when risk_j > risk_i and tied when the risks are equal.
/// O(n log n): subjects are swept by decreasing |label| into a Fenwick tree
/// over risk ranks.
inline ConcordanceCounts concordance_counts(std::span<const double> predicted_risk, std::span<const double> labels) {
  if (predicted_risk.size() != labels.size()) throw ArgumentError("concordance: length mismatch");
  const std::size_t n = labels.size();

  std::vector<double> distinct(predicted_risk.begin(), predicted_risk.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[i] = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), predicted_risk[i]) -
                                       distinct.begin());
  }

  std::vector<std::size_t> by_abs(n);
  std::iota(by_abs.begin(), by_abs.end(), 0);
  std::sort(by_abs.begin(), by_abs.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(labels[a]) > std::abs(labels[b]); });
  std::vector<std::size_t> events;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] > 0) events.push_back(i);
  }
  std::sort(events.begin(), events.end(), [&](std::size_t a, std::size_t b) { return labels[a] > labels[b]; });

  ConcordanceCounts counts;
  detail::Fenwick inserted(distinct.size());
  std::size_t cursor = 0, inserted_count = 0;
  for (const std::size_t j : events) {
    while (cursor < n && std::abs(labels[by_abs[cursor]]) > labels[j]) {
      inserted.add(rank[by_abs[cursor]]);
      ++inserted_count;
      ++cursor;
    }
    const std::size_t below = inserted.prefix(rank[j]);
    const std::size_t at_or_below = inserted.prefix(rank[j] + 1);
    counts.concordant += static_cast<double>(below);
    counts.tied += static_cast<double>(at_or_below - below);
    counts.discordant += static_cast<double>(inserted_count - at_or_below);
  }
  return counts;
}

/// Harrell's concordance, (2C + T) / (2(C + D + T)); 0.5 with no comparable pair.
inline double concordance(std::span<const double> predicted_risk, std::span<const double> labels) {
  return concordance_counts(predicted_risk, labels).index();
}

}  // namespace reprosurv
