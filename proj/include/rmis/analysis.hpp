#pragma once

// Secondary analyses: stratification by instrument count, worst-case mining,
// cross-stage comparison and derivation of the NSD tolerance from
// inter-annotator boundary disagreement.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rmis/error.hpp"
#include "rmis/mask.hpp"
#include "rmis/metrics.hpp"
#include "rmis/stats.hpp"
#include "rmis/table.hpp"

namespace rmis {

enum class CaseAggregation { Mean, Min };

/// Per-case value across algorithms (MISSING counts as 0).
inline std::vector<double> case_aggregates(const MetricTable& table,
                                           CaseAggregation how = CaseAggregation::Mean) {
  std::vector<double> out(table.case_count(), 0.0);
  if (table.algorithm_count() == 0) return out;
  for (std::size_t c = 0; c < table.case_count(); ++c) {
    double acc = how == CaseAggregation::Mean ? 0.0 : std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < table.algorithm_count(); ++a) {
      const double v = table.at(a, c).value_or(0.0);
      acc = how == CaseAggregation::Mean ? acc + v : std::min(acc, v);
    }
    out[c] = how == CaseAggregation::Mean ? acc / static_cast<double>(table.algorithm_count()) : acc;
  }
  return out;
}

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline SummaryStats summarize(const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("summary of an empty sample");
  SummaryStats s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = interpolated_quantile(values, 0.5);
  s.q1 = interpolated_quantile(values, 0.25);
  s.q3 = interpolated_quantile(values, 0.75);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

struct StratifiedStats {
  std::string bucket;  // "0", "1", "2", "3" or ">3"
  std::size_t count = 0;
  std::optional<SummaryStats> stats;  // absent for empty buckets
};

inline constexpr std::array<const char*, 5> kInstrumentBuckets = {"0", "1", "2", "3", ">3"};

inline std::size_t instrument_bucket(int instrument_count) {
  if (instrument_count < 0) throw InputError("negative instrument count");
  return static_cast<std::size_t>(std::min(instrument_count, 4));
}

/// Buckets the per-case mean across algorithms by instrument count. Every
/// case of the table needs metadata.
inline std::vector<StratifiedStats> stratify_by_instrument_count(
    const MetricTable& table, const std::map<std::string, CaseRecord>& cases) {
  const auto per_case = case_aggregates(table);
  std::array<std::vector<double>, 5> groups;
  for (std::size_t c = 0; c < table.case_count(); ++c) {
    auto it = cases.find(table.cases()[c]);
    if (it == cases.end()) throw InputError("no metadata for case " + table.cases()[c]);
    groups[instrument_bucket(it->second.instrument_count)].push_back(per_case[c]);
  }
  std::vector<StratifiedStats> out;
  for (std::size_t b = 0; b < groups.size(); ++b) {
    StratifiedStats s{kInstrumentBuckets[b], groups[b].size(), std::nullopt};
    if (!groups[b].empty()) s.stats = summarize(groups[b]);
    out.push_back(std::move(s));
  }
  return out;
}

struct WorstCase {
  std::string case_id;
  double aggregate = 0.0;
  std::vector<std::optional<double>> values;  // per algorithm, table order
};

struct WorstCaseReport {
  std::vector<std::string> algorithms;
  std::vector<WorstCase> cases;
  bool truncated = false;  // k exceeded the number of cases
};

/// The k cases with the lowest aggregate across algorithms; ties by case id.
inline WorstCaseReport worst_cases(const MetricTable& table, std::size_t k,
                                   CaseAggregation how = CaseAggregation::Mean) {
  if (k == 0) throw ConfigError("worst_cases needs k >= 1");
  const auto agg = case_aggregates(table, how);
  std::vector<std::size_t> order(table.case_count());
  std::iota(order.begin(), order.end(), 0);
  // Aggregates equal up to summation rounding count as ties.
  std::vector<double> key(agg.size());
  for (std::size_t c = 0; c < agg.size(); ++c) key[c] = std::round(agg[c] * 1e12);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(key[a], table.cases()[a]) < std::tie(key[b], table.cases()[b]);
  });
  WorstCaseReport report;
  report.algorithms = table.algorithms();
  report.truncated = k > order.size();
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
    const std::size_t c = order[i];
    WorstCase w{table.cases()[c], agg[c], {}};
    for (std::size_t a = 0; a < table.algorithm_count(); ++a) w.values.push_back(table.at(a, c));
    report.cases.push_back(std::move(w));
  }
  return report;
}

struct StageSummary {
  int stage = 0;
  std::vector<std::pair<std::string, double>> team_means;  // mean over cases
  double median = 0.0;  // across teams
  double min = 0.0;
  double max = 0.0;
  SummaryStats per_image;  // of the per-image mean over teams
};

/// Per stage: each team's mean over cases, then median/min/max across teams.
/// Every stage table must list the same set of teams.
inline std::vector<StageSummary> stage_comparison(
    const std::vector<std::pair<int, MetricTable>>& stages) {
  if (stages.empty()) throw InputError("stage comparison needs at least one stage");
  auto sorted_teams = [](const MetricTable& t) {
    auto v = t.algorithms();
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto teams = sorted_teams(stages.front().second);
  std::vector<StageSummary> out;
  for (const auto& [stage, table] : stages) {
    if (sorted_teams(table) != teams) {
      throw InputError("team set of stage " + std::to_string(stage) + " differs from stage " +
                       std::to_string(stages.front().first));
    }
    if (table.case_count() == 0 || table.algorithm_count() == 0) {
      throw InputError("stage " + std::to_string(stage) + " has no data");
    }
    StageSummary s;
    s.stage = stage;
    std::vector<double> means;
    for (std::size_t a = 0; a < table.algorithm_count(); ++a) {
      const auto row = table.row(a);
      const double m = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size());
      s.team_means.emplace_back(table.algorithms()[a], m);
      means.push_back(m);
    }
    std::sort(s.team_means.begin(), s.team_means.end());
    const auto team_stats = summarize(means);
    s.median = team_stats.median;
    s.min = team_stats.min;
    s.max = team_stats.max;
    s.per_image = summarize(case_aggregates(table));
    out.push_back(std::move(s));
  }
  return out;
}

struct TauDerivation {
  int tau = 0;
  double quantile_value = 0.0;  // before rounding up
  double quantile = 0.95;
  std::size_t pooled = 0;        // number of pooled distances
  std::size_t skipped_pairs = 0; // annotator pairs where exactly one mask was empty
};

/// Pools, over every image and unordered annotator pair, the distance from
/// each boundary pixel to the other annotator's boundary (both directions),
/// and rounds the requested quantile of the pool up to whole pixels.
/// Pairs where both masks are empty add nothing; pairs where exactly one is
/// empty have no finite distances and are counted in `skipped_pairs`.
inline TauDerivation derive_tau(const std::vector<std::vector<LabelMask>>& annotations,
                                double quantile = 0.95) {
  if (!(quantile >= 0.0 && quantile <= 1.0)) throw ConfigError("quantile must lie in [0, 1]");
  if (annotations.empty()) throw InputError("no annotated images");
  const std::size_t raters = annotations.front().size();
  if (raters < 2) throw InputError("tau derivation needs >= 2 annotators");

  TauDerivation out;
  out.quantile = quantile;
  std::vector<double> pool;
  for (std::size_t img = 0; img < annotations.size(); ++img) {
    const auto& masks = annotations[img];
    if (masks.size() != raters) {
      throw InputError("image " + std::to_string(img) + " has " + std::to_string(masks.size()) +
                       " annotations, expected " + std::to_string(raters));
    }
    std::vector<std::vector<Pixel>> bounds;
    for (const auto& m : masks) {
      require_same_shape(m, masks.front());
      bounds.push_back(boundary(m));
    }
    for (std::size_t i = 0; i < raters; ++i) {
      for (std::size_t j = i + 1; j < raters; ++j) {
        if (bounds[i].empty() && bounds[j].empty()) continue;
        if (bounds[i].empty() || bounds[j].empty()) {
          ++out.skipped_pairs;
          continue;
        }
        const auto d = squared_boundary_distances(bounds[i], bounds[j]);
        for (double v : d.ref_to_pred) pool.push_back(std::sqrt(v));
        for (double v : d.pred_to_ref) pool.push_back(std::sqrt(v));
      }
    }
  }
  out.pooled = pool.size();
  if (pool.empty()) return out;
  out.quantile_value = interpolated_quantile(std::move(pool), quantile);
  // Guard against interpolation noise pushing an integer just above itself.
  out.tau = static_cast<int>(std::ceil(out.quantile_value - 1e-9));
  return out;
}

}  // namespace rmis
