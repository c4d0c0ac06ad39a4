#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmis/error.hpp"
#include "rmis/stats.hpp"
#include "rmis/table.hpp"

namespace rmis {

struct LeaderboardEntry {
  std::string team;
  double aggregate = 0.0;
  int rank = 0;
};

struct RankingConfig {
  double alpha = 0.05;       // significance level of the pairwise tests
  double percentile = 0.05;  // robustness quantile level

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (!(percentile >= 0.0 && percentile <= 1.0)) {
      throw ConfigError("percentile must lie in [0, 1]");
    }
  }
};

/// Standard competition ("1224") ranks for aggregates where larger is better:
/// rank = 1 + number of strictly larger values. Compared on raw values.
inline std::vector<int> competition_ranks(std::span<const double> aggregates) {
  std::vector<int> ranks(aggregates.size());
  for (std::size_t i = 0; i < aggregates.size(); ++i) {
    ranks[i] = 1 + static_cast<int>(std::count_if(aggregates.begin(), aggregates.end(),
                                                  [&](double v) { return v > aggregates[i]; }));
  }
  return ranks;
}

/// Leaderboard sorted by rank; ties keep input order.
inline std::vector<LeaderboardEntry> make_leaderboard(const std::vector<std::string>& teams,
                                                      const std::vector<double>& aggregates) {
  const auto ranks = competition_ranks(aggregates);
  std::vector<LeaderboardEntry> out;
  for (std::size_t i = 0; i < teams.size(); ++i) out.push_back({teams[i], aggregates[i], ranks[i]});
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.rank < b.rank; });
  return out;
}

/// Number of rivals each algorithm beats in one-sided paired Wilcoxon tests.
inline std::vector<std::size_t> significant_wins(const MetricTable& table, double alpha) {
  const std::size_t k = table.algorithm_count();
  std::vector<std::vector<double>> rows;
  for (std::size_t a = 0; a < k; ++a) rows.push_back(table.row(a));
  std::vector<std::size_t> wins(k, 0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (a != b && wilcoxon_one_sided(rows[a], rows[b], alpha).significant) ++wins[a];
    }
  }
  return wins;
}

/// Accuracy leaderboard. Aggregate = significant wins / (algorithms - 1).
/// MISSING cells count as 0.
inline std::vector<LeaderboardEntry> significance_rank(const MetricTable& table, double alpha) {
  if (table.algorithm_count() < 2) throw ConfigError("significance ranking needs >= 2 algorithms");
  if (table.case_count() == 0) throw ConfigError("significance ranking needs >= 1 case");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const auto wins = significant_wins(table, alpha);
  const auto rivals = static_cast<double>(table.algorithm_count() - 1);
  std::vector<double> agg;
  for (std::size_t w : wins) agg.push_back(static_cast<double>(w) / rivals);
  return make_leaderboard(table.algorithms(), agg);
}

/// Robustness leaderboard on the interpolated `percentile` quantile of each
/// algorithm's per-case values.
inline std::vector<LeaderboardEntry> robustness_rank(const MetricTable& table, double percentile) {
  if (table.algorithm_count() == 0 || table.case_count() == 0) {
    throw ConfigError("robustness ranking needs a non-empty table");
  }
  std::vector<double> agg;
  for (std::size_t a = 0; a < table.algorithm_count(); ++a) {
    agg.push_back(interpolated_quantile(table.row(a), percentile));
  }
  return make_leaderboard(table.algorithms(), agg);
}

/// Detection leaderboard on raw (unrounded) mAP values.
inline std::vector<LeaderboardEntry> detection_rank(
    const std::vector<std::pair<std::string, double>>& map_values) {
  if (map_values.empty()) throw ConfigError("detection ranking needs >= 1 team");
  std::vector<std::string> teams;
  std::vector<double> agg;
  for (const auto& [team, value] : map_values) {
    teams.push_back(team);
    agg.push_back(value);
  }
  return make_leaderboard(teams, agg);
}

}  // namespace rmis
