#pragma once

// Ranking stability by case resampling.
//
// Randomness: replicate r draws from std::mt19937_64 seeded with
// splitmix64(seed ^ splitmix64(r)), and case indices come from rejection
// sampling on the raw 64-bit output. Both are fully specified, so summaries
// are identical across platforms, thread counts and scheduling.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rmis/error.hpp"
#include "rmis/ranking.hpp"
#include "rmis/stats.hpp"
#include "rmis/table.hpp"

namespace rmis {

enum class Ranker { Significance, Robustness };

inline const char* to_string(Ranker r) {
  return r == Ranker::Significance ? "significance" : "robustness";
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate) {
  return splitmix64(seed ^ splitmix64(replicate));
}

/// Unbiased index in [0, n).
inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return static_cast<std::size_t>(x % bound);
}

/// Case indices of replicate `r`: n draws with replacement.
inline std::vector<std::size_t> resample_indices(std::uint64_t seed, std::uint64_t replicate,
                                                 std::size_t n) {
  std::mt19937_64 gen(replicate_seed(seed, replicate));
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = uniform_index(gen, n);
  return idx;
}

struct BootstrapSummary {
  std::size_t b = 0;
  std::uint64_t seed = 0;
  Ranker ranker = Ranker::Significance;
  std::vector<std::string> algorithms;
  /// rank_frequency[a][r - 1]: replicates in which algorithm a got rank r.
  std::vector<std::vector<std::size_t>> rank_frequency;
  std::vector<double> median_rank;
  std::vector<double> interval_lo;  // 2.5% rank quantile
  std::vector<double> interval_hi;  // 97.5% rank quantile

  friend bool operator==(const BootstrapSummary&, const BootstrapSummary&) = default;
};

/// Ranks of every algorithm in one ranking of `table`, in table order.
inline std::vector<int> rank_table(const MetricTable& table, Ranker ranker,
                                   const RankingConfig& config) {
  std::vector<double> agg;
  if (ranker == Ranker::Significance) {
    const auto wins = significant_wins(table, config.alpha);
    const auto rivals = static_cast<double>(table.algorithm_count() - 1);
    for (std::size_t w : wins) agg.push_back(static_cast<double>(w) / rivals);
  } else {
    for (std::size_t a = 0; a < table.algorithm_count(); ++a) {
      agg.push_back(interpolated_quantile(table.row(a), config.percentile));
    }
  }
  return competition_ranks(agg);
}

inline MetricTable resample_table(const MetricTable& table, const std::vector<std::size_t>& idx) {
  std::vector<std::string> cases;
  cases.reserve(idx.size());
  for (std::size_t i : idx) cases.push_back(table.cases()[i]);
  MetricTable out(table.algorithms(), std::move(cases));
  for (std::size_t a = 0; a < table.algorithm_count(); ++a) {
    for (std::size_t c = 0; c < idx.size(); ++c) out.set(a, c, table.at(a, idx[c]));
  }
  return out;
}

/// Recomputes the ranking on `b` case resamples and summarises each
/// algorithm's rank distribution. `jobs` only affects speed.
inline BootstrapSummary bootstrap_rankings(const MetricTable& input, Ranker ranker,
                                           const RankingConfig& config, std::size_t b,
                                           std::uint64_t seed, unsigned jobs = 1) {
  if (b == 0) throw ConfigError("bootstrap needs b >= 1");
  if (input.case_count() == 0 || input.algorithm_count() == 0) {
    throw ConfigError("bootstrap needs a non-empty table");
  }
  if (ranker == Ranker::Significance && input.algorithm_count() < 2) {
    throw ConfigError("significance ranking needs >= 2 algorithms");
  }
  config.validate();
  const MetricTable table = impute_missing(input);
  const std::size_t k = table.algorithm_count();

  std::vector<std::vector<int>> ranks(b);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto idx = resample_indices(seed, r, table.case_count());
      ranks[r] = rank_table(resample_table(table, idx), ranker, config);
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(b)));
  if (jobs == 1) {
    work(0, b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) {
      pool.emplace_back(work, b * j / jobs, b * (j + 1) / jobs);
    }
    for (auto& t : pool) t.join();
  }

  BootstrapSummary s;
  s.b = b;
  s.seed = seed;
  s.ranker = ranker;
  s.algorithms = table.algorithms();
  s.rank_frequency.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t a = 0; a < k; ++a) {
    std::vector<double> samples(b);
    for (std::size_t r = 0; r < b; ++r) {
      ++s.rank_frequency[a][ranks[r][a] - 1];
      samples[r] = ranks[r][a];
    }
    s.median_rank.push_back(interpolated_quantile(samples, 0.5));
    s.interval_lo.push_back(interpolated_quantile(samples, 0.025));
    s.interval_hi.push_back(interpolated_quantile(samples, 0.975));
  }
  return s;
}

/// counts[a][r - 1]: number of cases in which algorithm a has rank r when
/// all algorithms are competition-ranked on that case's value alone.
inline std::vector<std::vector<std::size_t>> per_case_rank_frequencies(const MetricTable& input) {
  const MetricTable table = impute_missing(input);
  const std::size_t k = table.algorithm_count();
  std::vector<std::vector<std::size_t>> counts(k, std::vector<std::size_t>(k, 0));
  std::vector<double> column(k);
  for (std::size_t c = 0; c < table.case_count(); ++c) {
    for (std::size_t a = 0; a < k; ++a) column[a] = *table.at(a, c);
    const auto ranks = competition_ranks(column);
    for (std::size_t a = 0; a < k; ++a) ++counts[a][ranks[a] - 1];
  }
  return counts;
}

}  // namespace rmis
