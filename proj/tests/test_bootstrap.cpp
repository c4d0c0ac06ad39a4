#include <gtest/gtest.h>

#include <random>

#include "rmis/bootstrap.hpp"

using rmis::MetricTable;
using rmis::Ranker;

namespace {

MetricTable random_table(std::mt19937& rng, std::size_t algs, std::size_t cases) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> a, c;
  for (std::size_t i = 0; i < algs; ++i) a.push_back("alg" + std::to_string(i));
  for (std::size_t j = 0; j < cases; ++j) c.push_back("case" + std::to_string(j));
  MetricTable t(a, c);
  for (std::size_t i = 0; i < algs; ++i)
    for (std::size_t j = 0; j < cases; ++j) t.set(i, j, std::min(1.0, u(rng) * 0.8 + 0.05 * i));
  return t;
}

// Independent re-derivation of the documented generator.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::size_t> draw(std::uint64_t seed, std::uint64_t r, std::size_t n) {
  std::mt19937_64 gen(mix(seed ^ mix(r)));
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::vector<std::size_t> out;
  while (out.size() < n) {
    const std::uint64_t x = gen();
    if (x < limit) out.push_back(x % n);
  }
  return out;
}

double quantile7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (v.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(h);
  return lo + 1 < v.size() ? v[lo] + (h - lo) * (v[lo + 1] - v[lo]) : v.back();
}

}  // namespace

TEST(Resample, IndicesAreInRangeAndReproducible) {
  const auto a = rmis::resample_indices(7, 3, 50);
  EXPECT_EQ(a, rmis::resample_indices(7, 3, 50));
  EXPECT_NE(a, rmis::resample_indices(7, 4, 50));
  EXPECT_NE(a, rmis::resample_indices(8, 3, 50));
  for (auto i : a) EXPECT_LT(i, 50u);
  EXPECT_EQ(a, draw(7, 3, 50));
}

TEST(Resample, RoughlyUniform) {
  std::vector<int> hits(10, 0);
  for (std::uint64_t r = 0; r < 2000; ++r)
    for (auto i : rmis::resample_indices(1, r, 10)) ++hits[i];
  for (int h : hits) EXPECT_NEAR(h, 2000, 200);
}

TEST(Bootstrap, DeterministicAndThreadIndependent) {
  std::mt19937 rng(101);
  const auto t = random_table(rng, 5, 40);
  for (Ranker ranker : {Ranker::Significance, Ranker::Robustness}) {
    const auto a = rmis::bootstrap_rankings(t, ranker, {}, 200, 12345, 1);
    const auto b = rmis::bootstrap_rankings(t, ranker, {}, 200, 12345, 1);
    const auto c = rmis::bootstrap_rankings(t, ranker, {}, 200, 12345, 4);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    const auto d = rmis::bootstrap_rankings(t, ranker, {}, 200, 54321, 1);
    EXPECT_NE(a.rank_frequency, d.rank_frequency);
  }
}

TEST(Bootstrap, RowsSumToReplicates) {
  std::mt19937 rng(103);
  const auto t = random_table(rng, 6, 30);
  for (std::size_t b : {std::size_t{1}, std::size_t{37}}) {
    const auto s = rmis::bootstrap_rankings(t, Ranker::Significance, {}, b, 9);
    for (const auto& row : s.rank_frequency) {
      EXPECT_EQ(std::accumulate(row.begin(), row.end(), std::size_t{0}), b);
    }
  }
}

TEST(Bootstrap, DominantAlgorithmAlwaysFirst) {
  std::mt19937 rng(107);
  auto t = random_table(rng, 4, 30);
  for (std::size_t c = 0; c < t.case_count(); ++c) t.set(0, c, 0.99 + 0.0001 * c);
  for (std::size_t a = 1; a < 4; ++a)
    for (std::size_t c = 0; c < t.case_count(); ++c) t.set(a, c, std::min(0.9, *t.at(a, c)));
  for (Ranker ranker : {Ranker::Significance, Ranker::Robustness}) {
    const auto s = rmis::bootstrap_rankings(t, ranker, {}, 300, 5);
    EXPECT_EQ(s.interval_lo[0], 1.0);
    EXPECT_EQ(s.interval_hi[0], 1.0);
    EXPECT_EQ(s.median_rank[0], 1.0);
    EXPECT_EQ(s.rank_frequency[0][0], 300u);
  }
}

TEST(Bootstrap, MatchesIndependentRobustnessLoop) {
  std::mt19937 rng(109);
  const auto t = random_table(rng, 5, 25);
  const rmis::RankingConfig config{0.05, 0.05};
  const std::size_t b = 150;
  const auto s = rmis::bootstrap_rankings(t, Ranker::Robustness, config, b, 77, 3);

  std::vector<std::vector<std::size_t>> freq(5, std::vector<std::size_t>(5, 0));
  std::vector<std::vector<double>> ranks(5);
  for (std::size_t r = 0; r < b; ++r) {
    const auto idx = draw(77, r, 25);
    std::vector<double> agg(5);
    for (std::size_t a = 0; a < 5; ++a) {
      std::vector<double> v;
      for (auto i : idx) v.push_back(*t.at(a, i));
      agg[a] = quantile7(v, 0.05);
    }
    for (std::size_t a = 0; a < 5; ++a) {
      int rank = 1;
      for (double x : agg) rank += x > agg[a];
      ++freq[a][rank - 1];
      ranks[a].push_back(rank);
    }
  }
  EXPECT_EQ(s.rank_frequency, freq);
  for (std::size_t a = 0; a < 5; ++a) {
    EXPECT_EQ(s.median_rank[a], quantile7(ranks[a], 0.5));
    EXPECT_EQ(s.interval_lo[a], quantile7(ranks[a], 0.025));
    EXPECT_EQ(s.interval_hi[a], quantile7(ranks[a], 0.975));
  }
}

TEST(Bootstrap, MissingValuesAreImputed) {
  MetricTable t({"a", "b"}, {"1", "2", "3"});
  for (std::size_t c = 0; c < 3; ++c) t.set(1, c, 0.5);
  const auto s = rmis::bootstrap_rankings(t, Ranker::Robustness, {}, 20, 1);
  EXPECT_EQ(s.rank_frequency[1][0], 20u);
  EXPECT_EQ(s.rank_frequency[0][1], 20u);
}

TEST(Bootstrap, Errors) {
  MetricTable one = MetricTable::from_rows({"a"}, {"1"}, {{0.5}});
  EXPECT_THROW(rmis::bootstrap_rankings(one, Ranker::Significance, {}, 10, 1), rmis::ConfigError);
  EXPECT_NO_THROW(rmis::bootstrap_rankings(one, Ranker::Robustness, {}, 10, 1));
  EXPECT_THROW(rmis::bootstrap_rankings(one, Ranker::Robustness, {}, 0, 1), rmis::ConfigError);
  EXPECT_THROW(rmis::bootstrap_rankings(MetricTable({"a"}, {}), Ranker::Robustness, {}, 5, 1), rmis::ConfigError);
}

TEST(PerCaseRanks, CountsEveryCaseOnce) {
  const auto t = MetricTable::from_rows({"a", "b", "c"}, {"1", "2", "3"},
                                        {{0.9, 0.1, 0.5}, {0.9, 0.2, 0.4}, {0.1, 0.3, 0.6}});
  const auto f = rmis::per_case_rank_frequencies(t);
  EXPECT_EQ(f[0], (std::vector<std::size_t>{1, 1, 1}));  // ranks 1, 3, 2
  EXPECT_EQ(f[1], (std::vector<std::size_t>{1, 1, 1}));  // ranks 1, 2, 3
  EXPECT_EQ(f[2], (std::vector<std::size_t>{2, 0, 1}));  // ranks 3, 1, 1
}
