#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rmis/error.hpp"

namespace rmis {

/// Linear interpolation between order statistics at position
/// h = (n - 1) * p + 1 (1-based). This is the estimator most statistics
/// packages use by default ("type 7").
inline double interpolated_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

struct TestResult {
  double statistic = 0.0;  // W+, sum of ranks of positive differences
  double p_value = 1.0;
  std::size_t n_effective = 0;  // differences left after dropping zeros
  bool significant = false;
};

/// Mid-ranks (1-based) of |d| for nonzero differences, in input order.
inline std::vector<double> signed_rank_magnitudes(std::span<const double> diffs) {
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(diffs[a]) < std::fabs(diffs[b]);
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]])) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
    i = j + 1;
  }
  return ranks;
}

/// P(W+ >= observed) under the sign-flip null, conditional on the given
/// (possibly tied) mid-ranks. Exact by dynamic programming over doubled
/// ranks, which are integers.
inline double wilcoxon_exact_upper_p(std::span<const double> ranks, double w_plus) {
  std::vector<long> doubled;
  long total = 0;
  for (double r : ranks) {
    doubled.push_back(std::lround(2.0 * r));
    total += doubled.back();
  }
  std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
  count[0] = 1.0;
  long reach = 0;
  for (long d : doubled) {
    for (long s = reach; s >= 0; --s) {
      if (count[s] != 0.0) count[s + d] += count[s];
    }
    reach += d;
  }
  const long threshold = std::lround(2.0 * w_plus);
  double tail = 0.0;
  for (long s = threshold; s <= total; ++s) tail += count[s];
  return tail / std::ldexp(1.0, static_cast<int>(ranks.size()));
}

/// Upper-tail normal approximation with tie and continuity correction.
inline double wilcoxon_normal_upper_p(std::span<const double> ranks, double w_plus) {
  const auto n = static_cast<double>(ranks.size());
  const double mean = n * (n + 1.0) / 4.0;
  std::vector<double> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return w_plus > mean ? 0.0 : 1.0;
  const double z = (w_plus - mean - 0.5) / std::sqrt(var);
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

/// One-sided paired Wilcoxon signed-rank test of "x tends to exceed y".
/// Zero differences are discarded. Exact null distribution up to
/// `exact_limit` effective pairs, normal approximation above.
inline TestResult wilcoxon_one_sided(std::span<const double> x, std::span<const double> y,
                                     double alpha, std::size_t exact_limit = 25) {
  if (x.size() != y.size()) throw InputError("paired samples differ in length");
  if (x.empty()) throw InputError("paired samples are empty");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");

  std::vector<double> diffs;
  diffs.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  TestResult result;
  result.n_effective = diffs.size();
  if (diffs.empty()) return result;

  const auto ranks = signed_rank_magnitudes(diffs);
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0) result.statistic += ranks[i];
  }
  result.p_value = diffs.size() <= exact_limit
                       ? wilcoxon_exact_upper_p(ranks, result.statistic)
                       : wilcoxon_normal_upper_p(ranks, result.statistic);
  result.p_value = std::clamp(result.p_value, 0.0, 1.0);
  result.significant = result.p_value < alpha;
  return result;
}

}  // namespace rmis
