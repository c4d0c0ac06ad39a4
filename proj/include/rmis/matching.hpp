#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "rmis/error.hpp"
#include "rmis/mask.hpp"
#include "rmis/metrics.hpp"

namespace rmis {

/// Pairwise scores between reference instances (rows) and predicted
/// instances (columns).
class ScoreMatrix {
 public:
  ScoreMatrix() = default;

  ScoreMatrix(std::vector<Label> rows, std::vector<Label> cols, std::vector<double> scores)
      : rows_(std::move(rows)), cols_(std::move(cols)), scores_(std::move(scores)) {
    if (scores_.size() != rows_.size() * cols_.size()) {
      throw ShapeError("score matrix is not rectangular");
    }
    for (double s : scores_) {
      if (!(s >= 0.0 && s <= 1.0)) {
        throw InputError("score " + std::to_string(s) + " outside [0, 1]");
      }
    }
  }

  std::size_t row_count() const { return rows_.size(); }
  std::size_t col_count() const { return cols_.size(); }
  const std::vector<Label>& rows() const { return rows_; }
  const std::vector<Label>& cols() const { return cols_; }
  double at(std::size_t r, std::size_t c) const { return scores_[r * cols_.size() + c]; }

 private:
  std::vector<Label> rows_;
  std::vector<Label> cols_;
  std::vector<double> scores_;
};

struct MatchedPair {
  Label ref = 0;
  Label pred = 0;
  double score = 0.0;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct Assignment {
  std::vector<MatchedPair> pairs;  // ascending by ref label
  std::vector<Label> unmatched_refs;
  std::vector<Label> unmatched_preds;

  /// Sum of pair scores, accumulated in pair order.
  double total_score() const {
    double t = 0.0;
    for (const auto& p : pairs) t += p.score;
    return t;
  }
};

namespace detail {

/// Minimum-cost assignment of every row of an n x m cost matrix (n <= m) to a
/// distinct column; shortest augmenting paths with potentials, O(n^2 m).
/// Returns the column chosen for each row.
inline std::vector<int> min_cost_rows(const std::vector<double>& cost, int n, int m) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

/// Maximum total score over assignments restricted to the given row and
/// column index sets. Scores are non-negative, so an optimum always matches
/// min(|rows|, |cols|) pairs.
inline double best_total(const ScoreMatrix& s, const std::vector<std::size_t>& rows,
                         const std::vector<std::size_t>& cols) {
  if (rows.empty() || cols.empty()) return 0.0;
  const bool transpose = rows.size() > cols.size();
  const auto& a = transpose ? cols : rows;
  const auto& b = transpose ? rows : cols;
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  std::vector<double> cost(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      cost[static_cast<std::size_t>(i) * m + j] =
          -(transpose ? s.at(b[j], a[i]) : s.at(a[i], b[j]));
    }
  }
  const auto choice = min_cost_rows(cost, n, m);
  // Sum in row order of the original matrix for reproducible rounding.
  std::vector<std::pair<std::size_t, std::size_t>> picked;
  for (int i = 0; i < n; ++i) {
    if (transpose) {
      picked.emplace_back(b[choice[i]], a[i]);
    } else {
      picked.emplace_back(a[i], b[choice[i]]);
    }
  }
  std::sort(picked.begin(), picked.end());
  double total = 0.0;
  for (auto [r, c] : picked) total += s.at(r, c);
  return total;
}

}  // namespace detail

/// Maximum-total-score one-to-one assignment. Among optimal assignments the
/// one whose (ref label, pred label) pair sequence is lexicographically
/// smallest is returned: each reference, in ascending label order, takes the
/// smallest prediction label that still admits an optimal completion.
/// Totals within 1e-10 of the optimum count as optimal.
inline Assignment hungarian_match(const ScoreMatrix& scores) {
  constexpr double kTieTolerance = 1e-10;
  const std::size_t nr = scores.row_count();
  const std::size_t nc = scores.col_count();

  std::vector<std::size_t> row_order(nr), col_order(nc);
  std::iota(row_order.begin(), row_order.end(), 0);
  std::iota(col_order.begin(), col_order.end(), 0);
  std::stable_sort(row_order.begin(), row_order.end(), [&](auto a, auto b) {
    return scores.rows()[a] < scores.rows()[b];
  });
  std::stable_sort(col_order.begin(), col_order.end(), [&](auto a, auto b) {
    return scores.cols()[a] < scores.cols()[b];
  });

  const double optimum = detail::best_total(scores, row_order, col_order);

  Assignment out;
  std::vector<std::size_t> free_cols = col_order;
  double fixed = 0.0;
  for (std::size_t k = 0; k < nr; ++k) {
    const std::size_t r = row_order[k];
    const std::vector<std::size_t> later_rows(row_order.begin() + k + 1, row_order.end());
    bool matched = false;
    for (std::size_t idx = 0; idx < free_cols.size(); ++idx) {
      const std::size_t c = free_cols[idx];
      std::vector<std::size_t> rest = free_cols;
      rest.erase(rest.begin() + idx);
      const double candidate = fixed + scores.at(r, c) + detail::best_total(scores, later_rows, rest);
      if (candidate >= optimum - kTieTolerance) {
        out.pairs.push_back({scores.rows()[r], scores.cols()[c], scores.at(r, c)});
        fixed += scores.at(r, c);
        free_cols = std::move(rest);
        matched = true;
        break;
      }
    }
    if (!matched) out.unmatched_refs.push_back(scores.rows()[r]);
  }
  for (std::size_t c : free_cols) out.unmatched_preds.push_back(scores.cols()[c]);
  return out;
}

enum class MatchScore { Iou, Dsc };

inline ScoreMatrix score_matrix(const std::vector<InstanceView>& refs,
                                const std::vector<InstanceView>& preds, MatchScore kind) {
  std::vector<Label> rows, cols;
  for (const auto& v : refs) rows.push_back(v.label);
  for (const auto& v : preds) cols.push_back(v.label);
  std::vector<double> s;
  s.reserve(refs.size() * preds.size());
  for (const auto& a : refs) {
    for (const auto& b : preds) {
      const auto counts = overlap_counts(a, b);
      s.push_back(kind == MatchScore::Iou ? iou(counts) : dsc(counts));
    }
  }
  return {std::move(rows), std::move(cols), std::move(s)};
}

inline Assignment match_instances(const std::vector<InstanceView>& refs,
                                  const std::vector<InstanceView>& preds, MatchScore kind) {
  return hungarian_match(score_matrix(refs, preds, kind));
}

inline Assignment match_instances(const LabelMask& ref, const LabelMask& pred, MatchScore kind) {
  require_same_shape(ref, pred);
  return match_instances(instances(ref), instances(pred), kind);
}

struct DetectionOutcome {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<MatchedPair> tp_pairs;  // score is the IoU
};

/// Matched pairs with IoU strictly above `xi` are true positives. A matched
/// pair at or below `xi` counts as one miss and one false alarm.
inline DetectionOutcome classify_detections(const Assignment& assignment, double xi) {
  DetectionOutcome out;
  for (const auto& p : assignment.pairs) {
    if (p.score > xi) {
      ++out.tp;
      out.tp_pairs.push_back(p);
    } else {
      ++out.fn;
      ++out.fp;
    }
  }
  out.fn += assignment.unmatched_refs.size();
  out.fp += assignment.unmatched_preds.size();
  return out;
}

}  // namespace rmis
