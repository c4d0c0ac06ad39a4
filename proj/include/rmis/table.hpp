#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmis/error.hpp"

namespace rmis {

/// Per-algorithm, per-case metric values. Absent cells are MISSING
/// (std::nullopt).
class MetricTable {
 public:
  using Cell = std::optional<double>;

  MetricTable() = default;

  MetricTable(std::vector<std::string> algorithms, std::vector<std::string> cases)
      : algorithms_(std::move(algorithms)),
        cases_(std::move(cases)),
        cells_(algorithms_.size() * cases_.size()) {}

  MetricTable(std::vector<std::string> algorithms, std::vector<std::string> cases,
              std::vector<Cell> cells)
      : algorithms_(std::move(algorithms)), cases_(std::move(cases)), cells_(std::move(cells)) {
    if (cells_.size() != algorithms_.size() * cases_.size()) {
      throw ShapeError("metric table is not rectangular");
    }
  }

  /// Dense table from one value vector per algorithm.
  static MetricTable from_rows(std::vector<std::string> algorithms, std::vector<std::string> cases,
                               const std::vector<std::vector<double>>& rows) {
    if (rows.size() != algorithms.size()) throw ShapeError("row count differs from algorithm count");
    MetricTable t(std::move(algorithms), std::move(cases));
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (rows[a].size() != t.case_count()) throw ShapeError("row length differs from case count");
      for (std::size_t c = 0; c < rows[a].size(); ++c) t.set(a, c, rows[a][c]);
    }
    return t;
  }

  std::size_t algorithm_count() const { return algorithms_.size(); }
  std::size_t case_count() const { return cases_.size(); }
  const std::vector<std::string>& algorithms() const { return algorithms_; }
  const std::vector<std::string>& cases() const { return cases_; }

  const Cell& at(std::size_t algorithm, std::size_t c) const {
    return cells_[algorithm * cases_.size() + c];
  }
  void set(std::size_t algorithm, std::size_t c, Cell value) {
    cells_[algorithm * cases_.size() + c] = value;
  }

  bool has_missing() const {
    for (const auto& c : cells_) {
      if (!c) return true;
    }
    return false;
  }

  /// Values of one algorithm; MISSING cells read as 0, the worst score.
  std::vector<double> row(std::size_t algorithm) const {
    std::vector<double> out(cases_.size());
    for (std::size_t c = 0; c < cases_.size(); ++c) out[c] = at(algorithm, c).value_or(0.0);
    return out;
  }

  friend bool operator==(const MetricTable&, const MetricTable&) = default;

 private:
  std::vector<std::string> algorithms_;
  std::vector<std::string> cases_;
  std::vector<Cell> cells_;
};

/// Every MISSING cell becomes 0.0.
inline MetricTable impute_missing(MetricTable table) {
  for (std::size_t a = 0; a < table.algorithm_count(); ++a) {
    for (std::size_t c = 0; c < table.case_count(); ++c) {
      if (!table.at(a, c)) table.set(a, c, 0.0);
    }
  }
  return table;
}

}  // namespace rmis
