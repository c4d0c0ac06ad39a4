#pragma once

// Published leaderboard columns used as rank fixtures, and a per-case table
// construction that reproduces a leaderboard's accuracy and robustness
// columns at the same time.

#include <string>
#include <vector>

#include "rmis/table.hpp"

namespace fixtures {

struct Column {
  std::vector<std::string> teams;
  std::vector<double> values;
  std::vector<int> ranks;
};

struct TeamSpec {
  std::string team;
  int level;          // accuracy tier; a team beats exactly the teams on lower tiers
  double robustness;  // target 5% quantile
};

/// 20 cases per team: two hard cases at `robustness`, eighteen at
/// 0.7 + 0.01 * level. Between teams on different tiers the eighteen equal
/// differences make the one-sided signed-rank test significant (p < 0.005)
/// whatever the hard cases do; between teams on the same tier at most two
/// differences remain and no test is significant. The 5% quantile of every
/// row is exactly `robustness`.
inline rmis::MetricTable tiered_table(const std::vector<TeamSpec>& specs) {
  std::vector<std::string> teams, cases;
  for (int c = 0; c < 20; ++c) cases.push_back("case" + std::string(c < 10 ? "0" : "") + std::to_string(c));
  std::vector<std::vector<double>> rows;
  for (const auto& s : specs) {
    teams.push_back(s.team);
    std::vector<double> row(20, 0.7 + 0.01 * s.level);
    row[3] = row[11] = s.robustness;
    rows.push_back(row);
  }
  return rmis::MetricTable::from_rows(teams, cases, rows);
}

// Binary segmentation, stage 3.
inline const std::vector<TeamSpec> kBinaryDsc = {
    {"fisensee", 9, 0.34}, {"haoyun", 8, 0.52}, {"CASIA_SRL", 7, 0.50}, {"Uniandes", 6, 0.28},
    {"caresyntax", 5, 0.00}, {"SQUASH", 4, 0.22}, {"www", 3, 0.49}, {"Djh", 2, 0.00},
    {"VIE", 1, 0.00}, {"NCT", 0, 0.00}};
inline const std::vector<TeamSpec> kBinaryNsd = {
    {"haoyun", 8, 0.63}, {"fisensee", 8, 0.45}, {"CASIA_SRL", 6, 0.62}, {"Uniandes", 6, 0.32},
    {"caresyntax", 5, 0.00}, {"www", 4, 0.57}, {"SQUASH", 3, 0.26}, {"VIE", 2, 0.00},
    {"NCT", 1, 0.00}, {"Djh", 0, 0.00}};

inline const Column kBinaryDscAccuracy = {
    {"fisensee", "haoyun", "CASIA_SRL", "Uniandes", "caresyntax", "SQUASH", "www", "Djh", "VIE", "NCT"},
    {1.00, 0.89, 0.78, 0.67, 0.56, 0.44, 0.33, 0.22, 0.11, 0.00},
    {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}};
inline const Column kBinaryDscRobustness = {
    {"haoyun", "CASIA_SRL", "www", "fisensee", "Uniandes", "SQUASH", "caresyntax", "Djh", "NCT", "VIE"},
    {0.52, 0.50, 0.49, 0.34, 0.28, 0.22, 0.00, 0.00, 0.00, 0.00},
    {1, 2, 3, 4, 5, 6, 7, 7, 7, 7}};
inline const Column kBinaryNsdAccuracy = {
    {"haoyun", "fisensee", "CASIA_SRL", "Uniandes", "caresyntax", "www", "SQUASH", "VIE", "NCT", "Djh"},
    {0.89, 0.89, 0.67, 0.67, 0.56, 0.44, 0.33, 0.22, 0.11, 0.00},
    {1, 1, 3, 3, 5, 6, 7, 8, 9, 10}};
inline const Column kBinaryNsdRobustness = {
    {"haoyun", "CASIA_SRL", "www", "fisensee", "Uniandes", "SQUASH", "caresyntax", "Djh", "NCT", "VIE"},
    {0.63, 0.62, 0.57, 0.45, 0.32, 0.26, 0.00, 0.00, 0.00, 0.00},
    {1, 2, 3, 4, 5, 6, 7, 7, 7, 7}};

// Multi-instance detection, stage 3 (raw mAP values).
inline const Column kDetectionStage3 = {
    {"Uniandes", "VIE", "caresyntax", "SQUASH", "fisensee", "www"},
    {1.000, 0.978, 0.972, 0.966, 0.964, 0.944},
    {1, 2, 3, 4, 5, 6}};

// Multi-instance segmentation, stage 3.
inline const Column kMultiDscAccuracy = {
    {"fisensee", "Uniandes", "caresyntax", "SQUASH", "www", "VIE", "CASIA_SRL"},
    {1.00, 0.83, 0.67, 0.33, 0.33, 0.17, 0.00},
    {1, 2, 3, 4, 4, 6, 7}};
inline const Column kMultiDscRobustness = {
    {"www", "Uniandes", "SQUASH", "CASIA_SRL", "fisensee", "caresyntax", "VIE"},
    {0.31, 0.26, 0.22, 0.19, 0.17, 0.00, 0.00},
    {1, 2, 3, 4, 5, 6, 6}};
inline const Column kMultiNsdAccuracy = {
    {"Uniandes", "caresyntax", "fisensee", "www", "SQUASH", "VIE", "CASIA_SRL"},
    {1.00, 0.67, 0.50, 0.50, 0.33, 0.17, 0.00},
    {1, 2, 3, 3, 5, 6, 7}};
inline const Column kMultiNsdRobustness = {
    {"www", "Uniandes", "CASIA_SRL", "SQUASH", "fisensee", "caresyntax", "VIE"},
    {0.35, 0.29, 0.27, 0.26, 0.16, 0.00, 0.00},
    {1, 2, 3, 4, 5, 6, 6}};

// Multi-instance detection, stage 1.
inline const Column kDetectionStage1 = {
    {"Isensee", "Uniandes", "SQUASH", "Caresyntax", "www", "VIE"},
    {1.000, 1.000, 0.967, 0.944, 0.900, 0.750},
    {1, 1, 3, 4, 5, 6}};

}  // namespace fixtures
