#pragma once

// CSV and JSON formats shared by the CLI: metrics tables, case metadata,
// detection lists, leaderboards, bootstrap summaries and reports.
//
// CSV dialect: comma separated, '.' decimal point, LF line endings, mandatory
// header row. Numbers are written in shortest round-trip form so that output
// is byte-stable.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "rmis/analysis.hpp"
#include "rmis/bootstrap.hpp"
#include "rmis/error.hpp"
#include "rmis/mask.hpp"
#include "rmis/mask_io.hpp"
#include "rmis/multi_metrics.hpp"
#include "rmis/ranking.hpp"
#include "rmis/table.hpp"

namespace rmis {

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return {buf, ptr};
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

/// Reads every record of a CSV stream (quoted fields allowed, CRLF tolerated).
inline std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c = 0;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw InputError("unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

/// Maps header names to column indices and checks that `required` exist.
inline std::map<std::string, std::size_t> csv_header(const std::vector<std::string>& header,
                                                     const std::vector<std::string>& required,
                                                     const std::string& what) {
  std::map<std::string, std::size_t> cols;
  for (std::size_t i = 0; i < header.size(); ++i) cols[header[i]] = i;
  for (const auto& name : required) {
    if (!cols.contains(name)) throw InputError(what + " is missing column '" + name + "'");
  }
  return cols;
}

inline double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("malformed number for " + what + ": '" + s + "'");
  }
  return v;
}

inline long long parse_int(const std::string& s, const std::string& what) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("malformed integer for " + what + ": '" + s + "'");
  }
  return v;
}

inline std::vector<std::vector<std::string>> read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  auto rows = read_csv(in);
  if (rows.empty()) throw InputError(path.string() + " has no header row");
  return rows;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Metrics CSV: team,task,stage,case_id,metric,value (empty value = MISSING)

struct MetricRow {
  std::string team;
  std::string task;
  int stage = 1;
  std::string case_id;
  std::string metric;
  std::optional<double> value;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

inline const std::vector<std::string> kMetricsHeader = {"team", "task", "stage",
                                                        "case_id", "metric", "value"};

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  write_csv_row(out, kMetricsHeader);
  for (const auto& r : rows) {
    write_csv_row(out, {r.team, r.task, std::to_string(r.stage), r.case_id, r.metric,
                        r.value ? format_number(*r.value) : std::string()});
  }
}

inline std::vector<MetricRow> parse_metrics_csv(std::istream& in) {
  const auto rows = read_csv(in);
  if (rows.empty()) throw InputError("metrics CSV has no header row");
  const auto cols = detail::csv_header(rows[0], kMetricsHeader, "metrics CSV");
  std::vector<MetricRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() == 1 && r[0].empty()) continue;
    if (r.size() != rows[0].size()) {
      throw InputError("metrics CSV line " + std::to_string(i + 1) + " has " +
                       std::to_string(r.size()) + " fields");
    }
    MetricRow m;
    m.team = r[cols.at("team")];
    m.task = r[cols.at("task")];
    m.stage = static_cast<int>(detail::parse_int(r[cols.at("stage")], "stage"));
    m.case_id = r[cols.at("case_id")];
    m.metric = r[cols.at("metric")];
    const auto& v = r[cols.at("value")];
    if (!v.empty()) m.value = detail::parse_double(v, "value");
    out.push_back(std::move(m));
  }
  return out;
}

inline std::vector<MetricRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_metrics_csv(in);
}

/// Stages present for `metric`, ascending.
inline std::vector<int> stages_of(const std::vector<MetricRow>& rows, const std::string& metric) {
  std::set<int> s;
  for (const auto& r : rows) {
    if (r.metric == metric) s.insert(r.stage);
  }
  return {s.begin(), s.end()};
}

/// Builds the (team x case) table of one metric and stage. Teams and cases are
/// sorted; a case some team lacks a row for is MISSING for that team.
inline MetricTable table_from_rows(const std::vector<MetricRow>& rows, const std::string& metric,
                                   int stage) {
  std::set<std::string> teams, cases;
  for (const auto& r : rows) {
    if (r.metric != metric || r.stage != stage) continue;
    teams.insert(r.team);
    cases.insert(r.case_id);
  }
  if (teams.empty()) {
    throw InputError("no rows for metric '" + metric + "' in stage " + std::to_string(stage));
  }
  std::vector<std::string> team_list(teams.begin(), teams.end());
  std::vector<std::string> case_list(cases.begin(), cases.end());
  MetricTable table(team_list, case_list);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : rows) {
    if (r.metric != metric || r.stage != stage) continue;
    if (!seen.emplace(r.team, r.case_id).second) {
      throw InputError("duplicate row for team " + r.team + ", case " + r.case_id);
    }
    const auto a = static_cast<std::size_t>(
        std::lower_bound(team_list.begin(), team_list.end(), r.team) - team_list.begin());
    const auto c = static_cast<std::size_t>(
        std::lower_bound(case_list.begin(), case_list.end(), r.case_id) - case_list.begin());
    table.set(a, c, r.value);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Case metadata: case_id,stage,surgery_type,instrument_count

inline std::map<std::string, CaseRecord> read_cases_csv(const std::filesystem::path& path) {
  const auto rows = detail::read_csv_file(path);
  const auto cols = detail::csv_header(
      rows[0], {"case_id", "stage", "surgery_type", "instrument_count"}, "cases CSV");
  std::map<std::string, CaseRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() == 1 && r[0].empty()) continue;
    if (r.size() != rows[0].size()) {
      throw InputError("cases CSV line " + std::to_string(i + 1) + " is malformed");
    }
    CaseRecord c;
    c.case_id = r[cols.at("case_id")];
    c.stage = static_cast<int>(detail::parse_int(r[cols.at("stage")], "stage"));
    c.surgery_type = r[cols.at("surgery_type")];
    c.instrument_count =
        static_cast<int>(detail::parse_int(r[cols.at("instrument_count")], "instrument_count"));
    if (c.stage < 1 || c.stage > 3) throw InputError("stage must be 1, 2 or 3 for " + c.case_id);
    if (c.instrument_count < 0) throw InputError("negative instrument_count for " + c.case_id);
    if (!out.emplace(c.case_id, c).second) throw InputError("duplicate case id " + c.case_id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Detections: case_id,instance_label,confidence,mask_path (relative paths are
// resolved against the CSV's directory). The instance is the set of pixels
// carrying instance_label in that mask.

inline std::vector<DetectionRecord> read_detections_csv(const std::filesystem::path& path) {
  const auto rows = detail::read_csv_file(path);
  const auto cols = detail::csv_header(
      rows[0], {"case_id", "instance_label", "confidence", "mask_path"}, "detections CSV");
  std::map<std::filesystem::path, std::vector<InstanceView>> cache;
  std::vector<DetectionRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() == 1 && r[0].empty()) continue;
    if (r.size() != rows[0].size()) {
      throw InputError("detections CSV line " + std::to_string(i + 1) + " is malformed");
    }
    std::filesystem::path mask_path = r[cols.at("mask_path")];
    if (mask_path.is_relative()) mask_path = path.parent_path() / mask_path;
    auto it = cache.find(mask_path);
    if (it == cache.end()) it = cache.emplace(mask_path, instances(load_mask_file(mask_path))).first;
    const auto label = detail::parse_int(r[cols.at("instance_label")], "instance_label");
    auto view = std::find_if(it->second.begin(), it->second.end(),
                             [&](const InstanceView& v) { return v.label == label; });
    if (view == it->second.end()) {
      throw InputError("label " + std::to_string(label) + " not present in " + mask_path.string());
    }
    out.push_back({r[cols.at("case_id")], *view,
                   detail::parse_double(r[cols.at("confidence")], "confidence")});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Leaderboards

/// CSV aggregates are rounded to 3 decimals; ranks come from raw values.
inline void write_leaderboard_csv(std::ostream& out, const std::vector<LeaderboardEntry>& board) {
  write_csv_row(out, {"team", "aggregate", "rank"});
  for (const auto& e : board) {
    write_csv_row(out, {e.team, format_fixed(e.aggregate, 3), std::to_string(e.rank)});
  }
}

inline nlohmann::ordered_json leaderboard_json(const std::vector<LeaderboardEntry>& board,
                                               const nlohmann::ordered_json& provenance) {
  nlohmann::ordered_json doc;
  doc["config"] = provenance;
  auto& entries = doc["leaderboard"] = nlohmann::ordered_json::array();
  for (const auto& e : board) {
    entries.push_back({{"team", e.team},
                       {"aggregate", e.aggregate},
                       {"aggregate_display", format_fixed(e.aggregate, 3)},
                       {"rank", e.rank}});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Bootstrap summaries and rank heatmaps

inline void write_rank_frequency_csv(std::ostream& out, const std::vector<std::string>& algorithms,
                                     const std::vector<std::vector<std::size_t>>& counts) {
  write_csv_row(out, {"algorithm", "rank", "frequency"});
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    for (std::size_t r = 0; r < counts[a].size(); ++r) {
      write_csv_row(out, {algorithms[a], std::to_string(r + 1), std::to_string(counts[a][r])});
    }
  }
}

inline nlohmann::ordered_json bootstrap_json(const BootstrapSummary& s,
                                             const nlohmann::ordered_json& provenance) {
  nlohmann::ordered_json doc;
  doc["b"] = s.b;
  doc["seed"] = s.seed;
  doc["ranker"] = to_string(s.ranker);
  doc["rng"] = "mt19937_64 seeded with splitmix64(seed ^ splitmix64(replicate))";
  doc["config"] = provenance;
  auto& algs = doc["algorithms"] = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < s.algorithms.size(); ++a) {
    algs.push_back({{"algorithm", s.algorithms[a]},
                    {"median_rank", s.median_rank[a]},
                    {"interval_95", {s.interval_lo[a], s.interval_hi[a]}},
                    {"rank_frequency", s.rank_frequency[a]}});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Reports

inline void write_stratified_csv(std::ostream& out, const std::vector<StratifiedStats>& strata) {
  write_csv_row(out, {"bucket", "count", "mean", "median", "q1", "q3", "min", "max"});
  for (const auto& s : strata) {
    std::vector<std::string> row = {s.bucket, std::to_string(s.count)};
    if (s.stats) {
      for (double v : {s.stats->mean, s.stats->median, s.stats->q1, s.stats->q3, s.stats->min,
                       s.stats->max}) {
        row.push_back(format_number(v));
      }
    } else {
      row.resize(8);
    }
    write_csv_row(out, row);
  }
}

inline void write_worst_cases_csv(std::ostream& out, const WorstCaseReport& report,
                                  const std::map<std::string, CaseRecord>& cases) {
  std::vector<std::string> header = {"rank", "case_id", "aggregate", "stage", "surgery_type",
                                     "instrument_count"};
  for (const auto& a : report.algorithms) header.push_back(a);
  write_csv_row(out, header);
  for (std::size_t i = 0; i < report.cases.size(); ++i) {
    const auto& w = report.cases[i];
    std::vector<std::string> row = {std::to_string(i + 1), w.case_id, format_number(w.aggregate)};
    if (auto it = cases.find(w.case_id); it != cases.end()) {
      row.push_back(std::to_string(it->second.stage));
      row.push_back(it->second.surgery_type);
      row.push_back(std::to_string(it->second.instrument_count));
    } else {
      row.insert(row.end(), {"", "", ""});
    }
    for (const auto& v : w.values) row.push_back(v ? format_number(*v) : std::string());
    write_csv_row(out, row);
  }
}

inline void write_stage_csv(std::ostream& out, const std::vector<StageSummary>& stages) {
  write_csv_row(out, {"stage", "team_median", "team_min", "team_max", "image_median", "image_min",
                      "image_max"});
  for (const auto& s : stages) {
    write_csv_row(out, {std::to_string(s.stage), format_number(s.median), format_number(s.min),
                        format_number(s.max), format_number(s.per_image.median),
                        format_number(s.per_image.min), format_number(s.per_image.max)});
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace rmis
