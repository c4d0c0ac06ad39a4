#pragma once

// Batch evaluation over a directory tree:
//
//   <root>/references/<stage>/<case_id>.<ext>
//   <root>/<team>/<stage>/<case_id>.<ext>
//   <root>/<team>/<stage>/detections.csv      (optional, detection task)
//
// Cases are evaluated in parallel; rows are assembled in a fixed order so the
// output does not depend on the number of workers.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "rmis/error.hpp"
#include "rmis/io.hpp"
#include "rmis/mask.hpp"
#include "rmis/mask_io.hpp"
#include "rmis/matching.hpp"
#include "rmis/metrics.hpp"
#include "rmis/multi_metrics.hpp"
#include "rmis/ranking.hpp"

namespace rmis {

enum class Task { BinarySeg, MultiSeg, MultiDet };

inline const char* to_string(Task t) {
  switch (t) {
    case Task::BinarySeg: return "binary-seg";
    case Task::MultiSeg: return "multi-seg";
    case Task::MultiDet: return "multi-det";
  }
  return "";
}

inline Task parse_task(const std::string& s) {
  if (s == "binary-seg") return Task::BinarySeg;
  if (s == "multi-seg") return Task::MultiSeg;
  if (s == "multi-det") return Task::MultiDet;
  throw ConfigError("unknown task '" + s + "'");
}

inline std::vector<std::string> metric_names(Task t) {
  switch (t) {
    case Task::BinarySeg: return {"DSC", "NSD"};
    case Task::MultiSeg: return {"MI_DSC", "MI_NSD"};
    case Task::MultiDet: return {"TP", "FP", "FN"};
  }
  return {};
}

struct RunConfig {
  Task task = Task::BinarySeg;
  MetricConfig metrics;
  RankingConfig ranking;
  std::size_t b = 1000;
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  MatchScore mi_match = MatchScore::Dsc;
  std::filesystem::path data_root;
  std::vector<std::string> teams;  // empty: every directory except references/
  std::filesystem::path out_dir;

  void validate() const {
    metrics.validate();
    ranking.validate();
    if (b == 0) throw ConfigError("b must be >= 1");
    if (jobs == 0) throw ConfigError("jobs must be >= 1");
  }

  nlohmann::ordered_json provenance() const {
    return {{"task", to_string(task)},
            {"tau", metrics.tau},
            {"xi", metrics.xi},
            {"alpha", ranking.alpha},
            {"percentile", ranking.percentile},
            {"b", b},
            {"seed", seed},
            {"mi_match", mi_match == MatchScore::Dsc ? "dsc" : "iou"}};
  }
};

struct CaseError {
  std::string team;
  int stage = 0;
  std::string case_id;
  std::string message;
};

struct EvaluationResult {
  std::vector<MetricRow> rows;
  std::vector<CaseError> errors;  // missing or unreadable inputs; the run continues
};

inline constexpr std::array<const char*, 4> kMaskExtensions = {".png", ".pgm", ".txt", ".grid"};

inline bool is_mask_file(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return std::find(kMaskExtensions.begin(), kMaskExtensions.end(), ext) != kMaskExtensions.end();
}

/// First existing `<dir>/<case_id><ext>` in extension preference order.
inline std::optional<std::filesystem::path> find_mask(const std::filesystem::path& dir,
                                                      const std::string& case_id) {
  for (const char* ext : kMaskExtensions) {
    auto p = dir / (case_id + ext);
    if (std::filesystem::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

/// Stage directories under references/, ascending.
inline std::vector<int> discover_stages(const std::filesystem::path& root) {
  const auto refs = root / "references";
  if (!std::filesystem::is_directory(refs)) {
    throw InputError("missing reference directory " + refs.string());
  }
  std::vector<int> stages;
  for (const auto& e : std::filesystem::directory_iterator(refs)) {
    if (!e.is_directory()) continue;
    const auto name = e.path().filename().string();
    if (name == "1" || name == "2" || name == "3") stages.push_back(name[0] - '0');
  }
  std::sort(stages.begin(), stages.end());
  if (stages.empty()) throw InputError("no stage directories (1, 2, 3) under " + refs.string());
  return stages;
}

inline std::vector<std::string> discover_cases(const std::filesystem::path& dir) {
  std::set<std::string> ids;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && is_mask_file(e.path())) ids.insert(e.path().stem().string());
  }
  return {ids.begin(), ids.end()};
}

inline std::vector<std::string> discover_teams(const std::filesystem::path& root) {
  std::vector<std::string> teams;
  for (const auto& e : std::filesystem::directory_iterator(root)) {
    const auto name = e.path().filename().string();
    if (e.is_directory() && name != "references" && name.front() != '.') teams.push_back(name);
  }
  std::sort(teams.begin(), teams.end());
  return teams;
}

/// Runs `fn(i)` for i in [0, n) on `jobs` workers pulling indices in order.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

namespace detail {

struct TeamCase {
  std::vector<std::optional<double>> values;  // one per metric name
  std::optional<std::string> error;
  std::vector<DetectionRecord> detections;  // detection task only
};

struct StageInput {
  std::filesystem::path dir;
  bool has_csv = false;
  std::map<std::string, std::vector<DetectionRecord>> csv_detections;  // by case id
  std::optional<std::string> csv_error;
};

inline TeamCase evaluate_team_case(const RunConfig& config, const LabelMask& ref,
                                   const std::vector<InstanceView>& ref_views,
                                   const StageInput& input, const std::string& case_id) {
  TeamCase out;
  const std::size_t metric_count = metric_names(config.task).size();
  out.values.assign(metric_count, std::nullopt);
  try {
    std::vector<InstanceView> det_views;
    if (config.task == Task::MultiDet && input.has_csv) {
      if (input.csv_error) throw InputError(*input.csv_error);
      if (auto it = input.csv_detections.find(case_id); it != input.csv_detections.end()) {
        out.detections = it->second;
      }
      for (const auto& d : out.detections) {
        if (d.instance.width != ref.width() || d.instance.height != ref.height()) {
          throw ShapeError("detection mask shape differs from the reference");
        }
        det_views.push_back(d.instance);
      }
      std::sort(det_views.begin(), det_views.end(),
                [](const auto& a, const auto& b) { return a.label < b.label; });
    } else {
      const auto path = find_mask(input.dir, case_id);
      if (!path) throw InputError("missing prediction");
      const LabelMask pred = load_mask_file(*path);
      require_same_shape(ref, pred);
      switch (config.task) {
        case Task::BinarySeg:
          out.values[0] = dsc(ref, pred);
          out.values[1] = nsd(ref, pred, config.metrics.tau);
          return out;
        case Task::MultiSeg:
          out.values[0] = mi_dsc(ref, pred, config.mi_match);
          out.values[1] = mi_nsd(ref, pred, config.metrics.tau, config.mi_match);
          return out;
        case Task::MultiDet:
          out.detections = detections_from_mask(case_id, pred);
          for (const auto& d : out.detections) det_views.push_back(d.instance);
          break;
      }
    }
    const auto o = classify_detections(match_instances(ref_views, det_views, MatchScore::Iou),
                                       config.metrics.xi);
    out.values = {static_cast<double>(o.tp), static_cast<double>(o.fp), static_cast<double>(o.fn)};
  } catch (const std::exception& e) {
    out.values.assign(metric_count, std::nullopt);
    out.detections.clear();
    out.error = e.what();
  }
  return out;
}

}  // namespace detail

/// Evaluates every team on every reference case. A missing or unreadable
/// prediction yields MISSING rows and an entry in `errors`. Detection runs
/// also emit one "mAP" row per team and stage with case_id "*"; a case a
/// team failed on contributes its reference instances with no detections.
inline EvaluationResult evaluate(const RunConfig& config) {
  config.validate();
  const auto& root = config.data_root;
  if (!std::filesystem::is_directory(root)) throw InputError("no data root " + root.string());
  const auto stages = discover_stages(root);
  const auto teams = config.teams.empty() ? discover_teams(root) : config.teams;
  if (teams.empty()) throw InputError("no team directories under " + root.string());
  for (const auto& t : teams) {
    if (t == "references") throw ConfigError("'references' is not a valid team name");
  }
  const auto names = metric_names(config.task);
  const std::string task = to_string(config.task);

  EvaluationResult result;
  std::map<std::string, std::vector<MetricRow>> team_rows;
  for (int stage : stages) {
    const auto ref_dir = root / "references" / std::to_string(stage);
    const auto cases = discover_cases(ref_dir);

    std::vector<detail::StageInput> inputs(teams.size());
    for (std::size_t t = 0; t < teams.size(); ++t) {
      auto& in = inputs[t];
      in.dir = root / teams[t] / std::to_string(stage);
      const auto csv = in.dir / "detections.csv";
      in.has_csv = config.task == Task::MultiDet && std::filesystem::is_regular_file(csv);
      if (!in.has_csv) continue;
      try {
        for (auto& d : read_detections_csv(csv)) in.csv_detections[d.case_id].push_back(std::move(d));
      } catch (const std::exception& e) {
        in.csv_error = e.what();
      }
    }

    // grid[c][t]
    std::vector<std::vector<detail::TeamCase>> grid(cases.size());
    std::vector<std::optional<LabelMask>> refs(cases.size());
    std::vector<std::optional<std::string>> ref_errors(cases.size());
    parallel_for(cases.size(), config.jobs, [&](std::size_t c) {
      std::optional<LabelMask> ref;
      try {
        ref = load_mask_file(find_mask(ref_dir, cases[c]).value());
      } catch (const std::exception& e) {
        ref_errors[c] = e.what();
        grid[c].assign(teams.size(), {std::vector<std::optional<double>>(names.size()),
                                      std::string("reference unreadable"), {}});
        return;
      }
      std::vector<InstanceView> ref_views;
      if (config.task == Task::MultiDet) ref_views = instances(*ref);
      for (std::size_t t = 0; t < teams.size(); ++t) {
        grid[c].push_back(detail::evaluate_team_case(config, *ref, ref_views, inputs[t], cases[c]));
      }
      if (config.task == Task::MultiDet) refs[c] = std::move(ref);
    });

    for (std::size_t c = 0; c < cases.size(); ++c) {
      if (ref_errors[c]) result.errors.push_back({"references", stage, cases[c], *ref_errors[c]});
    }
    for (std::size_t t = 0; t < teams.size(); ++t) {
      auto& rows = team_rows[teams[t]];
      std::vector<DetectionRecord> detections;
      std::map<std::string, LabelMask> det_refs;
      for (std::size_t c = 0; c < cases.size(); ++c) {
        auto& cell = grid[c][t];
        for (std::size_t m = 0; m < names.size(); ++m) {
          rows.push_back({teams[t], task, stage, cases[c], names[m], cell.values[m]});
        }
        if (cell.error && !ref_errors[c]) {
          result.errors.push_back({teams[t], stage, cases[c], *cell.error});
        }
        if (config.task == Task::MultiDet && refs[c]) {
          det_refs.emplace(cases[c], *refs[c]);
          for (auto& d : cell.detections) detections.push_back(std::move(d));
        }
      }
      if (config.task == Task::MultiDet) {
        rows.push_back({teams[t], task, stage, "*", "mAP",
                        average_precision(detections, det_refs, config.metrics.xi).ap});
      }
    }
  }
  for (const auto& t : teams) {
    auto& rows = team_rows[t];
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  return result;
}

inline nlohmann::ordered_json metrics_json(const RunConfig& config, const EvaluationResult& r) {
  nlohmann::ordered_json doc;
  doc["config"] = config.provenance();
  auto& rows = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& m : r.rows) {
    nlohmann::ordered_json v = nullptr;
    if (m.value) v = *m.value;
    rows.push_back({{"team", m.team},
                    {"task", m.task},
                    {"stage", m.stage},
                    {"case_id", m.case_id},
                    {"metric", m.metric},
                    {"value", v}});
  }
  auto& errors = doc["errors"] = nlohmann::ordered_json::array();
  for (const auto& e : r.errors) {
    errors.push_back(
        {{"team", e.team}, {"stage", e.stage}, {"case_id", e.case_id}, {"message", e.message}});
  }
  return doc;
}

}  // namespace rmis
