// rmis: evaluate, rank, bootstrap and report on segmentation/detection
// challenge submissions.
//
// Exit codes: 0 success, 1 usage, 2 partial failure, 3 fatal I/O.

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rmis/rmis.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kPartial = 2, kFatal = 3 };

struct Options {
  double tau = 13.0;
  double xi = 0.3;
  double alpha = 0.05;
  double percentile = 0.05;
  std::size_t b = 1000;
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  std::string task = "binary-seg";
  std::string mode;
  std::string config;
};

const std::vector<std::string> kConfigKeys = {"tau",  "xi",   "alpha", "percentile", "b",
                                              "seed", "jobs", "task",  "mode"};

/// key = value lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw rmis::InputError("cannot open config file " + path.string());
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::map<std::string, std::string> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw rmis::ConfigError(path.string() + ":" + std::to_string(n) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
      throw rmis::ConfigError(path.string() + ":" + std::to_string(n) + ": unknown key '" + key + "'");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

/// Fills options the command line left unset from the config file.
void apply_config(CLI::App& sub, const Options& opt) {
  if (opt.config.empty()) return;
  for (const auto& [key, value] : read_config_file(opt.config)) {
    CLI::Option* o = sub.get_option_no_throw("--" + key);
    if (o == nullptr || o->count() > 0) continue;
    o->add_result(value);
    o->run_callback();
  }
}

rmis::RunConfig run_config(const Options& opt) {
  rmis::RunConfig c;
  c.task = rmis::parse_task(opt.task);
  c.metrics.tau = opt.tau;
  c.metrics.xi = opt.xi;
  c.ranking.alpha = opt.alpha;
  c.ranking.percentile = opt.percentile;
  c.b = opt.b;
  c.seed = opt.seed;
  c.jobs = opt.jobs;
  c.validate();
  return c;
}

ordered_json provenance(const Options& opt) {
  return {{"tau", opt.tau},   {"xi", opt.xi}, {"alpha", opt.alpha}, {"percentile", opt.percentile},
          {"b", opt.b},       {"seed", opt.seed}};
}

void write_json(const fs::path& path, const ordered_json& doc) {
  rmis::write_text_file(path, doc.dump(2) + "\n");
}

template <typename Writer>
void write_csv(const fs::path& path, Writer&& writer) {
  std::ostringstream out;
  writer(out);
  rmis::write_text_file(path, out.str());
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Stages to process for `metric`: the requested one, or every stage present.
std::vector<int> select_stages(const std::vector<rmis::MetricRow>& rows, const std::string& metric,
                               std::optional<int> stage) {
  const auto present = rmis::stages_of(rows, metric);
  if (present.empty()) throw rmis::ConfigError("metric '" + metric + "' not found in metrics file");
  if (!stage) return present;
  if (std::find(present.begin(), present.end(), *stage) == present.end()) {
    throw rmis::ConfigError("metric '" + metric + "' has no rows for stage " + std::to_string(*stage));
  }
  return {*stage};
}

std::string stage_suffix(const std::string& metric, int stage) {
  return metric + "_stage" + std::to_string(stage);
}

void print_leaderboard(const std::vector<rmis::LeaderboardEntry>& board, const std::string& title) {
  std::cout << title << "\n";
  for (const auto& e : board) {
    std::cout << "  " << std::setw(4) << e.rank << "  " << rmis::format_fixed(e.aggregate, 3) << "  "
              << e.team << "\n";
  }
}

// ---------------------------------------------------------------------------

int cmd_evaluate(const Options& opt, const fs::path& data, const fs::path& out,
                 const std::vector<std::string>& teams, const std::string& mi_match) {
  auto config = run_config(opt);
  config.data_root = data;
  config.out_dir = out;
  config.teams = teams;
  config.mi_match = mi_match == "iou" ? rmis::MatchScore::Iou : rmis::MatchScore::Dsc;
  fs::create_directories(out);

  std::ofstream log(out / "run.log", std::ios::app);
  log << timestamp() << " evaluate start task=" << opt.task << " data=" << data.string()
      << " jobs=" << opt.jobs << "\n";
  const auto result = rmis::evaluate(config);
  write_csv(out / "metrics.csv", [&](std::ostream& s) { rmis::write_metrics_csv(s, result.rows); });
  write_json(out / "metrics.json", rmis::metrics_json(config, result));
  for (const auto& e : result.errors) {
    log << timestamp() << " error team=" << e.team << " stage=" << e.stage << " case=" << e.case_id
        << ": " << e.message << "\n";
  }
  log << timestamp() << " evaluate done rows=" << result.rows.size()
      << " errors=" << result.errors.size() << "\n";

  std::cout << "wrote " << result.rows.size() << " rows to " << (out / "metrics.csv").string() << "\n";
  if (!result.errors.empty()) {
    std::cerr << result.errors.size() << " case(s) failed; see " << (out / "run.log").string() << "\n";
    return kPartial;
  }
  return kOk;
}

int cmd_rank(const Options& opt, const fs::path& metrics_csv, std::optional<std::string> metric,
             std::optional<int> stage, const fs::path& out) {
  if (opt.mode.empty()) throw rmis::ConfigError("rank needs --mode accuracy|robustness|detection");
  run_config(opt);
  const auto rows = rmis::read_metrics_csv(metrics_csv);
  const bool detection = opt.mode == "detection";
  if (!metric) {
    if (!detection) throw rmis::ConfigError("rank needs --metric for mode " + opt.mode);
    metric = "mAP";
  }
  fs::create_directories(out);
  for (int s : select_stages(rows, *metric, stage)) {
    const auto table = rmis::impute_missing(rmis::table_from_rows(rows, *metric, s));
    std::vector<rmis::LeaderboardEntry> board;
    if (detection) {
      if (table.case_count() != 1) {
        throw rmis::ConfigError("detection mode expects one aggregate value per team and stage");
      }
      std::vector<std::pair<std::string, double>> values;
      for (std::size_t a = 0; a < table.algorithm_count(); ++a) {
        values.emplace_back(table.algorithms()[a], *table.at(a, 0));
      }
      board = rmis::detection_rank(values);
    } else if (opt.mode == "accuracy") {
      board = table.algorithm_count() == 1
                  ? rmis::make_leaderboard(table.algorithms(), {0.0})
                  : rmis::significance_rank(table, opt.alpha);
    } else {
      board = rmis::robustness_rank(table, opt.percentile);
    }
    auto prov = provenance(opt);
    prov["mode"] = opt.mode;
    prov["metric"] = *metric;
    prov["stage"] = s;
    prov["cases"] = table.case_count();
    const auto base = out / ("leaderboard_" + stage_suffix(*metric, s) + "_" + opt.mode);
    write_csv(base.string() + ".csv", [&](std::ostream& o) { rmis::write_leaderboard_csv(o, board); });
    write_json(base.string() + ".json", rmis::leaderboard_json(board, prov));
    print_leaderboard(board, *metric + " stage " + std::to_string(s) + " (" + opt.mode + ")");
  }
  return kOk;
}

int cmd_bootstrap(const Options& opt, const fs::path& metrics_csv, const std::string& metric,
                  std::optional<int> stage, const fs::path& out) {
  const std::string mode = opt.mode.empty() ? "accuracy" : opt.mode;
  run_config(opt);
  const auto ranker = mode == "robustness" ? rmis::Ranker::Robustness : rmis::Ranker::Significance;
  const auto rows = rmis::read_metrics_csv(metrics_csv);
  fs::create_directories(out);
  for (int s : select_stages(rows, metric, stage)) {
    const auto table = rmis::table_from_rows(rows, metric, s);
    rmis::RankingConfig rc{opt.alpha, opt.percentile};
    const auto summary = rmis::bootstrap_rankings(table, ranker, rc, opt.b, opt.seed, opt.jobs);
    auto prov = provenance(opt);
    prov["mode"] = mode;
    prov["metric"] = metric;
    prov["stage"] = s;
    const auto base = out / ("bootstrap_" + stage_suffix(metric, s) + "_" + mode);
    write_csv(base.string() + ".csv", [&](std::ostream& o) {
      rmis::write_rank_frequency_csv(o, summary.algorithms, summary.rank_frequency);
    });
    write_json(base.string() + ".json", rmis::bootstrap_json(summary, prov));
    write_csv(out / ("rank_heatmap_" + stage_suffix(metric, s) + ".csv"), [&](std::ostream& o) {
      rmis::write_rank_frequency_csv(o, table.algorithms(), rmis::per_case_rank_frequencies(table));
    });
    std::cout << metric << " stage " << s << " bootstrap (" << mode << ", b=" << opt.b << ")\n";
    for (std::size_t a = 0; a < summary.algorithms.size(); ++a) {
      std::cout << "  " << summary.algorithms[a] << "  median " << summary.median_rank[a] << "  95% ["
                << summary.interval_lo[a] << ", " << summary.interval_hi[a] << "]\n";
    }
  }
  return kOk;
}

std::string describe(const rmis::SummaryStats& s) {
  std::ostringstream o;
  o << "mean " << rmis::format_fixed(s.mean, 3) << "  median " << rmis::format_fixed(s.median, 3)
    << "  IQR [" << rmis::format_fixed(s.q1, 3) << ", " << rmis::format_fixed(s.q3, 3) << "]  range ["
    << rmis::format_fixed(s.min, 3) << ", " << rmis::format_fixed(s.max, 3) << "]";
  return o.str();
}

int cmd_report(const Options& opt, const fs::path& metrics_csv, const std::string& cases_csv,
               const std::string& kind, const std::string& metric, std::optional<int> stage,
               std::size_t k, const std::string& aggregate, const fs::path& out) {
  const auto rows = rmis::read_metrics_csv(metrics_csv);
  std::map<std::string, rmis::CaseRecord> cases;
  if (!cases_csv.empty()) cases = rmis::read_cases_csv(cases_csv);
  if (kind == "stratify" && cases_csv.empty()) throw rmis::ConfigError("stratify needs --cases");
  fs::create_directories(out);
  auto prov = provenance(opt);
  prov["kind"] = kind;
  prov["metric"] = metric;

  if (kind == "stages") {
    std::vector<std::pair<int, rmis::MetricTable>> tables;
    for (int s : select_stages(rows, metric, stage)) {
      tables.emplace_back(s, rmis::table_from_rows(rows, metric, s));
    }
    const auto summary = rmis::stage_comparison(tables);
    const auto base = out / ("report_stages_" + metric);
    write_csv(base.string() + ".csv", [&](std::ostream& o) { rmis::write_stage_csv(o, summary); });
    std::ostringstream text;
    text << metric << " by stage (team means)\n";
    for (const auto& s : summary) {
      text << "  stage " << s.stage << ": median " << rmis::format_fixed(s.median, 3) << " (min "
           << rmis::format_fixed(s.min, 3) << ", max " << rmis::format_fixed(s.max, 3)
           << "); per image " << describe(s.per_image) << "\n";
    }
    rmis::write_text_file(base.string() + ".txt", text.str());
    write_json(base.string() + ".json", prov);
    std::cout << text.str();
    return kOk;
  }

  for (int s : select_stages(rows, metric, stage)) {
    const auto table = rmis::table_from_rows(rows, metric, s);
    const auto base = out / ("report_" + kind + "_" + stage_suffix(metric, s));
    std::ostringstream text;
    if (kind == "stratify") {
      const auto strata = rmis::stratify_by_instrument_count(table, cases);
      write_csv(base.string() + ".csv", [&](std::ostream& o) { rmis::write_stratified_csv(o, strata); });
      text << metric << " stage " << s << " by instrument count\n";
      for (const auto& st : strata) {
        text << "  " << std::setw(2) << st.bucket << "  n=" << st.count;
        if (st.stats) text << "  " << describe(*st.stats);
        text << "\n";
      }
    } else {
      const auto how = aggregate == "min" ? rmis::CaseAggregation::Min : rmis::CaseAggregation::Mean;
      const auto report = rmis::worst_cases(table, k, how);
      write_csv(base.string() + ".csv",
                [&](std::ostream& o) { rmis::write_worst_cases_csv(o, report, cases); });
      text << metric << " stage " << s << ": " << report.cases.size() << " worst cases by " << aggregate
           << " across teams" << (report.truncated ? " (fewer cases than requested)" : "") << "\n";
      for (std::size_t i = 0; i < report.cases.size(); ++i) {
        text << "  " << std::setw(4) << i + 1 << "  " << rmis::format_fixed(report.cases[i].aggregate, 3)
             << "  " << report.cases[i].case_id << "\n";
      }
      prov["k"] = k;
      prov["aggregate"] = aggregate;
      prov["truncated"] = report.truncated;
    }
    prov["stage"] = s;
    rmis::write_text_file(base.string() + ".txt", text.str());
    write_json(base.string() + ".json", prov);
    std::cout << text.str();
  }
  return kOk;
}

int cmd_match(const Options& opt, const fs::path& ref_path, const fs::path& pred_path,
              const std::string& score) {
  run_config(opt);
  const auto ref = rmis::load_mask_file(ref_path);
  const auto pred = rmis::load_mask_file(pred_path);
  rmis::require_same_shape(ref, pred);
  const auto refs = rmis::instances(ref);
  const auto preds = rmis::instances(pred);
  const auto kind = score == "dsc" ? rmis::MatchScore::Dsc : rmis::MatchScore::Iou;
  const auto assignment = rmis::match_instances(refs, preds, kind);
  auto view = [](const std::vector<rmis::InstanceView>& v, rmis::Label l) {
    return *std::find_if(v.begin(), v.end(), [&](const auto& x) { return x.label == l; });
  };
  std::cout << "matched on " << score << "; " << refs.size() << " reference and " << preds.size()
            << " predicted instances\n";
  std::cout << "  ref  pred     IoU     DSC     NSD  status\n";
  for (const auto& p : assignment.pairs) {
    const auto& r = view(refs, p.ref);
    const auto& q = view(preds, p.pred);
    const double i = rmis::iou(r, q);
    std::cout << "  " << std::setw(3) << p.ref << "  " << std::setw(4) << p.pred << "  "
              << rmis::format_fixed(i, 4) << "  " << rmis::format_fixed(rmis::dsc(r, q), 4) << "  "
              << rmis::format_fixed(rmis::nsd(r, q, opt.tau), 4) << "  "
              << (i > opt.xi ? "TP" : "FN+FP") << "\n";
  }
  for (auto l : assignment.unmatched_refs) std::cout << "  " << std::setw(3) << l << "     -  FN\n";
  for (auto l : assignment.unmatched_preds) std::cout << "    -  " << std::setw(4) << l << "  FP\n";
  const auto o = rmis::detection_outcome(ref, pred, opt.xi);
  std::cout << "TP " << o.tp << "  FP " << o.fp << "  FN " << o.fn << "\n";
  std::cout << "MI_DSC " << rmis::format_number(rmis::mi_dsc(ref, pred)) << "  MI_NSD "
            << rmis::format_number(rmis::mi_nsd(ref, pred, opt.tau)) << "\n";
  return kOk;
}

int cmd_tau(const fs::path& dir, double quantile, const std::string& out) {
  if (!fs::is_directory(dir)) throw rmis::InputError("no annotation directory " + dir.string());
  std::vector<fs::path> images;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) images.push_back(e.path());
  }
  std::sort(images.begin(), images.end());
  std::vector<std::string> annotators;
  std::vector<std::vector<rmis::LabelMask>> annotations;
  for (const auto& img : images) {
    std::map<std::string, fs::path> files;
    for (const auto& e : fs::directory_iterator(img)) {
      if (e.is_regular_file() && rmis::is_mask_file(e.path())) files[e.path().stem().string()] = e.path();
    }
    std::vector<std::string> names;
    for (const auto& [name, path] : files) names.push_back(name);
    if (annotations.empty()) {
      annotators = names;
    } else if (names != annotators) {
      throw rmis::InputError("image " + img.filename().string() + " does not have the same annotators as " +
                             images.front().filename().string());
    }
    std::vector<rmis::LabelMask> masks;
    for (const auto& [name, path] : files) masks.push_back(rmis::load_mask_file(path));
    annotations.push_back(std::move(masks));
  }
  const auto d = rmis::derive_tau(annotations, quantile);
  std::cout << "tau " << d.tau << " (quantile " << quantile << " of " << d.pooled
            << " pooled distances = " << rmis::format_number(d.quantile_value) << ")\n";
  if (d.skipped_pairs > 0) {
    std::cout << d.skipped_pairs << " annotator pair(s) skipped: exactly one mask empty\n";
  }
  if (!out.empty()) {
    write_json(out, {{"tau", d.tau},
                     {"quantile", quantile},
                     {"quantile_value", d.quantile_value},
                     {"pooled_distances", d.pooled},
                     {"skipped_pairs", d.skipped_pairs},
                     {"images", annotations.size()},
                     {"annotators", annotators}});
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation and ranking for surgical instrument segmentation challenges"};
  app.require_subcommand(1);
  Options opt;

  const auto task_check = CLI::IsMember({"binary-seg", "multi-seg", "multi-det"});
  auto add_config = [&](CLI::App* s) {
    s->add_option("--config", opt.config, "key = value file; command-line flags take precedence")
        ->check(CLI::ExistingFile);
  };
  auto add_metric_opts = [&](CLI::App* s) {
    s->add_option("--tau", opt.tau, "NSD boundary tolerance in pixels")->capture_default_str();
    s->add_option("--xi", opt.xi, "detection IoU threshold")->capture_default_str();
  };
  auto add_rank_opts = [&](CLI::App* s) {
    s->add_option("--alpha", opt.alpha, "Wilcoxon significance level")->capture_default_str();
    s->add_option("--percentile", opt.percentile, "robustness quantile")->capture_default_str();
  };

  // evaluate
  fs::path data, out = "out";
  std::vector<std::string> teams;
  std::string mi_match = "dsc";
  auto* evaluate = app.add_subcommand("evaluate", "compute per-case metrics for every team");
  evaluate->add_option("--data", data, "data root with references/ and one directory per team")
      ->required()
      ->check(CLI::ExistingDirectory);
  evaluate->add_option("--out", out, "output directory")->capture_default_str();
  evaluate->add_option("--task", opt.task, "binary-seg, multi-seg or multi-det")
      ->check(task_check)
      ->capture_default_str();
  evaluate->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
  evaluate->add_option("--teams", teams, "restrict to these teams");
  evaluate->add_option("--mi-match", mi_match, "instance matching score for MI metrics")
      ->check(CLI::IsMember({"dsc", "iou"}))
      ->capture_default_str();
  add_metric_opts(evaluate);
  add_config(evaluate);

  // rank
  fs::path metrics_csv;
  std::optional<std::string> metric;
  std::optional<int> stage;
  const auto mode_check = CLI::IsMember({"accuracy", "robustness", "detection"});
  auto* rank = app.add_subcommand("rank", "build leaderboards from a metrics CSV");
  rank->add_option("--metrics", metrics_csv, "metrics CSV")->required()->check(CLI::ExistingFile);
  rank->add_option("--mode", opt.mode, "accuracy, robustness or detection")->check(mode_check);
  rank->add_option("--metric", metric, "metric column (DSC, NSD, MI_DSC, MI_NSD, mAP)");
  rank->add_option("--stage", stage, "stage (default: every stage present)");
  rank->add_option("--out", out, "output directory")->capture_default_str();
  add_rank_opts(rank);
  add_metric_opts(rank);
  add_config(rank);

  // bootstrap
  std::string boot_metric;
  auto* bootstrap = app.add_subcommand("bootstrap", "ranking stability under case resampling");
  bootstrap->add_option("--metrics", metrics_csv, "metrics CSV")->required()->check(CLI::ExistingFile);
  bootstrap->add_option("--metric", boot_metric, "metric column")->required();
  bootstrap->add_option("--mode", opt.mode, "accuracy or robustness")
      ->check(CLI::IsMember({"accuracy", "robustness"}));
  bootstrap->add_option("--stage", stage, "stage (default: every stage present)");
  bootstrap->add_option("--b", opt.b, "bootstrap replicates")->check(CLI::PositiveNumber)->capture_default_str();
  bootstrap->add_option("--seed", opt.seed, "random seed")->capture_default_str();
  bootstrap->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
  bootstrap->add_option("--out", out, "output directory")->capture_default_str();
  add_rank_opts(bootstrap);
  add_metric_opts(bootstrap);
  add_config(bootstrap);

  // report
  std::string cases_csv, kind, aggregate = "mean", report_metric;
  std::size_t k = 100;
  auto* report = app.add_subcommand("report", "stratified, worst-case and cross-stage reports");
  report->add_option("--metrics", metrics_csv, "metrics CSV")->required()->check(CLI::ExistingFile);
  report->add_option("--cases", cases_csv, "case metadata CSV")->check(CLI::ExistingFile);
  report->add_option("--kind", kind, "stratify, worst or stages")
      ->required()
      ->check(CLI::IsMember({"stratify", "worst", "stages"}));
  report->add_option("--metric", report_metric, "metric column")->required();
  report->add_option("--stage", stage, "stage (default: every stage present)");
  report->add_option("--k", k, "number of worst cases")->check(CLI::PositiveNumber)->capture_default_str();
  report->add_option("--aggregate", aggregate, "worst-case aggregation across teams")
      ->check(CLI::IsMember({"mean", "min"}))
      ->capture_default_str();
  report->add_option("--out", out, "output directory")->capture_default_str();
  add_rank_opts(report);
  add_metric_opts(report);
  add_config(report);

  // match
  fs::path ref_path, pred_path;
  std::string score = "iou";
  auto* match = app.add_subcommand("match", "show the instance assignment for one mask pair");
  match->add_option("--ref", ref_path, "reference mask")->required()->check(CLI::ExistingFile);
  match->add_option("--pred", pred_path, "predicted mask")->required()->check(CLI::ExistingFile);
  match->add_option("--score", score, "matching score")
      ->check(CLI::IsMember({"iou", "dsc"}))
      ->capture_default_str();
  add_metric_opts(match);
  add_config(match);

  // tau
  fs::path annotations;
  double quantile = 0.95;
  std::string tau_out;
  auto* tau = app.add_subcommand("tau", "derive the NSD tolerance from inter-annotator agreement");
  tau->add_option("--annotations", annotations, "directory of <image>/<annotator>.<ext> masks")->required();
  tau->add_option("--quantile", quantile, "pooled distance quantile")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  tau->add_option("--out", tau_out, "write the derivation as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    apply_config(*sub, opt);
    if (sub == evaluate) return cmd_evaluate(opt, data, out, teams, mi_match);
    if (sub == rank) return cmd_rank(opt, metrics_csv, metric, stage, out);
    if (sub == bootstrap) return cmd_bootstrap(opt, metrics_csv, boot_metric, stage, out);
    if (sub == report) return cmd_report(opt, metrics_csv, cases_csv, kind, report_metric, stage, k, aggregate, out);
    if (sub == match) return cmd_match(opt, ref_path, pred_path, score);
    if (sub == tau) return cmd_tau(annotations, quantile, tau_out);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const rmis::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return kFatal;
  }
  return kUsage;
}
