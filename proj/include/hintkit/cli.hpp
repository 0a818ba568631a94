// Copyright 2026 The HintKit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HINTKIT_CLI_HPP_
#define HINTKIT_CLI_HPP_

// `hintkit` command line. run() is the whole program; main() only forwards
// argv, which keeps every subcommand testable in-process.
//
// Exit codes: 0 success, 1 validation findings, 2 usage error,
// 3 backend/IO failure.

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hintkit/config.hpp"
#include "hintkit/data.hpp"
#include "hintkit/hintgen.hpp"
#include "hintkit/hintrank.hpp"
#include "hintkit/metrics.hpp"
#include "hintkit/stats.hpp"
#include "hintkit/study.hpp"
#include "hintkit/study_http.hpp"
#include "hintkit/validate.hpp"

namespace hintkit::cli {

enum ExitCode : int { kOk = 0, kFindings = 1, kUsage = 2, kFailure = 3 };

struct CommonOptions {
  std::string dataset;
  std::string split = "all";
  std::string backend_config;
  std::string out;
  std::string format = "json";
  std::string replay;
  std::string record;
  size_t max_concurrency = 0;  // 0: take it from the backend config
};

namespace detail {

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(Errc::kIo, "cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

inline void add_common(CLI::App* cmd, CommonOptions& o, bool needs_backends) {
  cmd->add_option("--dataset", o.dataset, "Dataset file (JSON Lines)")->required();
  cmd->add_option("--split", o.split, "Split selector")->check(CLI::IsMember({"train", "test", "all"}));
  auto* cfg = cmd->add_option("--backend-config", o.backend_config, "Backend configuration file");
  if (needs_backends) cfg->required();
  cmd->add_option("--out", o.out, "Output file (default: stdout)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--replay", o.replay, "Answer backend calls from this cassette");
  cmd->add_option("--record", o.record, "Record backend calls into this cassette");
  cmd->add_option("--max-concurrency", o.max_concurrency, "Cap on parallel backend calls");
}

inline BackendBundle backends_for(const CommonOptions& o, const Dataset* data) {
  if (o.backend_config.empty()) return {};
  std::optional<CassetteSpec> cassette;
  if (!o.replay.empty() && !o.record.empty()) {
    throw Error(Errc::kInvalidArgument, "--replay and --record are mutually exclusive");
  }
  if (!o.replay.empty()) cassette = CassetteSpec{CassetteMode::kReplay, o.replay};
  if (!o.record.empty()) cassette = CassetteSpec{CassetteMode::kRecord, o.record};
  BackendBundle b = make_backends(load_config_file(o.backend_config), data, cassette);
  if (o.max_concurrency > 0) b.max_concurrency = o.max_concurrency;
  b.max_concurrency = std::max<size_t>(b.max_concurrency, 1);
  return b;
}

inline void emit_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

}  // namespace detail

inline int cmd_validate(const CommonOptions& o, bool no_source, std::ostream& out) {
  LoadOptions lo;
  lo.enforce_invariants = false;
  Dataset ds = load_dataset(o.dataset, parse_split(o.split), lo);
  BackendBundle b = detail::backends_for(o, &ds);
  ValidateOptions vo;
  vo.require_source = !no_source;
  size_t failed = 0;
  json reports = json::array();
  std::string text_out;
  for (const auto& item : ds.items) {
    const ValidationReport r = validate_item(item, b.embedding.get(), vo);
    if (!r.passed()) ++failed;
    reports.push_back(to_json(r));
    text_out += to_text(r);
  }
  detail::Output sink(o.out, out);
  if (o.format == "json") {
    detail::emit_json(*sink, json{{"items", ds.items.size()}, {"failed", failed}, {"reports", reports}});
  } else {
    *sink << text_out << ds.items.size() << " items, " << failed << " with findings\n";
  }
  return failed == 0 ? kOk : kFindings;
}

inline int cmd_stats(const CommonOptions& o, std::ostream& out) {
  const Dataset ds = load_dataset(o.dataset, parse_split(o.split));
  const StatsReport r = dataset_statistics(ds);
  detail::Output sink(o.out, out);
  if (o.format == "json") {
    detail::emit_json(*sink, to_json(r));
  } else {
    *sink << to_text(r);
  }
  return kOk;
}

struct EvalOptions {
  std::vector<std::string> metrics;
  int n_probe = kDefaultProbes;
  int n_candidates = kDefaultCandidates;
  bool drop_stopwords = false;
  std::string journal;
  std::string per_hint_out;
  std::string write_dataset;
};

inline int cmd_eval(const CommonOptions& o, const EvalOptions& e, std::ostream& out) {
  Dataset ds = load_dataset(o.dataset, parse_split(o.split));
  BackendBundle b = detail::backends_for(o, &ds);
  EvalConfig cfg;
  if (!e.metrics.empty()) {
    cfg.toggles = MetricToggles{false, false, false, false, false, false};
    for (const auto& m : e.metrics) {
      if (m == "relevance") cfg.toggles.relevance = true;
      else if (m == "readability") cfg.toggles.readability = true;
      else if (m == "convergence") cfg.toggles.convergence = true;
      else if (m == "familiarity") cfg.toggles.familiarity = true;
      else if (m == "length") cfg.toggles.length = true;
      else if (m == "leakage" || m == "answer_leakage") cfg.toggles.leakage = true;
      else throw Error(Errc::kInvalidArgument, "unknown metric '" + m + "'");
    }
  } else {
    // Without an explicit list, run whatever the configured backends allow.
    cfg.toggles.relevance = b.judge && b.embedding;
    cfg.toggles.readability = static_cast<bool>(b.classifier);
    cfg.toggles.convergence = static_cast<bool>(b.judge);
    cfg.toggles.leakage = static_cast<bool>(b.embedding);
  }
  cfg.backends = {b.embedding, b.classifier, b.judge};
  cfg.n_probe = e.n_probe;
  cfg.n_candidates = e.n_candidates;
  cfg.drop_stopwords = e.drop_stopwords;
  cfg.max_concurrency = std::max<size_t>(b.max_concurrency, 1);
  cfg.journal_path = e.journal;
  const EvalResult r = evaluate_dataset(ds, cfg);

  if (!e.per_hint_out.empty()) {
    std::ofstream f(e.per_hint_out);
    if (!f) throw Error(Errc::kIo, "cannot write '" + e.per_hint_out + "'");
    for (const auto& m : r.per_hint) f << to_json(m).dump() << '\n';
  }
  if (!e.write_dataset.empty()) save_dataset(e.write_dataset, ds);

  json by_rank = json::object();
  for (const auto& [name, field] :
       std::vector<std::pair<std::string, std::optional<double> HintMetrics::*>>{
           {"convergence", &HintMetrics::convergence}, {"length", &HintMetrics::length}}) {
    json row = json::object();
    for (const auto& [rank, v] : mean_by_rank(r.per_hint, field)) row[std::to_string(rank)] = v;
    by_rank[name] = row;
  }
  json reference = json::array();
  for (const auto& row : kReferenceQuality) {
    reference.push_back({{"dataset", row.dataset}, {"subset", row.subset},
                         {"relevance", row.relevance}, {"readability", row.readability},
                         {"convergence", row.convergence}, {"familiarity", row.familiarity},
                         {"length", row.length}, {"answer_leakage_avg", row.leakage_avg},
                         {"answer_leakage_max", row.leakage_max}});
  }
  json failures = json::array();
  for (const auto& m : r.per_hint) {
    if (!m.errors.empty()) failures.push_back({{"item_id", m.item_id}, {"hint_index", m.hint_index}, {"errors", m.errors}});
  }
  detail::Output sink(o.out, out);
  if (o.format == "json") {
    detail::emit_json(*sink, json{{"report", to_json(r.report)},
                                  {"by_rank", by_rank},
                                  {"failures", failures},
                                  {"reference", reference}});
  } else {
    *sink << quality_table(r.report, "this run", split_name(ds.split));
    if (!failures.empty()) *sink << failures.size() << " hints had metric failures\n";
  }
  return kOk;
}

struct RankCliOptions {
  bool answer_aware = true;
  bool pooled = false;
  bool soft_wins = false;
  std::string method = "HintRank";
  std::string config;
};

inline int cmd_rank(const CommonOptions& o, const RankCliOptions& ro, std::ostream& out) {
  const Dataset ds = load_dataset(o.dataset, parse_split(o.split));
  BackendBundle b = detail::backends_for(o, &ds);
  if (!b.pair) throw Error(Errc::kConfig, "rank needs a 'pair' backend");
  const AnswerMode mode = ro.answer_aware ? AnswerMode::kAware : AnswerMode::kAgnostic;
  RankOptions opts;
  opts.soft_wins = ro.soft_wins;
  const auto results = rank_dataset(ds, mode, *b.pair, opts, b.max_concurrency);
  const double acc = pairwise_accuracy(results, ds);
  const CorrelationResult corr = rank_correlation(results, ds, ro.pooled);
  const RankGapMatrix gap = rank_gap_matrix(results, ds);
  const std::string config = ro.config.empty() ? b.pair->id() : ro.config;

  detail::Output sink(o.out, out);
  if (o.format == "json") {
    json rs = json::array();
    for (const auto& r : results) rs.push_back(to_json(r));
    detail::emit_json(
        *sink, json{{"method", ro.method},
                    {"config", config},
                    {"backend", b.pair->id()},
                    {"mode", answer_mode_name(mode)},
                    {"items", results.size()},
                    {"accuracy", acc},
                    {"correlation", {{"value", corr.value},
                                     {"pooled", corr.pooled},
                                     {"items_used", corr.items_used},
                                     {"items_excluded", corr.items_excluded}}},
                    {"rank_gap_matrix", to_json(gap)},
                    {"reference", {{"method", "HintRank"}, {"config", "FTwA"},
                                   {"accuracy_pct", kReferenceHintRankAccuracy},
                                   {"correlation_pct", kReferenceHintRankCorrelation}}},
                    {"results", rs}});
  } else {
    *sink << ranking_summary_table(ro.method, config, mode, acc, corr.value);
    *sink << "\nRank-gap accuracy (row: rank of Hint_1, column: rank of Hint_2)\n     ";
    for (int c = 1; c <= kHintsPerItem; ++c) *sink << std::setw(7) << c;
    *sink << '\n';
    for (int r = 1; r <= kHintsPerItem; ++r) {
      *sink << std::setw(5) << r;
      for (int c = 1; c <= kHintsPerItem; ++c) {
        if (auto v = gap.at(r, c)) {
          *sink << std::setw(7) << std::fixed << std::setprecision(2) << *v;
        } else {
          *sink << std::setw(7) << "-";
        }
      }
      *sink << '\n';
    }
  }
  return kOk;
}

inline int cmd_export_pairs(const CommonOptions& o, bool answer_aware, std::ostream& out) {
  const Dataset ds = load_dataset(o.dataset, parse_split(o.split));
  detail::Output sink(o.out, out);
  for (const auto& p : export_training_pairs(ds, answer_aware ? AnswerMode::kAware : AnswerMode::kAgnostic)) {
    *sink << to_json(p).dump() << '\n';
  }
  return kOk;
}

inline int cmd_export_sft(const CommonOptions& o, bool with_answer, bool normalized, std::ostream& out) {
  const Dataset ds = load_dataset(o.dataset, parse_split(o.split));
  detail::Output sink(o.out, out);
  for (const auto& r : export_sft_records(ds, with_answer, normalized)) *sink << to_json(r).dump() << '\n';
  return kOk;
}

inline int cmd_generate(const CommonOptions& o, const std::string& mode, const std::string& guard,
                        bool normalized, std::ostream& out) {
  const Dataset ds = load_dataset(o.dataset, parse_split(o.split));
  BackendBundle b = detail::backends_for(o, &ds);
  if (!b.judge) throw Error(Errc::kConfig, "generate needs a 'judge' backend");
  const auto records = generate_for_dataset(ds, parse_generation_mode(mode), *b.judge,
                                            parse_guard(guard), b.embedding.get(), normalized,
                                            b.max_concurrency);
  detail::Output sink(o.out, out);
  size_t failed = 0;
  for (const auto& r : records) {
    if (r.error) ++failed;
    *sink << to_json(r).dump() << '\n';
  }
  return failed == 0 ? kOk : kFailure;
}

struct StudyOptions {
  std::string dataset;
  std::string split = "test";
  std::string log_dir = "study-logs";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  std::string facilitator_token;
  std::string group_by = "question_major";
  std::string format = "json";
  std::string out;
};

inline int cmd_study_serve(const StudyOptions& s, std::ostream& out) {
  std::map<std::string, Dataset> splits;
  splits[s.split] = load_dataset(s.dataset, parse_split(s.split));
  auto svc = std::make_shared<study::StudyService>(
      std::move(splits), std::make_shared<study::DirectoryEventStore>(s.log_dir));
  httplib::Server server;
  study::register_routes(server, svc, s.facilitator_token);
  if (!s.static_dir.empty() && !server.set_mount_point("/", s.static_dir)) {
    throw Error(Errc::kIo, "cannot serve static files from '" + s.static_dir + "'");
  }
  out << "study service on http://" << s.host << ":" << s.port << " (logs in " << s.log_dir << ")\n";
  out.flush();
  if (!server.listen(s.host, s.port)) throw Error(Errc::kIo, "cannot listen on port " + std::to_string(s.port));
  return kOk;
}

inline int cmd_study_report(const StudyOptions& s, std::ostream& out) {
  const Dataset ds = load_dataset(s.dataset, Split::kAll);
  std::vector<study::StudySession> sessions;
  for (const auto& [id, events] : study::DirectoryEventStore(s.log_dir).load_all()) {
    sessions.push_back(study::replay(events));
  }
  const auto groups = study::StudyService::aggregate(
      sessions, study::parse_group_by(s.group_by), [&](const std::string& id) {
        const QAItem* it = ds.find(id);
        return it ? it->question.major : std::string("UNKNOWN");
      });
  detail::Output sink(s.out, out);
  if (s.format == "json") {
    detail::emit_json(*sink, json{{"group_by", s.group_by}, {"sessions", sessions.size()},
                                  {"groups", study::to_json(groups)}});
  } else if (s.format == "csv") {
    *sink << study::to_csv(groups);
  } else {
    *sink << std::left << std::setw(16) << "group" << std::right << std::setw(12) << "no hints"
          << std::setw(12) << "with hints" << std::setw(10) << "skipped" << std::setw(12)
          << "mean hints" << '\n';
    for (const auto& [k, g] : groups) {
      *sink << std::left << std::setw(16) << k << std::right << std::setw(12) << g.answered_no_hints
            << std::setw(12) << g.answered_with_hints << std::setw(10) << g.skipped << std::setw(12)
            << std::fixed << std::setprecision(2) << g.mean_hints_used << '\n';
    }
  }
  return kOk;
}

inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::kInvalidArgument:
    case Errc::kConfig:
    case Errc::kUnknownSplit:
    case Errc::kModeAnswerMismatch:
      return kUsage;
    default:
      return kFailure;
  }
}

// argv[0] is the program name.
inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Hint dataset validation, evaluation, ranking, generation and studies", "hintkit"};
  app.require_subcommand(1);

  CommonOptions common;
  bool no_source = false;
  EvalOptions eval;
  RankCliOptions rank;
  bool answer_agnostic = false;
  bool without_answer = false;
  bool normalized_prompt = false;
  std::string gen_mode = "vanilla_woa";
  std::string guard = "reject";
  StudyOptions study_opts;

  auto* validate = app.add_subcommand("validate", "Check items against the hint selection criteria");
  detail::add_common(validate, common, false);
  validate->add_flag("--no-require-source", no_source, "Do not require hint sources");

  auto* stats = app.add_subcommand("stats", "Descriptive dataset statistics");
  detail::add_common(stats, common, false);

  auto* ev = app.add_subcommand("eval", "Hint-quality metrics over a dataset");
  detail::add_common(ev, common, true);
  ev->add_option("--metrics", eval.metrics,
                 "Subset of relevance,readability,convergence,familiarity,length,leakage")
      ->delimiter(',');
  ev->add_option("--n-probe", eval.n_probe, "Relevance probe questions per hint")->check(CLI::PositiveNumber);
  ev->add_option("--n-candidates", eval.n_candidates, "Convergence candidate answers")->check(CLI::Range(2, 1000));
  ev->add_flag("--drop-stopwords", eval.drop_stopwords, "Ignore stopwords in answer leakage");
  ev->add_option("--journal", eval.journal, "Progress journal for resumable runs");
  ev->add_option("--per-hint-out", eval.per_hint_out, "Write per-hint metrics (JSON Lines)");
  ev->add_option("--write-dataset", eval.write_dataset, "Write the dataset with metric fields filled in");

  auto* rk = app.add_subcommand("rank", "Pairwise tournament, Bradley-Terry ranking and scores");
  detail::add_common(rk, common, true);
  auto* aware_flag = rk->add_flag("--answer-aware", rank.answer_aware, "Include the answer (default)");
  auto* agnostic_flag = rk->add_flag("--answer-agnostic", answer_agnostic, "Omit the answer");
  aware_flag->excludes(agnostic_flag);
  rk->add_flag("--pooled", rank.pooled, "Pool hints across items for the correlation");
  rk->add_flag("--soft-wins", rank.soft_wins, "Use symmetrized probabilities as Bradley-Terry wins");
  rk->add_option("--method", rank.method, "Method label for the summary table");
  rk->add_option("--config-label", rank.config, "Config label for the summary table");

  auto* ep = app.add_subcommand("export-pairs", "Pairwise training records (JSON Lines)");
  detail::add_common(ep, common, false);
  bool pairs_aware = false, pairs_agnostic = false;
  auto* pa = ep->add_flag("--answer-aware", pairs_aware, "Include the answer (default)");
  auto* pg = ep->add_flag("--answer-agnostic", pairs_agnostic, "Omit the answer");
  pa->excludes(pg);

  auto* es = app.add_subcommand("export-sft", "Supervised finetuning records (JSON Lines)");
  detail::add_common(es, common, false);
  bool with_answer_flag = false;
  auto* wa = es->add_flag("--with-answer", with_answer_flag, "Answer-aware prompts (default)");
  auto* woa = es->add_flag("--without-answer", without_answer, "Answer-agnostic prompts");
  wa->excludes(woa);
  es->add_flag("--normalized-prompt", normalized_prompt, "Tidy the answer-aware prompt punctuation");

  auto* gen = app.add_subcommand("generate", "Generate one hint per question");
  detail::add_common(gen, common, true);
  gen->add_option("--mode", gen_mode, "Generation mode")
      ->check(CLI::IsMember({"vanilla_wa", "vanilla_woa", "ft_wa", "ft_woa"}));
  gen->add_option("--guard", guard, "Leakage guard: off | reject | regenerate:K");
  gen->add_flag("--normalized-prompt", normalized_prompt, "Tidy the answer-aware prompt punctuation");

  auto* st = app.add_subcommand("study", "Human hint study");
  st->require_subcommand(1);
  auto* serve = st->add_subcommand("serve", "Run the study HTTP service");
  serve->add_option("--dataset", study_opts.dataset, "Dataset file")->required();
  serve->add_option("--split", study_opts.split, "Split served to participants")
      ->check(CLI::IsMember({"train", "test", "all"}));
  serve->add_option("--log-dir", study_opts.log_dir, "Event log directory");
  serve->add_option("--host", study_opts.host, "Bind address");
  serve->add_option("--port", study_opts.port, "Port");
  serve->add_option("--static-dir", study_opts.static_dir, "Serve the participant UI from here");
  serve->add_option("--facilitator-token", study_opts.facilitator_token, "Token for /override");
  std::string serve_cfg, serve_fmt = "json", serve_out;
  serve->add_option("--backend-config", serve_cfg, "Unused; accepted for uniformity");
  serve->add_option("--format", serve_fmt, "Unused; accepted for uniformity");
  serve->add_option("--out", serve_out, "Unused; accepted for uniformity");
  auto* report = st->add_subcommand("report", "Aggregate study outcomes");
  report->add_option("--dataset", study_opts.dataset, "Dataset file")->required();
  report->add_option("--log-dir", study_opts.log_dir, "Event log directory");
  report->add_option("--group-by", study_opts.group_by, "question_major | participant")
      ->check(CLI::IsMember({"question_major", "major", "participant"}));
  report->add_option("--format", study_opts.format, "json | text | csv")
      ->check(CLI::IsMember({"json", "text", "csv"}));
  report->add_option("--out", study_opts.out, "Output file (default: stdout)");
  std::string report_cfg;
  report->add_option("--backend-config", report_cfg, "Unused; accepted for uniformity");

  std::vector<std::string> rev(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(common, no_source, out);
    if (*stats) return cmd_stats(common, out);
    if (*ev) return cmd_eval(common, eval, out);
    if (*rk) {
      rank.answer_aware = !answer_agnostic;
      return cmd_rank(common, rank, out);
    }
    if (*ep) return cmd_export_pairs(common, !pairs_agnostic, out);
    if (*es) return cmd_export_sft(common, !without_answer, normalized_prompt, out);
    if (*gen) return cmd_generate(common, gen_mode, guard, normalized_prompt, out);
    if (*serve) return cmd_study_serve(study_opts, out);
    if (*report) return cmd_study_report(study_opts, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  err << app.help();
  return kUsage;
}

}  // namespace hintkit::cli

#endif  // HINTKIT_CLI_HPP_
