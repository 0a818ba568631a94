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

#ifndef HINTKIT_METRICS_HPP_
#define HINTKIT_METRICS_HPP_

// Hint-quality measures: relevance, readability, convergence, familiarity,
// length and answer leakage, plus dataset-level evaluation.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hintkit/backends.hpp"
#include "hintkit/data.hpp"
#include "hintkit/parallel.hpp"
#include "hintkit/prompts.hpp"

namespace hintkit {

inline constexpr int kDefaultProbes = 3;
inline constexpr int kDefaultCandidates = 10;

struct Leakage {
  double avg = 0;
  double max = 0;
};

// Per-token similarity to the answer: clamp(cosine(embed(token),
// embed(answer)), 0, 1), reduced by mean and max. The answer goes through the
// same tokenization as the hint, so a hint token equal to the answer embeds
// identically.
inline Leakage answer_leakage(std::string_view hint, std::string_view answer,
                              const EmbeddingBackend& backend, bool drop_stopwords = false) {
  const auto tokens = text::leakage_tokens(hint, drop_stopwords);
  if (tokens.empty()) throw Error(Errc::kNoTokens, "hint has no word tokens");
  std::string key;
  for (const auto& t : text::leakage_tokens(answer, false)) key += (key.empty() ? "" : " ") + t;
  const Vector target = backend.embed(key.empty() ? answer : std::string_view(key));
  std::unordered_map<std::string, double> memo;
  Leakage out;
  double sum = 0;
  for (const auto& t : tokens) {
    auto it = memo.find(t);
    if (it == memo.end()) {
      it = memo.emplace(t, clamp01(cosine(backend.embed(t), target))).first;
    }
    sum += it->second;
    out.max = std::max(out.max, it->second);
  }
  out.avg = clamp01(sum / static_cast<double>(tokens.size()));
  return out;
}

inline int readability(std::string_view text_in, const ClassifierBackend& backend,
                       std::string_view text_id = "") {
  if (text::trim(text_in).empty()) {
    throw Error(Errc::kInvalidArgument, "readability of empty text");
  }
  int level;
  try {
    level = backend.classify_readability(text_in);
  } catch (const std::exception& e) {
    throw Error(Errc::kMetricBackendError,
                "readability backend failed on '" + std::string(text_id) + "': " + e.what());
  }
  if (level < 0 || level > 2) {
    throw Error(Errc::kMetricBackendError, "readability backend returned " +
                                               std::to_string(level) + " for '" +
                                               std::string(text_id) + "'");
  }
  return level;
}

// The hint is scored as an answer: the judge writes n_probe questions that
// the hint answers, and the score is their mean clamped cosine similarity to
// the real question.
inline double relevance(std::string_view question, std::string_view hint,
                        const JudgeBackend& judge, const EmbeddingBackend& embed,
                        int n_probe = kDefaultProbes) {
  if (n_probe < 1) throw Error(Errc::kInvalidArgument, "n_probe must be >= 1");
  auto probes = judge.generate(prompts::relevance_probe(hint), n_probe);
  std::erase_if(probes, [](const std::string& p) { return text::trim(p).empty(); });
  if (probes.empty()) throw Error(Errc::kNoProbes, "judge returned no probe questions");
  if (probes.size() > static_cast<size_t>(n_probe)) probes.resize(n_probe);
  const Vector q = embed.embed(question);
  double sum = 0;
  for (const auto& p : probes) sum += clamp01(cosine(embed.embed(text::trim(p)), q));
  return clamp01(sum / static_cast<double>(probes.size()));
}

// Candidate answers for convergence. gold_index points at the gold answer,
// which is appended when the judge did not propose it.
struct CandidateSet {
  std::vector<std::string> candidates;
  size_t gold_index = 0;
  size_t proposed = 0;  // usable candidates that came from the judge
};

namespace detail {

inline std::string strip_list_marker(std::string s) {
  s = text::trim(s);
  size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')' || s[i] == ':')) {
    s = s.substr(i + 1);
  } else if (!s.empty() && (s[0] == '-' || s[0] == '*')) {
    s = s.substr(1);
  }
  s = text::trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return text::trim(s);
}

inline std::optional<bool> parse_yes_no(std::string_view reply) {
  const auto toks = text::leakage_tokens(reply);
  if (toks.empty()) return std::nullopt;
  if (toks.front() == "yes") return true;
  if (toks.front() == "no") return false;
  return std::nullopt;
}

}  // namespace detail

inline CandidateSet propose_candidates(std::string_view question, const Answer& gold,
                                       const JudgeBackend& judge,
                                       int n_candidates = kDefaultCandidates) {
  if (n_candidates < 2) throw Error(Errc::kInvalidArgument, "n_candidates must be >= 2");
  CandidateSet set;
  std::set<std::string> seen;
  std::optional<size_t> gold_at;
  for (const auto& completion : judge.generate(prompts::candidate_answers(question, n_candidates), 1)) {
    std::istringstream lines(completion);
    std::string line;
    while (std::getline(lines, line)) {
      if (set.candidates.size() >= static_cast<size_t>(n_candidates)) break;
      std::string c = detail::strip_list_marker(line);
      std::string key = text::normalize_answer(c);
      if (key.empty() || !seen.insert(key).second) continue;
      if (!gold_at && text::matches_answer(c, gold.text, gold.aliases)) gold_at = set.candidates.size();
      set.candidates.push_back(std::move(c));
    }
  }
  set.proposed = set.candidates.size();
  if (set.proposed < 2) {
    throw Error(Errc::kTooFewCandidates,
                "judge proposed " + std::to_string(set.proposed) + " usable candidates");
  }
  if (gold_at) {
    set.gold_index = *gold_at;
  } else {
    set.gold_index = set.candidates.size();
    set.candidates.push_back(gold.text);
  }
  return set;
}

// Fraction of incorrect candidates eliminated by the hint prefix (a candidate
// survives only if the judge finds it consistent with every hint); zero when
// the gold answer is eliminated. Unparseable replies keep the candidate.
inline double convergence_with(std::string_view question, const CandidateSet& set,
                               const std::vector<std::string>& hints_prefix,
                               const JudgeBackend& judge) {
  std::vector<bool> alive(set.candidates.size(), true);
  for (const auto& hint : hints_prefix) {
    for (size_t c = 0; c < set.candidates.size(); ++c) {
      if (!alive[c]) continue;
      const auto replies = judge.generate(prompts::consistency(question, hint, set.candidates[c]), 1);
      if (replies.empty()) continue;
      if (detail::parse_yes_no(replies.front()) == std::optional<bool>(false)) alive[c] = false;
    }
  }
  if (!alive[set.gold_index]) return 0.0;
  const size_t incorrect = set.candidates.size() - 1;
  size_t eliminated = 0;
  for (size_t c = 0; c < set.candidates.size(); ++c) {
    if (c != set.gold_index && !alive[c]) ++eliminated;
  }
  return static_cast<double>(eliminated) / static_cast<double>(incorrect);
}

inline double convergence(std::string_view question, const Answer& answer,
                          const std::vector<std::string>& hints_prefix,
                          const JudgeBackend& judge, int n_candidates = kDefaultCandidates) {
  return convergence_with(question, propose_candidates(question, answer, judge, n_candidates),
                          hints_prefix, judge);
}

// Mean normalized page views of the entities that have one; 1.0 when none do.
inline double familiarity(const std::vector<EntityMention>& entities) {
  double sum = 0;
  size_t n = 0;
  for (const auto& e : entities) {
    if (e.normalized_views) {
      sum += clamp01(*e.normalized_views);
      ++n;
    }
  }
  return n == 0 ? 1.0 : clamp01(sum / static_cast<double>(n));
}

struct MetricToggles {
  bool relevance = true;
  bool readability = true;
  bool convergence = true;
  bool familiarity = true;
  bool length = true;
  bool leakage = true;

  bool any() const {
    return relevance || readability || convergence || familiarity || length || leakage;
  }
};

struct MetricBackends {
  std::shared_ptr<const EmbeddingBackend> embedding;
  std::shared_ptr<const ClassifierBackend> classifier;
  std::shared_ptr<const JudgeBackend> judge;
};

struct EvalConfig {
  MetricToggles toggles;
  MetricBackends backends;
  int n_probe = kDefaultProbes;
  int n_candidates = kDefaultCandidates;
  bool drop_stopwords = false;
  size_t max_concurrency = 1;
  // Progress journal (JSON Lines of HintMetrics). Empty disables resume.
  std::string journal_path;
};

// Values computed for one hint. A metric that failed has no value and an
// entry in `errors`.
struct HintMetrics {
  std::string item_id;
  int hint_index = 0;
  int rank = 0;
  std::optional<double> relevance;
  std::optional<double> readability;
  std::optional<double> convergence;
  std::optional<double> familiarity;
  std::optional<double> length;
  std::optional<double> answer_leakage_avg;
  std::optional<double> answer_leakage_max;
  std::map<std::string, std::string> errors;

  bool operator==(const HintMetrics&) const = default;
};

enum class MetricScope { kHint, kItem, kDataset };

struct MetricReport {
  MetricScope scope = MetricScope::kDataset;
  std::optional<double> relevance;
  std::optional<double> readability;
  std::optional<double> convergence;
  std::optional<double> familiarity;
  std::optional<double> length;
  std::optional<double> answer_leakage_avg;
  std::optional<double> answer_leakage_max;
  size_t hints = 0;
  size_t failures = 0;
};

inline json to_json(const HintMetrics& m) {
  json j = {{"item_id", m.item_id}, {"hint_index", m.hint_index}, {"rank", m.rank}};
  detail::put_opt(j, "relevance", m.relevance);
  detail::put_opt(j, "readability", m.readability);
  detail::put_opt(j, "convergence", m.convergence);
  detail::put_opt(j, "familiarity", m.familiarity);
  detail::put_opt(j, "length", m.length);
  detail::put_opt(j, "answer_leakage_avg", m.answer_leakage_avg);
  detail::put_opt(j, "answer_leakage_max", m.answer_leakage_max);
  if (!m.errors.empty()) j["errors"] = m.errors;
  return j;
}

inline HintMetrics hint_metrics_from_json(const json& j) {
  HintMetrics m;
  m.item_id = j.at("item_id").get<std::string>();
  m.hint_index = j.at("hint_index").get<int>();
  m.rank = j.value("rank", 0);
  auto opt = [&](const char* k) -> std::optional<double> {
    if (j.contains(k) && j[k].is_number()) return j[k].get<double>();
    return std::nullopt;
  };
  m.relevance = opt("relevance");
  m.readability = opt("readability");
  m.convergence = opt("convergence");
  m.familiarity = opt("familiarity");
  m.length = opt("length");
  m.answer_leakage_avg = opt("answer_leakage_avg");
  m.answer_leakage_max = opt("answer_leakage_max");
  if (j.contains("errors")) m.errors = j["errors"].get<std::map<std::string, std::string>>();
  return m;
}

inline std::string_view scope_name(MetricScope s) {
  switch (s) {
    case MetricScope::kHint: return "hint";
    case MetricScope::kItem: return "item";
    case MetricScope::kDataset: return "dataset";
  }
  return "dataset";
}

inline json to_json(const MetricReport& r) {
  json j = {{"scope", scope_name(r.scope)}, {"hints", r.hints}, {"failures", r.failures}};
  auto put = [&](const char* k, const std::optional<double>& v) {
    j[k] = v ? json(*v) : json(nullptr);
  };
  put("relevance", r.relevance);
  put("readability", r.readability);
  put("convergence", r.convergence);
  put("familiarity", r.familiarity);
  put("length", r.length);
  put("answer_leakage_avg", r.answer_leakage_avg);
  put("answer_leakage_max", r.answer_leakage_max);
  return j;
}

// Unweighted mean of each metric over the records that have it.
inline MetricReport aggregate(const std::vector<HintMetrics>& records,
                              MetricScope scope = MetricScope::kDataset) {
  MetricReport r;
  r.scope = scope;
  r.hints = records.size();
  auto mean = [&](std::optional<double> HintMetrics::*field) -> std::optional<double> {
    double sum = 0;
    size_t n = 0;
    for (const auto& m : records) {
      if (m.*field) {
        sum += *(m.*field);
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  r.relevance = mean(&HintMetrics::relevance);
  r.readability = mean(&HintMetrics::readability);
  r.convergence = mean(&HintMetrics::convergence);
  r.familiarity = mean(&HintMetrics::familiarity);
  r.length = mean(&HintMetrics::length);
  r.answer_leakage_avg = mean(&HintMetrics::answer_leakage_avg);
  r.answer_leakage_max = mean(&HintMetrics::answer_leakage_max);
  for (const auto& m : records) {
    if (!m.errors.empty()) ++r.failures;
  }
  return r;
}

// Published WikiHint quality rows, kept for side-by-side reports. Values are
// model-dependent and are never asserted against.
struct ReferenceQualityRow {
  std::string_view dataset;
  std::string_view subset;
  double relevance, readability, convergence, familiarity, length, leakage_avg, leakage_max;
};

inline constexpr ReferenceQualityRow kReferenceQuality[] = {
    {"WikiHint", "Entire", 0.98, 0.72, 0.73, 0.75, 17.82, 0.24, 0.49},
    {"WikiHint", "Train", 0.98, 0.71, 0.74, 0.76, 17.77, 0.24, 0.49},
    {"WikiHint", "Test", 0.98, 0.83, 0.72, 0.73, 18.32, 0.24, 0.47},
    {"TriviaHG", "Entire", 0.95, 0.71, 0.57, 0.77, 20.82, 0.23, 0.44},
};

inline std::string quality_table(const MetricReport& r, std::string_view dataset,
                                 std::string_view subset, bool with_reference = true) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "Dataset" << std::setw(8) << "Subset" << std::right;
  for (const char* h : {"Relevance", "Readability", "Convergence", "Familiarity", "Length",
                        "AL(Avg)", "AL(Max)"}) {
    os << std::setw(13) << h;
  }
  os << '\n';
  auto cell = [&](const std::optional<double>& v) {
    if (v) {
      os << std::setw(13) << std::fixed << std::setprecision(2) << *v;
    } else {
      os << std::setw(13) << "-";
    }
  };
  os << std::left << std::setw(12) << dataset << std::setw(8) << subset << std::right;
  cell(r.relevance);
  cell(r.readability);
  cell(r.convergence);
  cell(r.familiarity);
  cell(r.length);
  cell(r.answer_leakage_avg);
  cell(r.answer_leakage_max);
  os << '\n';
  if (with_reference) {
    for (const auto& row : kReferenceQuality) {
      os << std::left << std::setw(12) << (std::string(row.dataset) + "*") << std::setw(8)
         << row.subset << std::right;
      for (double v : {row.relevance, row.readability, row.convergence, row.familiarity,
                       row.length, row.leakage_avg, row.leakage_max}) {
        cell(v);
      }
      os << '\n';
    }
    os << "* published reference values\n";
  }
  return os.str();
}

struct EvalResult {
  MetricReport report;
  std::vector<HintMetrics> per_hint;  // item order, then hint order
};

namespace detail {

inline std::string error_text(const std::exception& e) {
  if (auto* he = dynamic_cast<const Error*>(&e)) return std::string(he->code_name()) + ": " + he->detail();
  return e.what();
}

inline void write_back(Hint& h, const HintMetrics& m) {
  if (m.relevance) h.relevance = m.relevance;
  if (m.readability) h.readability = m.readability;
  if (m.convergence) h.convergence = m.convergence;
  if (m.familiarity) h.familiarity = m.familiarity;
  if (m.answer_leakage_avg) h.answer_leakage = m.answer_leakage_avg;
}

}  // namespace detail

// Scores every hint. Per-hint values are written back into `ds`; failures are
// recorded per hint and do not stop the run. With a journal configured,
// hints already journaled are reused instead of recomputed.
inline EvalResult evaluate_dataset(Dataset& ds, const EvalConfig& cfg) {
  const auto& t = cfg.toggles;
  const auto& b = cfg.backends;
  if (!t.any()) throw Error(Errc::kNoMetricsEnabled, "no metric is enabled");
  auto need = [](bool on, const void* backend, const char* metric) {
    if (on && backend == nullptr) {
      throw Error(Errc::kMetricBackendMissing, std::string(metric) + " needs a backend");
    }
  };
  need(t.relevance, b.judge.get(), "relevance (judge)");
  need(t.relevance, b.embedding.get(), "relevance (embedding)");
  need(t.readability, b.classifier.get(), "readability");
  need(t.convergence, b.judge.get(), "convergence");
  need(t.leakage, b.embedding.get(), "answer_leakage");

  std::map<std::pair<std::string, int>, HintMetrics> done;
  std::unique_ptr<std::ofstream> journal;
  std::mutex journal_mu;
  if (!cfg.journal_path.empty()) {
    std::ifstream in(cfg.journal_path);
    std::string line;
    while (in && std::getline(in, line)) {
      if (text::trim(line).empty()) continue;
      try {
        auto m = hint_metrics_from_json(json::parse(line));
        done[{m.item_id, m.hint_index}] = std::move(m);
      } catch (const std::exception&) {
        // A torn last line from an interrupted run is recomputed.
      }
    }
    journal = std::make_unique<std::ofstream>(cfg.journal_path, std::ios::app);
    if (!*journal) throw Error(Errc::kIo, "cannot open journal '" + cfg.journal_path + "'");
  }

  bool serial = false;
  if (b.embedding && !b.embedding->concurrent_safe()) serial = true;
  if (b.classifier && !b.classifier->concurrent_safe()) serial = true;
  if (b.judge && !b.judge->concurrent_safe()) serial = true;
  const size_t workers = serial ? 1 : cfg.max_concurrency;

  std::vector<std::vector<HintMetrics>> per_item(ds.items.size());
  parallel_for(ds.items.size(), workers, [&](size_t ii) {
    const QAItem& item = ds.items[ii];
    std::optional<CandidateSet> candidates;
    std::optional<std::string> candidate_error;
    auto& out = per_item[ii];
    for (size_t hi = 0; hi < item.hints.size(); ++hi) {
      const int idx = static_cast<int>(hi);
      if (auto it = done.find({item.id, idx}); it != done.end()) {
        out.push_back(it->second);
        continue;
      }
      const Hint& h = item.hints[hi];
      HintMetrics m;
      m.item_id = item.id;
      m.hint_index = idx;
      m.rank = h.rank;
      auto attempt = [&](const char* name, auto&& fn) {
        try {
          fn();
        } catch (const std::exception& e) {
          m.errors[name] = detail::error_text(e);
        }
      };
      if (t.length) m.length = static_cast<double>(text::word_count(h.text));
      if (t.familiarity) m.familiarity = familiarity(h.entities);
      if (t.leakage) {
        attempt("answer_leakage", [&] {
          auto l = answer_leakage(h.text, item.answer.text, *b.embedding, cfg.drop_stopwords);
          m.answer_leakage_avg = l.avg;
          m.answer_leakage_max = l.max;
        });
      }
      if (t.readability) {
        attempt("readability", [&] {
          m.readability = readability(h.text, *b.classifier, item.id + "/" + std::to_string(hi));
        });
      }
      if (t.relevance) {
        attempt("relevance", [&] {
          m.relevance = relevance(item.question.text, h.text, *b.judge, *b.embedding, cfg.n_probe);
        });
      }
      if (t.convergence) {
        attempt("convergence", [&] {
          if (!candidates && !candidate_error) {
            try {
              candidates = propose_candidates(item.question.text, item.answer, *b.judge,
                                              cfg.n_candidates);
            } catch (const std::exception& e) {
              candidate_error = detail::error_text(e);
            }
          }
          if (candidate_error) throw std::runtime_error(*candidate_error);
          m.convergence = convergence_with(item.question.text, *candidates, {h.text}, *b.judge);
        });
      }
      if (journal) {
        std::lock_guard lock(journal_mu);
        *journal << to_json(m).dump() << '\n';
        journal->flush();
      }
      out.push_back(std::move(m));
    }
  });

  EvalResult result;
  for (size_t ii = 0; ii < ds.items.size(); ++ii) {
    for (auto& m : per_item[ii]) {
      detail::write_back(ds.items[ii].hints[static_cast<size_t>(m.hint_index)], m);
      result.per_hint.push_back(std::move(m));
    }
  }
  result.report = aggregate(result.per_hint, MetricScope::kDataset);
  return result;
}

// Mean of one metric grouped by gold rank (e.g. convergence vs. rank).
inline std::map<int, double> mean_by_rank(const std::vector<HintMetrics>& records,
                                          std::optional<double> HintMetrics::*field) {
  std::map<int, std::pair<double, size_t>> acc;
  for (const auto& m : records) {
    if (m.*field) {
      acc[m.rank].first += *(m.*field);
      acc[m.rank].second += 1;
    }
  }
  std::map<int, double> out;
  for (const auto& [rank, sn] : acc) out[rank] = sn.first / static_cast<double>(sn.second);
  return out;
}

}  // namespace hintkit

#endif  // HINTKIT_METRICS_HPP_
