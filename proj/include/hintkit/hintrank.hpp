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

#ifndef HINTKIT_HINTRANK_HPP_
#define HINTKIT_HINTRANK_HPP_

// Pairwise hint ranking. Each unordered hint pair is judged by a PairBackend
// queried in both presentation orders, the hard wins are aggregated into a
// listwise ranking with a Bradley-Terry model, and rankings are scored
// against gold ranks.

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hintkit/backends.hpp"
#include "hintkit/data.hpp"
#include "hintkit/parallel.hpp"
#include "hintkit/prompts.hpp"

namespace hintkit {

enum class AnswerMode { kAware, kAgnostic };

inline std::string_view answer_mode_name(AnswerMode m) {
  return m == AnswerMode::kAware ? "answer_aware" : "answer_agnostic";
}

enum class Winner { kA, kB };

struct PairwiseJudgment {
  std::string item_id;
  int index_a = 0;
  int index_b = 0;
  double p_symmetric = 0.5;
  Winner winner = Winner::kA;
  std::string backend_id;

  int winner_index() const { return winner == Winner::kA ? index_a : index_b; }
  int loser_index() const { return winner == Winner::kA ? index_b : index_a; }
  bool operator==(const PairwiseJudgment&) const = default;
};

// Averages the two presentation orders: p = (s(a,b) + 1 - s(b,a)) / 2.
// Computed so that swapping the operands yields exactly 1 - p.
inline double symmetrize(double s_ab, double s_ba) {
  const double d = s_ab - s_ba;
  const double hi = 0.5 + std::abs(d) / 2.0;
  return d >= 0 ? hi : 1.0 - hi;
}

inline PairwiseJudgment compare_pair(std::string_view question,
                                     const std::optional<std::string>& answer,
                                     std::string_view hint_a, std::string_view hint_b,
                                     int index_a, int index_b, const PairBackend& backend,
                                     std::string_view item_id = "") {
  if (index_a == index_b) {
    throw Error(Errc::kInvalidArgument, "compare_pair needs two distinct hints");
  }
  PairInput forward{std::string(question), answer, std::string(hint_a), std::string(hint_b)};
  PairInput backward{std::string(question), answer, std::string(hint_b), std::string(hint_a)};
  auto checked = [&](const PairInput& in) {
    const double s = backend.score(in);
    if (!(s >= 0.0 && s <= 1.0)) {
      std::ostringstream msg;
      msg << "backend " << backend.id() << " returned " << s << " for item " << item_id
          << " pair (" << index_a << ", " << index_b << ")";
      throw Error(Errc::kBackendRangeError, msg.str());
    }
    return s;
  };
  const double s_ab = checked(forward);
  const double s_ba = checked(backward);
  PairwiseJudgment j;
  j.item_id = std::string(item_id);
  j.index_a = index_a;
  j.index_b = index_b;
  j.p_symmetric = symmetrize(s_ab, s_ba);
  j.backend_id = backend.id();
  if (j.p_symmetric > 0.5) {
    j.winner = Winner::kA;
  } else if (j.p_symmetric < 0.5) {
    j.winner = Winner::kB;
  } else {
    j.winner = index_a < index_b ? Winner::kA : Winner::kB;
  }
  return j;
}

inline constexpr double kDefaultRegularizer = 0.01;

// wins[i][j] is the (possibly fractional) number of wins of i over j.
struct WinMatrix {
  size_t n = 0;
  std::vector<std::vector<double>> wins;
  double regularizer = kDefaultRegularizer;

  explicit WinMatrix(size_t size = 0, double lambda = kDefaultRegularizer)
      : n(size), wins(size, std::vector<double>(size, 0.0)), regularizer(lambda) {}

  WinMatrix scaled(double c) const {
    WinMatrix out = *this;
    for (auto& row : out.wins) {
      for (auto& w : row) w *= c;
    }
    return out;
  }
};

struct BradleyTerryOptions {
  double tol = 1e-8;
  int max_iter = 10000;
};

// Log-likelihood of strengths under the regularized win matrix (every
// ordered pair receives `regularizer` virtual wins).
inline double bradley_terry_log_likelihood(const WinMatrix& m, const std::vector<double>& pi) {
  double ll = 0;
  for (size_t i = 0; i < m.n; ++i) {
    for (size_t j = 0; j < m.n; ++j) {
      if (i == j) continue;
      const double w = m.wins[i][j] + m.regularizer;
      if (w > 0) ll += w * std::log(pi[i] / (pi[i] + pi[j]));
    }
  }
  return ll;
}

// Minorization-maximization fit:
//   pi_i <- W_i / sum_{j != i} n_ij / (pi_i + pi_j),
// with W_i the regularized wins of i and n_ij the regularized comparisons of
// the pair, renormalized to sum 1 after every sweep.
inline std::vector<double> bradley_terry(const WinMatrix& m, const BradleyTerryOptions& opts = {}) {
  const size_t n = m.n;
  if (n < 2) throw Error(Errc::kInvalidArgument, "bradley_terry needs n >= 2");
  if (m.wins.size() != n) throw Error(Errc::kInvalidArgument, "win matrix is not n x n");
  if (!(m.regularizer >= 0)) throw Error(Errc::kInvalidArgument, "regularizer must be >= 0");
  std::vector<double> total_wins(n, 0.0);
  std::vector<std::vector<double>> games(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    if (m.wins[i].size() != n) throw Error(Errc::kInvalidArgument, "win matrix is not n x n");
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (m.wins[i][j] < 0 || !std::isfinite(m.wins[i][j])) {
        throw Error(Errc::kInvalidArgument, "win counts must be finite and nonnegative");
      }
      total_wins[i] += m.wins[i][j] + m.regularizer;
      games[i][j] = m.wins[i][j] + m.wins[j][i] + 2 * m.regularizer;
    }
    if (total_wins[i] <= 0) {
      throw Error(Errc::kInvalidArgument,
                  "item " + std::to_string(i) + " has no wins; a positive regularizer is required");
    }
  }

  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  double residual = 0;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // Cyclic sweep: each update already sees the coordinates updated before
    // it in the same sweep.
    next = pi;
    for (size_t i = 0; i < n; ++i) {
      double denom = 0;
      for (size_t j = 0; j < n; ++j) {
        if (j != i) denom += games[i][j] / (next[i] + next[j]);
      }
      next[i] = total_wins[i] / denom;
    }
    const double sum = std::accumulate(next.begin(), next.end(), 0.0);
    residual = 0;
    for (size_t i = 0; i < n; ++i) {
      next[i] /= sum;
      residual = std::max(residual, std::abs(next[i] - pi[i]));
    }
    pi.swap(next);
    if (residual < opts.tol) return pi;
  }
  std::ostringstream msg;
  msg << "no convergence after " << opts.max_iter << " sweeps (residual " << residual << ")";
  throw Error(Errc::kNonconvergence, msg.str());
}

// 1-based ranks by descending strength; ties within `tie_tol` go to the lower
// index.
inline std::vector<int> ranks_from_strengths(const std::vector<double>& strengths,
                                             double tie_tol = 1e-12) {
  std::vector<int> order(strengths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double diff = strengths[a] - strengths[b];
    if (std::abs(diff) <= tie_tol) return a < b;
    return diff > 0;
  });
  std::vector<int> ranks(strengths.size());
  for (size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = static_cast<int>(pos) + 1;
  return ranks;
}

struct RankingResult {
  std::string item_id;
  std::vector<double> strengths;
  std::vector<int> predicted_ranks;
  std::vector<PairwiseJudgment> judgments;
};

struct RankOptions {
  double regularizer = kDefaultRegularizer;
  BradleyTerryOptions bt;
  // Feed p_symmetric / 1 - p_symmetric into the win matrix instead of hard
  // 0/1 wins.
  bool soft_wins = false;
};

inline RankingResult rank_hints(const QAItem& item, AnswerMode mode, const PairBackend& backend,
                                const RankOptions& opts = {}) {
  const size_t n = item.hints.size();
  if (n < 2) throw Error(Errc::kInvalidArgument, "item " + item.id + " has fewer than 2 hints");
  std::optional<std::string> answer;
  if (mode == AnswerMode::kAware) answer = item.answer.text;

  RankingResult result;
  result.item_id = item.id;
  WinMatrix m(n, opts.regularizer);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      PairwiseJudgment jd;
      try {
        jd = compare_pair(item.question.text, answer, item.hints[i].text, item.hints[j].text,
                          static_cast<int>(i), static_cast<int>(j), backend, item.id);
      } catch (const Error& e) {
        throw Error(e.code(), "item " + item.id + " pair (" + std::to_string(i) + ", " +
                                  std::to_string(j) + "): " + e.detail());
      }
      if (opts.soft_wins) {
        m.wins[i][j] = jd.p_symmetric;
        m.wins[j][i] = 1.0 - jd.p_symmetric;
      } else {
        m.wins[jd.winner_index()][jd.loser_index()] = 1.0;
      }
      result.judgments.push_back(std::move(jd));
    }
  }
  result.strengths = bradley_terry(m, opts.bt);
  result.predicted_ranks = ranks_from_strengths(result.strengths);
  return result;
}

inline std::vector<RankingResult> rank_dataset(const Dataset& ds, AnswerMode mode,
                                               const PairBackend& backend,
                                               const RankOptions& opts = {},
                                               size_t max_concurrency = 1) {
  std::vector<RankingResult> out(ds.items.size());
  const size_t workers = backend.concurrent_safe() ? max_concurrency : 1;
  parallel_for(ds.items.size(), workers,
               [&](size_t i) { out[i] = rank_hints(ds.items[i], mode, backend, opts); });
  return out;
}

namespace detail {

inline const QAItem& gold_item(const Dataset& gold, const std::string& id) {
  const QAItem* item = gold.find(id);
  if (item == nullptr) throw Error(Errc::kInvalidArgument, "item '" + id + "' not in gold dataset");
  return *item;
}

inline std::unordered_map<std::string, const QAItem*> index_items(const Dataset& gold) {
  std::unordered_map<std::string, const QAItem*> idx;
  for (const auto& it : gold.items) idx.emplace(it.id, &it);
  return idx;
}

inline const QAItem& lookup(const std::unordered_map<std::string, const QAItem*>& idx,
                            const std::string& id) {
  auto it = idx.find(id);
  if (it == idx.end()) throw Error(Errc::kInvalidArgument, "item '" + id + "' not in gold dataset");
  return *it->second;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nan("");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace detail

// A judgment is correct iff its winner has the strictly smaller gold rank.
inline double pairwise_accuracy(const std::vector<RankingResult>& results, const Dataset& gold) {
  const auto idx = detail::index_items(gold);
  size_t total = 0, correct = 0;
  for (const auto& r : results) {
    const QAItem& item = detail::lookup(idx, r.item_id);
    for (const auto& j : r.judgments) {
      ++total;
      const int w = item.hints.at(static_cast<size_t>(j.winner_index())).rank;
      const int l = item.hints.at(static_cast<size_t>(j.loser_index())).rank;
      if (w < l) ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

struct CorrelationResult {
  double value = 0;
  size_t items_used = 0;
  // Items dropped because one rank vector had zero variance.
  size_t items_excluded = 0;
  bool pooled = false;
};

// Pearson correlation between predicted and gold ranks: per item and then
// averaged (default), or pooled over all hints.
inline CorrelationResult rank_correlation(const std::vector<RankingResult>& results,
                                          const Dataset& gold, bool pooled = false) {
  const auto idx = detail::index_items(gold);
  CorrelationResult out;
  out.pooled = pooled;
  std::vector<double> all_pred, all_gold;
  double sum = 0;
  for (const auto& r : results) {
    const QAItem& item = detail::lookup(idx, r.item_id);
    if (r.predicted_ranks.size() != item.hints.size()) {
      throw Error(Errc::kInvalidArgument, "result for item " + r.item_id + " does not cover all hints");
    }
    std::vector<double> pred, g;
    for (size_t i = 0; i < item.hints.size(); ++i) {
      pred.push_back(r.predicted_ranks[i]);
      g.push_back(item.hints[i].rank);
    }
    if (pooled) {
      all_pred.insert(all_pred.end(), pred.begin(), pred.end());
      all_gold.insert(all_gold.end(), g.begin(), g.end());
      ++out.items_used;
      continue;
    }
    const double c = detail::pearson(pred, g);
    if (std::isnan(c)) {
      ++out.items_excluded;
      continue;
    }
    sum += c;
    ++out.items_used;
  }
  if (pooled) {
    const double c = all_pred.empty() ? std::nan("") : detail::pearson(all_pred, all_gold);
    if (std::isnan(c)) {
      out.items_excluded = out.items_used;
      out.items_used = 0;
      out.value = 0;
    } else {
      out.value = c;
    }
  } else {
    out.value = out.items_used == 0 ? 0.0 : sum / static_cast<double>(out.items_used);
  }
  return out;
}

// Accuracy of judgments whose hint_a has gold rank r and hint_b gold rank c,
// for r, c in 1..5. Diagonal and unobserved cells are empty.
struct RankGapMatrix {
  std::array<std::array<std::optional<double>, kHintsPerItem>, kHintsPerItem> accuracy{};
  std::array<std::array<size_t, kHintsPerItem>, kHintsPerItem> count{};

  std::optional<double> at(int r, int c) const { return accuracy[r - 1][c - 1]; }
};

inline RankGapMatrix rank_gap_matrix(const std::vector<RankingResult>& results, const Dataset& gold) {
  const auto idx = detail::index_items(gold);
  std::array<std::array<size_t, kHintsPerItem>, kHintsPerItem> correct{};
  RankGapMatrix out;
  for (const auto& r : results) {
    const QAItem& item = detail::lookup(idx, r.item_id);
    for (const auto& j : r.judgments) {
      const int ra = item.hints.at(static_cast<size_t>(j.index_a)).rank;
      const int rb = item.hints.at(static_cast<size_t>(j.index_b)).rank;
      if (ra < 1 || rb < 1 || ra > kHintsPerItem || rb > kHintsPerItem || ra == rb) continue;
      out.count[ra - 1][rb - 1] += 1;
      const bool a_better = ra < rb;
      if ((j.winner == Winner::kA) == a_better) correct[ra - 1][rb - 1] += 1;
    }
  }
  for (int r = 0; r < kHintsPerItem; ++r) {
    for (int c = 0; c < kHintsPerItem; ++c) {
      if (r != c && out.count[r][c] > 0) {
        out.accuracy[r][c] =
            static_cast<double>(correct[r][c]) / static_cast<double>(out.count[r][c]);
      }
    }
  }
  return out;
}

struct TrainingPair {
  std::string question;
  std::optional<std::string> answer;
  std::string hint_1;
  std::string hint_2;
  int label = 0;
};

// All ordered hint pairs of every item; label 1 iff hint_1 has the better
// (smaller) gold rank.
inline std::vector<TrainingPair> export_training_pairs(const Dataset& ds, AnswerMode mode) {
  std::vector<TrainingPair> out;
  for (const auto& item : ds.items) {
    for (size_t i = 0; i < item.hints.size(); ++i) {
      for (size_t j = 0; j < item.hints.size(); ++j) {
        if (i == j) continue;
        TrainingPair p;
        p.question = item.question.text;
        if (mode == AnswerMode::kAware) p.answer = item.answer.text;
        p.hint_1 = item.hints[i].text;
        p.hint_2 = item.hints[j].text;
        p.label = item.hints[i].rank < item.hints[j].rank ? 1 : 0;
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

inline json to_json(const TrainingPair& p) {
  json j = {{"question", p.question}, {"hint_1", p.hint_1}, {"hint_2", p.hint_2}, {"label", p.label}};
  if (p.answer) j["answer"] = *p.answer;
  return j;
}

inline json to_json(const PairwiseJudgment& j) {
  return json{{"item_id", j.item_id},
              {"index_a", j.index_a},
              {"index_b", j.index_b},
              {"p_symmetric", j.p_symmetric},
              {"winner", j.winner == Winner::kA ? "a" : "b"},
              {"backend_id", j.backend_id}};
}

inline json to_json(const RankingResult& r) {
  json js = json::array();
  for (const auto& j : r.judgments) js.push_back(to_json(j));
  return json{{"item_id", r.item_id},
              {"strengths", r.strengths},
              {"predicted_ranks", r.predicted_ranks},
              {"judgments", js}};
}

inline json to_json(const RankGapMatrix& m) {
  json acc = json::array(), cnt = json::array();
  for (int r = 0; r < kHintsPerItem; ++r) {
    json row = json::array(), crow = json::array();
    for (int c = 0; c < kHintsPerItem; ++c) {
      row.push_back(m.accuracy[r][c] ? json(*m.accuracy[r][c]) : json(nullptr));
      crow.push_back(m.count[r][c]);
    }
    acc.push_back(row);
    cnt.push_back(crow);
  }
  return json{{"accuracy", acc}, {"count", cnt}};
}

// Published HintRank reference point (finetuned, answer-aware).
inline constexpr double kReferenceHintRankAccuracy = 68.55;
inline constexpr double kReferenceHintRankCorrelation = 52.34;

// Method / Config / Use Answer / Accuracy / Correlation, in percent.
inline std::string ranking_summary_table(std::string_view method, std::string_view config,
                                         AnswerMode mode, double accuracy, double correlation,
                                         bool with_reference = true) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "Method" << std::setw(12) << "Config" << std::setw(12)
     << "Use Answer" << std::right << std::setw(10) << "Accuracy" << std::setw(13)
     << "Correlation" << '\n';
  os << std::fixed << std::setprecision(2);
  os << std::left << std::setw(14) << method << std::setw(12) << config << std::setw(12)
     << (mode == AnswerMode::kAware ? "yes" : "no") << std::right << std::setw(10)
     << accuracy * 100 << std::setw(13) << correlation * 100 << '\n';
  if (with_reference) {
    os << std::left << std::setw(14) << "HintRank*" << std::setw(12) << "FTwA" << std::setw(12)
       << "yes" << std::right << std::setw(10) << kReferenceHintRankAccuracy << std::setw(13)
       << kReferenceHintRankCorrelation << '\n'
       << "* published reference values\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Pair backends.

// Prefers the hint with the better gold rank; `anti` prefers the worse one.
// Pairs are looked up by (question, hint text).
class GoldRankBackend final : public PairBackend {
 public:
  explicit GoldRankBackend(const Dataset& gold, bool anti = false) : anti_(anti) {
    for (const auto& item : gold.items) {
      for (const auto& h : item.hints) ranks_[key(item.question.text, h.text)] = h.rank;
    }
  }
  double score(const PairInput& p) const override {
    const int a = rank_of(p.question, p.hint_a);
    const int b = rank_of(p.question, p.hint_b);
    const bool a_better = a < b;
    return (a_better != anti_) ? 1.0 : 0.0;
  }
  std::string id() const override { return anti_ ? "anti-oracle" : "oracle"; }

 private:
  static std::string key(std::string_view q, std::string_view h) {
    return std::string(q) + '\x1f' + std::string(h);
  }
  int rank_of(const std::string& q, const std::string& h) const {
    auto it = ranks_.find(key(q, h));
    if (it == ranks_.end()) throw Error(Errc::kBackendError, "oracle has no gold rank for hint '" + h + "'");
    return it->second;
  }
  bool anti_;
  std::unordered_map<std::string, int> ranks_;
};

// Prefers shorter hints: p = 1 / (1 + exp((len_a - len_b) / scale)), lengths
// in words.
class LengthPreferenceBackend final : public PairBackend {
 public:
  explicit LengthPreferenceBackend(double scale = 2.0) : scale_(scale) {}
  double score(const PairInput& p) const override {
    const double la = static_cast<double>(text::word_count(p.hint_a));
    const double lb = static_cast<double>(text::word_count(p.hint_b));
    return 1.0 / (1.0 + std::exp((la - lb) / scale_));
  }
  std::string id() const override { return "length-preference"; }

 private:
  double scale_;
};

// Text encoding of a pair for text-in classifiers: question, answer (when
// present), hint_a, hint_b joined by `separator`.
inline std::string encode_pair(const PairInput& p, std::string_view separator = " [SEP] ") {
  std::string out = p.question;
  if (p.answer) {
    out += separator;
    out += *p.answer;
  }
  out += separator;
  out += p.hint_a;
  out += separator;
  out += p.hint_b;
  return out;
}

// First of "Hint_1"/"Hint_2" (also "Hint 1", "hint_2", ...) in the reply.
inline std::optional<int> parse_hint_choice(std::string_view reply) {
  std::string lower(reply);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  size_t pos = 0;
  while ((pos = lower.find("hint", pos)) != std::string::npos) {
    size_t k = pos + 4;
    while (k < lower.size() && (lower[k] == '_' || lower[k] == ' ' || lower[k] == '-')) ++k;
    if (k < lower.size() && (lower[k] == '1' || lower[k] == '2')) {
      const bool followed_by_digit =
          k + 1 < lower.size() && std::isdigit(static_cast<unsigned char>(lower[k + 1]));
      if (!followed_by_digit) return lower[k] - '0';
    }
    pos += 4;
  }
  return std::nullopt;
}

// LLM judge as a pair backend, using the evaluator system and user prompts.
// An unparseable reply is retried up to `retries` times.
class JudgePairBackend final : public PairBackend {
 public:
  JudgePairBackend(std::shared_ptr<const JudgeBackend> judge, int retries = 1)
      : judge_(std::move(judge)), retries_(retries) {}
  double score(const PairInput& p) const override {
    const ChatPrompt prompt{std::string(prompts::kEvaluatorSystem),
                            prompts::evaluator_user(p.question, p.answer, p.hint_a, p.hint_b)};
    std::string last;
    for (int attempt = 0; attempt <= retries_; ++attempt) {
      // n grows with the attempt so record/replay keys stay distinct.
      const auto replies = judge_->generate(prompt, attempt + 1);
      for (const auto& r : replies) {
        if (auto choice = parse_hint_choice(r)) return *choice == 1 ? 1.0 : 0.0;
        last = r;
      }
    }
    throw Error(Errc::kBackendParseError, "judge reply names neither hint: '" + last + "'");
  }
  std::string id() const override { return "judge:" + judge_->id(); }
  bool concurrent_safe() const override { return judge_->concurrent_safe(); }

 private:
  std::shared_ptr<const JudgeBackend> judge_;
  int retries_;
};

}  // namespace hintkit

#endif  // HINTKIT_HINTRANK_HPP_
