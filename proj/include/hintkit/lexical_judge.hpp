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

#ifndef HINTKIT_LEXICAL_JUDGE_HPP_
#define HINTKIT_LEXICAL_JUDGE_HPP_

// Offline stand-in for an LLM judge. It recognizes the toolkit's own prompt
// families and answers them with lexical rules, so every workflow can run
// (and be recorded/replayed) without a model server. Scores it produces are
// not comparable to model-backed scores.

#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hintkit/backends.hpp"
#include "hintkit/data.hpp"
#include "hintkit/prompts.hpp"

namespace hintkit {

class LexicalJudge final : public JudgeBackend {
 public:
  // Candidate answers and their "knowledge" (question and hint text of the
  // item they answer) come from `pool`.
  explicit LexicalJudge(const Dataset& pool) {
    for (const auto& item : pool.items) {
      std::string knowledge = item.question.text;
      for (const auto& h : item.hints) knowledge += " " + h.text;
      auto toks = text::content_tokens(knowledge);
      auto& set = knowledge_[text::normalize_answer(item.answer.text)];
      set.insert(toks.begin(), toks.end());
      answers_.push_back(item.answer.text);
    }
    std::sort(answers_.begin(), answers_.end());
    answers_.erase(std::unique(answers_.begin(), answers_.end()), answers_.end());
  }

  std::vector<std::string> generate(const ChatPrompt& p, int n) const override {
    const std::string& u = p.user;
    if (starts_with(u, prompts::kProbePrefix)) {
      const std::string hint = u.substr(prompts::kProbePrefix.size());
      return std::vector<std::string>(static_cast<size_t>(std::max(n, 0)), probe_for(hint));
    }
    if (starts_with(u, prompts::kCandidatesPrefix) &&
        u.find(prompts::kCandidatesInfix) != std::string::npos) {
      return {candidates_for(u)};
    }
    if (starts_with(u, prompts::kConsistencyPrefix) &&
        u.find(prompts::kConsistencySuffix) != std::string::npos) {
      return {consistency_for(u)};
    }
    if (starts_with(u, prompts::kEvaluatorPrefix)) return {choice_for(u)};
    if (starts_with(u, prompts::kGeneratorPrefix)) return {hint_for(u)};
    return {};
  }
  std::string id() const override { return "lexical"; }

 private:
  static bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
  }

  static std::string probe_for(const std::string& hint) {
    std::string h = text::trim(hint);
    while (!h.empty() && (h.back() == '.' || h.back() == '!')) h.pop_back();
    return "Which answer is described by this: " + h + "?";
  }

  std::string candidates_for(const std::string& u) const {
    const size_t n_end = u.find(prompts::kCandidatesInfix);
    const int n = std::stoi(u.substr(prompts::kCandidatesPrefix.size(), n_end - prompts::kCandidatesPrefix.size()));
    const std::string question = u.substr(n_end + prompts::kCandidatesInfix.size());
    std::vector<std::string> ranked = answers_;
    std::sort(ranked.begin(), ranked.end(), [&](const std::string& a, const std::string& b) {
      const uint64_t ha = fnv1a(question + "\x1f" + a), hb = fnv1a(question + "\x1f" + b);
      return ha != hb ? ha < hb : a < b;
    });
    if (ranked.size() > static_cast<size_t>(n)) ranked.resize(static_cast<size_t>(n));
    std::string out;
    for (const auto& a : ranked) out += a + "\n";
    return out;
  }

  std::string consistency_for(const std::string& u) const {
    const size_t h0 = u.find(prompts::kConsistencyHint);
    const size_t c0 = u.find(prompts::kConsistencyCandidate);
    const size_t s0 = u.find(prompts::kConsistencySuffix);
    if (h0 == std::string::npos || c0 == std::string::npos || c0 < h0) return "yes";
    const std::string hint = u.substr(h0 + prompts::kConsistencyHint.size(),
                                      c0 - h0 - prompts::kConsistencyHint.size());
    const std::string cand = u.substr(c0 + prompts::kConsistencyCandidate.size(),
                                      s0 - c0 - prompts::kConsistencyCandidate.size());
    auto it = knowledge_.find(text::normalize_answer(cand));
    if (it == knowledge_.end()) return "yes";
    // A candidate stays possible when the hint shares some content word with
    // what is known about it.
    for (const auto& t : text::content_tokens(hint)) {
      if (it->second.count(t)) return "yes";
    }
    return "no";
  }

  static std::string choice_for(const std::string& u) {
    const size_t a = u.find(". Hint_1: ");
    const size_t b = u.find(". Hint_2: ");
    const size_t e = u.rfind(prompts::kEvaluatorSuffix);
    if (a == std::string::npos || b == std::string::npos || e == std::string::npos) return "Hint_1";
    const std::string h1 = u.substr(a + 10, b - a - 10);
    const std::string h2 = u.substr(b + 10, e - b - 10);
    return text::word_count(h1) <= text::word_count(h2) ? "Hint_1" : "Hint_2";
  }

  static std::string hint_for(const std::string& u) {
    std::string q = u.substr(prompts::kGeneratorPrefix.size());
    const size_t cut = q.find(prompts::kGeneratorAnswerInfix);
    if (cut != std::string::npos) q = q.substr(0, cut);
    auto toks = text::content_tokens(q);
    std::stable_sort(toks.begin(), toks.end(),
                     [](const std::string& x, const std::string& y) { return x.size() > y.size(); });
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    if (toks.size() > 3) toks.resize(3);
    std::string out = "Think about what is connected with";
    for (size_t i = 0; i < toks.size(); ++i) {
      out += (i == 0 ? " " : (i + 1 == toks.size() ? " and " : ", ")) + toks[i];
    }
    return out + ".";
  }

  std::unordered_map<std::string, std::unordered_set<std::string>> knowledge_;
  std::vector<std::string> answers_;
};

}  // namespace hintkit

#endif  // HINTKIT_LEXICAL_JUDGE_HPP_
