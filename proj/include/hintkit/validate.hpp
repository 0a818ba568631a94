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

#ifndef HINTKIT_VALIDATE_HPP_
#define HINTKIT_VALIDATE_HPP_

// Hint selection criteria:
//   ANSWER_EXACT    a hint must not include the exact answer explicitly
//   NOT_A_SENTENCE  a hint must be a sentence
//   GENERIC         a hint must be specific, not generic
//   SOURCE_MISSING  a hint must come from the answer's page (nonempty source)
//   DUPLICATE_RANK  a hint must have a unique rank
// plus ANSWER_LEAKAGE (near-verbatim leakage, needs an embedding backend) and
// the structural invariants reported by check_item().

#include <sstream>
#include <string>
#include <vector>

#include "hintkit/backends.hpp"
#include "hintkit/data.hpp"
#include "hintkit/metrics.hpp"

namespace hintkit {

namespace criteria {
inline constexpr std::string_view kAnswerExact = "ANSWER_EXACT";
inline constexpr std::string_view kNotASentence = "NOT_A_SENTENCE";
inline constexpr std::string_view kGeneric = "GENERIC";
inline constexpr std::string_view kSourceMissing = "SOURCE_MISSING";
inline constexpr std::string_view kDuplicateRank = "DUPLICATE_RANK";
inline constexpr std::string_view kAnswerLeakage = "ANSWER_LEAKAGE";
}  // namespace criteria

struct ValidateOptions {
  bool require_source = true;
  double leakage_threshold = 0.9;
  const text::FiniteVerbTagger* tagger = nullptr;
};

struct ValidationReport {
  std::string item_id;
  std::vector<Violation> violations;
  // Criteria skipped for lack of a backend.
  std::vector<std::string> not_checked;

  bool passed() const { return violations.empty(); }
};

inline ValidationReport validate_item(const QAItem& item, const EmbeddingBackend* embed = nullptr,
                                      const ValidateOptions& opts = {}) {
  ValidationReport report;
  report.item_id = item.id;
  report.violations = check_item(item);
  for (size_t i = 0; i < item.hints.size(); ++i) {
    const Hint& h = item.hints[i];
    const int idx = static_cast<int>(i);
    const std::string path = "hints[" + std::to_string(i) + "]";
    const bool exact = text::mentions_answer(h.text, item.answer.text, item.answer.aliases);
    if (exact) {
      report.violations.push_back(
          {std::string(criteria::kAnswerExact), idx, path + ": contains the answer verbatim"});
    }
    if (!text::is_sentence(h.text, opts.tagger)) {
      report.violations.push_back(
          {std::string(criteria::kNotASentence), idx, path + ": not a complete sentence"});
    }
    if (text::is_generic(h.text, item.question.text)) {
      report.violations.push_back({std::string(criteria::kGeneric), idx,
                                   path + ": adds no content beyond the question"});
    }
    if (opts.require_source && (!h.source || text::trim(*h.source).empty())) {
      report.violations.push_back(
          {std::string(criteria::kSourceMissing), idx, path + ": source is missing"});
    }
    if (embed != nullptr && !exact) {
      try {
        const auto l = answer_leakage(h.text, item.answer.text, *embed);
        if (l.max >= opts.leakage_threshold) {
          std::ostringstream msg;
          msg << path << ": answer leakage max " << l.max << " >= " << opts.leakage_threshold;
          report.violations.push_back({std::string(criteria::kAnswerLeakage), idx, msg.str()});
        }
      } catch (const Error&) {
        // NO_TOKENS: already reported as NOT_A_SENTENCE.
      }
    }
  }
  if (embed == nullptr) report.not_checked.push_back(std::string(criteria::kAnswerLeakage));
  return report;
}

inline json to_json(const Violation& v) {
  json j = {{"code", v.code}, {"message", v.message}};
  j["hint_index"] = v.hint_index ? json(*v.hint_index) : json(nullptr);
  return j;
}

inline json to_json(const ValidationReport& r) {
  json vs = json::array();
  for (const auto& v : r.violations) vs.push_back(to_json(v));
  return json{{"item_id", r.item_id},
              {"passed", r.passed()},
              {"violations", vs},
              {"not_checked", r.not_checked}};
}

inline std::string to_text(const ValidationReport& r) {
  std::ostringstream os;
  os << r.item_id << ": " << (r.passed() ? "ok" : "FAIL");
  if (!r.not_checked.empty()) {
    os << " (not checked:";
    for (const auto& c : r.not_checked) os << ' ' << c;
    os << ')';
  }
  os << '\n';
  for (const auto& v : r.violations) os << "  " << v.code << "  " << v.message << '\n';
  return os.str();
}

}  // namespace hintkit

#endif  // HINTKIT_VALIDATE_HPP_
