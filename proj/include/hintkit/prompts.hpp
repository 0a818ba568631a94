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

#ifndef HINTKIT_PROMPTS_HPP_
#define HINTKIT_PROMPTS_HPP_

// Every prompt the toolkit sends to a JudgeBackend. The generator and pairwise
// evaluator templates are byte-exact; the metric probes are ours.

#include <optional>
#include <string>
#include <string_view>

#include "hintkit/backends.hpp"

namespace hintkit::prompts {

inline constexpr std::string_view kGeneratorSystem =
    "You are a hint generator for the factoid questions. The user asks you a "
    "question and you should generate a hint for that question without "
    "revealing the answer in the hint.";

inline constexpr std::string_view kGeneratorPrefix = "Give me the best hint for this question: ";
inline constexpr std::string_view kGeneratorAnswerInfix = "? The answer for the question is ";

inline constexpr std::string_view kEvaluatorSystem =
    "You are a hint evaluator for the factoid questions. The user gives you a "
    "question and two hints and you should specify which hint for that "
    "question is a better hint and more helpful.";

inline constexpr std::string_view kEvaluatorPrefix =
    "Which hint is better to find the answer of this question: ";
inline constexpr std::string_view kEvaluatorAnswerInfix = ". The answer for this question is ";
inline constexpr std::string_view kEvaluatorSuffix =
    ". Just choose between \"Hint_1\" and \"Hint_2\" without any explanations.";

// Answer-agnostic when `answer` is empty. With `normalized`, the answer-aware
// template gets clean punctuation instead of the literal "{q}? ..." join.
inline std::string generator_user(std::string_view question,
                                  const std::optional<std::string>& answer,
                                  bool normalized = false) {
  std::string out(kGeneratorPrefix);
  if (!answer) {
    out += question;
    return out;
  }
  if (!normalized) {
    out += question;
    out += kGeneratorAnswerInfix;
    out += *answer;
    return out;
  }
  std::string q = text::trim(question);
  while (!q.empty() && (q.back() == '?' || q.back() == '.')) q.pop_back();
  out += q + "? The answer for the question is " + text::trim(*answer) + ".";
  return out;
}

inline std::string evaluator_user(std::string_view question,
                                  const std::optional<std::string>& answer,
                                  std::string_view hint_1, std::string_view hint_2) {
  std::string out(kEvaluatorPrefix);
  out += question;
  if (answer) {
    out += kEvaluatorAnswerInfix;
    out += *answer;
  }
  out += ". Hint_1: ";
  out += hint_1;
  out += ". Hint_2: ";
  out += hint_2;
  out += kEvaluatorSuffix;
  return out;
}

// Relevance probe: the hint is treated as an answer; the judge writes a
// question it answers. One completion per probe.
inline constexpr std::string_view kProbePrefix =
    "Write one question that the following text answers. Reply with the "
    "question only.\nText: ";

inline ChatPrompt relevance_probe(std::string_view hint) {
  return {"", std::string(kProbePrefix) + std::string(hint)};
}

inline constexpr std::string_view kCandidatesPrefix = "List ";
inline constexpr std::string_view kCandidatesInfix =
    " different plausible answers to the following question, one per line, "
    "without numbering or explanations.\nQuestion: ";

inline ChatPrompt candidate_answers(std::string_view question, int n) {
  return {"", std::string(kCandidatesPrefix) + std::to_string(n) +
                  std::string(kCandidatesInfix) + std::string(question)};
}

inline constexpr std::string_view kConsistencyPrefix = "Question: ";
inline constexpr std::string_view kConsistencyHint = "\nHint: ";
inline constexpr std::string_view kConsistencyCandidate = "\nCandidate answer: ";
inline constexpr std::string_view kConsistencySuffix =
    "\nIs the candidate answer still possible given the hint? Answer yes or no.";

inline ChatPrompt consistency(std::string_view question, std::string_view hint,
                              std::string_view candidate) {
  return {"", std::string(kConsistencyPrefix) + std::string(question) +
                  std::string(kConsistencyHint) + std::string(hint) +
                  std::string(kConsistencyCandidate) + std::string(candidate) +
                  std::string(kConsistencySuffix)};
}

}  // namespace hintkit::prompts

#endif  // HINTKIT_PROMPTS_HPP_
