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

#ifndef HINTKIT_HINTGEN_HPP_
#define HINTKIT_HINTGEN_HPP_

// Hint generation prompts, guarded generation, and SFT corpus export.

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hintkit/backends.hpp"
#include "hintkit/data.hpp"
#include "hintkit/metrics.hpp"
#include "hintkit/parallel.hpp"
#include "hintkit/prompts.hpp"

namespace hintkit {

enum class GenerationMode { kVanillaWA, kVanillaWoA, kFtWA, kFtWoA };

inline bool uses_answer(GenerationMode m) {
  return m == GenerationMode::kVanillaWA || m == GenerationMode::kFtWA;
}

inline std::string_view mode_name(GenerationMode m) {
  switch (m) {
    case GenerationMode::kVanillaWA: return "vanilla_wa";
    case GenerationMode::kVanillaWoA: return "vanilla_woa";
    case GenerationMode::kFtWA: return "ft_wa";
    case GenerationMode::kFtWoA: return "ft_woa";
  }
  return "vanilla_woa";
}

inline GenerationMode parse_generation_mode(std::string_view s) {
  for (auto m : {GenerationMode::kVanillaWA, GenerationMode::kVanillaWoA, GenerationMode::kFtWA,
                 GenerationMode::kFtWoA}) {
    if (s == mode_name(m)) return m;
  }
  throw Error(Errc::kInvalidArgument, "unknown generation mode '" + std::string(s) + "'");
}

using PromptPair = ChatPrompt;

// Answer-aware modes need `answer`; answer-agnostic modes must not get one.
inline PromptPair build_prompt(std::string_view question, const std::optional<std::string>& answer,
                               GenerationMode mode, bool normalized = false) {
  if (uses_answer(mode) && !answer) {
    throw Error(Errc::kModeAnswerMismatch, std::string(mode_name(mode)) + " requires an answer");
  }
  if (!uses_answer(mode) && answer) {
    throw Error(Errc::kModeAnswerMismatch, std::string(mode_name(mode)) + " must not get an answer");
  }
  return {std::string(prompts::kGeneratorSystem),
          prompts::generator_user(question, answer, normalized)};
}

struct GuardPolicy {
  enum class Kind { kOff, kReject, kRegenerate };
  Kind kind = Kind::kReject;
  int retries = 0;  // extra attempts for kRegenerate
  double threshold = 0.9;

  static GuardPolicy off() { return {Kind::kOff, 0, 0.9}; }
  static GuardPolicy reject() { return {Kind::kReject, 0, 0.9}; }
  static GuardPolicy regenerate(int k) { return {Kind::kRegenerate, k, 0.9}; }
};

// "off" / "reject" / "regenerate:K".
inline GuardPolicy parse_guard(std::string_view s) {
  if (s == "off") return GuardPolicy::off();
  if (s == "reject") return GuardPolicy::reject();
  constexpr std::string_view kRegen = "regenerate";
  if (s.substr(0, kRegen.size()) == kRegen) {
    int k = 2;
    if (s.size() > kRegen.size()) {
      if (s[kRegen.size()] != ':' && s[kRegen.size()] != '(') {
        throw Error(Errc::kInvalidArgument, "bad guard policy '" + std::string(s) + "'");
      }
      try {
        k = std::stoi(std::string(s.substr(kRegen.size() + 1)));
      } catch (const std::exception&) {
        throw Error(Errc::kInvalidArgument, "bad guard policy '" + std::string(s) + "'");
      }
    }
    if (k < 0) throw Error(Errc::kInvalidArgument, "regenerate count must be >= 0");
    return GuardPolicy::regenerate(k);
  }
  throw Error(Errc::kInvalidArgument, "unknown guard policy '" + std::string(s) + "'");
}

enum class GuardVerdict { kPass, kUnchecked, kLeakedFlagged };

inline std::string_view verdict_name(GuardVerdict v) {
  switch (v) {
    case GuardVerdict::kPass: return "pass";
    case GuardVerdict::kUnchecked: return "unchecked";
    case GuardVerdict::kLeakedFlagged: return "leaked";
  }
  return "unchecked";
}

struct GenerationResult {
  std::string hint;
  GuardVerdict verdict = GuardVerdict::kUnchecked;
  int attempts = 0;
  std::optional<double> leakage_max;
};

struct GenerationRequest {
  std::string question;
  // Gold answer. Sent to the model only in answer-aware modes; always used by
  // the guard when present.
  std::optional<Answer> answer;
  GenerationMode mode = GenerationMode::kVanillaWoA;
  bool normalized_prompt = false;
};

// Leakage score used to pick among attempts: 1 for a verbatim mention, else
// the max word-level leakage (0 without an embedding backend).
inline double leak_score(std::string_view hint, const Answer& answer, const EmbeddingBackend* embed) {
  if (text::mentions_answer(hint, answer.text, answer.aliases)) return 1.0;
  if (embed == nullptr) return 0.0;
  try {
    return answer_leakage(hint, answer.text, *embed).max;
  } catch (const Error&) {
    return 0.0;
  }
}

inline GenerationResult generate_hint(const GenerationRequest& req, const JudgeBackend& judge,
                                      const GuardPolicy& guard,
                                      const EmbeddingBackend* embed = nullptr) {
  std::optional<std::string> prompt_answer;
  if (uses_answer(req.mode)) {
    if (!req.answer) {
      throw Error(Errc::kModeAnswerMismatch, std::string(mode_name(req.mode)) + " requires an answer");
    }
    prompt_answer = req.answer->text;
  }
  const PromptPair prompt = build_prompt(req.question, prompt_answer, req.mode, req.normalized_prompt);
  auto ask = [&]() {
    auto out = judge.generate(prompt, 1);
    if (out.empty() || text::trim(out.front()).empty()) {
      throw Error(Errc::kBackendError, "generator returned no completion");
    }
    return text::trim(out.front());
  };

  GenerationResult result;
  if (guard.kind == GuardPolicy::Kind::kOff || !req.answer) {
    result.hint = ask();
    result.attempts = 1;
    result.verdict = GuardVerdict::kUnchecked;
    return result;
  }

  const int max_attempts = guard.kind == GuardPolicy::Kind::kRegenerate ? guard.retries + 1 : 1;
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < max_attempts; ++a) {
    std::string hint = ask();
    const double score = leak_score(hint, *req.answer, embed);
    const bool leaked = score >= 1.0 || score > guard.threshold;
    result.attempts = a + 1;
    if (!leaked) {
      result.hint = std::move(hint);
      result.verdict = GuardVerdict::kPass;
      if (embed) result.leakage_max = score;
      return result;
    }
    if (score < best) {
      best = score;
      result.hint = std::move(hint);
      result.leakage_max = score;
    }
  }
  if (guard.kind == GuardPolicy::Kind::kReject) {
    throw Error(Errc::kAllAttemptsLeaked, "generated hint leaks the answer");
  }
  result.verdict = GuardVerdict::kLeakedFlagged;
  return result;
}

struct GenerationRecord {
  std::string item_id;
  GenerationMode mode;
  GenerationResult result;
  std::optional<std::string> error;
};

inline json to_json(const GenerationRecord& r) {
  json j = {{"item_id", r.item_id},
            {"mode", mode_name(r.mode)},
            {"hint", r.result.hint},
            {"guard_verdict", verdict_name(r.result.verdict)},
            {"attempts", r.result.attempts}};
  if (r.error) {
    j["error"] = *r.error;
    j["hint"] = nullptr;
  }
  return j;
}

// One generation per item. Per-item failures are recorded, not thrown.
inline std::vector<GenerationRecord> generate_for_dataset(const Dataset& ds, GenerationMode mode,
                                                          const JudgeBackend& judge,
                                                          const GuardPolicy& guard,
                                                          const EmbeddingBackend* embed = nullptr,
                                                          bool normalized_prompt = false,
                                                          size_t max_concurrency = 1) {
  std::vector<GenerationRecord> out(ds.items.size());
  bool serial = !judge.concurrent_safe() || (embed && !embed->concurrent_safe());
  parallel_for(ds.items.size(), serial ? 1 : max_concurrency, [&](size_t i) {
    const QAItem& item = ds.items[i];
    GenerationRecord& rec = out[i];
    rec.item_id = item.id;
    rec.mode = mode;
    GenerationRequest req{item.question.text, item.answer, mode, normalized_prompt};
    try {
      rec.result = generate_hint(req, judge, guard, embed);
    } catch (const Error& e) {
      rec.error = std::string(e.code_name()) + ": " + e.detail();
    }
  });
  return out;
}

struct SftRecord {
  std::string system;
  std::string user;
  std::string target;
  std::string item_id;
  int rank = 0;
};

// One record per hint, in dataset order; prompts use the finetuning variant of
// the requested mode.
inline std::vector<SftRecord> export_sft_records(const Dataset& ds, bool with_answer,
                                                 bool normalized_prompt = false) {
  const GenerationMode mode = with_answer ? GenerationMode::kFtWA : GenerationMode::kFtWoA;
  std::vector<SftRecord> out;
  out.reserve(ds.hint_count());
  for (const auto& item : ds.items) {
    std::optional<std::string> answer;
    if (with_answer) answer = item.answer.text;
    const PromptPair p = build_prompt(item.question.text, answer, mode, normalized_prompt);
    for (const auto& h : item.hints) {
      out.push_back({p.system, p.user, h.text, item.id, h.rank});
    }
  }
  return out;
}

inline json to_json(const SftRecord& r) {
  return json{{"system", r.system},
              {"user", r.user},
              {"target", r.target},
              {"item_id", r.item_id},
              {"rank", r.rank}};
}

}  // namespace hintkit

#endif  // HINTKIT_HINTGEN_HPP_
