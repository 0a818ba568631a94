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

#include "hintkit/hintgen.hpp"

#include <gtest/gtest.h>

#include "hintkit/lexical_judge.hpp"
#include "test_support.hpp"

namespace hintkit {
namespace {

TEST(BuildPrompt, TemplatesAreByteExact) {
  const PromptPair woa = build_prompt("What is the capital of France?", std::nullopt,
                                      GenerationMode::kVanillaWoA);
  EXPECT_EQ(woa.system,
            "You are a hint generator for the factoid questions. The user asks you a question and "
            "you should generate a hint for that question without revealing the answer in the "
            "hint.");
  EXPECT_EQ(woa.user, "Give me the best hint for this question: What is the capital of France?");

  const PromptPair wa = build_prompt("What is the capital of France", std::string("Paris"),
                                     GenerationMode::kFtWA);
  EXPECT_EQ(wa.user,
            "Give me the best hint for this question: What is the capital of France? The answer "
            "for the question is Paris");

  const PromptPair norm = build_prompt("What is the capital of France?", std::string("Paris"),
                                       GenerationMode::kVanillaWA, true);
  EXPECT_EQ(norm.user,
            "Give me the best hint for this question: What is the capital of France? The answer "
            "for the question is Paris.");
}

TEST(BuildPrompt, ModeAnswerMismatch) {
  for (auto [mode, answer] : std::vector<std::pair<GenerationMode, std::optional<std::string>>>{
           {GenerationMode::kVanillaWA, std::nullopt},
           {GenerationMode::kFtWA, std::nullopt},
           {GenerationMode::kVanillaWoA, "x"},
           {GenerationMode::kFtWoA, "x"}}) {
    try {
      build_prompt("Q?", answer, mode);
      FAIL() << mode_name(mode);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kModeAnswerMismatch);
    }
  }
}

TEST(ParseGuard, Forms) {
  EXPECT_EQ(parse_guard("off").kind, GuardPolicy::Kind::kOff);
  EXPECT_EQ(parse_guard("reject").kind, GuardPolicy::Kind::kReject);
  EXPECT_EQ(parse_guard("regenerate:3").retries, 3);
  EXPECT_EQ(parse_guard("regenerate").retries, 2);
  EXPECT_THROW(parse_guard("regenerate:x"), Error);
  EXPECT_THROW(parse_guard("maybe"), Error);
  EXPECT_THROW(parse_generation_mode("vanilla"), Error);
}

Answer paris() { return Answer{"Paris", {}, {}, {}, {}, json::object()}; }

TEST(GenerateHint, GuardPolicies) {
  std::vector<std::string> replies = {"Paris is the one.", "It is the city of the Louvre.", "Other."};
  size_t next = 0;
  testing::ScriptedJudge judge([&](const ChatPrompt&, int) {
    return std::vector<std::string>{replies[next++ % replies.size()]};
  });
  GenerationRequest req{"What is the capital of France?", paris(), GenerationMode::kVanillaWoA, false};

  next = 0;
  try {
    generate_hint(req, judge, GuardPolicy::reject());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kAllAttemptsLeaked);
  }

  next = 0;
  auto r = generate_hint(req, judge, GuardPolicy::regenerate(2));
  EXPECT_EQ(r.hint, "It is the city of the Louvre.");
  EXPECT_EQ(r.attempts, 2);
  EXPECT_EQ(r.verdict, GuardVerdict::kPass);

  next = 0;
  r = generate_hint(req, judge, GuardPolicy::off());
  EXPECT_EQ(r.hint, "Paris is the one.");
  EXPECT_EQ(r.verdict, GuardVerdict::kUnchecked);

  replies = {"Paris, of course.", "Yes, Paris."};
  next = 0;
  r = generate_hint(req, judge, GuardPolicy::regenerate(3));
  EXPECT_EQ(r.verdict, GuardVerdict::kLeakedFlagged);
  EXPECT_EQ(r.attempts, 4);
}

TEST(GenerateHint, AnswerOnlyInAwarePrompts) {
  std::vector<std::string> users;
  testing::ScriptedJudge judge([&](const ChatPrompt& p, int) {
    users.push_back(p.user);
    return std::vector<std::string>{"A harbor city."};
  });
  GenerationRequest req{"Q?", paris(), GenerationMode::kFtWoA, false};
  generate_hint(req, judge, GuardPolicy::reject());
  req.mode = GenerationMode::kFtWA;
  generate_hint(req, judge, GuardPolicy::reject());
  ASSERT_EQ(users.size(), 2u);
  EXPECT_EQ(users[0].find("Paris"), std::string::npos);
  EXPECT_NE(users[1].find("Paris"), std::string::npos);
}

TEST(GenerateForDataset, RecordsErrors) {
  const Dataset ds = load_dataset(testing::fixture("stats10.jsonl"), Split::kAll);
  testing::ScriptedJudge judge([](const ChatPrompt& p, int) {
    // Leaks for Tokyo's item only.
    if (p.user.find("q6word0") != std::string::npos) return std::vector<std::string>{"Tokyo."};
    return std::vector<std::string>{"A quiet place."};
  });
  const auto recs = generate_for_dataset(ds, GenerationMode::kVanillaWoA, judge, GuardPolicy::reject(),
                                         nullptr, false, 3);
  ASSERT_EQ(recs.size(), 10u);
  for (size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].item_id, ds.items[i].id);
    EXPECT_EQ(recs[i].error.has_value(), i == 6);
  }
  EXPECT_TRUE(to_json(recs[6])["hint"].is_null());
}

TEST(LexicalJudge, GeneratesNonLeakingHint) {
  const Dataset ds = load_dataset(testing::fixture("criteria.jsonl"), Split::kAll,
                                  LoadOptions{false});
  LexicalJudge judge(ds);
  GenerationRequest req{ds.items[0].question.text, ds.items[0].answer, GenerationMode::kVanillaWA, false};
  HashingEmbedding e;
  const auto r = generate_hint(req, judge, GuardPolicy::reject(), &e);
  EXPECT_EQ(r.verdict, GuardVerdict::kPass);
  EXPECT_EQ(r.hint.find("Paris"), std::string::npos);
  EXPECT_TRUE(text::is_sentence(r.hint));
}

TEST(ExportSft, OneRecordPerHint) {
  const Dataset ds = load_dataset(testing::fixture("stats10.jsonl"), Split::kAll);
  const auto with = export_sft_records(ds, true);
  const auto without = export_sft_records(ds, false);
  ASSERT_EQ(with.size(), 50u);
  ASSERT_EQ(without.size(), 50u);
  EXPECT_NE(with[0].user.find("The answer for the question is Paris"), std::string::npos);
  EXPECT_EQ(without[0].user.find("Paris"), std::string::npos);
  EXPECT_EQ(with[0].target, ds.items[0].hints[0].text);
  EXPECT_EQ(with[0].rank, ds.items[0].hints[0].rank);
  const json j = to_json(with[0]);
  EXPECT_EQ(j["item_id"], "st00");
  EXPECT_TRUE(j.contains("system"));
}

}  // namespace
}  // namespace hintkit
