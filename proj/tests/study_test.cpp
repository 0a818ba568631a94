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

#include "hintkit/study.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace hintkit::study {
namespace {

std::map<std::string, Dataset> small_splits(size_t n = 3) {
  Dataset ds = testing::synthetic_dataset(n, 77);
  ds.split = Split::kTest;
  std::map<std::string, Dataset> m;
  m["test"] = ds;
  return m;
}

Clock counter_clock() {
  auto t = std::make_shared<int64_t>(1000);
  return [t] { return (*t)++; };
}

TEST(StudyService, ScriptedSession) {
  auto splits = small_splits();
  const Dataset ds = splits["test"];
  auto store = std::make_shared<MemoryEventStore>();
  StudyService svc(splits, store, counter_clock());
  const json created = svc.create_session("p1", "test");
  const std::string id = created["session_id"];
  EXPECT_EQ(id, "s000001");
  EXPECT_EQ(created["question"], ds.items[0].question.text);
  EXPECT_EQ(created["can_skip"], false);

  // Question 1: correct without hints.
  auto [ok, view] = svc.submit_answer(id, ds.items[0].answer.text);
  EXPECT_TRUE(ok);
  EXPECT_EQ(view["question_index"], 1);

  // Question 2: wrong, two reveals, correct.
  EXPECT_FALSE(svc.submit_answer(id, "nope").first);
  EXPECT_EQ(*svc.reveal_next_hint(id).hint, ds.items[1].hints[0].text);
  EXPECT_EQ(*svc.reveal_next_hint(id).hint, ds.items[1].hints[1].text);
  EXPECT_TRUE(svc.submit_answer(id, "  " + ds.items[1].answer.text + ". ").first);

  // Question 3: skip only after five reveals.
  try {
    svc.skip_question(id);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSkipBeforeExhaustion);
  }
  for (int k = 0; k < 5; ++k) {
    EXPECT_FALSE(svc.current(id)["can_skip"].get<bool>());
    svc.reveal_next_hint(id);
  }
  EXPECT_TRUE(svc.reveal_next_hint(id).exhausted);
  EXPECT_TRUE(svc.current(id)["can_skip"].get<bool>());
  const json done = svc.skip_question(id);
  EXPECT_EQ(done["done"], true);
  EXPECT_EQ(done["summary"], (json{{"answered_no_hints", 1}, {"answered_with_hints", 1}, {"skipped", 1}}));

  const StudySession s = svc.state(id);
  EXPECT_EQ(s.outcomes.at(ds.items[1].id).hints_used, 2);
  EXPECT_EQ(s.outcomes.at(ds.items[1].id).attempts_count, 2);
  EXPECT_EQ(s.outcomes.at(ds.items[2].id).attempts_count, 0);
  EXPECT_THROW(svc.reveal_next_hint(id), Error);
  EXPECT_THROW(svc.current("nope"), Error);

  const auto groups = svc.aggregate_results(GroupBy::kQuestionMajor);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups.at("SYNTHETIC").total(), 3u);
  EXPECT_DOUBLE_EQ(groups.at("SYNTHETIC").mean_hints_used, 2.0);
}

TEST(StudyService, OverrideAndValidation) {
  auto splits = small_splits(1);
  StudyService svc(splits, std::make_shared<MemoryEventStore>(), counter_clock());
  EXPECT_THROW(svc.create_session("", "test"), Error);
  try {
    svc.create_session("p", "train");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnknownSplit);
  }
  const std::string id = svc.create_session("p", "test")["session_id"];
  EXPECT_THROW(svc.override_correct(id), Error);  // nothing to adjudicate
  EXPECT_THROW(svc.submit_answer(id, "  "), Error);
  svc.submit_answer(id, "close enough");
  svc.reveal_next_hint(id);
  const json v = svc.override_correct(id);
  EXPECT_EQ(v["summary"]["answered_with_hints"], 1);
  EXPECT_TRUE(svc.state(id).attempts.back().correct);
}

TEST(StudyService, RevealOrders) {
  auto splits = small_splits(2);
  const QAItem& item = splits["test"].items[0];
  StudyService svc(splits, std::make_shared<MemoryEventStore>(), counter_clock());
  const std::string id = svc.create_session("p", "test", {RevealOrder::kGoldRankAsc, 0})["session_id"];
  svc.submit_answer(id, "wrong");
  for (int r = 1; r <= 5; ++r) {
    const auto h = svc.reveal_next_hint(id).hint;
    const auto it = std::find_if(item.hints.begin(), item.hints.end(),
                                 [&](const Hint& x) { return x.text == *h; });
    EXPECT_EQ(it->rank, r);
  }
  const auto a = detail::reveal_sequence(item, {RevealOrder::kRandom, 5});
  EXPECT_EQ(a, detail::reveal_sequence(item, {RevealOrder::kRandom, 5}));
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(StudyService, ViewNeverCarriesAnswer) {
  auto splits = small_splits(3);
  StudyService svc(splits, std::make_shared<MemoryEventStore>(), counter_clock());
  const std::string id = svc.create_session("p", "test")["session_id"];
  for (const auto& item : splits["test"].items) {
    const std::string v = svc.current(id).dump();
    for (const auto& other : splits["test"].items) {
      EXPECT_EQ(v.find(other.answer.text), std::string::npos) << v;
    }
    svc.submit_answer(id, "wrong");
    for (int k = 0; k < 5; ++k) svc.reveal_next_hint(id);
    EXPECT_EQ(svc.current(id).dump().find(item.answer.text), std::string::npos);
    svc.skip_question(id);
  }
}

TEST(StudyService, DirectoryStoreSurvivesRestart) {
  testing::TempDir tmp("study");
  auto splits = small_splits(2);
  std::string id;
  json before;
  {
    StudyService svc(splits, std::make_shared<DirectoryEventStore>(tmp.path()), counter_clock());
    id = svc.create_session("p", "test")["session_id"];
    svc.submit_answer(id, "wrong");
    svc.reveal_next_hint(id);
    before = snapshot(svc.state(id));
  }
  StudyService again(splits, std::make_shared<DirectoryEventStore>(tmp.path()), counter_clock());
  EXPECT_EQ(snapshot(again.state(id)).dump(), before.dump());
  std::ifstream snap(tmp.file(id + ".snapshot.json"));
  EXPECT_EQ(json::parse(snap), before);
  // A torn final line is ignored.
  { std::ofstream(tmp.file(id + ".events.jsonl"), std::ios::app) << "{\"type\":\"rev"; }
  StudyService third(splits, std::make_shared<DirectoryEventStore>(tmp.path()), counter_clock());
  EXPECT_EQ(snapshot(third.state(id)).dump(), before.dump());
}

// Random action sequences never reach an illegal state, and replaying the
// event log reproduces the snapshot byte for byte.
TEST(StudyProperty, RandomActionSequences) {
  const auto splits = small_splits(3);
  const Dataset& ds = splits.at("test");
  std::mt19937_64 rng(123456);
  for (int seq = 0; seq < 10000; ++seq) {
    auto store = std::make_shared<MemoryEventStore>();
    StudyService svc(splits, store, counter_clock());
    const RevealOrder order = static_cast<RevealOrder>(rng() % 3);
    const std::string id = svc.create_session("p" + std::to_string(seq % 7), "test", {order, rng()})["session_id"];
    const int steps = 1 + static_cast<int>(rng() % 40);
    for (int step = 0; step < steps; ++step) {
      const StudySession before = svc.state(id);
      const int action = static_cast<int>(rng() % 5);
      bool threw = false;
      try {
        switch (action) {
          case 0:
            svc.submit_answer(id, before.completed() ? std::string("x") : ds.find(*before.current())->answer.text);
            break;
          case 1: svc.submit_answer(id, "wrong guess"); break;
          case 2: svc.reveal_next_hint(id); break;
          case 3: svc.skip_question(id); break;
          case 4: svc.override_correct(id); break;
        }
      } catch (const Error&) {
        threw = true;
      }
      const StudySession after = svc.state(id);
      ASSERT_LE(after.revealed_count, kHintsPerItem);
      ASSERT_GE(after.revealed_count, 0);
      if (!after.completed()) {
        ASSERT_EQ(after.phase == Phase::kNoHints, after.revealed_count == 0);
        ASSERT_EQ(after.outcomes.count(*after.current()), 0u);
      } else {
        ASSERT_EQ(after.phase, Phase::kDone);
      }
      ASSERT_EQ(after.outcomes.size(), after.position);
      if (before.completed()) {
        ASSERT_TRUE(threw);
        continue;
      }
      if (action == 3) {
        // Skip legal iff all five hints were shown.
        ASSERT_EQ(!threw, before.revealed_count == kHintsPerItem);
        if (!threw) ASSERT_EQ(after.outcomes.at(*before.current()).kind, OutcomeKind::kSkipped);
      }
      if (action == 2 && !threw && after.position == before.position) {
        ASSERT_EQ(after.revealed_count, std::min(before.revealed_count + 1, kHintsPerItem));
      }
      if (action == 0) {
        ASSERT_FALSE(threw);
        ASSERT_EQ(after.position, before.position + 1);
        ASSERT_EQ(after.outcomes.at(*before.current()).kind,
                  before.revealed_count == 0 ? OutcomeKind::kCorrectNoHints
                                             : OutcomeKind::kCorrectWithHints);
      }
      if (action == 4) ASSERT_EQ(!threw, before.current_attempts() > 0);
    }
    const auto logs = store->load_all();
    ASSERT_EQ(snapshot(replay(logs.at(id))).dump(), snapshot(svc.state(id)).dump());
  }
}

}  // namespace
}  // namespace hintkit::study
