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

#include "hintkit/validate.hpp"

#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

namespace hintkit {
namespace {

Dataset criteria_fixture() {
  LoadOptions lo;
  lo.enforce_invariants = false;
  return load_dataset(testing::fixture("criteria.jsonl"), Split::kAll, lo);
}

std::set<std::string> codes_of(const ValidationReport& r) {
  std::set<std::string> out;
  for (const auto& v : r.violations) out.insert(v.code);
  return out;
}

TEST(ValidateItem, CleanItemPasses) {
  const Dataset ds = criteria_fixture();
  const ValidationReport r = validate_item(*ds.find("clean"));
  EXPECT_TRUE(r.passed()) << to_text(r);
  EXPECT_EQ(r.not_checked, std::vector<std::string>{"ANSWER_LEAKAGE"});
}

TEST(ValidateItem, EachCriterionInIsolation) {
  const Dataset ds = criteria_fixture();
  const std::map<std::string, std::string> expected = {
      {"answer_exact", "ANSWER_EXACT"},     {"not_a_sentence", "NOT_A_SENTENCE"},
      {"generic", "GENERIC"},               {"source_missing", "SOURCE_MISSING"},
      {"duplicate_rank", "DUPLICATE_RANK"},
  };
  for (const auto& [id, code] : expected) {
    const ValidationReport r = validate_item(*ds.find(id));
    EXPECT_EQ(codes_of(r), std::set<std::string>{code}) << to_text(r);
    ASSERT_EQ(r.violations.size(), 1u) << to_text(r);
    EXPECT_EQ(r.violations[0].hint_index, id == "duplicate_rank" ? 3 : 2);
  }
}

TEST(ValidateItem, ReportsEveryViolation) {
  const Dataset ds = criteria_fixture();
  QAItem item = *ds.find("clean");
  item.hints[0].text = "Paris.";
  item.hints[1].source.reset();
  item.hints[4].rank = 1;
  const auto codes = codes_of(validate_item(item));
  EXPECT_EQ(codes, (std::set<std::string>{"ANSWER_EXACT", "NOT_A_SENTENCE", "SOURCE_MISSING",
                                          "DUPLICATE_RANK"}));
}

TEST(ValidateItem, SourceOptional) {
  const Dataset ds = criteria_fixture();
  ValidateOptions opts;
  opts.require_source = false;
  EXPECT_TRUE(validate_item(*ds.find("source_missing"), nullptr, opts).passed());
}

TEST(ValidateItem, LeakageNeedsEmbedding) {
  const Dataset ds = criteria_fixture();
  QAItem item = *ds.find("clean");
  item.hints[2].text = "The river parisian flows through it.";
  // Injective mock: no hint token equals the answer, so no leakage.
  testing::InjectiveEmbedding inj;
  EXPECT_TRUE(validate_item(item, &inj).passed());
  EXPECT_TRUE(validate_item(item, &inj).not_checked.empty());

  // A backend that maps "parisian" onto the answer flags leakage only.
  struct Near : EmbeddingBackend {
    Vector embed(std::string_view t) const override {
      if (t == "paris" || t == "parisian") return {1.0, 0.05};
      return {0.0, 1.0};
    }
    std::string id() const override { return "near"; }
  } near;
  EXPECT_EQ(codes_of(validate_item(item, &near)), std::set<std::string>{"ANSWER_LEAKAGE"});
}

TEST(ValidationReport, Json) {
  const Dataset ds = criteria_fixture();
  const json j = to_json(validate_item(*ds.find("generic")));
  EXPECT_EQ(j["item_id"], "generic");
  EXPECT_EQ(j["passed"], false);
  EXPECT_EQ(j["violations"][0]["code"], "GENERIC");
  EXPECT_EQ(j["violations"][0]["hint_index"], 2);
}

}  // namespace
}  // namespace hintkit
