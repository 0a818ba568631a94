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

#include "hintkit/text.hpp"

#include <gtest/gtest.h>

namespace hintkit::text {
namespace {

TEST(Fold, LowercasesAndNormalizes) {
  EXPECT_EQ(fold("  The  EIFFEL-Tower! "), "the eiffel tower");
  // NFKC folds the ligature and full-width digits.
  EXPECT_EQ(fold("\xEF\xAC\x81ne \xEF\xBC\x91\xEF\xBC\x92"), "fine 12");
}

TEST(NormalizeAnswer, DropsLeadingArticle) {
  EXPECT_EQ(normalize_answer("The Beatles"), "beatles");
  EXPECT_EQ(normalize_answer("an apple"), "apple");
  EXPECT_EQ(normalize_answer("Theodore"), "theodore");
  EXPECT_EQ(normalize_answer("The"), "the");
}

TEST(WordCount, WhitespaceDelimited) {
  EXPECT_EQ(word_count("It was built in 1889 - for a fair."), 9u);
  EXPECT_EQ(word_count("  a\tb\nc  "), 3u);
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_tokens("It's - done.").size(), 2u);
}

TEST(MentionsAnswer, TokenBoundaries) {
  EXPECT_TRUE(mentions_answer("Paris sits on the Seine.", "Paris", {}));
  EXPECT_TRUE(mentions_answer("Known as the city of light.", "Paris", {"City of Light"}));
  EXPECT_FALSE(mentions_answer("Comparison shopping is popular.", "Paris", {}));
  EXPECT_TRUE(mentions_answer("They sang with THE BEATLES once.", "The Beatles", {}));
}

TEST(MatchesAnswer, NormalizedEquality) {
  EXPECT_TRUE(matches_answer("  paris. ", "Paris", {}));
  EXPECT_TRUE(matches_answer("the beatles", "Beatles", {}));
  EXPECT_TRUE(matches_answer("city of light", "Paris", {"City of Light"}));
  EXPECT_FALSE(matches_answer("Lyon", "Paris", {}));
}

TEST(IsSentence, Heuristic) {
  EXPECT_FALSE(is_sentence("Paris."));
  EXPECT_FALSE(is_sentence("river Seine banks"));
  EXPECT_TRUE(is_sentence("It lies on a river."));
  EXPECT_TRUE(is_sentence("Is it on a river?"));

  struct AlwaysVerb : FiniteVerbTagger {
    bool has_finite_verb(std::string_view) const override { return true; }
  } tagger;
  EXPECT_TRUE(is_sentence("it lies there", &tagger));
  EXPECT_FALSE(is_sentence("lies there", &tagger));
}

TEST(IsGeneric, NeedsNewContent) {
  const std::string q = "What is the capital city of France?";
  EXPECT_TRUE(is_generic("It is a famous city.", q));
  EXPECT_TRUE(is_generic("This is the capital of France.", q));
  EXPECT_FALSE(is_generic("The river Seine flows through it.", q));
}

TEST(LeakageTokens, StopwordsOptional) {
  EXPECT_EQ(leakage_tokens("The Seine, a river.", false),
            (std::vector<std::string>{"the", "seine", "a", "river"}));
  EXPECT_EQ(leakage_tokens("The Seine, a river.", true), (std::vector<std::string>{"seine", "river"}));
}

TEST(CodepointLength, CountsCodePoints) {
  EXPECT_EQ(codepoint_length("abc"), 3u);
  EXPECT_EQ(codepoint_length("M\xC3\xBCnchen"), 7u);
}

}  // namespace
}  // namespace hintkit::text
