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

#include "hintkit/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace hintkit {
namespace {

using testing::InjectiveEmbedding;
using testing::OrthogonalEmbedding;
using testing::ScriptedJudge;

TEST(AnswerLeakage, InjectiveContainsAnswer) {
  InjectiveEmbedding e;
  const Leakage l = answer_leakage("This city, Paris, is lovely.", "Paris", e);
  EXPECT_EQ(l.max, 1.0);
  EXPECT_DOUBLE_EQ(l.avg, 1.0 / 5.0);
}

TEST(AnswerLeakage, OrthogonalIsZero) {
  OrthogonalEmbedding e("paris");
  const Leakage l = answer_leakage("The river Seine flows through it.", "Paris", e);
  EXPECT_EQ(l.avg, 0.0);
  EXPECT_EQ(l.max, 0.0);
}

TEST(AnswerLeakage, Stopwords) {
  InjectiveEmbedding e;
  const Leakage with = answer_leakage("the Paris of the north", "Paris", e, false);
  const Leakage without = answer_leakage("the Paris of the north", "Paris", e, true);
  EXPECT_DOUBLE_EQ(with.avg, 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(without.avg, 1.0 / 2.0);
}

TEST(AnswerLeakage, NoTokens) {
  InjectiveEmbedding e;
  try {
    answer_leakage(" ... ", "Paris", e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::kNoTokens);
  }
}

TEST(Readability, RangeChecked) {
  ConstantClassifier three(3);
  try {
    readability("Some text here.", three, "item/0");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMetricBackendError);
    EXPECT_NE(std::string(e.what()).find("item/0"), std::string::npos);
  }
  LexicalReadability lex;
  EXPECT_EQ(readability("The cat sat on the mat.", lex), 0);
  EXPECT_EQ(readability("Institutional intergovernmental considerations notwithstanding, "
                        "multilateral counterproliferation instrumentalities proliferate "
                        "incomprehensibly throughout organizational bureaucracies.",
                        lex),
            2);
}

TEST(Relevance, ProbesAndSimilarity) {
  InjectiveEmbedding e;
  ScriptedJudge same([](const ChatPrompt&, int n) {
    return std::vector<std::string>(static_cast<size_t>(n), "What is the capital of France?");
  });
  EXPECT_EQ(relevance("What is the capital of France?", "A hint.", same, e), 1.0);
  EXPECT_EQ(same.calls, 1u);

  ScriptedJudge half([](const ChatPrompt&, int) {
    return std::vector<std::string>{"What is the capital of France?", "Other?", "", "Extra?"};
  });
  EXPECT_DOUBLE_EQ(relevance("What is the capital of France?", "A hint.", half, e, 2), 0.5);

  ScriptedJudge none([](const ChatPrompt&, int) { return std::vector<std::string>{"", "  "}; });
  try {
    relevance("Q?", "A hint.", none, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::kNoProbes);
  }
}

// Candidates: gold + three others. The judge keeps a candidate iff its
// first letter appears in the hint.
ScriptedJudge letter_judge() {
  return ScriptedJudge([](const ChatPrompt& p, int) -> std::vector<std::string> {
    if (p.user.rfind(prompts::kCandidatesPrefix, 0) == 0) return {"1. Paris\n2. Lyon\n- Nice\n\"Metz\"\nLyon\n"};
    const auto h = p.user.find(prompts::kConsistencyHint);
    const auto c = p.user.find(prompts::kConsistencyCandidate);
    const std::string hint = p.user.substr(h, c - h);
    const char first = p.user[c + prompts::kConsistencyCandidate.size()];
    return {hint.find(first) != std::string::npos ? "Yes." : "No"};
  });
}

TEST(Convergence, CandidateParsing) {
  auto judge = letter_judge();
  Answer gold{"Paris", {}, {}, {}, {}, json::object()};
  const CandidateSet set = propose_candidates("Q?", gold, judge);
  EXPECT_EQ(set.candidates, (std::vector<std::string>{"Paris", "Lyon", "Nice", "Metz"}));
  EXPECT_EQ(set.gold_index, 0u);
  EXPECT_EQ(set.proposed, 4u);

  Answer other{"Rome", {}, {}, {}, {}, json::object()};
  const CandidateSet appended = propose_candidates("Q?", other, judge);
  EXPECT_EQ(appended.candidates.back(), "Rome");
  EXPECT_EQ(appended.gold_index, 4u);
}

TEST(Convergence, EliminationFraction) {
  auto judge = letter_judge();
  Answer gold{"Paris", {}, {}, {}, {}, json::object()};
  EXPECT_DOUBLE_EQ(convergence("Q?", gold, {"P only"}, judge), 1.0);
  EXPECT_DOUBLE_EQ(convergence("Q?", gold, {"P and L"}, judge), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(convergence("Q?", gold, {"P L N M"}, judge), 0.0);
  // Gold eliminated.
  EXPECT_DOUBLE_EQ(convergence("Q?", gold, {"L and N"}, judge), 0.0);
  // Prefix of hints: a candidate must survive every hint.
  EXPECT_DOUBLE_EQ(convergence("Q?", gold, {"P L N", "P L M"}, judge), 2.0 / 3.0);
}

TEST(Convergence, TooFewCandidates) {
  ScriptedJudge one([](const ChatPrompt&, int) { return std::vector<std::string>{"Paris\nparis\n"}; });
  Answer gold{"Paris", {}, {}, {}, {}, json::object()};
  try {
    propose_candidates("Q?", gold, one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTooFewCandidates);
  }
}

TEST(Familiarity, MeanOfNormalizedViews) {
  EXPECT_EQ(familiarity({}), 1.0);
  std::vector<EntityMention> es(3);
  es[0].normalized_views = 0.2;
  es[1].normalized_views = 0.6;
  EXPECT_DOUBLE_EQ(familiarity(es), 0.4);
}

Dataset stats_fixture() { return load_dataset(testing::fixture("stats10.jsonl"), Split::kAll); }

TEST(EvaluateDataset, LengthOnlyMatchesStatistics) {
  Dataset ds = stats_fixture();
  EvalConfig cfg;
  cfg.toggles = MetricToggles{false, false, false, false, true, false};
  const EvalResult r = evaluate_dataset(ds, cfg);
  EXPECT_DOUBLE_EQ(*r.report.length, 6.5);
  EXPECT_EQ(r.per_hint.size(), 50u);
  EXPECT_FALSE(r.report.relevance.has_value());
  const auto by_rank = mean_by_rank(r.per_hint, &HintMetrics::length);
  EXPECT_DOUBLE_EQ(by_rank.at(1), 4.5);
  EXPECT_DOUBLE_EQ(by_rank.at(5), 8.5);
}

TEST(EvaluateDataset, ConfigErrors) {
  Dataset ds = stats_fixture();
  EvalConfig cfg;
  cfg.toggles = MetricToggles{false, false, false, false, false, false};
  try {
    evaluate_dataset(ds, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNoMetricsEnabled);
  }
  cfg.toggles.readability = true;
  try {
    evaluate_dataset(ds, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kMetricBackendMissing);
  }
}

TEST(EvaluateDataset, FailuresAreRecordedPerHint) {
  Dataset ds = stats_fixture();
  EvalConfig cfg;
  cfg.toggles = MetricToggles{false, true, false, false, false, false};
  cfg.backends.classifier = std::make_shared<ConstantClassifier>(7);
  const EvalResult r = evaluate_dataset(ds, cfg);
  EXPECT_EQ(r.report.failures, 50u);
  EXPECT_FALSE(r.report.readability.has_value());
  EXPECT_NE(r.per_hint[0].errors.at("readability").find("METRIC_BACKEND_ERROR"), std::string::npos);
}

TEST(EvaluateDataset, AllMetricsWriteBackAndResume) {
  testing::TempDir tmp("eval");
  Dataset ds = stats_fixture();
  EvalConfig cfg;
  cfg.backends.embedding = std::make_shared<HashingEmbedding>();
  cfg.backends.classifier = std::make_shared<LexicalReadability>();
  auto judge = std::make_shared<ScriptedJudge>([](const ChatPrompt& p, int n) -> std::vector<std::string> {
    if (p.user.rfind(prompts::kCandidatesPrefix, 0) == 0) return {"Paris\nLyon\nNice\n"};
    if (p.user.rfind(prompts::kConsistencyPrefix, 0) == 0) return {"yes"};
    return std::vector<std::string>(static_cast<size_t>(n), "Which place is it?");
  });
  cfg.backends.judge = judge;
  cfg.max_concurrency = 4;
  cfg.journal_path = tmp.file("journal.jsonl");
  const EvalResult first = evaluate_dataset(ds, cfg);
  EXPECT_EQ(first.report.failures, 0u);
  for (const auto& m : first.per_hint) {
    EXPECT_GE(*m.relevance, 0.0);
    EXPECT_LE(*m.relevance, 1.0);
    EXPECT_EQ(*m.convergence, 0.0);
    EXPECT_LE(*m.answer_leakage_avg, *m.answer_leakage_max);
  }
  EXPECT_TRUE(ds.items[0].hints[0].relevance.has_value());
  EXPECT_TRUE(ds.items[0].hints[0].answer_leakage.has_value());

  const size_t calls = judge->calls;
  Dataset again = stats_fixture();
  const EvalResult second = evaluate_dataset(again, cfg);
  EXPECT_EQ(judge->calls, calls);  // everything came from the journal
  EXPECT_EQ(second.per_hint, first.per_hint);
}

TEST(Aggregate, UnweightedMeans) {
  std::vector<HintMetrics> ms(3);
  ms[0].relevance = 0.2;
  ms[1].relevance = 0.4;
  ms[2].errors["relevance"] = "x";
  const MetricReport r = aggregate(ms);
  EXPECT_DOUBLE_EQ(*r.relevance, 0.3);
  EXPECT_EQ(r.failures, 1u);
  EXPECT_EQ(r.hints, 3u);
}

TEST(QualityTable, IncludesReference) {
  MetricReport r;
  r.length = 6.5;
  const std::string t = quality_table(r, "fixture", "all");
  EXPECT_NE(t.find("17.82"), std::string::npos);
  EXPECT_NE(t.find("6.50"), std::string::npos);
}

// Every metric stays in range for arbitrary inputs and backends.
TEST(MetricFuzz, OutputsInRange) {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> words = {"Paris", "river", "the", "of", "Seine", "tower", "1889",
                                          "x", "Ωmega", "naïve", "", "!!", "capital", "a"};
  auto phrase = [&](int max_len) {
    std::string s;
    const int n = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_len));
    for (int i = 0; i < n; ++i) s += words[rng() % words.size()] + (rng() % 5 == 0 ? ", " : " ");
    return s + ".";
  };
  for (int i = 0; i < 10000; ++i) {
    testing::RandomEmbedding e(1 + rng() % 16, rng());
    const std::string hint = phrase(12);
    const std::string answer = phrase(3);
    try {
      const Leakage l = answer_leakage(hint, answer, e, rng() % 2);
      ASSERT_GE(l.avg, 0.0);
      ASSERT_LE(l.max, 1.0);
      ASSERT_LE(l.avg, l.max + 1e-12);
    } catch (const Error& err) {
      ASSERT_EQ(err.code(), Errc::kNoTokens);
    }
    std::vector<EntityMention> es(rng() % 4);
    for (auto& x : es) {
      if (rng() % 2) x.normalized_views = static_cast<double>(rng() % 1000) / 999.0;
    }
    const double f = familiarity(es);
    ASSERT_GE(f, 0.0);
    ASSERT_LE(f, 1.0);
    if (i % 10 == 0) {
      ScriptedJudge j([&](const ChatPrompt&, int n) {
        std::vector<std::string> out;
        for (int k = 0; k < n; ++k) out.push_back(phrase(6));
        return out;
      });
      const double r = relevance(phrase(8), hint, j, e, 1 + static_cast<int>(rng() % 4));
      ASSERT_GE(r, 0.0);
      ASSERT_LE(r, 1.0);
    }
  }
}

}  // namespace
}  // namespace hintkit
