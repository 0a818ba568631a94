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

#include "hintkit/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

namespace hintkit::cli {
namespace {

using testing::fixture;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun hk(std::vector<std::string> args) {
  args.insert(args.begin(), "hintkit");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

size_t lines(const std::string& s) { return static_cast<size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST(Cli, Usage) {
  EXPECT_EQ(hk({}).code, kUsage);
  EXPECT_EQ(hk({"frobnicate"}).code, kUsage);
  const CliRun r = hk({"stats"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("--dataset"), std::string::npos);
  EXPECT_EQ(hk({"rank", "--dataset", fixture("stats10.jsonl")}).code, kUsage);
  EXPECT_EQ(hk({"stats", "--dataset", fixture("stats10.jsonl"), "--format", "yaml"}).code, kUsage);
  EXPECT_EQ(hk({"--help"}).code, kOk);
}

TEST(Cli, IoFailure) {
  const CliRun r = hk({"stats", "--dataset", "/nonexistent/file.jsonl"});
  EXPECT_EQ(r.code, kFailure);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST(Cli, Stats) {
  const CliRun r = hk({"stats", "--dataset", fixture("stats10.jsonl")});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["hints"], 50);
  EXPECT_EQ(j["mean_hint_length_by_rank"]["5"], 8.5);
  const CliRun t = hk({"stats", "--dataset", fixture("stats10.jsonl"), "--format", "text"});
  EXPECT_NE(t.out.find("Average Length"), std::string::npos);
}

TEST(Cli, ValidateExitCodes) {
  const CliRun bad = hk({"validate", "--dataset", fixture("criteria.jsonl")});
  EXPECT_EQ(bad.code, kFindings) << bad.err;
  const json j = json::parse(bad.out);
  EXPECT_EQ(j["items"], 6);
  EXPECT_EQ(j["failed"], 5);
  const CliRun good = hk({"validate", "--dataset", fixture("stats10.jsonl"), "--backend-config",
                       fixture("oracle.json"), "--format", "text"});
  EXPECT_EQ(good.code, kOk) << good.out << good.err;
  EXPECT_NE(good.out.find("10 items, 0 with findings"), std::string::npos);
}

TEST(Cli, RankWithOracle) {
  const CliRun r = hk({"rank", "--dataset", fixture("stats10.jsonl"), "--backend-config", fixture("oracle.json")});
  ASSERT_EQ(r.code, kOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["accuracy"], 1.0);
  EXPECT_EQ(j["correlation"]["value"], 1.0);
  EXPECT_EQ(j["mode"], "answer_aware");
  EXPECT_EQ(j["results"].size(), 10u);
  const CliRun t = hk({"rank", "--dataset", fixture("stats10.jsonl"), "--backend-config",
                    fixture("oracle.json"), "--answer-agnostic", "--format", "text"});
  ASSERT_EQ(t.code, kOk) << t.err;
  EXPECT_NE(t.out.find("100.00"), std::string::npos) << t.out;
  EXPECT_EQ(hk({"rank", "--dataset", fixture("stats10.jsonl"), "--backend-config",
                fixture("oracle.json"), "--answer-aware", "--answer-agnostic"})
                .code,
            kUsage);
}

TEST(Cli, Exports) {
  const CliRun pairs = hk({"export-pairs", "--dataset", fixture("stats10.jsonl")});
  ASSERT_EQ(pairs.code, kOk) << pairs.err;
  EXPECT_EQ(lines(pairs.out), 200u);
  const CliRun sft = hk({"export-sft", "--dataset", fixture("stats10.jsonl"), "--without-answer"});
  ASSERT_EQ(sft.code, kOk) << sft.err;
  EXPECT_EQ(lines(sft.out), 50u);
  EXPECT_EQ(sft.out.find("The answer for the question"), std::string::npos);
}

TEST(Cli, OutFile) {
  testing::TempDir tmp("cli");
  const CliRun r = hk({"stats", "--dataset", fixture("stats10.jsonl"), "--out", tmp.file("s.json")});
  ASSERT_EQ(r.code, kOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(tmp.file("s.json"));
  EXPECT_EQ(json::parse(in)["items"], 10);
}

TEST(Cli, EvalAndGenerate) {
  testing::TempDir tmp("cli");
  const CliRun e = hk({"eval", "--dataset", fixture("stats10.jsonl"), "--backend-config", fixture("oracle.json"),
                    "--per-hint-out", tmp.file("per_hint.jsonl")});
  ASSERT_EQ(e.code, kOk) << e.err;
  const json j = json::parse(e.out);
  EXPECT_EQ(j["report"]["hints"], 50);
  EXPECT_EQ(j["report"]["length"], 6.5);
  EXPECT_EQ(j["failures"].size(), 0u) << j["failures"].dump();
  std::ifstream per(tmp.file("per_hint.jsonl"));
  std::string all((std::istreambuf_iterator<char>(per)), {});
  EXPECT_EQ(lines(all), 50u);

  const CliRun only = hk({"eval", "--dataset", fixture("stats10.jsonl"), "--backend-config",
                       fixture("oracle.json"), "--metrics", "length,familiarity"});
  ASSERT_EQ(only.code, kOk) << only.err;
  EXPECT_TRUE(json::parse(only.out)["report"]["relevance"].is_null());
  EXPECT_EQ(hk({"eval", "--dataset", fixture("stats10.jsonl"), "--backend-config", fixture("oracle.json"),
                "--metrics", "charm"})
                .code,
            kUsage);

  const CliRun g = hk({"generate", "--dataset", fixture("stats10.jsonl"), "--backend-config",
                    fixture("oracle.json"), "--mode", "vanilla_wa"});
  ASSERT_EQ(g.code, kOk) << g.err << g.out;
  EXPECT_EQ(lines(g.out), 10u);
}

TEST(Cli, RecordThenReplay) {
  testing::TempDir tmp("cli");
  const std::string cas = tmp.file("cassette.jsonl");
  const std::vector<std::string> base = {"rank", "--dataset", fixture("stats10.jsonl"), "--backend-config",
                                         fixture("length.json")};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return hk(a);
  };
  const CliRun rec = with({"--record", cas});
  ASSERT_EQ(rec.code, kOk) << rec.err;
  const CliRun rep = with({"--replay", cas});
  ASSERT_EQ(rep.code, kOk) << rep.err;
  EXPECT_EQ(rep.out, rec.out);
  const CliRun miss = hk({"rank", "--dataset", fixture("stats10.jsonl"), "--backend-config",
                       fixture("oracle.json"), "--replay", cas});
  EXPECT_EQ(miss.code, kFailure);
  EXPECT_NE(miss.err.find("REPLAY_MISS"), std::string::npos) << miss.err;
  EXPECT_EQ(with({"--record", cas, "--replay", cas}).code, kUsage);
}

TEST(Cli, StudyReport) {
  testing::TempDir tmp("cli");
  const Dataset ds = load_dataset(fixture("stats10.jsonl"), Split::kAll);
  {
    std::map<std::string, Dataset> splits{{"test", ds}};
    study::StudyService svc(splits, std::make_shared<study::DirectoryEventStore>(tmp.path()), [] { return 0; });
    const std::string id = svc.create_session("p1", "test")["session_id"];
    svc.submit_answer(id, "Paris");
    svc.submit_answer(id, "wrong");
    svc.reveal_next_hint(id);
    svc.submit_answer(id, "Everest");
  }
  const CliRun r = hk({"study", "report", "--dataset", fixture("stats10.jsonl"), "--log-dir", tmp.path().string(),
                    "--format", "csv"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out,
            "group,answered_no_hints,answered_with_hints,skipped,mean_hints_used\n"
            "GEOGRAPHY,1,1,0,1\n");
}

}  // namespace
}  // namespace hintkit::cli
