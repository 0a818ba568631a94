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

#ifndef HINTKIT_CONFIG_HPP_
#define HINTKIT_CONFIG_HPP_

// Backend configuration file.
//
//   {
//     "embedding":  {"kind": "hashing", "dim": 512},
//     "classifier": {"kind": "lexical"},
//     "judge":      {"kind": "http", "endpoint": "http://localhost:8000/v1/chat/completions",
//                    "model": "llama-3.1-8b", "timeout_s": 60, "retries": 2,
//                    "max_concurrency": 4, "api_key_env": "OPENAI_API_KEY"},
//     "pair":       {"kind": "oracle"},
//     "cassette":   {"mode": "replay", "path": "runs/cassette.jsonl"}
//   }
//
// Kinds: embedding {hashing, http}; classifier {lexical, constant, http};
// judge {lexical, http}; pair {oracle, anti_oracle, length, judge, http}.
// "cassette" wraps every configured backend for record or replay. Relative
// paths resolve against the config file's directory.

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include "hintkit/backends.hpp"
#include "hintkit/data.hpp"
#include "hintkit/hintrank.hpp"
#include "hintkit/http_backends.hpp"
#include "hintkit/lexical_judge.hpp"

namespace hintkit {

enum class CassetteMode { kOff, kRecord, kReplay };

struct CassetteSpec {
  CassetteMode mode = CassetteMode::kOff;
  std::string path;
};

struct BackendBundle {
  std::shared_ptr<const EmbeddingBackend> embedding;
  std::shared_ptr<const ClassifierBackend> classifier;
  std::shared_ptr<const JudgeBackend> judge;
  std::shared_ptr<const PairBackend> pair;
  size_t max_concurrency = 1;
};

inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open backend config '" + path + "'");
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw Error(Errc::kConfig, path + ": expected a JSON object");
    j["__dir"] = std::filesystem::absolute(path).parent_path().string();
    return j;
  } catch (const json::parse_error& e) {
    throw Error(Errc::kParse, path + ": " + e.what());
  }
}

namespace detail {

inline std::string resolve(const json& cfg, const std::string& p) {
  if (p.empty() || std::filesystem::path(p).is_absolute() || !cfg.contains("__dir")) return p;
  return (std::filesystem::path(cfg["__dir"].get<std::string>()) / p).string();
}

inline HttpOptions http_options(const json& entry, const char* section) {
  HttpOptions o;
  if (!entry.contains("endpoint")) {
    throw Error(Errc::kConfig, std::string(section) + ": http backend needs 'endpoint'");
  }
  o.endpoint = entry["endpoint"].get<std::string>();
  o.model = entry.value("model", std::string("default"));
  o.timeout_s = entry.value("timeout_s", 60.0);
  o.retries = entry.value("retries", 2);
  o.max_concurrency = entry.value("max_concurrency", 4);
  o.api_key_env = entry.value("api_key_env", std::string());
  return o;
}

inline std::string kind_of(const json& entry, const char* section) {
  if (!entry.is_object() || !entry.contains("kind") || !entry["kind"].is_string()) {
    throw Error(Errc::kConfig, std::string(section) + ": missing 'kind'");
  }
  return entry["kind"].get<std::string>();
}

[[noreturn]] inline void unknown_kind(const char* section, const std::string& kind) {
  throw Error(Errc::kConfig, std::string(section) + ": unknown kind '" + kind + "'");
}

}  // namespace detail

// Builds the configured backends. `data` feeds the oracle pair backends and
// the lexical judge's candidate pool; `override_cassette` (from the command
// line) wins over the file's "cassette" block.
inline BackendBundle make_backends(const json& cfg, const Dataset* data,
                                   const std::optional<CassetteSpec>& override_cassette = std::nullopt) {
  BackendBundle b;
  b.max_concurrency = cfg.value("max_concurrency", size_t{1});
  static const Dataset kEmpty;
  const Dataset& pool = data ? *data : kEmpty;

  if (cfg.contains("embedding")) {
    const json& s = cfg["embedding"];
    const std::string kind = detail::kind_of(s, "embedding");
    if (kind == "hashing") {
      b.embedding = std::make_shared<HashingEmbedding>(s.value("dim", size_t{512}));
    } else if (kind == "http") {
      b.embedding = std::make_shared<HttpEmbedding>(detail::http_options(s, "embedding"));
    } else {
      detail::unknown_kind("embedding", kind);
    }
  }
  if (cfg.contains("classifier")) {
    const json& s = cfg["classifier"];
    const std::string kind = detail::kind_of(s, "classifier");
    if (kind == "lexical") {
      b.classifier = std::make_shared<LexicalReadability>();
    } else if (kind == "constant") {
      b.classifier = std::make_shared<ConstantClassifier>(s.value("level", 1));
    } else if (kind == "http") {
      b.classifier = std::make_shared<HttpClassifier>(detail::http_options(s, "classifier"));
    } else {
      detail::unknown_kind("classifier", kind);
    }
  }
  if (cfg.contains("judge")) {
    const json& s = cfg["judge"];
    const std::string kind = detail::kind_of(s, "judge");
    if (kind == "lexical") {
      b.judge = std::make_shared<LexicalJudge>(pool);
    } else if (kind == "http") {
      b.judge = std::make_shared<HttpJudge>(detail::http_options(s, "judge"));
    } else {
      detail::unknown_kind("judge", kind);
    }
  }
  if (cfg.contains("pair")) {
    const json& s = cfg["pair"];
    const std::string kind = detail::kind_of(s, "pair");
    if (kind == "oracle" || kind == "anti_oracle") {
      if (data == nullptr) throw Error(Errc::kConfig, "pair: oracle backends need a dataset");
      b.pair = std::make_shared<GoldRankBackend>(*data, kind == "anti_oracle");
    } else if (kind == "length") {
      b.pair = std::make_shared<LengthPreferenceBackend>(s.value("scale", 2.0));
    } else if (kind == "judge") {
      if (!b.judge) throw Error(Errc::kConfig, "pair: kind 'judge' needs a 'judge' section");
      b.pair = std::make_shared<JudgePairBackend>(b.judge, s.value("retries", 1));
    } else if (kind == "http") {
      b.pair = std::make_shared<HttpPair>(detail::http_options(s, "pair"),
                                          s.value("separator", std::string(" [SEP] ")));
    } else {
      detail::unknown_kind("pair", kind);
    }
  }

  CassetteSpec cassette;
  if (override_cassette) {
    cassette = *override_cassette;
  } else if (cfg.contains("cassette")) {
    const json& c = cfg["cassette"];
    const std::string mode = c.value("mode", std::string("off"));
    if (mode == "record") {
      cassette.mode = CassetteMode::kRecord;
    } else if (mode == "replay") {
      cassette.mode = CassetteMode::kReplay;
    } else if (mode != "off") {
      throw Error(Errc::kConfig, "cassette: unknown mode '" + mode + "'");
    }
    cassette.path = detail::resolve(cfg, c.value("path", std::string()));
  }
  if (cassette.mode == CassetteMode::kOff) return b;
  if (cassette.path.empty()) throw Error(Errc::kConfig, "cassette: missing 'path'");

  if (cassette.mode == CassetteMode::kReplay) {
    auto c = Cassette::open_for_replay(cassette.path);
    if (b.embedding) b.embedding = std::make_shared<ReplayEmbedding>(c, b.embedding->id());
    if (b.classifier) b.classifier = std::make_shared<ReplayClassifier>(c, b.classifier->id());
    if (b.judge) b.judge = std::make_shared<ReplayJudge>(c, b.judge->id());
    if (b.pair) b.pair = std::make_shared<ReplayPair>(c, b.pair->id());
  } else {
    auto c = Cassette::open_for_record(cassette.path);
    if (b.embedding) b.embedding = std::make_shared<RecordEmbedding>(b.embedding, c);
    if (b.classifier) b.classifier = std::make_shared<RecordClassifier>(b.classifier, c);
    if (b.judge) b.judge = std::make_shared<RecordJudge>(b.judge, c);
    if (b.pair) b.pair = std::make_shared<RecordPair>(b.pair, c);
  }
  return b;
}

}  // namespace hintkit

#endif  // HINTKIT_CONFIG_HPP_
