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

#ifndef HINTKIT_BACKENDS_HPP_
#define HINTKIT_BACKENDS_HPP_

// Model backend interfaces, the built-in offline backends, and interface-level
// record/replay ("cassettes").

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hintkit/error.hpp"
#include "hintkit/text.hpp"
#include "json.hpp"

namespace hintkit {

using json = nlohmann::json;
using Vector = std::vector<double>;

// Word/sentence embedding model. Same input yields the same vector within a
// run; all components finite.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual Vector embed(std::string_view text) const = 0;
  virtual std::string id() const = 0;
  // False when the backend must be called from one worker at a time.
  virtual bool concurrent_safe() const { return true; }
};

// Three-level readability classifier: 0 beginner, 1 intermediate, 2 advanced.
class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  virtual int classify_readability(std::string_view text) const = 0;
  virtual std::string id() const = 0;
  virtual bool concurrent_safe() const { return true; }
};

struct ChatPrompt {
  std::string system;
  std::string user;

  bool operator==(const ChatPrompt&) const = default;
};

// Text generator (an LLM behind some API). Returns at most n nonempty
// completions.
class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual std::vector<std::string> generate(const ChatPrompt& prompt, int n) const = 0;
  virtual std::string id() const = 0;
  virtual bool concurrent_safe() const { return true; }
};

// Input to a pairwise hint comparison. An absent answer means answer-agnostic.
struct PairInput {
  std::string question;
  std::optional<std::string> answer;
  std::string hint_a;
  std::string hint_b;

  bool operator==(const PairInput&) const = default;
};

// Probability that hint_a is the better hint. Hard classifiers return 0 or 1.
class PairBackend {
 public:
  virtual ~PairBackend() = default;
  virtual double score(const PairInput& input) const = 0;
  virtual std::string id() const = 0;
  virtual bool concurrent_safe() const { return true; }
};

inline json to_json(const PairInput& p) {
  json j = {{"question", p.question}, {"hint_a", p.hint_a}, {"hint_b", p.hint_b}};
  if (p.answer) j["answer"] = *p.answer;
  return j;
}

// Cosine similarity; zero when either vector has zero norm.
inline double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw Error(Errc::kMetricBackendError, "embedding dimensions differ (" +
                                               std::to_string(a.size()) + " vs " +
                                               std::to_string(b.size()) + ")");
  }
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0 || nb <= 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline double clamp01(double x) {
  if (std::isnan(x)) return 0.0;
  return std::clamp(x, 0.0, 1.0);
}

inline uint64_t fnv1a(std::string_view s, uint64_t seed = 1469598103934665603ULL) {
  uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Offline embedding: signed feature hashing of the folded word plus its
// character trigrams. Identical strings map to identical vectors; unrelated
// words are close to orthogonal.
class HashingEmbedding final : public EmbeddingBackend {
 public:
  explicit HashingEmbedding(size_t dim = 512) : dim_(dim) {}

  Vector embed(std::string_view input) const override {
    Vector v(dim_, 0.0);
    for (const auto& word : text::detail::split_ws(text::fold(input))) {
      add(v, "w:" + word, 1.0);
      const std::string padded = "<" + word + ">";
      if (padded.size() >= 3) {
        for (size_t i = 0; i + 3 <= padded.size(); ++i) add(v, padded.substr(i, 3), 0.5);
      }
    }
    return v;
  }
  std::string id() const override { return "hashing-" + std::to_string(dim_); }

 private:
  void add(Vector& v, const std::string& feature, double weight) const {
    const uint64_t h = fnv1a(feature);
    v[h % dim_] += (h >> 63) ? -weight : weight;
  }
  size_t dim_;
};

namespace detail {

inline int syllables(std::string_view word) {
  int count = 0;
  bool prev_vowel = false;
  for (char c : word) {
    const bool vowel = std::string_view("aeiouy").find(c) != std::string_view::npos;
    if (vowel && !prev_vowel) ++count;
    prev_vowel = vowel;
  }
  if (word.size() > 2 && word.back() == 'e' && count > 1) --count;
  return std::max(count, 1);
}

}  // namespace detail

// Offline readability classifier based on the Flesch-Kincaid grade level:
// grade < 8 is beginner, < 12 intermediate, otherwise advanced.
class LexicalReadability final : public ClassifierBackend {
 public:
  int classify_readability(std::string_view input) const override {
    const double g = grade(input);
    if (g < 8.0) return 0;
    if (g < 12.0) return 1;
    return 2;
  }
  std::string id() const override { return "lexical-fk"; }

  static double grade(std::string_view input) {
    const auto words = text::leakage_tokens(input);
    if (words.empty()) return 0.0;
    int sentences = 0;
    for (char c : input) {
      if (c == '.' || c == '!' || c == '?') ++sentences;
    }
    sentences = std::max(sentences, 1);
    int syl = 0;
    for (const auto& w : words) syl += detail::syllables(w);
    const double wps = static_cast<double>(words.size()) / sentences;
    const double spw = static_cast<double>(syl) / static_cast<double>(words.size());
    return 0.39 * wps + 11.8 * spw - 15.59;
  }
};

class ConstantClassifier final : public ClassifierBackend {
 public:
  explicit ConstantClassifier(int level) : level_(level) {}
  int classify_readability(std::string_view) const override { return level_; }
  std::string id() const override { return "constant-" + std::to_string(level_); }

 private:
  int level_;
};

// Recorded backend traffic, one JSON object per line:
//   {"kind": "embed", "request": {...}, "response": ...}
class Cassette {
 public:
  Cassette() = default;

  static std::shared_ptr<Cassette> open_for_replay(const std::string& path) {
    auto c = std::make_shared<Cassette>();
    std::ifstream in(path);
    if (!in) throw Error(Errc::kIo, "cannot open cassette '" + path + "'");
    std::string line;
    size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (text::trim(line).empty()) continue;
      try {
        json j = json::parse(line);
        c->entries_[key(j.at("kind").get<std::string>(), j.at("request"))] = j.at("response");
      } catch (const json::exception& e) {
        throw Error(Errc::kParse, path + ":" + std::to_string(n) + ": " + e.what());
      }
    }
    return c;
  }

  static std::shared_ptr<Cassette> open_for_record(const std::string& path) {
    auto c = std::make_shared<Cassette>();
    c->out_ = std::make_unique<std::ofstream>(path, std::ios::app);
    if (!*c->out_) throw Error(Errc::kIo, "cannot write cassette '" + path + "'");
    return c;
  }

  std::optional<json> find(std::string_view kind, const json& request) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key(kind, request));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  json lookup(std::string_view kind, const json& request) const {
    auto r = find(kind, request);
    if (!r) {
      throw Error(Errc::kReplayMiss, "no recorded " + std::string(kind) +
                                         " response for request " + request.dump());
    }
    return *r;
  }

  void record(std::string_view kind, const json& request, const json& response) {
    std::lock_guard lock(mu_);
    auto [it, inserted] = entries_.emplace(key(kind, request), response);
    if (!inserted || !out_) return;
    json line = {{"kind", kind}, {"request", request}, {"response", response}};
    *out_ << line.dump() << '\n';
    out_->flush();
  }

  size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  static std::string key(std::string_view kind, const json& request) {
    return std::string(kind) + "\n" + request.dump();
  }

  mutable std::mutex mu_;
  std::map<std::string, json> entries_;
  std::unique_ptr<std::ofstream> out_;
};

// Replay backends answer only from a cassette; record backends forward to an
// inner backend and append every exchange.

class ReplayEmbedding final : public EmbeddingBackend {
 public:
  ReplayEmbedding(std::shared_ptr<Cassette> c, std::string id)
      : cassette_(std::move(c)), id_(std::move(id)) {}
  Vector embed(std::string_view t) const override {
    return cassette_->lookup("embed", json{{"backend", id_}, {"text", t}}).get<Vector>();
  }
  std::string id() const override { return id_; }

 private:
  std::shared_ptr<Cassette> cassette_;
  std::string id_;
};

class RecordEmbedding final : public EmbeddingBackend {
 public:
  RecordEmbedding(std::shared_ptr<const EmbeddingBackend> inner, std::shared_ptr<Cassette> c)
      : inner_(std::move(inner)), cassette_(std::move(c)) {}
  Vector embed(std::string_view t) const override {
    Vector v = inner_->embed(t);
    cassette_->record("embed", json{{"backend", inner_->id()}, {"text", t}}, v);
    return v;
  }
  std::string id() const override { return inner_->id(); }
  bool concurrent_safe() const override { return inner_->concurrent_safe(); }

 private:
  std::shared_ptr<const EmbeddingBackend> inner_;
  std::shared_ptr<Cassette> cassette_;
};

class ReplayClassifier final : public ClassifierBackend {
 public:
  ReplayClassifier(std::shared_ptr<Cassette> c, std::string id)
      : cassette_(std::move(c)), id_(std::move(id)) {}
  int classify_readability(std::string_view t) const override {
    return cassette_->lookup("readability", json{{"backend", id_}, {"text", t}}).get<int>();
  }
  std::string id() const override { return id_; }

 private:
  std::shared_ptr<Cassette> cassette_;
  std::string id_;
};

class RecordClassifier final : public ClassifierBackend {
 public:
  RecordClassifier(std::shared_ptr<const ClassifierBackend> inner, std::shared_ptr<Cassette> c)
      : inner_(std::move(inner)), cassette_(std::move(c)) {}
  int classify_readability(std::string_view t) const override {
    int level = inner_->classify_readability(t);
    cassette_->record("readability", json{{"backend", inner_->id()}, {"text", t}}, level);
    return level;
  }
  std::string id() const override { return inner_->id(); }
  bool concurrent_safe() const override { return inner_->concurrent_safe(); }

 private:
  std::shared_ptr<const ClassifierBackend> inner_;
  std::shared_ptr<Cassette> cassette_;
};

inline json judge_request(const std::string& backend, const ChatPrompt& p, int n) {
  return json{{"backend", backend}, {"system", p.system}, {"user", p.user}, {"n", n}};
}

class ReplayJudge final : public JudgeBackend {
 public:
  ReplayJudge(std::shared_ptr<Cassette> c, std::string id)
      : cassette_(std::move(c)), id_(std::move(id)) {}
  std::vector<std::string> generate(const ChatPrompt& p, int n) const override {
    return cassette_->lookup("generate", judge_request(id_, p, n)).get<std::vector<std::string>>();
  }
  std::string id() const override { return id_; }

 private:
  std::shared_ptr<Cassette> cassette_;
  std::string id_;
};

class RecordJudge final : public JudgeBackend {
 public:
  RecordJudge(std::shared_ptr<const JudgeBackend> inner, std::shared_ptr<Cassette> c)
      : inner_(std::move(inner)), cassette_(std::move(c)) {}
  std::vector<std::string> generate(const ChatPrompt& p, int n) const override {
    auto out = inner_->generate(p, n);
    cassette_->record("generate", judge_request(inner_->id(), p, n), out);
    return out;
  }
  std::string id() const override { return inner_->id(); }
  bool concurrent_safe() const override { return inner_->concurrent_safe(); }

 private:
  std::shared_ptr<const JudgeBackend> inner_;
  std::shared_ptr<Cassette> cassette_;
};

class ReplayPair final : public PairBackend {
 public:
  ReplayPair(std::shared_ptr<Cassette> c, std::string id)
      : cassette_(std::move(c)), id_(std::move(id)) {}
  double score(const PairInput& p) const override {
    json req = to_json(p);
    req["backend"] = id_;
    return cassette_->lookup("pair", req).get<double>();
  }
  std::string id() const override { return id_; }

 private:
  std::shared_ptr<Cassette> cassette_;
  std::string id_;
};

class RecordPair final : public PairBackend {
 public:
  RecordPair(std::shared_ptr<const PairBackend> inner, std::shared_ptr<Cassette> c)
      : inner_(std::move(inner)), cassette_(std::move(c)) {}
  double score(const PairInput& p) const override {
    double s = inner_->score(p);
    json req = to_json(p);
    req["backend"] = inner_->id();
    cassette_->record("pair", req, s);
    return s;
  }
  std::string id() const override { return inner_->id(); }
  bool concurrent_safe() const override { return inner_->concurrent_safe(); }

 private:
  std::shared_ptr<const PairBackend> inner_;
  std::shared_ptr<Cassette> cassette_;
};

}  // namespace hintkit

#endif  // HINTKIT_BACKENDS_HPP_
