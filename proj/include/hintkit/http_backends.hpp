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

#ifndef HINTKIT_HTTP_BACKENDS_HPP_
#define HINTKIT_HTTP_BACKENDS_HPP_

// Backends served over HTTP. The judge and embedding clients speak the
// OpenAI-compatible chat/embeddings API; the classifier and pair clients post
// {"text": ...} and read a single number back.

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>

#include "httplib.h"
#include "hintkit/backends.hpp"
#include "hintkit/hintrank.hpp"

namespace hintkit {

struct HttpOptions {
  std::string endpoint;  // full URL, e.g. http://localhost:8000/v1/chat/completions
  std::string model;
  double timeout_s = 60;
  int retries = 2;
  int max_concurrency = 4;
  // Name of the environment variable holding a bearer token, if any.
  std::string api_key_env;
};

namespace detail {

inline std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(Errc::kConfig, "endpoint '" + url + "' has no scheme");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

inline json post_json(const HttpOptions& opts, const json& body) {
  const auto [base, path] = split_url(opts.endpoint);
  httplib::Headers headers;
  if (!opts.api_key_env.empty()) {
    if (const char* key = std::getenv(opts.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  std::string last_error;
  for (int attempt = 0; attempt <= opts.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250 << (attempt - 1)));
    httplib::Client client(base);
    const auto secs = static_cast<time_t>(opts.timeout_s);
    const auto usecs = static_cast<time_t>((opts.timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500 || res->status == 429) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(Errc::kBackendError, opts.endpoint + " returned HTTP " + std::to_string(res->status) +
                                           ": " + res->body.substr(0, 200));
    }
    try {
      return json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw Error(Errc::kBackendError, opts.endpoint + " returned invalid JSON: " + e.what());
    }
  }
  throw Error(Errc::kBackendError, opts.endpoint + " failed after " +
                                       std::to_string(opts.retries + 1) + " attempts: " + last_error);
}

}  // namespace detail

class HttpJudge final : public JudgeBackend {
 public:
  explicit HttpJudge(HttpOptions opts) : opts_(std::move(opts)) {}
  std::vector<std::string> generate(const ChatPrompt& p, int n) const override {
    json messages = json::array();
    if (!p.system.empty()) messages.push_back({{"role", "system"}, {"content", p.system}});
    messages.push_back({{"role", "user"}, {"content", p.user}});
    // temperature 0 unless n > 1 asks for distinct samples.
    json body = {{"model", opts_.model}, {"messages", messages}, {"n", n},
                 {"temperature", n > 1 ? 0.7 : 0.0}};
    const json res = detail::post_json(opts_, body);
    std::vector<std::string> out;
    for (const auto& c : res.value("choices", json::array())) {
      const std::string content = c.value("message", json::object()).value("content", std::string());
      if (!text::trim(content).empty()) out.push_back(content);
    }
    if (out.size() > static_cast<size_t>(n)) out.resize(static_cast<size_t>(n));
    return out;
  }
  std::string id() const override { return "http:" + opts_.model; }

 private:
  HttpOptions opts_;
};

class HttpEmbedding final : public EmbeddingBackend {
 public:
  explicit HttpEmbedding(HttpOptions opts) : opts_(std::move(opts)) {}
  Vector embed(std::string_view t) const override {
    const json res = detail::post_json(opts_, json{{"model", opts_.model}, {"input", t}});
    try {
      Vector v = res.at("data").at(0).at("embedding").get<Vector>();
      for (double x : v) {
        if (!std::isfinite(x)) throw Error(Errc::kBackendError, "non-finite embedding component");
      }
      return v;
    } catch (const json::exception& e) {
      throw Error(Errc::kBackendError, "unexpected embeddings response: " + std::string(e.what()));
    }
  }
  std::string id() const override { return "http:" + opts_.model; }

 private:
  HttpOptions opts_;
};

// POST {"text": t} -> {"level": 0|1|2}
class HttpClassifier final : public ClassifierBackend {
 public:
  explicit HttpClassifier(HttpOptions opts) : opts_(std::move(opts)) {}
  int classify_readability(std::string_view t) const override {
    const json res = detail::post_json(opts_, json{{"model", opts_.model}, {"text", t}});
    if (!res.contains("level") || !res["level"].is_number_integer()) {
      throw Error(Errc::kBackendError, "classifier response lacks an integer 'level'");
    }
    return res["level"].get<int>();
  }
  std::string id() const override { return "http:" + opts_.model; }

 private:
  HttpOptions opts_;
};

// POST {"text": encode_pair(p, separator), "question", "answer"?, "hint_1",
// "hint_2"} -> {"score": p}
class HttpPair final : public PairBackend {
 public:
  HttpPair(HttpOptions opts, std::string separator)
      : opts_(std::move(opts)), separator_(std::move(separator)) {}
  double score(const PairInput& p) const override {
    json body = {{"model", opts_.model},
                 {"text", encode_pair(p, separator_)},
                 {"question", p.question},
                 {"hint_1", p.hint_a},
                 {"hint_2", p.hint_b}};
    if (p.answer) body["answer"] = *p.answer;
    const json res = detail::post_json(opts_, body);
    if (!res.contains("score") || !res["score"].is_number()) {
      throw Error(Errc::kBackendError, "pair classifier response lacks a numeric 'score'");
    }
    return res["score"].get<double>();
  }
  std::string id() const override { return "http:" + opts_.model; }

 private:
  HttpOptions opts_;
  std::string separator_;
};

}  // namespace hintkit

#endif  // HINTKIT_HTTP_BACKENDS_HPP_
