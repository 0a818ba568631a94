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

#ifndef HINTKIT_STUDY_HTTP_HPP_
#define HINTKIT_STUDY_HTTP_HPP_

// HTTP+JSON front of the study service.
//
//   POST /sessions                  {participant_id, split, reveal_order?, seed?}
//   GET  /sessions/{id}/current
//   POST /sessions/{id}/answer      {text}
//   POST /sessions/{id}/reveal
//   POST /sessions/{id}/skip
//   POST /sessions/{id}/override    facilitator adjudication
//   GET  /results?group_by=question_major|participant[&format=csv]
//
// Errors are {code, message}. Responses carry hints only after they are
// revealed and never carry gold answers.

#include <memory>
#include <string>

#include "httplib.h"
#include "hintkit/study.hpp"

namespace hintkit::study {

inline int http_status(Errc c) {
  switch (c) {
    case Errc::kSessionNotFound: return 404;
    case Errc::kSessionCompleted:
    case Errc::kSkipBeforeExhaustion: return 409;
    case Errc::kEmptyStore: return 404;
    case Errc::kIo: return 500;
    default: return 400;
  }
}

inline void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, Errc code, const std::string& message) {
  send_json(res, http_status(code), json{{"code", errc_name(code)}, {"message", message}});
}

// Wraps a handler so every hintkit::Error becomes a {code, message} body.
template <typename Fn>
auto guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.detail());
    } catch (const json::exception& e) {
      send_error(res, Errc::kParse, e.what());
    } catch (const std::exception& e) {
      send_json(res, 500, json{{"code", "INTERNAL"}, {"message", e.what()}});
    }
  };
}

inline json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body);
  if (!j.is_object()) throw Error(Errc::kParse, "request body must be a JSON object");
  return j;
}

// Registers the API routes on `server`. Static files (the participant UI) can
// be mounted separately with server.set_mount_point().
inline void register_routes(httplib::Server& server, std::shared_ptr<StudyService> svc,
                            std::string facilitator_token = "") {
  server.Post("/sessions", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    const json b = body_of(req);
    RevealConfig cfg;
    if (b.contains("reveal_order")) cfg.order = parse_reveal_order(b["reveal_order"].get<std::string>());
    if (b.contains("seed")) cfg.seed = b["seed"].get<uint64_t>();
    const std::string split = b.value("split", std::string("test"));
    send_json(res, 201, svc->create_session(b.value("participant_id", std::string()), split, cfg));
  }));

  server.Get(R"(/sessions/([^/]+)/current)",
             guarded([svc](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, svc->current(req.matches[1]));
             }));

  server.Post(R"(/sessions/([^/]+)/answer)",
              guarded([svc](const httplib::Request& req, httplib::Response& res) {
                const json b = body_of(req);
                if (!b.contains("text") || !b["text"].is_string()) {
                  throw Error(Errc::kInvalidArgument, "body needs a string 'text'");
                }
                auto [correct, view] = svc->submit_answer(req.matches[1], b["text"].get<std::string>());
                send_json(res, 200, json{{"verdict", correct ? "correct" : "incorrect"}, {"session", view}});
              }));

  server.Post(R"(/sessions/([^/]+)/reveal)",
              guarded([svc](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                const HintReveal r = svc->reveal_next_hint(id);
                send_json(res, 200, json{{"hint", r.hint ? json(*r.hint) : json(nullptr)},
                                         {"exhausted", r.exhausted},
                                         {"revealed_count", r.revealed_count},
                                         {"session", svc->current(id)}});
              }));

  server.Post(R"(/sessions/([^/]+)/skip)",
              guarded([svc](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, json{{"session", svc->skip_question(req.matches[1])}});
              }));

  server.Post(R"(/sessions/([^/]+)/override)",
              guarded([svc, facilitator_token](const httplib::Request& req, httplib::Response& res) {
                if (!facilitator_token.empty() &&
                    req.get_header_value("X-Facilitator-Token") != facilitator_token) {
                  send_json(res, 403, json{{"code", "FORBIDDEN"}, {"message", "facilitator token required"}});
                  return;
                }
                send_json(res, 200, json{{"session", svc->override_correct(req.matches[1])}});
              }));

  server.Get("/results", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    const std::string by = req.has_param("group_by") ? req.get_param_value("group_by") : "question_major";
    const auto groups = svc->aggregate_results(parse_group_by(by));
    if (req.get_param_value("format") == "csv") {
      res.status = 200;
      res.set_content(to_csv(groups), "text/csv");
      return;
    }
    send_json(res, 200, json{{"group_by", by}, {"groups", to_json(groups)}});
  }));
}

}  // namespace hintkit::study

#endif  // HINTKIT_STUDY_HTTP_HPP_
