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

#ifndef HINTKIT_DATA_HPP_
#define HINTKIT_DATA_HPP_

// Domain model for hint datasets and its JSON Lines encoding.
//
// One QAItem per line:
//   {"id": ..., "question": {"question": ..., "major": ..., "minor": ...,
//    "entities": [...], ...}, "answer": {"answer": ..., ...},
//    "hints": [{"hint": ..., "source": ..., "rank": 1, ...}, ...]}
// Entities use the keys entity, ent_type, start_index, end_index,
// wikipedia_page_title, wiki_views_per_month and normalized_views. Keys the
// model does not know are kept in `extra` and written back unchanged.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "hintkit/error.hpp"
#include "hintkit/text.hpp"
#include "json.hpp"

namespace hintkit {

using json = nlohmann::json;

inline constexpr int kHintsPerItem = 5;

struct EntityMention {
  std::string surface;
  std::string ent_type;
  int64_t start_index = 0;
  int64_t end_index = 0;
  std::optional<std::string> wikipedia_page_title;
  std::optional<int64_t> wiki_views_per_month;
  std::optional<double> normalized_views;
  json extra = json::object();

  bool operator==(const EntityMention&) const = default;
};

enum class QuestionSource { kChatGpt, kSquad2, kNq, kOther };

struct Question {
  std::string text;
  std::string major;
  std::string minor;
  std::vector<EntityMention> entities;
  std::optional<double> readability;
  std::optional<double> familiarity;
  std::optional<double> difficulty;
  std::optional<QuestionSource> source;
  json extra = json::object();

  bool operator==(const Question&) const = default;
};

struct Answer {
  std::string text;
  std::vector<EntityMention> entities;
  std::optional<double> familiarity;
  std::optional<double> difficulty;
  std::vector<std::string> aliases;
  json extra = json::object();

  bool operator==(const Answer&) const = default;
};

struct Hint {
  std::string text;
  std::optional<std::string> source;
  std::vector<EntityMention> entities;
  std::optional<double> relevance;
  std::optional<double> readability;
  std::optional<double> convergence;
  std::optional<double> familiarity;
  std::optional<double> answer_leakage;
  int rank = 0;
  json extra = json::object();

  bool operator==(const Hint&) const = default;
};

struct QAItem {
  std::string id;
  Question question;
  Answer answer;
  std::vector<Hint> hints;
  json extra = json::object();

  bool operator==(const QAItem&) const = default;
};

enum class Split { kTrain, kTest, kAll };

struct Dataset {
  Split split = Split::kAll;
  std::vector<QAItem> items;

  size_t hint_count() const {
    size_t n = 0;
    for (const auto& it : items) n += it.hints.size();
    return n;
  }
  const QAItem* find(std::string_view id) const {
    for (const auto& it : items) {
      if (it.id == id) return &it;
    }
    return nullptr;
  }
};

// Difficulty bands for question/answer difficulty scores.
enum class DifficultyBand { kEasy, kMedium, kHard };

inline DifficultyBand difficulty_band(double d) {
  if (d < 0.33) return DifficultyBand::kEasy;
  if (d <= 0.66) return DifficultyBand::kMedium;
  return DifficultyBand::kHard;
}

inline std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    case Split::kAll: return "all";
  }
  return "all";
}

inline Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  if (s == "all") return Split::kAll;
  throw Error(Errc::kUnknownSplit, "unknown split '" + std::string(s) + "'");
}

inline std::string_view source_name(QuestionSource s) {
  switch (s) {
    case QuestionSource::kChatGpt: return "chatgpt";
    case QuestionSource::kSquad2: return "squad2";
    case QuestionSource::kNq: return "nq";
    case QuestionSource::kOther: return "other";
  }
  return "other";
}

// A single finding about an item. `hint_index` is absent for item-level
// findings.
struct Violation {
  std::string code;
  std::optional<int> hint_index;
  std::string message;

  bool operator==(const Violation&) const = default;
};

namespace detail {

class FieldReader {
 public:
  FieldReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(std::string_view key, std::string_view what) const {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + std::string(key);
    throw Error(Errc::kSchema, where + ": " + std::string(what));
  }

  std::string str(std::string_view key) {
    auto it = take(key);
    if (it == obj_.end()) fail(key, "missing required field");
    if (!it->is_string()) fail(key, "expected a string");
    return it->get<std::string>();
  }
  std::optional<std::string> opt_str(std::string_view key) {
    auto it = take(key);
    if (it == obj_.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(key, "expected a string");
    return it->get<std::string>();
  }
  int64_t integer(std::string_view key) {
    auto it = take(key);
    if (it == obj_.end()) fail(key, "missing required field");
    return as_int(key, *it);
  }
  std::optional<int64_t> opt_int(std::string_view key) {
    auto it = take(key);
    if (it == obj_.end() || it->is_null()) return std::nullopt;
    return as_int(key, *it);
  }
  std::optional<double> opt_real(std::string_view key) {
    auto it = take(key);
    if (it == obj_.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) fail(key, "expected a number");
    return it->get<double>();
  }
  const json* array(std::string_view key, bool required) {
    auto it = take(key);
    if (it == obj_.end()) {
      if (required) fail(key, "missing required field");
      return nullptr;
    }
    if (!it->is_array()) fail(key, "expected an array");
    return &*it;
  }
  const json* object(std::string_view key) {
    auto it = take(key);
    if (it == obj_.end()) fail(key, "missing required field");
    if (!it->is_object()) fail(key, "expected an object");
    return &*it;
  }

  // Everything not consumed so far.
  json rest() const {
    json out = json::object();
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) out[it.key()] = it.value();
    }
    return out;
  }

  const std::string& path() const { return path_; }

 private:
  json::const_iterator take(std::string_view key) {
    seen_.insert(std::string(key));
    return obj_.find(std::string(key));
  }
  int64_t as_int(std::string_view key, const json& v) const {
    if (v.is_number_integer()) return v.get<int64_t>();
    if (v.is_number_float()) {
      double d = v.get<double>();
      if (d == static_cast<double>(static_cast<int64_t>(d))) return static_cast<int64_t>(d);
    }
    fail(key, "expected an integer");
  }

  const json& obj_;
  std::string path_;
  std::unordered_set<std::string> seen_;
};

inline EntityMention entity_from_json(const json& j, const std::string& path) {
  FieldReader r(j, path);
  EntityMention e;
  e.surface = r.str("entity");
  e.ent_type = r.str("ent_type");
  e.start_index = r.integer("start_index");
  e.end_index = r.integer("end_index");
  e.wikipedia_page_title = r.opt_str("wikipedia_page_title");
  e.wiki_views_per_month = r.opt_int("wiki_views_per_month");
  e.normalized_views = r.opt_real("normalized_views");
  e.extra = r.rest();
  return e;
}

inline std::vector<EntityMention> entities_from(FieldReader& r) {
  std::vector<EntityMention> out;
  if (const json* arr = r.array("entities", false)) {
    for (size_t i = 0; i < arr->size(); ++i) {
      out.push_back(entity_from_json((*arr)[i],
                                     r.path() + ".entities[" + std::to_string(i) + "]"));
    }
  }
  return out;
}

inline QuestionSource parse_source(const std::string& s, const FieldReader& r) {
  if (s == "chatgpt") return QuestionSource::kChatGpt;
  if (s == "squad2") return QuestionSource::kSquad2;
  if (s == "nq") return QuestionSource::kNq;
  if (s == "other") return QuestionSource::kOther;
  r.fail("source", "unknown question source '" + s + "'");
}

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

inline void merge_extra(json& j, const json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
}

}  // namespace detail

inline json to_json(const EntityMention& e) {
  json j = json::object();
  detail::merge_extra(j, e.extra);
  j["entity"] = e.surface;
  j["ent_type"] = e.ent_type;
  j["start_index"] = e.start_index;
  j["end_index"] = e.end_index;
  detail::put_opt(j, "wikipedia_page_title", e.wikipedia_page_title);
  detail::put_opt(j, "wiki_views_per_month", e.wiki_views_per_month);
  detail::put_opt(j, "normalized_views", e.normalized_views);
  return j;
}

inline json to_json(const std::vector<EntityMention>& es) {
  json arr = json::array();
  for (const auto& e : es) arr.push_back(to_json(e));
  return arr;
}

inline json to_json(const Hint& h) {
  json j = json::object();
  detail::merge_extra(j, h.extra);
  j["hint"] = h.text;
  detail::put_opt(j, "source", h.source);
  j["entities"] = to_json(h.entities);
  detail::put_opt(j, "relevance", h.relevance);
  detail::put_opt(j, "readability", h.readability);
  detail::put_opt(j, "convergence", h.convergence);
  detail::put_opt(j, "familiarity", h.familiarity);
  detail::put_opt(j, "answer_leakage", h.answer_leakage);
  j["rank"] = h.rank;
  return j;
}

inline json to_json(const QAItem& item) {
  json q = json::object();
  detail::merge_extra(q, item.question.extra);
  q["question"] = item.question.text;
  q["major"] = item.question.major;
  q["minor"] = item.question.minor;
  q["entities"] = to_json(item.question.entities);
  detail::put_opt(q, "readability", item.question.readability);
  detail::put_opt(q, "familiarity", item.question.familiarity);
  detail::put_opt(q, "difficulty", item.question.difficulty);
  if (item.question.source) q["source"] = source_name(*item.question.source);

  json a = json::object();
  detail::merge_extra(a, item.answer.extra);
  a["answer"] = item.answer.text;
  a["entities"] = to_json(item.answer.entities);
  detail::put_opt(a, "familiarity", item.answer.familiarity);
  detail::put_opt(a, "difficulty", item.answer.difficulty);
  a["aliases"] = item.answer.aliases;

  json hints = json::array();
  for (const auto& h : item.hints) hints.push_back(to_json(h));

  json j = json::object();
  detail::merge_extra(j, item.extra);
  j["id"] = item.id;
  j["question"] = std::move(q);
  j["answer"] = std::move(a);
  j["hints"] = std::move(hints);
  return j;
}

// Structural decoding only: types and required keys. Invariants are checked by
// check_item().
inline QAItem item_from_json(const json& j) {
  std::string id_hint = "<unknown>";
  if (j.is_object() && j.contains("id") && j["id"].is_string()) {
    id_hint = j["id"].get<std::string>();
  }
  const std::string root = "item " + id_hint;
  detail::FieldReader r(j, root);
  QAItem item;
  item.id = r.str("id");

  {
    detail::FieldReader q(*r.object("question"), root + ": question");
    item.question.text = q.str("question");
    item.question.major = q.str("major");
    item.question.minor = q.str("minor");
    item.question.entities = detail::entities_from(q);
    item.question.readability = q.opt_real("readability");
    item.question.familiarity = q.opt_real("familiarity");
    item.question.difficulty = q.opt_real("difficulty");
    if (auto s = q.opt_str("source")) item.question.source = detail::parse_source(*s, q);
    item.question.extra = q.rest();
  }
  {
    detail::FieldReader a(*r.object("answer"), root + ": answer");
    item.answer.text = a.str("answer");
    item.answer.entities = detail::entities_from(a);
    item.answer.familiarity = a.opt_real("familiarity");
    item.answer.difficulty = a.opt_real("difficulty");
    if (const json* arr = a.array("aliases", false)) {
      for (size_t i = 0; i < arr->size(); ++i) {
        if (!(*arr)[i].is_string()) a.fail("aliases[" + std::to_string(i) + "]", "expected a string");
        item.answer.aliases.push_back((*arr)[i].get<std::string>());
      }
    }
    item.answer.extra = a.rest();
  }
  const json* hints = r.array("hints", true);
  for (size_t i = 0; i < hints->size(); ++i) {
    detail::FieldReader h((*hints)[i], root + ": hints[" + std::to_string(i) + "]");
    Hint hint;
    hint.text = h.str("hint");
    hint.source = h.opt_str("source");
    hint.entities = detail::entities_from(h);
    hint.relevance = h.opt_real("relevance");
    hint.readability = h.opt_real("readability");
    hint.convergence = h.opt_real("convergence");
    hint.familiarity = h.opt_real("familiarity");
    hint.answer_leakage = h.opt_real("answer_leakage");
    hint.rank = static_cast<int>(h.integer("rank"));
    hint.extra = h.rest();
    item.hints.push_back(std::move(hint));
  }
  item.extra = r.rest();
  return item;
}

namespace detail {

inline void check_range(std::vector<Violation>& out, const std::optional<double>& v,
                        double lo, double hi, std::string field,
                        std::optional<int> hint_index) {
  if (v && !(*v >= lo && *v <= hi)) {
    std::ostringstream msg;
    msg << field << " = " << *v << " outside [" << lo << ", " << hi << "]";
    out.push_back({"RANGE", hint_index, msg.str()});
  }
}

inline void check_entities(std::vector<Violation>& out,
                           const std::vector<EntityMention>& es,
                           std::string_view host, const std::string& where,
                           std::optional<int> hint_index) {
  const auto len = static_cast<int64_t>(text::codepoint_length(host));
  for (size_t i = 0; i < es.size(); ++i) {
    const auto& e = es[i];
    const std::string path = where + ".entities[" + std::to_string(i) + "]";
    if (e.start_index < 0 || e.end_index <= e.start_index || e.end_index > len) {
      out.push_back({"ENTITY_SPAN", hint_index,
                     path + ": span [" + std::to_string(e.start_index) + ", " +
                         std::to_string(e.end_index) + ") not within text of length " +
                         std::to_string(len)});
    }
    if (e.wiki_views_per_month && *e.wiki_views_per_month < 0) {
      out.push_back({"RANGE", hint_index, path + ".wiki_views_per_month is negative"});
    }
    check_range(out, e.normalized_views, 0.0, 1.0, path + ".normalized_views", hint_index);
  }
}

}  // namespace detail

// Type invariants of a QAItem (field ranges, spans, hint count, rank
// permutation). An empty result means the item is well-formed.
inline std::vector<Violation> check_item(const QAItem& item) {
  std::vector<Violation> out;
  if (text::trim(item.question.text).empty()) {
    out.push_back({"EMPTY_TEXT", std::nullopt, "question: text is empty"});
  }
  if (text::trim(item.answer.text).empty()) {
    out.push_back({"EMPTY_TEXT", std::nullopt, "answer: text is empty"});
  }
  detail::check_range(out, item.question.familiarity, 0, 1, "question.familiarity", std::nullopt);
  detail::check_range(out, item.question.difficulty, 0, 1, "question.difficulty", std::nullopt);
  detail::check_range(out, item.answer.familiarity, 0, 1, "answer.familiarity", std::nullopt);
  detail::check_range(out, item.answer.difficulty, 0, 1, "answer.difficulty", std::nullopt);
  detail::check_entities(out, item.question.entities, item.question.text, "question", std::nullopt);
  detail::check_entities(out, item.answer.entities, item.answer.text, "answer", std::nullopt);
  {
    std::set<std::string> seen;
    for (const auto& a : item.answer.aliases) {
      if (!seen.insert(text::normalize_answer(a)).second) {
        out.push_back({"DUPLICATE_ALIAS", std::nullopt, "answer.aliases: duplicate alias '" + a + "'"});
      }
    }
  }

  if (item.hints.size() != static_cast<size_t>(kHintsPerItem)) {
    out.push_back({"HINT_COUNT", std::nullopt,
                   "hints: expected " + std::to_string(kHintsPerItem) + " hints, found " +
                       std::to_string(item.hints.size())});
  }
  std::map<int, int> rank_seen;
  for (size_t i = 0; i < item.hints.size(); ++i) {
    const auto& h = item.hints[i];
    const int idx = static_cast<int>(i);
    const std::string path = "hints[" + std::to_string(i) + "]";
    if (h.rank < 1 || h.rank > static_cast<int>(item.hints.size()) || h.rank > kHintsPerItem) {
      out.push_back({"RANK_RANGE", idx, path + ".rank = " + std::to_string(h.rank) +
                                            " outside 1.." + std::to_string(kHintsPerItem)});
    } else if (rank_seen.count(h.rank)) {
      out.push_back({"DUPLICATE_RANK", idx,
                     path + ".rank: rank " + std::to_string(h.rank) + " duplicated (also hints[" +
                         std::to_string(rank_seen[h.rank]) + "])"});
    } else {
      rank_seen[h.rank] = idx;
    }
    detail::check_range(out, h.relevance, 0, 1, path + ".relevance", idx);
    detail::check_range(out, h.readability, 0, 2, path + ".readability", idx);
    detail::check_range(out, h.convergence, 0, 1, path + ".convergence", idx);
    detail::check_range(out, h.familiarity, 0, 1, path + ".familiarity", idx);
    detail::check_range(out, h.answer_leakage, 0, 1, path + ".answer_leakage", idx);
    detail::check_entities(out, h.entities, h.text, path, idx);
  }
  return out;
}

struct LoadOptions {
  // Reject items that break type invariants. Validation tooling turns this off
  // so it can report every problem instead of stopping at the first.
  bool enforce_invariants = true;
};

// Reads a JSON Lines dataset. Items carrying a "split" key are filtered by
// `split` unless it is kAll.
inline Dataset read_dataset(std::istream& in, Split split, const LoadOptions& opts = {},
                            const std::string& origin = "<stream>") {
  Dataset ds;
  ds.split = split;
  std::unordered_set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::kParse, origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    QAItem item;
    try {
      item = item_from_json(j);
    } catch (const Error& e) {
      throw Error(e.code(), origin + ":" + std::to_string(line_no) + ": " + e.detail());
    }
    if (split != Split::kAll) {
      auto it = item.extra.find("split");
      if (it != item.extra.end() && it->is_string() &&
          it->get<std::string>() != split_name(split)) {
        continue;
      }
    }
    if (opts.enforce_invariants) {
      auto problems = check_item(item);
      if (!problems.empty()) {
        throw Error(Errc::kSchema, origin + ":" + std::to_string(line_no) + ": item " +
                                       item.id + ": " + problems.front().message);
      }
    }
    if (!ids.insert(item.id).second) {
      throw Error(Errc::kSchema, origin + ":" + std::to_string(line_no) +
                                     ": duplicate item id '" + item.id + "'");
    }
    ds.items.push_back(std::move(item));
  }
  return ds;
}

inline Dataset load_dataset(const std::string& path, Split split, const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open dataset '" + path + "'");
  return read_dataset(in, split, opts, path);
}

inline void write_dataset(std::ostream& out, const Dataset& ds) {
  for (const auto& item : ds.items) out << to_json(item).dump() << '\n';
}

inline void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::kIo, "cannot write dataset '" + path + "'");
  write_dataset(out, ds);
}

}  // namespace hintkit

#endif  // HINTKIT_DATA_HPP_
