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

#ifndef HINTKIT_STUDY_HPP_
#define HINTKIT_STUDY_HPP_

// Human hint study. A participant first answers each question without hints;
// after a wrong attempt they may reveal hints one at a time and keep
// answering; once all five are shown they may skip. Sessions are
// event-sourced: commands validate against the current state, append an
// event, and state is always the fold of the event log.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "hintkit/backends.hpp"
#include "hintkit/data.hpp"
#include "hintkit/error.hpp"
#include "hintkit/text.hpp"

namespace hintkit::study {

enum class Phase { kNoHints, kHinting, kDone };
enum class OutcomeKind { kCorrectNoHints, kCorrectWithHints, kSkipped };
enum class RevealOrder { kGoldRankAsc, kDatasetOrder, kRandom };

inline std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::kNoHints: return "no_hints";
    case Phase::kHinting: return "hinting";
    case Phase::kDone: return "done";
  }
  return "done";
}

inline std::string_view outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::kCorrectNoHints: return "correct_no_hints";
    case OutcomeKind::kCorrectWithHints: return "correct_with_hints";
    case OutcomeKind::kSkipped: return "skipped";
  }
  return "skipped";
}

inline std::string_view reveal_order_name(RevealOrder o) {
  switch (o) {
    case RevealOrder::kGoldRankAsc: return "gold_rank_asc";
    case RevealOrder::kDatasetOrder: return "dataset_order";
    case RevealOrder::kRandom: return "random";
  }
  return "dataset_order";
}

inline RevealOrder parse_reveal_order(std::string_view s) {
  for (auto o : {RevealOrder::kGoldRankAsc, RevealOrder::kDatasetOrder, RevealOrder::kRandom}) {
    if (s == reveal_order_name(o)) return o;
  }
  throw Error(Errc::kInvalidArgument, "unknown reveal order '" + std::string(s) + "'");
}

struct Attempt {
  std::string item_id;
  std::string text;
  int64_t timestamp = 0;
  bool correct = false;

  bool operator==(const Attempt&) const = default;
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::kSkipped;
  int hints_used = 0;
  // Attempts made on the question; a skipped question may have none.
  int attempts_count = 0;

  bool operator==(const Outcome&) const = default;
};

struct RevealConfig {
  RevealOrder order = RevealOrder::kDatasetOrder;
  uint64_t seed = 0;
};

struct StudySession {
  std::string session_id;
  std::string participant_id;
  std::string split;
  RevealConfig reveal;
  std::vector<std::string> question_queue;
  // Per queued question: hint indices in reveal order.
  std::vector<std::vector<int>> hint_orders;
  size_t position = 0;
  Phase phase = Phase::kNoHints;
  int revealed_count = 0;
  std::vector<Attempt> attempts;
  std::map<std::string, Outcome> outcomes;

  bool completed() const { return position >= question_queue.size(); }
  const std::string* current() const {
    return completed() ? nullptr : &question_queue[position];
  }
  int current_attempts() const {
    const std::string* id = current();
    if (id == nullptr) return 0;
    int n = 0;
    for (const auto& a : attempts) {
      if (a.item_id == *id) ++n;
    }
    return n;
  }
};

// Event types: created, answer, reveal, skip, override.
using Event = json;

namespace detail {

inline void advance(StudySession& s) {
  ++s.position;
  s.revealed_count = 0;
  s.phase = s.completed() ? Phase::kDone : Phase::kNoHints;
}

inline void finish(StudySession& s, OutcomeKind kind) {
  Outcome o;
  o.kind = kind;
  o.hints_used = kind == OutcomeKind::kCorrectNoHints ? 0 : s.revealed_count;
  o.attempts_count = s.current_attempts();
  s.outcomes[*s.current()] = o;
  advance(s);
}

}  // namespace detail

// Folds one event into the session. Events are trusted: they were validated
// by the command that produced them.
inline void apply(StudySession& s, const Event& e) {
  const std::string type = e.at("type").get<std::string>();
  if (type == "created") {
    s = StudySession{};
    s.session_id = e.at("session_id").get<std::string>();
    s.participant_id = e.at("participant_id").get<std::string>();
    s.split = e.at("split").get<std::string>();
    s.reveal.order = parse_reveal_order(e.at("reveal_order").get<std::string>());
    s.reveal.seed = e.at("seed").get<uint64_t>();
    s.question_queue = e.at("queue").get<std::vector<std::string>>();
    s.hint_orders = e.at("hint_orders").get<std::vector<std::vector<int>>>();
    s.phase = s.question_queue.empty() ? Phase::kDone : Phase::kNoHints;
    return;
  }
  if (s.completed()) throw Error(Errc::kSessionCompleted, "event after completion");
  if (type == "answer") {
    const bool correct = e.at("verdict").get<std::string>() == "correct";
    s.attempts.push_back({*s.current(), e.at("text").get<std::string>(), e.at("ts").get<int64_t>(), correct});
    if (correct) {
      detail::finish(s, s.phase == Phase::kNoHints ? OutcomeKind::kCorrectNoHints
                                                   : OutcomeKind::kCorrectWithHints);
    }
  } else if (type == "reveal") {
    s.revealed_count += 1;
    s.phase = Phase::kHinting;
  } else if (type == "skip") {
    detail::finish(s, OutcomeKind::kSkipped);
  } else if (type == "override") {
    // Manual adjudication: the latest attempt is accepted as correct.
    if (!s.attempts.empty()) s.attempts.back().correct = true;
    detail::finish(s, s.phase == Phase::kNoHints ? OutcomeKind::kCorrectNoHints
                                                 : OutcomeKind::kCorrectWithHints);
  } else {
    throw Error(Errc::kParse, "unknown event type '" + type + "'");
  }
}

inline StudySession replay(const std::vector<Event>& events) {
  StudySession s;
  for (const auto& e : events) apply(s, e);
  return s;
}

inline json to_json(const Outcome& o) {
  return json{{"kind", outcome_name(o.kind)},
              {"hints_used", o.hints_used},
              {"attempts_count", o.attempts_count}};
}

// Full snapshot, including gold-free protocol state. Deterministic key order.
inline json snapshot(const StudySession& s) {
  json attempts = json::array();
  for (const auto& a : s.attempts) {
    attempts.push_back({{"item_id", a.item_id}, {"text", a.text}, {"ts", a.timestamp},
                        {"verdict", a.correct ? "correct" : "incorrect"}});
  }
  json outcomes = json::object();
  for (const auto& [id, o] : s.outcomes) outcomes[id] = to_json(o);
  return json{{"session_id", s.session_id},
              {"participant_id", s.participant_id},
              {"split", s.split},
              {"reveal_order", reveal_order_name(s.reveal.order)},
              {"seed", s.reveal.seed},
              {"question_queue", s.question_queue},
              {"hint_orders", s.hint_orders},
              {"position", s.position},
              {"current", s.current() ? json(*s.current()) : json(nullptr)},
              {"phase", phase_name(s.phase)},
              {"revealed_count", s.revealed_count},
              {"attempts", attempts},
              {"outcomes", outcomes}};
}

// ---------------------------------------------------------------------------
// Persistence.

class EventStore {
 public:
  virtual ~EventStore() = default;
  virtual void append(const std::string& session_id, const Event& e) = 0;
  virtual std::map<std::string, std::vector<Event>> load_all() const = 0;
  // Called after each append with the derived state.
  virtual void write_snapshot(const std::string&, const json&) {}
};

class MemoryEventStore final : public EventStore {
 public:
  void append(const std::string& id, const Event& e) override {
    std::lock_guard lock(mu_);
    logs_[id].push_back(e);
  }
  std::map<std::string, std::vector<Event>> load_all() const override {
    std::lock_guard lock(mu_);
    return logs_;
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<Event>> logs_;
};

// <dir>/<session_id>.events.jsonl (append-only) and
// <dir>/<session_id>.snapshot.json (rewritten after each event).
class DirectoryEventStore final : public EventStore {
 public:
  explicit DirectoryEventStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(Errc::kIo, "cannot create " + dir_.string() + ": " + ec.message());
  }

  void append(const std::string& id, const Event& e) override {
    std::ofstream out(dir_ / (id + ".events.jsonl"), std::ios::app);
    if (!out) throw Error(Errc::kIo, "cannot append to log of session " + id);
    out << e.dump() << '\n';
  }

  void write_snapshot(const std::string& id, const json& snap) override {
    const auto tmp = dir_ / (id + ".snapshot.json.tmp");
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) return;
      out << snap.dump(2) << '\n';
    }
    std::error_code ec;
    std::filesystem::rename(tmp, dir_ / (id + ".snapshot.json"), ec);
  }

  std::map<std::string, std::vector<Event>> load_all() const override {
    std::map<std::string, std::vector<Event>> out;
    constexpr std::string_view kSuffix = ".events.jsonl";
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
      const std::string name = entry.path().filename().string();
      if (name.size() <= kSuffix.size() ||
          name.compare(name.size() - kSuffix.size(), kSuffix.size(), kSuffix) != 0) {
        continue;
      }
      const std::string id = name.substr(0, name.size() - kSuffix.size());
      std::ifstream in(entry.path());
      std::string line;
      while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        try {
          out[id].push_back(json::parse(line));
        } catch (const json::parse_error&) {
          break;  // torn tail from a crash; earlier events stand
        }
      }
    }
    return out;
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// ---------------------------------------------------------------------------
// Service.

struct HintReveal {
  std::optional<std::string> hint;  // empty when exhausted
  bool exhausted = false;
  int revealed_count = 0;
};

struct GroupCounts {
  size_t answered_no_hints = 0;
  size_t answered_with_hints = 0;
  size_t skipped = 0;
  double mean_hints_used = 0;  // over with-hints outcomes

  size_t total() const { return answered_no_hints + answered_with_hints + skipped; }
};

enum class GroupBy { kQuestionMajor, kParticipant };

inline GroupBy parse_group_by(std::string_view s) {
  if (s == "question_major" || s == "major") return GroupBy::kQuestionMajor;
  if (s == "participant") return GroupBy::kParticipant;
  throw Error(Errc::kInvalidArgument, "unknown group_by '" + std::string(s) + "'");
}

using Clock = std::function<int64_t()>;

inline int64_t wall_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace detail {

inline std::vector<int> reveal_sequence(const QAItem& item, const RevealConfig& cfg) {
  std::vector<int> order(item.hints.size());
  std::iota(order.begin(), order.end(), 0);
  switch (cfg.order) {
    case RevealOrder::kDatasetOrder:
      break;
    case RevealOrder::kGoldRankAsc:
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return item.hints[a].rank < item.hints[b].rank; });
      break;
    case RevealOrder::kRandom: {
      std::seed_seq seq{static_cast<uint32_t>(cfg.seed), static_cast<uint32_t>(cfg.seed >> 32),
                        static_cast<uint32_t>(fnv1a(item.id))};
      std::mt19937_64 rng(seq);
      // Fisher-Yates with plain modulo so the order is identical across
      // standard library implementations.
      for (size_t i = order.size(); i > 1; --i) {
        const size_t j = rng() % i;
        std::swap(order[i - 1], order[j]);
      }
      break;
    }
  }
  return order;
}

}  // namespace detail

class StudyService {
 public:
  // `datasets` maps split name to its items. The event log in `store` is
  // replayed on construction.
  StudyService(std::map<std::string, Dataset> datasets, std::shared_ptr<EventStore> store,
               Clock clock = wall_clock_ms)
      : datasets_(std::move(datasets)), store_(std::move(store)), clock_(std::move(clock)) {
    for (const auto& [id, events] : store_->load_all()) {
      auto entry = std::make_shared<Entry>();
      entry->state = replay(events);
      sessions_[id] = std::move(entry);
    }
  }

  json create_session(const std::string& participant_id, const std::string& split,
                      const RevealConfig& reveal = {}) {
    if (text::trim(participant_id).empty()) {
      throw Error(Errc::kInvalidArgument, "participant id is empty");
    }
    auto ds = datasets_.find(split);
    if (ds == datasets_.end()) throw Error(Errc::kUnknownSplit, "unknown split '" + split + "'");
    json queue = json::array();
    json orders = json::array();
    for (const auto& item : ds->second.items) {
      queue.push_back(item.id);
      orders.push_back(detail::reveal_sequence(item, reveal));
    }
    std::unique_lock lock(map_mu_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06zu", sessions_.size() + 1);
    std::string id = buf;
    while (sessions_.count(id)) id += "x";
    Event e = {{"type", "created"},       {"session_id", id},
               {"participant_id", participant_id}, {"split", split},
               {"reveal_order", reveal_order_name(reveal.order)},
               {"seed", reveal.seed},     {"queue", queue},
               {"hint_orders", orders},   {"ts", clock_()}};
    auto entry = std::make_shared<Entry>();
    std::lock_guard elock(entry->mu);
    sessions_[id] = entry;
    lock.unlock();
    commit(id, *entry, e);
    return view(entry->state);
  }

  // Verdict plus the participant-facing view after the transition.
  std::pair<bool, json> submit_answer(const std::string& id, const std::string& attempt) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    const StudySession& s = entry->state;
    if (s.completed()) throw Error(Errc::kSessionCompleted, "session " + id + " is completed");
    if (text::trim(attempt).empty()) throw Error(Errc::kInvalidArgument, "empty answer");
    const QAItem& item = current_item(s);
    const bool correct = text::matches_answer(attempt, item.answer.text, item.answer.aliases);
    commit(id, *entry, {{"type", "answer"}, {"text", attempt},
                        {"verdict", correct ? "correct" : "incorrect"}, {"ts", clock_()}});
    return {correct, view(entry->state)};
  }

  HintReveal reveal_next_hint(const std::string& id) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    const StudySession& s = entry->state;
    if (s.completed()) throw Error(Errc::kSessionCompleted, "session " + id + " is completed");
    HintReveal out;
    const QAItem& item = current_item(s);
    const int limit = std::min<int>(kHintsPerItem, static_cast<int>(item.hints.size()));
    if (s.revealed_count >= limit) {
      out.exhausted = true;
      out.revealed_count = s.revealed_count;
      return out;
    }
    commit(id, *entry, {{"type", "reveal"}, {"ts", clock_()}});
    const StudySession& now = entry->state;
    const int hint_index = now.hint_orders[now.position][now.revealed_count - 1];
    out.hint = item.hints[static_cast<size_t>(hint_index)].text;
    out.revealed_count = now.revealed_count;
    return out;
  }

  json skip_question(const std::string& id) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    const StudySession& s = entry->state;
    if (s.completed()) throw Error(Errc::kSessionCompleted, "session " + id + " is completed");
    const int limit = std::min<int>(kHintsPerItem, static_cast<int>(current_item(s).hints.size()));
    if (s.revealed_count < limit) {
      throw Error(Errc::kSkipBeforeExhaustion, "skip allowed only after all " +
                                                   std::to_string(limit) + " hints are revealed");
    }
    commit(id, *entry, {{"type", "skip"}, {"ts", clock_()}});
    return view(entry->state);
  }

  // Facilitator adjudication of the latest attempt as correct.
  json override_correct(const std::string& id) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    const StudySession& s = entry->state;
    if (s.completed()) throw Error(Errc::kSessionCompleted, "session " + id + " is completed");
    if (s.current_attempts() == 0) {
      throw Error(Errc::kInvalidArgument, "no attempt to adjudicate on the current question");
    }
    commit(id, *entry, {{"type", "override"}, {"ts", clock_()}});
    return view(entry->state);
  }

  json current(const std::string& id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    return view(entry->state);
  }

  StudySession state(const std::string& id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    return entry->state;
  }

  std::vector<std::string> session_ids() const {
    std::shared_lock lock(map_mu_);
    std::vector<std::string> out;
    for (const auto& [id, e] : sessions_) out.push_back(id);
    return out;
  }

  std::map<std::string, GroupCounts> aggregate_results(GroupBy by) const {
    std::vector<StudySession> states;
    {
      std::shared_lock lock(map_mu_);
      for (const auto& [id, e] : sessions_) {
        std::lock_guard elock(e->mu);
        states.push_back(e->state);
      }
    }
    return aggregate(states, by, [&](const std::string& item_id) { return major_of(item_id); });
  }

  // Groups outcomes; `major_of` maps an item id to its question category.
  static std::map<std::string, GroupCounts> aggregate(
      const std::vector<StudySession>& sessions, GroupBy by,
      const std::function<std::string(const std::string&)>& major_of) {
    std::map<std::string, GroupCounts> out;
    std::map<std::string, size_t> hints_sum;
    size_t total = 0;
    for (const auto& s : sessions) {
      for (const auto& [item_id, o] : s.outcomes) {
        const std::string key = by == GroupBy::kParticipant ? s.participant_id : major_of(item_id);
        auto& g = out[key];
        ++total;
        switch (o.kind) {
          case OutcomeKind::kCorrectNoHints: ++g.answered_no_hints; break;
          case OutcomeKind::kCorrectWithHints:
            ++g.answered_with_hints;
            hints_sum[key] += static_cast<size_t>(o.hints_used);
            break;
          case OutcomeKind::kSkipped: ++g.skipped; break;
        }
      }
    }
    if (total == 0) throw Error(Errc::kEmptyStore, "no completed question outcomes");
    for (auto& [key, g] : out) {
      if (g.answered_with_hints > 0) {
        g.mean_hints_used =
            static_cast<double>(hints_sum[key]) / static_cast<double>(g.answered_with_hints);
      }
    }
    return out;
  }

  std::string major_of(const std::string& item_id) const {
    for (const auto& [split, ds] : datasets_) {
      if (const QAItem* it = ds.find(item_id)) return it->question.major;
    }
    return "UNKNOWN";
  }

 private:
  struct Entry {
    mutable std::mutex mu;
    StudySession state;
  };

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(map_mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(Errc::kSessionNotFound, "no session '" + id + "'");
    return it->second;
  }

  const QAItem& current_item(const StudySession& s) const {
    auto ds = datasets_.find(s.split);
    const QAItem* item = ds == datasets_.end() ? nullptr : ds->second.find(*s.current());
    if (item == nullptr) {
      throw Error(Errc::kInvalidArgument, "item '" + *s.current() + "' is not loaded");
    }
    return *item;
  }

  // Caller holds entry.mu.
  void commit(const std::string& id, Entry& entry, const Event& e) {
    StudySession next = entry.state;
    apply(next, e);
    store_->append(id, e);
    entry.state = std::move(next);
    store_->write_snapshot(id, snapshot(entry.state));
  }

  // Participant-facing view: revealed hints only, never the answer.
  json view(const StudySession& s) const {
    json v = {{"session_id", s.session_id},
              {"participant_id", s.participant_id},
              {"phase", phase_name(s.phase)},
              {"done", s.completed()},
              {"question_index", s.position},
              {"total_questions", s.question_queue.size()},
              {"revealed_count", s.revealed_count}};
    int no_hints = 0, with_hints = 0, skipped = 0;
    for (const auto& [id, o] : s.outcomes) {
      if (o.kind == OutcomeKind::kCorrectNoHints) ++no_hints;
      if (o.kind == OutcomeKind::kCorrectWithHints) ++with_hints;
      if (o.kind == OutcomeKind::kSkipped) ++skipped;
    }
    json summary = {{"answered_no_hints", no_hints},
                    {"answered_with_hints", with_hints},
                    {"skipped", skipped}};
    v["summary"] = summary;
    if (s.completed()) {
      v["question"] = nullptr;
      v["hints"] = json::array();
      v["attempts"] = json::array();
      v["can_skip"] = false;
      v["can_reveal"] = false;
      return v;
    }
    const QAItem& item = current_item(s);
    v["item_id"] = item.id;
    v["question"] = item.question.text;
    json hints = json::array();
    for (int k = 0; k < s.revealed_count; ++k) {
      hints.push_back(item.hints[static_cast<size_t>(s.hint_orders[s.position][k])].text);
    }
    v["hints"] = hints;
    json attempts = json::array();
    for (const auto& a : s.attempts) {
      if (a.item_id == item.id) {
        attempts.push_back({{"text", a.text}, {"verdict", a.correct ? "correct" : "incorrect"}});
      }
    }
    v["attempts"] = attempts;
    const int limit = std::min<int>(kHintsPerItem, static_cast<int>(item.hints.size()));
    v["can_reveal"] = s.revealed_count < limit;
    v["can_skip"] = s.revealed_count >= limit;
    return v;
  }

  std::map<std::string, Dataset> datasets_;
  std::shared_ptr<EventStore> store_;
  Clock clock_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

inline json to_json(const std::map<std::string, GroupCounts>& groups) {
  json out = json::object();
  for (const auto& [k, g] : groups) {
    out[k] = {{"answered_no_hints", g.answered_no_hints},
              {"answered_with_hints", g.answered_with_hints},
              {"skipped", g.skipped},
              {"mean_hints_used", g.mean_hints_used}};
  }
  return out;
}

inline std::string to_csv(const std::map<std::string, GroupCounts>& groups) {
  std::ostringstream os;
  os << "group,answered_no_hints,answered_with_hints,skipped,mean_hints_used\n";
  for (const auto& [k, g] : groups) {
    os << k << ',' << g.answered_no_hints << ',' << g.answered_with_hints << ',' << g.skipped
       << ',' << g.mean_hints_used << '\n';
  }
  return os.str();
}

}  // namespace hintkit::study

#endif  // HINTKIT_STUDY_HPP_
