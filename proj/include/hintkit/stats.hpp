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

#ifndef HINTKIT_STATS_HPP_
#define HINTKIT_STATS_HPP_

#include <cstdint>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "hintkit/data.hpp"

namespace hintkit {

struct StatsReport {
  size_t items = 0;
  size_t hints = 0;
  double mean_question_length = 0;
  double mean_hint_length = 0;
  double mean_entities_per_question = 0;
  double mean_entities_per_hint = 0;
  // Keyed by gold rank.
  std::map<int, double> mean_hint_length_by_rank;
};

// Lengths are whitespace-delimited word counts (text::word_count). Sums are accumulated as
// integers, so the result does not depend on item or hint order.
inline StatsReport dataset_statistics(const Dataset& ds) {
  if (ds.items.empty()) throw Error(Errc::kEmptyDataset, "dataset has no items");
  uint64_t q_words = 0, h_words = 0, q_ents = 0, h_ents = 0;
  std::map<int, std::pair<uint64_t, uint64_t>> by_rank;  // rank -> (words, count)
  StatsReport r;
  for (const auto& item : ds.items) {
    q_words += text::word_count(item.question.text);
    q_ents += item.question.entities.size();
    for (const auto& h : item.hints) {
      const auto w = text::word_count(h.text);
      h_words += w;
      h_ents += h.entities.size();
      auto& slot = by_rank[h.rank];
      slot.first += w;
      slot.second += 1;
      ++r.hints;
    }
  }
  r.items = ds.items.size();
  const auto ni = static_cast<double>(r.items);
  r.mean_question_length = static_cast<double>(q_words) / ni;
  r.mean_entities_per_question = static_cast<double>(q_ents) / ni;
  if (r.hints > 0) {
    const auto nh = static_cast<double>(r.hints);
    r.mean_hint_length = static_cast<double>(h_words) / nh;
    r.mean_entities_per_hint = static_cast<double>(h_ents) / nh;
  }
  for (const auto& [rank, wc] : by_rank) {
    r.mean_hint_length_by_rank[rank] =
        static_cast<double>(wc.first) / static_cast<double>(wc.second);
  }
  return r;
}

inline json to_json(const StatsReport& r) {
  json by_rank = json::object();
  for (const auto& [rank, v] : r.mean_hint_length_by_rank) by_rank[std::to_string(rank)] = v;
  return json{{"items", r.items},
              {"hints", r.hints},
              {"mean_question_length", r.mean_question_length},
              {"mean_hint_length", r.mean_hint_length},
              {"mean_entities_per_question", r.mean_entities_per_question},
              {"mean_entities_per_hint", r.mean_entities_per_hint},
              {"mean_hint_length_by_rank", by_rank}};
}

inline std::string to_text(const StatsReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "Number of hints              " << r.hints << '\n'
     << "Number of questions          " << r.items << '\n'
     << "Avg. question length (words) " << r.mean_question_length << '\n'
     << "Avg. hint length (words)     " << r.mean_hint_length << '\n'
     << "Avg. #entities / question    " << r.mean_entities_per_question << '\n'
     << "Avg. #entities / hint        " << r.mean_entities_per_hint << '\n'
     << "\nRank            ";
  for (const auto& [rank, v] : r.mean_hint_length_by_rank) os << std::setw(8) << rank;
  os << "\nAverage Length  ";
  for (const auto& [rank, v] : r.mean_hint_length_by_rank) os << std::setw(8) << v;
  os << '\n';
  return os.str();
}

}  // namespace hintkit

#endif  // HINTKIT_STATS_HPP_
