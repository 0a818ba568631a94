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

#ifndef HINTKIT_TEXT_HPP_
#define HINTKIT_TEXT_HPP_

// Unicode-aware text utilities shared by validation, metrics, generation
// guards and the study service. All functions are pure.

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace hintkit::text {

namespace detail {

inline icu::UnicodeString nfkc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(status);
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  if (U_FAILURE(status)) return in;
  icu::UnicodeString out = norm->normalize(in, status);
  return U_FAILURE(status) ? in : out;
}

enum class PunctMode { kRemove, kSpace };

// Drops (or blanks) punctuation and collapses every whitespace run into one
// ASCII space. Leading/trailing whitespace is trimmed.
inline std::string squash(const icu::UnicodeString& us, PunctMode mode) {
  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < us.length();) {
    UChar32 c = us.char32At(i);
    i += U16_LENGTH(c);
    bool space = u_isUWhiteSpace(c);
    if (u_ispunct(c)) {
      if (mode == PunctMode::kRemove) continue;
      space = true;
    }
    if (space) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.isEmpty()) out.append(UChar32{' '});
    pending_space = false;
    out.append(c);
  }
  std::string utf8;
  out.toUTF8String(utf8);
  return utf8;
}

inline bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_ws(s[i])) ++i;
    size_t j = i;
    while (j < s.size() && !is_ws(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

// NFKC, lowercase, punctuation to spaces, collapsed whitespace.
inline std::string fold(std::string_view s) {
  icu::UnicodeString us = detail::nfkc(s);
  us.toLower(icu::Locale::getRoot());
  return detail::squash(us, detail::PunctMode::kSpace);
}

// Normal form used for exact-answer matching: fold() plus removal of one
// leading article (a/an/the).
inline std::string normalize_answer(std::string_view s) {
  std::string f = fold(s);
  for (std::string_view article : {"a ", "an ", "the "}) {
    if (f.size() > article.size() && f.compare(0, article.size(), article) == 0) {
      return f.substr(article.size());
    }
  }
  return f;
}

// Punctuation removed, then split on whitespace. Case is kept.
inline std::vector<std::string> word_tokens(std::string_view s) {
  return detail::split_ws(
      detail::squash(detail::nfkc(s), detail::PunctMode::kRemove));
}

// Length in whitespace-delimited tokens, as used by statistics and the
// length metric.
inline size_t word_count(std::string_view s) { return detail::split_ws(s).size(); }

inline const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "a",     "about", "above", "after", "again", "against", "all",   "am",
      "an",    "and",   "any",   "are",   "as",    "at",      "be",    "because",
      "been",  "before", "being", "below", "between", "both", "but",   "by",
      "can",   "could", "did",   "do",    "does",  "doing",   "down",  "during",
      "each",  "few",   "for",   "from",  "further", "had",   "has",   "have",
      "having", "he",   "her",   "here",  "hers",  "herself", "him",   "himself",
      "his",   "how",   "i",     "if",    "in",    "into",    "is",    "it",
      "its",   "itself", "just", "me",    "more",  "most",    "my",    "myself",
      "no",    "nor",   "not",   "now",   "of",    "off",     "on",    "once",
      "only",  "or",    "other", "our",   "ours",  "out",     "over",  "own",
      "same",  "she",   "should", "so",   "some",  "such",    "than",  "that",
      "the",   "their", "theirs", "them", "then",  "there",   "these", "they",
      "this",  "those", "through", "to",  "too",   "under",   "until", "up",
      "very",  "was",   "we",    "were",  "what",  "when",    "where", "which",
      "while", "who",   "whom",  "whose", "why",   "will",    "with",  "would",
      "you",   "your",  "yours", "s",     "t",     "also"};
  return kWords;
}

// Lowercased, punctuation-free tokens; the unit of the leakage metric.
inline std::vector<std::string> leakage_tokens(std::string_view s,
                                               bool drop_stopwords = false) {
  icu::UnicodeString us = detail::nfkc(s);
  us.toLower(icu::Locale::getRoot());
  auto tokens =
      detail::split_ws(detail::squash(us, detail::PunctMode::kRemove));
  if (drop_stopwords) {
    const auto& sw = stopwords();
    std::erase_if(tokens, [&](const std::string& t) { return sw.count(t) > 0; });
  }
  return tokens;
}

// Token-boundary containment over two already normalized strings.
inline bool contains_phrase(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return false;
  std::string h = " " + std::string(haystack) + " ";
  std::string n = " " + std::string(needle) + " ";
  return h.find(n) != std::string::npos;
}

// True when `text` mentions the answer (or one of its aliases) verbatim after
// normalization.
inline bool mentions_answer(std::string_view text, std::string_view answer,
                            const std::vector<std::string>& aliases = {}) {
  const std::string t = fold(text);
  if (contains_phrase(t, normalize_answer(answer))) return true;
  return std::any_of(aliases.begin(), aliases.end(), [&](const std::string& a) {
    return contains_phrase(t, normalize_answer(a));
  });
}

// Exact normalized equality against an answer and its aliases.
inline bool matches_answer(std::string_view attempt, std::string_view answer,
                           const std::vector<std::string>& aliases = {}) {
  const std::string a = normalize_answer(attempt);
  if (a.empty()) return false;
  if (a == normalize_answer(answer)) return true;
  return std::any_of(aliases.begin(), aliases.end(),
                     [&](const std::string& x) { return a == normalize_answer(x); });
}

// Optional part-of-speech capability used by the sentence heuristic.
class FiniteVerbTagger {
 public:
  virtual ~FiniteVerbTagger() = default;
  virtual bool has_finite_verb(std::string_view sentence) const = 0;
};

inline bool ends_with_terminal_punctuation(std::string_view s) {
  size_t end = s.size();
  auto is_trailing = [](char c) {
    return c == ' ' || c == '"' || c == '\'' || c == ')' || c == ']' ||
           c == '\n' || c == '\t' || c == '\r';
  };
  while (end > 0 && is_trailing(s[end - 1])) --end;
  // UTF-8 closing quotes (U+201D, U+2019).
  while (end >= 3 && static_cast<unsigned char>(s[end - 3]) == 0xE2 &&
         static_cast<unsigned char>(s[end - 2]) == 0x80 &&
         (static_cast<unsigned char>(s[end - 1]) == 0x9D ||
          static_cast<unsigned char>(s[end - 1]) == 0x99)) {
    end -= 3;
    while (end > 0 && is_trailing(s[end - 1])) --end;
  }
  if (end == 0) return false;
  char last = s[end - 1];
  return last == '.' || last == '!' || last == '?';
}

// At least three word tokens, and either terminal punctuation or a finite
// verb according to `tagger` when one is configured.
inline bool is_sentence(std::string_view s,
                        const FiniteVerbTagger* tagger = nullptr) {
  if (word_tokens(s).size() < 3) return false;
  if (ends_with_terminal_punctuation(s)) return true;
  return tagger != nullptr && tagger->has_finite_verb(s);
}

// Non-stopword lowercase tokens.
inline std::vector<std::string> content_tokens(std::string_view s) {
  return leakage_tokens(s, /*drop_stopwords=*/true);
}

// A hint is generic when it carries no content word beyond what the question
// already says.
inline bool is_generic(std::string_view hint, std::string_view question) {
  static const std::unordered_set<std::string> kVague = {
      "one",  "known",  "thing",  "things", "something", "someone", "answer",
      "people", "person", "called", "name", "named", "famous", "question",
      "think", "guess", "related", "certain", "well"};
  auto q = content_tokens(question);
  std::unordered_set<std::string> qset(q.begin(), q.end());
  for (const auto& t : content_tokens(hint)) {
    if (!qset.count(t) && !kVague.count(t)) return false;
  }
  return true;
}

inline std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

// Entity spans index code points.
inline size_t codepoint_length(std::string_view s) {
  size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace hintkit::text

#endif  // HINTKIT_TEXT_HPP_
