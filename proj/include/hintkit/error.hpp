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

#ifndef HINTKIT_ERROR_HPP_
#define HINTKIT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hintkit {

// Stable error codes. The string form is part of every machine-readable
// output (CLI reports, HTTP error bodies), so names never change.
enum class Errc {
  kParse,
  kSchema,
  kIo,
  kEmptyDataset,
  kNoTokens,
  kNoProbes,
  kTooFewCandidates,
  kMetricBackendError,
  kMetricBackendMissing,
  kNoMetricsEnabled,
  kBackendRangeError,
  kBackendError,
  kBackendParseError,
  kReplayMiss,
  kNonconvergence,
  kModeAnswerMismatch,
  kAllAttemptsLeaked,
  kInvalidArgument,
  kUnknownSplit,
  kSessionNotFound,
  kSessionCompleted,
  kSkipBeforeExhaustion,
  kEmptyStore,
  kConfig,
};

constexpr std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::kParse: return "PARSE_ERROR";
    case Errc::kSchema: return "SCHEMA_ERROR";
    case Errc::kIo: return "IO_ERROR";
    case Errc::kEmptyDataset: return "EMPTY_DATASET";
    case Errc::kNoTokens: return "NO_TOKENS";
    case Errc::kNoProbes: return "NO_PROBES";
    case Errc::kTooFewCandidates: return "TOO_FEW_CANDIDATES";
    case Errc::kMetricBackendError: return "METRIC_BACKEND_ERROR";
    case Errc::kMetricBackendMissing: return "METRIC_BACKEND_MISSING";
    case Errc::kNoMetricsEnabled: return "NO_METRICS_ENABLED";
    case Errc::kBackendRangeError: return "BACKEND_RANGE_ERROR";
    case Errc::kBackendError: return "BACKEND_ERROR";
    case Errc::kBackendParseError: return "BACKEND_PARSE_ERROR";
    case Errc::kReplayMiss: return "REPLAY_MISS";
    case Errc::kNonconvergence: return "NONCONVERGENCE";
    case Errc::kModeAnswerMismatch: return "MODE_ANSWER_MISMATCH";
    case Errc::kAllAttemptsLeaked: return "ALL_ATTEMPTS_LEAKED";
    case Errc::kInvalidArgument: return "INVALID_ARGUMENT";
    case Errc::kUnknownSplit: return "UNKNOWN_SPLIT";
    case Errc::kSessionNotFound: return "SESSION_NOT_FOUND";
    case Errc::kSessionCompleted: return "SESSION_COMPLETED";
    case Errc::kSkipBeforeExhaustion: return "SKIP_BEFORE_EXHAUSTION";
    case Errc::kEmptyStore: return "EMPTY_STORE";
    case Errc::kConfig: return "CONFIG_ERROR";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  Errc code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return errc_name(code_); }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace hintkit

#endif  // HINTKIT_ERROR_HPP_
