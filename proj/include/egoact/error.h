// Copyright 2026 The EgoAct Toolkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EGOACT_ERROR_H_
#define EGOACT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace egoact {

enum class ErrorCode {
  // action grammar
  kUnrecognizedForm,
  kNonPositiveMagnitude,
  kIllegalDirection,
  kEmptyText,
  kTrailingClauseAfterNla,
  kEmptySequence,
  // dataset builder
  kEmptyActions,
  kMissingPoses,
  kMalformedAnnotation,
  kEpisodeTooShort,
  // world loading and configuration
  kParseError,
  kInvariantViolation,
  // policy wire
  kPolicyTimeout,
  kProtocolError,
  // metrics
  kEmptyResults,
  kUnknownScorer,
  kMismatchedEpisodeSets,
};

std::string_view ErrorCodeName(ErrorCode code);

// All toolkit failures are reported through this exception type; callers
// branch on code() rather than on the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace egoact

#endif  // EGOACT_ERROR_H_
