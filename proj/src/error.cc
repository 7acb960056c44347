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

#include "egoact/error.h"

namespace egoact {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnrecognizedForm: return "UnrecognizedForm";
    case ErrorCode::kNonPositiveMagnitude: return "NonPositiveMagnitude";
    case ErrorCode::kIllegalDirection: return "IllegalDirection";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kTrailingClauseAfterNla: return "TrailingClauseAfterNLA";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kEmptyActions: return "EmptyActions";
    case ErrorCode::kMissingPoses: return "MissingPoses";
    case ErrorCode::kMalformedAnnotation: return "MalformedAnnotation";
    case ErrorCode::kEpisodeTooShort: return "EpisodeTooShort";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kPolicyTimeout: return "PolicyTimeout";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kEmptyResults: return "EmptyResults";
    case ErrorCode::kUnknownScorer: return "UnknownScorer";
    case ErrorCode::kMismatchedEpisodeSets: return "MismatchedEpisodeSets";
  }
  return "Unknown";
}

}  // namespace egoact
