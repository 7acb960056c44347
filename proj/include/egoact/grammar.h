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

// Language-based action space: structured locomotion/perception actions
// (SLAs) and free-form natural language actions (NLAs) routed by keyword.

#ifndef EGOACT_GRAMMAR_H_
#define EGOACT_GRAMMAR_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "egoact/error.h"

namespace egoact {

enum class ActionKind { kTurn, kLook, kMove, kSidewalk, kHeight };

// Each kind admits exactly two directions:
//   Turn: left/right, Look: up/down, Move: forward/backward,
//   Sidewalk: left/right, Height: rise/lower.
enum class Direction { kLeft, kRight, kUp, kDown, kForward, kBackward, kRise, kLower };

bool IsLegalDirection(ActionKind kind, Direction direction);
bool IsAngular(ActionKind kind);

// +1 for left/up/forward/rise, -1 otherwise.
int DirectionSign(Direction direction);

// Magnitude is in degrees for Turn/Look and meters for the other kinds.
struct StructuredAction {
  ActionKind kind = ActionKind::kTurn;
  Direction direction = Direction::kLeft;
  double magnitude = 0.0;

  bool operator==(const StructuredAction&) const = default;
};

// Builds an action from a signed amount along the kind's axis (positive =
// left/up/forward/rise). The amount must be non-zero.
StructuredAction MakeSignedAction(ActionKind kind, double signed_amount);

enum class Route { kSpeech, kGesture, kManipulation, kStop };

std::string_view RouteName(Route route);

struct NaturalAction {
  std::string text;
  Route route = Route::kManipulation;

  bool operator==(const NaturalAction&) const = default;
};

// SLAs in execution order, optionally closed by one NLA.
struct ActionSequence {
  std::vector<StructuredAction> slas;
  std::optional<NaturalAction> terminal;

  bool empty() const { return slas.empty() && !terminal.has_value(); }
  bool IsStop() const {
    return terminal.has_value() && terminal->route == Route::kStop;
  }

  bool operator==(const ActionSequence&) const = default;
};

inline constexpr std::string_view kStopPhrase = "Stop and no action";

struct RouterConfig {
  std::vector<std::string> speech_keywords = {"speak", "ask"};
  std::vector<std::string> gesture_keywords = {"say hi", "shake hands",
                                               "confirm", "deny"};
  std::string stop_phrase = std::string(kStopPhrase);
};

// Lowercases, trims, and collapses internal whitespace runs to one space.
std::string CanonicalizeText(std::string_view text);

// Parses one clause such as "Turn left 30.0 degrees".
// Throws Error with kUnrecognizedForm, kNonPositiveMagnitude or
// kIllegalDirection.
StructuredAction ParseSla(std::string_view text);

// Non-throwing variant for callers that probe clauses; returns nullopt and
// sets *error when the clause is not a well-formed SLA.
std::optional<StructuredAction> TryParseSla(std::string_view text,
                                            ErrorCode* error = nullptr);

// Assigns a route by keyword triggers in the fixed order
// Stop -> Speech -> Gesture -> Manipulation. Throws kEmptyText.
NaturalAction RouteNla(std::string_view text,
                       const RouterConfig& config = RouterConfig{});

// Splits on ';'. Clauses that are not SLAs become the terminal NLA; nothing
// may follow it. Empty clauses (e.g. a trailing ';') are skipped.
// Throws kTrailingClauseAfterNla, kEmptySequence, or a clause error.
ActionSequence ParseSequence(std::string_view text,
                             const RouterConfig& config = RouterConfig{});

// Rounds magnitudes to the canonical precision (0.1 degree, 0.01 meter,
// never below one unit of that precision), trims the NLA text and re-routes
// it.
ActionSequence Canonicalize(const ActionSequence& seq,
                            const RouterConfig& config = RouterConfig{});

std::string SerializeSla(const StructuredAction& action);

// Canonical text form; inverse of ParseSequence up to Canonicalize.
std::string Serialize(const ActionSequence& seq);

ActionSequence StopSequence();

}  // namespace egoact

#endif  // EGOACT_GRAMMAR_H_
