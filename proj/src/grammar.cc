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

#include "egoact/grammar.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace egoact {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

char ToLower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ToLower(c);
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !IsSpace(s[i])) ++i;
    if (i > start) tokens.push_back(s.substr(start, i - start));
  }
  return tokens;
}

std::optional<Direction> DirectionFromWord(std::string_view word) {
  const std::string w = Lower(word);
  if (w == "left") return Direction::kLeft;
  if (w == "right") return Direction::kRight;
  if (w == "up") return Direction::kUp;
  if (w == "down") return Direction::kDown;
  if (w == "forward") return Direction::kForward;
  if (w == "backward") return Direction::kBackward;
  return std::nullopt;
}

enum class NumberStatus { kOk, kNegative, kMalformed };

// Accepts [+-]digits[.digits] and [+-].digits.
NumberStatus ParseDecimal(std::string_view token, double* value) {
  bool negative = false;
  if (!token.empty() && (token.front() == '+' || token.front() == '-')) {
    negative = token.front() == '-';
    token.remove_prefix(1);
  }
  if (token.empty()) return NumberStatus::kMalformed;
  std::size_t digits = 0;
  std::size_t dots = 0;
  for (char c : token) {
    if (c >= '0' && c <= '9') {
      ++digits;
    } else if (c == '.') {
      ++dots;
    } else {
      return NumberStatus::kMalformed;
    }
  }
  if (digits == 0 || dots > 1) return NumberStatus::kMalformed;
  double parsed = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), parsed);
  if (ec != std::errc() || ptr != token.data() + token.size() ||
      !std::isfinite(parsed)) {
    return NumberStatus::kMalformed;
  }
  *value = negative ? -parsed : parsed;
  return negative && parsed != 0.0 ? NumberStatus::kNegative : NumberStatus::kOk;
}

struct ProbeResult {
  std::optional<StructuredAction> action;
  ErrorCode error = ErrorCode::kUnrecognizedForm;
};

ProbeResult Probe(std::string_view text) {
  ProbeResult result;
  const auto tokens = SplitWhitespace(text);
  if (tokens.size() != 4) return result;

  ActionKind kind;
  std::string_view direction_word;
  const std::string second = Lower(tokens[1]);
  const std::string verb = Lower(tokens[0]);
  std::optional<Direction> height_direction;
  if (second == "sidewalk") {
    kind = ActionKind::kSidewalk;
    direction_word = tokens[0];
  } else if (verb == "turn") {
    kind = ActionKind::kTurn;
    direction_word = tokens[1];
  } else if (verb == "look") {
    kind = ActionKind::kLook;
    direction_word = tokens[1];
  } else if (verb == "move") {
    kind = ActionKind::kMove;
    direction_word = tokens[1];
  } else if (verb == "rise" || verb == "lower") {
    kind = ActionKind::kHeight;
    direction_word = tokens[1];
    height_direction = verb == "rise" ? Direction::kRise : Direction::kLower;
  } else {
    return result;
  }

  const std::string unit = Lower(tokens[3]);
  const bool unit_ok = IsAngular(kind)
                           ? (unit == "degrees" || unit == "degree")
                           : (unit == "meters" || unit == "meter");
  if (!unit_ok) return result;

  double magnitude = 0.0;
  const NumberStatus number = ParseDecimal(tokens[2], &magnitude);
  if (number == NumberStatus::kMalformed) return result;

  const std::optional<Direction> word = DirectionFromWord(direction_word);
  if (!word) return result;
  Direction direction = *word;
  if (height_direction) {
    // "Rise up" / "Lower down": the verb carries the direction and the
    // particle must agree with it.
    const Direction expected =
        *height_direction == Direction::kRise ? Direction::kUp : Direction::kDown;
    if (*word != expected) {
      result.error = ErrorCode::kIllegalDirection;
      return result;
    }
    direction = *height_direction;
  } else if (!IsLegalDirection(kind, direction)) {
    result.error = ErrorCode::kIllegalDirection;
    return result;
  }

  if (number == NumberStatus::kNegative || magnitude <= 0.0) {
    result.error = ErrorCode::kNonPositiveMagnitude;
    return result;
  }
  result.action = StructuredAction{kind, direction, magnitude};
  return result;
}

bool StartsWithKeyword(std::string_view canonical, std::string_view keyword) {
  if (keyword.empty() || canonical.size() < keyword.size()) return false;
  if (canonical.substr(0, keyword.size()) != keyword) return false;
  if (canonical.size() == keyword.size()) return true;
  const unsigned char next = static_cast<unsigned char>(canonical[keyword.size()]);
  return !std::isalnum(next) && next != '_';
}

double CanonicalMagnitude(ActionKind kind, double magnitude) {
  const double scale = IsAngular(kind) ? 10.0 : 100.0;
  const double rounded = std::round(magnitude * scale) / scale;
  return std::max(rounded, 1.0 / scale);
}

std::string_view DirectionWord(Direction d) {
  switch (d) {
    case Direction::kLeft: return "left";
    case Direction::kRight: return "right";
    case Direction::kUp: return "up";
    case Direction::kDown: return "down";
    case Direction::kForward: return "forward";
    case Direction::kBackward: return "backward";
    case Direction::kRise: return "up";
    case Direction::kLower: return "down";
  }
  return "";
}

}  // namespace

bool IsLegalDirection(ActionKind kind, Direction direction) {
  switch (kind) {
    case ActionKind::kTurn:
    case ActionKind::kSidewalk:
      return direction == Direction::kLeft || direction == Direction::kRight;
    case ActionKind::kLook:
      return direction == Direction::kUp || direction == Direction::kDown;
    case ActionKind::kMove:
      return direction == Direction::kForward ||
             direction == Direction::kBackward;
    case ActionKind::kHeight:
      return direction == Direction::kRise || direction == Direction::kLower;
  }
  return false;
}

bool IsAngular(ActionKind kind) {
  return kind == ActionKind::kTurn || kind == ActionKind::kLook;
}

int DirectionSign(Direction direction) {
  switch (direction) {
    case Direction::kLeft:
    case Direction::kUp:
    case Direction::kForward:
    case Direction::kRise:
      return 1;
    default:
      return -1;
  }
}

StructuredAction MakeSignedAction(ActionKind kind, double signed_amount) {
  static constexpr std::array<std::array<Direction, 2>, 5> kDirections = {{
      {Direction::kLeft, Direction::kRight},
      {Direction::kUp, Direction::kDown},
      {Direction::kForward, Direction::kBackward},
      {Direction::kLeft, Direction::kRight},
      {Direction::kRise, Direction::kLower},
  }};
  const auto& pair = kDirections[static_cast<std::size_t>(kind)];
  return StructuredAction{kind, signed_amount >= 0.0 ? pair[0] : pair[1],
                          std::fabs(signed_amount)};
}

std::string_view RouteName(Route route) {
  switch (route) {
    case Route::kSpeech: return "speech";
    case Route::kGesture: return "gesture";
    case Route::kManipulation: return "manipulation";
    case Route::kStop: return "stop";
  }
  return "";
}

std::string CanonicalizeText(std::string_view text) {
  std::string out;
  for (const auto token : SplitWhitespace(text)) {
    if (!out.empty()) out.push_back(' ');
    for (char c : token) out.push_back(ToLower(c));
  }
  return out;
}

std::optional<StructuredAction> TryParseSla(std::string_view text,
                                            ErrorCode* error) {
  ProbeResult probe = Probe(text);
  if (!probe.action && error != nullptr) *error = probe.error;
  return probe.action;
}

StructuredAction ParseSla(std::string_view text) {
  ProbeResult probe = Probe(text);
  if (!probe.action) {
    throw Error(probe.error, "'" + std::string(Trim(text)) + "'");
  }
  return *probe.action;
}

NaturalAction RouteNla(std::string_view text, const RouterConfig& config) {
  const std::string_view trimmed = Trim(text);
  if (trimmed.empty()) throw Error(ErrorCode::kEmptyText, "empty action text");
  const std::string canonical = CanonicalizeText(trimmed);
  NaturalAction action{std::string(trimmed), Route::kManipulation};
  if (canonical == CanonicalizeText(config.stop_phrase)) {
    action.route = Route::kStop;
    return action;
  }
  for (const auto& keyword : config.speech_keywords) {
    if (StartsWithKeyword(canonical, CanonicalizeText(keyword))) {
      action.route = Route::kSpeech;
      return action;
    }
  }
  for (const auto& keyword : config.gesture_keywords) {
    if (StartsWithKeyword(canonical, CanonicalizeText(keyword))) {
      action.route = Route::kGesture;
      return action;
    }
  }
  return action;
}

ActionSequence ParseSequence(std::string_view text, const RouterConfig& config) {
  ActionSequence seq;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view clause = Trim(text.substr(start, end - start));
    start = end + 1;
    if (clause.empty()) continue;
    if (seq.terminal) {
      throw Error(ErrorCode::kTrailingClauseAfterNla,
                  "'" + std::string(clause) + "' follows '" +
                      seq.terminal->text + "'");
    }
    ProbeResult probe = Probe(clause);
    if (probe.action) {
      seq.slas.push_back(*probe.action);
    } else if (probe.error == ErrorCode::kUnrecognizedForm) {
      seq.terminal = RouteNla(clause, config);
    } else {
      throw Error(probe.error, "'" + std::string(clause) + "'");
    }
  }
  if (seq.empty()) throw Error(ErrorCode::kEmptySequence, "no clauses");
  return seq;
}

ActionSequence Canonicalize(const ActionSequence& seq,
                            const RouterConfig& config) {
  ActionSequence out;
  out.slas.reserve(seq.slas.size());
  for (const auto& a : seq.slas) {
    out.slas.push_back({a.kind, a.direction, CanonicalMagnitude(a.kind, a.magnitude)});
  }
  if (seq.terminal) {
    out.terminal = RouteNla(seq.terminal->text, config);
    if (out.terminal->route == Route::kStop) out.terminal->text = config.stop_phrase;
  }
  return out;
}

std::string SerializeSla(const StructuredAction& action) {
  const double m = CanonicalMagnitude(action.kind, action.magnitude);
  char number[64];
  std::snprintf(number, sizeof(number), IsAngular(action.kind) ? "%.1f" : "%.2f", m);
  const std::string dir(DirectionWord(action.direction));
  switch (action.kind) {
    case ActionKind::kTurn:
      return "Turn " + dir + " " + number + " degrees";
    case ActionKind::kLook:
      return "Look " + dir + " " + number + " degrees";
    case ActionKind::kMove:
      return "Move " + dir + " " + number + " meters";
    case ActionKind::kSidewalk: {
      std::string capitalized = dir;
      capitalized[0] = static_cast<char>(std::toupper(capitalized[0]));
      return capitalized + " sidewalk " + number + " meters";
    }
    case ActionKind::kHeight:
      return (action.direction == Direction::kRise ? "Rise up " : "Lower down ") +
             std::string(number) + " meters";
  }
  return "";
}

std::string Serialize(const ActionSequence& seq) {
  std::string out;
  for (const auto& a : seq.slas) {
    if (!out.empty()) out += "; ";
    out += SerializeSla(a);
  }
  if (seq.terminal) {
    if (!out.empty()) out += "; ";
    out += Trim(seq.terminal->text);
  }
  return out;
}

ActionSequence StopSequence() {
  ActionSequence seq;
  seq.terminal = NaturalAction{std::string(kStopPhrase), Route::kStop};
  return seq;
}

}  // namespace egoact
