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

#include <string>
#include <vector>

#include "doctest.h"
#include "egoact/error.h"
#include "egoact/random.h"

namespace egoact {
namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an egoact::Error");
  return ErrorCode::kParseError;
}

TEST_CASE("parse_sla reads the skill table templates") {
  CHECK(ParseSla("Turn left 30.0 degrees") ==
        StructuredAction{ActionKind::kTurn, Direction::kLeft, 30.0});
  CHECK(ParseSla("Lower down 0.08 meters") ==
        StructuredAction{ActionKind::kHeight, Direction::kLower, 0.08});
  CHECK(ParseSla("Rise up 0.12 meters") ==
        StructuredAction{ActionKind::kHeight, Direction::kRise, 0.12});
  CHECK(ParseSla("Right sidewalk 0.40 meters") ==
        StructuredAction{ActionKind::kSidewalk, Direction::kRight, 0.40});
  CHECK(ParseSla("Move backward 0.26 meters") ==
        StructuredAction{ActionKind::kMove, Direction::kBackward, 0.26});
  CHECK(ParseSla("Look down 10.2 degrees") ==
        StructuredAction{ActionKind::kLook, Direction::kDown, 10.2});
}

TEST_CASE("parse_sla is case-insensitive and ignores surrounding whitespace") {
  CHECK(ParseSla("  tURN   RIGHT 5 Degrees\t") ==
        StructuredAction{ActionKind::kTurn, Direction::kRight, 5.0});
  CHECK(ParseSla("move forward 1 meter").magnitude == 1.0);
  CHECK(ParseSla("Move forward .5 meters").magnitude == 0.5);
  CHECK(ParseSla("Move forward 2. meters").magnitude == 2.0);
}

TEST_CASE("parse_sla error paths") {
  CHECK(CodeOf([] { ParseSla("Look up 0 degrees"); }) == ErrorCode::kNonPositiveMagnitude);
  CHECK(CodeOf([] { ParseSla("Turn left -3 degrees"); }) == ErrorCode::kNonPositiveMagnitude);
  CHECK(CodeOf([] { ParseSla("Look left 10 degrees"); }) == ErrorCode::kIllegalDirection);
  CHECK(CodeOf([] { ParseSla("Rise down 0.1 meters"); }) == ErrorCode::kIllegalDirection);
  CHECK(CodeOf([] { ParseSla("Up sidewalk 0.4 meters"); }) == ErrorCode::kIllegalDirection);
  CHECK(CodeOf([] { ParseSla("Turn on the washing machine"); }) == ErrorCode::kUnrecognizedForm);
  CHECK(CodeOf([] { ParseSla("Turn off the lamp"); }) == ErrorCode::kUnrecognizedForm);
  CHECK(CodeOf([] { ParseSla("Turn left 30 meters"); }) == ErrorCode::kUnrecognizedForm);
  CHECK(CodeOf([] { ParseSla("Jump forward 1 meter"); }) == ErrorCode::kUnrecognizedForm);
  CHECK(CodeOf([] { ParseSla("Move forward 1e3 meters"); }) == ErrorCode::kUnrecognizedForm);
  CHECK(CodeOf([] { ParseSla(""); }) == ErrorCode::kUnrecognizedForm);
}

TEST_CASE("route_nla examples and keyword order") {
  CHECK(RouteNla("Ask \"Where is the bathroom?\"").route == Route::kSpeech);
  CHECK(RouteNla("Stop and no action").route == Route::kStop);
  CHECK(RouteNla("  stop AND   no action ").route == Route::kStop);
  CHECK(RouteNla("Stop and no action now").route == Route::kManipulation);
  CHECK(RouteNla("Pick up the water bottle").route == Route::kManipulation);
  CHECK(RouteNla("Say hi to the boy").route == Route::kGesture);
  CHECK(RouteNla("Shake hands with the man").route == Route::kGesture);
  CHECK(RouteNla("Deny the request").route == Route::kGesture);
  // Keywords match whole leading tokens only.
  CHECK(RouteNla("Asking for directions").route == Route::kManipulation);
  CHECK(RouteNla("Speaker off").route == Route::kManipulation);
  CHECK(CodeOf([] { RouteNla("   "); }) == ErrorCode::kEmptyText);
}

TEST_CASE("router keyword lists are configurable") {
  RouterConfig cfg;
  cfg.gesture_keywords = {"wave"};
  CHECK(RouteNla("Wave at the girl", cfg).route == Route::kGesture);
  CHECK(RouteNla("Say hi to the boy", cfg).route == Route::kManipulation);
  cfg.speech_keywords.push_back("wave");  // speech is checked first
  CHECK(RouteNla("Wave at the girl", cfg).route == Route::kSpeech);
}

TEST_CASE("parse_sequence examples") {
  const auto seq = ParseSequence("Turn left 30.0 degrees; Move forward 0.26 meters");
  REQUIRE(seq.slas.size() == 2);
  CHECK(seq.slas[0] == StructuredAction{ActionKind::kTurn, Direction::kLeft, 30.0});
  CHECK(seq.slas[1] == StructuredAction{ActionKind::kMove, Direction::kForward, 0.26});
  CHECK_FALSE(seq.terminal.has_value());

  const auto bear = ParseSequence("Pick up the toy bear");
  CHECK(bear.slas.empty());
  REQUIRE(bear.terminal.has_value());
  CHECK(bear.terminal->route == Route::kManipulation);
  CHECK(bear.terminal->text == "Pick up the toy bear");

  CHECK(CodeOf([] { ParseSequence("Stop and no action; Turn left 10 degrees"); }) ==
        ErrorCode::kTrailingClauseAfterNla);
  CHECK(CodeOf([] { ParseSequence(" ; ;"); }) == ErrorCode::kEmptySequence);
  CHECK(CodeOf([] { ParseSequence("Turn left 0 degrees; Pick up the cup"); }) ==
        ErrorCode::kNonPositiveMagnitude);
}

TEST_CASE("parse_sequence tolerates a trailing separator") {
  const auto seq = ParseSequence("Move forward 0.26 meters;");
  CHECK(seq.slas.size() == 1);
}

TEST_CASE("serialize uses canonical precision") {
  ActionSequence turn;
  turn.slas = {{ActionKind::kTurn, Direction::kLeft, 30.0}};
  CHECK(Serialize(turn) == "Turn left 30.0 degrees");

  ActionSequence rise;
  rise.slas = {{ActionKind::kHeight, Direction::kRise, 0.12}};
  CHECK(Serialize(rise) == "Rise up 0.12 meters");

  CHECK(Serialize(StopSequence()) == "Stop and no action");

  ActionSequence mixed;
  mixed.slas = {{ActionKind::kSidewalk, Direction::kLeft, 0.4},
                {ActionKind::kLook, Direction::kUp, 10.04}};
  mixed.terminal = NaturalAction{"Point to the painting", Route::kManipulation};
  CHECK(Serialize(mixed) ==
        "Left sidewalk 0.40 meters; Look up 10.0 degrees; Point to the painting");
}

TEST_CASE("canonicalize keeps magnitudes positive") {
  ActionSequence tiny;
  tiny.slas = {{ActionKind::kMove, Direction::kForward, 0.001},
               {ActionKind::kTurn, Direction::kRight, 0.01}};
  const auto c = Canonicalize(tiny);
  CHECK(c.slas[0].magnitude == doctest::Approx(0.01));
  CHECK(c.slas[1].magnitude == doctest::Approx(0.1));
  CHECK(ParseSequence(Serialize(tiny)) == c);
}

// Random grammar-generated sequences; shared with the acceptance suite in
// spirit but kept small here.
ActionSequence RandomSequence(Rng& rng) {
  static const std::vector<std::string> kNlas = {
      "Pick up the water bottle", "Ask \"Where is the bathroom?\"", "Say hi to the boy",
      "Stop and no action",       "Open the door",                  "Speak \"How you doing?\""};
  ActionSequence seq;
  const std::size_t n = rng.Index(5);
  for (std::size_t i = 0; i < n; ++i) {
    const auto kind = static_cast<ActionKind>(rng.Index(5));
    const double magnitude = IsAngular(kind) ? rng.Uniform(0.0, 180.0) : rng.Uniform(0.0, 3.0);
    seq.slas.push_back(MakeSignedAction(kind, rng.Index(2) ? magnitude : -magnitude));
    if (seq.slas.back().magnitude == 0.0) seq.slas.back().magnitude = 1.0;
  }
  if (n == 0 || rng.Index(2) == 0) {
    seq.terminal = RouteNla(kNlas[rng.Index(kNlas.size())]);
  }
  return seq;
}

TEST_CASE("round trip: parse(serialize(s)) == canonicalize(s)") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const ActionSequence s = RandomSequence(rng);
    const std::string text = Serialize(s);
    CAPTURE(text);
    CHECK(ParseSequence(text) == Canonicalize(s));
    CHECK(Serialize(ParseSequence(text)) == text);
  }
}

TEST_CASE("fuzz: arbitrary bytes yield a value or a typed error") {
  Rng rng(5);
  const std::string alphabet = "Turnleftrightupdown0123456789.;- \t\"sidewalkmeters";
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    const std::size_t len = rng.Index(40);
    for (std::size_t k = 0; k < len; ++k) {
      text.push_back(rng.Index(3) == 0 ? static_cast<char>(rng.Index(256))
                                       : alphabet[rng.Index(alphabet.size())]);
    }
    try {
      const ActionSequence seq = ParseSequence(text);
      CHECK_FALSE(seq.empty());
    } catch (const Error&) {
    }
  }
}

}  // namespace
}  // namespace egoact
