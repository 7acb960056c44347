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

// Training/evaluation sample construction: annotation-driven conversion of
// egocentric videos, sliding windows over merged simulator trajectories,
// oversampling, and prompt rendering.

#ifndef EGOACT_DATASET_H_
#define EGOACT_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egoact/grammar.h"
#include "egoact/pose.h"
#include "egoact/random.h"

namespace egoact {

enum class Resolution { k240p, k480p };

std::string_view ResolutionTag(Resolution res);
std::optional<Resolution> ResolutionFromTag(std::string_view tag);

struct ObservationRef {
  std::string source;                // episode id
  std::optional<std::size_t> frame;  // frame or step index, when known
  std::string image;                 // image path, may be empty
  Resolution res = Resolution::k480p;

  // Path when present, otherwise "<source>#<frame>".
  std::string Locator() const;

  bool operator==(const ObservationRef&) const = default;
};

// One recent observation with the action executed at it. The newest pair of
// a sample has no action: that action is the sample's target.
struct RecentPair {
  ObservationRef observation;
  std::optional<std::string> action;

  bool operator==(const RecentPair&) const = default;
};

struct EgoSample {
  std::string id;
  std::string instruction;
  std::vector<ObservationRef> historical;  // <= 10, 240p, oldest first
  std::vector<RecentPair> recent;          // <= 3, 480p, oldest first
  std::string target;

  bool operator==(const EgoSample&) const = default;
};

inline constexpr std::size_t kHistoricalSlots = 10;
inline constexpr std::size_t kRecentSlots = 3;

// Up to `count` indices evenly spread over [begin, end), endpoints included.
// Returns every index when the interval holds fewer than `count`.
std::vector<std::size_t> UniformSample(std::size_t begin, std::size_t end,
                                       std::size_t count);

struct ContextSelection {
  std::vector<std::size_t> historical;  // ascending
  std::vector<std::size_t> recent;      // ascending, last == current
};

// Recent indices step back from `current` by `stride` without going below
// `lower_bound`; the historical set samples [lower_bound, first recent).
// Shared by the dataset builders and the episode runner.
ContextSelection SelectContext(std::size_t current, std::size_t stride,
                               std::size_t lower_bound,
                               std::size_t recent_slots = kRecentSlots,
                               std::size_t historical_slots = kHistoricalSlots);

// Connectives used to chain adjacent actions into one instruction.
inline constexpr std::string_view kConnectives[] = {", and then ", ", and next ",
                                                    ", continue to "};

// Joins texts with the given connective indices (one per joint).
std::string JoinInstruction(std::span<const std::string> actions,
                            std::span<const std::size_t> connectives);

// Draws one connective per joint. Throws kEmptyActions for an empty list.
std::vector<std::size_t> DrawConnectives(std::size_t action_count, Rng& rng);

std::string BuildInstruction(std::span<const std::string> actions, Rng& rng);

// --- annotation-driven conversion ---

struct AnnotatedFrame {
  std::string image;
  std::optional<Pose> pose;
};

struct AnnotatedAction {
  std::string text;
  std::size_t start_frame = 0;  // inclusive
  std::size_t end_frame = 0;    // inclusive
};

struct AnnotatedEpisode {
  std::string id;
  double fps = 30.0;
  std::vector<AnnotatedFrame> frames;
  std::vector<AnnotatedAction> actions;  // manipulation steps, temporal order
};

struct AnnotationConfig {
  std::size_t lookback_frames = 60;
  std::size_t stride = 5;
  std::size_t actions_per_instruction = 3;
  Thresholds thresholds;
  std::uint64_t seed = 0;
  // Throw kMissingPoses instead of omitting samples that need absent poses.
  bool strict_poses = false;
};

// Throws kMalformedAnnotation for overlapping/unordered intervals, frames out
// of range, empty texts or texts containing ';'.
void ValidateEpisode(const AnnotatedEpisode& ep);

std::vector<EgoSample> BuildSamplesAnnotation(const AnnotatedEpisode& ep,
                                              const AnnotationConfig& cfg = {});

// --- sliding windows over merged trajectories ---

struct LowLevelStep {
  std::string image;
  LowLevelAction action;
};

struct MergedStep {
  std::string image;
  std::string action;  // canonical serialized ActionSequence
};

struct MergedEpisode {
  std::string id;
  std::string instruction;
  std::vector<MergedStep> steps;  // ends with the Stop action
};

// Appends a terminal STOP, merges consecutive pairs, and drops pairs whose
// motion cancels completely.
MergedEpisode MergeTrajectory(std::string id, std::string instruction,
                              std::span<const LowLevelStep> steps, Rng& rng,
                              const PerturbConfig& pcfg);

// One sample per step: the step's action is the target, recent pairs are
// taken `interval` steps apart and every earlier image feeds the historical
// pool. Throws kEpisodeTooShort for an empty episode.
std::vector<EgoSample> BuildSamplesSliding(const MergedEpisode& ep,
                                           std::size_t interval = 1);

// --- oversampling ---

struct OversampleConfig {
  std::size_t turn_factor = 2;
  std::size_t nla_factor = 3;
  std::uint64_t seed = 0;
};

// Repeats samples whose target holds a Turn (turn_factor) or a non-stop NLA
// (nla_factor; the larger factor wins when both apply), then shuffles.
std::vector<EgoSample> Oversample(std::span<const EgoSample> samples,
                                  const OversampleConfig& cfg);

// --- prompt ---

std::string HistoricalPlaceholder(std::size_t one_based_index);
std::string RecentPlaceholder(std::size_t one_based_index);

// Renders the model prompt with observation placeholders. The text ends with
// "Next action:".
std::string RenderPrompt(const EgoSample& sample);

}  // namespace egoact

#endif  // EGOACT_DATASET_H_
