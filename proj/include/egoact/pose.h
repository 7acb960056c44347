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

// Pose arithmetic and the pose-to-action labeling pipeline: per-frame pose
// deltas, thresholded window aggregation, and merging of discrete simulator
// actions into executable instructions.

#ifndef EGOACT_POSE_H_
#define EGOACT_POSE_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egoact/grammar.h"
#include "egoact/random.h"

namespace egoact {

inline constexpr double kPitchLimitDeg = 45.0;

// Planar position (x, y), height offset z from the default stance, heading
// yaw (counterclockwise from +x, so +yaw turns left) and head pitch (+up).
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
  double pitch = 0.0;

  bool operator==(const Pose&) const = default;
};

// Maps any angle to [-180, 180).
double NormalizeYaw(double degrees);

// Signed shortest arc from `from` to `to`, in [-180, 180).
double ShortestArc(double from, double to);

// Restores the yaw/pitch invariants.
Pose Normalized(Pose pose);

double PlanarDistance(const Pose& a, const Pose& b);

struct PoseDelta {
  double d_yaw = 0.0;
  double d_pitch = 0.0;
  double d_forward = 0.0;
  double d_lateral = 0.0;  // +left
  double d_z = 0.0;

  bool operator==(const PoseDelta&) const = default;
};

// Motion from a to b with translation expressed in a's body frame.
PoseDelta ComputePoseDelta(const Pose& a, const Pose& b);

// Motion from a to b with translation expressed in the frame of `anchor`.
PoseDelta ComputePoseDelta(const Pose& a, const Pose& b, const Pose& anchor);

struct Thresholds {
  double angular_deg = 5.0;
  double planar_m = 0.1;
  double vertical_m = 0.05;
};

// Throws kInvariantViolation unless every threshold is strictly positive.
void ValidateThresholds(const Thresholds& th);

// Sums each axis with sign and emits one SLA per axis whose |sum| reaches the
// axis threshold, in the order Turn, Look, Move, Sidewalk, Height.
std::vector<StructuredAction> AggregateWindow(std::span<const PoseDelta> deltas,
                                              const Thresholds& th);

// Consecutive-frame deltas over one window, all translations in the frame of
// the window's first pose.
std::vector<PoseDelta> WindowDeltas(std::span<const Pose> poses);

// Number of frame transitions per labeling window: round(1.5 s * fps).
std::size_t WindowTransitions(double fps);

struct FrameRange {
  std::size_t first = 0;  // inclusive frame index
  std::size_t last = 0;   // inclusive frame index
};

// Splits a track of `frame_count` frames into windows of
// WindowTransitions(fps) transitions; adjacent windows share their boundary
// frame and the final partial window is kept.
std::vector<FrameRange> SplitWindows(std::size_t frame_count, double fps);

// Discrete actions of a grid simulator (Habitat-style action names).
struct LowLevelAction {
  enum class Type {
    kMoveForward,
    kTurnLeft,
    kTurnRight,
    kLookUp,
    kLookDown,
    kStrafeLeft,
    kStrafeRight,
    kStop,
  };
  Type type = Type::kStop;
  double amount = 0.0;  // meters or degrees; ignored for kStop
};

// Parses "MOVE_FORWARD" / "move_forward" style names. Returns nullopt for
// unknown names.
std::optional<LowLevelAction::Type> LowLevelTypeFromName(const std::string& name);

struct PerturbConfig {
  double dist_frac = 0.05;
  double angle_deg = 1.5;
  bool enabled = true;
};

// Merges two consecutive low-level actions into one executable sequence.
// Any Stop yields the Stop sequence. Same-axis motion is summed, then
// distances are scaled by U[1 - dist_frac, 1 + dist_frac] and angle
// magnitudes shifted by U[-angle_deg, +angle_deg]. When every axis cancels
// the result is empty and the caller is expected to drop the step.
ActionSequence MergeActionPair(const LowLevelAction& first,
                               const LowLevelAction& second, Rng& rng,
                               const PerturbConfig& pcfg);

}  // namespace egoact

#endif  // EGOACT_POSE_H_
