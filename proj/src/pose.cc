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

#include "egoact/pose.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "egoact/error.h"

namespace egoact {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct AxisSums {
  double yaw = 0.0;
  double pitch = 0.0;
  double forward = 0.0;
  double lateral = 0.0;
  double z = 0.0;
};

}  // namespace

double NormalizeYaw(double degrees) {
  double r = std::fmod(degrees + 180.0, 360.0);
  if (r < 0.0) r += 360.0;
  r -= 180.0;
  // fmod can land exactly on +180 after the shift through rounding.
  if (r >= 180.0) r -= 360.0;
  return r;
}

double ShortestArc(double from, double to) { return NormalizeYaw(to - from); }

Pose Normalized(Pose pose) {
  pose.yaw = NormalizeYaw(pose.yaw);
  pose.pitch = std::clamp(pose.pitch, -kPitchLimitDeg, kPitchLimitDeg);
  return pose;
}

double PlanarDistance(const Pose& a, const Pose& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

PoseDelta ComputePoseDelta(const Pose& a, const Pose& b, const Pose& anchor) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double c = std::cos(anchor.yaw * kDegToRad);
  const double s = std::sin(anchor.yaw * kDegToRad);
  PoseDelta d;
  d.d_yaw = ShortestArc(a.yaw, b.yaw);
  d.d_pitch = b.pitch - a.pitch;
  d.d_forward = c * dx + s * dy;
  d.d_lateral = -s * dx + c * dy;
  d.d_z = b.z - a.z;
  return d;
}

PoseDelta ComputePoseDelta(const Pose& a, const Pose& b) {
  return ComputePoseDelta(a, b, a);
}

void ValidateThresholds(const Thresholds& th) {
  if (!(th.angular_deg > 0.0) || !(th.planar_m > 0.0) || !(th.vertical_m > 0.0)) {
    throw Error(ErrorCode::kInvariantViolation, "thresholds must be positive");
  }
}

std::vector<StructuredAction> AggregateWindow(std::span<const PoseDelta> deltas,
                                              const Thresholds& th) {
  AxisSums sum;
  for (const auto& d : deltas) {
    sum.yaw += d.d_yaw;
    sum.pitch += d.d_pitch;
    sum.forward += d.d_forward;
    sum.lateral += d.d_lateral;
    sum.z += d.d_z;
  }
  std::vector<StructuredAction> out;
  auto emit = [&out](ActionKind kind, double value, double threshold) {
    if (std::fabs(value) >= threshold) out.push_back(MakeSignedAction(kind, value));
  };
  emit(ActionKind::kTurn, sum.yaw, th.angular_deg);
  emit(ActionKind::kLook, sum.pitch, th.angular_deg);
  emit(ActionKind::kMove, sum.forward, th.planar_m);
  emit(ActionKind::kSidewalk, sum.lateral, th.planar_m);
  emit(ActionKind::kHeight, sum.z, th.vertical_m);
  return out;
}

std::vector<PoseDelta> WindowDeltas(std::span<const Pose> poses) {
  std::vector<PoseDelta> deltas;
  if (poses.size() < 2) return deltas;
  deltas.reserve(poses.size() - 1);
  for (std::size_t i = 1; i < poses.size(); ++i) {
    deltas.push_back(ComputePoseDelta(poses[i - 1], poses[i], poses.front()));
  }
  return deltas;
}

std::size_t WindowTransitions(double fps) {
  const auto n = static_cast<std::size_t>(std::llround(1.5 * fps));
  return std::max<std::size_t>(n, 1);
}

std::vector<FrameRange> SplitWindows(std::size_t frame_count, double fps) {
  std::vector<FrameRange> windows;
  if (frame_count < 2) return windows;
  const std::size_t step = WindowTransitions(fps);
  for (std::size_t first = 0; first + 1 < frame_count; first += step) {
    windows.push_back({first, std::min(first + step, frame_count - 1)});
  }
  return windows;
}

std::optional<LowLevelAction::Type> LowLevelTypeFromName(const std::string& name) {
  std::string n;
  for (char c : name) n.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  using T = LowLevelAction::Type;
  if (n == "MOVE_FORWARD" || n == "FORWARD") return T::kMoveForward;
  if (n == "TURN_LEFT") return T::kTurnLeft;
  if (n == "TURN_RIGHT") return T::kTurnRight;
  if (n == "LOOK_UP") return T::kLookUp;
  if (n == "LOOK_DOWN") return T::kLookDown;
  if (n == "STRAFE_LEFT" || n == "MOVE_LEFT") return T::kStrafeLeft;
  if (n == "STRAFE_RIGHT" || n == "MOVE_RIGHT") return T::kStrafeRight;
  if (n == "STOP") return T::kStop;
  return std::nullopt;
}

ActionSequence MergeActionPair(const LowLevelAction& first,
                               const LowLevelAction& second, Rng& rng,
                               const PerturbConfig& pcfg) {
  using T = LowLevelAction::Type;
  if (first.type == T::kStop || second.type == T::kStop) return StopSequence();

  AxisSums sum;
  for (const LowLevelAction* a : {&first, &second}) {
    switch (a->type) {
      case T::kMoveForward: sum.forward += a->amount; break;
      case T::kTurnLeft: sum.yaw += a->amount; break;
      case T::kTurnRight: sum.yaw -= a->amount; break;
      case T::kLookUp: sum.pitch += a->amount; break;
      case T::kLookDown: sum.pitch -= a->amount; break;
      case T::kStrafeLeft: sum.lateral += a->amount; break;
      case T::kStrafeRight: sum.lateral -= a->amount; break;
      case T::kStop: break;
    }
  }

  ActionSequence seq;
  auto emit = [&](ActionKind kind, double value) {
    if (value == 0.0) return;
    double magnitude = std::fabs(value);
    if (pcfg.enabled) {
      if (IsAngular(kind)) {
        magnitude += rng.Uniform(-pcfg.angle_deg, pcfg.angle_deg);
      } else {
        magnitude *= rng.Uniform(1.0 - pcfg.dist_frac, 1.0 + pcfg.dist_frac);
      }
    }
    if (magnitude <= 0.0) return;
    seq.slas.push_back(MakeSignedAction(kind, value > 0.0 ? magnitude : -magnitude));
  };
  emit(ActionKind::kTurn, sum.yaw);
  emit(ActionKind::kLook, sum.pitch);
  emit(ActionKind::kMove, sum.forward);
  emit(ActionKind::kSidewalk, sum.lateral);
  return seq;
}

}  // namespace egoact
