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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "egoact/world.h"

namespace egoact {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
// Truncation of the actuation noise, in standard deviations.
constexpr double kNoiseBound = 2.0;

struct Vec2 {
  double x;
  double y;
};

double Dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

double PointSegmentDistance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab{b.x - a.x, b.y - a.y};
  const Vec2 ap{p.x - a.x, p.y - a.y};
  const double len2 = Dot(ab, ab);
  double t = len2 > 0.0 ? Dot(ap, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(ap.x - t * ab.x, ap.y - t * ab.y);
}

double PointRectDistance(Vec2 p, const Rect& r) {
  const double dx = std::max({r.min_x - p.x, 0.0, p.x - r.max_x});
  const double dy = std::max({r.min_y - p.y, 0.0, p.y - r.max_y});
  return std::hypot(dx, dy);
}

// Liang-Barsky clip of segment a->b against the closed rectangle.
bool SegmentIntersectsRect(Vec2 a, Vec2 b, const Rect& r) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - r.min_x, r.max_x - a.x, a.y - r.min_y, r.max_y - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  return true;
}

double SegmentRectDistance(Vec2 a, Vec2 b, const Rect& r) {
  if (SegmentIntersectsRect(a, b, r)) return 0.0;
  double d = std::min(PointRectDistance(a, r), PointRectDistance(b, r));
  const Vec2 corners[4] = {{r.min_x, r.min_y}, {r.min_x, r.max_y}, {r.max_x, r.min_y},
                           {r.max_x, r.max_y}};
  for (const Vec2& c : corners) d = std::min(d, PointSegmentDistance(c, a, b));
  return d;
}

bool InsideShrunkBounds(const Rect& b, double x, double y, double radius) {
  return x - radius >= b.min_x && x + radius <= b.max_x && y - radius >= b.min_y &&
         y + radius <= b.max_y;
}

double SignedMagnitude(const StructuredAction& a) {
  return DirectionSign(a.direction) * a.magnitude;
}

// Noisy translation length for a Move or Sidewalk action. A zero command
// stays exactly zero and draws nothing.
double TranslationLength(const StructuredAction& act, const AgentConfig& cfg, Rng& rng) {
  if (act.magnitude <= 0.0) return 0.0;
  double length = act.magnitude;
  if (act.kind == ActionKind::kMove && act.direction == Direction::kForward) {
    length *= cfg.forward_gain;
  }
  length += rng.TruncatedNormal(cfg.noise.trans_sigma_m, kNoiseBound);
  return std::max(length, 0.0);
}

double TurnAngle(const StructuredAction& act, const AgentConfig& cfg, Rng& rng) {
  if (act.magnitude <= 0.0) return 0.0;
  return SignedMagnitude(act) + rng.TruncatedNormal(cfg.noise.turn_sigma_deg, kNoiseBound);
}

// Translates along `direction_offset` (degrees relative to heading; 0 =
// forward, 90 = left, 180 = backward) while the heading sweeps by
// `turn_deg` over the distance.
StepOutcome Sweep(const Pose& start, double length, double direction_offset, double turn_deg,
                  const AgentConfig& cfg, const World& world) {
  StepOutcome out{start, false};
  if (length > 0.0) {
    const auto samples = static_cast<std::size_t>(std::ceil(length / kSweepStep - 1e-9));
    double x = start.x, y = start.y, travelled = 0.0;
    for (std::size_t k = 1; k <= samples; ++k) {
      const double next = std::min(static_cast<double>(k) * kSweepStep, length);
      const double mid = 0.5 * (travelled + next);
      const double heading = start.yaw + turn_deg * (mid / length) + direction_offset;
      double nx, ny;
      if (turn_deg == 0.0) {
        // Straight sweeps are measured from the start to avoid drift.
        nx = start.x + next * std::cos(heading * kDegToRad);
        ny = start.y + next * std::sin(heading * kDegToRad);
      } else {
        nx = x + (next - travelled) * std::cos(heading * kDegToRad);
        ny = y + (next - travelled) * std::sin(heading * kDegToRad);
      }
      if (SweepCollides(world, x, y, nx, ny, cfg.radius)) {
        out.collided = true;
        break;
      }
      x = nx;
      y = ny;
      travelled = next;
    }
    out.pose.x = x;
    out.pose.y = y;
  }
  out.pose.yaw = NormalizeYaw(start.yaw + turn_deg);
  return out;
}

}  // namespace

bool DiscCollides(const World& world, double x, double y, double radius) {
  return SweepCollides(world, x, y, x, y, radius);
}

bool SweepCollides(const World& world, double x0, double y0, double x1, double y1,
                   double radius) {
  if (!InsideShrunkBounds(world.bounds, x0, y0, radius) ||
      !InsideShrunkBounds(world.bounds, x1, y1, radius)) {
    return true;
  }
  const Vec2 a{x0, y0}, b{x1, y1};
  for (const auto& obstacle : world.obstacles) {
    if (const auto* r = std::get_if<Rect>(&obstacle)) {
      if (SegmentRectDistance(a, b, *r) < radius) return true;
    } else {
      const auto& c = std::get<Circle>(obstacle);
      if (PointSegmentDistance({c.x, c.y}, a, b) < radius + c.radius) return true;
    }
  }
  return false;
}

bool LineOfSightBlocked(const World& world, double x0, double y0, double x1, double y1) {
  const Vec2 a{x0, y0}, b{x1, y1};
  for (const auto& obstacle : world.obstacles) {
    if (const auto* r = std::get_if<Rect>(&obstacle)) {
      if (SegmentIntersectsRect(a, b, *r)) return true;
    } else {
      const auto& c = std::get<Circle>(obstacle);
      if (PointSegmentDistance({c.x, c.y}, a, b) <= c.radius) return true;
    }
  }
  return false;
}

StepOutcome ApplySla(const Pose& pose, const StructuredAction& act, const AgentConfig& cfg,
                     Rng& rng, const World& world) {
  StepOutcome out{pose, false};
  switch (act.kind) {
    case ActionKind::kTurn:
      out.pose.yaw = NormalizeYaw(pose.yaw + TurnAngle(act, cfg, rng));
      break;
    case ActionKind::kLook:
      out.pose.pitch = std::clamp(pose.pitch + SignedMagnitude(act), -kPitchLimitDeg, kPitchLimitDeg);
      break;
    case ActionKind::kHeight:
      out.pose.z = std::clamp(pose.z + SignedMagnitude(act), -kHeightLimit, kHeightLimit);
      break;
    case ActionKind::kMove: {
      const double length = TranslationLength(act, cfg, rng);
      const double offset = act.direction == Direction::kForward ? 0.0 : 180.0;
      out = Sweep(pose, length, offset, 0.0, cfg, world);
      break;
    }
    case ActionKind::kSidewalk: {
      const double length = TranslationLength(act, cfg, rng);
      const double offset = act.direction == Direction::kLeft ? 90.0 : -90.0;
      out = Sweep(pose, length, offset, 0.0, cfg, world);
      break;
    }
  }
  out.pose = Normalized(out.pose);
  return out;
}

StepOutcome ApplyArc(const Pose& pose, const StructuredAction& turn,
                     const StructuredAction& move, const AgentConfig& cfg, Rng& rng,
                     const World& world) {
  const double angle = TurnAngle(turn, cfg, rng);
  const double length = TranslationLength(move, cfg, rng);
  const double offset = move.direction == Direction::kForward ? 0.0 : 180.0;
  StepOutcome out = Sweep(pose, length, offset, angle, cfg, world);
  out.pose = Normalized(out.pose);
  return out;
}

SequenceOutcome ExecuteSlas(const Pose& pose, std::span<const StructuredAction> slas,
                            const AgentConfig& cfg, Rng& rng, const World& world) {
  SequenceOutcome out{pose, 0, {}};
  for (std::size_t i = 0; i < slas.size(); ++i) {
    StepOutcome step;
    if (cfg.merged_arcs && slas[i].kind == ActionKind::kTurn && i + 1 < slas.size() &&
        slas[i + 1].kind == ActionKind::kMove) {
      step = ApplyArc(out.pose, slas[i], slas[i + 1], cfg, rng, world);
      ++i;
    } else {
      step = ApplySla(out.pose, slas[i], cfg, rng, world);
    }
    out.pose = step.pose;
    out.collisions += step.collided ? 1 : 0;
    out.trace.push_back(step.pose);
  }
  return out;
}

bool IsVisible(const Pose& pose, const Entity& entity, const World& world,
               const AgentConfig& cfg, VisibleEntity* out) {
  const double dx = entity.x - pose.x;
  const double dy = entity.y - pose.y;
  const double distance = std::hypot(dx, dy);
  const double bearing = NormalizeYaw(std::atan2(dy, dx) * kRadToDeg - pose.yaw);
  const double camera = cfg.camera_base_height + pose.z;
  const double elevation = std::atan2(entity.height - camera, distance) * kRadToDeg;
  const bool visible = distance <= cfg.view_range && std::fabs(bearing) <= cfg.fov_h / 2.0 &&
                       std::fabs(elevation - pose.pitch) <= cfg.fov_v / 2.0 &&
                       !LineOfSightBlocked(world, pose.x, pose.y, entity.x, entity.y);
  if (visible && out != nullptr) {
    *out = VisibleEntity{entity.id, entity.category, entity.attributes, distance, bearing, elevation};
  }
  return visible;
}

Observation Observe(const Pose& pose, const World& world, const AgentConfig& cfg,
                    std::size_t step) {
  Observation obs;
  obs.step = step;
  for (const auto& entity : world.entities) {
    VisibleEntity v;
    if (IsVisible(pose, entity, world, cfg, &v)) obs.visible.push_back(std::move(v));
  }
  std::sort(obs.visible.begin(), obs.visible.end(), [](const auto& a, const auto& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  });
  return obs;
}

}  // namespace egoact
