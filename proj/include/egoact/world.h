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

// Desk-scale 2.5-D kinematic world: static obstacles, annotated entities,
// swept-collision execution of structured actions, and field-of-view gated
// symbolic observations.

#ifndef EGOACT_WORLD_H_
#define EGOACT_WORLD_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "egoact/grammar.h"
#include "egoact/pose.h"
#include "egoact/random.h"
#include "json.hpp"

namespace egoact {

struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

struct Circle {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
};

using Obstacle = std::variant<Rect, Circle>;

enum class EntityCategory { kPerson, kObject, kFurniture, kDoor };

std::string_view CategoryName(EntityCategory category);
std::optional<EntityCategory> CategoryFromName(std::string_view name);

struct Entity {
  std::string id;
  EntityCategory category = EntityCategory::kObject;
  double x = 0.0;
  double y = 0.0;
  double height = 0.0;  // meters above the floor
  std::map<std::string, std::string> attributes;
};

struct GoalSpec {
  std::string target;  // entity id
  Pose reference_pose;
  std::string reference_nla;
  std::string instruction;  // optional; see EpisodeInstruction

  bool operator==(const GoalSpec&) const = default;
};

struct NoiseConfig {
  double turn_sigma_deg = 2.5;
  double trans_sigma_m = 0.025;
};

struct AgentConfig {
  double radius = 0.3;
  double fov_h = 90.0;
  double fov_v = 60.0;
  double view_range = 5.0;
  double camera_base_height = 1.2;
  NoiseConfig noise;
  double forward_gain = 1.0;
  // Adjacent Turn + Move clauses execute as one arc.
  bool merged_arcs = true;

  // x1.2 forward amplification with the default actuation noise.
  static AgentConfig DeployParity();
  static AgentConfig Noiseless();
};

// Throws kInvariantViolation when a field is out of range.
void ValidateAgentConfig(const AgentConfig& cfg);

struct World {
  Rect bounds;
  std::vector<Obstacle> obstacles;
  std::vector<Entity> entities;
  GoalSpec goal;
  std::optional<AgentConfig> agent;
  std::optional<Pose> start;

  const Entity* FindEntity(std::string_view id) const;
};

// The goal's instruction, or "Go to the <target>, and then <reference nla>"
// when the world file does not give one.
std::string EpisodeInstruction(const World& world);

// Parses and validates a world file. Throws kParseError for malformed JSON or
// wrong types and kInvariantViolation (listing every violation with its
// location) for semantic errors.
World LoadWorld(std::string_view text);
World LoadWorldFile(const std::string& path);
nlohmann::json WorldToJson(const World& world);
void ValidateWorld(const World& world);

nlohmann::json AgentConfigToJson(const AgentConfig& cfg);
// Fields missing from `j` keep their value from `base`.
AgentConfig AgentConfigFromJson(const nlohmann::json& j, AgentConfig base = {});

struct VisibleEntity {
  std::string id;
  EntityCategory category = EntityCategory::kObject;
  std::map<std::string, std::string> attributes;
  double distance = 0.0;   // planar meters
  double bearing = 0.0;    // degrees, +left of heading
  double elevation = 0.0;  // degrees above the camera horizon

  bool operator==(const VisibleEntity&) const = default;
};

struct Observation {
  std::size_t step = 0;
  std::vector<VisibleEntity> visible;  // by distance, then id
  bool collided_last_step = false;

  bool operator==(const Observation&) const = default;
};

nlohmann::json ObservationToJson(const Observation& obs);
Observation ObservationFromJson(const nlohmann::json& j);

// --- geometry ---

// Sample spacing of swept translations.
inline constexpr double kSweepStep = 0.05;
inline constexpr double kHeightLimit = 0.3;

// Agent disc of `radius` at (x, y) overlaps an obstacle or leaves bounds.
bool DiscCollides(const World& world, double x, double y, double radius);

// Disc swept from (x0, y0) to (x1, y1) overlaps an obstacle or leaves bounds.
bool SweepCollides(const World& world, double x0, double y0, double x1, double y1,
                   double radius);

// Segment between two points crosses an obstacle.
bool LineOfSightBlocked(const World& world, double x0, double y0, double x1, double y1);

// --- execution ---

struct StepOutcome {
  Pose pose;
  bool collided = false;
};

// Executes one structured action with actuation noise drawn from `rng`.
StepOutcome ApplySla(const Pose& pose, const StructuredAction& act, const AgentConfig& cfg,
                     Rng& rng, const World& world);

// Executes a turn and a forward/backward move as one arc: heading changes
// linearly with distance travelled. If the sweep collides, translation stops
// at the last free sample and the remaining rotation is completed in place.
StepOutcome ApplyArc(const Pose& pose, const StructuredAction& turn,
                     const StructuredAction& move, const AgentConfig& cfg, Rng& rng,
                     const World& world);

struct SequenceOutcome {
  Pose pose;
  std::size_t collisions = 0;
  std::vector<Pose> trace;  // pose after each executed primitive
};

// Executes SLAs in order, merging adjacent Turn -> Move pairs into arcs when
// cfg.merged_arcs is set.
SequenceOutcome ExecuteSlas(const Pose& pose, std::span<const StructuredAction> slas,
                            const AgentConfig& cfg, Rng& rng, const World& world);

// Visibility predicate for a single entity; fills `out` when visible.
bool IsVisible(const Pose& pose, const Entity& entity, const World& world,
               const AgentConfig& cfg, VisibleEntity* out = nullptr);

Observation Observe(const Pose& pose, const World& world, const AgentConfig& cfg,
                    std::size_t step = 0);

}  // namespace egoact

#endif  // EGOACT_WORLD_H_
