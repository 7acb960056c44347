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

#include "egoact/world.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "egoact/error.h"
#include "egoact/json_io.h"

namespace egoact {
namespace {

using nlohmann::json;

// Reads typed fields and records the JSON path of the first bad one.
class Reader {
 public:
  explicit Reader(std::string path) : path_(std::move(path)) {}

  const json& Object(const json& j, const char* key) const {
    if (!j.contains(key)) Fail(std::string(key) + ": missing");
    const json& v = j.at(key);
    if (!v.is_object()) Fail(std::string(key) + ": expected an object");
    return v;
  }

  const json& Array(const json& j, const char* key) const {
    if (!j.contains(key)) Fail(std::string(key) + ": missing");
    const json& v = j.at(key);
    if (!v.is_array()) Fail(std::string(key) + ": expected an array");
    return v;
  }

  double Number(const json& j, const char* key) const {
    if (!j.contains(key)) Fail(std::string(key) + ": missing");
    const json& v = j.at(key);
    if (!v.is_number()) Fail(std::string(key) + ": expected a number");
    return v.get<double>();
  }

  double NumberOr(const json& j, const char* key, double fallback) const {
    return j.contains(key) ? Number(j, key) : fallback;
  }

  std::string String(const json& j, const char* key) const {
    if (!j.contains(key)) Fail(std::string(key) + ": missing");
    const json& v = j.at(key);
    if (!v.is_string()) Fail(std::string(key) + ": expected a string");
    return v.get<std::string>();
  }

  Reader At(const std::string& child) const {
    return Reader(path_.empty() ? child : path_ + "." + child);
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kParseError, (path_.empty() ? "" : path_ + ".") + what);
  }

 private:
  std::string path_;
};

Pose ReadPose(const Reader& r, const json& j) {
  Pose p;
  p.x = r.NumberOr(j, "x", 0.0);
  p.y = r.NumberOr(j, "y", 0.0);
  p.z = r.NumberOr(j, "z", 0.0);
  p.yaw = r.NumberOr(j, "yaw", 0.0);
  p.pitch = r.NumberOr(j, "pitch", 0.0);
  return p;
}

bool Inside(const Rect& r, double x, double y) {
  return x >= r.min_x && x <= r.max_x && y >= r.min_y && y <= r.max_y;
}

json RectToJson(const Rect& r) {
  return json{{"min_x", r.min_x}, {"min_y", r.min_y}, {"max_x", r.max_x}, {"max_y", r.max_y}};
}

}  // namespace

std::string_view CategoryName(EntityCategory category) {
  switch (category) {
    case EntityCategory::kPerson: return "person";
    case EntityCategory::kObject: return "object";
    case EntityCategory::kFurniture: return "furniture";
    case EntityCategory::kDoor: return "door";
  }
  return "";
}

std::optional<EntityCategory> CategoryFromName(std::string_view name) {
  if (name == "person") return EntityCategory::kPerson;
  if (name == "object") return EntityCategory::kObject;
  if (name == "furniture") return EntityCategory::kFurniture;
  if (name == "door") return EntityCategory::kDoor;
  return std::nullopt;
}

AgentConfig AgentConfig::DeployParity() {
  AgentConfig cfg;
  cfg.forward_gain = 1.2;
  return cfg;
}

AgentConfig AgentConfig::Noiseless() {
  AgentConfig cfg;
  cfg.noise = {0.0, 0.0};
  return cfg;
}

void ValidateAgentConfig(const AgentConfig& cfg) {
  std::vector<std::string> bad;
  if (!(cfg.radius > 0.0)) bad.push_back("radius must be > 0");
  if (!(cfg.forward_gain > 0.0)) bad.push_back("forward_gain must be > 0");
  if (!(cfg.noise.turn_sigma_deg >= 0.0)) bad.push_back("noise.turn_sigma_deg must be >= 0");
  if (!(cfg.noise.trans_sigma_m >= 0.0)) bad.push_back("noise.trans_sigma_m must be >= 0");
  if (!(cfg.fov_h > 0.0) || !(cfg.fov_v > 0.0)) bad.push_back("fields of view must be > 0");
  if (!(cfg.view_range > 0.0)) bad.push_back("view_range must be > 0");
  if (bad.empty()) return;
  std::string msg;
  for (const auto& b : bad) msg += (msg.empty() ? "agent." : "; agent.") + b;
  throw Error(ErrorCode::kInvariantViolation, msg);
}

const Entity* World::FindEntity(std::string_view id) const {
  for (const auto& e : entities) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

json AgentConfigToJson(const AgentConfig& cfg) {
  return json{{"radius", cfg.radius},
              {"fov_h", cfg.fov_h},
              {"fov_v", cfg.fov_v},
              {"view_range", cfg.view_range},
              {"camera_base_height", cfg.camera_base_height},
              {"noise", {{"turn_sigma_deg", cfg.noise.turn_sigma_deg},
                         {"trans_sigma_m", cfg.noise.trans_sigma_m}}},
              {"forward_gain", cfg.forward_gain},
              {"merged_arcs", cfg.merged_arcs}};
}

AgentConfig AgentConfigFromJson(const json& j, AgentConfig base) {
  const Reader r("agent");
  if (!j.is_object()) r.Fail("expected an object");
  base.radius = r.NumberOr(j, "radius", base.radius);
  base.fov_h = r.NumberOr(j, "fov_h", base.fov_h);
  base.fov_v = r.NumberOr(j, "fov_v", base.fov_v);
  base.view_range = r.NumberOr(j, "view_range", base.view_range);
  base.camera_base_height = r.NumberOr(j, "camera_base_height", base.camera_base_height);
  base.forward_gain = r.NumberOr(j, "forward_gain", base.forward_gain);
  if (j.contains("noise")) {
    const json& n = r.Object(j, "noise");
    const Reader nr = r.At("noise");
    base.noise.turn_sigma_deg = nr.NumberOr(n, "turn_sigma_deg", base.noise.turn_sigma_deg);
    base.noise.trans_sigma_m = nr.NumberOr(n, "trans_sigma_m", base.noise.trans_sigma_m);
  }
  if (j.contains("merged_arcs")) {
    if (!j.at("merged_arcs").is_boolean()) r.Fail("merged_arcs: expected a boolean");
    base.merged_arcs = j.at("merged_arcs").get<bool>();
  }
  return base;
}

void ValidateWorld(const World& world) {
  std::vector<std::string> bad;
  const Rect& b = world.bounds;
  if (!(b.min_x < b.max_x) || !(b.min_y < b.max_y)) bad.push_back("bounds: empty rectangle");
  for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
    const std::string where = "obstacles[" + std::to_string(i) + "]";
    if (const auto* r = std::get_if<Rect>(&world.obstacles[i])) {
      if (!(r->min_x < r->max_x) || !(r->min_y < r->max_y)) bad.push_back(where + ": empty rectangle");
    } else if (const auto* c = std::get_if<Circle>(&world.obstacles[i])) {
      if (!(c->radius > 0.0)) bad.push_back(where + ".radius: must be > 0");
    }
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < world.entities.size(); ++i) {
    const Entity& e = world.entities[i];
    const std::string where = "entities[" + std::to_string(i) + "]";
    if (e.id.empty()) bad.push_back(where + ".id: empty");
    if (!ids.insert(e.id).second) bad.push_back(where + ".id: duplicate id '" + e.id + "'");
    if (!Inside(b, e.x, e.y)) bad.push_back(where + ".position: outside bounds");
  }
  if (world.FindEntity(world.goal.target) == nullptr) {
    bad.push_back("goal.target: no entity '" + world.goal.target + "'");
  }
  if (!Inside(b, world.goal.reference_pose.x, world.goal.reference_pose.y)) {
    bad.push_back("goal.reference_pose: outside bounds");
  }
  if (world.goal.reference_nla.empty()) bad.push_back("goal.reference_nla: empty");
  if (world.start && !Inside(b, world.start->x, world.start->y)) {
    bad.push_back("start: outside bounds");
  }
  if (world.agent) {
    try {
      ValidateAgentConfig(*world.agent);
    } catch (const Error& e) {
      bad.push_back(e.what());
    }
  }
  if (bad.empty()) return;
  std::string msg;
  for (const auto& s : bad) msg += (msg.empty() ? "" : "; ") + s;
  throw Error(ErrorCode::kInvariantViolation, msg);
}

World LoadWorld(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  const Reader root("");
  if (!j.is_object()) root.Fail("world file must be a JSON object");

  World world;
  const json& bounds = root.Object(j, "bounds");
  const Reader br = root.At("bounds");
  world.bounds = {br.Number(bounds, "min_x"), br.Number(bounds, "min_y"),
                  br.Number(bounds, "max_x"), br.Number(bounds, "max_y")};

  if (j.contains("obstacles")) {
    const json& obstacles = root.Array(j, "obstacles");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      const json& o = obstacles[i];
      const Reader r = root.At("obstacles[" + std::to_string(i) + "]");
      if (!o.is_object()) r.Fail("expected an object");
      const std::string type = r.String(o, "type");
      if (type == "rect") {
        world.obstacles.push_back(Rect{r.Number(o, "min_x"), r.Number(o, "min_y"),
                                       r.Number(o, "max_x"), r.Number(o, "max_y")});
      } else if (type == "circle") {
        world.obstacles.push_back(Circle{r.Number(o, "x"), r.Number(o, "y"), r.Number(o, "radius")});
      } else {
        r.Fail("type: expected 'rect' or 'circle'");
      }
    }
  }

  const json& entities = root.Array(j, "entities");
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const json& e = entities[i];
    const Reader r = root.At("entities[" + std::to_string(i) + "]");
    if (!e.is_object()) r.Fail("expected an object");
    Entity entity;
    entity.id = r.String(e, "id");
    const auto category = CategoryFromName(r.String(e, "category"));
    if (!category) r.Fail("category: expected person, object, furniture or door");
    entity.category = *category;
    const json& pos = r.Object(e, "position");
    const Reader pr = r.At("position");
    entity.x = pr.Number(pos, "x");
    entity.y = pr.Number(pos, "y");
    entity.height = pr.NumberOr(pos, "height", 0.0);
    if (e.contains("attributes")) {
      const json& attrs = r.Object(e, "attributes");
      for (const auto& [key, value] : attrs.items()) {
        if (!value.is_string()) r.At("attributes").Fail(key + ": expected a string");
        entity.attributes[key] = value.get<std::string>();
      }
    }
    world.entities.push_back(std::move(entity));
  }

  const json& goal = root.Object(j, "goal");
  const Reader gr = root.At("goal");
  world.goal.target = gr.String(goal, "target");
  world.goal.reference_pose = Normalized(ReadPose(gr.At("reference_pose"), gr.Object(goal, "reference_pose")));
  world.goal.reference_nla = gr.String(goal, "reference_nla");
  if (goal.contains("instruction")) world.goal.instruction = gr.String(goal, "instruction");

  if (j.contains("agent")) world.agent = AgentConfigFromJson(j.at("agent"));
  if (j.contains("start")) world.start = Normalized(ReadPose(root.At("start"), root.Object(j, "start")));

  ValidateWorld(world);
  return world;
}

std::string EpisodeInstruction(const World& world) {
  if (!world.goal.instruction.empty()) return world.goal.instruction;
  std::string target = world.goal.target;
  std::replace(target.begin(), target.end(), '_', ' ');
  return "Go to the " + target + ", and then " + world.goal.reference_nla;
}

World LoadWorldFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open world file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return LoadWorld(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

json WorldToJson(const World& world) {
  json obstacles = json::array();
  for (const auto& o : world.obstacles) {
    if (const auto* r = std::get_if<Rect>(&o)) {
      json jr = RectToJson(*r);
      jr["type"] = "rect";
      obstacles.push_back(std::move(jr));
    } else {
      const auto& c = std::get<Circle>(o);
      obstacles.push_back(json{{"type", "circle"}, {"x", c.x}, {"y", c.y}, {"radius", c.radius}});
    }
  }
  json entities = json::array();
  for (const auto& e : world.entities) {
    entities.push_back(json{{"id", e.id},
                            {"category", CategoryName(e.category)},
                            {"position", {{"x", e.x}, {"y", e.y}, {"height", e.height}}},
                            {"attributes", e.attributes}});
  }
  json out{{"bounds", RectToJson(world.bounds)},
           {"obstacles", std::move(obstacles)},
           {"entities", std::move(entities)},
           {"goal", {{"target", world.goal.target},
                     {"reference_pose", PoseToJson(world.goal.reference_pose)},
                     {"reference_nla", world.goal.reference_nla}}}};
  if (!world.goal.instruction.empty()) out["goal"]["instruction"] = world.goal.instruction;
  if (world.agent) out["agent"] = AgentConfigToJson(*world.agent);
  if (world.start) out["start"] = PoseToJson(*world.start);
  return out;
}

json ObservationToJson(const Observation& obs) {
  json visible = json::array();
  for (const auto& v : obs.visible) {
    visible.push_back(json{{"id", v.id},
                           {"category", CategoryName(v.category)},
                           {"attributes", v.attributes},
                           {"distance", v.distance},
                           {"bearing", v.bearing},
                           {"elevation", v.elevation}});
  }
  return json{{"step", obs.step}, {"visible", std::move(visible)},
              {"collided_last_step", obs.collided_last_step}};
}

Observation ObservationFromJson(const json& j) {
  const Reader r("observation");
  if (!j.is_object()) r.Fail("expected an object");
  Observation obs;
  obs.step = static_cast<std::size_t>(r.Number(j, "step"));
  if (j.contains("collided_last_step")) obs.collided_last_step = j.at("collided_last_step").get<bool>();
  const json& visible = r.Array(j, "visible");
  for (std::size_t i = 0; i < visible.size(); ++i) {
    const json& v = visible[i];
    const Reader vr = r.At("visible[" + std::to_string(i) + "]");
    VisibleEntity e;
    e.id = vr.String(v, "id");
    const auto category = CategoryFromName(vr.String(v, "category"));
    if (!category) vr.Fail("category: unknown");
    e.category = *category;
    if (v.contains("attributes")) {
      for (const auto& [key, value] : v.at("attributes").items()) {
        e.attributes[key] = value.get<std::string>();
      }
    }
    e.distance = vr.Number(v, "distance");
    e.bearing = vr.Number(v, "bearing");
    e.elevation = vr.Number(v, "elevation");
    obs.visible.push_back(std::move(e));
  }
  return obs;
}

}  // namespace egoact
