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

#include "egoact/runner.h"

#include <algorithm>
#include <cmath>

#include "egoact/dataset.h"
#include "egoact/error.h"
#include "egoact/json_io.h"
#include "egoact/random.h"

namespace egoact {
namespace {

using nlohmann::json;

[[noreturn]] void Protocol(const std::string& msg) { throw Error(ErrorCode::kProtocolError, msg); }

const json& Field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) Protocol(std::string("missing field ") + key);
  return j.at(key);
}

void CheckVersion(const json& j) {
  const json& v = Field(j, "version");
  if (!v.is_string() || v.get<std::string>() != kWireVersion) {
    Protocol("unsupported version " + v.dump());
  }
}

json ObservationList(const std::vector<Observation>& list) {
  json out = json::array();
  for (const auto& o : list) out.push_back(ObservationToJson(o));
  return out;
}

std::optional<Route> RouteFromName(std::string_view name) {
  for (Route r : {Route::kSpeech, Route::kGesture, Route::kManipulation, Route::kStop}) {
    if (RouteName(r) == name) return r;
  }
  return std::nullopt;
}

std::string FormatTurn(double degrees) {
  return SerializeSla(MakeSignedAction(ActionKind::kTurn, degrees));
}

}  // namespace

json RequestToJson(const PolicyRequest& req) {
  json recent = json::array();
  for (const auto& r : req.recent) {
    recent.push_back(json{{"observation", ObservationToJson(r.observation)},
                          {"action", r.action ? json(*r.action) : json(nullptr)}});
  }
  json out{{"version", kWireVersion},
           {"episode_id", req.episode_id},
           {"step", req.step},
           {"instruction", req.instruction},
           {"historical", ObservationList(req.historical)},
           {"recent", std::move(recent)},
           {"current", ObservationToJson(req.current)},
           {"pose", PoseToJson(req.pose)}};
  if (!req.decode.is_null()) out["decode"] = req.decode;
  return out;
}

PolicyRequest RequestFromJson(const json& j) {
  try {
    CheckVersion(j);
    PolicyRequest req;
    req.episode_id = Field(j, "episode_id").get<std::string>();
    req.step = Field(j, "step").get<std::size_t>();
    req.instruction = Field(j, "instruction").get<std::string>();
    for (const auto& o : Field(j, "historical")) req.historical.push_back(ObservationFromJson(o));
    for (const auto& r : Field(j, "recent")) {
      RecentEntry entry{ObservationFromJson(Field(r, "observation")), std::nullopt};
      const json& action = Field(r, "action");
      if (!action.is_null()) entry.action = action.get<std::string>();
      req.recent.push_back(std::move(entry));
    }
    req.current = ObservationFromJson(Field(j, "current"));
    req.pose = PoseFromJson(Field(j, "pose"));
    if (j.contains("decode")) req.decode = j.at("decode");
    return req;
  } catch (const json::exception& e) {
    Protocol(std::string("bad request: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kProtocolError) throw;
    Protocol(std::string("bad request: ") + e.what());
  }
}

json ResponseToJson(const PolicyResponse& resp) {
  return json{{"version", kWireVersion}, {"action_text", resp.action_text}};
}

PolicyResponse ResponseFromJson(const json& j) {
  CheckVersion(j);
  const json& text = Field(j, "action_text");
  if (!text.is_string()) Protocol("action_text: expected a string");
  return PolicyResponse{text.get<std::string>()};
}

// --- oracle ---

OraclePolicy::OraclePolicy(World world, AgentConfig cfg)
    : world_(std::move(world)), cfg_(cfg) {}

std::string OraclePolicy::Step(const PolicyRequest& req) const {
  const auto& visible = req.current.visible;
  const auto it = std::find_if(visible.begin(), visible.end(),
                               [&](const VisibleEntity& v) { return v.id == world_.goal.target; });
  if (it == visible.end()) return FormatTurn(kScanDeg);
  const double distance = it->distance;
  const double bearing = it->bearing;
  if (distance <= kArriveDist && std::fabs(bearing) <= kArriveBearing) {
    return world_.goal.reference_nla;
  }

  const double turn = std::clamp(bearing, -kMaxTurnDeg, kMaxTurnDeg);
  const double move = std::min(distance - kStandoff, kMaxStep);
  ActionSequence plan;
  if (std::fabs(turn) >= 0.05) plan.slas.push_back(MakeSignedAction(ActionKind::kTurn, turn));
  if (move >= 0.005) plan.slas.push_back(MakeSignedAction(ActionKind::kMove, move));
  plan = Canonicalize(plan);
  if (plan.slas.empty()) return FormatTurn(turn >= 0 ? 1.0 : -1.0);

  // Check the planned path without noise; sidestep when it would collide.
  AgentConfig quiet = cfg_;
  quiet.noise = NoiseConfig{0.0, 0.0};
  Rng unused(0);
  if (ExecuteSlas(req.pose, plan.slas, quiet, unused, world_).collisions == 0) {
    return Serialize(plan);
  }
  ActionSequence best;
  double best_score = -1.0;
  for (Direction side : {Direction::kLeft, Direction::kRight}) {
    ActionSequence option;
    if (std::fabs(turn) >= 0.05) option.slas.push_back(MakeSignedAction(ActionKind::kTurn, turn));
    option.slas.push_back(StructuredAction{ActionKind::kSidewalk, side, kSidestep});
    option = Canonicalize(option);
    const SequenceOutcome out = ExecuteSlas(req.pose, option.slas, quiet, unused, world_);
    // Prefer a free sidestep, then one whose onward straight path is free.
    double score = PlanarDistance(out.pose, req.pose);
    if (out.collisions == 0) {
      score += 10.0;
      const StructuredAction onward{ActionKind::kMove, Direction::kForward, std::max(move, 0.01)};
      if (!ApplySla(out.pose, onward, quiet, unused, world_).collided) score += 10.0;
    }
    if (score > best_score) {
      best_score = score;
      best = option;
    }
  }
  return Serialize(best);
}

std::string OraclePolicy::HandleLine(const std::string& line) const {
  const PolicyRequest req = RequestFromJson(json::parse(line));
  return ResponseToJson(PolicyResponse{Step(req)}).dump();
}

// --- runner ---

json EpisodeResultToJson(const EpisodeResult& r) {
  json log = json::array();
  for (const auto& s : r.log) {
    log.push_back(json{{"step", s.step},
                       {"responses", s.responses},
                       {"executed", s.executed},
                       {"collisions", s.collisions},
                       {"pose", PoseToJson(s.pose)}});
  }
  json trace = json::array();
  for (const auto& p : r.pose_trace) trace.push_back(PoseToJson(p));
  json terminal = nullptr;
  if (r.terminal) terminal = json{{"text", r.terminal->text}, {"route", RouteName(r.terminal->route)}};
  return json{{"episode_id", r.episode_id},
              {"instruction", r.instruction},
              {"seed", r.seed},
              {"log", std::move(log)},
              {"pose_trace", std::move(trace)},
              {"final_pose", PoseToJson(r.final_pose)},
              {"terminal", std::move(terminal)},
              {"truncated", r.truncated},
              {"protocol_failure", r.protocol_failure},
              {"collisions", r.collisions},
              {"wall_steps", r.wall_steps},
              {"decision_steps", r.decision_steps},
              {"retries", r.retries},
              {"final_observation", ObservationToJson(r.final_observation)},
              {"reference_observation", ObservationToJson(r.reference_observation)},
              {"goal", {{"target", r.goal.target},
                        {"reference_pose", PoseToJson(r.goal.reference_pose)},
                        {"reference_nla", r.goal.reference_nla},
                        {"instruction", r.goal.instruction}}}};
}

EpisodeResult EpisodeResultFromJson(const json& j) {
  try {
    EpisodeResult r;
    r.episode_id = j.at("episode_id").get<std::string>();
    r.instruction = j.at("instruction").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("log")) {
      r.log.push_back(StepRecord{s.at("step").get<std::size_t>(),
                                 s.at("responses").get<std::vector<std::string>>(),
                                 s.at("executed").get<std::string>(),
                                 s.at("collisions").get<std::size_t>(), PoseFromJson(s.at("pose"))});
    }
    for (const auto& p : j.at("pose_trace")) r.pose_trace.push_back(PoseFromJson(p));
    r.final_pose = PoseFromJson(j.at("final_pose"));
    const json& t = j.at("terminal");
    if (!t.is_null()) {
      const auto route = RouteFromName(t.at("route").get<std::string>());
      if (!route) throw Error(ErrorCode::kParseError, "terminal.route: unknown route");
      r.terminal = NaturalAction{t.at("text").get<std::string>(), *route};
    }
    r.truncated = j.at("truncated").get<bool>();
    r.protocol_failure = j.at("protocol_failure").get<bool>();
    r.collisions = j.at("collisions").get<std::size_t>();
    r.wall_steps = j.at("wall_steps").get<std::size_t>();
    r.decision_steps = j.at("decision_steps").get<std::size_t>();
    r.retries = j.at("retries").get<std::size_t>();
    r.final_observation = ObservationFromJson(j.at("final_observation"));
    r.reference_observation = ObservationFromJson(j.at("reference_observation"));
    const json& g = j.at("goal");
    r.goal.target = g.at("target").get<std::string>();
    r.goal.reference_pose = PoseFromJson(g.at("reference_pose"));
    r.goal.reference_nla = g.at("reference_nla").get<std::string>();
    r.goal.instruction = g.value("instruction", "");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("episode result: ") + e.what());
  }
}

EpisodeResult RunEpisode(const World& world, const Pose& start, PolicyEndpoint& policy,
                         const RunConfig& cfg, const std::string& episode_id) {
  const AgentConfig agent = world.agent.value_or(AgentConfig{});
  Rng rng(MixSeed(cfg.seed, HashString(episode_id)));

  EpisodeResult result;
  result.episode_id = episode_id;
  result.instruction = EpisodeInstruction(world);
  result.seed = cfg.seed;
  result.goal = world.goal;
  result.final_pose = Normalized(start);
  result.pose_trace.push_back(result.final_pose);

  std::vector<Observation> observations{Observe(result.final_pose, world, agent, 0)};
  std::vector<std::string> actions;

  while (result.decision_steps < cfg.max_steps) {
    const std::size_t t = observations.size() - 1;
    const ContextSelection sel = SelectContext(t, 1, 0);
    PolicyRequest req;
    req.episode_id = episode_id;
    req.step = t;
    req.instruction = result.instruction;
    for (std::size_t i : sel.historical) req.historical.push_back(observations[i]);
    for (std::size_t i : sel.recent) {
      req.recent.push_back(RecentEntry{observations[i],
                                       i < t ? std::optional<std::string>(actions[i]) : std::nullopt});
    }
    req.current = observations[t];
    req.pose = result.final_pose;
    req.decode = cfg.decode;
    const std::string line = RequestToJson(req).dump();

    StepRecord record;
    record.step = t;
    std::optional<ActionSequence> seq;
    for (std::size_t attempt = 0; attempt <= cfg.retries; ++attempt) {
      if (attempt > 0) ++result.retries;
      const std::string reply = policy.Exchange(line, cfg.timeout_s);
      record.responses.push_back(reply);
      try {
        const PolicyResponse resp = ResponseFromJson(json::parse(reply));
        seq = Canonicalize(ParseSequence(resp.action_text, cfg.router), cfg.router);
        break;
      } catch (const json::exception&) {
      } catch (const Error&) {
      }
    }
    ++result.decision_steps;
    if (!seq) {
      result.protocol_failure = true;
      result.log.push_back(std::move(record));
      break;
    }

    const SequenceOutcome out = ExecuteSlas(result.final_pose, seq->slas, agent, rng, world);
    result.final_pose = out.pose;
    result.collisions += out.collisions;
    result.wall_steps += out.trace.size();
    result.pose_trace.insert(result.pose_trace.end(), out.trace.begin(), out.trace.end());
    record.executed = Serialize(*seq);
    record.collisions = out.collisions;
    record.pose = out.pose;
    result.log.push_back(record);

    if (seq->terminal) {
      result.terminal = seq->terminal;
      break;
    }
    Observation next = Observe(result.final_pose, world, agent, t + 1);
    next.collided_last_step = out.collisions > 0;
    observations.push_back(std::move(next));
    actions.push_back(record.executed);
  }

  result.truncated = !result.terminal.has_value();
  result.final_observation = Observe(result.final_pose, world, agent, observations.size());
  result.reference_observation = Observe(world.goal.reference_pose, world, agent, 0);
  return result;
}

}  // namespace egoact
