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

// Closed-loop episode execution against a policy that speaks the "egoact/1"
// line protocol, plus the scripted oracle policy used by the benchmark.

#ifndef EGOACT_RUNNER_H_
#define EGOACT_RUNNER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "egoact/grammar.h"
#include "egoact/pose.h"
#include "egoact/world.h"
#include "json.hpp"

namespace egoact {

inline constexpr std::string_view kWireVersion = "egoact/1";

struct RecentEntry {
  Observation observation;
  std::optional<std::string> action;  // empty for the current observation

  bool operator==(const RecentEntry&) const = default;
};

struct PolicyRequest {
  std::string episode_id;
  std::size_t step = 0;
  std::string instruction;
  std::vector<Observation> historical;
  std::vector<RecentEntry> recent;  // oldest first; last is `current`
  Observation current;
  Pose pose;                       // odometry estimate of the agent
  nlohmann::json decode;           // passed through untouched; null if unset

  bool operator==(const PolicyRequest&) const = default;
};

struct PolicyResponse {
  std::string action_text;
};

nlohmann::json RequestToJson(const PolicyRequest& req);
// Throws kProtocolError on a missing field or a version mismatch.
PolicyRequest RequestFromJson(const nlohmann::json& j);
nlohmann::json ResponseToJson(const PolicyResponse& resp);
PolicyResponse ResponseFromJson(const nlohmann::json& j);

// One request line out, one response line back (no trailing newline in
// either). Implementations throw kPolicyTimeout when no full line arrives in
// time and kProtocolError when the peer disappears.
class PolicyEndpoint {
 public:
  virtual ~PolicyEndpoint() = default;
  virtual std::string Exchange(const std::string& request_line, double timeout_s) = 0;
};

using LineHandler = std::function<std::string(const std::string&)>;

// In-process endpoint; the handler sees the same bytes a remote policy would.
std::unique_ptr<PolicyEndpoint> MakeFunctionEndpoint(LineHandler handler);
// Spawns `command` under /bin/sh and talks over its stdin/stdout.
std::unique_ptr<PolicyEndpoint> MakeProcessEndpoint(const std::string& command);
// Connects to "host:port".
std::unique_ptr<PolicyEndpoint> MakeTcpEndpoint(const std::string& address);

// Scripted greedy controller with privileged access to the world.
class OraclePolicy {
 public:
  explicit OraclePolicy(World world, AgentConfig cfg);

  std::string Step(const PolicyRequest& req) const;
  // Parses a request line and returns a response line.
  std::string HandleLine(const std::string& line) const;

  static constexpr double kScanDeg = 30.0;
  static constexpr double kMaxTurnDeg = 30.0;
  static constexpr double kStandoff = 0.6;
  static constexpr double kMaxStep = 1.0;
  static constexpr double kSidestep = 0.4;
  static constexpr double kArriveDist = 0.8;
  static constexpr double kArriveBearing = 15.0;

 private:
  World world_;
  AgentConfig cfg_;
};

// Serves request lines from `in` until EOF. Malformed requests get an
// {"version","error"} reply so the runner can retry.
void ServeLines(std::istream& in, std::ostream& out, const LineHandler& handler);
// Accepts TCP connections on `port` (0 picks one) and serves each in turn.
// `on_listen` receives the bound port. Stops after `max_connections` (0 = never).
void ServeTcp(int port, const LineHandler& handler,
              const std::function<void(int)>& on_listen, std::size_t max_connections = 0);

struct RunConfig {
  std::size_t max_steps = 60;
  std::size_t retries = 2;
  double timeout_s = 30.0;
  nlohmann::json decode;
  std::uint64_t seed = 0;
  RouterConfig router;
};

struct StepRecord {
  std::size_t step = 0;
  std::vector<std::string> responses;  // every reply, including rejected ones
  std::string executed;                // canonical serialization
  std::size_t collisions = 0;
  Pose pose;                           // after execution

  bool operator==(const StepRecord&) const = default;
};

struct EpisodeResult {
  std::string episode_id;
  std::string instruction;
  std::uint64_t seed = 0;
  std::vector<StepRecord> log;
  std::vector<Pose> pose_trace;  // start, then after every primitive
  Pose final_pose;
  std::optional<NaturalAction> terminal;
  bool truncated = false;
  bool protocol_failure = false;
  std::size_t collisions = 0;
  std::size_t wall_steps = 0;  // executed primitives
  std::size_t decision_steps = 0;
  std::size_t retries = 0;
  Observation final_observation;
  Observation reference_observation;
  GoalSpec goal;

  bool operator==(const EpisodeResult&) const = default;
};

nlohmann::json EpisodeResultToJson(const EpisodeResult& r);
EpisodeResult EpisodeResultFromJson(const nlohmann::json& j);

// Observe -> query -> parse -> execute until a terminal NLA or the step
// budget. Malformed replies are retried up to cfg.retries times per step,
// after which the episode is truncated with protocol_failure set.
EpisodeResult RunEpisode(const World& world, const Pose& start, PolicyEndpoint& policy,
                         const RunConfig& cfg, const std::string& episode_id);

}  // namespace egoact

#endif  // EGOACT_RUNNER_H_
