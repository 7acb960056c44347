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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <condition_variable>
#include <mutex>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "egoact/dataset.h"
#include "egoact/error.h"
#include "egoact/random.h"

namespace egoact {
namespace {

using nlohmann::json;

World EmptyWorld(double target_x = 3.0, double target_y = 0.0) {
  World w;
  w.bounds = {-6, -6, 6, 6};
  w.entities.push_back({"person_1", EntityCategory::kPerson, target_x, target_y, 1.4, {}});
  const double d = std::hypot(target_x, target_y);
  Pose ref;
  ref.x = target_x - 0.6 * target_x / d;
  ref.y = target_y - 0.6 * target_y / d;
  ref.yaw = std::atan2(target_y, target_x) * 180.0 / 3.14159265358979323846;
  w.goal = {"person_1", ref, "say hi", ""};
  return w;
}

std::string Reply(const std::string& text) {
  return ResponseToJson(PolicyResponse{text}).dump();
}

// In-process scripted policy that records every request it sees.
struct Scripted {
  explicit Scripted(std::vector<std::string> r) : replies(std::move(r)) {}

  std::vector<std::string> replies;
  std::vector<PolicyRequest> seen;
  std::size_t next = 0;

  std::unique_ptr<PolicyEndpoint> Endpoint() {
    return MakeFunctionEndpoint([this](const std::string& line) {
      seen.push_back(RequestFromJson(json::parse(line)));
      return replies[std::min(next++, replies.size() - 1)];
    });
  }
};

std::string WriteScript(const std::string& name, const std::string& body) {
  const std::string path = std::string(EGOACT_TEST_TMP) + "/" + name;
  std::ofstream(path) << body;
  return path;
}

std::string ExecCommand(const std::string& script) {
  return std::string(EGOACT_SCRIPTED_POLICY) + " " + script;
}

TEST_CASE("stop on the first step leaves the pose unchanged") {
  const World w = EmptyWorld();
  Scripted s({Reply("Stop and no action")});
  auto ep = s.Endpoint();
  Pose start{1.0, -2.0, 0.0, 45.0, 0.0};
  auto r = RunEpisode(w, start, *ep, RunConfig{}, "ep");
  CHECK(r.decision_steps == 1);
  CHECK(r.final_pose == start);
  REQUIRE(r.terminal.has_value());
  CHECK(r.terminal->route == Route::kStop);
  CHECK_FALSE(r.truncated);
  CHECK(r.retries == 0);
}

TEST_CASE("malformed replies consume the retry budget") {
  const World w = EmptyWorld();
  Scripted s({"not json", Reply("Jump over 3 walls; Move forward 1 meters"), Reply("Stop and no action")});
  auto ep = s.Endpoint();
  auto r = RunEpisode(w, Pose{}, *ep, RunConfig{}, "ep");
  CHECK(r.retries == 2);
  CHECK(r.decision_steps == 1);
  CHECK(r.log.at(0).responses.size() == 3);
  REQUIRE(r.terminal.has_value());
  CHECK_FALSE(r.protocol_failure);

  Scripted bad({"{}", R"({"version":"egoact/2","action_text":"Stop and no action"})",
                Reply("Turn left 0 degrees")});
  auto ep2 = bad.Endpoint();
  auto t = RunEpisode(w, Pose{}, *ep2, RunConfig{}, "ep");
  CHECK(t.truncated);
  CHECK(t.protocol_failure);
  CHECK_FALSE(t.terminal.has_value());
  CHECK(t.decision_steps == 1);
}

TEST_CASE("clauses after a terminal action are never executed") {
  const World w = EmptyWorld();
  Scripted s({Reply("say hi; Move forward 1.00 meters"), Reply("Move forward 0.50 meters; say hi")});
  auto ep = s.Endpoint();
  RunConfig cfg;
  auto r = RunEpisode(w, Pose{}, *ep, cfg, "ep");
  CHECK(r.retries == 1);
  REQUIRE(r.terminal.has_value());
  CHECK(r.terminal->route == Route::kGesture);
  CHECK(r.wall_steps == 1);
  CHECK(r.log.at(0).executed == "Move forward 0.50 meters; say hi");
}

TEST_CASE("step budget truncates the episode") {
  const World w = EmptyWorld();
  Scripted s({Reply("Turn left 10 degrees")});
  auto ep = s.Endpoint();
  RunConfig cfg;
  cfg.max_steps = 7;
  auto r = RunEpisode(w, Pose{}, *ep, cfg, "ep");
  CHECK(r.decision_steps == 7);
  CHECK(r.truncated);
  CHECK_FALSE(r.protocol_failure);
  CHECK(s.seen.size() == 7);
  CHECK(r.log.at(0).executed == "Turn left 10.0 degrees");
}

TEST_CASE("requests carry the selected history") {
  const World w = EmptyWorld();
  Scripted s({Reply("Turn left 20 degrees; Move forward 0.1 meters"), Reply("Turn right 5 degrees"),
              Reply("Look up 3 degrees")});
  auto ep = s.Endpoint();
  RunConfig cfg;
  cfg.max_steps = 20;
  cfg.decode = json{{"temperature", 0.2}};
  auto r = RunEpisode(w, Pose{}, *ep, cfg, "ep");
  REQUIRE(s.seen.size() == 20);
  for (std::size_t k = 0; k < s.seen.size(); ++k) {
    const PolicyRequest& req = s.seen[k];
    CHECK(req.step == k);
    CHECK(req.decode == cfg.decode);
    const ContextSelection sel = SelectContext(k, 1, 0);
    REQUIRE(req.recent.size() == std::min<std::size_t>(k + 1, 3));
    CHECK(req.historical.size() == sel.historical.size());
    CHECK(req.recent.back().observation == req.current);
    CHECK_FALSE(req.recent.back().action.has_value());
    CHECK(req.current.step == k);
    for (std::size_t i = 0; i + 1 < req.recent.size(); ++i) {
      const std::size_t idx = sel.recent[i];
      CHECK(req.recent[i].observation.step == idx);
      REQUIRE(req.recent[i].action.has_value());
      CHECK(*req.recent[i].action == r.log.at(idx).executed);
    }
    for (std::size_t i = 0; i < req.historical.size(); ++i) {
      CHECK(req.historical[i].step == sel.historical[i]);
    }
  }
  CHECK(r.log.at(0).executed == "Turn left 20.0 degrees; Move forward 0.10 meters");
}

TEST_CASE("wire payloads round-trip") {
  PolicyRequest req;
  req.episode_id = "e1";
  req.step = 4;
  req.instruction = "Go to the door";
  req.historical = {Observation{1, {}, false}};
  VisibleEntity v{"door", EntityCategory::kDoor, {{"color", "red"}}, 2.5, -10.0, 3.0};
  req.current = Observation{4, {v}, true};
  req.recent = {{Observation{3, {}, false}, std::string("Turn left 5.0 degrees")},
                {req.current, std::nullopt}};
  req.pose = Pose{1, 2, 0.1, 30, -5};
  CHECK(RequestFromJson(json::parse(RequestToJson(req).dump())) == req);
  CHECK_FALSE(RequestToJson(req).contains("decode"));
  CHECK(RequestToJson(req)["version"] == "egoact/1");

  json wrong = RequestToJson(req);
  wrong["version"] = "egoact/0";
  CHECK_THROWS_AS(RequestFromJson(wrong), Error);
  CHECK(ResponseFromJson(json::parse(Reply("say hi"))).action_text == "say hi");
}

TEST_CASE("oracle decision rules") {
  World w = EmptyWorld();
  OraclePolicy oracle(w, AgentConfig{});
  PolicyRequest req;
  req.current.visible = {{"person_1", EntityCategory::kPerson, {}, 4.0, 50.0, 0.0}};
  CHECK(oracle.Step(req) == "Turn left 30.0 degrees; Move forward 1.00 meters");
  req.current.visible = {{"person_1", EntityCategory::kPerson, {}, 0.7, 5.0, 0.0}};
  CHECK(oracle.Step(req) == "say hi");
  req.current.visible = {{"person_1", EntityCategory::kPerson, {}, 2.0, -12.0, 0.0}};
  CHECK(oracle.Step(req) == "Turn right 12.0 degrees; Move forward 1.00 meters");
  req.current.visible = {{"person_1", EntityCategory::kPerson, {}, 1.3, 0.0, 0.0}};
  CHECK(oracle.Step(req) == "Move forward 0.70 meters");
  req.current.visible.clear();
  CHECK(oracle.Step(req) == "Turn left 30.0 degrees");
}

TEST_CASE("oracle sidesteps a blocked path") {
  World w = EmptyWorld();
  w.obstacles.push_back(Rect{0.8, -0.2, 1.0, 0.2});
  OraclePolicy oracle(w, AgentConfig{});
  PolicyRequest req;
  req.current.visible = {{"person_1", EntityCategory::kPerson, {}, 3.0, 0.0, 0.0}};
  const std::string reply = oracle.Step(req);
  CHECK(reply.find("sidewalk 0.40 meters") != std::string::npos);
}

TEST_CASE("oracle reaches a goal three meters ahead") {
  const World w = EmptyWorld();
  OraclePolicy oracle(w, AgentConfig{});
  auto ep = MakeFunctionEndpoint([&](const std::string& l) { return oracle.HandleLine(l); });
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RunConfig cfg;
    cfg.seed = seed;
    auto r = RunEpisode(w, Pose{}, *ep, cfg, "ahead");
    REQUIRE(r.terminal.has_value());
    CHECK(r.terminal->text == "say hi");
    CHECK(PlanarDistance(r.final_pose, w.goal.reference_pose) < 0.5);
    CHECK(r.collisions == 0);
  }
}

TEST_CASE("oracle distance decreases once the target is visible") {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    World w = EmptyWorld(rng.Uniform(-4, 4), rng.Uniform(-4, 4));
    w.agent = AgentConfig::Noiseless();
    const Entity& target = *w.FindEntity("person_1");
    const double dist = std::hypot(target.x, target.y);
    if (dist < 1.5 || dist > 4.5) continue;
    OraclePolicy oracle(w, *w.agent);
    auto ep = MakeFunctionEndpoint([&](const std::string& l) { return oracle.HandleLine(l); });
    const Pose start{0, 0, 0, rng.Uniform(-180, 180), 0};
    auto r = RunEpisode(w, start, *ep, RunConfig{}, "conv");
    INFO(target.x << "," << target.y << " yaw " << start.yaw << " last " << r.log.back().executed);
    REQUIRE(r.terminal.has_value());
    Pose before = start;
    bool seen = false;
    for (const auto& step : r.log) {
      seen = seen || IsVisible(before, target, w, *w.agent);
      const double d0 = std::hypot(before.x - target.x, before.y - target.y);
      const double d1 = std::hypot(step.pose.x - target.x, step.pose.y - target.y);
      if (seen && step.executed.find("Move") != std::string::npos) CHECK(d1 < d0);
      before = step.pose;
    }
    CHECK(seen);
  }
}

TEST_CASE("exec endpoint speaks the protocol") {
  const World w = EmptyWorld();
  const std::string script =
      WriteScript("exec_ok.txt", "!raw garbage\nMove forward 0.26 meters\nStop and no action\n");
  auto ep = MakeProcessEndpoint(ExecCommand(script));
  AgentConfig parity = AgentConfig::DeployParity();
  parity.noise = NoiseConfig{0, 0};
  World pw = w;
  pw.agent = parity;
  auto r = RunEpisode(pw, Pose{}, *ep, RunConfig{}, "exec");
  CHECK(r.retries == 1);
  CHECK(r.decision_steps == 2);
  CHECK(std::fabs(r.final_pose.x - 0.312) < 1e-9);
  REQUIRE(r.terminal.has_value());
  CHECK(r.terminal->route == Route::kStop);
}

TEST_CASE("exec endpoint timeouts and disconnects") {
  const World w = EmptyWorld();
  RunConfig cfg;
  cfg.timeout_s = 0.2;
  {
    auto ep = MakeProcessEndpoint(ExecCommand(WriteScript("slow.txt", "!sleep 2000\nStop and no action\n")));
    try {
      RunEpisode(w, Pose{}, *ep, cfg, "slow");
      FAIL("expected a timeout");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kPolicyTimeout);
    }
  }
  {
    auto ep = MakeProcessEndpoint(ExecCommand(WriteScript("gone.txt", "!exit\n")));
    try {
      RunEpisode(w, Pose{}, *ep, cfg, "gone");
      FAIL("expected a protocol error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kProtocolError);
    }
  }
}

TEST_CASE("tcp endpoint matches the in-process oracle") {
  const World w = EmptyWorld(2.0, 2.5);
  OraclePolicy oracle(w, AgentConfig{});
  const LineHandler handler = [&](const std::string& l) { return oracle.HandleLine(l); };
  int port = 0;
  std::mutex m;
  std::condition_variable cv;
  std::thread server([&] {
    ServeTcp(0, handler, [&](int p) {
      std::lock_guard<std::mutex> lock(m);
      port = p;
      cv.notify_one();
    }, 1);
  });
  {
    std::unique_lock<std::mutex> lock(m);
    cv.wait(lock, [&] { return port != 0; });
  }
  RunConfig cfg;
  cfg.seed = 42;
  EpisodeResult remote;
  {
    auto ep = MakeTcpEndpoint("127.0.0.1:" + std::to_string(port));
    remote = RunEpisode(w, Pose{}, *ep, cfg, "tcp");
  }
  server.join();
  auto local_ep = MakeFunctionEndpoint(handler);
  const EpisodeResult local = RunEpisode(w, Pose{}, *local_ep, cfg, "tcp");
  CHECK(EpisodeResultToJson(remote).dump() == EpisodeResultToJson(local).dump());
  CHECK(remote.terminal.has_value());
}

TEST_CASE("episode results round-trip through json") {
  const World w = EmptyWorld(1.0, -2.0);
  OraclePolicy oracle(w, AgentConfig{});
  auto ep = MakeFunctionEndpoint([&](const std::string& l) { return oracle.HandleLine(l); });
  RunConfig cfg;
  cfg.seed = 3;
  const EpisodeResult r = RunEpisode(w, Pose{}, *ep, cfg, "rt");
  const json j = EpisodeResultToJson(r);
  CHECK(EpisodeResultFromJson(json::parse(j.dump())) == r);
  CHECK(r.terminal.has_value() != r.truncated);
}

TEST_CASE("served lines answer malformed requests with an error record") {
  std::istringstream in("not a request\n");
  std::ostringstream out;
  OraclePolicy oracle(EmptyWorld(), AgentConfig{});
  ServeLines(in, out, [&](const std::string& l) { return oracle.HandleLine(l); });
  const json reply = json::parse(out.str());
  CHECK(reply.contains("error"));
  CHECK_THROWS_AS(ResponseFromJson(reply), Error);
}

}  // namespace
}  // namespace egoact
