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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. Each check uses oracles written independently of the library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "egoact/dataset.h"
#include "egoact/error.h"
#include "egoact/eval.h"
#include "egoact/pose.h"
#include "egoact/random.h"
#include "egoact/runner.h"
#include "egoact/world.h"

namespace fs = std::filesystem;

namespace egoact {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

// --- grammar ---

ActionSequence RandomSequence(Rng& rng) {
  static const std::vector<std::string> kNlas = {
      "Say hi to the boy", "Pick up the water bottle", "Ask \"Where is the bathroom?\"",
      "Open the door", "Stop and no action", "Confirm with the woman in front of you"};
  ActionSequence s;
  const std::size_t n = rng.Index(5);
  for (std::size_t i = 0; i < n; ++i) {
    const auto kind = static_cast<ActionKind>(rng.Index(5));
    const bool angular = kind == ActionKind::kTurn || kind == ActionKind::kLook;
    double mag = angular ? rng.Uniform(0.01, 180.0) : rng.Uniform(0.001, 3.0);
    s.slas.push_back(MakeSignedAction(kind, rng.Uniform01() < 0.5 ? mag : -mag));
  }
  if (n == 0 || rng.Uniform01() < 0.4) {
    s.terminal = RouteNla(kNlas[rng.Index(kNlas.size())]);
  }
  return s;
}

Outcome GrammarRoundTrip() {
  Outcome o;
  const auto start = Clock::now();
  Rng rng(2024);
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const ActionSequence s = RandomSequence(rng);
    try {
      if (!(ParseSequence(Serialize(s)) == Canonicalize(s))) ++mismatches;
    } catch (const Error&) {
      ++mismatches;
    }
  }
  o.Require(mismatches == 0, std::to_string(mismatches) + " round-trip mismatches");

  static const std::vector<std::string> kPieces = {
      "Turn", "Look", "Move", "Rise", "Lower", "left", "right", "up", "down", "forward",
      "backward", "sidewalk", "Left", "degrees", "meters", "degree", "-3", "0", "1.5", ".5",
      "1e9", "nan", ";", ";;", " ", "\t", "Stop and no action", "say hi", "\xff", "\"", "1..2"};
  std::size_t crashes = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string text;
    const std::size_t parts = rng.Index(12);
    for (std::size_t p = 0; p < parts; ++p) {
      if (rng.Uniform01() < 0.2) {
        text.push_back(static_cast<char>(rng.Index(256)));
      } else {
        text += kPieces[rng.Index(kPieces.size())];
        if (rng.Uniform01() < 0.7) text.push_back(' ');
      }
    }
    try {
      (void)ParseSequence(text);
    } catch (const Error&) {
    } catch (...) {
      ++crashes;
    }
  }
  o.Require(crashes == 0, std::to_string(crashes) + " fuzz crashes");
  const double elapsed = Seconds(start);
  o.Require(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
  o.detail = o.pass ? "1000 round-trips, 10000 fuzz strings in " + std::to_string(elapsed) + " s"
                    : o.detail;
  return o;
}

Outcome RoutingTable() {
  Outcome o;
  const std::vector<std::pair<std::string, Route>> table = {
      {"Confirm with the woman in front of you", Route::kGesture},
      {"Say hi to the boy", Route::kGesture},
      {"Speak \"How you doing?\"", Route::kSpeech},
      {"Ask \"Where is the bathroom?\"", Route::kSpeech},
      {"Pick up the water bottle", Route::kManipulation},
      {"Pull the drawer", Route::kManipulation},
      {"Place the plate on the desk", Route::kManipulation},
      {"Open the door", Route::kManipulation},
      {"Close the door", Route::kManipulation},
      {"Wash hands", Route::kManipulation},
      {"Pour from the bottle into the cup", Route::kManipulation},
      {"Turn on the washing machine", Route::kManipulation},
      {"Turn off the lamp", Route::kManipulation},
      {"Point to the painting", Route::kManipulation},
      {"Drop the garbage", Route::kManipulation},
      {"Stop and no action", Route::kStop},
  };
  for (const auto& [text, route] : table) {
    const ActionSequence seq = ParseSequence(text);
    const bool ok = seq.slas.empty() && seq.terminal && seq.terminal->route == route;
    o.Require(ok, "\"" + text + "\" misrouted");
  }
  if (o.pass) o.detail = std::to_string(table.size()) + " table entries routed exactly";
  return o;
}

// Brute-force window aggregation over explicit per-axis sums.
std::vector<StructuredAction> OracleAggregate(const std::vector<PoseDelta>& d) {
  double yaw = 0, pitch = 0, fwd = 0, lat = 0, z = 0;
  for (const auto& x : d) {
    yaw += x.d_yaw;
    pitch += x.d_pitch;
    fwd += x.d_forward;
    lat += x.d_lateral;
    z += x.d_z;
  }
  std::vector<StructuredAction> out;
  if (std::fabs(yaw) >= 5.0) {
    out.push_back({ActionKind::kTurn, yaw > 0 ? Direction::kLeft : Direction::kRight, std::fabs(yaw)});
  }
  if (std::fabs(pitch) >= 5.0) {
    out.push_back({ActionKind::kLook, pitch > 0 ? Direction::kUp : Direction::kDown, std::fabs(pitch)});
  }
  if (std::fabs(fwd) >= 0.1) {
    out.push_back({ActionKind::kMove, fwd > 0 ? Direction::kForward : Direction::kBackward, std::fabs(fwd)});
  }
  if (std::fabs(lat) >= 0.1) {
    out.push_back({ActionKind::kSidewalk, lat > 0 ? Direction::kLeft : Direction::kRight, std::fabs(lat)});
  }
  if (std::fabs(z) >= 0.05) {
    out.push_back({ActionKind::kHeight, z > 0 ? Direction::kRise : Direction::kLower, std::fabs(z)});
  }
  return out;
}

Outcome AggregationOracle() {
  Outcome o;
  Rng rng(77);
  const Thresholds th{5.0, 0.1, 0.05};
  std::size_t bad = 0;
  for (int w = 0; w < 500; ++w) {
    std::vector<PoseDelta> deltas(1 + rng.Index(45));
    for (auto& d : deltas) {
      d = PoseDelta{rng.Uniform(-2, 2), rng.Uniform(-2, 2), rng.Uniform(-0.02, 0.02),
                    rng.Uniform(-0.02, 0.02), rng.Uniform(-0.01, 0.01)};
    }
    if (!(AggregateWindow(deltas, th) == OracleAggregate(deltas))) ++bad;
  }
  o.Require(bad == 0, std::to_string(bad) + " of 500 windows differ");
  const std::vector<PoseDelta> cancel = {PoseDelta{10, 0, 0, 0, 0}, PoseDelta{-10, 0, 0, 0, 0}};
  o.Require(AggregateWindow(cancel, th).empty(), "cancellation emitted actions");
  if (o.pass) o.detail = "500 windows match, [+10,-10] emits nothing";
  return o;
}

Outcome DatasetArithmetic() {
  Outcome o;
  AnnotatedEpisode ep;
  ep.id = "acc";
  ep.fps = 30;
  double x = 0;
  for (std::size_t f = 0; f < 300; ++f) {
    if (f > 0 && !(f > 100 && f <= 160)) x += 0.05;
    ep.frames.push_back({"f" + std::to_string(f) + ".jpg", Pose{x, 0, 0, 0, 0}});
  }
  ep.actions = {{"Get the tank from the table", 100, 160}};
  const auto samples = BuildSamplesAnnotation(ep);
  const EgoSample* manip = nullptr;
  const EgoSample* stop = nullptr;
  for (const auto& s : samples) {
    if (s.target == "Get the tank from the table") manip = &s;
    if (s.target == "Stop and no action") stop = &s;
  }
  o.Require(manip != nullptr, "no manipulation-target sample");
  o.Require(stop != nullptr, "no stop-target sample");
  if (manip) {
    std::vector<std::size_t> recent;
    for (const auto& r : manip->recent) recent.push_back(r.observation.frame.value_or(9999));
    o.Require(recent == std::vector<std::size_t>{90, 95, 100}, "recent frames differ");
    o.Require(manip->historical.size() == 10, "historical count differs");
    o.Require(!manip->historical.empty() && manip->historical.front().frame == 40u,
              "instruction start differs");
  }
  std::size_t earliest = 9999;
  for (const auto& s : samples) {
    for (const auto& h : s.historical) earliest = std::min(earliest, h.frame.value_or(9999));
    for (const auto& r : s.recent) earliest = std::min(earliest, r.observation.frame.value_or(9999));
  }
  o.Require(earliest == 40, "frames before the instruction start are used");
  const std::vector<std::string> two = {"Get the tank from the table", "open the tank"};
  const std::size_t and_then = 0;
  o.Require(JoinInstruction(two, std::span<const std::size_t>(&and_then, 1)) ==
                "Get the tank from the table, and then open the tank",
            "connective example differs");
  if (o.pass) o.detail = "start 40, recent {90,95,100}, 10 historical, both target variants";
  return o;
}

Outcome PromptGoldens() {
  Outcome o;
  for (const auto& [hist, recent] : std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {10, 2}, {10, 3}}) {
    EgoSample s;
    s.instruction = "Approach and grab the toy bear on the white table.";
    for (std::size_t i = 0; i < hist; ++i) s.historical.push_back({"ep", i, "", Resolution::k240p});
    const std::vector<std::string> actions = {"Turn left 30.0 degrees; Move forward 0.26 meters",
                                              "Move forward 0.50 meters"};
    for (std::size_t i = 0; i < recent; ++i) {
      RecentPair p{{"ep", 20 + i, "", Resolution::k480p}, std::nullopt};
      if (i + 1 < recent) p.action = actions[i];
      s.recent.push_back(p);
    }
    const std::string name = "prompt_h" + std::to_string(hist) + "_r" + std::to_string(recent) + ".txt";
    const std::string golden = ReadFile(fs::path(EGOACT_FIXTURE_DIR) / "prompts" / name);
    o.Require(!golden.empty() && RenderPrompt(s) == golden, name + " differs");
  }
  if (o.pass) o.detail = "3 shapes byte-identical";
  return o;
}

Outcome ExecutionConstants() {
  Outcome o;
  World w;
  w.bounds = {-100, -100, 100, 100};
  w.entities.push_back({"t", EntityCategory::kObject, 1, 0, 1, {}});
  w.goal = {"t", Pose{}, "x", ""};
  AgentConfig parity = AgentConfig::DeployParity();
  parity.noise = NoiseConfig{0, 0};
  Rng rng(1);
  const auto moved =
      ApplySla(Pose{}, {ActionKind::kMove, Direction::kForward, 0.26}, parity, rng, w);
  const double disp = std::hypot(moved.pose.x, moved.pose.y);
  o.Require(std::fabs(disp - 0.312) <= 1e-9, "displacement " + std::to_string(disp));

  const AgentConfig noisy;
  double sum = 0;
  int within = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const auto t = ApplySla(Pose{}, {ActionKind::kTurn, Direction::kLeft, 30.0}, noisy, rng, w);
    const double err = t.pose.yaw - 30.0;
    sum += err;
    within += std::fabs(err) <= 5.0 ? 1 : 0;
  }
  const double mean = sum / trials;
  o.Require(std::fabs(mean) < 0.2, "turn error mean " + std::to_string(mean));
  o.Require(within >= trials * 95 / 100, std::to_string(within) + " of 10000 within 5 deg");
  if (o.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "displacement %.10f m, turn mean error %.4f deg, %d/10000 within 5 deg",
                  disp, mean, within);
    o.detail = buf;
  }
  return o;
}

Outcome OracleBenchmark() {
  Outcome o;
  const auto start = Clock::now();
  const MetricConfig metrics;
  std::string summary;
  for (SuiteKind kind : {SuiteKind::kFree, SuiteKind::kSparse}) {
    const std::string suite = SuiteName(kind);
    std::size_t close = 0, exact_nla = 0, collided = 0, drift = 0;
    const std::size_t count = 100;
    const double radius = kind == SuiteKind::kFree ? 0.5 : 0.8;
    for (std::size_t i = 0; i < count; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "%s-%03zu", suite.c_str(), i);
      const fs::path path = fs::path(EGOACT_WORLDS_DIR) / suite / (std::string(id) + ".json");
      const World w = LoadWorldFile(path.string());
      // The shipped worlds must match the generator.
      if (WorldToJson(w) != WorldToJson(GenerateWorld(kind, MixSeed(0, i)))) ++drift;
      OraclePolicy oracle(w, w.agent.value_or(AgentConfig{}));
      auto ep = MakeFunctionEndpoint([&](const std::string& l) { return oracle.HandleLine(l); });
      RunConfig rc;
      rc.seed = MixSeed(0, 0);
      const EpisodeResult r = RunEpisode(w, w.start.value_or(Pose{}), *ep, rc, id);
      const bool f1_one = r.terminal && UnigramF1(r.terminal->text, w.goal.reference_nla) == 1.0;
      const bool ok = !r.truncated && r.decision_steps <= 60 && GoalDistance(r) < radius;
      close += ok ? 1 : 0;
      exact_nla += (ok && f1_one) ? 1 : 0;
      collided += r.collisions > 0 ? 1 : 0;
    }
    o.Require(drift == 0, suite + ": " + std::to_string(drift) + " shipped worlds differ from the generator");
    char buf[200];
    if (kind == SuiteKind::kFree) {
      o.Require(exact_nla >= 95, suite + ": only " + std::to_string(exact_nla) + "/100 under 0.5 m with F1 1");
      std::snprintf(buf, sizeof buf, "free %zu/100 <0.5 m with F1=1", exact_nla);
    } else {
      o.Require(close >= 80, suite + ": only " + std::to_string(close) + "/100 under 0.8 m");
      o.Require(collided <= 5, suite + ": collision rate " + std::to_string(collided) + "%");
      std::snprintf(buf, sizeof buf, "sparse %zu/100 <0.8 m, collision rate %zu%%", close, collided);
    }
    summary += (summary.empty() ? "" : ", ") + std::string(buf);
  }
  const double elapsed = Seconds(start);
  o.Require(elapsed < 60.0, "took " + std::to_string(elapsed) + " s");
  if (o.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " in %.2f s", elapsed);
    o.detail = summary + buf;
  }
  return o;
}

Outcome Metrics() {
  Outcome o;
  const double f1 = UnigramF1("Pick up the red apple", "Pick up the apple");
  o.Require(std::fabs(f1 - 8.0 / 9.0) <= 1e-9, "f1 " + std::to_string(f1));

  Rng rng(5);
  MetricConfig cfg;
  bool monotone = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<EpisodeResult> results(1 + rng.Index(30));
    for (auto& r : results) {
      r.final_pose.x = rng.Uniform(0, 5);
      r.final_pose.y = rng.Uniform(0, 5);
      r.truncated = rng.Uniform01() < 0.3;
      if (!r.truncated) r.terminal = NaturalAction{"x", Route::kManipulation};
    }
    const auto rates = DistanceSuccessCurve(results, cfg);
    for (std::size_t k = 1; k < rates.size(); ++k) monotone = monotone && rates[k] >= rates[k - 1];
  }
  o.Require(monotone, "non-monotone curve");

  const std::vector<double> th = {0.5};
  std::vector<RunMetrics> runs;
  for (double rate : {0.48, 0.52, 0.54}) runs.push_back(RunMetrics{{"e"}, {rate}, rate / 2, rate / 4, 0, 0});
  const EvalReport report = AggregateReport(runs, th);
  // Hand arithmetic: (0.48 + 0.52 + 0.54) / 3 = 1.54 / 3.
  o.Require(std::fabs(report.success_rates[0] - 1.54 / 3) <= 1e-12, "rate mean");
  o.Require(std::fabs(report.mean_f1 - 0.77 / 3) <= 1e-12, "f1 mean");
  o.Require(std::fabs(report.mean_similarity - 0.385 / 3) <= 1e-12, "similarity mean");
  if (o.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "f1 %.12f, 1000 monotone curves, mean %.12f", f1, report.success_rates[0]);
    o.detail = buf;
  }
  return o;
}

Outcome Determinism() {
  Outcome o;
  const fs::path base = fs::path(EGOACT_TEST_TMP) / "determinism";
  fs::remove_all(base);
  const std::string worlds = std::string(" --world ") + EGOACT_WORLDS_DIR + "/demo_wall.json --world " +
                             EGOACT_WORLDS_DIR + "/sparse/sparse-003.json --world " +
                             EGOACT_WORLDS_DIR + "/free/free-000.json";
  std::vector<std::string> reports;
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string(EGOACT_CLI) + " simulate" + worlds +
                            " --policy oracle --seed 42 --out " + (base / run).string() + " > /dev/null";
    o.Require(std::system(cmd.c_str()) == 0, std::string("simulate run ") + run + " failed");
  }
  std::size_t files = 0;
  for (const char* name : {"run1.jsonl", "run2.jsonl", "run3.jsonl", "report.json", "report.txt"}) {
    const std::string a = ReadFile(base / "a" / name);
    const std::string b = ReadFile(base / "b" / name);
    o.Require(!a.empty() && a == b, std::string(name) + " differs");
    ++files;
  }
  if (o.pass) o.detail = std::to_string(files) + " output files byte-identical across two runs";
  return o;
}

}  // namespace
}  // namespace egoact

int main() {
  using egoact::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"grammar round-trip and fuzz", egoact::GrammarRoundTrip},
      {"routing table", egoact::RoutingTable},
      {"aggregation oracle", egoact::AggregationOracle},
      {"dataset arithmetic", egoact::DatasetArithmetic},
      {"prompt goldens", egoact::PromptGoldens},
      {"execution constants", egoact::ExecutionConstants},
      {"oracle benchmark", egoact::OracleBenchmark},
      {"metrics", egoact::Metrics},
      {"determinism", egoact::Determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", out.pass ? "PASS" : "FAIL", name, out.detail.c_str());
    failures += out.pass ? 0 : 1;
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
