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

#include "egoact/eval.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "egoact/error.h"
#include "egoact/json_io.h"
#include "egoact/random.h"

namespace egoact {
namespace {

using nlohmann::json;

double Mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

bool Succeeded(const EpisodeResult& r, double threshold) {
  return !r.truncated && !r.protocol_failure && GoalDistance(r) < threshold;
}

}  // namespace

void ValidateMetricConfig(const MetricConfig& cfg) {
  std::vector<std::string> bad;
  if (cfg.thresholds.empty()) bad.push_back("thresholds: empty");
  for (std::size_t i = 0; i < cfg.thresholds.size(); ++i) {
    if (!(cfg.thresholds[i] > 0.0)) bad.push_back("thresholds[" + std::to_string(i) + "]: must be > 0");
    if (i > 0 && !(cfg.thresholds[i] > cfg.thresholds[i - 1])) {
      bad.push_back("thresholds[" + std::to_string(i) + "]: not increasing");
    }
  }
  if (cfg.runs < 1) bad.push_back("runs: must be >= 1");
  if (!bad.empty()) {
    std::string msg;
    for (const auto& b : bad) msg += (msg.empty() ? "" : "; ") + b;
    throw Error(ErrorCode::kInvariantViolation, msg);
  }
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else if (!std::ispunct(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

double UnigramF1(std::string_view predicted, std::string_view reference) {
  const auto pred = Tokenize(predicted);
  const auto ref = Tokenize(reference);
  if (pred.empty() && ref.empty()) return 1.0;
  if (pred.empty() || ref.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : ref) ++counts[t];
  int overlap = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(pred.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(ref.size());
  return 2.0 * p * r / (p + r);
}

double GoalDistance(const EpisodeResult& r) {
  return PlanarDistance(r.final_pose, r.goal.reference_pose);
}

std::vector<double> DistanceSuccessCurve(const std::vector<EpisodeResult>& results,
                                         const MetricConfig& cfg) {
  if (results.empty()) throw Error(ErrorCode::kEmptyResults, "no episode results");
  std::vector<double> rates;
  for (double d : cfg.thresholds) {
    std::size_t hits = 0;
    for (const auto& r : results) hits += Succeeded(r, d) ? 1 : 0;
    rates.push_back(static_cast<double>(hits) / static_cast<double>(results.size()));
  }
  return rates;
}

ScorerRegistry& ScorerRegistry::Default() {
  static ScorerRegistry* registry = [] {
    auto* r = new ScorerRegistry;
    r->Register("visible-set-jaccard", VisibleSetJaccard);
    return r;
  }();
  return *registry;
}

void ScorerRegistry::Register(const std::string& id, ViewScorer scorer) {
  scorers_[id] = std::move(scorer);
}

const ViewScorer& ScorerRegistry::Get(const std::string& id) const {
  const auto it = scorers_.find(id);
  if (it == scorers_.end()) throw Error(ErrorCode::kUnknownScorer, "no scorer named " + id);
  return it->second;
}

double VisibleSetJaccard(const Observation& a, const Observation& b) {
  std::set<std::string> sa, sb;
  for (const auto& v : a.visible) sa.insert(v.id);
  for (const auto& v : b.visible) sb.insert(v.id);
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& id : sa) common += sb.count(id);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

double ViewSimilarity(const Observation& final_view, const Observation& reference,
                      const std::string& scorer, const ScorerRegistry& registry) {
  return registry.Get(scorer)(final_view, reference);
}

RunMetrics ScoreRun(const std::vector<EpisodeResult>& results, const MetricConfig& cfg,
                    const ScorerRegistry& registry) {
  const ViewScorer& scorer = registry.Get(cfg.similarity);
  RunMetrics m;
  m.success_rates = DistanceSuccessCurve(results, cfg);
  std::vector<double> f1, sim;
  std::size_t collided = 0;
  for (const auto& r : results) {
    m.episode_ids.push_back(r.episode_id);
    const std::string predicted = r.terminal ? r.terminal->text : std::string();
    f1.push_back(UnigramF1(predicted, r.goal.reference_nla));
    sim.push_back(scorer(r.final_observation, r.reference_observation));
    collided += r.collisions > 0 ? 1 : 0;
    m.protocol_failures += r.protocol_failure ? 1 : 0;
  }
  std::sort(m.episode_ids.begin(), m.episode_ids.end());
  m.mean_f1 = Mean(f1);
  m.mean_similarity = Mean(sim);
  m.collision_rate = static_cast<double>(collided) / static_cast<double>(results.size());
  return m;
}

EvalReport AggregateReport(const std::vector<RunMetrics>& runs,
                           const std::vector<double>& thresholds) {
  if (runs.empty()) throw Error(ErrorCode::kEmptyResults, "no runs to aggregate");
  EvalReport report;
  report.thresholds = thresholds;
  report.runs = runs;
  report.episodes = runs.front().episode_ids.size();
  for (const auto& run : runs) {
    if (run.episode_ids != runs.front().episode_ids) {
      throw Error(ErrorCode::kMismatchedEpisodeSets, "runs cover different episodes");
    }
    if (run.success_rates.size() != thresholds.size()) {
      throw Error(ErrorCode::kInvariantViolation, "run has a different threshold count");
    }
    report.protocol_failures += run.protocol_failures;
  }
  const double n = static_cast<double>(runs.size());
  report.success_rates.assign(thresholds.size(), 0.0);
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    for (const auto& run : runs) report.success_rates[i] += run.success_rates[i];
    report.success_rates[i] /= n;
  }
  for (const auto& run : runs) {
    report.mean_f1 += run.mean_f1;
    report.mean_similarity += run.mean_similarity;
    report.collision_rate += run.collision_rate;
  }
  report.mean_f1 /= n;
  report.mean_similarity /= n;
  report.collision_rate /= n;
  return report;
}

namespace {

json RunToJson(const RunMetrics& m) {
  return json{{"episode_ids", m.episode_ids},
              {"success_rates", m.success_rates},
              {"mean_f1", m.mean_f1},
              {"mean_similarity", m.mean_similarity},
              {"collision_rate", m.collision_rate},
              {"protocol_failures", m.protocol_failures}};
}

RunMetrics RunFromJson(const json& j) {
  RunMetrics m;
  m.episode_ids = j.at("episode_ids").get<std::vector<std::string>>();
  m.success_rates = j.at("success_rates").get<std::vector<double>>();
  m.mean_f1 = j.at("mean_f1").get<double>();
  m.mean_similarity = j.at("mean_similarity").get<double>();
  m.collision_rate = j.at("collision_rate").get<double>();
  m.protocol_failures = j.at("protocol_failures").get<std::size_t>();
  return m;
}

}  // namespace

json EvalReportToJson(const EvalReport& report) {
  json runs = json::array();
  for (const auto& r : report.runs) runs.push_back(RunToJson(r));
  return json{{"thresholds", report.thresholds},
              {"success_rates", report.success_rates},
              {"mean_f1", report.mean_f1},
              {"mean_similarity", report.mean_similarity},
              {"collision_rate", report.collision_rate},
              {"episodes", report.episodes},
              {"protocol_failures", report.protocol_failures},
              {"runs", std::move(runs)}};
}

EvalReport EvalReportFromJson(const json& j) {
  try {
    EvalReport report;
    report.thresholds = j.at("thresholds").get<std::vector<double>>();
    report.success_rates = j.at("success_rates").get<std::vector<double>>();
    report.mean_f1 = j.at("mean_f1").get<double>();
    report.mean_similarity = j.at("mean_similarity").get<double>();
    report.collision_rate = j.at("collision_rate").get<double>();
    report.episodes = j.at("episodes").get<std::size_t>();
    report.protocol_failures = j.at("protocol_failures").get<std::size_t>();
    for (const auto& r : j.at("runs")) report.runs.push_back(RunFromJson(r));
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report: ") + e.what());
  }
}

std::string FormatReportTable(const EvalReport& report, const std::string& label) {
  std::string out;
  char cell[64];
  auto row = [&](const std::string& name, const std::vector<double>& rates, double f1,
                 double sim) {
    std::snprintf(cell, sizeof cell, "%-20s", name.c_str());
    out += cell;
    for (double r : rates) {
      std::snprintf(cell, sizeof cell, " %7.1f", 100.0 * r);
      out += cell;
    }
    std::snprintf(cell, sizeof cell, " %8.3f %8.3f\n", f1, sim);
    out += cell;
  };
  std::snprintf(cell, sizeof cell, "%-20s", "Model");
  out += cell;
  for (double t : report.thresholds) {
    char head[16];
    std::snprintf(head, sizeof head, "<%.1fm", t);
    std::snprintf(cell, sizeof cell, " %7s", head);
    out += cell;
  }
  std::snprintf(cell, sizeof cell, " %8s %8s\n", "NLA-F1", "ViewSim");
  out += cell;
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const auto& r = report.runs[i];
    row(label + " run" + std::to_string(i + 1), r.success_rates, r.mean_f1, r.mean_similarity);
  }
  row(label + " mean", report.success_rates, report.mean_f1, report.mean_similarity);
  return out;
}

// --- benchmark suites ---

std::string SuiteName(SuiteKind kind) { return kind == SuiteKind::kFree ? "free" : "sparse"; }

namespace {

struct TargetTemplate {
  EntityCategory category;
  const char* id;
  const char* nla;
};

constexpr TargetTemplate kTargets[] = {
    {EntityCategory::kPerson, "person", "say hi"},
    {EntityCategory::kPerson, "person", "shake hands"},
    {EntityCategory::kPerson, "person", "ask \"Where is the kitchen?\""},
    {EntityCategory::kObject, "cup", "pick up the cup"},
    {EntityCategory::kObject, "bottle", "pick up the water bottle"},
    {EntityCategory::kFurniture, "chair", "sit down on the chair"},
    {EntityCategory::kDoor, "door", "open the door"},
};

constexpr const char* kColors[] = {"grey", "red", "blue", "black", "white", "green"};
constexpr double kHalfRoom = 5.0;

}  // namespace

World GenerateWorld(SuiteKind kind, std::uint64_t seed) {
  Rng rng(MixSeed(seed, HashString(SuiteName(kind))));
  World w;
  w.bounds = {-kHalfRoom, -kHalfRoom, kHalfRoom, kHalfRoom};
  const AgentConfig agent;

  Pose start{rng.Uniform(-2.0, 2.0), rng.Uniform(-2.0, 2.0), 0.0, rng.Uniform(-180.0, 180.0), 0.0};
  start = Normalized(start);
  double tx = 0.0, ty = 0.0, dist = 0.0;
  do {
    dist = rng.Uniform(2.0, 4.5);
    const double a = rng.Uniform(-std::numbers::pi, std::numbers::pi);
    tx = start.x + dist * std::cos(a);
    ty = start.y + dist * std::sin(a);
  } while (std::fabs(tx) > kHalfRoom - 0.8 || std::fabs(ty) > kHalfRoom - 0.8);

  const TargetTemplate& tpl = kTargets[rng.Index(std::size(kTargets))];
  Entity target{std::string(tpl.id) + "_0", tpl.category, tx, ty, rng.Uniform(0.9, 1.5), {}};
  if (tpl.category == EntityCategory::kPerson) {
    target.attributes["clothing"] = kColors[rng.Index(std::size(kColors))];
  }
  w.entities.push_back(target);
  const std::size_t distractors = 2 + rng.Index(3);
  for (std::size_t i = 0; i < distractors; ++i) {
    const TargetTemplate& d = kTargets[rng.Index(std::size(kTargets))];
    Entity e{std::string(d.id) + "_" + std::to_string(i + 1), d.category,
             rng.Uniform(-kHalfRoom + 0.2, kHalfRoom - 0.2), rng.Uniform(-kHalfRoom + 0.2, kHalfRoom - 0.2),
             rng.Uniform(0.3, 1.8), {}};
    if (d.category == EntityCategory::kPerson) e.attributes["clothing"] = kColors[rng.Index(std::size(kColors))];
    w.entities.push_back(e);
  }

  Pose ref;
  ref.x = tx - 0.6 * (tx - start.x) / dist;
  ref.y = ty - 0.6 * (ty - start.y) / dist;
  ref.yaw = NormalizeYaw(std::atan2(ty - start.y, tx - start.x) * 180.0 / std::numbers::pi);
  w.goal = GoalSpec{target.id, ref, tpl.nla, ""};
  w.start = start;

  if (kind == SuiteKind::kSparse) {
    // Rectangles keep the start-to-target corridor one agent radius wide and
    // stay off the agent disc at the start and reference poses.
    const std::size_t count = 1 + rng.Index(5);
    World probe;
    probe.bounds = {-1e6, -1e6, 1e6, 1e6};
    constexpr double kCorridor = 0.3;
    for (std::size_t tries = 0; w.obstacles.size() < count && tries < 500; ++tries) {
      const double x = rng.Uniform(-kHalfRoom, kHalfRoom - 0.3);
      const double y = rng.Uniform(-kHalfRoom, kHalfRoom - 0.3);
      const Rect r{x, y, std::min(x + rng.Uniform(0.3, 1.2), kHalfRoom),
                   std::min(y + rng.Uniform(0.3, 1.2), kHalfRoom)};
      probe.obstacles = {r};
      if (SweepCollides(probe, start.x, start.y, tx, ty, kCorridor) ||
          DiscCollides(probe, start.x, start.y, agent.radius + 0.1) ||
          DiscCollides(probe, ref.x, ref.y, agent.radius + 0.1)) {
        continue;
      }
      w.obstacles.push_back(r);
    }
    // Drop distractors buried inside an obstacle.
    std::erase_if(w.entities, [&](const Entity& e) {
      if (e.id == target.id) return false;
      probe.obstacles = w.obstacles;
      return DiscCollides(probe, e.x, e.y, 0.05);
    });
  }
  ValidateWorld(w);
  return w;
}

// --- toolkit configuration ---

json ToolkitConfigToJson(const ToolkitConfig& cfg) {
  return json{
      {"router", {{"speech_keywords", cfg.router.speech_keywords},
                  {"gesture_keywords", cfg.router.gesture_keywords},
                  {"stop_phrase", cfg.router.stop_phrase}}},
      {"agent", AgentConfigToJson(cfg.agent)},
      {"metrics", {{"thresholds", cfg.metrics.thresholds},
                   {"runs", cfg.metrics.runs},
                   {"similarity", cfg.metrics.similarity}}},
      {"perturb", {{"dist_frac", cfg.perturb.dist_frac},
                   {"angle_deg", cfg.perturb.angle_deg},
                   {"enabled", cfg.perturb.enabled}}},
      {"oversample", {{"turn_factor", cfg.oversample.turn_factor},
                      {"nla_factor", cfg.oversample.nla_factor},
                      {"seed", cfg.oversample.seed}}}};
}

ToolkitConfig ToolkitConfigFromJson(const json& j) {
  ToolkitConfig cfg;
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "config: expected an object");
  try {
    if (j.contains("router")) {
      const json& r = j.at("router");
      cfg.router.speech_keywords = r.value("speech_keywords", cfg.router.speech_keywords);
      cfg.router.gesture_keywords = r.value("gesture_keywords", cfg.router.gesture_keywords);
      cfg.router.stop_phrase = r.value("stop_phrase", cfg.router.stop_phrase);
    }
    if (j.contains("agent")) cfg.agent = AgentConfigFromJson(j.at("agent"), cfg.agent);
    if (j.contains("metrics")) {
      const json& m = j.at("metrics");
      cfg.metrics.thresholds = m.value("thresholds", cfg.metrics.thresholds);
      cfg.metrics.runs = m.value("runs", cfg.metrics.runs);
      cfg.metrics.similarity = m.value("similarity", cfg.metrics.similarity);
    }
    if (j.contains("perturb")) {
      const json& p = j.at("perturb");
      cfg.perturb.dist_frac = p.value("dist_frac", cfg.perturb.dist_frac);
      cfg.perturb.angle_deg = p.value("angle_deg", cfg.perturb.angle_deg);
      cfg.perturb.enabled = p.value("enabled", cfg.perturb.enabled);
    }
    if (j.contains("oversample")) {
      const json& o = j.at("oversample");
      cfg.oversample.turn_factor = o.value("turn_factor", cfg.oversample.turn_factor);
      cfg.oversample.nla_factor = o.value("nla_factor", cfg.oversample.nla_factor);
      cfg.oversample.seed = o.value("seed", cfg.oversample.seed);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  ValidateAgentConfig(cfg.agent);
  ValidateMetricConfig(cfg.metrics);
  return cfg;
}

ToolkitConfig LoadToolkitConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open config " + path);
  try {
    return ToolkitConfigFromJson(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

}  // namespace egoact
