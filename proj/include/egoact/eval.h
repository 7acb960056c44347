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

// Benchmark metrics, report assembly and the seeded benchmark world suites.

#ifndef EGOACT_EVAL_H_
#define EGOACT_EVAL_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "egoact/dataset.h"
#include "egoact/runner.h"
#include "egoact/world.h"
#include "json.hpp"

namespace egoact {

struct MetricConfig {
  std::vector<double> thresholds = {0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 2.5, 3.0};
  std::size_t runs = 3;
  std::string similarity = "visible-set-jaccard";
};

// Throws kInvariantViolation unless thresholds are positive and strictly
// increasing and runs >= 1.
void ValidateMetricConfig(const MetricConfig& cfg);

// Lowercased words with punctuation removed.
std::vector<std::string> Tokenize(std::string_view text);
double UnigramF1(std::string_view predicted, std::string_view reference);

// Planar distance from the final pose to the reference pose.
double GoalDistance(const EpisodeResult& r);
// Fraction of episodes with GoalDistance < d, per threshold. Truncated
// episodes fail everywhere. Throws kEmptyResults.
std::vector<double> DistanceSuccessCurve(const std::vector<EpisodeResult>& results,
                                         const MetricConfig& cfg);

using ViewScorer = std::function<double(const Observation&, const Observation&)>;

class ScorerRegistry {
 public:
  // Holds "visible-set-jaccard".
  static ScorerRegistry& Default();

  void Register(const std::string& id, ViewScorer scorer);
  // Throws kUnknownScorer.
  const ViewScorer& Get(const std::string& id) const;

 private:
  std::map<std::string, ViewScorer> scorers_;
};

double VisibleSetJaccard(const Observation& a, const Observation& b);
double ViewSimilarity(const Observation& final_view, const Observation& reference,
                      const std::string& scorer,
                      const ScorerRegistry& registry = ScorerRegistry::Default());

struct RunMetrics {
  std::vector<std::string> episode_ids;  // sorted
  std::vector<double> success_rates;
  double mean_f1 = 0.0;
  double mean_similarity = 0.0;
  double collision_rate = 0.0;  // episodes with at least one collision
  std::size_t protocol_failures = 0;

  bool operator==(const RunMetrics&) const = default;
};

RunMetrics ScoreRun(const std::vector<EpisodeResult>& results, const MetricConfig& cfg,
                    const ScorerRegistry& registry = ScorerRegistry::Default());

struct EvalReport {
  std::vector<double> thresholds;
  std::vector<double> success_rates;  // mean over runs
  double mean_f1 = 0.0;
  double mean_similarity = 0.0;
  double collision_rate = 0.0;
  std::size_t episodes = 0;           // per run
  std::size_t protocol_failures = 0;  // summed over runs
  std::vector<RunMetrics> runs;

  bool operator==(const EvalReport&) const = default;
};

// Arithmetic mean per metric. Throws kEmptyResults for no runs and
// kMismatchedEpisodeSets when runs cover different episodes.
EvalReport AggregateReport(const std::vector<RunMetrics>& runs,
                           const std::vector<double>& thresholds);

nlohmann::json EvalReportToJson(const EvalReport& report);
EvalReport EvalReportFromJson(const nlohmann::json& j);
// Fixed-width table: one row per run plus the mean row.
std::string FormatReportTable(const EvalReport& report, const std::string& label);

// --- benchmark suites ---

enum class SuiteKind { kFree, kSparse };

// Obstacle-free ("free") or up to five rectangles ("sparse"). The target sits
// 2 to 4.5 m from the start; the reference pose is 0.6 m short of it on the
// line from the start, facing it. Rectangles leave that line
// passable for the default agent radius.
World GenerateWorld(SuiteKind kind, std::uint64_t seed);
std::string SuiteName(SuiteKind kind);

// --- toolkit configuration file ---

struct ToolkitConfig {
  RouterConfig router;
  AgentConfig agent;
  MetricConfig metrics;
  PerturbConfig perturb;
  OversampleConfig oversample;
};

nlohmann::json ToolkitConfigToJson(const ToolkitConfig& cfg);
// Missing sections keep their defaults. Throws kParseError or
// kInvariantViolation.
ToolkitConfig ToolkitConfigFromJson(const nlohmann::json& j);
ToolkitConfig LoadToolkitConfig(const std::string& path);

}  // namespace egoact

#endif  // EGOACT_EVAL_H_
