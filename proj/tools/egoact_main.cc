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

// egoact: command-line front end for the toolkit.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "egoact/dataset.h"
#include "egoact/error.h"
#include "egoact/eval.h"
#include "egoact/json_io.h"
#include "egoact/random.h"
#include "egoact/runner.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace egoact {
namespace {

json ActionToJson(const StructuredAction& a) {
  static constexpr const char* kKinds[] = {"turn", "look", "move", "sidewalk", "height"};
  static constexpr const char* kDirs[] = {"left", "right", "up", "down",
                                          "forward", "backward", "rise", "lower"};
  return json{{"kind", kKinds[static_cast<int>(a.kind)]},
              {"direction", kDirs[static_cast<int>(a.direction)]},
              {"magnitude", a.magnitude}};
}

json SequenceToJson(const ActionSequence& seq) {
  json slas = json::array();
  for (const auto& a : seq.slas) slas.push_back(ActionToJson(a));
  json terminal = nullptr;
  if (seq.terminal) {
    terminal = json{{"text", seq.terminal->text}, {"route", RouteName(seq.terminal->route)}};
  }
  return json{{"canonical", Serialize(seq)}, {"slas", std::move(slas)}, {"terminal", terminal}};
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path);
  return in;
}

// Non-blank lines of a JSONL file, each parsed.
std::vector<json> ReadJsonLines(const std::string& path) {
  std::ifstream in = OpenInput(path);
  std::vector<json> out;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write " + path.string());
  out << text;
}

std::unique_ptr<PolicyEndpoint> MakeEndpoint(const std::string& policy, const World& world,
                                             const AgentConfig& agent,
                                             std::unique_ptr<OraclePolicy>* oracle) {
  if (policy == "oracle") {
    *oracle = std::make_unique<OraclePolicy>(world, agent);
    const OraclePolicy* p = oracle->get();
    return MakeFunctionEndpoint([p](const std::string& line) { return p->HandleLine(line); });
  }
  if (policy.rfind("exec:", 0) == 0) return MakeProcessEndpoint(policy.substr(5));
  if (policy.rfind("tcp:", 0) == 0) return MakeTcpEndpoint(policy.substr(4));
  throw Error(ErrorCode::kProtocolError, "unknown policy " + policy + " (oracle|exec:<cmd>|tcp:<addr>)");
}

struct SimOptions {
  std::vector<std::string> worlds;
  std::string policy = "oracle";
  std::uint64_t seed = 0;
  std::size_t runs = 0;  // 0: from the metric config
  std::string out;
  double timeout_s = 30.0;
  std::size_t retries = 2;
  std::size_t max_steps = 60;
};

struct NamedWorld {
  std::string id;
  World world;
};

// Runs every world once per run; returns results grouped by run.
std::vector<std::vector<EpisodeResult>> RunSuite(const std::vector<NamedWorld>& worlds,
                                                 const SimOptions& opt, const ToolkitConfig& cfg,
                                                 std::size_t runs) {
  std::vector<std::vector<EpisodeResult>> out(runs);
  for (std::size_t run = 0; run < runs; ++run) {
    for (const auto& nw : worlds) {
      World world = nw.world;
      if (!world.agent) world.agent = cfg.agent;
      std::unique_ptr<OraclePolicy> oracle;
      auto endpoint = MakeEndpoint(opt.policy, world, *world.agent, &oracle);
      RunConfig rc;
      rc.max_steps = opt.max_steps;
      rc.retries = opt.retries;
      rc.timeout_s = opt.timeout_s;
      rc.seed = MixSeed(opt.seed, run);
      rc.router = cfg.router;
      out[run].push_back(RunEpisode(world, world.start.value_or(Pose{}), *endpoint, rc, nw.id));
    }
  }
  return out;
}

EvalReport ReportFor(const std::vector<std::vector<EpisodeResult>>& runs, const MetricConfig& m) {
  std::vector<RunMetrics> metrics;
  for (const auto& r : runs) metrics.push_back(ScoreRun(r, m));
  return AggregateReport(metrics, m.thresholds);
}

void WriteRuns(const fs::path& dir, const std::vector<std::vector<EpisodeResult>>& runs,
               const EvalReport& report, const std::string& label) {
  fs::create_directories(dir);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::string text;
    for (const auto& ep : runs[r]) text += EpisodeResultToJson(ep).dump() + "\n";
    WriteText(dir / ("run" + std::to_string(r + 1) + ".jsonl"), text);
  }
  WriteText(dir / "report.json", EvalReportToJson(report).dump(2) + "\n");
  WriteText(dir / "report.txt", FormatReportTable(report, label));
}

int Main(int argc, char** argv) {
  CLI::App app{"EgoAct toolkit: action grammar, dataset building, simulation and evaluation"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Toolkit config file (JSON)")->check(CLI::ExistingFile);

  // parse
  auto* parse = app.add_subcommand("parse", "Parse an action string and print it as JSON");
  std::string parse_text;
  parse->add_option("text", parse_text, "Action sequence text")->required();

  // convert
  auto* convert = app.add_subcommand("convert", "Label a pose trajectory with structured actions");
  std::string trajectory;
  double fps = 0.0;
  convert->add_option("--trajectory", trajectory, "Line-delimited pose records")->required();
  convert->add_option("--fps", fps, "Frame rate")->required()->check(CLI::PositiveNumber);

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Build training samples");
  std::string mode, input, output;
  std::uint64_t build_seed = 0;
  std::size_t interval = 1;
  bool strict = false, oversample = false;
  build->add_option("--mode", mode, "annotation or sliding")
      ->required()
      ->check(CLI::IsMember({"annotation", "sliding"}));
  build->add_option("--input", input, "Episodes, one JSON object per line")->required();
  build->add_option("--out", output, "Dataset file (default: stdout)");
  build->add_option("--seed", build_seed, "Seed for connectives, perturbation and shuffling");
  build->add_option("--interval", interval, "Sliding-window step between recent pairs")
      ->check(CLI::PositiveNumber);
  build->add_flag("--strict-poses", strict, "Fail on frames without poses");
  build->add_flag("--oversample", oversample, "Repeat turn and interaction samples");

  // prompt
  auto* prompt = app.add_subcommand("prompt", "Render the model prompt for one dataset sample");
  std::string dataset;
  std::size_t index = 0;
  prompt->add_option("--dataset", dataset, "Dataset file")->required();
  prompt->add_option("--index", index, "Zero-based sample index");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a policy in one or more worlds");
  SimOptions sim;
  simulate->add_option("--world", sim.worlds, "World file(s)")->required();
  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--policy", sim.policy, "oracle, exec:<cmd> or tcp:<host:port>");
    cmd->add_option("--seed", sim.seed, "Noise seed");
    cmd->add_option("--runs", sim.runs, "Evaluation runs (default from config)");
    cmd->add_option("--out", sim.out, "Output directory for episodes and reports");
    cmd->add_option("--timeout-s", sim.timeout_s, "Per-request timeout")->check(CLI::PositiveNumber);
    cmd->add_option("--retries", sim.retries, "Retries per malformed reply");
    cmd->add_option("--max-steps", sim.max_steps, "Decision step budget")->check(CLI::PositiveNumber);
  };
  add_run_options(simulate);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Run a seeded benchmark suite");
  std::string suite = "free";
  std::size_t count = 100;
  std::string world_dir;
  bench->add_option("--suite", suite, "free or sparse")->check(CLI::IsMember({"free", "sparse"}));
  bench->add_option("--count", count, "Number of worlds")->check(CLI::PositiveNumber);
  bench->add_option("--save-worlds", world_dir, "Also write the generated worlds here");
  add_run_options(bench);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score episode logs written by simulate");
  std::string episodes;
  std::size_t eval_runs = 0;
  evaluate->add_option("--episodes", episodes, "Directory holding run<N>.jsonl")->required();
  evaluate->add_option("--runs", eval_runs, "Expected run count (default from config)");
  evaluate->add_option("--out", output, "Write the JSON report here");

  // serve-oracle
  auto* serve = app.add_subcommand("serve-oracle", "Serve the oracle policy over stdio or TCP");
  std::string serve_world;
  int port = -1;
  serve->add_option("--world", serve_world, "World file")->required();
  serve->add_option("--listen", port, "TCP port (default: stdio)");

  CLI11_PARSE(app, argc, argv);

  const ToolkitConfig cfg = config_path.empty() ? ToolkitConfig{} : LoadToolkitConfig(config_path);

  if (*parse) {
    std::cout << SequenceToJson(Canonicalize(ParseSequence(parse_text, cfg.router), cfg.router)).dump()
              << "\n";
    return 0;
  }

  if (*convert) {
    std::ifstream in = OpenInput(trajectory);
    const auto records = ReadTrajectory(in);
    std::vector<Pose> poses;
    for (const auto& r : records) poses.push_back(r.pose);
    for (const FrameRange& w : SplitWindows(poses.size(), fps)) {
      const auto deltas = WindowDeltas(std::span<const Pose>(poses).subspan(w.first, w.last - w.first + 1));
      ActionSequence seq;
      seq.slas = AggregateWindow(deltas, Thresholds{});
      std::cout << json{{"first_frame", w.first},
                        {"last_frame", w.last},
                        {"t_start", records[w.first].t},
                        {"t_end", records[w.last].t},
                        {"actions", seq.slas.empty() ? json(nullptr) : json(Serialize(seq))}}
                       .dump()
                << "\n";
    }
    return 0;
  }

  if (*build) {
    std::vector<EgoSample> samples;
    auto records = ReadJsonLines(input);
    if (mode == "annotation") {
      std::vector<AnnotatedEpisode> eps;
      for (const auto& r : records) eps.push_back(AnnotatedEpisodeFromJson(r));
      std::stable_sort(eps.begin(), eps.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
      AnnotationConfig acfg;
      acfg.seed = build_seed;
      acfg.strict_poses = strict;
      for (const auto& ep : eps) {
        auto s = BuildSamplesAnnotation(ep, acfg);
        samples.insert(samples.end(), s.begin(), s.end());
      }
    } else {
      std::vector<LowLevelEpisode> eps;
      for (const auto& r : records) eps.push_back(LowLevelEpisodeFromJson(r));
      std::stable_sort(eps.begin(), eps.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
      for (const auto& ep : eps) {
        Rng rng(MixSeed(build_seed, HashString(ep.id)));
        const MergedEpisode merged = MergeTrajectory(ep.id, ep.instruction, ep.steps, rng, cfg.perturb);
        auto s = BuildSamplesSliding(merged, interval);
        samples.insert(samples.end(), s.begin(), s.end());
      }
    }
    if (oversample) {
      OversampleConfig ocfg = cfg.oversample;
      ocfg.seed = MixSeed(build_seed, ocfg.seed);
      samples = Oversample(samples, ocfg);
    }
    std::string text;
    for (const auto& s : samples) text += SampleToJson(s).dump() + "\n";
    if (output.empty()) {
      std::cout << text;
    } else {
      WriteText(output, text);
      std::cerr << samples.size() << " samples written to " << output << "\n";
    }
    return 0;
  }

  if (*prompt) {
    const auto records = ReadJsonLines(dataset);
    if (index >= records.size()) {
      throw Error(ErrorCode::kParseError, "index " + std::to_string(index) + " out of range");
    }
    std::cout << RenderPrompt(SampleFromJson(records[index]));
    return 0;
  }

  if (*simulate || *bench) {
    ValidateMetricConfig(cfg.metrics);
    const std::size_t runs = sim.runs > 0 ? sim.runs : cfg.metrics.runs;
    std::vector<NamedWorld> worlds;
    std::string label = sim.policy.substr(0, sim.policy.find(':'));
    if (*simulate) {
      for (const auto& path : sim.worlds) {
        worlds.push_back({fs::path(path).stem().string(), LoadWorldFile(path)});
      }
    } else {
      const SuiteKind kind = suite == "free" ? SuiteKind::kFree : SuiteKind::kSparse;
      for (std::size_t i = 0; i < count; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "%s-%03zu", suite.c_str(), i);
        worlds.push_back({id, GenerateWorld(kind, MixSeed(sim.seed, i))});
      }
      if (!world_dir.empty()) {
        fs::create_directories(world_dir);
        for (const auto& nw : worlds) {
          WriteText(fs::path(world_dir) / (nw.id + ".json"), WorldToJson(nw.world).dump(2) + "\n");
        }
      }
      label += " " + suite;
    }
    const auto results = RunSuite(worlds, sim, cfg, runs);
    const EvalReport report = ReportFor(results, cfg.metrics);
    if (!sim.out.empty()) {
      WriteRuns(sim.out, results, report, label);
    } else if (*simulate) {
      for (const auto& run : results) {
        for (const auto& ep : run) std::cout << EpisodeResultToJson(ep).dump() << "\n";
      }
    }
    std::cout << FormatReportTable(report, label);
    char line[160];
    std::snprintf(line, sizeof line, "episodes %zu x %zu runs, collision rate %.3f, protocol failures %zu\n",
                  report.episodes, runs, report.collision_rate, report.protocol_failures);
    std::cout << line;
    return 0;
  }

  if (*evaluate) {
    const std::size_t runs = eval_runs > 0 ? eval_runs : cfg.metrics.runs;
    std::vector<std::vector<EpisodeResult>> results;
    for (std::size_t r = 1;; ++r) {
      const fs::path path = fs::path(episodes) / ("run" + std::to_string(r) + ".jsonl");
      if (!fs::exists(path)) break;
      std::vector<EpisodeResult> run;
      for (const auto& j : ReadJsonLines(path.string())) run.push_back(EpisodeResultFromJson(j));
      results.push_back(std::move(run));
    }
    if (results.size() != runs) {
      throw Error(ErrorCode::kMismatchedEpisodeSets,
                  "expected " + std::to_string(runs) + " runs in " + episodes + ", found " +
                      std::to_string(results.size()));
    }
    const EvalReport report = ReportFor(results, cfg.metrics);
    if (!output.empty()) WriteText(output, EvalReportToJson(report).dump(2) + "\n");
    std::cout << FormatReportTable(report, fs::path(episodes).filename().string());
    return 0;
  }

  if (*serve) {
    World world = LoadWorldFile(serve_world);
    const OraclePolicy oracle(world, world.agent.value_or(cfg.agent));
    const LineHandler handler = [&](const std::string& l) { return oracle.HandleLine(l); };
    if (port < 0) {
      ServeLines(std::cin, std::cout, handler);
    } else {
      ServeTcp(port, handler, [](int p) { std::cerr << "listening on 127.0.0.1:" << p << std::endl; });
    }
    return 0;
  }
  return 0;
}

}  // namespace
}  // namespace egoact

int main(int argc, char** argv) {
  try {
    return egoact::Main(argc, argv);
  } catch (const egoact::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
