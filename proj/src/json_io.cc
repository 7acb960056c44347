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

#include "egoact/json_io.h"

#include "egoact/error.h"

namespace egoact {
namespace {

using nlohmann::json;

double NumberOr(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorCode::kParseError, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

template <typename T>
T Required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kParseError, std::string("missing key '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad value for '") + key + "': " + e.what());
  }
}

json RefToJson(const ObservationRef& ref) {
  return json{{"image", ref.Locator()}, {"res", ResolutionTag(ref.res)}};
}

ObservationRef RefFromJson(const json& j) {
  ObservationRef ref;
  ref.image = Required<std::string>(j, "image");
  const auto res = ResolutionFromTag(Required<std::string>(j, "res"));
  if (!res) throw Error(ErrorCode::kParseError, "res must be 240p or 480p");
  ref.res = *res;
  return ref;
}

}  // namespace

json PoseToJson(const Pose& pose) {
  return json{{"x", pose.x}, {"y", pose.y}, {"z", pose.z}, {"yaw", pose.yaw}, {"pitch", pose.pitch}};
}

Pose PoseFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "pose must be an object");
  Pose p;
  p.x = NumberOr(j, "x", 0.0);
  p.y = NumberOr(j, "y", 0.0);
  p.z = NumberOr(j, "z", 0.0);
  p.yaw = NumberOr(j, "yaw", 0.0);
  p.pitch = NumberOr(j, "pitch", 0.0);
  return p;
}

std::vector<TrajectoryRecord> ReadTrajectory(std::istream& in) {
  std::vector<TrajectoryRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      TrajectoryRecord r;
      r.t = Required<double>(j, "t");
      r.pose = Normalized(PoseFromJson(Required<json>(j, "pose")));
      if (j.contains("image") && !j.at("image").is_null()) r.image = Required<std::string>(j, "image");
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

json SampleToJson(const EgoSample& sample) {
  json historical = json::array();
  for (const auto& ref : sample.historical) historical.push_back(RefToJson(ref));
  json recent = json::array();
  for (const auto& pair : sample.recent) {
    json entry = RefToJson(pair.observation);
    entry["action"] = pair.action ? json(*pair.action) : json(nullptr);
    recent.push_back(std::move(entry));
  }
  return json{{"id", sample.id},
              {"instruction", sample.instruction},
              {"historical", std::move(historical)},
              {"recent", std::move(recent)},
              {"target", sample.target}};
}

EgoSample SampleFromJson(const json& j) {
  EgoSample s;
  s.id = Required<std::string>(j, "id");
  s.instruction = Required<std::string>(j, "instruction");
  s.target = Required<std::string>(j, "target");
  for (const auto& h : Required<json>(j, "historical")) s.historical.push_back(RefFromJson(h));
  for (const auto& r : Required<json>(j, "recent")) {
    RecentPair pair{RefFromJson(r), std::nullopt};
    if (r.contains("action") && !r.at("action").is_null()) {
      pair.action = Required<std::string>(r, "action");
    }
    s.recent.push_back(std::move(pair));
  }
  return s;
}

AnnotatedEpisode AnnotatedEpisodeFromJson(const json& j) {
  AnnotatedEpisode ep;
  ep.id = Required<std::string>(j, "id");
  ep.fps = Required<double>(j, "fps");
  for (const auto& f : Required<json>(j, "frames")) {
    AnnotatedFrame frame;
    if (f.contains("image")) frame.image = Required<std::string>(f, "image");
    if (f.contains("pose") && !f.at("pose").is_null()) frame.pose = Normalized(PoseFromJson(f.at("pose")));
    ep.frames.push_back(std::move(frame));
  }
  for (const auto& a : Required<json>(j, "actions")) {
    ep.actions.push_back({Required<std::string>(a, "text"),
                          Required<std::size_t>(a, "start_frame"),
                          Required<std::size_t>(a, "end_frame")});
  }
  return ep;
}

LowLevelEpisode LowLevelEpisodeFromJson(const json& j) {
  LowLevelEpisode ep;
  ep.id = Required<std::string>(j, "id");
  ep.instruction = Required<std::string>(j, "instruction");
  for (const auto& s : Required<json>(j, "steps")) {
    const std::string name = Required<std::string>(s, "action");
    const auto type = LowLevelTypeFromName(name);
    if (!type) throw Error(ErrorCode::kParseError, "unknown low-level action '" + name + "'");
    LowLevelStep step;
    if (s.contains("image")) step.image = Required<std::string>(s, "image");
    step.action = {*type, NumberOr(s, "amount", 0.0)};
    ep.steps.push_back(std::move(step));
  }
  return ep;
}

}  // namespace egoact
