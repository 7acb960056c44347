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

// JSON mappings for the line-delimited files the toolkit reads and writes:
// pose trajectories, annotated episodes, low-level trajectories and dataset
// records.

#ifndef EGOACT_JSON_IO_H_
#define EGOACT_JSON_IO_H_

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "egoact/dataset.h"
#include "egoact/pose.h"
#include "json.hpp"

namespace egoact {

nlohmann::json PoseToJson(const Pose& pose);
// Missing keys default to zero; non-numeric values throw kParseError.
Pose PoseFromJson(const nlohmann::json& j);

// One frame of a pose trajectory: {"t", "pose", "image"?}.
struct TrajectoryRecord {
  double t = 0.0;
  Pose pose;
  std::string image;
};

// Reads one record per non-blank line. Throws kParseError with the line
// number on malformed input.
std::vector<TrajectoryRecord> ReadTrajectory(std::istream& in);

// {"id", "instruction", "historical": [{"image", "res"}],
//  "recent": [{"image", "res", "action"}], "target"}
nlohmann::json SampleToJson(const EgoSample& sample);
EgoSample SampleFromJson(const nlohmann::json& j);

// {"id", "fps", "frames": [{"image", "pose"?}],
//  "actions": [{"text", "start_frame", "end_frame"}]}
AnnotatedEpisode AnnotatedEpisodeFromJson(const nlohmann::json& j);

// {"id", "instruction", "steps": [{"image", "action", "amount"}]}
struct LowLevelEpisode {
  std::string id;
  std::string instruction;
  std::vector<LowLevelStep> steps;
};
LowLevelEpisode LowLevelEpisodeFromJson(const nlohmann::json& j);

}  // namespace egoact

#endif  // EGOACT_JSON_IO_H_
