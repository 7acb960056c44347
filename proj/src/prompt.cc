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

#include "egoact/dataset.h"

namespace egoact {
namespace {

constexpr std::string_view kPreamble =
    "You are a Vision Language Model specialized in processing the first person "
    "view images of embodied robots.\n"
    "Your task is to analyze the provided image and respond to queries with "
    "answers. Focus on the spatial relations in the image and make the right "
    "decisions.\n"
    "\n"
    "Given the following instruction, a series of sampled historical observation "
    "and recent observation image frames, predict a usable action sequence that "
    "you should perform next. Output format: 'Turn [direction] [degrees] degrees; "
    "Look [direction] [degrees] degrees; Move [direction] [distance] meters; "
    "[direction] sidewalk [distance] meters; [manipulation action text]; "
    "[interaction action text]; Stop and no action'.\n"
    "\n"
    "Your task is:\n";

}  // namespace

std::string HistoricalPlaceholder(std::size_t one_based_index) {
  return "[Sampled Historical Observation #" + std::to_string(one_based_index) + "]";
}

std::string RecentPlaceholder(std::size_t one_based_index) {
  return "[Recent Observation #" + std::to_string(one_based_index) + "]";
}

std::string RenderPrompt(const EgoSample& sample) {
  std::string out(kPreamble);
  out += sample.instruction;
  out += "\n\nSampled Historical Observations:\n\n";
  for (std::size_t i = 0; i < sample.historical.size(); ++i) {
    out += HistoricalPlaceholder(i + 1);
    out += '\n';
  }
  out += "\nRecent Observations:\n\n";
  for (std::size_t i = 0; i < sample.recent.size(); ++i) {
    out += RecentPlaceholder(i + 1);
    out += '\n';
    if (i + 1 == sample.recent.size()) break;
    out += "Next action:\n";
    out += sample.recent[i].action.value_or("");
    out += "\n\n";
  }
  out += "Next action:";
  return out;
}

}  // namespace egoact
