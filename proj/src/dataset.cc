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

#include <algorithm>
#include <map>
#include <utility>

#include "egoact/error.h"

namespace egoact {
namespace {

enum class LabelStatus { kOk, kMissingPoses, kNoMotion };

struct FrameLabel {
  LabelStatus status = LabelStatus::kOk;
  std::string text;
};

ObservationRef MakeRef(const std::string& source, std::size_t frame,
                       const std::string& image, Resolution res) {
  return ObservationRef{source, frame, image, res};
}

class AnnotationBuilder {
 public:
  AnnotationBuilder(const AnnotatedEpisode& ep, const AnnotationConfig& cfg)
      : ep_(ep), cfg_(cfg), stride_(std::max<std::size_t>(cfg.stride, 1)) {}

  std::vector<EgoSample> Build() {
    Rng rng(MixSeed(cfg_.seed, HashString(ep_.id)));
    const std::size_t group_size = std::max<std::size_t>(cfg_.actions_per_instruction, 1);
    const auto& actions = ep_.actions;
    for (std::size_t g = 0; g < actions.size(); g += group_size) {
      const std::size_t g_end = std::min(g + group_size, actions.size());
      std::vector<std::string> texts;
      for (std::size_t i = g; i < g_end; ++i) texts.push_back(actions[i].text);
      const std::vector<std::size_t> connectives = DrawConnectives(texts.size(), rng);
      const std::string instruction = JoinInstruction(texts, connectives);

      const AnnotatedAction& first = actions[g];
      std::size_t instruction_start =
          first.start_frame >= cfg_.lookback_frames ? first.start_frame - cfg_.lookback_frames : 0;
      if (g > 0) instruction_start = std::max(instruction_start, actions[g - 1].end_frame + 1);

      for (std::size_t i = g; i < g_end; ++i) {
        const AnnotatedAction& action = actions[i];
        const std::size_t region_start = i == g ? instruction_start : actions[i - 1].end_frame + 1;

        for (std::size_t back = stride_; back <= action.start_frame &&
                                         action.start_frame - back >= region_start;
             back += stride_) {
          const std::size_t t = action.start_frame - back;
          const FrameLabel label = LabelFrame(t);
          if (!Accept(label, t)) continue;
          Emit(t, "move", instruction, label.text, instruction_start);
        }

        Emit(action.start_frame, "manip", instruction, action.text, instruction_start);

        const std::size_t prefix_len = i - g + 1;
        const std::string prefix_instruction = JoinInstruction(
            std::span<const std::string>(texts).first(prefix_len),
            std::span<const std::size_t>(connectives).first(prefix_len - 1));
        const std::size_t stop_frame = std::min(action.end_frame + 1, ep_.frames.size() - 1);
        Emit(stop_frame, "stop", prefix_instruction, std::string(kStopPhrase),
             instruction_start);
      }
    }
    std::stable_sort(samples_.begin(), samples_.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<EgoSample> out;
    out.reserve(samples_.size());
    for (auto& [frame, sample] : samples_) out.push_back(std::move(sample));
    return out;
  }

 private:
  // Returns false when the label cannot be used; throws in strict mode.
  bool Accept(const FrameLabel& label, std::size_t frame) const {
    if (label.status == LabelStatus::kMissingPoses && cfg_.strict_poses) {
      throw Error(ErrorCode::kMissingPoses,
                  ep_.id + ": no pose data around frame " + std::to_string(frame));
    }
    return label.status == LabelStatus::kOk;
  }

  const AnnotatedAction* ActionAt(std::size_t frame) const {
    for (const auto& a : ep_.actions) {
      if (frame >= a.start_frame && frame <= a.end_frame) return &a;
    }
    return nullptr;
  }

  // Action executed at `frame` according to its temporal role.
  FrameLabel LabelFrame(std::size_t frame) const {
    if (const AnnotatedAction* a = ActionAt(frame)) return {LabelStatus::kOk, a->text};
    if (!ep_.actions.empty() && frame > ep_.actions.back().end_frame) {
      return {LabelStatus::kOk, std::string(kStopPhrase)};
    }
    const std::size_t last = std::min(frame + stride_, ep_.frames.size() - 1);
    std::vector<Pose> poses;
    for (std::size_t f = frame; f <= last; ++f) {
      if (!ep_.frames[f].pose) return {LabelStatus::kMissingPoses, {}};
      poses.push_back(*ep_.frames[f].pose);
    }
    const auto deltas = WindowDeltas(poses);
    ActionSequence seq;
    seq.slas = AggregateWindow(deltas, cfg_.thresholds);
    if (seq.slas.empty()) return {LabelStatus::kNoMotion, {}};
    return {LabelStatus::kOk, Serialize(seq)};
  }

  void Emit(std::size_t target_frame, const char* kind, const std::string& instruction,
            const std::string& target, std::size_t lower_bound) {
    const ContextSelection ctx = SelectContext(target_frame, stride_, lower_bound);
    EgoSample sample;
    sample.id = ep_.id + "/" + std::to_string(target_frame) + "/" + kind;
    sample.instruction = instruction;
    sample.target = target;
    for (std::size_t f : ctx.historical) {
      sample.historical.push_back(MakeRef(ep_.id, f, ep_.frames[f].image, Resolution::k240p));
    }
    for (std::size_t k = 0; k < ctx.recent.size(); ++k) {
      const std::size_t f = ctx.recent[k];
      RecentPair pair{MakeRef(ep_.id, f, ep_.frames[f].image, Resolution::k480p), std::nullopt};
      if (k + 1 < ctx.recent.size()) {
        const FrameLabel label = LabelFrame(f);
        if (!Accept(label, f)) return;
        pair.action = label.text;
      }
      sample.recent.push_back(std::move(pair));
    }
    samples_.emplace_back(target_frame, std::move(sample));
  }

  const AnnotatedEpisode& ep_;
  const AnnotationConfig& cfg_;
  const std::size_t stride_;
  std::vector<std::pair<std::size_t, EgoSample>> samples_;
};

}  // namespace

std::string_view ResolutionTag(Resolution res) {
  return res == Resolution::k240p ? "240p" : "480p";
}

std::optional<Resolution> ResolutionFromTag(std::string_view tag) {
  if (tag == "240p") return Resolution::k240p;
  if (tag == "480p") return Resolution::k480p;
  return std::nullopt;
}

std::string ObservationRef::Locator() const {
  if (!image.empty()) return image;
  return source + "#" + (frame ? std::to_string(*frame) : std::string("?"));
}

std::vector<std::size_t> UniformSample(std::size_t begin, std::size_t end,
                                       std::size_t count) {
  std::vector<std::size_t> out;
  if (end <= begin || count == 0) return out;
  const std::size_t n = end - begin;
  if (n <= count) {
    for (std::size_t i = begin; i < end; ++i) out.push_back(i);
    return out;
  }
  if (count == 1) return {begin};
  for (std::size_t i = 0; i < count; ++i) {
    // round(i * (n - 1) / (count - 1))
    out.push_back(begin + (2 * i * (n - 1) + (count - 1)) / (2 * (count - 1)));
  }
  return out;
}

ContextSelection SelectContext(std::size_t current, std::size_t stride,
                               std::size_t lower_bound, std::size_t recent_slots,
                               std::size_t historical_slots) {
  stride = std::max<std::size_t>(stride, 1);
  ContextSelection ctx;
  std::size_t frame = current;
  while (ctx.recent.size() < recent_slots && frame >= lower_bound) {
    ctx.recent.push_back(frame);
    if (frame < lower_bound + stride) break;
    frame -= stride;
  }
  std::reverse(ctx.recent.begin(), ctx.recent.end());
  const std::size_t first_recent = ctx.recent.empty() ? current : ctx.recent.front();
  ctx.historical = UniformSample(lower_bound, first_recent, historical_slots);
  return ctx;
}

std::string JoinInstruction(std::span<const std::string> actions,
                            std::span<const std::size_t> connectives) {
  std::string out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i > 0) out += kConnectives[connectives[i - 1] % std::size(kConnectives)];
    out += actions[i];
  }
  return out;
}

std::vector<std::size_t> DrawConnectives(std::size_t action_count, Rng& rng) {
  if (action_count == 0) throw Error(ErrorCode::kEmptyActions, "no actions to join");
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < action_count; ++i) out.push_back(rng.Index(std::size(kConnectives)));
  return out;
}

std::string BuildInstruction(std::span<const std::string> actions, Rng& rng) {
  const auto connectives = DrawConnectives(actions.size(), rng);
  return JoinInstruction(actions, connectives);
}

void ValidateEpisode(const AnnotatedEpisode& ep) {
  auto fail = [&ep](const std::string& what) {
    throw Error(ErrorCode::kMalformedAnnotation, ep.id + ": " + what);
  };
  if (!(ep.fps > 0.0)) fail("fps must be positive");
  if (ep.frames.empty()) fail("episode has no frames");
  for (std::size_t i = 0; i < ep.actions.size(); ++i) {
    const auto& a = ep.actions[i];
    const std::string where = "actions[" + std::to_string(i) + "]";
    if (a.start_frame > a.end_frame) fail(where + " ends before it starts");
    if (a.end_frame >= ep.frames.size()) fail(where + " runs past the last frame");
    if (i > 0 && a.start_frame <= ep.actions[i - 1].end_frame) {
      fail(where + " overlaps or precedes the previous action");
    }
    if (a.text.find(';') != std::string::npos) fail(where + " text contains ';'");
    try {
      ParseSequence(a.text);
    } catch (const Error& e) {
      fail(where + " text is not a valid action: " + e.what());
    }
  }
}

std::vector<EgoSample> BuildSamplesAnnotation(const AnnotatedEpisode& ep,
                                              const AnnotationConfig& cfg) {
  ValidateEpisode(ep);
  return AnnotationBuilder(ep, cfg).Build();
}

MergedEpisode MergeTrajectory(std::string id, std::string instruction,
                              std::span<const LowLevelStep> steps, Rng& rng,
                              const PerturbConfig& pcfg) {
  std::vector<LowLevelStep> padded(steps.begin(), steps.end());
  const std::string last_image = padded.empty() ? std::string() : padded.back().image;
  padded.push_back({last_image, {LowLevelAction::Type::kStop, 0.0}});

  MergedEpisode ep{std::move(id), std::move(instruction), {}};
  for (std::size_t i = 0; i < padded.size(); i += 2) {
    const LowLevelAction& first = padded[i].action;
    const LowLevelAction& second =
        i + 1 < padded.size() ? padded[i + 1].action : padded[i].action;
    const ActionSequence merged = MergeActionPair(first, second, rng, pcfg);
    if (merged.empty()) continue;
    ep.steps.push_back({padded[i].image, Serialize(merged)});
    if (merged.IsStop()) break;
  }
  return ep;
}

std::vector<EgoSample> BuildSamplesSliding(const MergedEpisode& ep, std::size_t interval) {
  if (ep.steps.empty()) throw Error(ErrorCode::kEpisodeTooShort, ep.id + ": no steps");
  std::vector<EgoSample> out;
  out.reserve(ep.steps.size());
  for (std::size_t k = 0; k < ep.steps.size(); ++k) {
    const ContextSelection ctx = SelectContext(k, interval, 0);
    EgoSample sample;
    sample.id = ep.id + "/" + std::to_string(k);
    sample.instruction = ep.instruction;
    sample.target = ep.steps[k].action;
    for (std::size_t h : ctx.historical) {
      sample.historical.push_back(MakeRef(ep.id, h, ep.steps[h].image, Resolution::k240p));
    }
    for (std::size_t j = 0; j < ctx.recent.size(); ++j) {
      const std::size_t r = ctx.recent[j];
      RecentPair pair{MakeRef(ep.id, r, ep.steps[r].image, Resolution::k480p), std::nullopt};
      if (j + 1 < ctx.recent.size()) pair.action = ep.steps[r].action;
      sample.recent.push_back(std::move(pair));
    }
    out.push_back(std::move(sample));
  }
  return out;
}

std::vector<EgoSample> Oversample(std::span<const EgoSample> samples,
                                  const OversampleConfig& cfg) {
  std::vector<EgoSample> out;
  for (const auto& s : samples) {
    std::size_t factor = 1;
    try {
      const ActionSequence seq = ParseSequence(s.target);
      const bool has_turn = std::any_of(seq.slas.begin(), seq.slas.end(), [](const auto& a) {
        return a.kind == ActionKind::kTurn;
      });
      if (has_turn) factor = std::max(factor, cfg.turn_factor);
      if (seq.terminal && seq.terminal->route != Route::kStop) {
        factor = std::max(factor, cfg.nla_factor);
      }
    } catch (const Error&) {
      // Unparsable targets are kept once.
    }
    for (std::size_t i = 0; i < std::max<std::size_t>(factor, 1); ++i) out.push_back(s);
  }
  Rng rng(cfg.seed);
  rng.Shuffle(out);
  return out;
}

}  // namespace egoact
