// Copyright 2026 The Lyre Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LYRE_REWARD_CONFIG_HPP_
#define LYRE_REWARD_CONFIG_HPP_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "lyre/lyrics.hpp"
#include "lyre/rational.hpp"

namespace lyre {

enum class HarmonyDegree { kExcellent, kGood, kFair, kBad };

std::string_view to_string(HarmonyDegree degree);

// Closed semitone interval [low, high] carrying one harmony degree.
struct LabeledInterval {
  int low = 0;
  int high = 0;
  HarmonyDegree degree = HarmonyDegree::kBad;
  bool operator==(const LabeledInterval&) const = default;
};

// Harmony degree of a pitch step given the tone pair (previous, current) over
// Tone1..Tone5. Steps outside every interval of a cell are Bad.
class HarmonyTable {
 public:
  using Cell = std::vector<LabeledInterval>;

  // Throws ConfigError if intervals overlap or the cell does not cover 0.
  void set_cell(Tone previous, Tone current, Cell intervals);
  const Cell& cell(Tone previous, Tone current) const;
  HarmonyDegree degree(Tone previous, Tone current, int delta_pitch) const;
  // Every cell covers 0 and has disjoint intervals.
  void validate() const;

  bool operator==(const HarmonyTable&) const = default;

 private:
  std::array<std::array<Cell, 5>, 5> cells_{};
};

struct RewardConfig {
  double lambda_tone = 1.2;
  double lambda_rhythm = 1.5;
  double lambda_structure = 1.0;
  // Indexed by HarmonyDegree.
  std::array<double, 4> transition_rewards = {3.0, 2.0, 1.0, 0.0};
  double shape_reward_on_match = 1.0;
  double contour_reward_on_match = 1.0;
  double sw_reward_on_match = 1.0;
  double pause_reward_on_match = 1.0;
  double structure_reward_exact = 2.0;
  double structure_reward_octave = 1.0;
  HarmonyTable harmony_table;
  Rational long_note_threshold{2};

  double transition_reward(HarmonyDegree degree) const {
    return transition_rewards[static_cast<int>(degree)];
  }
  // Throws ConfigError on negative weights, non-monotone transition rewards,
  // non-positive long-note threshold or an invalid harmony table.
  void validate() const;
  bool operator==(const RewardConfig&) const = default;
};

// Key/value config text, see data/reward_default.conf for the schema. Keys not
// present keep their defaults from `base`.
RewardConfig parse_reward_config(std::string_view text, const RewardConfig& base);
RewardConfig parse_reward_config(std::string_view text);
std::string serialize_reward_config(const RewardConfig& config);

// The shipped default (data/reward_default.conf, compiled in).
const RewardConfig& default_reward_config();
std::string_view default_reward_config_text();

RewardConfig load_reward_config(const std::string& path);

struct LambdaPreset {
  std::string_view name;
  double tone, rhythm, structure;
};

// `telemelody` (1.2, 1.5, 1), `songmass` (1.5, 1, 1) and `off` (0, 0, 0).
const std::vector<LambdaPreset>& lambda_presets();
// Throws ConfigError for an unknown name.
void apply_preset(RewardConfig& config, std::string_view preset);

}  // namespace lyre

#endif  // LYRE_REWARD_CONFIG_HPP_
