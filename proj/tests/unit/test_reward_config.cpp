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

#include "doctest.h"
#include "lyre/error.hpp"
#include "lyre/reward_config.hpp"

using namespace lyre;

TEST_CASE("shipped default values") {
  const RewardConfig& c = default_reward_config();
  CHECK(c.lambda_tone == 1.2);
  CHECK(c.lambda_rhythm == 1.5);
  CHECK(c.lambda_structure == 1.0);
  CHECK(c.transition_rewards == std::array<double, 4>{3, 2, 1, 0});
  CHECK(c.structure_reward_exact == 2.0);
  CHECK(c.structure_reward_octave == 1.0);
  CHECK(c.long_note_threshold == Rational(2));
  CHECK_NOTHROW(c.validate());
  CHECK(c.harmony_table.degree(Tone::kTone4, Tone::kTone1, 3) == HarmonyDegree::kExcellent);
}

TEST_CASE("every cell covers a zero step") {
  const RewardConfig& c = default_reward_config();
  for (int p = 0; p < 5; ++p) {
    for (int q = 0; q < 5; ++q) {
      HarmonyDegree d = c.harmony_table.degree(static_cast<Tone>(p), static_cast<Tone>(q), 0);
      bool covered = false;
      for (const auto& iv : c.harmony_table.cell(static_cast<Tone>(p), static_cast<Tone>(q))) {
        covered |= iv.low <= 0 && 0 <= iv.high && iv.degree == d;
      }
      CHECK(covered);
    }
  }
}

TEST_CASE("steps outside every interval are bad") {
  const RewardConfig& c = default_reward_config();
  CHECK(c.harmony_table.degree(Tone::kTone1, Tone::kTone1, 40) == HarmonyDegree::kBad);
  CHECK(c.harmony_table.degree(Tone::kTone1, Tone::kTone1, -40) == HarmonyDegree::kBad);
}

TEST_CASE("serialize and parse round trip") {
  RewardConfig c = default_reward_config();
  c.lambda_tone = 0.1;
  c.long_note_threshold = Rational(3, 2);
  CHECK(parse_reward_config(serialize_reward_config(c)) == c);
  CHECK(parse_reward_config(default_reward_config_text(), RewardConfig{}) == default_reward_config());
}

TEST_CASE("partial config keeps base values") {
  RewardConfig c = parse_reward_config("lambda.tone = 2\n# comment\nharmony.1.2 = excellent:-1..1\n");
  CHECK(c.lambda_tone == 2.0);
  CHECK(c.lambda_rhythm == 1.5);
  CHECK(c.harmony_table.degree(Tone::kTone1, Tone::kTone2, 1) == HarmonyDegree::kExcellent);
  CHECK(c.harmony_table.degree(Tone::kTone1, Tone::kTone2, 2) == HarmonyDegree::kBad);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_reward_config("harmony.6.1 = good:0..0"), ConfigError);
  CHECK_THROWS_AS(parse_reward_config("harmony.1 = good:0..0"), ConfigError);
  CHECK_THROWS_AS(parse_reward_config("harmony.1.1 = good:1..2"), ConfigError);
  CHECK_THROWS_AS(parse_reward_config("harmony.1.1 = good:-2..1 fair:1..3"), ConfigError);
  CHECK_THROWS_AS(parse_reward_config("harmony.1.1 = superb:0..0"), ConfigError);
  CHECK_THROWS_AS(parse_reward_config("lambda.tone = -1"), ConfigError);
  CHECK_THROWS_AS(parse_reward_config("transition.good = 5"), ConfigError);
  CHECK_THROWS_AS(parse_reward_config("long_note_threshold = 0"), ConfigError);
  CHECK_THROWS_AS(parse_reward_config("volume = 3"), ConfigError);
  CHECK_THROWS_AS(parse_reward_config("lambda.tone 3"), ConfigError);
  CHECK_THROWS_AS(load_reward_config("/nonexistent/lyre.conf"), ConfigError);
}

TEST_CASE("presets") {
  RewardConfig c = default_reward_config();
  apply_preset(c, "songmass");
  CHECK(c.lambda_tone == 1.5);
  CHECK(c.lambda_rhythm == 1.0);
  CHECK(c.lambda_structure == 1.0);
  apply_preset(c, "off");
  CHECK(c.lambda_tone == 0.0);
  CHECK(c.lambda_rhythm == 0.0);
  CHECK(c.lambda_structure == 0.0);
  apply_preset(c, "telemelody");
  CHECK(c.lambda_tone == 1.2);
  CHECK(c.lambda_rhythm == 1.5);
  CHECK(c.lambda_structure == 1.0);
  CHECK_THROWS_AS(apply_preset(c, "loud"), ConfigError);
}
