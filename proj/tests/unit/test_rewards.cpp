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

#include <cmath>
#include <map>
#include <memory>
#include <random>

#include "doctest.h"
#include "lyre/error.hpp"
#include "lyre/rewards.hpp"
#include "support/synthetic.hpp"

using namespace lyre;

namespace {

const RewardConfig& cfg() { return default_reward_config(); }

// Replays a finished melody through the incremental state.
std::vector<TriggeredReward> incremental_rewards(const LyricSequence& lyrics, const Melody& melody,
                                                 const RewardConfig& config) {
  DecodeState state(std::make_shared<const DecodeContext>(lyrics, melody.time_signature()));
  std::vector<TriggeredReward> out;
  auto take = [&](const DecodeStep& step) {
    auto r = state.rewards_for(step, config);
    out.insert(out.end(), r.begin(), r.end());
    state.apply(step);
  };
  for (const auto& tok : melody.tokens()) take(DecodeStep::of(tok));
  take(DecodeStep::end_of_melody());
  return out;
}

std::map<std::pair<int, std::size_t>, double> by_kind(const std::vector<TriggeredReward>& rewards) {
  std::map<std::pair<int, std::size_t>, double> out;
  for (const auto& r : rewards) out[{static_cast<int>(r.kind), r.syllable}] += r.value;
  return out;
}


}  // namespace

TEST_CASE("pitch shape") {
  CHECK(pitch_shape_reward(Tone::kTone2, std::vector{60, 64}, cfg()) == 1.0);
  CHECK(pitch_shape_reward(Tone::kTone1, std::vector{60, 60, 60}, cfg()) == 1.0);
  CHECK(pitch_shape_reward(Tone::kTone2, std::vector{64, 60}, cfg()) == 0.0);
  CHECK(pitch_shape_reward(Tone::kTone4, std::vector{67, 64, 64}, cfg()) == 1.0);
  CHECK(pitch_shape_reward(Tone::kTone4, std::vector{64, 64}, cfg()) == 0.0);
  CHECK(pitch_shape_reward(Tone::kTone3, std::vector{64, 60, 62}, cfg()) == 1.0);
  CHECK(pitch_shape_reward(Tone::kTone3, std::vector{64, 62, 60}, cfg()) == 0.0);
  CHECK(pitch_shape_reward(Tone::kTone3, std::vector{64, 60}, cfg()) == 1.0);
  CHECK(pitch_shape_reward(Tone::kTone3, std::vector{60, 64}, cfg()) == 0.0);
  CHECK(pitch_shape_reward(Tone::kTone5, std::vector{60, 72, 50}, cfg()) == 1.0);
  CHECK(pitch_shape_reward(Tone::kTone1, std::vector{60, 61}, cfg()) == 0.0);
  CHECK_FALSE(pitch_shape_reward(Tone::kTone2, std::vector{60}, cfg()).has_value());
  CHECK_FALSE(pitch_shape_reward(Tone::kStressed, std::vector{60, 64}, cfg()).has_value());
}

TEST_CASE("pitch shape is transposition invariant") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pitch(50, 80), shift(-20, 20), len(2, 5), tone(0, 4);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<int> p(static_cast<std::size_t>(len(rng)));
    for (auto& x : p) x = pitch(rng);
    int s = shift(rng);
    std::vector<int> q = p;
    for (auto& x : q) x += s;
    Tone t = static_cast<Tone>(tone(rng));
    CHECK(pitch_shape_matches(t, p) == pitch_shape_matches(t, q));
  }
}

TEST_CASE("transition rewards map degrees through 3 2 1 0") {
  RewardConfig c = cfg();
  HarmonyTable t;
  for (int p = 0; p < 5; ++p) {
    for (int q = 0; q < 5; ++q) {
      t.set_cell(static_cast<Tone>(p), static_cast<Tone>(q),
                 {{-1, -1, HarmonyDegree::kFair}, {0, 0, HarmonyDegree::kExcellent}, {1, 2, HarmonyDegree::kGood}});
    }
  }
  CHECK(pitch_transition_reward(Tone::kTone1, Tone::kTone2, 0, t, c) == 3.0);
  CHECK(pitch_transition_reward(Tone::kTone1, Tone::kTone2, 2, t, c) == 2.0);
  CHECK(pitch_transition_reward(Tone::kTone1, Tone::kTone2, -1, t, c) == 1.0);
  CHECK(pitch_transition_reward(Tone::kTone1, Tone::kTone2, 5, t, c) == 0.0);
  CHECK(pitch_transition_reward(Tone::kTone4, Tone::kTone1, 3, c.harmony_table, c) == 3.0);
  CHECK_FALSE(pitch_transition_reward(Tone::kStressed, Tone::kUnstressed, 0, c.harmony_table, c).has_value());
}

TEST_CASE("sentence contour") {
  CHECK(pitch_contour_reward(Intonation::kRising, 60, 65, cfg()) == 1.0);
  CHECK(pitch_contour_reward(Intonation::kRising, 65, 60, cfg()) == 0.0);
  CHECK(pitch_contour_reward(Intonation::kRising, 60, 60, cfg()) == 0.0);
  CHECK(pitch_contour_reward(Intonation::kFalling, 65, 60, cfg()) == 1.0);
  CHECK(pitch_contour_reward(Intonation::kNeutral, 60, 90, cfg()) == 1.0);
  CHECK(pitch_contour_reward(Intonation::kNeutral, 90, 60, cfg()) == 1.0);
}

TEST_CASE("strong and weak positions") {
  CHECK(strong_weak_reward(StressClass::kKeyword, BeatStrength::kStrong, cfg()) == 1.0);
  CHECK(strong_weak_reward(StressClass::kKeyword, BeatStrength::kWeak, cfg()) == 0.0);
  CHECK(strong_weak_reward(StressClass::kAuxiliary, BeatStrength::kWeak, cfg()) == 1.0);
  // An auxiliary word on the downbeat is a bad case.
  CHECK(strong_weak_reward(StressClass::kAuxiliary, BeatStrength::kStrong, cfg()) == 0.0);
  CHECK_FALSE(strong_weak_reward(StressClass::kNeutral, BeatStrength::kWeak, cfg()).has_value());
}

TEST_CASE("pause placement") {
  // A pause inside a word is a bad case.
  CHECK(pause_reward(true, BoundaryKind::kWordInner, cfg()) == 0.0);
  CHECK(pause_reward(true, BoundaryKind::kWordBoundary, cfg()) == 1.0);
  CHECK(pause_reward(true, BoundaryKind::kSentenceBoundary, cfg()) == 1.0);
  CHECK(pause_reward(false, BoundaryKind::kSentenceBoundary, cfg()) == 0.0);
  CHECK(pause_reward(false, BoundaryKind::kWordBoundary, cfg()) == 1.0);
  CHECK(pause_reward(false, BoundaryKind::kWordInner, cfg()) == 1.0);

  LyricSequence lyr = parse_lyrics("ni3|W hao3|I ma1|W .\nzai4|W jian4|I .");
  CHECK(boundary_after(lyr, 0) == BoundaryKind::kWordInner);
  CHECK(boundary_after(lyr, 1) == BoundaryKind::kWordBoundary);
  CHECK(boundary_after(lyr, 2) == BoundaryKind::kSentenceBoundary);
  CHECK(boundary_after(lyr, 3) == BoundaryKind::kWordInner);
}

TEST_CASE("long note inside a word is penalized on the whole melody") {
  LyricSequence lyr = parse_lyrics("ni3|W hao3|I ma1|W .");
  Melody broken({MelodyToken::note(60, Rational(2)), MelodyToken::note(62, Rational(1)),
                 MelodyToken::note(64, Rational(2))});
  Melody fine({MelodyToken::note(60, Rational(1)), MelodyToken::note(62, Rational(1)),
               MelodyToken::note(64, Rational(2))});
  auto pause_of = [&](const Melody& m, std::size_t gap) {
    for (const auto& r : sequence_rewards(lyr, build_structure_matrix(lyr), m, cfg())) {
      if (r.kind == RewardKind::kPause && r.syllable == gap) return r.value;
    }
    return -1.0;
  };
  CHECK(pause_of(broken, 0) == 0.0);
  CHECK(pause_of(fine, 0) == 1.0);
}

TEST_CASE("repetition structure") {
  CHECK(structure_reward(2, 2, cfg()) == 2.0);
  CHECK(structure_reward(14, 2, cfg()) == 1.0);
  CHECK(structure_reward(-10, 2, cfg()) == 1.0);
  CHECK(structure_reward(3, 2, cfg()) == 0.0);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> p(40, 90), s(-24, 24);
  for (int trial = 0; trial < 1000; ++trial) {
    int a0 = p(rng), a1 = p(rng), b0 = p(rng), b1 = p(rng), shift = s(rng);
    CHECK(structure_reward(a1 - a0, b1 - b0, cfg()) ==
          structure_reward((a1 + shift) - (a0 + shift), (b1 + shift) - (b0 + shift), cfg()));
  }
}

TEST_CASE("weighted combination") {
  LyricSequence lyr = parse_lyrics("ma4|W shan1|W,K .");
  RewardConfig c = cfg();
  DecodeState state(std::make_shared<const DecodeContext>(lyr, TimeSignature{}));
  state.apply(DecodeStep::of(MelodyToken::note(60, Rational(2))));
  // Second syllable on beat 3 (strong); tone 4 -> 1 with +3 is excellent.
  DecodeStep step = DecodeStep::of(MelodyToken::note(63, Rational(1)));
  auto rewards = state.rewards_for(step, c);
  std::map<RewardKind, double> got;
  for (const auto& r : rewards) got[r.kind] += r.value;
  CHECK(got[RewardKind::kTransition] == 3.0);
  CHECK(got[RewardKind::kStrongWeak] == 1.0);
  // The long first note already paused at the word boundary, so no pause fires here.
  CHECK(got.count(RewardKind::kPause) == 0);
  CHECK(total_reward(state, step, c, Aspects::all()) == doctest::Approx(1.2 * 3 + 1.5 * 1).epsilon(1e-12));
  CHECK(std::abs(total_reward(state, step, c, Aspects::all()) - 5.1) < 1e-9);
  CHECK(total_reward(state, step, c, Aspects::only(Aspect::kRhythm)) == 1.5);
  apply_preset(c, "off");
  CHECK(total_reward(state, step, c, Aspects::all()) == 0.0);
}

TEST_CASE("incremental rewards equal whole-melody rewards") {
  std::mt19937_64 rng(99);
  testing::MelodyGen gen;
  gen.rest_probability = 0.3;
  gen.melisma_probability = 0.35;
  for (int trial = 0; trial < 500; ++trial) {
    LyricSequence lyr = testing::random_lyrics(rng);
    TimeSignature ts = trial % 4 == 0 ? TimeSignature{3, 4} : TimeSignature{};
    Melody m = testing::random_melody(rng, lyr.size(), gen, ts);
    auto whole = sequence_rewards(lyr, build_structure_matrix(lyr), m, cfg());
    auto inc = incremental_rewards(lyr, m, cfg());
    CHECK(by_kind(whole) == by_kind(inc));
    CHECK(whole.size() == inc.size());
  }
}

TEST_CASE("weights are linear and rewards bounded") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    LyricSequence lyr = testing::random_lyrics(rng);
    Melody m = testing::random_melody(rng, lyr.size());
    StructureMatrix sm = build_structure_matrix(lyr);
    RewardConfig c = cfg();
    const double base_t = sequence_reward(lyr, sm, m, c, Aspects::only(Aspect::kTone));
    const double base_r = sequence_reward(lyr, sm, m, c, Aspects::only(Aspect::kRhythm));
    const double base_s = sequence_reward(lyr, sm, m, c, Aspects::only(Aspect::kStructure));
    CHECK(std::abs(sequence_reward(lyr, sm, m, c, Aspects::all()) - (base_t + base_r + base_s)) < 1e-9);
    c.lambda_tone *= 2.5;
    CHECK(std::abs(sequence_reward(lyr, sm, m, c, Aspects::only(Aspect::kTone)) - 2.5 * base_t) < 1e-9);
    CHECK(sequence_reward(lyr, sm, m, c, Aspects::only(Aspect::kRhythm)) == base_r);

    // Per-syllable tone reward bound.
    std::map<std::size_t, double> tone;
    for (const auto& r : sequence_rewards(lyr, sm, m, cfg())) {
      CHECK(r.value >= 0.0);
      CHECK(r.value <= r.max);
      if (aspect_of(r.kind) == Aspect::kTone) tone[r.syllable] += r.value;
    }
    const double bound = cfg().shape_reward_on_match + 3.0 + cfg().contour_reward_on_match;
    for (const auto& [k, v] : tone) CHECK(v <= bound);
  }
}

TEST_CASE("stress-accent tone rewards reduce to the contour") {
  LyricSequence lyr = parse_lyrics("to|W be'|W or|W not'|W ?");
  Melody m({MelodyToken::note(60, Rational(1)), MelodyToken::note(62, Rational(1)), MelodyToken::note(64, Rational(1), false),
            MelodyToken::note(67, Rational(1)), MelodyToken::note(65, Rational(1))});
  for (const auto& r : sequence_rewards(lyr, build_structure_matrix(lyr), m, cfg())) {
    if (aspect_of(r.kind) == Aspect::kTone) CHECK(r.kind == RewardKind::kContour);
  }
  CHECK(sequence_reward(lyr, build_structure_matrix(lyr), m, cfg(), Aspects::only(Aspect::kTone)) == 1.2);
}

TEST_CASE("empty lyrics cannot be decoded") {
  CHECK_THROWS_AS(DecodeContext(LyricSequence{}, TimeSignature{}), FormatError);
}
