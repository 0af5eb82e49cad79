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
#include <random>

#include "doctest.h"
#include "lyre/error.hpp"
#include "lyre/metrics.hpp"
#include "lyre/rewards.hpp"
#include "support/oracle.hpp"
#include "support/synthetic.hpp"

using namespace lyre;

namespace {

Melody notes(std::initializer_list<int> pitches, Rational d = Rational(1)) {
  std::vector<MelodyToken> t;
  for (int p : pitches) t.push_back(MelodyToken::note(p, d));
  return Melody(t);
}

const RewardConfig& cfg() { return default_reward_config(); }

}  // namespace

TEST_CASE("degree scores") {
  CHECK(degree_score(HarmonyDegree::kExcellent) == 1.0);
  CHECK(degree_score(HarmonyDegree::kGood) == 0.5);
  CHECK(degree_score(HarmonyDegree::kFair) == 0.2);
  CHECK(degree_score(HarmonyDegree::kBad) == 0.0);
}

TEST_CASE("tone transition score") {
  // Level tones held at one pitch: every pair excellent.
  CHECK(tone_transition_score(parse_lyrics("a1|W b1|W c1|W ."), notes({60, 60, 60}), cfg().harmony_table) == 1.0);
  // (1,1) step 0 excellent, (1,2) step +1 bad.
  CHECK(tone_transition_score(parse_lyrics("a1|W b1|W c2|W ."), notes({60, 60, 61}), cfg().harmony_table) == 0.5);
  // Pairs across sentences do not count.
  CHECK(tone_transition_score(parse_lyrics("a1|W .\nb2|W ."), notes({60, 61}), cfg().harmony_table) == std::nullopt);
  CHECK(tone_transition_score(parse_lyrics("to|W be'|W ."), notes({60, 62}), cfg().harmony_table) == std::nullopt);
}

TEST_CASE("tone contour score") {
  CHECK(tone_contour_score(parse_lyrics("a1|W b1|W ,\nc1|W d1|W ,"), notes({60, 62, 64, 50})) == 1.0);
  // Four falling sentences, only the first falls.
  CHECK(tone_contour_score(parse_lyrics("a1|W b1|W .\nc1|W d1|W .\ne1|W f1|W .\ng1|W h1|W ."),
                           notes({64, 60, 60, 60, 60, 64, 60, 62})) == 0.25);
  // Question rises (matched), statement rises (mismatched).
  CHECK(tone_contour_score(parse_lyrics("a1|W b1|W ?\nc1|W d1|W ."), notes({60, 65, 60, 65})) == 0.5);
}

TEST_CASE("matched strong/weak ratio") {
  CHECK(matched_sw_ratio(parse_lyrics("a1|W,K b1|W c1|W,K d1|W ."), notes({60, 60, 60, 60}, Rational(2))) == 1.0);
  // Onsets 0, 1, 2, 3: K strong ok, A weak ok, K strong ok, K weak miss.
  CHECK(matched_sw_ratio(parse_lyrics("a1|W,K b1|W,A c1|W,K d1|W,K ."), notes({60, 60, 60, 60})) == 0.75);
  CHECK(matched_sw_ratio(parse_lyrics("a1|W b1|W ."), notes({60, 60})) == std::nullopt);
}

TEST_CASE("matched pause ratio") {
  LyricSequence five_inner = parse_lyrics("a1|W b1|I c1|I d1|I e1|I f1|I .");
  CHECK(matched_pause_ratio(five_inner, notes({60, 60, 60, 60, 60, 60}), cfg()) == 1.0);
  Melody one_pause({MelodyToken::note(60, Rational(1)), MelodyToken::note(60, Rational(1)), MelodyToken::rest(Rational(1)),
                    MelodyToken::note(60, Rational(1)), MelodyToken::note(60, Rational(1)),
                    MelodyToken::note(60, Rational(1)), MelodyToken::note(60, Rational(1))});
  CHECK(std::abs(*matched_pause_ratio(five_inner, one_pause, cfg()) - 0.8) < 1e-12);
  CHECK(matched_pause_ratio(parse_lyrics("a1|W b1|W ."), notes({60, 60}), cfg()) == std::nullopt);

  // A long note breaking a two-syllable word is one unmatched case.
  LyricSequence words = parse_lyrics("ni3|W hao3|I ma1|W ya1|I .");
  Melody broken({MelodyToken::note(60, Rational(2)), MelodyToken::note(62, Rational(1)),
                 MelodyToken::note(64, Rational(1)), MelodyToken::note(64, Rational(2))});
  EvaluationReport r = evaluate(words, broken, cfg());
  CHECK(r.breakdown.inner_syllables == 2);
  CHECK(r.breakdown.inner_pauses == 1);
  CHECK(r.matched_pauses == 0.5);
}

TEST_CASE("melody distance") {
  CHECK(melody_distance({60, 62, 64}, {60, 62, 64}) == 0.0);
  CHECK(melody_distance({60, 62, 64, 65}, {60, 64, 65}) == 0.5);
  CHECK(melody_distance({60, 62}, {72, 74}) == 12.0);
  CHECK(melody_distance({60}, {61, 63}) == 2.0);
}

TEST_CASE("structure similarity") {
  LyricSequence rep = parse_lyrics("a1|W b2|W c3|W .\na1|W b2|W c3|W .");
  Melody same({MelodyToken::note(60, Rational(1)), MelodyToken::note(62, Rational(1, 2)),
               MelodyToken::note(64, Rational(2)), MelodyToken::note(60, Rational(1)),
               MelodyToken::note(62, Rational(1, 2)), MelodyToken::note(64, Rational(2))});
  StructureSimilarity s = structure_similarity(rep, same);
  CHECK(s.pd == 1.0);
  CHECK(s.dd == 1.0);
  CHECK(s.md == 0.0);

  Melody up({MelodyToken::note(60, Rational(1)), MelodyToken::note(62, Rational(1, 2)),
             MelodyToken::note(64, Rational(2)), MelodyToken::note(72, Rational(1)),
             MelodyToken::note(74, Rational(1, 2)), MelodyToken::note(76, Rational(2))});
  StructureSimilarity t = structure_similarity(rep, up);
  CHECK(t.dd == 1.0);
  CHECK(t.md == 12.0);
  CHECK(*t.pd < 1.0);
  CHECK(t.pd == 0.0);

  StructureSimilarity none = structure_similarity(parse_lyrics("a1|W .\nb1|W ."), notes({60, 62}));
  CHECK_FALSE(none.pd.has_value());
  CHECK_FALSE(none.dd.has_value());
  CHECK_FALSE(none.md.has_value());
}

TEST_CASE("metric ranges and symmetry") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> pitch(55, 80), len(1, 8);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> a(static_cast<std::size_t>(len(rng))), b(static_cast<std::size_t>(len(rng)));
    for (auto& x : a) x = pitch(rng);
    for (auto& x : b) x = pitch(rng);
    double pd = histogram_similarity(a, b);
    CHECK(pd >= 0.0);
    CHECK(pd <= 1.0);
    CHECK(pd == histogram_similarity(b, a));
    CHECK(melody_distance(a, b) >= 0.0);
    CHECK(melody_distance(a, b) == melody_distance(b, a));
    CHECK(histogram_similarity(a, a) == 1.0);
    CHECK(melody_distance(a, a) == 0.0);
  }
  testing::LyricGen gen;
  gen.repeat_probability = 0.6;
  for (int trial = 0; trial < 200; ++trial) {
    LyricSequence lyr = testing::random_lyrics(rng, gen);
    Melody m = testing::random_melody(rng, lyr.size());
    EvaluationReport r = evaluate(lyr, m, cfg());
    for (auto v : {r.tone_transition, r.tone_contour, r.matched_sw, r.matched_pauses, r.pd, r.dd}) {
      if (v) {
        CHECK(*v >= 0.0);
        CHECK(*v <= 1.0);
      }
    }
    if (r.md) CHECK(*r.md >= 0.0);
    EvaluationReport again = evaluate(lyr, m, cfg());
    CHECK(report_to_json(again).dump() == report_to_json(r).dump());
  }
}

TEST_CASE("melodies that max every reward max the metrics") {
  std::mt19937_64 rng(4);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = testing::tiny_instance(rng, trial);
    UniformScorer scorer(inst.vocab);
    auto all = testing::enumerate_melodies(inst.lyrics, scorer, cfg(), Aspects::all(), inst.max_notes);
    StructureMatrix sm = build_structure_matrix(inst.lyrics);
    for (const auto& e : all) {
      auto rewards = sequence_rewards(inst.lyrics, sm, e.melody, cfg());
      bool maxed = std::all_of(rewards.begin(), rewards.end(), [](const auto& r) { return r.value == r.max; });
      if (!maxed) continue;
      ++checked;
      EvaluationReport rep = evaluate(inst.lyrics, e.melody, cfg());
      if (rep.tone_transition) CHECK(*rep.tone_transition == 1.0);
      if (rep.matched_sw) CHECK(*rep.matched_sw == 1.0);
      if (rep.matched_pauses) CHECK(*rep.matched_pauses == 1.0);
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("batch means skip empty fields") {
  EvaluationReport a, b;
  a.matched_sw = 0.5;
  b.matched_sw = 1.0;
  a.tone_transition = 0.2;
  EvaluationReport m = mean_report({a, b});
  CHECK(m.matched_sw == 0.75);
  CHECK(m.tone_transition == 0.2);
  CHECK_FALSE(m.md.has_value());
  std::string table = format_report_table({"x"}, {m});
  CHECK(table.find("0.7500") != std::string::npos);
  CHECK(table.find("-") != std::string::npos);
  CHECK(report_to_json(m, false)["md"].is_null());
}

TEST_CASE("evaluation needs an aligned melody") {
  CHECK_THROWS_AS(evaluate(parse_lyrics("a1|W b1|W ."), notes({60}), cfg()), AlignmentError);
}
