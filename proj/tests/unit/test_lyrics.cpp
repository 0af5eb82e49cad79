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

#include <algorithm>
#include <random>

#include "doctest.h"
#include "lyre/error.hpp"
#include "lyre/lyrics.hpp"
#include "support/synthetic.hpp"

using namespace lyre;

TEST_CASE("tonal line with explicit sentence end") {
  LyricSequence lyr = parse_lyrics("ni3|W,K cai3|I hong2|I,E .");
  REQUIRE(lyr.size() == 3);
  CHECK(lyr.language == Language::kTonal);
  CHECK(lyr.syllables[0].tone == Tone::kTone3);
  CHECK(lyr.syllables[1].tone == Tone::kTone3);
  CHECK(lyr.syllables[2].tone == Tone::kTone2);
  CHECK(lyr.syllables[0].word_position == WordPosition::kWordStart);
  CHECK(lyr.syllables[0].stress_class == StressClass::kKeyword);
  CHECK(lyr.syllables[1].word_position == WordPosition::kWordInner);
  CHECK(lyr.syllables[2].sentence_final);
  CHECK_FALSE(lyr.syllables[1].sentence_final);
  REQUIRE(lyr.sentences.size() == 1);
  CHECK(lyr.sentences[0].intonation == Intonation::kFalling);
  CHECK(lyr.sentences[0].syllable_range == IndexSpan{0, 3});
}

TEST_CASE("stress-accent line") {
  LyricSequence lyr = parse_lyrics("hello'|W,K ?");
  REQUIRE(lyr.size() == 1);
  CHECK(lyr.language == Language::kStressAccent);
  CHECK(lyr.syllables[0].tone == Tone::kStressed);
  CHECK(lyr.sentences[0].intonation == Intonation::kRising);
}

TEST_CASE("malformed lyric input") {
  CHECK_THROWS_AS(parse_lyrics(""), FormatError);
  CHECK_THROWS_AS(parse_lyrics("# only a comment\n\n"), FormatError);
  CHECK_THROWS_AS(parse_lyrics("ni3|I hao3|W ."), ParseError);
  CHECK_THROWS_AS(parse_lyrics("ni3|W hao3|Q ."), ParseError);
  CHECK_THROWS_AS(parse_lyrics("ni3|W,E hao3|W ."), ParseError);
  CHECK_THROWS_AS(parse_lyrics("ni3|W,K,A ."), ParseError);
  CHECK_THROWS_AS(parse_lyrics("ni3|W hello'|W ."), FormatError);
}

TEST_CASE("parse errors carry the line number") {
  try {
    parse_lyrics("ni3|W hao3|I .\nwo3|W shi4|Z .\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("detect_intonation") {
  CHECK(detect_intonation(U'?') == Intonation::kRising);
  CHECK(detect_intonation(U'.') == Intonation::kFalling);
  CHECK(detect_intonation(U'!') == Intonation::kFalling);
  CHECK(detect_intonation(U'。') == Intonation::kFalling);
  CHECK(detect_intonation(U'！') == Intonation::kFalling);
  CHECK(detect_intonation(U',') == Intonation::kNeutral);
  CHECK(detect_intonation(U'、') == Intonation::kNeutral);
  CHECK(detect_intonation("\xE3\x80\x82") == Intonation::kFalling);
  // Total over the character domain.
  for (char32_t c = 0; c < 0x3100; ++c) {
    Intonation i = detect_intonation(c);
    CHECK((i == Intonation::kRising || i == Intonation::kFalling || i == Intonation::kNeutral));
  }
}

TEST_CASE("structure matrix for A B A B") {
  LyricSequence lyr = parse_lyrics(
      "ni3|W hao3|W ma1|W ?\n"
      "wo3|W hen3|W hao3|W .\n"
      "Ni3|W hao3|W ma5|W ?\n"
      "wo3|W hen3|W hao3|W .\n");
  StructureMatrix m = build_structure_matrix(lyr);
  std::vector<std::pair<std::size_t, std::size_t>> expected = {{6, 0}, {7, 1}, {8, 2}, {9, 3}, {10, 4}, {11, 5}};
  CHECK(m.pairs == expected);
  CHECK(lyr.sentences[0].structure_group == lyr.sentences[2].structure_group);
  CHECK(lyr.sentences[0].structure_group != lyr.sentences[1].structure_group);
}

TEST_CASE("structure matrix without repetition is empty") {
  LyricSequence lyr = parse_lyrics("ni3|W hao3|W .\nwo3|W hen3|W .\n");
  CHECK(build_structure_matrix(lyr).empty());
  CHECK_FALSE(lyr.sentences[0].structure_group.has_value());
}

TEST_CASE("structure matrix matches a brute-force pairing oracle") {
  std::mt19937_64 rng(7);
  testing::LyricGen gen;
  gen.max_sentences = 6;
  gen.repeat_probability = 0.5;
  for (int trial = 0; trial < 200; ++trial) {
    LyricSequence lyr = testing::random_lyrics(rng, gen);
    std::vector<std::pair<std::size_t, std::size_t>> oracle;
    for (std::size_t s = 0; s < lyr.sentences.size(); ++s) {
      for (std::size_t t = 0; t < s; ++t) {
        if (normalized_text(lyr, lyr.sentences[s]) != normalized_text(lyr, lyr.sentences[t])) continue;
        for (std::size_t k = 0; k < lyr.sentences[s].syllable_range.size(); ++k) {
          oracle.emplace_back(lyr.sentences[s].syllable_range.begin + k, lyr.sentences[t].syllable_range.begin + k);
        }
        break;  // earliest only
      }
    }
    std::sort(oracle.begin(), oracle.end());
    StructureMatrix m = build_structure_matrix(lyr);
    CHECK(m.pairs == oracle);
    for (auto [i, j] : m.pairs) {
      CHECK(j < i);
      const auto& si = lyr.sentence_of(i);
      const auto& sj = lyr.sentence_of(j);
      CHECK(i - si.syllable_range.begin == j - sj.syllable_range.begin);
      CHECK(si.structure_group == sj.structure_group);
    }
  }
}

TEST_CASE("sequence invariants hold on random lyrics") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    LyricSequence lyr = testing::random_lyrics(rng);
    std::size_t next = 0;
    for (std::size_t s = 0; s < lyr.sentences.size(); ++s) {
      const auto& range = lyr.sentences[s].syllable_range;
      CHECK(range.begin == next);
      CHECK(range.size() > 0);
      next = range.end;
      CHECK(lyr.syllables[range.begin].word_position == WordPosition::kWordStart);
      for (std::size_t k = range.begin; k < range.end; ++k) {
        CHECK(lyr.syllables[k].sentence_index == s);
        CHECK(lyr.syllables[k].sentence_final == (k + 1 == range.end));
      }
    }
    CHECK(next == lyr.size());
  }
}

TEST_CASE("text and JSON round trips") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    LyricSequence lyr = testing::random_lyrics(rng);
    CHECK(parse_lyrics(serialize_lyrics(lyr)) == lyr);
    CHECK(parse_lyrics_json(lyrics_to_json(lyr)) == lyr);
  }
  LyricSequence stress = parse_lyrics("to|W be'|W or|W not'|W ?\nhel|W,A lo'|I,K !\n");
  CHECK(parse_lyrics(serialize_lyrics(stress)) == stress);
  CHECK(parse_lyrics_json(lyrics_to_json(stress)) == stress);
}

TEST_CASE("unicode punctuation") {
  LyricSequence lyr = parse_lyrics("ni3|W hao3|W \xE3\x80\x82\nni3|W hao3|W \xEF\xBC\x9F\n");
  CHECK(lyr.sentences[0].intonation == Intonation::kFalling);
  CHECK(lyr.sentences[1].intonation == Intonation::kRising);
  CHECK(lyr.sentences[0].terminator == "\xE3\x80\x82");
}
