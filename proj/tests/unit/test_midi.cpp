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

#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "lyre/error.hpp"
#include "lyre/midi.hpp"
#include "support/synthetic.hpp"

using namespace lyre;

namespace {

// Minimal format 0 file builder for hand-made fixtures.
struct TrackBuilder {
  std::vector<std::uint8_t> data;

  void delta(std::uint32_t ticks) {
    std::uint8_t buf[4];
    int n = 0;
    buf[n++] = ticks & 0x7F;
    while (ticks >>= 7) buf[n++] = static_cast<std::uint8_t>((ticks & 0x7F) | 0x80);
    while (n > 0) data.push_back(buf[--n]);
  }
  void on(std::uint32_t dt, int pitch) { event(dt, 0x90, pitch, 100); }
  void off(std::uint32_t dt, int pitch) { event(dt, 0x80, pitch, 0); }
  void event(std::uint32_t dt, int status, int a, int b) {
    delta(dt);
    data.insert(data.end(), {static_cast<std::uint8_t>(status), static_cast<std::uint8_t>(a),
                             static_cast<std::uint8_t>(b)});
  }
  std::vector<std::uint8_t> file() const {
    std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xE0};
    std::vector<std::uint8_t> body = data;
    body.insert(body.end(), {0x00, 0xFF, 0x2F, 0x00});
    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    auto n = static_cast<std::uint32_t>(body.size());
    out.insert(out.end(), {static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16),
                           static_cast<std::uint8_t>(n >> 8), static_cast<std::uint8_t>(n)});
    out.insert(out.end(), body.begin(), body.end());
    return out;
  }
};

}  // namespace

TEST_CASE("write then read a five-token melody") {
  Melody m({MelodyToken::note(60, Rational(1)), MelodyToken::note(62, Rational(1, 2), false),
            MelodyToken::rest(Rational(1)), MelodyToken::note(64, Rational(2)), MelodyToken::note(67, Rational(3, 2))});
  CHECK(read_midi(write_midi(m)) == m);
}

TEST_CASE("written file layout") {
  Melody m({MelodyToken::note(60, Rational(1))});
  auto bytes = write_midi(m);
  REQUIRE(bytes.size() > 22);
  CHECK(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 14) ==
        std::vector<std::uint8_t>{'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xE0});
}

TEST_CASE("a 480-tick gap becomes a quarter rest") {
  TrackBuilder t;
  t.on(0, 60);
  t.off(480, 60);
  t.on(480, 62);
  t.off(480, 62);
  Melody m = read_midi(t.file());
  CHECK(m.tokens() == std::vector<MelodyToken>{MelodyToken::note(60, Rational(1)), MelodyToken::rest(Rational(1)),
                                               MelodyToken::note(62, Rational(1))});
}

TEST_CASE("overlapping notes are rejected as polyphony") {
  TrackBuilder t;
  t.on(0, 60);
  t.on(240, 64);
  t.off(240, 60);
  t.off(0, 64);
  CHECK_THROWS_AS(read_midi(t.file()), UnsupportedError);
}

TEST_CASE("truncated files fail to parse") {
  Melody m({MelodyToken::note(60, Rational(1)), MelodyToken::note(62, Rational(1))});
  auto bytes = write_midi(m);
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{13}, std::size_t{20}, bytes.size() - 3}) {
    std::vector<std::uint8_t> part(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
    CHECK_THROWS_AS(read_midi(part), ParseError);
  }
}

TEST_CASE("lyrics travel as lyric meta events") {
  LyricSequence lyr = parse_lyrics("ni3|W hao3|W .");
  Melody m({MelodyToken::note(60, Rational(1)), MelodyToken::note(62, Rational(1), false),
            MelodyToken::note(64, Rational(2))});
  MidiImport imp = read_midi_with_lyrics(write_midi(m, &lyr));
  CHECK(imp.melody == m);
  REQUIRE(imp.syllable_texts.size() == 2);
  CHECK(imp.syllable_texts[0] == lyr.syllables[0].text);
  CHECK(imp.syllable_texts[1] == lyr.syllables[1].text);
}

TEST_CASE("writing is deterministic") {
  std::mt19937_64 rng(1);
  Melody m = testing::random_melody(rng, 10);
  CHECK(write_midi(m) == write_midi(m));
}

TEST_CASE("round trip over random melodies") {
  std::mt19937_64 rng(2024);
  testing::MelodyGen gen;
  gen.durations = {Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1), Rational(3, 2), Rational(2),
                   Rational(1, 3)};
  gen.rest_durations = {Rational(1, 2), Rational(1), Rational(5, 4)};
  gen.pitch_low = 0;
  gen.pitch_high = 127;
  gen.melisma_probability = 0.3;
  gen.rest_probability = 0.3;
  for (int trial = 0; trial < 200; ++trial) {
    TimeSignature ts = trial % 3 == 0 ? TimeSignature{3, 4} : trial % 3 == 1 ? TimeSignature{6, 8} : TimeSignature{};
    Melody m = testing::random_melody(rng, 1 + static_cast<std::size_t>(trial % 12), gen, ts);
    CHECK(read_midi(write_midi(m)) == m);
  }
}
