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

#ifndef LYRE_MELODY_HPP_
#define LYRE_MELODY_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "lyre/lyrics.hpp"
#include "lyre/rational.hpp"

namespace lyre {

enum class TokenKind { kNote, kRest };

struct MelodyToken {
  TokenKind kind = TokenKind::kNote;
  int pitch = 0;  // MIDI number; 0 for rests
  Rational duration{1};
  bool new_syllable = true;  // false for rests and melisma continuations

  static MelodyToken note(int pitch, Rational duration, bool new_syllable = true) {
    return {TokenKind::kNote, pitch, duration, new_syllable};
  }
  static MelodyToken rest(Rational duration) { return {TokenKind::kRest, 0, duration, false}; }

  bool is_note() const { return kind == TokenKind::kNote; }
  bool is_rest() const { return kind == TokenKind::kRest; }
  bool operator==(const MelodyToken&) const = default;
};

std::string to_string(const MelodyToken& token);

struct TimeSignature {
  int numerator = 4;
  int denominator = 4;

  // Bar length in quarter notes. Throws UnsupportedError for non power-of-two denominators.
  Rational bar_length() const;
  bool operator==(const TimeSignature&) const = default;
};

// A monophonic melody. Each note with new_syllable=true opens the span of the
// next syllable; continuation notes extend it; a rest closes it.
class Melody {
 public:
  Melody() = default;
  // Validates tokens and derives the syllable alignment. Throws AlignmentError
  // for a continuation note with no open syllable, FormatError for bad tokens.
  Melody(std::vector<MelodyToken> tokens, TimeSignature time_signature = {});

  const std::vector<MelodyToken>& tokens() const { return tokens_; }
  const TimeSignature& time_signature() const { return time_signature_; }
  // Note-index span (into tokens()) of every syllable, in order.
  const std::vector<IndexSpan>& alignment() const { return alignment_; }
  std::size_t syllable_count() const { return alignment_.size(); }
  Rational total_duration() const;

  // Throws AlignmentError naming the first syllable the melody cannot cover.
  void check_aligned(const LyricSequence& lyrics) const;

  bool operator==(const Melody& other) const {
    return tokens_ == other.tokens_ && time_signature_ == other.time_signature_;
  }

 private:
  std::vector<MelodyToken> tokens_;
  TimeSignature time_signature_;
  std::vector<IndexSpan> alignment_;
};

enum class BeatStrength { kStrong, kWeak };

struct BeatGrid {
  std::vector<Rational> onsets;  // offset from the start of the bar
  std::vector<BeatStrength> strengths;
};

// Strength of an onset measured from the start of the bar.
BeatStrength beat_strength(const Rational& bar_offset, const TimeSignature& time_signature);

BeatGrid compute_beat_grid(const Melody& melody);

bool is_long_note(const MelodyToken& token, const Rational& long_note_threshold);

enum class PauseCause { kRestNote, kLongNote, kSentenceBoundaryMissing };

struct PauseEvent {
  std::size_t position = 0;  // gap between syllable `position` and `position + 1`
  PauseCause cause = PauseCause::kRestNote;
  bool operator==(const PauseEvent&) const = default;
};

// Pauses and missing sentence-boundary pauses, ordered by gap then cause.
std::vector<PauseEvent> detect_pauses(const Melody& melody, const LyricSequence& lyrics,
                                      const Rational& long_note_threshold);

// Per-gap view: true when a rest sits in gap k or syllable k holds a long note.
std::vector<bool> pauses_at_gaps(const Melody& melody, const Rational& long_note_threshold);

// JSON token stream: {"time_signature": [4, 4], "tokens": [{"kind": "note", ...}]}.
nlohmann::json melody_to_json(const Melody& melody);
Melody melody_from_json(const nlohmann::json& doc);

}  // namespace lyre

#endif  // LYRE_MELODY_HPP_
