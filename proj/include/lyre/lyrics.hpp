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

#ifndef LYRE_LYRICS_HPP_
#define LYRE_LYRICS_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace lyre {

enum class Tone { kTone1, kTone2, kTone3, kTone4, kTone5, kStressed, kUnstressed, kNoTone };
enum class WordPosition { kWordStart, kWordInner };
enum class StressClass { kKeyword, kAuxiliary, kNeutral };
enum class Intonation { kRising, kFalling, kNeutral };
enum class Language { kTonal, kStressAccent };

// True for Tone1..Tone5.
bool is_lexical_tone(Tone tone);
// 0..4 for Tone1..Tone5. Precondition: is_lexical_tone(tone).
int tone_index(Tone tone);

struct Syllable {
  std::string text;
  Tone tone = Tone::kNoTone;
  WordPosition word_position = WordPosition::kWordStart;
  StressClass stress_class = StressClass::kNeutral;
  std::size_t sentence_index = 0;
  bool sentence_final = false;

  bool operator==(const Syllable&) const = default;
};

// Half-open index span [begin, end).
struct IndexSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool operator==(const IndexSpan&) const = default;
};

struct Sentence {
  IndexSpan syllable_range;
  Intonation intonation = Intonation::kNeutral;
  // Set only for sentences whose text repeats elsewhere in the song.
  std::optional<int> structure_group;
  // Sentence-final punctuation exactly as written.
  std::string terminator;

  bool operator==(const Sentence&) const = default;
};

struct LyricSequence {
  std::vector<Syllable> syllables;
  std::vector<Sentence> sentences;
  Language language = Language::kTonal;

  std::size_t size() const { return syllables.size(); }
  const Sentence& sentence_of(std::size_t syllable) const {
    return sentences[syllables[syllable].sentence_index];
  }
  bool operator==(const LyricSequence&) const = default;
};

// Pairs (i, j), j < i: syllable i sits at the same offset of a repeated
// sentence as syllable j in the earliest sentence of its structure group.
struct StructureMatrix {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // sorted by i

  bool empty() const { return pairs.empty(); }
  // partner(i) for every syllable of a song of length n.
  std::vector<std::optional<std::size_t>> partners(std::size_t n) const;
  bool operator==(const StructureMatrix&) const = default;
};

// Annotated-lyrics text format, one sentence per line:
//
//   ni3|W,K cai3|I hong2|I .
//
// A syllable token is `text[1-5|']|flags`; flags are a comma-separated subset of
// W (word start), I (word inner), K (keyword), A (auxiliary) and E (explicit
// sentence end, last syllable only). The last token of a line is the sentence
// punctuation. Blank lines and lines starting with '#' are ignored.
LyricSequence parse_lyrics(std::string_view source);
std::string serialize_lyrics(const LyricSequence& lyrics);

// JSON mirror of the text format, see docs/formats.md.
LyricSequence parse_lyrics_json(const nlohmann::json& doc);
nlohmann::json lyrics_to_json(const LyricSequence& lyrics);

// Reads a lyric file, choosing the JSON reader for a ".json" extension.
LyricSequence load_lyrics(const std::string& path);

// Sentence intonation from its final punctuation. Total: unknown marks are Neutral.
Intonation detect_intonation(char32_t terminator);
Intonation detect_intonation(std::string_view terminator);

// Normalized text used for repetition detection: lowercase, tone digits stripped.
std::string normalized_text(const LyricSequence& lyrics, const Sentence& sentence);

StructureMatrix build_structure_matrix(const LyricSequence& lyrics);

std::string_view to_string(Tone tone);
std::string_view to_string(Intonation intonation);

}  // namespace lyre

#endif  // LYRE_LYRICS_HPP_
