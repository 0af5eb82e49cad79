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

#ifndef LYRE_VOCABULARY_HPP_
#define LYRE_VOCABULARY_HPP_

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "lyre/melody.hpp"
#include "lyre/rational.hpp"
#include "lyre/rewards.hpp"

namespace lyre {

enum class VocabKind { kNote, kRest, kEnd };

struct VocabEntry {
  VocabKind kind = VocabKind::kNote;
  int pitch = kUnpitched;
  Rational duration{0};
  bool new_syllable = false;

  DecodeStep step() const;
  std::string label() const;
  bool operator==(const VocabEntry&) const = default;
};

// What a vocabulary's tokens describe.
//   kMelody: pitched notes (with and without new_syllable), rests, End.
//   kRhythm: unpitched notes, rests, End; the template of a melody.
//   kPitch:  bare pitches; durations come from elsewhere.
enum class VocabularyKind { kMelody, kRhythm, kPitch };

// Finite, deterministically ordered token set. Order: durations ascending,
// within a duration pitches ascending, new-syllable before continuation;
// then rests by duration; then End.
class TokenVocabulary {
 public:
  struct Spec {
    VocabularyKind kind = VocabularyKind::kMelody;
    int pitch_low = 60;
    int pitch_high = 72;
    std::vector<Rational> durations;
    std::vector<Rational> rest_durations;
    bool melisma = true;
    bool operator==(const Spec&) const = default;
  };

  TokenVocabulary() = default;
  explicit TokenVocabulary(Spec spec);

  const Spec& spec() const { return spec_; }
  VocabularyKind kind() const { return spec_.kind; }
  std::size_t size() const { return entries_.size(); }
  const VocabEntry& entry(std::size_t id) const { return entries_.at(id); }
  const std::vector<VocabEntry>& entries() const { return entries_; }
  std::optional<int> find(const VocabEntry& entry) const;
  std::optional<int> end_id() const;

  // Token ids of a melody: melody and rhythm vocabularies append End; a pitch
  // vocabulary keeps notes only. Throws TrainingError naming the first token
  // outside the vocabulary.
  std::vector<int> encode(const Melody& melody) const;
  // The vocabulary entry a melody token maps to.
  VocabEntry project(const MelodyToken& token) const;

  nlohmann::json to_json() const;
  static TokenVocabulary from_json(const nlohmann::json& doc);

  bool operator==(const TokenVocabulary& other) const { return spec_ == other.spec_; }

 private:
  Spec spec_;
  std::vector<VocabEntry> entries_;
  std::map<std::tuple<int, int, Rational, bool>, int> index_;
};

// Vocabulary spec covering every token of a corpus (pitch range and durations seen).
TokenVocabulary::Spec spec_covering(const std::vector<Melody>& corpus, VocabularyKind kind, bool melisma = true);

}  // namespace lyre

#endif  // LYRE_VOCABULARY_HPP_
