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

#ifndef LYRE_REWARDS_HPP_
#define LYRE_REWARDS_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lyre/lyrics.hpp"
#include "lyre/melody.hpp"
#include "lyre/reward_config.hpp"

namespace lyre {

enum class Aspect { kTone, kRhythm, kStructure };

// Which reward aspects take part in scoring.
struct Aspects {
  bool tone = true;
  bool rhythm = true;
  bool structure = true;

  static Aspects all() { return {}; }
  static Aspects none() { return {false, false, false}; }
  static Aspects only(Aspect a) {
    return {a == Aspect::kTone, a == Aspect::kRhythm, a == Aspect::kStructure};
  }
  bool contains(Aspect a) const {
    return a == Aspect::kTone ? tone : a == Aspect::kRhythm ? rhythm : structure;
  }
  bool operator==(const Aspects&) const = default;
};

enum class RewardKind { kShape, kTransition, kContour, kStrongWeak, kPause, kStructure };

Aspect aspect_of(RewardKind kind);
std::string_view to_string(RewardKind kind);

// Weight of one aspect: its lambda when active, 0 otherwise.
double aspect_weight(Aspect aspect, const RewardConfig& config, Aspects active);

// --- Individual rewards. std::nullopt means "not applicable here". ---

bool pitch_shape_matches(Tone tone, std::span<const int> syllable_pitches);
// Defined only for Tone1..Tone5 and groups of two or more notes.
std::optional<double> pitch_shape_reward(Tone tone, std::span<const int> syllable_pitches,
                                         const RewardConfig& config);

// delta_pitch is the step between the first notes of adjacent syllables.
std::optional<double> pitch_transition_reward(Tone previous, Tone current, int delta_pitch,
                                              const HarmonyTable& table, const RewardConfig& config);

bool contour_matches(Intonation intonation, int first_pitch, int last_pitch);
double pitch_contour_reward(Intonation intonation, int first_pitch, int last_pitch,
                            const RewardConfig& config);

// Neutral words are unconstrained.
std::optional<bool> strong_weak_matches(StressClass stress_class, BeatStrength strength);
std::optional<double> strong_weak_reward(StressClass stress_class, BeatStrength strength,
                                         const RewardConfig& config);

enum class BoundaryKind { kWordInner, kWordBoundary, kSentenceBoundary };

// Kind of the gap after syllable k (k + 1 < lyrics.size()).
BoundaryKind boundary_after(const LyricSequence& lyrics, std::size_t k);
double pause_reward(bool causes_pause, BoundaryKind boundary, const RewardConfig& config);

double structure_reward(int delta_pitch_i, int delta_pitch_j, const RewardConfig& config);

// One reward that fired, at a syllable (or, for pauses, the gap after it).
struct TriggeredReward {
  RewardKind kind;
  double value;
  double max;  // best value this reward could have taken
  std::size_t syllable;
};

double weighted_sum(std::span<const TriggeredReward> rewards, const RewardConfig& config, Aspects active);

// Every reward a finished melody earns, computed from the whole melody at once.
std::vector<TriggeredReward> sequence_rewards(const LyricSequence& lyrics, const StructureMatrix& structure,
                                              const Melody& melody, const RewardConfig& config);

double sequence_reward(const LyricSequence& lyrics, const StructureMatrix& structure, const Melody& melody,
                       const RewardConfig& config, Aspects active);

// --- Incremental evaluation used while decoding. ---

inline constexpr int kUnpitched = -1;

// One decoding step: a token, or the end of the melody.
struct DecodeStep {
  MelodyToken token;
  bool end = false;

  static DecodeStep of(const MelodyToken& token) { return {token, false}; }
  static DecodeStep end_of_melody() { return {MelodyToken::rest(1), true}; }
  bool operator==(const DecodeStep&) const = default;
};

// Immutable per-song inputs shared by every hypothesis.
struct DecodeContext {
  LyricSequence lyrics;
  StructureMatrix structure;
  std::vector<std::optional<std::size_t>> partners;
  TimeSignature time_signature;

  DecodeContext(LyricSequence lyrics_in, TimeSignature ts);
};

// Partial melody plus what the rewards need to score the next step. Notes may
// be unpitched (pitch == kUnpitched) when only rhythm is being decided; tone and
// structure rewards are then skipped.
class DecodeState {
 public:
  explicit DecodeState(std::shared_ptr<const DecodeContext> context);

  const DecodeContext& context() const { return *context_; }
  const std::vector<MelodyToken>& tokens() const { return tokens_; }
  std::size_t syllables_started() const { return started_; }
  std::size_t notes_in_open_span() const { return span_open_ ? span_pitches_.size() : 0; }
  bool last_was_rest() const { return !tokens_.empty() && tokens_.back().is_rest(); }
  bool ended() const { return ended_; }
  const Rational& position() const { return position_; }
  // First pitch of syllable i, or kUnpitched if not emitted.
  int first_pitch(std::size_t i) const { return first_pitch_[i]; }
  // Pitch step of syllable i's first note from syllable i-1's first note.
  std::optional<int> reference_delta(std::size_t i) const;

  // Rewards the step would trigger. Does not check that the step is legal.
  std::vector<TriggeredReward> rewards_for(const DecodeStep& step, const RewardConfig& config) const;
  void apply(const DecodeStep& step);

  Melody melody() const { return Melody(tokens_, context_->time_signature); }

 private:
  bool gap_open(std::size_t k, const RewardConfig& config) const;
  void close_span_rewards(const RewardConfig& config, std::vector<TriggeredReward>& out) const;

  std::shared_ptr<const DecodeContext> context_;
  std::vector<MelodyToken> tokens_;
  Rational position_{0};
  std::size_t started_ = 0;
  bool span_open_ = false;
  std::vector<int> span_pitches_;
  Rational span_max_duration_{0};
  bool rest_after_span_ = false;
  std::vector<int> first_pitch_;
  int last_note_pitch_ = kUnpitched;
  bool ended_ = false;
};

// Weighted reward of appending `step`: lambda_t R_t + lambda_r R_r + lambda_s R_s
// over the active aspects.
double total_reward(const DecodeState& state, const DecodeStep& step, const RewardConfig& config,
                    Aspects active);

}  // namespace lyre

#endif  // LYRE_REWARDS_HPP_
