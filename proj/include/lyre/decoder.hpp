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

#ifndef LYRE_DECODER_HPP_
#define LYRE_DECODER_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lyre/lyrics.hpp"
#include "lyre/melody.hpp"
#include "lyre/reward_config.hpp"
#include "lyre/rewards.hpp"
#include "lyre/scorer.hpp"

namespace lyre {

enum class DecodeMode { kBeamSoft, kBeamHard, kSample, kRerank };
enum class Pipeline { kSingleStage, kTwoStage };

std::string_view to_string(DecodeMode mode);
std::string_view to_string(Pipeline pipeline);

struct DecodeOptions {
  DecodeMode mode = DecodeMode::kBeamSoft;
  int beam_width = 4;
  int top_k = 5;
  double temperature = 1.0;
  int rerank_candidates = 8;
  Pipeline pipeline = Pipeline::kSingleStage;
  int max_notes_per_syllable = 4;
  std::uint64_t seed = 0;
  // Reward aspects switched on; Aspects::none() disables the rewards entirely.
  Aspects active = Aspects::all();
  TimeSignature time_signature;

  // Throws OptionError.
  void validate() const;
};

// A partial melody under search. score() = base_log_prob + reward.
struct Hypothesis {
  DecodeState state;
  std::vector<int> context;     // scorer ids fed back as context
  std::vector<int> order_keys;  // per-step vocabulary ids, for tie-breaking
  double base_log_prob = 0.0;
  double reward = 0.0;

  explicit Hypothesis(DecodeState s) : state(std::move(s)) {}
  double score() const { return base_log_prob + reward; }
};

// A step at which hard masking removed every candidate and soft scoring was used.
struct RelaxationEvent {
  std::string stage;  // "single", "rhythm" or "pitch"
  std::size_t step = 0;
  bool operator==(const RelaxationEvent&) const = default;
};

struct DecodeResult {
  Melody melody;
  double score = 0.0;
  double base_log_prob = 0.0;
  double reward = 0.0;
  std::vector<RelaxationEvent> relaxations;
  std::vector<std::string> warnings;
};

// Durations fixed before pitches are chosen: the template of two-stage decoding.
struct RhythmSkeleton {
  struct SyllableRhythm {
    std::vector<Rational> note_durations;
    std::vector<Rational> trailing_rests;
    bool operator==(const SyllableRhythm&) const = default;
  };
  std::vector<SyllableRhythm> syllables;

  static RhythmSkeleton from_tokens(const std::vector<MelodyToken>& tokens);
  // Unpitched token stream (pitch == kUnpitched).
  std::vector<MelodyToken> tokens() const;
  bool operator==(const RhythmSkeleton&) const = default;
};

// Grammar of decodable melodies: a note opening the next syllable while one
// remains; a continuation while the open syllable has fewer than
// max_notes_per_syllable notes; a rest after at least one syllable and not
// after another rest; End once every syllable has started.
bool is_legal_step(const DecodeState& state, const VocabEntry& entry, int max_notes_per_syllable);

// Candidates a hard decoder keeps: those whose triggered rewards, over active
// aspects with a positive weight, all reach their maximum.
bool violates_hard_constraints(const DecodeState& state, const DecodeStep& step, const RewardConfig& config,
                               Aspects active);

DecodeResult beam_search(const LyricSequence& lyrics, const Scorer& scorer, const RewardConfig& config,
                         const DecodeOptions& options);
DecodeResult beam_search_hard(const LyricSequence& lyrics, const Scorer& scorer, const RewardConfig& config,
                              const DecodeOptions& options);
// Constrained top-k sampling; reproducible per options.seed.
DecodeResult sample(const LyricSequence& lyrics, const Scorer& scorer, const RewardConfig& config,
                    const DecodeOptions& options);
// Draws rerank_candidates unconstrained samples and keeps the best by
// base log-prob plus weighted reward of the whole melody.
DecodeResult rerank(const LyricSequence& lyrics, const Scorer& scorer, const RewardConfig& config,
                    const DecodeOptions& options);

// Stage 1: rhythm template with rhythm rewards only. Notes of the returned
// melody carry pitch 0.
DecodeResult decode_rhythm(const LyricSequence& lyrics, const Scorer& rhythm_scorer, const RewardConfig& config,
                           const DecodeOptions& options);
// Stage 2: pitches on a fixed template with tone and structure rewards.
DecodeResult decode_pitches(const LyricSequence& lyrics, const RhythmSkeleton& skeleton, const Scorer& pitch_scorer,
                            const RewardConfig& config, const DecodeOptions& options);
DecodeResult decode_two_stage(const LyricSequence& lyrics, const Scorer& rhythm_scorer, const Scorer& pitch_scorer,
                              const RewardConfig& config, const DecodeOptions& options);

// Dispatches on options.pipeline and options.mode.
DecodeResult decode(const LyricSequence& lyrics, const ModelBundle& models, const RewardConfig& config,
                    const DecodeOptions& options);

struct ScoreBreakdown {
  double base_log_prob = 0.0;
  double reward = 0.0;
  double score() const { return base_log_prob + reward; }
};

// Scores a finished melody from scratch (whole-sequence path, no decode state).
ScoreBreakdown score_melody(const LyricSequence& lyrics, const Melody& melody, const Scorer& scorer,
                            const RewardConfig& config, Aspects active);
ScoreBreakdown score_two_stage(const LyricSequence& lyrics, const Melody& melody, const Scorer& rhythm_scorer,
                               const Scorer& pitch_scorer, const RewardConfig& config, Aspects active);

}  // namespace lyre

#endif  // LYRE_DECODER_HPP_
