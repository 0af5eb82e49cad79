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

#include "lyre/rewards.hpp"

#include <algorithm>

#include "lyre/error.hpp"

namespace lyre {

Aspect aspect_of(RewardKind kind) {
  switch (kind) {
    case RewardKind::kShape:
    case RewardKind::kTransition:
    case RewardKind::kContour:
      return Aspect::kTone;
    case RewardKind::kStrongWeak:
    case RewardKind::kPause:
      return Aspect::kRhythm;
    case RewardKind::kStructure:
      break;
  }
  return Aspect::kStructure;
}

std::string_view to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::kShape: return "shape";
    case RewardKind::kTransition: return "transition";
    case RewardKind::kContour: return "contour";
    case RewardKind::kStrongWeak: return "strong_weak";
    case RewardKind::kPause: return "pause";
    case RewardKind::kStructure: break;
  }
  return "structure";
}

double aspect_weight(Aspect aspect, const RewardConfig& config, Aspects active) {
  if (!active.contains(aspect)) return 0.0;
  switch (aspect) {
    case Aspect::kTone: return config.lambda_tone;
    case Aspect::kRhythm: return config.lambda_rhythm;
    case Aspect::kStructure: break;
  }
  return config.lambda_structure;
}

bool pitch_shape_matches(Tone tone, std::span<const int> p) {
  const std::size_t n = p.size();
  switch (tone) {
    case Tone::kTone1:
      return std::all_of(p.begin(), p.end(), [&](int x) { return x == p.front(); });
    case Tone::kTone2:
      return std::is_sorted(p.begin(), p.end()) && p.back() > p.front();
    case Tone::kTone4:
      return std::is_sorted(p.begin(), p.end(), std::greater<>()) && p.back() < p.front();
    case Tone::kTone3:
      if (n == 2) return p[1] < p[0];
      for (std::size_t m = 1; m + 1 < n; ++m) {
        if (p[m] < p.front() && p[m] < p.back()) return true;
      }
      return false;
    case Tone::kTone5:
      return true;
    default:
      return false;
  }
}

std::optional<double> pitch_shape_reward(Tone tone, std::span<const int> syllable_pitches,
                                         const RewardConfig& config) {
  if (syllable_pitches.size() < 2 || !is_lexical_tone(tone)) return std::nullopt;
  return pitch_shape_matches(tone, syllable_pitches) ? config.shape_reward_on_match : 0.0;
}

std::optional<double> pitch_transition_reward(Tone previous, Tone current, int delta_pitch,
                                              const HarmonyTable& table, const RewardConfig& config) {
  if (!is_lexical_tone(previous) || !is_lexical_tone(current)) return std::nullopt;
  return config.transition_reward(table.degree(previous, current, delta_pitch));
}

bool contour_matches(Intonation intonation, int first_pitch, int last_pitch) {
  switch (intonation) {
    case Intonation::kRising: return last_pitch > first_pitch;
    case Intonation::kFalling: return last_pitch < first_pitch;
    case Intonation::kNeutral: break;
  }
  return true;
}

double pitch_contour_reward(Intonation intonation, int first_pitch, int last_pitch,
                            const RewardConfig& config) {
  return contour_matches(intonation, first_pitch, last_pitch) ? config.contour_reward_on_match : 0.0;
}

std::optional<bool> strong_weak_matches(StressClass stress_class, BeatStrength strength) {
  switch (stress_class) {
    case StressClass::kKeyword: return strength == BeatStrength::kStrong;
    case StressClass::kAuxiliary: return strength == BeatStrength::kWeak;
    case StressClass::kNeutral: break;
  }
  return std::nullopt;
}

std::optional<double> strong_weak_reward(StressClass stress_class, BeatStrength strength,
                                         const RewardConfig& config) {
  auto matched = strong_weak_matches(stress_class, strength);
  if (!matched) return std::nullopt;
  return *matched ? config.sw_reward_on_match : 0.0;
}

BoundaryKind boundary_after(const LyricSequence& lyrics, std::size_t k) {
  if (lyrics.syllables[k].sentence_final) return BoundaryKind::kSentenceBoundary;
  if (lyrics.syllables[k + 1].word_position == WordPosition::kWordStart) return BoundaryKind::kWordBoundary;
  return BoundaryKind::kWordInner;
}

double pause_reward(bool causes_pause, BoundaryKind boundary, const RewardConfig& config) {
  if (causes_pause) return boundary == BoundaryKind::kWordInner ? 0.0 : config.pause_reward_on_match;
  return boundary == BoundaryKind::kSentenceBoundary ? 0.0 : config.pause_reward_on_match;
}

double structure_reward(int delta_pitch_i, int delta_pitch_j, const RewardConfig& config) {
  if (delta_pitch_i == delta_pitch_j) return config.structure_reward_exact;
  if ((delta_pitch_i - delta_pitch_j) % 12 == 0) return config.structure_reward_octave;
  return 0.0;
}

double weighted_sum(std::span<const TriggeredReward> rewards, const RewardConfig& config, Aspects active) {
  double tone = 0.0, rhythm = 0.0, structure = 0.0;
  for (const auto& r : rewards) {
    switch (aspect_of(r.kind)) {
      case Aspect::kTone: tone += r.value; break;
      case Aspect::kRhythm: rhythm += r.value; break;
      case Aspect::kStructure: structure += r.value; break;
    }
  }
  return aspect_weight(Aspect::kTone, config, active) * tone +
         aspect_weight(Aspect::kRhythm, config, active) * rhythm +
         aspect_weight(Aspect::kStructure, config, active) * structure;
}

namespace {

double max_value(RewardKind kind, const RewardConfig& config) {
  switch (kind) {
    case RewardKind::kShape: return config.shape_reward_on_match;
    case RewardKind::kTransition: return config.transition_rewards[0];
    case RewardKind::kContour: return config.contour_reward_on_match;
    case RewardKind::kStrongWeak: return config.sw_reward_on_match;
    case RewardKind::kPause: return config.pause_reward_on_match;
    case RewardKind::kStructure: break;
  }
  return std::max(config.structure_reward_exact, config.structure_reward_octave);
}

TriggeredReward make(RewardKind kind, double value, std::size_t syllable, const RewardConfig& config) {
  return {kind, value, max_value(kind, config), syllable};
}

}  // namespace

std::vector<TriggeredReward> sequence_rewards(const LyricSequence& lyrics, const StructureMatrix& structure,
                                              const Melody& melody, const RewardConfig& config) {
  melody.check_aligned(lyrics);
  const auto& tokens = melody.tokens();
  const auto& spans = melody.alignment();
  const std::size_t n = spans.size();
  const BeatGrid grid = compute_beat_grid(melody);
  const std::vector<bool> pauses = pauses_at_gaps(melody, config.long_note_threshold);
  const auto partners = structure.partners(n);
  auto first = [&](std::size_t k) { return tokens[spans[k].begin].pitch; };

  std::vector<TriggeredReward> out;
  for (std::size_t k = 0; k < n; ++k) {
    const Syllable& syl = lyrics.syllables[k];
    std::vector<int> pitches;
    for (std::size_t t = spans[k].begin; t < spans[k].end; ++t) pitches.push_back(tokens[t].pitch);
    if (auto r = pitch_shape_reward(syl.tone, pitches, config)) {
      out.push_back(make(RewardKind::kShape, *r, k, config));
    }
    if (k > 0 && lyrics.syllables[k - 1].sentence_index == syl.sentence_index) {
      if (auto r = pitch_transition_reward(lyrics.syllables[k - 1].tone, syl.tone, first(k) - first(k - 1),
                                           config.harmony_table, config)) {
        out.push_back(make(RewardKind::kTransition, *r, k, config));
      }
    }
    if (syl.word_position == WordPosition::kWordStart) {
      if (auto r = strong_weak_reward(syl.stress_class, grid.strengths[spans[k].begin], config)) {
        out.push_back(make(RewardKind::kStrongWeak, *r, k, config));
      }
    }
    if (partners[k] && *partners[k] >= 1) {
      std::size_t j = *partners[k];
      double r = structure_reward(first(k) - first(k - 1), first(j) - first(j - 1), config);
      out.push_back(make(RewardKind::kStructure, r, k, config));
    }
    if (k + 1 < n) {
      out.push_back(make(RewardKind::kPause, pause_reward(pauses[k], boundary_after(lyrics, k), config), k, config));
    }
  }
  for (const auto& sentence : lyrics.sentences) {
    std::size_t last = sentence.syllable_range.end - 1;
    int first_pitch = first(sentence.syllable_range.begin);
    int last_pitch = tokens[spans[last].end - 1].pitch;
    out.push_back(make(RewardKind::kContour,
                       pitch_contour_reward(sentence.intonation, first_pitch, last_pitch, config), last, config));
  }
  return out;
}

double sequence_reward(const LyricSequence& lyrics, const StructureMatrix& structure, const Melody& melody,
                       const RewardConfig& config, Aspects active) {
  auto rewards = sequence_rewards(lyrics, structure, melody, config);
  return weighted_sum(rewards, config, active);
}

// --- DecodeState ---

DecodeContext::DecodeContext(LyricSequence lyrics_in, TimeSignature ts)
    : lyrics(std::move(lyrics_in)), structure(build_structure_matrix(lyrics)),
      partners(structure.partners(lyrics.size())), time_signature(ts) {
  if (lyrics.size() == 0) throw FormatError("lyrics are empty");
  time_signature.bar_length();
}

DecodeState::DecodeState(std::shared_ptr<const DecodeContext> context)
    : context_(std::move(context)), first_pitch_(context_->lyrics.size(), kUnpitched) {}

std::optional<int> DecodeState::reference_delta(std::size_t i) const {
  if (i == 0 || i >= started_) return std::nullopt;
  if (first_pitch_[i] == kUnpitched || first_pitch_[i - 1] == kUnpitched) return std::nullopt;
  return first_pitch_[i] - first_pitch_[i - 1];
}

// True while the gap after syllable k has not been decided yet.
bool DecodeState::gap_open(std::size_t k, const RewardConfig& config) const {
  return k + 1 < context_->lyrics.size() && !rest_after_span_ && span_max_duration_ < config.long_note_threshold;
}

void DecodeState::close_span_rewards(const RewardConfig& config, std::vector<TriggeredReward>& out) const {
  if (!span_open_) return;
  const LyricSequence& lyrics = context_->lyrics;
  const std::size_t k = started_ - 1;
  if (span_pitches_.front() == kUnpitched) return;
  if (auto r = pitch_shape_reward(lyrics.syllables[k].tone, span_pitches_, config)) {
    out.push_back(make(RewardKind::kShape, *r, k, config));
  }
  if (lyrics.syllables[k].sentence_final) {
    const Sentence& sentence = lyrics.sentence_of(k);
    int first = first_pitch_[sentence.syllable_range.begin];
    out.push_back(make(RewardKind::kContour, pitch_contour_reward(sentence.intonation, first, last_note_pitch_, config),
                       k, config));
  }
}

std::vector<TriggeredReward> DecodeState::rewards_for(const DecodeStep& step, const RewardConfig& config) const {
  std::vector<TriggeredReward> out;
  const LyricSequence& lyrics = context_->lyrics;
  const std::size_t n = lyrics.size();
  const MelodyToken& tok = step.token;

  if (step.end || tok.is_rest()) {
    close_span_rewards(config, out);
    if (!step.end && started_ > 0 && gap_open(started_ - 1, config)) {
      std::size_t k = started_ - 1;
      out.push_back(make(RewardKind::kPause, pause_reward(true, boundary_after(lyrics, k), config), k, config));
    }
    return out;
  }

  const bool long_note = is_long_note(tok, config.long_note_threshold);
  if (!tok.new_syllable) {
    std::size_t k = started_ - 1;
    if (long_note && gap_open(k, config)) {
      out.push_back(make(RewardKind::kPause, pause_reward(true, boundary_after(lyrics, k), config), k, config));
    }
    return out;
  }

  const std::size_t m = started_;
  if (m >= n) throw InternalError("note starts syllable beyond the lyrics");
  const Syllable& syl = lyrics.syllables[m];
  if (m > 0) {
    close_span_rewards(config, out);
    if (gap_open(m - 1, config)) {
      out.push_back(make(RewardKind::kPause, pause_reward(false, boundary_after(lyrics, m - 1), config), m - 1, config));
    }
  }
  const bool pitched = tok.pitch != kUnpitched;
  if (pitched && m > 0 && lyrics.syllables[m - 1].sentence_index == syl.sentence_index) {
    if (auto r = pitch_transition_reward(lyrics.syllables[m - 1].tone, syl.tone, tok.pitch - first_pitch_[m - 1],
                                         config.harmony_table, config)) {
      out.push_back(make(RewardKind::kTransition, *r, m, config));
    }
  }
  if (syl.word_position == WordPosition::kWordStart) {
    const TimeSignature& ts = context_->time_signature;
    BeatStrength strength = beat_strength(floor_mod(position_, ts.bar_length()), ts);
    if (auto r = strong_weak_reward(syl.stress_class, strength, config)) {
      out.push_back(make(RewardKind::kStrongWeak, *r, m, config));
    }
  }
  if (pitched && context_->partners[m] && *context_->partners[m] >= 1) {
    std::size_t j = *context_->partners[m];
    int delta_i = tok.pitch - first_pitch_[m - 1];
    int delta_j = first_pitch_[j] - first_pitch_[j - 1];
    out.push_back(make(RewardKind::kStructure, structure_reward(delta_i, delta_j, config), m, config));
  }
  if (long_note && m + 1 < n) {
    out.push_back(make(RewardKind::kPause, pause_reward(true, boundary_after(lyrics, m), config), m, config));
  }
  return out;
}

void DecodeState::apply(const DecodeStep& step) {
  if (ended_) throw InternalError("step applied after the end of the melody");
  if (step.end) {
    ended_ = true;
    span_open_ = false;
    return;
  }
  const MelodyToken& tok = step.token;
  tokens_.push_back(tok);
  position_ += tok.duration;
  if (tok.is_rest()) {
    span_open_ = false;
    rest_after_span_ = true;
    return;
  }
  if (tok.new_syllable) {
    if (started_ >= first_pitch_.size()) throw InternalError("note starts syllable beyond the lyrics");
    first_pitch_[started_] = tok.pitch;
    ++started_;
    span_open_ = true;
    span_pitches_.assign(1, tok.pitch);
    span_max_duration_ = tok.duration;
    rest_after_span_ = false;
  } else {
    if (!span_open_) throw InternalError("continuation note with no open syllable");
    span_pitches_.push_back(tok.pitch);
    span_max_duration_ = std::max(span_max_duration_, tok.duration);
  }
  last_note_pitch_ = tok.pitch;
}

double total_reward(const DecodeState& state, const DecodeStep& step, const RewardConfig& config,
                    Aspects active) {
  auto rewards = state.rewards_for(step, config);
  return weighted_sum(rewards, config, active);
}

}  // namespace lyre
