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

#include "lyre/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lyre/error.hpp"

namespace lyre {

namespace {

struct Expansion {
  DecodeStep step;
  int order_key = 0;
  int context_id = -1;  // appended to the scorer context when >= 0
  double log_prob = 0.0;
};

class SearchSpace {
 public:
  virtual ~SearchSpace() = default;
  virtual std::vector<Expansion> expand(const Hypothesis& h) const = 0;
};

// Every legal vocabulary token, scored by one model.
class FreeSpace final : public SearchSpace {
 public:
  FreeSpace(const Scorer& scorer, int max_notes) : scorer_(scorer), max_notes_(max_notes) {}

  std::vector<Expansion> expand(const Hypothesis& h) const override {
    const TokenVocabulary& vocab = scorer_.vocabulary();
    std::vector<double> logp = scorer_.log_prob_dist(h.context);
    std::vector<Expansion> out;
    for (std::size_t id = 0; id < vocab.size(); ++id) {
      const VocabEntry& e = vocab.entry(id);
      if (!is_legal_step(h.state, e, max_notes_)) continue;
      out.push_back({e.step(), static_cast<int>(id), static_cast<int>(id), logp[id]});
    }
    return out;
  }

 private:
  const Scorer& scorer_;
  int max_notes_;
};

// Pitches over a fixed rhythm template. Rests and End are forced (log-prob 0).
class SkeletonSpace final : public SearchSpace {
 public:
  SkeletonSpace(const Scorer& scorer, std::vector<MelodyToken> skeleton)
      : scorer_(scorer), skeleton_(std::move(skeleton)) {}

  std::vector<Expansion> expand(const Hypothesis& h) const override {
    const std::size_t t = h.state.tokens().size();
    if (t == skeleton_.size()) return {{DecodeStep::end_of_melody(), 0, -1, 0.0}};
    const MelodyToken& slot = skeleton_[t];
    if (slot.is_rest()) return {{DecodeStep::of(slot), 0, -1, 0.0}};
    const TokenVocabulary& vocab = scorer_.vocabulary();
    std::vector<double> logp = scorer_.log_prob_dist(h.context);
    std::vector<Expansion> out;
    out.reserve(vocab.size());
    for (std::size_t id = 0; id < vocab.size(); ++id) {
      MelodyToken tok = MelodyToken::note(vocab.entry(id).pitch, slot.duration, slot.new_syllable);
      out.push_back({DecodeStep::of(tok), static_cast<int>(id), static_cast<int>(id), logp[id]});
    }
    return out;
  }

 private:
  const Scorer& scorer_;
  std::vector<MelodyToken> skeleton_;
};

struct Candidate {
  std::size_t parent;
  Expansion expansion;
  double reward;
  double score;
};

Hypothesis extend(const Hypothesis& parent, const Expansion& e, double reward) {
  Hypothesis child = parent;
  child.state.apply(e.step);
  if (e.context_id >= 0) child.context.push_back(e.context_id);
  child.order_keys.push_back(e.order_key);
  child.base_log_prob += e.log_prob;
  child.reward += reward;
  return child;
}

bool better_finished(const Hypothesis& a, const Hypothesis& b) {
  if (a.score() != b.score()) return a.score() > b.score();
  if (a.order_keys != b.order_keys) {
    return std::lexicographical_compare(a.order_keys.begin(), a.order_keys.end(), b.order_keys.begin(),
                                        b.order_keys.end());
  }
  return a.order_keys.size() < b.order_keys.size();
}

struct SearchOutcome {
  Hypothesis best;
  std::vector<RelaxationEvent> relaxations;
};

SearchOutcome run_beam(const SearchSpace& space, Hypothesis root, const RewardConfig& config, Aspects active,
                       int width, bool hard, std::string_view stage) {
  std::vector<Hypothesis> beam;
  beam.push_back(std::move(root));
  std::vector<Hypothesis> finished;
  std::vector<RelaxationEvent> relaxations;

  for (std::size_t step = 0; !beam.empty(); ++step) {
    // Rank parents by their token order once; all parents share a length.
    std::vector<std::size_t> rank(beam.size());
    {
      std::vector<std::size_t> idx(beam.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(),
                [&](std::size_t a, std::size_t b) { return beam[a].order_keys < beam[b].order_keys; });
      for (std::size_t r = 0; r < idx.size(); ++r) rank[idx[r]] = r;
    }

    std::vector<Candidate> candidates;
    std::vector<Candidate> survivors;
    for (std::size_t i = 0; i < beam.size(); ++i) {
      for (Expansion& e : space.expand(beam[i])) {
        auto rewards = beam[i].state.rewards_for(e.step, config);
        double r = weighted_sum(rewards, config, active);
        double score = beam[i].score() + e.log_prob + r;
        Candidate c{i, std::move(e), r, score};
        if (hard && violates_hard_constraints(beam[i].state, c.expansion.step, config, active)) {
          candidates.push_back(std::move(c));
        } else {
          survivors.push_back(c);
          candidates.push_back(std::move(c));
        }
      }
    }
    if (candidates.empty()) throw InternalError("decoder reached a state with no legal continuation");
    if (hard) {
      if (survivors.empty()) {
        relaxations.push_back({std::string(stage), step});
      } else {
        candidates = std::move(survivors);
      }
    }

    auto order = [&](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      if (rank[a.parent] != rank[b.parent]) return rank[a.parent] < rank[b.parent];
      return a.expansion.order_key < b.expansion.order_key;
    };
    std::size_t keep = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(width));
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      order);

    std::vector<Hypothesis> next;
    for (std::size_t c = 0; c < keep; ++c) {
      Hypothesis child = extend(beam[candidates[c].parent], candidates[c].expansion, candidates[c].reward);
      if (child.state.ended()) {
        finished.push_back(std::move(child));
      } else {
        next.push_back(std::move(child));
      }
    }
    beam = std::move(next);
  }
  auto best = std::min_element(finished.begin(), finished.end(), better_finished);
  return {*best, std::move(relaxations)};
}

double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Hypothesis run_sampler(const SearchSpace& space, Hypothesis root, const RewardConfig& config, Aspects active,
                       int top_k, double temperature, std::mt19937_64& rng) {
  Hypothesis h = std::move(root);
  while (!h.state.ended()) {
    std::vector<Expansion> expansions = space.expand(h);
    if (expansions.empty()) throw InternalError("sampler reached a state with no legal continuation");
    std::vector<Candidate> candidates;
    candidates.reserve(expansions.size());
    for (Expansion& e : expansions) {
      double r = weighted_sum(h.state.rewards_for(e.step, config), config, active);
      double step_score = e.log_prob + r;
      candidates.push_back({0, std::move(e), r, step_score});
    }
    std::size_t keep = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(top_k));
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      [](const Candidate& a, const Candidate& b) {
                        if (a.score != b.score) return a.score > b.score;
                        return a.expansion.order_key < b.expansion.order_key;
                      });
    const double top = candidates.front().score;
    std::vector<double> weights(keep);
    double total = 0.0;
    for (std::size_t c = 0; c < keep; ++c) {
      weights[c] = std::exp((candidates[c].score - top) / temperature);
      total += weights[c];
    }
    double u = uniform_unit(rng) * total;
    std::size_t pick = 0;
    for (double acc = weights[0]; pick + 1 < keep && u >= acc; acc += weights[++pick]) {
    }
    h = extend(h, candidates[pick].expansion, candidates[pick].reward);
  }
  return h;
}

Hypothesis make_root(const LyricSequence& lyrics, const DecodeOptions& options) {
  auto context = std::make_shared<const DecodeContext>(lyrics, options.time_signature);
  return Hypothesis(DecodeState(std::move(context)));
}

DecodeResult to_result(const Hypothesis& h, std::vector<RelaxationEvent> relaxations = {}) {
  DecodeResult result;
  std::vector<MelodyToken> tokens = h.state.tokens();
  for (auto& tok : tokens) {
    if (tok.pitch == kUnpitched) tok.pitch = 0;
  }
  result.melody = Melody(std::move(tokens), h.state.context().time_signature);
  result.base_log_prob = h.base_log_prob;
  result.reward = h.reward;
  result.score = h.score();
  result.relaxations = std::move(relaxations);
  return result;
}

void require_kind(const Scorer& scorer, VocabularyKind kind, std::string_view role) {
  if (scorer.vocabulary().kind() != kind) {
    throw OptionError(std::string(role) + " scorer has the wrong vocabulary kind");
  }
}

std::vector<std::string> top_k_warnings(const Scorer& scorer, const DecodeOptions& options) {
  std::vector<std::string> warnings;
  if (static_cast<std::size_t>(options.top_k) > scorer.vocabulary().size()) {
    warnings.push_back("top_k " + std::to_string(options.top_k) + " exceeds the vocabulary size " +
                       std::to_string(scorer.vocabulary().size()) + "; clamped");
  }
  return warnings;
}

Aspects intersect(Aspects a, Aspects b) { return {a.tone && b.tone, a.rhythm && b.rhythm, a.structure && b.structure}; }

}  // namespace

std::string_view to_string(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kBeamSoft: return "beam";
    case DecodeMode::kBeamHard: return "hard";
    case DecodeMode::kSample: return "sample";
    case DecodeMode::kRerank: break;
  }
  return "rerank";
}

std::string_view to_string(Pipeline pipeline) {
  return pipeline == Pipeline::kSingleStage ? "single-stage" : "two-stage";
}

void DecodeOptions::validate() const {
  if (beam_width < 1) throw OptionError("beam_width must be at least 1");
  if (top_k < 1) throw OptionError("top_k must be at least 1");
  if (!(temperature > 0.0)) throw OptionError("temperature must be positive");
  if (rerank_candidates < 1) throw OptionError("rerank_candidates must be at least 1");
  if (max_notes_per_syllable < 1) throw OptionError("max_notes_per_syllable must be at least 1");
  time_signature.bar_length();
}

RhythmSkeleton RhythmSkeleton::from_tokens(const std::vector<MelodyToken>& tokens) {
  RhythmSkeleton skeleton;
  for (const auto& tok : tokens) {
    if (tok.is_rest()) {
      if (skeleton.syllables.empty()) throw InternalError("rhythm template starts with a rest");
      skeleton.syllables.back().trailing_rests.push_back(tok.duration);
    } else if (tok.new_syllable) {
      skeleton.syllables.push_back({{tok.duration}, {}});
    } else {
      if (skeleton.syllables.empty() || !skeleton.syllables.back().trailing_rests.empty()) {
        throw InternalError("rhythm template has a continuation note with no open syllable");
      }
      skeleton.syllables.back().note_durations.push_back(tok.duration);
    }
  }
  return skeleton;
}

std::vector<MelodyToken> RhythmSkeleton::tokens() const {
  std::vector<MelodyToken> out;
  for (const auto& syl : syllables) {
    for (std::size_t i = 0; i < syl.note_durations.size(); ++i) {
      out.push_back(MelodyToken::note(kUnpitched, syl.note_durations[i], i == 0));
    }
    for (const auto& r : syl.trailing_rests) out.push_back(MelodyToken::rest(r));
  }
  return out;
}

bool is_legal_step(const DecodeState& state, const VocabEntry& entry, int max_notes_per_syllable) {
  if (state.ended()) return false;
  const std::size_t n = state.context().lyrics.size();
  switch (entry.kind) {
    case VocabKind::kEnd:
      return state.syllables_started() == n;
    case VocabKind::kRest:
      return state.syllables_started() > 0 && !state.last_was_rest();
    case VocabKind::kNote:
      if (entry.new_syllable) return state.syllables_started() < n;
      return state.notes_in_open_span() >= 1 &&
             state.notes_in_open_span() < static_cast<std::size_t>(max_notes_per_syllable);
  }
  return false;
}

bool violates_hard_constraints(const DecodeState& state, const DecodeStep& step, const RewardConfig& config,
                               Aspects active) {
  for (const auto& r : state.rewards_for(step, config)) {
    if (aspect_weight(aspect_of(r.kind), config, active) <= 0.0) continue;
    if (r.value < r.max) return true;
  }
  return false;
}

DecodeResult beam_search(const LyricSequence& lyrics, const Scorer& scorer, const RewardConfig& config,
                         const DecodeOptions& options) {
  options.validate();
  FreeSpace space(scorer, options.max_notes_per_syllable);
  auto outcome = run_beam(space, make_root(lyrics, options), config, options.active, options.beam_width,
                          false, "single");
  return to_result(outcome.best);
}

DecodeResult beam_search_hard(const LyricSequence& lyrics, const Scorer& scorer, const RewardConfig& config,
                              const DecodeOptions& options) {
  options.validate();
  FreeSpace space(scorer, options.max_notes_per_syllable);
  auto outcome = run_beam(space, make_root(lyrics, options), config, options.active, options.beam_width,
                          true, "single");
  return to_result(outcome.best, std::move(outcome.relaxations));
}

DecodeResult sample(const LyricSequence& lyrics, const Scorer& scorer, const RewardConfig& config,
                    const DecodeOptions& options) {
  options.validate();
  FreeSpace space(scorer, options.max_notes_per_syllable);
  std::mt19937_64 rng(options.seed);
  Hypothesis h = run_sampler(space, make_root(lyrics, options), config, options.active, options.top_k,
                             options.temperature, rng);
  DecodeResult result = to_result(h);
  result.warnings = top_k_warnings(scorer, options);
  return result;
}

DecodeResult rerank(const LyricSequence& lyrics, const Scorer& scorer, const RewardConfig& config,
                    const DecodeOptions& options) {
  options.validate();
  FreeSpace space(scorer, options.max_notes_per_syllable);
  std::mt19937_64 rng(options.seed);
  const Hypothesis root = make_root(lyrics, options);
  const StructureMatrix& structure = root.state.context().structure;
  std::optional<DecodeResult> best;
  for (int c = 0; c < options.rerank_candidates; ++c) {
    Hypothesis h = run_sampler(space, root, config, Aspects::none(), options.top_k, options.temperature, rng);
    DecodeResult candidate = to_result(h);
    candidate.reward = sequence_reward(lyrics, structure, candidate.melody, config, options.active);
    candidate.score = candidate.base_log_prob + candidate.reward;
    if (!best || candidate.score > best->score) best = std::move(candidate);
  }
  best->warnings = top_k_warnings(scorer, options);
  return *best;
}

DecodeResult decode_rhythm(const LyricSequence& lyrics, const Scorer& rhythm_scorer, const RewardConfig& config,
                           const DecodeOptions& options) {
  options.validate();
  require_kind(rhythm_scorer, VocabularyKind::kRhythm, "rhythm");
  FreeSpace space(rhythm_scorer, options.max_notes_per_syllable);
  Aspects active = intersect(options.active, Aspects::only(Aspect::kRhythm));
  auto outcome = run_beam(space, make_root(lyrics, options), config, active, options.beam_width,
                          options.mode == DecodeMode::kBeamHard, "rhythm");
  return to_result(outcome.best, std::move(outcome.relaxations));
}

DecodeResult decode_pitches(const LyricSequence& lyrics, const RhythmSkeleton& skeleton, const Scorer& pitch_scorer,
                            const RewardConfig& config, const DecodeOptions& options) {
  options.validate();
  require_kind(pitch_scorer, VocabularyKind::kPitch, "pitch");
  if (skeleton.syllables.size() != lyrics.size()) {
    throw InternalError("rhythm template covers " + std::to_string(skeleton.syllables.size()) +
                        " syllables but the lyrics have " + std::to_string(lyrics.size()));
  }
  SkeletonSpace space(pitch_scorer, skeleton.tokens());
  Aspects active = intersect(options.active, Aspects{true, false, true});
  auto outcome = run_beam(space, make_root(lyrics, options), config, active, options.beam_width,
                          options.mode == DecodeMode::kBeamHard, "pitch");
  return to_result(outcome.best, std::move(outcome.relaxations));
}

DecodeResult decode_two_stage(const LyricSequence& lyrics, const Scorer& rhythm_scorer, const Scorer& pitch_scorer,
                              const RewardConfig& config, const DecodeOptions& options) {
  if (options.mode != DecodeMode::kBeamSoft && options.mode != DecodeMode::kBeamHard) {
    throw OptionError("two-stage decoding supports beam and hard modes only");
  }
  DecodeResult rhythm = decode_rhythm(lyrics, rhythm_scorer, config, options);
  RhythmSkeleton skeleton = RhythmSkeleton::from_tokens(rhythm.melody.tokens());
  DecodeResult pitches = decode_pitches(lyrics, skeleton, pitch_scorer, config, options);

  DecodeResult result;
  result.melody = pitches.melody;
  result.base_log_prob = rhythm.base_log_prob + pitches.base_log_prob;
  result.reward = rhythm.reward + pitches.reward;
  result.score = result.base_log_prob + result.reward;
  result.relaxations = rhythm.relaxations;
  result.relaxations.insert(result.relaxations.end(), pitches.relaxations.begin(), pitches.relaxations.end());
  return result;
}

DecodeResult decode(const LyricSequence& lyrics, const ModelBundle& models, const RewardConfig& config,
                    const DecodeOptions& options) {
  if (options.pipeline == Pipeline::kTwoStage) {
    return decode_two_stage(lyrics, *models.rhythm, *models.pitch, config, options);
  }
  switch (options.mode) {
    case DecodeMode::kBeamSoft: return beam_search(lyrics, *models.melody, config, options);
    case DecodeMode::kBeamHard: return beam_search_hard(lyrics, *models.melody, config, options);
    case DecodeMode::kSample: return sample(lyrics, *models.melody, config, options);
    case DecodeMode::kRerank: break;
  }
  return rerank(lyrics, *models.melody, config, options);
}

ScoreBreakdown score_melody(const LyricSequence& lyrics, const Melody& melody, const Scorer& scorer,
                            const RewardConfig& config, Aspects active) {
  ScoreBreakdown out;
  out.base_log_prob = sequence_log_prob(scorer, scorer.vocabulary().encode(melody));
  out.reward = sequence_reward(lyrics, build_structure_matrix(lyrics), melody, config, active);
  return out;
}

ScoreBreakdown score_two_stage(const LyricSequence& lyrics, const Melody& melody, const Scorer& rhythm_scorer,
                               const Scorer& pitch_scorer, const RewardConfig& config, Aspects active) {
  ScoreBreakdown out;
  out.base_log_prob = sequence_log_prob(rhythm_scorer, rhythm_scorer.vocabulary().encode(melody)) +
                      sequence_log_prob(pitch_scorer, pitch_scorer.vocabulary().encode(melody));
  out.reward = sequence_reward(lyrics, build_structure_matrix(lyrics), melody, config, active);
  return out;
}

}  // namespace lyre
