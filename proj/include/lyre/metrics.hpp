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

#ifndef LYRE_METRICS_HPP_
#define LYRE_METRICS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lyre/lyrics.hpp"
#include "lyre/melody.hpp"
#include "lyre/reward_config.hpp"

namespace lyre {

// Similarity of one repeated sentence to the earliest sentence it repeats.
struct SegmentComparison {
  std::size_t sentence = 0;
  std::size_t reference = 0;
  double pd = 0.0;
  double dd = 0.0;
  double md = 0.0;
};

struct SampleBreakdown {
  std::vector<HarmonyDegree> transition_degrees;  // intra-sentence adjacent pairs
  std::vector<bool> contour_matched;              // per sentence
  std::size_t sw_matched = 0;
  std::size_t sw_total = 0;  // keyword + auxiliary word starts
  std::size_t inner_pauses = 0;
  std::size_t inner_syllables = 0;
  std::vector<SegmentComparison> segments;
};

// Objective metrics of one lyric-melody pair. A field is empty when its
// population is empty (e.g. no keyword or auxiliary words).
struct EvaluationReport {
  std::optional<double> tone_transition;
  std::optional<double> tone_contour;
  std::optional<double> matched_sw;
  std::optional<double> matched_pauses;
  std::optional<double> pd;
  std::optional<double> dd;
  std::optional<double> md;
  SampleBreakdown breakdown;
};

// Excellent 1, Good 0.5, Fair 0.2, Bad 0.
double degree_score(HarmonyDegree degree);

// Mean degree score over adjacent syllables of the same sentence. Empty for
// stress-accent lyrics or when no sentence has two syllables.
std::optional<double> tone_transition_score(const LyricSequence& lyrics, const Melody& melody,
                                            const HarmonyTable& table);
// Fraction of sentences whose first-to-last pitch movement matches their intonation.
std::optional<double> tone_contour_score(const LyricSequence& lyrics, const Melody& melody);
std::optional<double> matched_sw_ratio(const LyricSequence& lyrics, const Melody& melody);
// 1 - (pauses inside words / word-inner syllables).
std::optional<double> matched_pause_ratio(const LyricSequence& lyrics, const Melody& melody,
                                          const RewardConfig& config);

// 1 - total variation distance between normalized histograms.
double histogram_similarity(const std::vector<int>& a, const std::vector<int>& b);
double duration_similarity(const std::vector<Rational>& a, const std::vector<Rational>& b);
// Minimal total |pitch difference| over monotone unit-step alignments, divided
// by the length of that alignment (the shorter one on cost ties).
double melody_distance(const std::vector<int>& a, const std::vector<int>& b);

struct StructureSimilarity {
  std::optional<double> pd;
  std::optional<double> dd;
  std::optional<double> md;
  std::vector<SegmentComparison> segments;
};

// Means over every repeated sentence paired with its earliest occurrence.
StructureSimilarity structure_similarity(const LyricSequence& lyrics, const Melody& melody);

// Throws AlignmentError when the melody does not cover the lyrics.
EvaluationReport evaluate(const LyricSequence& lyrics, const Melody& melody, const RewardConfig& config);

// Per-field mean over the reports where the field is present.
EvaluationReport mean_report(const std::vector<EvaluationReport>& reports);

nlohmann::json report_to_json(const EvaluationReport& report, bool with_breakdown = true);

// Plain-text table with one row per label.
std::string format_report_table(const std::vector<std::string>& labels, const std::vector<EvaluationReport>& rows);

}  // namespace lyre

#endif  // LYRE_METRICS_HPP_
