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

#include "lyre/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "lyre/rewards.hpp"

namespace lyre {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

int first_pitch(const Melody& melody, std::size_t syllable) {
  return melody.tokens()[melody.alignment()[syllable].begin].pitch;
}

template <typename Key>
double total_variation_similarity(const std::vector<Key>& a, const std::vector<Key>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  // Integer counts keep the result exact up to one final division.
  std::map<Key, std::pair<long, long>> hist;
  for (const auto& x : a) hist[x].first += 1;
  for (const auto& x : b) hist[x].second += 1;
  const long na = static_cast<long>(a.size());
  const long nb = static_cast<long>(b.size());
  long distance = 0;  // sum of |ca * nb - cb * na|
  for (const auto& [key, counts] : hist) distance += std::labs(counts.first * nb - counts.second * na);
  const long scale = 2 * na * nb;
  return static_cast<double>(scale - distance) / static_cast<double>(scale);
}

// Notes (not rests) from the first syllable of a sentence through its last.
struct Segment {
  std::vector<int> pitches;
  std::vector<Rational> durations;
};

Segment segment_of(const Melody& melody, const Sentence& sentence) {
  const auto& spans = melody.alignment();
  Segment seg;
  std::size_t begin = spans[sentence.syllable_range.begin].begin;
  std::size_t end = spans[sentence.syllable_range.end - 1].end;
  for (std::size_t t = begin; t < end; ++t) {
    const MelodyToken& tok = melody.tokens()[t];
    if (!tok.is_note()) continue;
    seg.pitches.push_back(tok.pitch);
    seg.durations.push_back(tok.duration);
  }
  return seg;
}

std::optional<double> mean_of(const std::vector<EvaluationReport>& reports,
                              std::optional<double> EvaluationReport::*field) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : reports) {
    if (r.*field) {
      sum += *(r.*field);
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

double degree_score(HarmonyDegree degree) {
  switch (degree) {
    case HarmonyDegree::kExcellent: return 1.0;
    case HarmonyDegree::kGood: return 0.5;
    case HarmonyDegree::kFair: return 0.2;
    case HarmonyDegree::kBad: break;
  }
  return 0.0;
}

namespace {

std::vector<HarmonyDegree> transition_degrees(const LyricSequence& lyrics, const Melody& melody,
                                              const HarmonyTable& table) {
  std::vector<HarmonyDegree> out;
  for (std::size_t k = 1; k < lyrics.size(); ++k) {
    const Syllable& prev = lyrics.syllables[k - 1];
    const Syllable& cur = lyrics.syllables[k];
    if (prev.sentence_index != cur.sentence_index) continue;
    if (!is_lexical_tone(prev.tone) || !is_lexical_tone(cur.tone)) continue;
    out.push_back(table.degree(prev.tone, cur.tone, first_pitch(melody, k) - first_pitch(melody, k - 1)));
  }
  return out;
}

std::vector<bool> contour_flags(const LyricSequence& lyrics, const Melody& melody) {
  std::vector<bool> out;
  for (const auto& sentence : lyrics.sentences) {
    const IndexSpan last_span = melody.alignment()[sentence.syllable_range.end - 1];
    int last = melody.tokens()[last_span.end - 1].pitch;
    out.push_back(contour_matches(sentence.intonation, first_pitch(melody, sentence.syllable_range.begin), last));
  }
  return out;
}

std::pair<std::size_t, std::size_t> sw_counts(const LyricSequence& lyrics, const Melody& melody) {
  const BeatGrid grid = compute_beat_grid(melody);
  std::size_t matched = 0, total = 0;
  for (std::size_t k = 0; k < lyrics.size(); ++k) {
    const Syllable& syl = lyrics.syllables[k];
    if (syl.word_position != WordPosition::kWordStart) continue;
    auto m = strong_weak_matches(syl.stress_class, grid.strengths[melody.alignment()[k].begin]);
    if (!m) continue;
    ++total;
    if (*m) ++matched;
  }
  return {matched, total};
}

std::pair<std::size_t, std::size_t> inner_pause_counts(const LyricSequence& lyrics, const Melody& melody,
                                                       const RewardConfig& config) {
  const std::vector<bool> pauses = pauses_at_gaps(melody, config.long_note_threshold);
  std::size_t paused = 0, inner = 0;
  for (std::size_t k = 0; k + 1 < lyrics.size(); ++k) {
    if (boundary_after(lyrics, k) != BoundaryKind::kWordInner) continue;
    ++inner;
    if (pauses[k]) ++paused;
  }
  return {paused, inner};
}

}  // namespace

std::optional<double> tone_transition_score(const LyricSequence& lyrics, const Melody& melody,
                                            const HarmonyTable& table) {
  if (lyrics.language != Language::kTonal) return std::nullopt;
  melody.check_aligned(lyrics);
  auto degrees = transition_degrees(lyrics, melody, table);
  if (degrees.empty()) return std::nullopt;
  double sum = 0.0;
  for (auto d : degrees) sum += degree_score(d);
  return sum / static_cast<double>(degrees.size());
}

std::optional<double> tone_contour_score(const LyricSequence& lyrics, const Melody& melody) {
  melody.check_aligned(lyrics);
  auto flags = contour_flags(lyrics, melody);
  return ratio(static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true)), flags.size());
}

std::optional<double> matched_sw_ratio(const LyricSequence& lyrics, const Melody& melody) {
  melody.check_aligned(lyrics);
  auto [matched, total] = sw_counts(lyrics, melody);
  return ratio(matched, total);
}

std::optional<double> matched_pause_ratio(const LyricSequence& lyrics, const Melody& melody,
                                          const RewardConfig& config) {
  melody.check_aligned(lyrics);
  auto [paused, inner] = inner_pause_counts(lyrics, melody, config);
  if (inner == 0) return std::nullopt;
  return 1.0 - static_cast<double>(paused) / static_cast<double>(inner);
}

double histogram_similarity(const std::vector<int>& a, const std::vector<int>& b) {
  return total_variation_similarity(a, b);
}

double duration_similarity(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  return total_variation_similarity(a, b);
}

double melody_distance(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  // (cost, path length), compared lexicographically.
  using Cell = std::pair<long, long>;
  const std::size_t n = a.size(), m = b.size();
  std::vector<Cell> dp(n * m);
  auto at = [&](std::size_t i, std::size_t j) -> Cell& { return dp[i * m + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      Cell best{0, 0};
      if (i > 0 || j > 0) {
        best = {std::numeric_limits<long>::max(), 0};
        if (i > 0) best = std::min(best, at(i - 1, j));
        if (j > 0) best = std::min(best, at(i, j - 1));
        if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
      }
      at(i, j) = {best.first + std::labs(a[i] - b[j]), best.second + 1};
    }
  }
  const Cell& end = at(n - 1, m - 1);
  return static_cast<double>(end.first) / static_cast<double>(end.second);
}

StructureSimilarity structure_similarity(const LyricSequence& lyrics, const Melody& melody) {
  melody.check_aligned(lyrics);
  StructureSimilarity out;
  std::map<std::size_t, std::size_t> earliest;  // group -> first sentence
  for (std::size_t s = 0; s < lyrics.sentences.size(); ++s) {
    const auto& group = lyrics.sentences[s].structure_group;
    if (!group) continue;
    auto [it, inserted] = earliest.emplace(*group, s);
    if (inserted) continue;
    Segment ref = segment_of(melody, lyrics.sentences[it->second]);
    Segment cur = segment_of(melody, lyrics.sentences[s]);
    out.segments.push_back({s, it->second, histogram_similarity(ref.pitches, cur.pitches),
                            duration_similarity(ref.durations, cur.durations), melody_distance(ref.pitches, cur.pitches)});
  }
  if (out.segments.empty()) return out;
  double pd = 0, dd = 0, md = 0;
  for (const auto& seg : out.segments) {
    pd += seg.pd;
    dd += seg.dd;
    md += seg.md;
  }
  const double count = static_cast<double>(out.segments.size());
  out.pd = pd / count;
  out.dd = dd / count;
  out.md = md / count;
  return out;
}

EvaluationReport evaluate(const LyricSequence& lyrics, const Melody& melody, const RewardConfig& config) {
  melody.check_aligned(lyrics);
  EvaluationReport report;
  SampleBreakdown& b = report.breakdown;
  if (lyrics.language == Language::kTonal) {
    b.transition_degrees = transition_degrees(lyrics, melody, config.harmony_table);
    report.tone_transition = tone_transition_score(lyrics, melody, config.harmony_table);
  }
  b.contour_matched = contour_flags(lyrics, melody);
  report.tone_contour = tone_contour_score(lyrics, melody);
  std::tie(b.sw_matched, b.sw_total) = sw_counts(lyrics, melody);
  report.matched_sw = ratio(b.sw_matched, b.sw_total);
  std::tie(b.inner_pauses, b.inner_syllables) = inner_pause_counts(lyrics, melody, config);
  report.matched_pauses = matched_pause_ratio(lyrics, melody, config);
  StructureSimilarity sim = structure_similarity(lyrics, melody);
  report.pd = sim.pd;
  report.dd = sim.dd;
  report.md = sim.md;
  b.segments = std::move(sim.segments);
  return report;
}

EvaluationReport mean_report(const std::vector<EvaluationReport>& reports) {
  EvaluationReport out;
  out.tone_transition = mean_of(reports, &EvaluationReport::tone_transition);
  out.tone_contour = mean_of(reports, &EvaluationReport::tone_contour);
  out.matched_sw = mean_of(reports, &EvaluationReport::matched_sw);
  out.matched_pauses = mean_of(reports, &EvaluationReport::matched_pauses);
  out.pd = mean_of(reports, &EvaluationReport::pd);
  out.dd = mean_of(reports, &EvaluationReport::dd);
  out.md = mean_of(reports, &EvaluationReport::md);
  return out;
}

nlohmann::json report_to_json(const EvaluationReport& report, bool with_breakdown) {
  nlohmann::json j;
  j["tone_transition"] = optional_json(report.tone_transition);
  j["tone_contour"] = optional_json(report.tone_contour);
  j["matched_sw"] = optional_json(report.matched_sw);
  j["matched_pauses"] = optional_json(report.matched_pauses);
  j["pd"] = optional_json(report.pd);
  j["dd"] = optional_json(report.dd);
  j["md"] = optional_json(report.md);
  if (with_breakdown) {
    const SampleBreakdown& b = report.breakdown;
    nlohmann::json d = nlohmann::json::array();
    for (auto deg : b.transition_degrees) d.push_back(std::string(to_string(deg)));
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : b.segments) {
      segs.push_back({{"sentence", s.sentence}, {"reference", s.reference}, {"pd", s.pd}, {"dd", s.dd}, {"md", s.md}});
    }
    j["breakdown"] = {{"transition_degrees", d},
                      {"contour_matched", b.contour_matched},
                      {"sw_matched", b.sw_matched},
                      {"sw_total", b.sw_total},
                      {"inner_pauses", b.inner_pauses},
                      {"inner_syllables", b.inner_syllables},
                      {"segments", segs}};
  }
  return j;
}

std::string format_report_table(const std::vector<std::string>& labels, const std::vector<EvaluationReport>& rows) {
  static const char* kHeaders[] = {"transition", "contour", "s/w", "pauses", "PD", "DD", "MD"};
  std::size_t label_width = 5;
  for (const auto& l : labels) label_width = std::max(label_width, l.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(label_width)) << "run";
  for (const char* h : kHeaders) out << "  " << std::right << std::setw(10) << h;
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const EvaluationReport& e = rows[r];
    out << std::left << std::setw(static_cast<int>(label_width)) << (r < labels.size() ? labels[r] : "");
    for (const auto* v : {&e.tone_transition, &e.tone_contour, &e.matched_sw, &e.matched_pauses, &e.pd, &e.dd, &e.md}) {
      out << "  " << std::right << std::setw(10);
      if (*v) {
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(4) << **v;
        out << cell.str();
      } else {
        out << "-";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace lyre
