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

#include "lyre/melody.hpp"

#include <algorithm>
#include <sstream>

#include "lyre/error.hpp"

namespace lyre {

std::string to_string(const MelodyToken& token) {
  std::ostringstream out;
  if (token.is_rest()) {
    out << "rest(" << to_string(token.duration) << ")";
  } else {
    out << "note(pitch=" << token.pitch << ", duration=" << to_string(token.duration)
        << (token.new_syllable ? ", new" : ", cont") << ")";
  }
  return out.str();
}

Rational TimeSignature::bar_length() const {
  if (numerator < 1) throw UnsupportedError("time signature numerator must be positive");
  if (denominator < 1 || (denominator & (denominator - 1)) != 0) {
    throw UnsupportedError("unsupported meter " + std::to_string(numerator) + "/" +
                           std::to_string(denominator) + ": denominator is not a power of two");
  }
  return Rational(numerator * 4, denominator);
}

Melody::Melody(std::vector<MelodyToken> tokens, TimeSignature time_signature)
    : tokens_(std::move(tokens)), time_signature_(time_signature) {
  time_signature_.bar_length();
  bool span_open = false;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const MelodyToken& tok = tokens_[i];
    if (tok.duration <= 0) throw FormatError("token " + std::to_string(i) + " has non-positive duration");
    if (tok.is_rest()) {
      if (tok.new_syllable || tok.pitch != 0) {
        throw FormatError("rest token " + std::to_string(i) + " carries a pitch or syllable flag");
      }
      span_open = false;
      continue;
    }
    if (tok.pitch < 0 || tok.pitch > 127) {
      throw FormatError("token " + std::to_string(i) + " pitch out of MIDI range");
    }
    if (tok.new_syllable) {
      alignment_.push_back({i, i + 1});
      span_open = true;
    } else {
      if (!span_open) {
        throw AlignmentError("continuation note at token " + std::to_string(i) +
                             " has no open syllable");
      }
      alignment_.back().end = i + 1;
    }
  }
}

Rational Melody::total_duration() const {
  Rational total(0);
  for (const auto& tok : tokens_) total += tok.duration;
  return total;
}

void Melody::check_aligned(const LyricSequence& lyrics) const {
  if (syllable_count() == lyrics.size()) return;
  std::size_t first = std::min(syllable_count(), lyrics.size());
  std::ostringstream msg;
  msg << "melody covers " << syllable_count() << " syllables but lyrics have " << lyrics.size()
      << "; first mismatching syllable is #" << first;
  if (first < lyrics.size()) msg << " '" << lyrics.syllables[first].text << "'";
  throw AlignmentError(msg.str());
}

BeatStrength beat_strength(const Rational& bar_offset, const TimeSignature& time_signature) {
  if (bar_offset == 0) return BeatStrength::kStrong;
  if (time_signature.numerator == 4 && time_signature.denominator == 4 && bar_offset == 2) {
    return BeatStrength::kStrong;
  }
  return BeatStrength::kWeak;
}

BeatGrid compute_beat_grid(const Melody& melody) {
  const TimeSignature& ts = melody.time_signature();
  Rational bar = ts.bar_length();
  BeatGrid grid;
  grid.onsets.reserve(melody.tokens().size());
  grid.strengths.reserve(melody.tokens().size());
  Rational position(0);
  for (const auto& tok : melody.tokens()) {
    Rational offset = floor_mod(position, bar);
    grid.onsets.push_back(offset);
    grid.strengths.push_back(beat_strength(offset, ts));
    position += tok.duration;
  }
  return grid;
}

bool is_long_note(const MelodyToken& token, const Rational& long_note_threshold) {
  return token.is_note() && token.duration >= long_note_threshold;
}

namespace {

bool rest_in_gap(const Melody& melody, std::size_t k) {
  const auto& spans = melody.alignment();
  for (std::size_t t = spans[k].end; t < spans[k + 1].begin; ++t) {
    if (melody.tokens()[t].is_rest()) return true;
  }
  return false;
}

}  // namespace

std::vector<bool> pauses_at_gaps(const Melody& melody, const Rational& long_note_threshold) {
  const auto& spans = melody.alignment();
  std::vector<bool> out(spans.empty() ? 0 : spans.size() - 1, false);
  for (std::size_t k = 0; k < out.size(); ++k) {
    bool pause = rest_in_gap(melody, k);
    for (std::size_t t = spans[k].begin; t < spans[k].end && !pause; ++t) {
      pause = is_long_note(melody.tokens()[t], long_note_threshold);
    }
    out[k] = pause;
  }
  return out;
}

std::vector<PauseEvent> detect_pauses(const Melody& melody, const LyricSequence& lyrics,
                                      const Rational& long_note_threshold) {
  melody.check_aligned(lyrics);
  const auto& spans = melody.alignment();
  std::vector<PauseEvent> events;
  for (std::size_t k = 0; k + 1 < spans.size(); ++k) {
    bool rest = rest_in_gap(melody, k);
    bool sentence_final = lyrics.syllables[k].sentence_final;
    bool long_pause = false;   // any long note in the span
    bool misplaced = false;    // a long note other than the sentence-final hold
    for (std::size_t t = spans[k].begin; t < spans[k].end; ++t) {
      if (!is_long_note(melody.tokens()[t], long_note_threshold)) continue;
      long_pause = true;
      if (!(sentence_final && t + 1 == spans[k].end)) misplaced = true;
    }
    if (rest) events.push_back({k, PauseCause::kRestNote});
    if (misplaced) events.push_back({k, PauseCause::kLongNote});
    if (sentence_final && !rest && !long_pause) {
      events.push_back({k, PauseCause::kSentenceBoundaryMissing});
    }
  }
  return events;
}

nlohmann::json melody_to_json(const Melody& melody) {
  nlohmann::json doc;
  doc["time_signature"] = {melody.time_signature().numerator, melody.time_signature().denominator};
  doc["tokens"] = nlohmann::json::array();
  for (const auto& tok : melody.tokens()) {
    nlohmann::json j;
    j["kind"] = tok.is_note() ? "note" : "rest";
    if (tok.is_note()) j["pitch"] = tok.pitch;
    j["duration"] = to_string(tok.duration);
    if (tok.is_note()) j["new_syllable"] = tok.new_syllable;
    doc["tokens"].push_back(std::move(j));
  }
  return doc;
}

Melody melody_from_json(const nlohmann::json& doc) {
  try {
    TimeSignature ts;
    if (doc.contains("time_signature")) {
      ts.numerator = doc["time_signature"].at(0).get<int>();
      ts.denominator = doc["time_signature"].at(1).get<int>();
    }
    std::vector<MelodyToken> tokens;
    for (const auto& j : doc.at("tokens")) {
      const auto& d = j.at("duration");
      Rational duration = d.is_string() ? parse_rational(d.get<std::string>())
                                        : parse_rational(d.dump());
      std::string kind = j.at("kind").get<std::string>();
      if (kind == "rest") {
        tokens.push_back(MelodyToken::rest(duration));
      } else if (kind == "note") {
        tokens.push_back(MelodyToken::note(j.at("pitch").get<int>(), duration,
                                           j.value("new_syllable", true)));
      } else {
        throw FormatError("unknown token kind '" + kind + "'");
      }
    }
    return Melody(std::move(tokens), ts);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("melody JSON: ") + e.what());
  }
}

}  // namespace lyre
