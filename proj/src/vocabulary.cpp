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

#include "lyre/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "lyre/error.hpp"

namespace lyre {

namespace {

std::tuple<int, int, Rational, bool> key_of(const VocabEntry& e) {
  return {static_cast<int>(e.kind), e.pitch, e.duration, e.new_syllable};
}

std::string_view kind_name(VocabularyKind kind) {
  switch (kind) {
    case VocabularyKind::kMelody: return "melody";
    case VocabularyKind::kRhythm: return "rhythm";
    case VocabularyKind::kPitch: break;
  }
  return "pitch";
}

}  // namespace

DecodeStep VocabEntry::step() const {
  switch (kind) {
    case VocabKind::kNote: return DecodeStep::of(MelodyToken::note(pitch, duration, new_syllable));
    case VocabKind::kRest: return DecodeStep::of(MelodyToken::rest(duration));
    case VocabKind::kEnd: break;
  }
  return DecodeStep::end_of_melody();
}

std::string VocabEntry::label() const {
  switch (kind) {
    case VocabKind::kNote: {
      std::string s = "note(";
      if (pitch != kUnpitched) s += "pitch=" + std::to_string(pitch);
      if (duration != 0) s += (pitch != kUnpitched ? ", " : "") + std::string("duration=") + to_string(duration);
      if (duration != 0) s += new_syllable ? ", new" : ", cont";
      return s + ")";
    }
    case VocabKind::kRest: return "rest(" + to_string(duration) + ")";
    case VocabKind::kEnd: break;
  }
  return "end";
}

TokenVocabulary::TokenVocabulary(Spec spec) : spec_(std::move(spec)) {
  auto& durations = spec_.durations;
  auto& rests = spec_.rest_durations;
  std::sort(durations.begin(), durations.end());
  durations.erase(std::unique(durations.begin(), durations.end()), durations.end());
  std::sort(rests.begin(), rests.end());
  rests.erase(std::unique(rests.begin(), rests.end()), rests.end());
  for (const auto& d : durations) {
    if (d <= 0) throw ConfigError("vocabulary durations must be positive");
  }
  for (const auto& d : rests) {
    if (d <= 0) throw ConfigError("vocabulary rest durations must be positive");
  }

  switch (spec_.kind) {
    case VocabularyKind::kPitch:
      if (spec_.pitch_low < 0 || spec_.pitch_high > 127 || spec_.pitch_low > spec_.pitch_high) {
        throw ConfigError("invalid vocabulary pitch range");
      }
      for (int p = spec_.pitch_low; p <= spec_.pitch_high; ++p) {
        entries_.push_back({VocabKind::kNote, p, Rational(0), true});
      }
      break;
    case VocabularyKind::kMelody:
      if (spec_.pitch_low < 0 || spec_.pitch_high > 127 || spec_.pitch_low > spec_.pitch_high) {
        throw ConfigError("invalid vocabulary pitch range");
      }
      if (durations.empty()) throw ConfigError("vocabulary needs at least one note duration");
      for (const auto& d : durations) {
        for (int p = spec_.pitch_low; p <= spec_.pitch_high; ++p) {
          entries_.push_back({VocabKind::kNote, p, d, true});
          if (spec_.melisma) entries_.push_back({VocabKind::kNote, p, d, false});
        }
      }
      break;
    case VocabularyKind::kRhythm:
      if (durations.empty()) throw ConfigError("vocabulary needs at least one note duration");
      for (const auto& d : durations) {
        entries_.push_back({VocabKind::kNote, kUnpitched, d, true});
        if (spec_.melisma) entries_.push_back({VocabKind::kNote, kUnpitched, d, false});
      }
      break;
  }
  if (spec_.kind != VocabularyKind::kPitch) {
    for (const auto& d : rests) entries_.push_back({VocabKind::kRest, kUnpitched, d, false});
    entries_.push_back({VocabKind::kEnd, kUnpitched, Rational(0), false});
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(key_of(entries_[i]), static_cast<int>(i));
}

std::optional<int> TokenVocabulary::find(const VocabEntry& entry) const {
  auto it = index_.find(key_of(entry));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> TokenVocabulary::end_id() const {
  return find({VocabKind::kEnd, kUnpitched, Rational(0), false});
}

VocabEntry TokenVocabulary::project(const MelodyToken& token) const {
  if (token.is_rest()) return {VocabKind::kRest, kUnpitched, token.duration, false};
  switch (spec_.kind) {
    case VocabularyKind::kMelody: return {VocabKind::kNote, token.pitch, token.duration, token.new_syllable};
    case VocabularyKind::kRhythm: return {VocabKind::kNote, kUnpitched, token.duration, token.new_syllable};
    case VocabularyKind::kPitch: break;
  }
  return {VocabKind::kNote, token.pitch, Rational(0), true};
}

std::vector<int> TokenVocabulary::encode(const Melody& melody) const {
  std::vector<int> ids;
  for (const auto& tok : melody.tokens()) {
    if (spec_.kind == VocabularyKind::kPitch && tok.is_rest()) continue;
    auto id = find(project(tok));
    if (!id) {
      throw TrainingError("token " + to_string(tok) + " is outside the " + std::string(kind_name(spec_.kind)) +
                          " vocabulary");
    }
    ids.push_back(*id);
  }
  if (auto end = end_id()) ids.push_back(*end);
  return ids;
}

nlohmann::json TokenVocabulary::to_json() const {
  nlohmann::json doc;
  doc["kind"] = kind_name(spec_.kind);
  doc["pitch_low"] = spec_.pitch_low;
  doc["pitch_high"] = spec_.pitch_high;
  doc["durations"] = nlohmann::json::array();
  for (const auto& d : spec_.durations) doc["durations"].push_back(to_string(d));
  doc["rest_durations"] = nlohmann::json::array();
  for (const auto& d : spec_.rest_durations) doc["rest_durations"].push_back(to_string(d));
  doc["melisma"] = spec_.melisma;
  return doc;
}

TokenVocabulary TokenVocabulary::from_json(const nlohmann::json& doc) {
  Spec spec;
  std::string kind = doc.at("kind").get<std::string>();
  if (kind == "melody") spec.kind = VocabularyKind::kMelody;
  else if (kind == "rhythm") spec.kind = VocabularyKind::kRhythm;
  else if (kind == "pitch") spec.kind = VocabularyKind::kPitch;
  else throw ConfigError("unknown vocabulary kind '" + kind + "'");
  spec.pitch_low = doc.at("pitch_low").get<int>();
  spec.pitch_high = doc.at("pitch_high").get<int>();
  for (const auto& d : doc.at("durations")) spec.durations.push_back(parse_rational(d.get<std::string>()));
  for (const auto& d : doc.at("rest_durations")) spec.rest_durations.push_back(parse_rational(d.get<std::string>()));
  spec.melisma = doc.at("melisma").get<bool>();
  return TokenVocabulary(std::move(spec));
}

TokenVocabulary::Spec spec_covering(const std::vector<Melody>& corpus, VocabularyKind kind, bool melisma) {
  TokenVocabulary::Spec spec;
  spec.kind = kind;
  spec.melisma = melisma;
  int low = 127, high = 0;
  std::set<Rational> durations, rests;
  for (const auto& melody : corpus) {
    for (const auto& tok : melody.tokens()) {
      if (tok.is_rest()) {
        rests.insert(tok.duration);
      } else {
        low = std::min(low, tok.pitch);
        high = std::max(high, tok.pitch);
        durations.insert(tok.duration);
      }
    }
  }
  if (low > high) throw TrainingError("corpus contains no notes");
  spec.pitch_low = low;
  spec.pitch_high = high;
  spec.durations.assign(durations.begin(), durations.end());
  spec.rest_durations.assign(rests.begin(), rests.end());
  return spec;
}

}  // namespace lyre
