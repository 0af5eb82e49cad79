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

#include "lyre/lyrics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "lyre/error.hpp"

namespace lyre {

namespace {

// Tone marker as written, before the language of the whole file is known.
enum class Marker { kNone, kDigit, kApostrophe };

struct RawSyllable {
  std::string text;
  Marker marker = Marker::kNone;
  int digit = 0;
  WordPosition word_position = WordPosition::kWordStart;
  StressClass stress_class = StressClass::kNeutral;
  bool explicit_end = false;
};

struct RawSentence {
  std::vector<RawSyllable> syllables;
  std::string terminator;
  int line = 0;
};

// Decodes the code point starting at text[pos]; advances pos. Invalid bytes
// decode as themselves.
char32_t next_code_point(std::string_view text, std::size_t& pos) {
  auto byte = static_cast<unsigned char>(text[pos]);
  int extra = byte >= 0xF0 ? 3 : byte >= 0xE0 ? 2 : byte >= 0xC0 ? 1 : 0;
  if (pos + extra >= text.size() && extra > 0) {
    ++pos;
    return byte;
  }
  char32_t cp = extra == 0 ? byte : byte & (0x3F >> extra);
  for (int i = 1; i <= extra; ++i) {
    cp = (cp << 6) | (static_cast<unsigned char>(text[pos + i]) & 0x3F);
  }
  pos += extra + 1;
  return cp;
}

bool is_punctuation_token(std::string_view token) {
  return std::none_of(token.begin(), token.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '|';
  });
}

RawSyllable parse_syllable_token(std::string_view token, int line) {
  RawSyllable raw;
  std::string_view body = token;
  std::string_view flags;
  if (auto bar = token.rfind('|'); bar != std::string_view::npos) {
    body = token.substr(0, bar);
    flags = token.substr(bar + 1);
  }
  if (body.empty()) throw ParseError("empty syllable in token '" + std::string(token) + "'", line);
  char last = body.back();
  if (std::isdigit(static_cast<unsigned char>(last))) {
    if (last < '1' || last > '5') {
      throw ParseError("invalid tone digit in '" + std::string(token) + "'", line);
    }
    raw.marker = Marker::kDigit;
    raw.digit = last - '0';
    body.remove_suffix(1);
  } else if (last == '\'') {
    raw.marker = Marker::kApostrophe;
    body.remove_suffix(1);
  }
  if (body.empty()) throw ParseError("syllable has no text in '" + std::string(token) + "'", line);
  raw.text = std::string(body);

  bool seen_w = false, seen_i = false, seen_k = false, seen_a = false;
  std::size_t pos = 0;
  while (pos <= flags.size() && !flags.empty()) {
    std::size_t comma = flags.find(',', pos);
    std::string_view flag = flags.substr(pos, comma == std::string_view::npos ? flags.npos : comma - pos);
    if (flag == "W") seen_w = true;
    else if (flag == "I") seen_i = true;
    else if (flag == "K") seen_k = true;
    else if (flag == "A") seen_a = true;
    else if (flag == "E") raw.explicit_end = true;
    else {
      throw ParseError("unknown flag '" + std::string(flag) + "' in '" + std::string(token) + "'", line);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (seen_w && seen_i) throw ParseError("flags W and I are exclusive in '" + std::string(token) + "'", line);
  if (seen_k && seen_a) throw ParseError("flags K and A are exclusive in '" + std::string(token) + "'", line);
  raw.word_position = seen_i ? WordPosition::kWordInner : WordPosition::kWordStart;
  raw.stress_class = seen_k ? StressClass::kKeyword : seen_a ? StressClass::kAuxiliary : StressClass::kNeutral;
  return raw;
}

RawSentence parse_line(std::string_view line, int line_no) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  if (!is_punctuation_token(tokens.back())) {
    throw ParseError("sentence must end with a punctuation token", line_no);
  }
  if (tokens.size() < 2) throw ParseError("sentence has no syllables", line_no);

  RawSentence sentence;
  sentence.line = line_no;
  sentence.terminator = std::string(tokens.back());
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    RawSyllable raw = parse_syllable_token(tokens[i], line_no);
    if (raw.explicit_end && i + 2 != tokens.size()) {
      throw ParseError("flag E is only allowed on the last syllable", line_no);
    }
    sentence.syllables.push_back(std::move(raw));
  }
  return sentence;
}

void assign_structure_groups(LyricSequence& lyrics) {
  std::map<std::string, std::vector<std::size_t>> by_text;
  std::vector<std::string> order;
  for (std::size_t s = 0; s < lyrics.sentences.size(); ++s) {
    std::string key = normalized_text(lyrics, lyrics.sentences[s]);
    auto& members = by_text[key];
    if (members.empty()) order.push_back(key);
    members.push_back(s);
  }
  int next_group = 0;
  for (const auto& key : order) {
    const auto& members = by_text[key];
    if (members.size() < 2) continue;
    for (std::size_t s : members) lyrics.sentences[s].structure_group = next_group;
    ++next_group;
  }
}

LyricSequence build_sequence(std::vector<RawSentence> raw) {
  if (raw.empty()) throw FormatError("lyrics contain no sentences");
  bool has_digit = false, has_apostrophe = false;
  int digit_line = 0, apostrophe_line = 0;
  for (const auto& sentence : raw) {
    for (const auto& syl : sentence.syllables) {
      if (syl.marker == Marker::kDigit && !has_digit) { has_digit = true; digit_line = sentence.line; }
      if (syl.marker == Marker::kApostrophe && !has_apostrophe) {
        has_apostrophe = true;
        apostrophe_line = sentence.line;
      }
    }
  }
  if (has_digit && has_apostrophe) {
    std::ostringstream msg;
    msg << "mixed tonal (line " << digit_line << ") and stress (line " << apostrophe_line
        << ") annotations";
    throw FormatError(msg.str());
  }

  LyricSequence lyrics;
  lyrics.language = has_digit ? Language::kTonal : Language::kStressAccent;
  for (std::size_t s = 0; s < raw.size(); ++s) {
    const RawSentence& in = raw[s];
    if (in.syllables.empty()) throw ParseError("sentence has no syllables", in.line);
    if (in.syllables.front().word_position != WordPosition::kWordStart) {
      throw ParseError("the first syllable of a sentence must start a word", in.line);
    }
    Sentence sentence;
    sentence.syllable_range.begin = lyrics.syllables.size();
    for (const auto& r : in.syllables) {
      Syllable syl;
      syl.text = r.text;
      if (r.marker == Marker::kDigit) {
        syl.tone = static_cast<Tone>(r.digit - 1);
      } else if (r.marker == Marker::kApostrophe) {
        syl.tone = Tone::kStressed;
      } else {
        syl.tone = has_digit ? Tone::kNoTone : Tone::kUnstressed;
      }
      syl.word_position = r.word_position;
      syl.stress_class = r.stress_class;
      syl.sentence_index = s;
      lyrics.syllables.push_back(std::move(syl));
    }
    lyrics.syllables.back().sentence_final = true;
    sentence.syllable_range.end = lyrics.syllables.size();
    sentence.terminator = in.terminator;
    sentence.intonation = detect_intonation(in.terminator);
    lyrics.sentences.push_back(std::move(sentence));
  }
  assign_structure_groups(lyrics);
  return lyrics;
}

std::string_view word_name(WordPosition p) { return p == WordPosition::kWordStart ? "start" : "inner"; }

std::string_view stress_name(StressClass c) {
  switch (c) {
    case StressClass::kKeyword: return "keyword";
    case StressClass::kAuxiliary: return "auxiliary";
    case StressClass::kNeutral: break;
  }
  return "neutral";
}

}  // namespace

bool is_lexical_tone(Tone tone) { return static_cast<int>(tone) <= static_cast<int>(Tone::kTone5); }

int tone_index(Tone tone) { return static_cast<int>(tone); }

std::vector<std::optional<std::size_t>> StructureMatrix::partners(std::size_t n) const {
  std::vector<std::optional<std::size_t>> out(n);
  for (auto [i, j] : pairs) {
    if (i < n) out[i] = j;
  }
  return out;
}

LyricSequence parse_lyrics(std::string_view source) {
  std::vector<RawSentence> raw;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t nl = source.find('\n', pos);
    std::string_view line = source.substr(pos, nl == std::string_view::npos ? source.npos : nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] != '#') {
      raw.push_back(parse_line(line.substr(first), line_no));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return build_sequence(std::move(raw));
}

std::string serialize_lyrics(const LyricSequence& lyrics) {
  std::string out;
  for (const auto& sentence : lyrics.sentences) {
    for (std::size_t i = sentence.syllable_range.begin; i < sentence.syllable_range.end; ++i) {
      const Syllable& syl = lyrics.syllables[i];
      out += syl.text;
      if (is_lexical_tone(syl.tone)) out += static_cast<char>('1' + tone_index(syl.tone));
      if (syl.tone == Tone::kStressed) out += '\'';
      out += syl.word_position == WordPosition::kWordStart ? "|W" : "|I";
      if (syl.stress_class == StressClass::kKeyword) out += ",K";
      if (syl.stress_class == StressClass::kAuxiliary) out += ",A";
      out += ' ';
    }
    out += sentence.terminator;
    out += '\n';
  }
  return out;
}

LyricSequence parse_lyrics_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("sentences") || !doc["sentences"].is_array()) {
    throw FormatError("lyrics JSON must be an object with a 'sentences' array");
  }
  std::vector<RawSentence> raw;
  int index = 0;
  for (const auto& s : doc["sentences"]) {
    ++index;
    RawSentence sentence;
    sentence.line = index;
    sentence.terminator = s.value("terminator", std::string("."));
    if (!s.contains("syllables") || !s["syllables"].is_array()) {
      throw ParseError("sentence without 'syllables' array", index);
    }
    for (const auto& j : s["syllables"]) {
      RawSyllable syl;
      syl.text = j.at("text").get<std::string>();
      if (syl.text.empty()) throw ParseError("empty syllable text", index);
      if (j.contains("tone") && !j["tone"].is_null()) {
        const auto& tone = j["tone"];
        if (tone.is_number_integer()) {
          int digit = tone.get<int>();
          if (digit < 1 || digit > 5) throw ParseError("tone out of range", index);
          syl.marker = Marker::kDigit;
          syl.digit = digit;
        } else if (tone == "stressed") {
          syl.marker = Marker::kApostrophe;
        } else if (tone != "unstressed") {
          throw ParseError("unknown tone value " + tone.dump(), index);
        }
      }
      std::string word = j.value("word", std::string("start"));
      if (word == "inner") syl.word_position = WordPosition::kWordInner;
      else if (word != "start") throw ParseError("unknown word position '" + word + "'", index);
      std::string stress = j.value("stress", std::string("neutral"));
      if (stress == "keyword") syl.stress_class = StressClass::kKeyword;
      else if (stress == "auxiliary") syl.stress_class = StressClass::kAuxiliary;
      else if (stress != "neutral") throw ParseError("unknown stress class '" + stress + "'", index);
      sentence.syllables.push_back(std::move(syl));
    }
    raw.push_back(std::move(sentence));
  }
  LyricSequence lyrics = build_sequence(std::move(raw));
  if (doc.contains("language")) {
    std::string lang = doc["language"].get<std::string>();
    Language declared = lang == "tonal" ? Language::kTonal : Language::kStressAccent;
    if (lang != "tonal" && lang != "stress") throw FormatError("unknown language '" + lang + "'");
    bool any_lexical = std::any_of(lyrics.syllables.begin(), lyrics.syllables.end(),
                                   [](const Syllable& s) { return is_lexical_tone(s.tone); });
    if (any_lexical && declared != Language::kTonal) {
      throw FormatError("tone numbers in a stress-accent sequence");
    }
    if (declared == Language::kTonal && !any_lexical) {
      for (auto& syl : lyrics.syllables) {
        if (syl.tone == Tone::kStressed) throw FormatError("stress marks in a tonal sequence");
        syl.tone = Tone::kNoTone;
      }
    }
    lyrics.language = declared;
  }
  return lyrics;
}

nlohmann::json lyrics_to_json(const LyricSequence& lyrics) {
  nlohmann::json doc;
  doc["language"] = lyrics.language == Language::kTonal ? "tonal" : "stress";
  doc["sentences"] = nlohmann::json::array();
  for (const auto& sentence : lyrics.sentences) {
    nlohmann::json s;
    s["terminator"] = sentence.terminator;
    s["syllables"] = nlohmann::json::array();
    for (std::size_t i = sentence.syllable_range.begin; i < sentence.syllable_range.end; ++i) {
      const Syllable& syl = lyrics.syllables[i];
      nlohmann::json j;
      j["text"] = syl.text;
      if (is_lexical_tone(syl.tone)) j["tone"] = tone_index(syl.tone) + 1;
      else if (syl.tone == Tone::kStressed) j["tone"] = "stressed";
      else if (syl.tone == Tone::kUnstressed) j["tone"] = "unstressed";
      j["word"] = word_name(syl.word_position);
      j["stress"] = stress_name(syl.stress_class);
      s["syllables"].push_back(std::move(j));
    }
    doc["sentences"].push_back(std::move(s));
  }
  return doc;
}

LyricSequence load_lyrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open lyrics file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    return parse_lyrics_json(doc);
  }
  return parse_lyrics(text);
}

Intonation detect_intonation(char32_t terminator) {
  switch (terminator) {
    case U'?':
    case U'？':  // fullwidth question mark
      return Intonation::kRising;
    case U'.':
    case U'!':
    case U'。':  // ideographic full stop
    case U'！':  // fullwidth exclamation mark
      return Intonation::kFalling;
    default:
      return Intonation::kNeutral;
  }
}

Intonation detect_intonation(std::string_view terminator) {
  if (terminator.empty()) return Intonation::kNeutral;
  std::size_t pos = 0;
  return detect_intonation(next_code_point(terminator, pos));
}

std::string normalized_text(const LyricSequence& lyrics, const Sentence& sentence) {
  std::string key;
  for (std::size_t i = sentence.syllable_range.begin; i < sentence.syllable_range.end; ++i) {
    if (!key.empty()) key += ' ';
    for (char c : lyrics.syllables[i].text) {
      if (std::isdigit(static_cast<unsigned char>(c))) continue;
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return key;
}

StructureMatrix build_structure_matrix(const LyricSequence& lyrics) {
  StructureMatrix matrix;
  std::map<std::string, std::size_t> earliest;
  for (std::size_t s = 0; s < lyrics.sentences.size(); ++s) {
    const Sentence& sentence = lyrics.sentences[s];
    auto [it, inserted] = earliest.emplace(normalized_text(lyrics, sentence), s);
    if (inserted) continue;
    const Sentence& anchor = lyrics.sentences[it->second];
    for (std::size_t k = 0; k < sentence.syllable_range.size(); ++k) {
      matrix.pairs.emplace_back(sentence.syllable_range.begin + k, anchor.syllable_range.begin + k);
    }
  }
  std::sort(matrix.pairs.begin(), matrix.pairs.end());
  return matrix;
}

std::string_view to_string(Tone tone) {
  switch (tone) {
    case Tone::kTone1: return "tone1";
    case Tone::kTone2: return "tone2";
    case Tone::kTone3: return "tone3";
    case Tone::kTone4: return "tone4";
    case Tone::kTone5: return "tone5";
    case Tone::kStressed: return "stressed";
    case Tone::kUnstressed: return "unstressed";
    case Tone::kNoTone: break;
  }
  return "none";
}

std::string_view to_string(Intonation intonation) {
  switch (intonation) {
    case Intonation::kRising: return "rising";
    case Intonation::kFalling: return "falling";
    case Intonation::kNeutral: break;
  }
  return "neutral";
}

}  // namespace lyre
