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

#include "lyre/reward_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "lyre/error.hpp"

namespace lyre {

namespace {

constexpr std::string_view kDefaultText =
#include "lyre/default_config.inc"
    ;

constexpr std::array<std::string_view, 4> kDegreeNames = {"excellent", "good", "fair", "bad"};

std::string_view trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view value, std::string_view key, int line) {
  std::string text(value);
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ConfigError("line " + std::to_string(line) + ": '" + std::string(key) +
                      "' expects a number, got '" + text + "'");
  }
  return v;
}

int parse_int(std::string_view value, int line) {
  std::string text(value);
  char* end = nullptr;
  long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ConfigError("line " + std::to_string(line) + ": bad semitone value '" + text + "'");
  }
  return static_cast<int>(v);
}

HarmonyDegree parse_degree(std::string_view name, int line) {
  for (std::size_t i = 0; i < kDegreeNames.size(); ++i) {
    if (kDegreeNames[i] == name) return static_cast<HarmonyDegree>(i);
  }
  throw ConfigError("line " + std::to_string(line) + ": unknown harmony degree '" + std::string(name) + "'");
}

// "excellent:2..5 good:1..1,6..7"
HarmonyTable::Cell parse_cell(std::string_view value, int line) {
  HarmonyTable::Cell cell;
  std::istringstream words{std::string(value)};
  std::string word;
  while (words >> word) {
    auto colon = word.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected degree:low..high, got '" + word + "'");
    }
    HarmonyDegree degree = parse_degree(std::string_view(word).substr(0, colon), line);
    std::string_view ranges = std::string_view(word).substr(colon + 1);
    while (!ranges.empty()) {
      auto comma = ranges.find(',');
      std::string_view range = ranges.substr(0, comma);
      auto dots = range.find("..");
      LabeledInterval interval;
      interval.degree = degree;
      if (dots == std::string_view::npos) {
        interval.low = interval.high = parse_int(range, line);
      } else {
        interval.low = parse_int(range.substr(0, dots), line);
        interval.high = parse_int(range.substr(dots + 2), line);
      }
      if (interval.low > interval.high) {
        throw ConfigError("line " + std::to_string(line) + ": empty interval '" + std::string(range) + "'");
      }
      cell.push_back(interval);
      ranges = comma == std::string_view::npos ? std::string_view{} : ranges.substr(comma + 1);
    }
  }
  return cell;
}

Tone parse_tone_number(std::string_view s, std::string_view key, int line) {
  if (s.size() != 1 || s[0] < '1' || s[0] > '5') {
    throw ConfigError("line " + std::to_string(line) + ": '" + std::string(key) +
                      "' refers to an unknown tone pair");
  }
  return static_cast<Tone>(s[0] - '1');
}

void validate_cell(const HarmonyTable::Cell& cell, Tone previous, Tone current) {
  auto where = [&] {
    return "harmony." + std::to_string(tone_index(previous) + 1) + "." + std::to_string(tone_index(current) + 1);
  };
  auto sorted = cell;
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledInterval& a, const LabeledInterval& b) { return a.low < b.low; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].low <= sorted[i - 1].high) throw ConfigError(where() + ": intervals overlap");
  }
  bool covers_zero = std::any_of(cell.begin(), cell.end(),
                                 [](const LabeledInterval& iv) { return iv.low <= 0 && 0 <= iv.high; });
  if (!covers_zero) throw ConfigError(where() + ": no interval contains a step of 0");
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string_view to_string(HarmonyDegree degree) { return kDegreeNames[static_cast<int>(degree)]; }

void HarmonyTable::set_cell(Tone previous, Tone current, Cell intervals) {
  if (!is_lexical_tone(previous) || !is_lexical_tone(current)) {
    throw ConfigError("harmony table is defined over Tone1..Tone5 only");
  }
  validate_cell(intervals, previous, current);
  cells_[tone_index(previous)][tone_index(current)] = std::move(intervals);
}

const HarmonyTable::Cell& HarmonyTable::cell(Tone previous, Tone current) const {
  return cells_.at(tone_index(previous)).at(tone_index(current));
}

HarmonyDegree HarmonyTable::degree(Tone previous, Tone current, int delta_pitch) const {
  for (const auto& iv : cell(previous, current)) {
    if (iv.low <= delta_pitch && delta_pitch <= iv.high) return iv.degree;
  }
  return HarmonyDegree::kBad;
}

void HarmonyTable::validate() const {
  for (int p = 0; p < 5; ++p) {
    for (int c = 0; c < 5; ++c) validate_cell(cells_[p][c], static_cast<Tone>(p), static_cast<Tone>(c));
  }
}

void RewardConfig::validate() const {
  if (lambda_tone < 0 || lambda_rhythm < 0 || lambda_structure < 0) {
    throw ConfigError("lambda weights must be non-negative");
  }
  for (std::size_t i = 1; i < transition_rewards.size(); ++i) {
    if (transition_rewards[i] > transition_rewards[i - 1]) {
      throw ConfigError("transition rewards must not increase from excellent to bad");
    }
  }
  if (long_note_threshold <= 0) throw ConfigError("long_note_threshold must be positive");
  harmony_table.validate();
}

RewardConfig parse_reward_config(std::string_view text, const RewardConfig& base) {
  RewardConfig config = base;
  std::map<std::string_view, double*> scalars = {
      {"lambda.tone", &config.lambda_tone},
      {"lambda.rhythm", &config.lambda_rhythm},
      {"lambda.structure", &config.lambda_structure},
      {"transition.excellent", &config.transition_rewards[0]},
      {"transition.good", &config.transition_rewards[1]},
      {"transition.fair", &config.transition_rewards[2]},
      {"transition.bad", &config.transition_rewards[3]},
      {"reward.shape", &config.shape_reward_on_match},
      {"reward.contour", &config.contour_reward_on_match},
      {"reward.strong_weak", &config.sw_reward_on_match},
      {"reward.pause", &config.pause_reward_on_match},
      {"reward.structure_exact", &config.structure_reward_exact},
      {"reward.structure_octave", &config.structure_reward_octave},
  };
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (auto it = scalars.find(key); it != scalars.end()) {
      *it->second = parse_number(value, key, line_no);
    } else if (key == "long_note_threshold") {
      try {
        config.long_note_threshold = parse_rational(value);
      } catch (const ParseError&) {
        throw ConfigError("line " + std::to_string(line_no) + ": bad long_note_threshold");
      }
    } else if (key.starts_with("harmony.")) {
      std::string_view pair = key.substr(8);
      auto dot = pair.find('.');
      if (dot == std::string_view::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": '" + std::string(key) +
                          "' refers to an unknown tone pair");
      }
      Tone previous = parse_tone_number(pair.substr(0, dot), key, line_no);
      Tone current = parse_tone_number(pair.substr(dot + 1), key, line_no);
      try {
        config.harmony_table.set_cell(previous, current, parse_cell(value, line_no));
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
      }
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  config.validate();
  return config;
}

RewardConfig parse_reward_config(std::string_view text) {
  return parse_reward_config(text, default_reward_config());
}

std::string serialize_reward_config(const RewardConfig& config) {
  std::ostringstream out;
  out << "lambda.tone = " << format_double(config.lambda_tone) << "\n"
      << "lambda.rhythm = " << format_double(config.lambda_rhythm) << "\n"
      << "lambda.structure = " << format_double(config.lambda_structure) << "\n";
  for (std::size_t i = 0; i < kDegreeNames.size(); ++i) {
    out << "transition." << kDegreeNames[i] << " = " << format_double(config.transition_rewards[i]) << "\n";
  }
  out << "reward.shape = " << format_double(config.shape_reward_on_match) << "\n"
      << "reward.contour = " << format_double(config.contour_reward_on_match) << "\n"
      << "reward.strong_weak = " << format_double(config.sw_reward_on_match) << "\n"
      << "reward.pause = " << format_double(config.pause_reward_on_match) << "\n"
      << "reward.structure_exact = " << format_double(config.structure_reward_exact) << "\n"
      << "reward.structure_octave = " << format_double(config.structure_reward_octave) << "\n"
      << "long_note_threshold = " << to_string(config.long_note_threshold) << "\n";
  for (int p = 0; p < 5; ++p) {
    for (int c = 0; c < 5; ++c) {
      out << "harmony." << p + 1 << "." << c + 1 << " =";
      for (const auto& iv : config.harmony_table.cell(static_cast<Tone>(p), static_cast<Tone>(c))) {
        out << " " << to_string(iv.degree) << ":" << iv.low << ".." << iv.high;
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string_view default_reward_config_text() { return kDefaultText; }

const RewardConfig& default_reward_config() {
  // Validation runs after the whole text is read, so an empty table is a fine base.
  static const RewardConfig config = parse_reward_config(kDefaultText, RewardConfig{});
  return config;
}

RewardConfig load_reward_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_reward_config(buffer.str());
}

const std::vector<LambdaPreset>& lambda_presets() {
  static const std::vector<LambdaPreset> presets = {
      {"telemelody", 1.2, 1.5, 1.0},
      {"songmass", 1.5, 1.0, 1.0},
      {"off", 0.0, 0.0, 0.0},
  };
  return presets;
}

void apply_preset(RewardConfig& config, std::string_view preset) {
  for (const auto& p : lambda_presets()) {
    if (p.name == preset) {
      config.lambda_tone = p.tone;
      config.lambda_rhythm = p.rhythm;
      config.lambda_structure = p.structure;
      return;
    }
  }
  throw ConfigError("unknown preset '" + std::string(preset) + "'");
}

}  // namespace lyre
