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

#ifndef LYRE_MIDI_HPP_
#define LYRE_MIDI_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lyre/lyrics.hpp"
#include "lyre/melody.hpp"

namespace lyre {

inline constexpr int kTicksPerQuarter = 480;

// Lyric text written on syllable-starting notes when no lyrics are supplied.
inline constexpr const char* kSyllablePlaceholder = "_";

// Format-0 Standard MIDI File: one tempo event (120 bpm), one time-signature
// event, a lyric meta-event before every syllable-starting note, note on/off
// pairs at 480 ticks per quarter note. Durations must land on whole ticks.
std::vector<std::uint8_t> write_midi(const Melody& melody, const LyricSequence* lyrics = nullptr);

struct MidiImport {
  Melody melody;
  // Lyric text of each syllable, in order. Empty when the file had no lyrics.
  std::vector<std::string> syllable_texts;
};

// Reads a format 0 or 1 file holding one monophonic voice. Gaps of one tick or
// more between notes become rests. When the file carries lyric events, a note
// starts a syllable iff a lyric event shares its onset tick; otherwise every
// note starts a syllable.
MidiImport read_midi_with_lyrics(std::span<const std::uint8_t> bytes);
Melody read_midi(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace lyre

#endif  // LYRE_MIDI_HPP_
