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

#include "lyre/midi.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>

#include "lyre/error.hpp"

namespace lyre {

namespace {

constexpr std::uint8_t kVelocity = 80;
constexpr std::uint32_t kTempoMicros = 500000;

void put_u16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_vlq(std::vector<std::uint8_t>& out, std::uint32_t v) {
  std::uint8_t buf[5];
  int n = 0;
  buf[n++] = v & 0x7F;
  while (v >>= 7) buf[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
  while (n > 0) out.push_back(buf[--n]);
}

std::int64_t to_ticks(const Rational& duration) {
  Rational ticks = duration * Rational(kTicksPerQuarter);
  if (ticks.denominator() != 1) {
    throw UnsupportedError("duration " + to_string(duration) + " is not a whole number of ticks");
  }
  return ticks.numerator();
}

int log2_exact(int v) {
  int n = 0;
  while ((1 << n) < v) ++n;
  return n;
}

class TrackWriter {
 public:
  void meta(std::uint32_t delta, std::uint8_t type, const std::vector<std::uint8_t>& data) {
    put_vlq(body_, delta);
    body_.push_back(0xFF);
    body_.push_back(type);
    put_vlq(body_, static_cast<std::uint32_t>(data.size()));
    body_.insert(body_.end(), data.begin(), data.end());
  }
  void channel(std::uint32_t delta, std::uint8_t status, std::uint8_t a, std::uint8_t b) {
    put_vlq(body_, delta);
    body_.push_back(status);
    body_.push_back(a);
    body_.push_back(b);
  }
  const std::vector<std::uint8_t>& body() const { return body_; }

 private:
  std::vector<std::uint8_t> body_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ >= bytes_.size(); }
  std::size_t pos() const { return pos_; }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint8_t peek() {
    need(1);
    return bytes_[pos_];
  }
  std::uint32_t u16() {
    std::uint32_t hi = u8();
    return (hi << 8) | u8();
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }
  std::uint32_t vlq() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7F);
      if (!(b & 0x80)) return v;
    }
    throw ParseError("MIDI: variable-length quantity longer than 4 bytes");
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw ParseError("MIDI: truncated file");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct NoteEvent {
  std::int64_t tick;
  bool on;
  int pitch;
  std::size_t order;  // file order, keeps the merge stable
};

}  // namespace

std::vector<std::uint8_t> write_midi(const Melody& melody, const LyricSequence* lyrics) {
  if (lyrics != nullptr) melody.check_aligned(*lyrics);
  const TimeSignature& ts = melody.time_signature();
  ts.bar_length();

  TrackWriter track;
  track.meta(0, 0x51, {static_cast<std::uint8_t>(kTempoMicros >> 16),
                       static_cast<std::uint8_t>(kTempoMicros >> 8),
                       static_cast<std::uint8_t>(kTempoMicros)});
  track.meta(0, 0x58, {static_cast<std::uint8_t>(ts.numerator),
                       static_cast<std::uint8_t>(log2_exact(ts.denominator)), 24, 8});

  std::int64_t pending = 0;  // ticks since the last written event
  std::size_t syllable = 0;
  for (const auto& tok : melody.tokens()) {
    std::int64_t ticks = to_ticks(tok.duration);
    if (tok.is_rest()) {
      pending += ticks;
      continue;
    }
    if (tok.new_syllable) {
      std::string text = lyrics != nullptr ? lyrics->syllables[syllable].text : kSyllablePlaceholder;
      track.meta(static_cast<std::uint32_t>(pending), 0x05,
                 std::vector<std::uint8_t>(text.begin(), text.end()));
      pending = 0;
      ++syllable;
    }
    auto pitch = static_cast<std::uint8_t>(tok.pitch);
    track.channel(static_cast<std::uint32_t>(pending), 0x90, pitch, kVelocity);
    track.channel(static_cast<std::uint32_t>(ticks), 0x80, pitch, 0);
    pending = 0;
  }
  track.meta(static_cast<std::uint32_t>(pending), 0x2F, {});

  std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd'};
  put_u32(out, 6);
  put_u16(out, 0);
  put_u16(out, 1);
  put_u16(out, kTicksPerQuarter);
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  put_u32(out, static_cast<std::uint32_t>(track.body().size()));
  out.insert(out.end(), track.body().begin(), track.body().end());
  return out;
}

MidiImport read_midi_with_lyrics(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  auto magic = in.take(4);
  if (!std::equal(magic.begin(), magic.end(), "MThd")) throw ParseError("MIDI: missing MThd header");
  std::uint32_t header_len = in.u32();
  if (header_len < 6) throw ParseError("MIDI: header chunk too short");
  std::uint32_t format = in.u16();
  std::uint32_t ntracks = in.u16();
  std::uint32_t division = in.u16();
  in.take(header_len - 6);
  if (format > 1) throw UnsupportedError("MIDI: format " + std::to_string(format) + " is not supported");
  if (division & 0x8000) throw UnsupportedError("MIDI: SMPTE time division is not supported");
  if (division == 0) throw ParseError("MIDI: zero ticks per quarter note");

  TimeSignature ts;
  bool have_ts = false;
  std::vector<NoteEvent> notes;
  std::map<std::int64_t, std::string> lyric_at;
  std::int64_t end_tick = 0;
  std::size_t order = 0;

  for (std::uint32_t t = 0; t < ntracks; ++t) {
    auto id = in.take(4);
    std::uint32_t len = in.u32();
    auto chunk = in.take(len);
    if (!std::equal(id.begin(), id.end(), "MTrk")) continue;
    Reader tr(chunk);
    std::int64_t tick = 0;
    std::uint8_t running = 0;
    while (!tr.done()) {
      tick += tr.vlq();
      std::uint8_t status = tr.peek();
      if (status & 0x80) {
        tr.u8();
      } else if (running == 0) {
        throw ParseError("MIDI: running status with no previous status byte");
      } else {
        status = running;
      }
      if (status == 0xFF) {
        std::uint8_t type = tr.u8();
        auto data = tr.take(tr.vlq());
        if (type == 0x58 && data.size() >= 2 && !have_ts) {
          ts.numerator = data[0];
          ts.denominator = 1 << data[1];
          have_ts = true;
        } else if (type == 0x05) {
          lyric_at[tick] = std::string(data.begin(), data.end());
        } else if (type == 0x2F) {
          end_tick = std::max(end_tick, tick);
          break;
        }
        continue;
      }
      if (status == 0xF0 || status == 0xF7) {
        tr.take(tr.vlq());
        continue;
      }
      running = status;
      std::uint8_t kind = status & 0xF0;
      std::uint8_t a = tr.u8();
      std::uint8_t b = (kind == 0xC0 || kind == 0xD0) ? 0 : tr.u8();
      if (kind == 0x90 && b > 0) {
        notes.push_back({tick, true, a, order++});
      } else if (kind == 0x80 || kind == 0x90) {
        notes.push_back({tick, false, a, order++});
      }
      end_tick = std::max(end_tick, tick);
    }
  }

  std::stable_sort(notes.begin(), notes.end(), [](const NoteEvent& x, const NoteEvent& y) {
    if (x.tick != y.tick) return x.tick < y.tick;
    return !x.on && y.on;  // offs before ons at the same tick
  });

  struct Span {
    std::int64_t on, off;
    int pitch;
  };
  std::vector<Span> spans;
  int sounding = -1;
  std::int64_t sounding_since = 0;
  for (const auto& ev : notes) {
    if (ev.on) {
      if (sounding >= 0) {
        throw UnsupportedError("MIDI: polyphonic track (pitch " + std::to_string(ev.pitch) +
                               " starts while " + std::to_string(sounding) + " sounds at tick " +
                               std::to_string(ev.tick) + ")");
      }
      sounding = ev.pitch;
      sounding_since = ev.tick;
    } else if (ev.pitch == sounding) {
      if (ev.tick > sounding_since) spans.push_back({sounding_since, ev.tick, sounding});
      sounding = -1;
    }
  }
  if (sounding >= 0) throw ParseError("MIDI: note " + std::to_string(sounding) + " is never released");

  auto to_duration = [&](std::int64_t ticks) { return Rational(ticks, division); };
  bool has_lyrics = !lyric_at.empty();
  MidiImport result;
  std::vector<MelodyToken> tokens;
  std::int64_t cursor = 0;
  for (const auto& s : spans) {
    if (s.on > cursor) tokens.push_back(MelodyToken::rest(to_duration(s.on - cursor)));
    auto lyric = lyric_at.find(s.on);
    bool starts = !has_lyrics || lyric != lyric_at.end();
    tokens.push_back(MelodyToken::note(s.pitch, to_duration(s.off - s.on), starts));
    if (has_lyrics && starts) {
      result.syllable_texts.push_back(lyric->second == kSyllablePlaceholder ? "" : lyric->second);
    }
    cursor = s.off;
  }
  if (end_tick > cursor && !spans.empty()) tokens.push_back(MelodyToken::rest(to_duration(end_tick - cursor)));
  result.melody = Melody(std::move(tokens), ts);
  return result;
}

Melody read_midi(std::span<const std::uint8_t> bytes) { return read_midi_with_lyrics(bytes).melody; }

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace lyre
