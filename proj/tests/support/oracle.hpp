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

#ifndef LYRE_TESTS_SUPPORT_ORACLE_HPP_
#define LYRE_TESTS_SUPPORT_ORACLE_HPP_

#include <random>
#include <vector>

#include "lyre/decoder.hpp"

namespace lyre::testing {

struct Enumerated {
  std::vector<int> ids;  // vocabulary ids including End
  Melody melody;
  double log_prob = 0.0;
  double reward = 0.0;
  double score() const { return log_prob + reward; }
};

// A random instance small enough to enumerate: at most 8 vocabulary entries
// and at most 6 decoding steps. `variant` picks one of several templates.
struct TinyInstance {
  LyricSequence lyrics;
  TokenVocabulary vocab;
  int max_notes = 1;
};
TinyInstance tiny_instance(std::mt19937_64& rng, int variant);
inline constexpr int kTinyVariants = 4;

// Every complete melody of the decoding grammar, scored from scratch: chained
// scorer log-probs plus the whole-melody weighted reward.
std::vector<Enumerated> enumerate_melodies(const LyricSequence& lyrics, const Scorer& scorer,
                                           const RewardConfig& config, Aspects active, int max_notes,
                                           TimeSignature ts = {});

// Visits every legal prefix (as token list) of the grammar, including the empty one.
template <typename Visit>
void for_each_prefix(const LyricSequence& lyrics, const TokenVocabulary& vocab, int max_notes, Visit visit);

// Rewards that appending `step` to `prefix` triggers, derived by scanning the
// prefix rather than through a decode state. Each pair is (value, max, aspect).
struct OracleReward {
  double value;
  double max;
  Aspect aspect;
};
std::vector<OracleReward> oracle_triggered(const LyricSequence& lyrics, const std::vector<MelodyToken>& prefix,
                                           const DecodeStep& step, const RewardConfig& config, TimeSignature ts = {});

// Hard-mode survivor test built on oracle_triggered.
bool oracle_masked(const LyricSequence& lyrics, const std::vector<MelodyToken>& prefix, const DecodeStep& step,
                   const RewardConfig& config, Aspects active, TimeSignature ts = {});

// Grammar check written out independently of the decoder.
bool oracle_legal(const LyricSequence& lyrics, const std::vector<MelodyToken>& prefix, const VocabEntry& entry,
                  int max_notes);

template <typename Visit>
void for_each_prefix(const LyricSequence& lyrics, const TokenVocabulary& vocab, int max_notes, Visit visit) {
  std::vector<MelodyToken> prefix;
  auto rec = [&](auto&& self) -> void {
    visit(static_cast<const std::vector<MelodyToken>&>(prefix));
    for (std::size_t id = 0; id < vocab.size(); ++id) {
      const VocabEntry& e = vocab.entry(id);
      if (e.kind == VocabKind::kEnd || !oracle_legal(lyrics, prefix, e, max_notes)) continue;
      prefix.push_back(e.step().token);
      self(self);
      prefix.pop_back();
    }
  };
  rec(rec);
}

}  // namespace lyre::testing

#endif  // LYRE_TESTS_SUPPORT_ORACLE_HPP_
