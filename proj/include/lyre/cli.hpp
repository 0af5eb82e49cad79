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

#ifndef LYRE_CLI_HPP_
#define LYRE_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lyre/decoder.hpp"
#include "lyre/lyrics.hpp"
#include "lyre/metrics.hpp"
#include "lyre/reward_config.hpp"
#include "lyre/scorer.hpp"

namespace lyre {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kConfigEnvVar = "LYRE_CONFIG";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInternalError = 2;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::string hex64(std::uint64_t value);

DecodeMode parse_decode_mode(std::string_view name);
Pipeline parse_pipeline(std::string_view name);

// Files with one of `extensions` directly inside `dir`, sorted by name.
// Throws Error naming the directory when there are none.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir,
                                              const std::vector<std::string>& extensions);

// Config from an explicit path, else $LYRE_CONFIG, else the built-in default.
RewardConfig resolve_config(const std::string& explicit_path, std::string* resolved_path = nullptr);

nlohmann::json options_to_json(const DecodeOptions& options);
DecodeOptions options_from_json(const nlohmann::json& doc);

// One row of a mode comparison. Recognized modes: off, soft, hard, sample,
// rerank, two-stage. `off` is soft beam search under the off preset.
struct CompareRow {
  std::string mode;
  EvaluationReport mean;
  std::vector<EvaluationReport> per_file;
};

// Decodes every lyric sequence in every mode and evaluates the outputs. File i
// decodes with seed options.seed + i.
std::vector<CompareRow> compare_modes(const std::vector<LyricSequence>& corpus, const ModelBundle& models,
                                      const RewardConfig& config, const std::vector<std::string>& modes,
                                      const DecodeOptions& options);

// Entry point; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lyre

#endif  // LYRE_CLI_HPP_
