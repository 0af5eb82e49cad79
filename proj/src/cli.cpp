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

#include "lyre/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lyre/error.hpp"
#include "lyre/midi.hpp"

namespace lyre {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << value;
  return out.str();
}

DecodeMode parse_decode_mode(std::string_view name) {
  if (name == "beam" || name == "soft") return DecodeMode::kBeamSoft;
  if (name == "hard") return DecodeMode::kBeamHard;
  if (name == "sample") return DecodeMode::kSample;
  if (name == "rerank") return DecodeMode::kRerank;
  throw OptionError("unknown decode mode '" + std::string(name) + "'");
}

Pipeline parse_pipeline(std::string_view name) {
  if (name == "single-stage" || name == "single") return Pipeline::kSingleStage;
  if (name == "two-stage") return Pipeline::kTwoStage;
  throw OptionError("unknown pipeline '" + std::string(name) + "'");
}

std::vector<fs::path> list_files(const fs::path& dir, const std::vector<std::string>& extensions) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error("'" + dir.string() + "' is not a readable directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) files.push_back(entry.path());
  }
  if (ec) throw Error("cannot list directory '" + dir.string() + "': " + ec.message());
  if (files.empty()) throw Error("directory '" + dir.string() + "' contains no input files");
  std::sort(files.begin(), files.end());
  return files;
}

RewardConfig resolve_config(const std::string& explicit_path, std::string* resolved_path) {
  std::string path = explicit_path;
  if (path.empty()) {
    if (const char* env = std::getenv(std::string(kConfigEnvVar).c_str()); env && *env) path = env;
  }
  if (resolved_path) *resolved_path = path;
  if (path.empty()) return default_reward_config();
  return load_reward_config(path);
}

nlohmann::json options_to_json(const DecodeOptions& o) {
  return {{"mode", std::string(to_string(o.mode))},
          {"pipeline", std::string(to_string(o.pipeline))},
          {"beam_width", o.beam_width},
          {"top_k", o.top_k},
          {"temperature", o.temperature},
          {"rerank_candidates", o.rerank_candidates},
          {"max_notes_per_syllable", o.max_notes_per_syllable},
          {"seed", o.seed},
          {"active", {{"tone", o.active.tone}, {"rhythm", o.active.rhythm}, {"structure", o.active.structure}}},
          {"time_signature", {o.time_signature.numerator, o.time_signature.denominator}}};
}

DecodeOptions options_from_json(const nlohmann::json& doc) {
  try {
    DecodeOptions o;
    o.mode = parse_decode_mode(doc.at("mode").get<std::string>());
    o.pipeline = parse_pipeline(doc.at("pipeline").get<std::string>());
    o.beam_width = doc.at("beam_width").get<int>();
    o.top_k = doc.at("top_k").get<int>();
    o.temperature = doc.at("temperature").get<double>();
    o.rerank_candidates = doc.at("rerank_candidates").get<int>();
    o.max_notes_per_syllable = doc.at("max_notes_per_syllable").get<int>();
    o.seed = doc.at("seed").get<std::uint64_t>();
    const auto& a = doc.at("active");
    o.active = {a.at("tone").get<bool>(), a.at("rhythm").get<bool>(), a.at("structure").get<bool>()};
    o.time_signature = {doc.at("time_signature").at(0).get<int>(), doc.at("time_signature").at(1).get<int>()};
    o.validate();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed decode options: ") + e.what());
  }
}

std::vector<CompareRow> compare_modes(const std::vector<LyricSequence>& corpus, const ModelBundle& models,
                                      const RewardConfig& config, const std::vector<std::string>& modes,
                                      const DecodeOptions& options) {
  std::vector<CompareRow> rows;
  for (const auto& mode : modes) {
    RewardConfig run_config = config;
    DecodeOptions run_options = options;
    if (mode == "off") {
      apply_preset(run_config, "off");
      run_options.mode = DecodeMode::kBeamSoft;
    } else if (mode == "two-stage") {
      run_options.pipeline = Pipeline::kTwoStage;
    } else {
      run_options.mode = parse_decode_mode(mode);
    }
    CompareRow row{mode, {}, {}};
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      run_options.seed = options.seed + i;
      DecodeResult result = decode(corpus[i], models, run_config, run_options);
      row.per_file.push_back(evaluate(corpus[i], result.melody, config));
    }
    row.mean = mean_report(row.per_file);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what(), 0);
  }
}

fs::path sibling(const fs::path& out, std::string_view suffix) {
  fs::path p = out;
  p.replace_extension();
  return fs::path(p.string() + std::string(suffix));
}

std::string file_hash(const std::string& path) { return hex64(fnv1a64(read_file_bytes(path))); }

TimeSignature parse_time_signature(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) throw std::invalid_argument(text);
    TimeSignature ts{std::stoi(text.substr(0, slash)), std::stoi(text.substr(slash + 1))};
    if (ts.numerator < 1 || ts.denominator < 1) throw std::invalid_argument(text);
    ts.bar_length();
    return ts;
  } catch (const std::logic_error&) {
    throw OptionError("time signature must look like 4/4, got '" + text + "'");
  }
}

struct TrainArgs {
  std::string corpus;
  int order = 3;
  double discount = 0.5;
  std::string out = "model.json";
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  std::vector<Melody> corpus;
  for (const auto& path : list_files(a.corpus, {".mid", ".midi"})) {
    try {
      corpus.push_back(read_midi(read_file_bytes(path.string())));
    } catch (const Error& e) {
      throw Error(path.string() + ": " + e.what());
    }
  }
  ModelBundle bundle = train_bundle(corpus, a.order, a.discount);
  save_bundle(bundle, a.out);
  out << "trained on " << corpus.size() << " files, " << bundle.melody->token_count() << " tokens\n"
      << "vocabulary sizes: melody " << bundle.melody->vocabulary().size() << ", rhythm "
      << bundle.rhythm->vocabulary().size() << ", pitch " << bundle.pitch->vocabulary().size() << "\n"
      << "wrote " << a.out << "\n";
  return kExitOk;
}

struct GenerateArgs {
  std::string lyrics;
  std::string model;
  std::string config;
  std::string preset;
  std::string mode = "beam";
  std::string pipeline = "single-stage";
  std::string time_signature = "4/4";
  DecodeOptions options;
  bool no_rewards = false;
  std::string out = "out.mid";
  std::string replay;
};

struct GeneratePlan {
  std::string lyrics_path;
  std::string model_path;
  std::string config_path;
  std::string preset;
  RewardConfig config;
  DecodeOptions options;
};

nlohmann::json generate_manifest(const GeneratePlan& plan, const fs::path& out_path) {
  return {{"tool", "lyre"},
          {"version", std::string(kVersion)},
          {"command", "generate"},
          {"inputs",
           {{"lyrics", plan.lyrics_path},
            {"lyrics_hash", file_hash(plan.lyrics_path)},
            {"model", plan.model_path},
            {"model_hash", file_hash(plan.model_path)},
            {"config", plan.config_path},
            {"preset", plan.preset}}},
          {"config", serialize_reward_config(plan.config)},
          {"options", options_to_json(plan.options)},
          {"seed", plan.options.seed},
          {"outputs",
           {{"midi", out_path.string()},
            {"tokens", sibling(out_path, ".tokens.json").string()},
            {"manifest", sibling(out_path, ".manifest.json").string()}}}};
}

GeneratePlan plan_from_manifest(const std::string& path) {
  nlohmann::json m = read_json(path);
  try {
    if (m.at("command").get<std::string>() != "generate") throw FormatError("'" + path + "' is not a generate manifest");
    GeneratePlan plan;
    const auto& in = m.at("inputs");
    plan.lyrics_path = in.at("lyrics").get<std::string>();
    plan.model_path = in.at("model").get<std::string>();
    plan.config_path = in.at("config").get<std::string>();
    plan.preset = in.at("preset").get<std::string>();
    for (const auto& [key, file] : {std::pair{"lyrics_hash", plan.lyrics_path}, std::pair{"model_hash", plan.model_path}}) {
      if (file_hash(file) != in.at(key).get<std::string>()) {
        throw Error("'" + file + "' changed since the manifest was written");
      }
    }
    plan.config = parse_reward_config(m.at("config").get<std::string>());
    plan.options = options_from_json(m.at("options"));
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed manifest '" + path + "': " + e.what());
  }
}

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  GeneratePlan plan;
  if (!a.replay.empty()) {
    plan = plan_from_manifest(a.replay);
  } else {
    if (a.lyrics.empty() || a.model.empty()) throw OptionError("generate needs --lyrics and --model");
    plan.lyrics_path = a.lyrics;
    plan.model_path = a.model;
    plan.config = resolve_config(a.config, &plan.config_path);
    plan.preset = a.preset;
    if (!a.preset.empty()) apply_preset(plan.config, a.preset);
    plan.options = a.options;
    plan.options.mode = parse_decode_mode(a.mode);
    plan.options.pipeline = parse_pipeline(a.pipeline);
    plan.options.time_signature = parse_time_signature(a.time_signature);
    if (a.no_rewards) plan.options.active = Aspects::none();
    plan.options.validate();
  }
  LyricSequence lyrics = load_lyrics(plan.lyrics_path);
  ModelBundle models = load_bundle(plan.model_path);
  DecodeResult result = decode(lyrics, models, plan.config, plan.options);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  for (const auto& r : result.relaxations) {
    err << "note: hard constraints relaxed at " << r.stage << " step " << r.step << "\n";
  }

  const fs::path out_path = a.out;
  write_file_bytes(out_path.string(), write_midi(result.melody, &lyrics));
  nlohmann::json tokens = melody_to_json(result.melody);
  tokens["score"] = result.score;
  tokens["base_log_prob"] = result.base_log_prob;
  tokens["reward"] = result.reward;
  tokens["relaxations"] = nlohmann::json::array();
  for (const auto& r : result.relaxations) tokens["relaxations"].push_back({{"stage", r.stage}, {"step", r.step}});
  tokens["warnings"] = result.warnings;
  write_text(sibling(out_path, ".tokens.json"), tokens.dump(2) + "\n");
  write_text(sibling(out_path, ".manifest.json"), generate_manifest(plan, out_path).dump(2) + "\n");
  out << "wrote " << out_path.string() << " (" << result.melody.tokens().size() << " tokens, score "
      << std::setprecision(10) << result.score << ")\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string lyrics;
  std::string midi;
  std::string config;
  std::string json_out;
};

LyricSequence load_lyrics_at(const fs::path& path) {
  try {
    return load_lyrics(path.string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  std::string config_path;
  RewardConfig config = resolve_config(a.config, &config_path);
  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (fs::is_directory(a.lyrics)) {
    if (!fs::is_directory(a.midi)) throw OptionError("batch evaluation needs --midi to be a directory too");
    for (const auto& lyr : list_files(a.lyrics, {".txt", ".json"})) {
      fs::path midi = fs::path(a.midi) / (lyr.stem().string() + ".mid");
      if (!fs::exists(midi)) throw Error("no melody '" + midi.string() + "' for lyrics '" + lyr.string() + "'");
      pairs.emplace_back(lyr, midi);
    }
  } else {
    pairs.emplace_back(a.lyrics, a.midi);
  }

  std::vector<std::string> labels;
  std::vector<EvaluationReport> reports;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [lyr, midi] : pairs) {
    LyricSequence lyrics = load_lyrics_at(lyr);
    Melody melody = read_midi(read_file_bytes(midi.string()));
    EvaluationReport report;
    try {
      report = evaluate(lyrics, melody, config);
    } catch (const AlignmentError& e) {
      throw AlignmentError(midi.string() + ": " + e.what());
    }
    labels.push_back(lyr.stem().string());
    reports.push_back(report);
    nlohmann::json entry = report_to_json(report);
    entry["lyrics"] = lyr.string();
    entry["midi"] = midi.string();
    files.push_back(std::move(entry));
  }
  std::vector<std::string> table_labels = labels;
  std::vector<EvaluationReport> table_rows = reports;
  EvaluationReport mean = mean_report(reports);
  if (reports.size() > 1) {
    table_labels.push_back("mean");
    table_rows.push_back(mean);
  }
  out << format_report_table(table_labels, table_rows);

  if (!a.json_out.empty()) {
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& [lyr, midi] : pairs) {
      inputs.push_back({{"lyrics", lyr.string()}, {"lyrics_hash", file_hash(lyr.string())}, {"midi", midi.string()},
                        {"midi_hash", file_hash(midi.string())}});
    }
    nlohmann::json doc = {{"files", files}, {"mean", report_to_json(mean, false)}};
    write_text(a.json_out, doc.dump(2) + "\n");
    nlohmann::json manifest = {{"tool", "lyre"},
                               {"version", std::string(kVersion)},
                               {"command", "evaluate"},
                               {"inputs", inputs},
                               {"config_path", config_path},
                               {"config", serialize_reward_config(config)}};
    write_text(sibling(a.json_out, ".manifest.json"), manifest.dump(2) + "\n");
  }
  return kExitOk;
}

struct CompareArgs {
  std::string lyrics_dir;
  std::string model;
  std::string config;
  std::string preset;
  std::vector<std::string> modes{"off", "soft"};
  DecodeOptions options;
  std::string json_out;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  RewardConfig config = resolve_config(a.config);
  if (!a.preset.empty()) apply_preset(config, a.preset);
  a.options.validate();
  std::vector<LyricSequence> corpus;
  for (const auto& path : list_files(a.lyrics_dir, {".txt", ".json"})) corpus.push_back(load_lyrics_at(path));
  ModelBundle models = load_bundle(a.model);
  for (const auto& m : a.modes) {
    if (m != "off" && m != "two-stage") parse_decode_mode(m);
  }
  auto rows = compare_modes(corpus, models, config, a.modes, a.options);
  std::vector<std::string> labels;
  std::vector<EvaluationReport> means;
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& row : rows) {
    labels.push_back(row.mode);
    means.push_back(row.mean);
    doc.push_back({{"mode", row.mode}, {"mean", report_to_json(row.mean, false)}});
  }
  out << format_report_table(labels, means);
  if (!a.json_out.empty()) write_text(a.json_out, doc.dump(2) + "\n");
  return kExitOk;
}

void add_decode_flags(CLI::App& cmd, DecodeOptions& o) {
  cmd.add_option("--beam", o.beam_width, "Beam width")->capture_default_str();
  cmd.add_option("--top-k", o.top_k, "Sampling top-k")->capture_default_str();
  cmd.add_option("--temperature", o.temperature, "Sampling temperature")->capture_default_str();
  cmd.add_option("--candidates", o.rerank_candidates, "Samples drawn by rerank")->capture_default_str();
  cmd.add_option("--max-notes", o.max_notes_per_syllable, "Most notes one syllable may take")->capture_default_str();
  cmd.add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lyric-to-melody generation with music-theory constrained decoding", "lyre"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train n-gram scorers on a directory of MIDI files");
  train_cmd->add_option("corpus", train.corpus, "Directory of .mid files")->required();
  train_cmd->add_option("--order", train.order, "n-gram order")->capture_default_str();
  train_cmd->add_option("--discount", train.discount, "Absolute discount in (0, 1)")->capture_default_str();
  train_cmd->add_option("-o,--out", train.out, "Model file")->capture_default_str();

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a melody for a lyric file");
  gen_cmd->add_option("--lyrics", gen.lyrics, "Lyric file (.txt or .json)");
  gen_cmd->add_option("--model", gen.model, "Model file from `lyre train`");
  gen_cmd->add_option("--config", gen.config, "Reward config (default: $LYRE_CONFIG, then built-in)");
  gen_cmd->add_option("--preset", gen.preset, "Lambda preset: telemelody, songmass or off");
  gen_cmd->add_option("--mode", gen.mode, "beam, hard, sample or rerank")->capture_default_str();
  gen_cmd->add_option("--pipeline", gen.pipeline, "single-stage or two-stage")->capture_default_str();
  gen_cmd->add_option("--time-signature", gen.time_signature, "Meter, e.g. 3/4")->capture_default_str();
  add_decode_flags(*gen_cmd, gen.options);
  gen_cmd->add_flag("--no-rewards", gen.no_rewards, "Disable every reward");
  gen_cmd->add_option("-o,--out", gen.out, "Output MIDI; .tokens.json and .manifest.json are written beside it")
      ->capture_default_str();
  gen_cmd->add_option("--replay", gen.replay, "Re-run the generation recorded in a manifest");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Objective metrics of lyric-melody pairs");
  eval_cmd->add_option("--lyrics", eval.lyrics, "Lyric file, or directory for batch mode")->required();
  eval_cmd->add_option("--midi", eval.midi, "MIDI file, or directory of <lyric stem>.mid")->required();
  eval_cmd->add_option("--config", eval.config, "Reward config (default: $LYRE_CONFIG, then built-in)");
  eval_cmd->add_option("--json", eval.json_out, "Write the report (and a manifest beside it)");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare decode modes over a lyric corpus");
  cmp_cmd->add_option("--lyrics-dir", cmp.lyrics_dir, "Directory of lyric files")->required();
  cmp_cmd->add_option("--model", cmp.model, "Model file from `lyre train`")->required();
  cmp_cmd->add_option("--config", cmp.config, "Reward config (default: $LYRE_CONFIG, then built-in)");
  cmp_cmd->add_option("--preset", cmp.preset, "Lambda preset for the constrained modes");
  cmp_cmd->add_option("--modes", cmp.modes, "Any of off, soft, hard, sample, rerank, two-stage")
      ->delimiter(',')
      ->capture_default_str();
  add_decode_flags(*cmp_cmd, cmp.options);
  cmp_cmd->add_option("--json", cmp.json_out, "Write the table as JSON");

  std::vector<const char*> argv{"lyre"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*train_cmd) return cmd_train(train, out);
    if (*gen_cmd) return cmd_generate(gen, out, err);
    if (*eval_cmd) return cmd_evaluate(eval, out);
    if (*cmp_cmd) return cmd_compare(cmp, out);
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInputError;
}

}  // namespace lyre
