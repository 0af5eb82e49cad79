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

#include "lyre/scorer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lyre/error.hpp"

namespace lyre {

namespace {

constexpr int kFormatVersion = 1;

}  // namespace

std::vector<double> UniformScorer::log_prob_dist(std::span<const int>) const {
  return std::vector<double>(vocabulary_.size(), -std::log(static_cast<double>(vocabulary_.size())));
}

NGramModel NGramModel::train(TokenVocabulary vocabulary, const std::vector<std::vector<int>>& sequences, int order,
                             double discount) {
  if (sequences.empty()) throw TrainingError("training corpus is empty");
  if (order < 1) throw TrainingError("n-gram order must be at least 1");
  if (!(discount > 0.0 && discount < 1.0)) throw TrainingError("discount must lie in (0, 1)");
  NGramModel model(std::move(vocabulary), order, discount);
  const int v = static_cast<int>(model.vocabulary_.size());
  std::int64_t seen = 0;
  for (const auto& seq : sequences) {
    std::vector<int> padded(order - 1, model.bos_id());
    for (int id : seq) {
      if (id < 0 || id >= v) throw TrainingError("token id " + std::to_string(id) + " is outside the vocabulary");
      for (int k = 0; k < order; ++k) {
        std::vector<int> context(padded.end() - k, padded.end());
        auto& counts = model.counts_[context];
        ++counts.total;
        ++counts.next[id];
      }
      padded.push_back(id);
      ++seen;
    }
  }
  if (seen == 0) throw TrainingError("training corpus contains no tokens");
  return model;
}

std::vector<double> NGramModel::prob_dist(std::span<const int> context) const {
  const std::size_t v = vocabulary_.size();
  std::vector<int> padded(order_ - 1, bos_id());
  padded.insert(padded.end(), context.begin(), context.end());
  std::vector<double> p(v, 1.0 / static_cast<double>(v));
  for (int k = 0; k < order_; ++k) {
    std::vector<int> history(padded.end() - k, padded.end());
    auto it = counts_.find(history);
    if (it == counts_.end()) continue;
    const ContextCounts& c = it->second;
    const double total = static_cast<double>(c.total);
    const double backoff = discount_ * static_cast<double>(c.next.size()) / total;
    for (double& x : p) x *= backoff;
    for (const auto& [id, count] : c.next) {
      p[id] += std::max(static_cast<double>(count) - discount_, 0.0) / total;
    }
  }
  return p;
}

std::vector<double> NGramModel::log_prob_dist(std::span<const int> context) const {
  std::vector<double> p = prob_dist(context);
  for (double& x : p) x = std::log(x);
  return p;
}

std::int64_t NGramModel::token_count() const {
  auto it = counts_.find({});
  return it == counts_.end() ? 0 : it->second.total;
}

nlohmann::json NGramModel::to_json() const {
  nlohmann::json doc;
  doc["format"] = "lyre-ngram";
  doc["version"] = kFormatVersion;
  doc["order"] = order_;
  doc["discount"] = discount_;
  doc["vocabulary"] = vocabulary_.to_json();
  doc["counts"] = nlohmann::json::array();
  for (const auto& [context, c] : counts_) {
    nlohmann::json next = nlohmann::json::array();
    for (const auto& [id, count] : c.next) next.push_back({id, count});
    doc["counts"].push_back({{"context", context}, {"next", next}});
  }
  return doc;
}

NGramModel NGramModel::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "lyre-ngram") throw ConfigError("not an n-gram model file");
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw ConfigError("unsupported model version " + doc.at("version").dump());
    }
    NGramModel model(TokenVocabulary::from_json(doc.at("vocabulary")), doc.at("order").get<int>(),
                     doc.at("discount").get<double>());
    for (const auto& entry : doc.at("counts")) {
      auto context = entry.at("context").get<std::vector<int>>();
      ContextCounts c;
      for (const auto& pair : entry.at("next")) {
        std::int64_t count = pair.at(1).get<std::int64_t>();
        c.next[pair.at(0).get<int>()] = count;
        c.total += count;
      }
      model.counts_.emplace(std::move(context), std::move(c));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model: ") + e.what());
  }
}

NGramModel train_ngram(const std::vector<Melody>& corpus, const TokenVocabulary& vocabulary, int order,
                       double discount) {
  if (corpus.empty()) throw TrainingError("training corpus is empty");
  std::vector<std::vector<int>> sequences;
  sequences.reserve(corpus.size());
  for (const auto& melody : corpus) sequences.push_back(vocabulary.encode(melody));
  return NGramModel::train(vocabulary, sequences, order, discount);
}

double sequence_log_prob(const Scorer& scorer, std::span<const int> ids) {
  double total = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    total += scorer.log_prob_dist(ids.first(i))[ids[i]];
  }
  return total;
}

nlohmann::json ModelBundle::to_json() const {
  return {{"format", "lyre-models"}, {"version", kFormatVersion},
          {"melody", melody->to_json()}, {"rhythm", rhythm->to_json()}, {"pitch", pitch->to_json()}};
}

ModelBundle ModelBundle::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "lyre-models") {
    throw ConfigError("not a lyre model bundle");
  }
  ModelBundle bundle;
  bundle.melody = std::make_shared<const NGramModel>(NGramModel::from_json(doc.at("melody")));
  bundle.rhythm = std::make_shared<const NGramModel>(NGramModel::from_json(doc.at("rhythm")));
  bundle.pitch = std::make_shared<const NGramModel>(NGramModel::from_json(doc.at("pitch")));
  return bundle;
}

ModelBundle train_bundle(const std::vector<Melody>& corpus, int order, double discount) {
  if (corpus.empty()) throw TrainingError("training corpus is empty");
  ModelBundle bundle;
  bundle.melody = std::make_shared<const NGramModel>(
      train_ngram(corpus, TokenVocabulary(spec_covering(corpus, VocabularyKind::kMelody)), order, discount));
  bundle.rhythm = std::make_shared<const NGramModel>(
      train_ngram(corpus, TokenVocabulary(spec_covering(corpus, VocabularyKind::kRhythm)), order, discount));
  bundle.pitch = std::make_shared<const NGramModel>(
      train_ngram(corpus, TokenVocabulary(spec_covering(corpus, VocabularyKind::kPitch)), order, discount));
  return bundle;
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path + "'");
  out << bundle.to_json().dump() << "\n";
  if (!out) throw Error("failed writing model file '" + path + "'");
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  try {
    return ModelBundle::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed model file '" + path + "': " + e.what());
  }
}

}  // namespace lyre
