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

#ifndef LYRE_SCORER_HPP_
#define LYRE_SCORER_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lyre/melody.hpp"
#include "lyre/vocabulary.hpp"

namespace lyre {

// Source of next-token log-probabilities. The decoder talks to base models only
// through this interface.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual const TokenVocabulary& vocabulary() const = 0;
  // Natural-log probabilities of every vocabulary id given the preceding ids.
  virtual std::vector<double> log_prob_dist(std::span<const int> context) const = 0;
  virtual std::string name() const = 0;
};

class UniformScorer final : public Scorer {
 public:
  explicit UniformScorer(TokenVocabulary vocabulary) : vocabulary_(std::move(vocabulary)) {}
  const TokenVocabulary& vocabulary() const override { return vocabulary_; }
  std::vector<double> log_prob_dist(std::span<const int> context) const override;
  std::string name() const override { return "uniform"; }

 private:
  TokenVocabulary vocabulary_;
};

// Interpolated absolute-discount backoff model:
//
//   P(w | h) = max(c(h, w) - d, 0) / c(h) + d * N(h) / c(h) * P(w | h')
//
// where h' drops the oldest token of h, N(h) is the number of distinct
// successors of h, and an unseen h backs off entirely. The recursion ends at
// the uniform distribution 1/|V|. Sequence starts are padded with a
// beginning-of-sequence id equal to vocabulary().size().
class NGramModel final : public Scorer {
 public:
  struct ContextCounts {
    std::int64_t total = 0;
    std::map<int, std::int64_t> next;
    bool operator==(const ContextCounts&) const = default;
  };

  // Throws TrainingError for an empty corpus, order < 1, discount outside (0, 1)
  // or ids outside the vocabulary.
  static NGramModel train(TokenVocabulary vocabulary, const std::vector<std::vector<int>>& sequences, int order,
                          double discount);

  const TokenVocabulary& vocabulary() const override { return vocabulary_; }
  std::vector<double> log_prob_dist(std::span<const int> context) const override;
  std::vector<double> prob_dist(std::span<const int> context) const;
  std::string name() const override { return "ngram"; }

  int order() const { return order_; }
  double discount() const { return discount_; }
  int bos_id() const { return static_cast<int>(vocabulary_.size()); }
  const std::map<std::vector<int>, ContextCounts>& counts() const { return counts_; }
  std::int64_t token_count() const;

  nlohmann::json to_json() const;
  static NGramModel from_json(const nlohmann::json& doc);

 private:
  NGramModel(TokenVocabulary vocabulary, int order, double discount)
      : vocabulary_(std::move(vocabulary)), order_(order), discount_(discount) {}

  TokenVocabulary vocabulary_;
  int order_ = 1;
  double discount_ = 0.5;
  std::map<std::vector<int>, ContextCounts> counts_;
};

// Trains on melodies encoded with `vocabulary`.
NGramModel train_ngram(const std::vector<Melody>& corpus, const TokenVocabulary& vocabulary, int order,
                       double discount);

// Base log-probability of a full id sequence under a scorer.
double sequence_log_prob(const Scorer& scorer, std::span<const int> ids);

// The three models the CLI trains: one over whole melody tokens (single-stage
// decoding), and a rhythm and a pitch model for two-stage decoding.
struct ModelBundle {
  std::shared_ptr<const NGramModel> melody;
  std::shared_ptr<const NGramModel> rhythm;
  std::shared_ptr<const NGramModel> pitch;

  nlohmann::json to_json() const;
  static ModelBundle from_json(const nlohmann::json& doc);
};

ModelBundle train_bundle(const std::vector<Melody>& corpus, int order, double discount);
void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

}  // namespace lyre

#endif  // LYRE_SCORER_HPP_
