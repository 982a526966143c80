//
// Copyright 2026 The metasql Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metasql/classifier.hpp"
#include "metasql/decomposer.hpp"
#include "metasql/generator.hpp"
#include "metasql/run_record.hpp"
#include "metasql/transcript.hpp"

namespace metasql {

using Embedding = std::vector<double>;

// Text encoder. Implementations must be safe for concurrent calls.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string id() const = 0;
  virtual Embedding embed(std::string_view text) const = 0;
};

// L2-normalized counts of hashed character 3-grams over the lower-cased text
// padded with one space on each side.
class HashedTrigramEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDimension = 1024;
  explicit HashedTrigramEmbedder(std::size_t dimension = kDefaultDimension);
  std::string id() const override { return "trigram" + std::to_string(dimension_); }
  Embedding embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
};

// Embedding endpoint taking {"model", "input"} and answering
// {"data": [{"embedding": [...]}]}.
class ServiceEmbedder final : public Embedder {
 public:
  ServiceEmbedder(ServiceConfig config, std::shared_ptr<Transcript> transcript);
  std::string id() const override { return "service:" + config_.model; }
  Embedding embed(std::string_view text) const override;

 private:
  ServiceConfig config_;
  std::shared_ptr<Transcript> transcript_;
  std::string credential_;
};

// Throws DimensionMismatch or ZeroVector.
double cosine_sim(const Embedding& a, const Embedding& b);

struct RankerConfig {
  std::size_t stage1_top_n = 10;
  std::size_t list_size = 10;
  double margin = 0.2;
  std::size_t parallelism = 1;

  // Throws ConfigError.
  void validate() const;
};

struct Stage1Entry {
  std::size_t candidate = 0;  // index into the generated candidate list
  double score = 0.0;
};

// Parsed candidates by cosine(Enc_Q(nl), Enc_S(sql)) descending, ties by
// generation order, truncated to stage1_top_n. Throws NoCandidates when none
// parsed.
std::vector<Stage1Entry> stage1_rank(std::string_view nl, const std::vector<Candidate>& candidates,
                                     const Embedder& nl_tower, const Embedder& sql_tower,
                                     const RankerConfig& config = {});

// Sentence-level NL x SQL score.
class CoarseScorer {
 public:
  virtual ~CoarseScorer() = default;
  virtual double score(std::string_view nl, std::string_view sql) const = 0;
};

// Phrase-level NL x phrase score; phrase_count is the unit count K of the
// candidate.
class FineScorer {
 public:
  virtual ~FineScorer() = default;
  virtual double score(std::string_view nl, std::string_view phrase,
                       std::size_t phrase_count) const = 0;
};

// 10 * cosine of embeddings.
class BaselineCoarseScorer final : public CoarseScorer {
 public:
  explicit BaselineCoarseScorer(const Embedder& embedder) : embedder_(embedder) {}
  double score(std::string_view nl, std::string_view sql) const override;

 private:
  const Embedder& embedder_;
};

// (10 / K) * cosine of embeddings.
class BaselineFineScorer final : public FineScorer {
 public:
  explicit BaselineFineScorer(const Embedder& embedder) : embedder_(embedder) {}
  double score(std::string_view nl, std::string_view phrase,
               std::size_t phrase_count) const override;

 private:
  const Embedder& embedder_;
};

struct Stage2Score {
  double global = 0.0;
  std::vector<double> phrases;
  double final_score = 0.0;  // global + sum(phrases)
};

Stage2Score stage2_score(std::string_view nl, std::string_view sql,
                         const std::vector<PhraseUnit>& units, const CoarseScorer& coarse,
                         const FineScorer& fine);

struct RankedCandidate {
  std::size_t candidate = 0;  // index into the generated candidate list
  std::string sql;
  double stage1_score = 0.0;
  double global_score = 0.0;
  std::vector<double> phrase_scores;
  double final_score = 0.0;
  std::vector<PhraseUnit> units;
};

// Scores every stage-1 survivor and orders by final score descending, ties by
// stage-1 score then generation order; truncated to list_size.
std::vector<RankedCandidate> stage2_rank(std::string_view nl,
                                         const std::vector<Candidate>& candidates,
                                         const std::vector<Stage1Entry>& stage1,
                                         const SchemaDb& schema, const CoarseScorer& coarse,
                                         const FineScorer& fine, const RankerConfig& config = {},
                                         const TemplateCatalog& catalog = TemplateCatalog::builtin());

// (1/N) sum (yhat_i - y_i)^2. Throws LengthMismatch (also for N = 0).
double global_loss(const std::vector<double>& predicted, const std::vector<double>& target);

// (1/N) sum (sum_k yhat_ik - y_i)^2. Throws LengthMismatch.
double local_loss(const std::vector<std::vector<double>>& phrase_scores,
                  const std::vector<double>& target);

// Mean over (p, n) pairs of max(0, alpha - cos(q, p) + cos(q, n)). Throws
// EmptySet.
double phrase_triplet_loss(const Embedding& anchor, const std::vector<Embedding>& positives,
                           const std::vector<Embedding>& negatives, double alpha);

struct PipelineBackends {
  const MetadataClassifier* classifier = nullptr;
  const Generator* generator = nullptr;
  const Embedder* nl_tower = nullptr;
  const Embedder* sql_tower = nullptr;
  const CoarseScorer* coarse = nullptr;
  const FineScorer* fine = nullptr;
  const CompositionStore* store = nullptr;  // null behaves as an empty store
  const TemplateCatalog* catalog = nullptr;  // null means the built-in catalog
};

struct PipelineConfig {
  RankerConfig ranker;
  double threshold = kDefaultThreshold;
  std::size_t max_compositions = kDefaultMaxCompositions;
  std::vector<Demonstration> demos;
  std::size_t decode_width = 1;
  std::size_t parallelism = 1;
};

struct PipelineInput {
  std::string query_id;
  std::string db_id;
  std::string nl;
  std::optional<std::string> gold_sql;
};

struct PipelineResult {
  RunRecord record;
  std::vector<Candidate> candidates;
  std::vector<RankedCandidate> ranked;
  std::optional<std::string> chosen_sql;
};

// Classification, generation and two-stage ranking for one NL query. Stage
// failures are recorded in record.errors; BackendError from the classifier
// and NoCandidates are recorded too, leaving the ranking empty.
PipelineResult rank_pipeline(const PipelineInput& input, const SchemaDb& schema,
                             const PipelineConfig& config, const PipelineBackends& backends);

}  // namespace metasql
