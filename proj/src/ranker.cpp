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

#include "metasql/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "metasql/error.hpp"
#include "parallel.hpp"
#include "strings.hpp"

namespace metasql {

// --- embedders -------------------------------------------------------------

HashedTrigramEmbedder::HashedTrigramEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw ConfigError("embedding dimension must be positive");
}

Embedding HashedTrigramEmbedder::embed(std::string_view text) const {
  const std::string padded = " " + detail::to_lower(text) + " ";
  Embedding v(dimension_, 0.0);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    v[detail::fnv1a(std::string_view(padded).substr(i, 3)) % dimension_] += 1.0;
  }
  const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  if (norm > 0.0) {
    for (auto& x : v) x /= norm;
  }
  return v;
}

ServiceEmbedder::ServiceEmbedder(ServiceConfig config, std::shared_ptr<Transcript> transcript)
    : config_(std::move(config)), transcript_(std::move(transcript)) {
  const bool replay = transcript_ && transcript_->mode() == TranscriptMode::kReplay;
  if (!replay) {
    if (config_.endpoint.empty()) throw ConfigError("service embedder needs an endpoint");
    credential_ = read_credential(config_.credential_env);
  }
}

Embedding ServiceEmbedder::embed(std::string_view text) const {
  nlohmann::json vec;
  if (transcript_ && transcript_->mode() == TranscriptMode::kReplay) {
    vec = transcript_->replay(text).front();
  } else {
    const nlohmann::json body = {{"model", config_.model}, {"input", std::string(text)}};
    const auto response = post_json(config_.endpoint, body, credential_, config_.timeout_seconds);
    try {
      vec = response.at("data").at(0).at("embedding");
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("unexpected embedding response: ") + e.what());
    }
    if (transcript_) transcript_->record(text, vec);
  }
  try {
    return vec.get<Embedding>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("embedding is not a numeric array: ") + e.what());
  }
}

double cosine_sim(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("embedding dimensions differ: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
  const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
  const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine of a zero vector");
  const double c = std::inner_product(a.begin(), a.end(), b.begin(), 0.0) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

void RankerConfig::validate() const {
  if (stage1_top_n < 1) throw ConfigError("stage-1 top-n must be at least 1");
  if (list_size < 1) throw ConfigError("list size must be at least 1");
  if (!(margin > 0.0)) throw ConfigError("margin must be positive");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
}

// --- stage 1 ---------------------------------------------------------------

std::vector<Stage1Entry> stage1_rank(std::string_view nl, const std::vector<Candidate>& candidates,
                                     const Embedder& nl_tower, const Embedder& sql_tower,
                                     const RankerConfig& config) {
  std::vector<std::size_t> parsed;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].parsed()) parsed.push_back(i);
  }
  if (parsed.empty()) throw NoCandidates("no parseable candidate to rank");

  const Embedding q = nl_tower.embed(nl);
  std::vector<Stage1Entry> out(parsed.size());
  detail::parallel_for(parsed.size(), config.parallelism, [&](std::size_t k) {
    const auto i = parsed[k];
    out[k] = {i, cosine_sim(q, sql_tower.embed(candidates[i].sql_text))};
  });
  std::stable_sort(out.begin(), out.end(),
                   [](const Stage1Entry& a, const Stage1Entry& b) { return a.score > b.score; });
  if (out.size() > config.stage1_top_n) out.resize(config.stage1_top_n);
  return out;
}

// --- stage 2 ---------------------------------------------------------------

double BaselineCoarseScorer::score(std::string_view nl, std::string_view sql) const {
  return 10.0 * cosine_sim(embedder_.embed(nl), embedder_.embed(sql));
}

double BaselineFineScorer::score(std::string_view nl, std::string_view phrase,
                                 std::size_t phrase_count) const {
  if (phrase_count == 0) throw LengthMismatch("phrase count must be positive");
  return 10.0 / static_cast<double>(phrase_count) *
         cosine_sim(embedder_.embed(nl), embedder_.embed(phrase));
}

Stage2Score stage2_score(std::string_view nl, std::string_view sql,
                         const std::vector<PhraseUnit>& units, const CoarseScorer& coarse,
                         const FineScorer& fine) {
  Stage2Score s;
  s.global = coarse.score(nl, sql);
  s.final_score = s.global;
  for (const auto& u : units) {
    s.phrases.push_back(fine.score(nl, u.nl_text, units.size()));
    s.final_score += s.phrases.back();
  }
  return s;
}

std::vector<RankedCandidate> stage2_rank(std::string_view nl,
                                         const std::vector<Candidate>& candidates,
                                         const std::vector<Stage1Entry>& stage1,
                                         const SchemaDb& schema, const CoarseScorer& coarse,
                                         const FineScorer& fine, const RankerConfig& config,
                                         const TemplateCatalog& catalog) {
  std::vector<RankedCandidate> out(stage1.size());
  detail::parallel_for(stage1.size(), config.parallelism, [&](std::size_t k) {
    const Candidate& c = candidates.at(stage1[k].candidate);
    if (!c.parsed()) throw NoCandidates("unparsed candidate reached stage 2");
    RankedCandidate& r = out[k];
    r.candidate = stage1[k].candidate;
    r.sql = c.sql_text;
    r.stage1_score = stage1[k].score;
    r.units = decompose(*c.ast, schema, catalog);
    auto s = stage2_score(nl, render_sql(*c.ast), r.units, coarse, fine);
    r.global_score = s.global;
    r.phrase_scores = std::move(s.phrases);
    r.final_score = s.final_score;
  });
  std::stable_sort(out.begin(), out.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.final_score != b.final_score) return a.final_score > b.final_score;
    if (a.stage1_score != b.stage1_score) return a.stage1_score > b.stage1_score;
    return a.candidate < b.candidate;
  });
  if (out.size() > config.list_size) out.resize(config.list_size);
  return out;
}

// --- losses ----------------------------------------------------------------

double global_loss(const std::vector<double>& predicted, const std::vector<double>& target) {
  if (predicted.size() != target.size() || target.empty()) {
    throw LengthMismatch("global loss needs equal, non-empty prediction and target lists");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double d = predicted[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(target.size());
}

double local_loss(const std::vector<std::vector<double>>& phrase_scores,
                  const std::vector<double>& target) {
  if (phrase_scores.size() != target.size() || target.empty()) {
    throw LengthMismatch("local loss needs one phrase score list per target");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double total = std::accumulate(phrase_scores[i].begin(), phrase_scores[i].end(), 0.0);
    const double d = total - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(target.size());
}

double phrase_triplet_loss(const Embedding& anchor, const std::vector<Embedding>& positives,
                           const std::vector<Embedding>& negatives, double alpha) {
  if (positives.empty() || negatives.empty()) {
    throw EmptySet("triplet loss needs at least one positive and one negative");
  }
  std::vector<double> pos;
  for (const auto& p : positives) pos.push_back(cosine_sim(anchor, p));
  std::vector<double> neg;
  for (const auto& n : negatives) neg.push_back(cosine_sim(anchor, n));
  double sum = 0.0;
  for (double p : pos) {
    for (double n : neg) sum += std::max(0.0, alpha - p + n);
  }
  return sum / static_cast<double>(pos.size() * neg.size());
}

// --- pipeline --------------------------------------------------------------

PipelineResult rank_pipeline(const PipelineInput& input, const SchemaDb& schema,
                             const PipelineConfig& config, const PipelineBackends& backends) {
  if (!backends.classifier || !backends.generator || !backends.nl_tower || !backends.sql_tower ||
      !backends.coarse || !backends.fine) {
    throw ConfigError("pipeline backend missing");
  }
  PipelineResult result;
  RunRecord& rec = result.record;
  rec.query_id = input.query_id;
  rec.db_id = input.db_id;
  rec.nl = input.nl;
  rec.gold_sql = input.gold_sql;

  std::vector<MetadataPrediction> predictions;
  try {
    predictions = backends.classifier->predict_labels({input.query_id, input.nl, &schema});
  } catch (const Error& e) {
    rec.errors.push_back(std::string("classifier: ") + e.what());
    return result;
  }
  for (const auto& p : predictions) rec.predictions.push_back({label_name(p.label), p.score});

  const LabelSet labels = select_labels(predictions, config.threshold);
  for (auto t : labels.tags.to_vector()) rec.selected_labels.emplace_back(tag_name(t));
  for (int h : labels.hardness) rec.selected_labels.push_back(std::to_string(h));

  static const CompositionStore kEmptyStore;
  const auto conditions = enumerate_compositions(
      labels, backends.store ? *backends.store : kEmptyStore, config.max_compositions);
  for (const auto& m : conditions) rec.compositions.push_back(flatten_metadata(m));

  GenerateAllOptions gen_options;
  gen_options.query_id = input.query_id;
  gen_options.demos = config.demos;
  gen_options.decode_width = config.decode_width;
  gen_options.parallelism = config.parallelism;
  auto generated = generate_all(input.nl, schema, conditions, *backends.generator, gen_options);
  for (auto& e : generated.errors) rec.errors.push_back("generator: " + e);
  result.candidates = std::move(generated.candidates);
  for (const auto& c : result.candidates) {
    rec.candidates.push_back(
        {c.sql_text, flatten_metadata(c.condition), c.backend_id, c.parsed(), c.parse_error});
  }

  const TemplateCatalog& catalog = backends.catalog ? *backends.catalog : TemplateCatalog::builtin();
  try {
    const auto stage1 = stage1_rank(input.nl, result.candidates, *backends.nl_tower,
                                    *backends.sql_tower, config.ranker);
    for (const auto& s : stage1) rec.stage1.push_back({s.candidate, s.score});
    result.ranked = stage2_rank(input.nl, result.candidates, stage1, schema, *backends.coarse,
                                *backends.fine, config.ranker, catalog);
  } catch (const NoCandidates& e) {
    rec.errors.push_back(std::string("ranker: ") + e.what());
    return result;
  } catch (const Error& e) {
    rec.errors.push_back(std::string("ranker: ") + e.what());
    rec.stage1.clear();
    return result;
  }
  for (const auto& r : result.ranked) {
    rec.ranked.push_back(
        {r.candidate, r.sql, r.stage1_score, r.global_score, r.phrase_scores, r.final_score});
  }
  if (!result.ranked.empty()) {
    result.chosen_sql = result.ranked.front().sql;
    rec.chosen_sql = result.chosen_sql;
  }
  return result;
}

}  // namespace metasql
