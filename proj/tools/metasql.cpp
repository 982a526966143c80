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

// Command-line front end: analysis helpers plus the end-to-end pipeline.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "metasql/classifier.hpp"
#include "metasql/corpus.hpp"
#include "metasql/decomposer.hpp"
#include "metasql/error.hpp"
#include "metasql/eval.hpp"
#include "metasql/generator.hpp"
#include "metasql/metadata.hpp"
#include "metasql/ranker.hpp"
#include "metasql/similarity.hpp"

namespace fs = std::filesystem;
using namespace metasql;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

struct RunConfig {
  std::string data_root;
  std::string tables;
  std::string db;
  std::string classifier = "heuristic";
  std::string predictions;
  std::string generator = "fixture";
  std::string fixtures;
  bool fixture_strict = false;
  std::string embedder = "baseline";
  double threshold = kDefaultThreshold;
  std::size_t top_n = 10;
  std::size_t list_size = 10;
  double alpha = 0.2;
  std::size_t max_compositions = kDefaultMaxCompositions;
  std::string store;
  std::string demos;
  std::size_t num_demos = kDefaultDemoCount;
  std::size_t decode_width = 1;
  std::size_t parallelism = 1;
  std::string endpoint;
  std::string model;
  std::string embedding_endpoint;
  std::string embedding_model;
  std::string credential_env = "METASQL_API_KEY";
  std::string transcript;
  std::string transcript_mode = "off";
  bool foreign_keys = false;
  std::string templates;
  std::string records;
  std::string report;
  bool no_execution = false;
};

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " is not configured");
  if (!fs::exists(path)) throw ConfigError(what + " does not exist: " + path);
}

fs::path tables_path(const RunConfig& cfg) {
  if (!cfg.tables.empty()) return cfg.tables;
  if (cfg.data_root.empty()) throw ConfigError("set --tables or --data-root");
  return fs::path(cfg.data_root) / "tables.json";
}

std::map<std::string, SchemaDb> schemas_for(const RunConfig& cfg) {
  const auto path = tables_path(cfg);
  require_file(path.string(), "schema file");
  return load_schemas(path);
}

const SchemaDb& schema_for(const std::map<std::string, SchemaDb>& schemas, const RunConfig& cfg) {
  if (cfg.db.empty()) throw ConfigError("--db is required");
  auto it = schemas.find(cfg.db);
  if (it == schemas.end()) throw FormatError("unknown database '" + cfg.db + "'");
  return it->second;
}

std::vector<BenchmarkExample> examples_for(const RunConfig& cfg, Split split,
                                           const std::map<std::string, SchemaDb>& schemas) {
  if (cfg.data_root.empty()) throw ConfigError("--data-root is required");
  const fs::path path = fs::path(cfg.data_root) / split_file(split);
  require_file(path.string(), std::string(split_name(split)) + " split file");
  return load_examples(path, split, schemas);
}

std::vector<Demonstration> demos_for(const RunConfig& cfg) {
  if (cfg.demos.empty()) return {};
  require_file(cfg.demos, "demonstration file");
  auto demos = load_demonstrations(cfg.demos);
  if (demos.size() > cfg.num_demos) demos.resize(cfg.num_demos);
  return demos;
}

std::shared_ptr<Transcript> transcript_for(const RunConfig& cfg) {
  const auto mode = transcript_mode_from_name(cfg.transcript_mode);
  if (mode == TranscriptMode::kOff) return nullptr;
  if (cfg.transcript.empty()) throw ConfigError("transcript mode set without --transcript");
  if (mode == TranscriptMode::kReplay) require_file(cfg.transcript, "transcript");
  return std::make_shared<Transcript>(cfg.transcript, mode);
}

TemplateCatalog catalog_for(const RunConfig& cfg) {
  if (cfg.templates.empty()) return TemplateCatalog::builtin();
  require_file(cfg.templates, "template catalog");
  return TemplateCatalog::load(cfg.templates);
}

RankerConfig ranker_config(const RunConfig& cfg) {
  RankerConfig rc;
  rc.stage1_top_n = cfg.top_n;
  rc.list_size = cfg.list_size;
  rc.margin = cfg.alpha;
  rc.parallelism = cfg.parallelism;
  rc.validate();
  return rc;
}

// Backends named in the configuration. Construction validates credentials
// and paths, so misconfiguration surfaces before any work starts.
struct Backends {
  std::unique_ptr<MetadataClassifier> classifier;
  std::unique_ptr<Generator> generator;
  std::unique_ptr<Embedder> embedder;
  std::unique_ptr<CoarseScorer> coarse;
  std::unique_ptr<FineScorer> fine;
  CompositionStore store;
  TemplateCatalog catalog;

  PipelineBackends view() const {
    return {classifier.get(), generator.get(), embedder.get(), embedder.get(),
            coarse.get(),     fine.get(),      &store,         &catalog};
  }
};

std::unique_ptr<Embedder> make_embedder(const RunConfig& cfg,
                                        const std::shared_ptr<Transcript>& transcript) {
  if (cfg.embedder == "baseline") return std::make_unique<HashedTrigramEmbedder>();
  if (cfg.embedder != "service") throw ConfigError("embedder must be baseline or service");
  ServiceConfig sc;
  sc.endpoint = cfg.embedding_endpoint;
  sc.model = cfg.embedding_model;
  sc.credential_env = cfg.credential_env;
  return std::make_unique<ServiceEmbedder>(sc, transcript);
}

Backends make_backends(const RunConfig& cfg, const std::vector<BenchmarkExample>& examples) {
  Backends b;
  auto transcript = transcript_for(cfg);
  if (cfg.classifier == "heuristic") {
    b.classifier = std::make_unique<HeuristicClassifier>();
  } else if (cfg.classifier == "file") {
    require_file(cfg.predictions, "predictions file");
    b.classifier = std::make_unique<FileClassifier>(cfg.predictions);
  } else if (cfg.classifier == "oracle") {
    std::map<std::string, SqlQuery> gold;
    for (const auto& ex : examples) {
      if (ex.gold) gold.emplace(ex.query_id, *ex.gold);
    }
    b.classifier = std::make_unique<OracleClassifier>(std::move(gold));
  } else {
    throw ConfigError("classifier must be heuristic, file or oracle");
  }

  if (cfg.generator == "fixture") {
    require_file(cfg.fixtures, "fixture file");
    b.generator = std::make_unique<FixtureGenerator>(cfg.fixtures, cfg.fixture_strict);
  } else if (cfg.generator == "service") {
    ServiceConfig sc;
    sc.endpoint = cfg.endpoint;
    sc.model = cfg.model;
    sc.credential_env = cfg.credential_env;
    b.generator = std::make_unique<ServiceGenerator>(sc, transcript,
                                                     PromptOptions{cfg.foreign_keys});
  } else {
    throw ConfigError("generator must be fixture or service");
  }

  b.embedder = make_embedder(cfg, transcript);
  b.coarse = std::make_unique<BaselineCoarseScorer>(*b.embedder);
  b.fine = std::make_unique<BaselineFineScorer>(*b.embedder);

  if (!cfg.store.empty()) {
    require_file(cfg.store, "composition store");
    b.store = CompositionStore::load(cfg.store);
  }
  b.catalog = catalog_for(cfg);
  return b;
}

PipelineConfig pipeline_config(const RunConfig& cfg) {
  PipelineConfig pc;
  pc.ranker = ranker_config(cfg);
  pc.threshold = cfg.threshold;
  pc.max_compositions = cfg.max_compositions;
  pc.demos = demos_for(cfg);
  pc.decode_width = cfg.decode_width;
  pc.parallelism = cfg.parallelism;
  if (pc.decode_width < 1) throw ConfigError("decode width must be at least 1");
  return pc;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

// --- subcommands -----------------------------------------------------------

void cmd_analyze(const RunConfig& cfg, const std::string& sql) {
  const auto schemas = schemas_for(cfg);
  const SqlQuery q = parse_sql(sql, schema_for(schemas, cfg));
  const QueryMetadata m = metadata_for(q);
  std::vector<std::string> tags;
  for (auto t : m.tags.to_vector()) tags.emplace_back(tag_name(t));
  std::cout << "canonical: " << render_sql(q) << "\n"
            << "tags: " << join(tags, ",") << "\n"
            << "hardness: " << m.hardness << "\n"
            << "difficulty: " << difficulty_name(difficulty_for_hardness(m.hardness)) << "\n"
            << "metadata: " << flatten_metadata(m) << "\n";
}

void cmd_decompose(const RunConfig& cfg, const std::string& sql) {
  const auto schemas = schemas_for(cfg);
  const SqlQuery q = parse_sql(sql, schema_for(schemas, cfg));
  const auto catalog = catalog_for(cfg);
  const auto units = decompose(q, schema_for(schemas, cfg), catalog);
  for (const auto& u : units) {
    std::cout << unit_type_name(u.type) << "\t" << u.fragment_text << "\t" << u.nl_text << "\n";
  }
  for (const auto& u : units) {
    if (u.fallback) {
      std::cout << "warning: no template fits the " << unit_type_name(u.type)
                << " unit; using its SQL text\n";
    }
  }
  std::cout << "K = " << units.size() << "\n";
}

void cmd_rate(const RunConfig& cfg, const std::string& split_text) {
  const auto schemas = schemas_for(cfg);
  const auto examples = examples_for(cfg, split_from_name(split_text), schemas);
  std::map<std::string, std::size_t> per_difficulty;
  for (const auto& ex : examples) {
    const QueryMetadata m = metadata_for(*ex.gold);
    const auto d = std::string(difficulty_name(difficulty_for_hardness(m.hardness)));
    ++per_difficulty[d];
    std::cout << ex.query_id << "\t" << m.hardness << "\t" << d << "\t" << flatten_metadata(m)
              << "\n";
  }
  for (const auto& [d, n] : per_difficulty) std::cout << "# " << d << ": " << n << "\n";
}

void cmd_similarity(const RunConfig& cfg, const std::string& candidate, const std::string& gold) {
  const auto schemas = schemas_for(cfg);
  const auto& schema = schema_for(schemas, cfg);
  const SqlQuery c = parse_sql(candidate, schema);
  const SqlQuery g = parse_sql(gold, schema);
  const auto cc = clause_components(c);
  const auto gc = clause_components(g);
  for (std::size_t i = 0; i < kClauseCategoryCount; ++i) {
    const auto cat = static_cast<ClauseCategory>(i);
    std::cout << clause_category_name(cat) << "\t" << fixed(component_overlap(cc[cat], gc[cat]))
              << "\n";
  }
  std::cout << "y = " << fixed(clause_similarity(c, g)) << "\n";
}

void cmd_prompt(const RunConfig& cfg, const std::string& nl, const std::string& metadata,
                bool prefixed) {
  const QueryMetadata m = parse_metadata(metadata);
  if (prefixed) {
    std::cout << build_prefixed_input(nl, m) << "\n";
    return;
  }
  const auto schemas = schemas_for(cfg);
  GenerationRequest req;
  req.nl = nl;
  req.schema = &schema_for(schemas, cfg);
  req.metadata = m;
  req.demos = demos_for(cfg);
  std::cout << build_prompt(req, PromptOptions{cfg.foreign_keys}) << "\n";
}

void cmd_rank(const RunConfig& cfg, const std::string& nl, const std::string& candidates_path) {
  const auto schemas = schemas_for(cfg);
  const auto& schema = schema_for(schemas, cfg);
  require_file(candidates_path, "candidate file");
  std::ifstream in(candidates_path);
  std::vector<Candidate> candidates;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    candidates.push_back(make_candidate(line, schema, {}, "file"));
  }
  const auto rc = ranker_config(cfg);
  const auto embedder = make_embedder(cfg, transcript_for(cfg));
  BaselineCoarseScorer coarse(*embedder);
  BaselineFineScorer fine(*embedder);
  const auto catalog = catalog_for(cfg);
  const auto stage1 = stage1_rank(nl, candidates, *embedder, *embedder, rc);
  const auto ranked = stage2_rank(nl, candidates, stage1, schema, coarse, fine, rc, catalog);
  std::cout << "rank\tfinal\tglobal\tlocal\tstage1\tsql\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& r = ranked[i];
    double local = 0.0;
    for (double s : r.phrase_scores) local += s;
    std::cout << i + 1 << "\t" << fixed(r.final_score) << "\t" << fixed(r.global_score) << "\t"
              << fixed(local) << "\t" << fixed(r.stage1_score) << "\t" << r.sql << "\n";
  }
  for (const auto& c : candidates) {
    if (!c.parsed()) std::cout << "skipped (unparsed): " << c.sql_text << "\n";
  }
}

EvalOptions eval_options(const RunConfig& cfg) {
  EvalOptions opts;
  if (!cfg.no_execution && !cfg.data_root.empty() &&
      fs::is_directory(fs::path(cfg.data_root) / "database")) {
    opts.data_root = cfg.data_root;
  }
  return opts;
}

void emit_report(const RunConfig& cfg, const EvalReport& report) {
  std::cout << report_to_table(report);
  if (!cfg.report.empty()) write_text(cfg.report, report_to_json(report) + "\n");
}

void cmd_pipeline(const RunConfig& cfg, const std::string& split_text, std::size_t limit) {
  const auto schemas = schemas_for(cfg);
  auto examples = examples_for(cfg, split_from_name(split_text), schemas);
  if (limit > 0 && examples.size() > limit) examples.resize(limit);
  const auto pc = pipeline_config(cfg);
  const Backends backends = make_backends(cfg, examples);

  std::vector<RunRecord> records;
  std::size_t failures = 0;
  for (const auto& ex : examples) {
    PipelineInput input{ex.query_id, ex.db_id, ex.nl, ex.gold_sql};
    auto result = rank_pipeline(input, schemas.at(ex.db_id), pc, backends.view());
    if (!result.chosen_sql) ++failures;
    records.push_back(std::move(result.record));
  }
  if (!cfg.records.empty()) write_run_records(cfg.records, records, /*append=*/false);
  if (records.empty()) throw FormatError("split has no examples");
  emit_report(cfg, evaluate_records(records, schemas, eval_options(cfg)));
  std::cout << "queries: " << records.size() << ", without translation: " << failures << "\n";
}

void cmd_evaluate(const RunConfig& cfg, const std::string& records_path) {
  require_file(records_path, "run record file");
  const auto schemas = schemas_for(cfg);
  const auto records = read_run_records(records_path);
  emit_report(cfg, evaluate_records(records, schemas, eval_options(cfg)));
}

void cmd_build_store(const RunConfig& cfg, const std::string& split_text, const std::string& out) {
  const auto schemas = schemas_for(cfg);
  const auto examples = examples_for(cfg, split_from_name(split_text), schemas);
  std::vector<QueryMetadata> corpus;
  for (const auto& ex : examples) corpus.push_back(metadata_for(*ex.gold));
  const auto store = CompositionStore::build(corpus);
  store.save(out);
  std::cout << "compositions: " << store.entries().size() << " from " << corpus.size()
            << " queries\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metadata-conditioned NL-to-SQL generation and ranking"};
  app.set_config("--config", "", "INI configuration file");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--data-root", cfg.data_root, "Spider-layout data directory")
      ->envname("METASQL_DATA_ROOT");
  app.add_option("--tables", cfg.tables, "Schema file (default <data-root>/tables.json)");
  app.add_option("--db", cfg.db, "Database id");
  app.add_option("--classifier", cfg.classifier, "heuristic | file | oracle");
  app.add_option("--predictions", cfg.predictions, "Label score file for the file classifier");
  app.add_option("--generator", cfg.generator, "fixture | service");
  app.add_option("--fixtures", cfg.fixtures, "Fixture generator file");
  app.add_flag("--fixture-strict", cfg.fixture_strict, "Missing fixture entries are errors");
  app.add_option("--embedder", cfg.embedder, "baseline | service");
  app.add_option("--threshold", cfg.threshold, "Label selection threshold p");
  app.add_option("--top-n", cfg.top_n, "Stage-1 survivors")->check(CLI::PositiveNumber);
  app.add_option("--list-size", cfg.list_size, "Ranked list size L")->check(CLI::PositiveNumber);
  app.add_option("--alpha", cfg.alpha, "Triplet margin")->check(CLI::PositiveNumber);
  app.add_option("--max-compositions", cfg.max_compositions, "Compositions per query")
      ->check(CLI::PositiveNumber);
  app.add_option("--store", cfg.store, "Composition store file");
  app.add_option("--demos", cfg.demos, "Demonstration file");
  app.add_option("--num-demos", cfg.num_demos, "Demonstrations per prompt");
  app.add_option("--decode-width", cfg.decode_width, "Candidates per condition")
      ->check(CLI::PositiveNumber);
  app.add_option("--parallelism", cfg.parallelism, "Concurrent backend calls")
      ->check(CLI::PositiveNumber);
  app.add_option("--endpoint", cfg.endpoint, "Completion endpoint URL");
  app.add_option("--model", cfg.model, "Completion model name");
  app.add_option("--embedding-endpoint", cfg.embedding_endpoint, "Embedding endpoint URL");
  app.add_option("--embedding-model", cfg.embedding_model, "Embedding model name");
  app.add_option("--credential-env", cfg.credential_env, "Environment variable with the API key");
  app.add_option("--transcript", cfg.transcript, "Service transcript file");
  app.add_option("--transcript-mode", cfg.transcript_mode, "off | record | replay");
  app.add_flag("--foreign-keys", cfg.foreign_keys, "Add foreign keys to prompt schemas");
  app.add_option("--templates", cfg.templates, "Phrase template catalog");
  app.add_option("--records", cfg.records, "Run record output (JSON lines)");
  app.add_option("--report", cfg.report, "Evaluation report output (JSON)");
  app.add_flag("--no-execution", cfg.no_execution, "Skip execution match");

  std::string sql, gold, nl, metadata, split = "dev", candidates, records_in, out;
  std::size_t limit = 0;
  bool prefixed = false;

  auto* analyze = app.add_subcommand("analyze", "Operator tags, hardness and metadata of a query");
  analyze->add_option("--sql", sql, "SQL query")->required();
  auto* decomp = app.add_subcommand("decompose", "Phrase units of a query");
  decomp->add_option("--sql", sql, "SQL query")->required();
  auto* rate = app.add_subcommand("rate", "Hardness of every query in a split");
  rate->add_option("--split", split, "train | dev | test");
  auto* sim = app.add_subcommand("similarity", "Clause similarity label of a candidate");
  sim->add_option("--candidate", sql, "Candidate SQL")->required();
  sim->add_option("--gold", gold, "Gold SQL")->required();
  auto* prompt = app.add_subcommand("prompt", "Few-shot prompt for one question");
  prompt->add_option("--nl", nl, "Question")->required();
  prompt->add_option("--metadata", metadata, "Flattened metadata")->required();
  prompt->add_flag("--prefixed", prefixed, "Print the metadata-prefixed input instead");
  auto* rank = app.add_subcommand("rank", "Rank candidate queries with baseline scorers");
  rank->add_option("--nl", nl, "Question")->required();
  rank->add_option("--candidates", candidates, "File with one SQL query per line")->required();
  auto* pipeline = app.add_subcommand("pipeline", "Classify, generate, rank and evaluate a split");
  pipeline->add_option("--split", split, "train | dev | test");
  pipeline->add_option("--limit", limit, "Process only the first N examples");
  auto* evaluate = app.add_subcommand("evaluate", "Metrics over stored run records");
  evaluate->add_option("--input", records_in, "Run record file")->required();
  auto* store = app.add_subcommand("build-store", "Composition store from a split");
  store->add_option("--split", split, "train | dev | test");
  store->add_option("--out", out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*analyze) cmd_analyze(cfg, sql);
    if (*decomp) cmd_decompose(cfg, sql);
    if (*rate) cmd_rate(cfg, split);
    if (*sim) cmd_similarity(cfg, sql, gold);
    if (*prompt) cmd_prompt(cfg, nl, metadata, prefixed);
    if (*rank) cmd_rank(cfg, nl, candidates);
    if (*pipeline) cmd_pipeline(cfg, split, limit);
    if (*evaluate) cmd_evaluate(cfg, records_in);
    if (*store) cmd_build_store(cfg, split, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
