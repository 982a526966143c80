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

#include "metasql/eval.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <memory>
#include <numeric>
#include <sstream>

#include "metasql/error.hpp"
#include "metasql/metadata.hpp"
#include "metasql/similarity.hpp"
#include "strings.hpp"

namespace metasql {

bool exact_match(const SqlQuery& candidate, const SqlQuery& gold) {
  const ClauseComponents a = clause_components(candidate);
  const ClauseComponents b = clause_components(gold);
  for (std::size_t i = 0; i < kClauseCategoryCount; ++i) {
    if (component_overlap(a.parts[i], b.parts[i]) != 1.0) return false;
  }
  return true;
}

// --- execution ---------------------------------------------------------------

namespace {

using Row = std::vector<std::string>;

struct DbCloser {
  void operator()(sqlite3* db) const { sqlite3_close(db); }
};
struct StmtFinalizer {
  void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};

std::string cell_key(sqlite3_stmt* stmt, int col) {
  switch (sqlite3_column_type(stmt, col)) {
    case SQLITE_NULL: return "null";
    case SQLITE_INTEGER:
    case SQLITE_FLOAT: {
      // Integers and reals share one numeric domain, quantized at 1e-6.
      const double v = sqlite3_column_double(stmt, col);
      return "n:" + std::to_string(std::llround(v * 1e6));
    }
    default: {
      const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(stmt, col));
      return std::string("s:") + (text ? text : "");
    }
  }
}

struct QueryResult {
  int columns = 0;
  std::vector<Row> rows;
};

QueryResult run_query(sqlite3* db, std::string_view sql) {
  sqlite3_stmt* raw = nullptr;
  if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &raw, nullptr) !=
      SQLITE_OK) {
    throw Error(sqlite3_errmsg(db));
  }
  std::unique_ptr<sqlite3_stmt, StmtFinalizer> stmt(raw);
  if (!stmt) throw Error("empty statement");
  QueryResult result;
  result.columns = sqlite3_column_count(stmt.get());
  while (true) {
    const int rc = sqlite3_step(stmt.get());
    if (rc == SQLITE_DONE) break;
    if (rc != SQLITE_ROW) throw Error(sqlite3_errmsg(db));
    Row row;
    row.reserve(static_cast<std::size_t>(result.columns));
    for (int c = 0; c < result.columns; ++c) row.push_back(cell_key(stmt.get(), c));
    result.rows.push_back(std::move(row));
  }
  return result;
}

bool rows_match(const QueryResult& cand, const QueryResult& gold, const std::vector<int>& perm,
                bool ordered) {
  if (cand.rows.size() != gold.rows.size()) return false;
  std::vector<Row> permuted;
  permuted.reserve(cand.rows.size());
  for (const auto& row : cand.rows) {
    Row r;
    for (int p : perm) r.push_back(row[static_cast<std::size_t>(p)]);
    permuted.push_back(std::move(r));
  }
  if (ordered) return permuted == gold.rows;
  std::vector<Row> g = gold.rows;
  std::sort(permuted.begin(), permuted.end());
  std::sort(g.begin(), g.end());
  return permuted == g;
}

}  // namespace

bool has_top_level_order_by(std::string_view sql) {
  int depth = 0;
  char quote = 0;
  std::string prev_word;
  std::string word;
  auto flush = [&]() -> bool {
    if (word.empty()) return false;
    const bool hit = depth == 0 && detail::iequals(prev_word, "order") && detail::iequals(word, "by");
    prev_word = word;
    word.clear();
    return hit;
  };
  for (char c : sql) {
    if (quote) {
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '\'' || c == '"') {
      if (flush()) return true;
      quote = c;
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      word += c;
      continue;
    }
    if (flush()) return true;
    if (c == '(') ++depth;
    if (c == ')') --depth;
  }
  return flush();
}

ExecOutcome execution_match(std::string_view candidate_sql, std::string_view gold_sql,
                            const std::filesystem::path& db_path) {
  if (!std::filesystem::exists(db_path)) {
    return {false, "database file not found: " + db_path.string()};
  }
  sqlite3* raw = nullptr;
  if (sqlite3_open_v2(db_path.c_str(), &raw, SQLITE_OPEN_READONLY, nullptr) != SQLITE_OK) {
    std::string msg = raw ? sqlite3_errmsg(raw) : "cannot open database";
    sqlite3_close(raw);
    return {false, msg};
  }
  std::unique_ptr<sqlite3, DbCloser> db(raw);

  QueryResult gold;
  QueryResult cand;
  try {
    gold = run_query(db.get(), gold_sql);
  } catch (const Error& e) {
    return {false, std::string("gold: ") + e.what()};
  }
  try {
    cand = run_query(db.get(), candidate_sql);
  } catch (const Error& e) {
    return {false, std::string("candidate: ") + e.what()};
  }
  if (cand.columns != gold.columns) return {false, ""};

  const bool ordered = has_top_level_order_by(gold_sql);
  std::vector<int> perm(static_cast<std::size_t>(cand.columns));
  std::iota(perm.begin(), perm.end(), 0);
  if (cand.columns > 6) return {rows_match(cand, gold, perm, ordered), ""};
  do {
    if (rows_match(cand, gold, perm, ordered)) return {true, ""};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {false, ""};
}

// --- ranking metrics -----------------------------------------------------------

double precision_at_k(std::span<const GoldRank> ranks, std::size_t k) {
  if (ranks.empty()) return 0.0;
  const auto hits = std::count_if(ranks.begin(), ranks.end(),
                                  [k](const GoldRank& r) { return r && *r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double mrr(std::span<const GoldRank> ranks, std::size_t cutoff) {
  if (ranks.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : ranks) {
    if (r && *r <= cutoff) sum += 1.0 / static_cast<double>(*r);
  }
  return sum / static_cast<double>(ranks.size());
}

std::string_view difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kMedium: return "medium";
    case Difficulty::kHard: return "hard";
    case Difficulty::kExtraHard: return "extra";
  }
  return "";
}

Difficulty difficulty_for_hardness(int hardness) {
  if (hardness <= 150) return Difficulty::kEasy;
  if (hardness <= 300) return Difficulty::kMedium;
  if (hardness <= 450) return Difficulty::kHard;
  return Difficulty::kExtraHard;
}

Difficulty classify_difficulty(const SqlQuery& query) {
  return difficulty_for_hardness(compute_hardness(query));
}

std::string_view statement_type_name(StatementType t) {
  switch (t) {
    case StatementType::kNested: return "nested";
    case StatementType::kNegation: return "negation";
    case StatementType::kOrderBy: return "orderby";
    case StatementType::kGroupBy: return "groupby";
  }
  return "";
}

namespace {

bool has_negation(const SqlQuery& q) {
  bool found = false;
  auto scan = [&](const Predicate& p, auto&& self) -> void {
    if (p.kind == Predicate::Kind::kLeaf) {
      found = found || p.leaf.negated || p.leaf.op == CompareOp::kNe;
      return;
    }
    for (const auto& c : p.children) self(c, self);
  };
  if (q.where) scan(*q.where, scan);
  if (q.having) scan(*q.having, scan);
  if (found) return true;
  for (const auto* sub : predicate_subqueries(q)) {
    if (has_negation(*sub)) return true;
  }
  if (q.set_op) return q.set_op->kind == SetOpKind::kExcept || has_negation(*q.set_op->right);
  return false;
}

}  // namespace

std::vector<StatementType> statement_types(const SqlQuery& q) {
  std::vector<StatementType> out;
  const bool derived = std::any_of(q.from.tables.begin(), q.from.tables.end(),
                                   [](const TableRef& t) { return static_cast<bool>(t.derived); });
  if (!predicate_subqueries(q).empty() || derived) out.push_back(StatementType::kNested);
  if (has_negation(q)) out.push_back(StatementType::kNegation);
  if (!q.order_by.empty()) out.push_back(StatementType::kOrderBy);
  if (!q.group_by.empty()) out.push_back(StatementType::kGroupBy);
  return out;
}

double ndcg(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) {
    throw LengthMismatch("ndcg: " + std::to_string(scores.size()) + " scores vs " +
                         std::to_string(labels.size()) + " labels");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> ideal(labels.begin(), labels.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double dcg = 0.0;
  double idcg = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double discount = std::log2(static_cast<double>(i) + 2.0);
    dcg += labels[order[i]] / discount;
    idcg += ideal[i] / discount;
  }
  if (idcg == 0.0) return 1.0;
  return dcg / idcg;
}

GoldRank gold_rank(const RunRecord& record, const SqlQuery& gold, const SchemaDb& schema) {
  for (std::size_t i = 0; i < record.ranked.size(); ++i) {
    try {
      const SqlQuery cand = parse_sql(record.ranked[i].sql, schema, ParseOptions{.strict = false});
      if (exact_match(cand, gold)) return i + 1;
    } catch (const Error&) {
      continue;
    }
  }
  return std::nullopt;
}

std::filesystem::path database_path(const std::filesystem::path& data_root,
                                    std::string_view db_id) {
  const std::string id(db_id);
  return data_root / "database" / id / (id + ".sqlite");
}

// --- report ------------------------------------------------------------------

namespace {

struct BucketAccumulator {
  std::size_t count = 0;
  std::size_t em = 0;
  std::size_t ex = 0;
};

}  // namespace

EvalReport evaluate_records(const std::vector<RunRecord>& records,
                            const std::map<std::string, SchemaDb>& schemas,
                            const EvalOptions& options) {
  if (records.empty()) throw FormatError("no run records to evaluate");
  std::vector<GoldRank> ranks;
  std::size_t em_hits = 0;
  std::size_t ex_hits = 0;
  std::map<std::string, BucketAccumulator> by_difficulty;
  std::map<std::string, BucketAccumulator> by_type;
  for (auto d : {Difficulty::kEasy, Difficulty::kMedium, Difficulty::kHard, Difficulty::kExtraHard}) {
    by_difficulty[std::string(difficulty_name(d))];
  }

  for (const auto& record : records) {
    if (!record.gold_sql) throw FormatError("run record " + record.query_id + " has no gold SQL");
    auto schema_it = schemas.find(record.db_id);
    if (schema_it == schemas.end()) {
      throw FormatError("run record " + record.query_id + " names unknown db_id " + record.db_id);
    }
    const SchemaDb& schema = schema_it->second;
    SqlQuery gold;
    try {
      gold = parse_sql(*record.gold_sql, schema);
    } catch (const Error& e) {
      throw FormatError("gold SQL of " + record.query_id + " does not parse: " + e.what());
    }

    bool em = false;
    if (record.chosen_sql) {
      try {
        em = exact_match(parse_sql(*record.chosen_sql, schema, ParseOptions{.strict = false}), gold);
      } catch (const Error&) {
        em = false;
      }
    }
    bool ex = false;
    if (options.data_root && record.chosen_sql) {
      ex = execution_match(*record.chosen_sql, *record.gold_sql,
                           database_path(*options.data_root, record.db_id))
               .match;
    }
    em_hits += em;
    ex_hits += ex;
    ranks.push_back(gold_rank(record, gold, schema));

    auto bump = [&](BucketAccumulator& b) {
      ++b.count;
      b.em += em;
      b.ex += ex;
    };
    bump(by_difficulty[std::string(difficulty_name(classify_difficulty(gold)))]);
    for (auto t : statement_types(gold)) bump(by_type[std::string(statement_type_name(t))]);
  }

  EvalReport report;
  const double n = static_cast<double>(records.size());
  report.total = records.size();
  report.em = static_cast<double>(em_hits) / n;
  if (options.data_root) report.ex = static_cast<double>(ex_hits) / n;
  for (auto k : options.precision_ks) report.precision_at[k] = precision_at_k(ranks, k);
  report.mrr = mrr(ranks, options.mrr_cutoff);
  auto finish = [&](const BucketAccumulator& acc) {
    EvalReport::Bucket b;
    b.count = acc.count;
    if (acc.count > 0) {
      b.em = static_cast<double>(acc.em) / static_cast<double>(acc.count);
      if (options.data_root) b.ex = static_cast<double>(acc.ex) / static_cast<double>(acc.count);
    }
    return b;
  };
  for (const auto& [name, acc] : by_difficulty) report.per_difficulty[name] = finish(acc);
  for (const auto& [name, acc] : by_type) report.per_statement_type[name] = finish(acc);
  return report;
}

std::string report_to_json(const EvalReport& report) {
  using nlohmann::json;
  json j;
  j["total"] = report.total;
  j["em"] = report.em;
  j["ex"] = report.ex ? json(*report.ex) : json(nullptr);
  j["precision_at"] = json::object();
  for (const auto& [k, v] : report.precision_at) j["precision_at"][std::to_string(k)] = v;
  j["mrr"] = report.mrr;
  auto buckets = [](const std::map<std::string, EvalReport::Bucket>& m) {
    json out = json::object();
    for (const auto& [name, b] : m) {
      out[name] = {{"count", b.count}, {"em", b.em}, {"ex", b.ex ? json(*b.ex) : json(nullptr)}};
    }
    return out;
  };
  j["per_difficulty"] = buckets(report.per_difficulty);
  j["per_statement_type"] = buckets(report.per_statement_type);
  return j.dump(2);
}

std::string report_to_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  auto row = [&](std::string_view name, std::size_t count, double em, std::optional<double> ex) {
    out << std::left << std::setw(14) << name << std::right << std::setw(8) << count
        << std::setw(10) << em << std::setw(10);
    if (ex) {
      out << *ex;
    } else {
      out << "-";
    }
    out << '\n';
  };
  out << std::left << std::setw(14) << "bucket" << std::right << std::setw(8) << "count"
      << std::setw(10) << "EM" << std::setw(10) << "EX" << '\n';
  for (auto d : {Difficulty::kEasy, Difficulty::kMedium, Difficulty::kHard, Difficulty::kExtraHard}) {
    const auto& b = report.per_difficulty.at(std::string(difficulty_name(d)));
    row(difficulty_name(d), b.count, b.em, b.ex);
  }
  for (const auto& [name, b] : report.per_statement_type) row(name, b.count, b.em, b.ex);
  row("all", report.total, report.em, report.ex);
  out << '\n';
  for (const auto& [k, v] : report.precision_at) {
    out << std::left << std::setw(14) << ("P@" + std::to_string(k)) << std::right << std::setw(10)
        << v << '\n';
  }
  out << std::left << std::setw(14) << "MRR" << std::right << std::setw(10) << report.mrr << '\n';
  return out.str();
}

}  // namespace metasql
