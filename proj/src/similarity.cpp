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

#include "metasql/similarity.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "metasql/error.hpp"

namespace metasql {

namespace {

constexpr RenderOptions kErased{.erase_values = true};

constexpr std::array<double, kClauseCategoryCount> kWeights = {2.0, 1.5, 2.0, 1.0,
                                                               1.0, 1.0, 1.0, 0.5};
constexpr std::array<std::string_view, kClauseCategoryCount> kNames = {
    "select", "from", "where", "group", "having", "order_limit", "set_op", "nesting"};

std::vector<std::string>& slot(ClauseComponents& c, ClauseCategory cat) {
  return c.parts[static_cast<std::size_t>(cat)];
}

void add_conjuncts(const std::optional<Predicate>& pred, std::vector<std::string>& out) {
  if (!pred) return;
  for (const Predicate* p : pred->conjuncts()) out.push_back(render_predicate(*p, kErased));
}

std::string sanitize(std::string_view text) {
  std::string out(text);
  std::replace(out.begin(), out.end(), '\t', ' ');
  std::replace(out.begin(), out.end(), '\n', ' ');
  return out;
}

}  // namespace

double clause_weight(ClauseCategory category) {
  return kWeights[static_cast<std::size_t>(category)];
}

std::string_view clause_category_name(ClauseCategory category) {
  return kNames[static_cast<std::size_t>(category)];
}

ClauseComponents clause_components(const SqlQuery& q) {
  ClauseComponents c;
  auto& select = slot(c, ClauseCategory::kSelect);
  for (const auto& e : q.select) select.push_back(render_expr(e, kErased));
  if (q.distinct) select.emplace_back("DISTINCT");

  auto& from = slot(c, ClauseCategory::kFrom);
  for (const auto& t : q.from.tables) {
    from.push_back(t.derived ? "(" + render_sql(*t.derived, kErased) + ")" : t.name);
  }
  for (const auto& jc : q.from.conditions) {
    from.push_back(render_column(jc.left) + " = " + render_column(jc.right));
  }

  add_conjuncts(q.where, slot(c, ClauseCategory::kWhere));
  for (const auto& g : q.group_by) slot(c, ClauseCategory::kGroup).push_back(render_column(g));
  add_conjuncts(q.having, slot(c, ClauseCategory::kHaving));

  auto& order = slot(c, ClauseCategory::kOrderLimit);
  for (std::size_t i = 0; i < q.order_by.size(); ++i) {
    order.push_back(std::to_string(i) + ":" + render_order_item(q.order_by[i], kErased));
  }
  if (q.limit) order.emplace_back("LIMIT");

  if (q.set_op) {
    auto& setop = slot(c, ClauseCategory::kSetOp);
    setop.push_back("op:" + std::string(to_string(q.set_op->kind)));
    setop.push_back("right:" + render_sql(*q.set_op->right, kErased));
  }

  for (const SqlQuery* sub : predicate_subqueries(q)) {
    slot(c, ClauseCategory::kNesting).push_back(render_sql(*sub, kErased));
  }
  return c;
}

double component_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::map<std::string_view, int> counts;
  for (const auto& s : a) ++counts[s];
  std::size_t matched = 0;
  for (const auto& s : b) {
    auto it = counts.find(s);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  return static_cast<double>(matched) / static_cast<double>(std::max(a.size(), b.size()));
}

double clause_similarity(const SqlQuery& candidate, const SqlQuery& gold) {
  const ClauseComponents a = clause_components(candidate);
  const ClauseComponents b = clause_components(gold);
  double y = 10.0;
  for (std::size_t i = 0; i < kClauseCategoryCount; ++i) {
    y -= kWeights[i] * (1.0 - component_overlap(a.parts[i], b.parts[i]));
  }
  return std::clamp(y, 0.0, 10.0);
}

double first_stage_label(const SqlQuery& candidate, const SqlQuery& gold) {
  return clause_similarity(candidate, gold) / 10.0;
}

std::vector<TrainingTriple> build_training_triples(std::string_view query_id, std::string_view nl,
                                                   const SqlQuery& gold,
                                                   const std::vector<SqlQuery>& candidates) {
  std::vector<TrainingTriple> out;
  const SqlQuery canonical_gold = canonicalize(gold);
  out.push_back({std::string(query_id), std::string(nl), canonical_gold, 10.0});
  std::vector<std::string> seen{render_sql(canonical_gold)};
  for (const auto& cand : candidates) {
    SqlQuery c = canonicalize(cand);
    std::string key = render_sql(c);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(std::move(key));
    const double y = clause_similarity(c, canonical_gold);
    out.push_back({std::string(query_id), std::string(nl), std::move(c), y});
  }
  return out;
}

void write_training_triples(const std::filesystem::path& path,
                            const std::vector<TrainingTriple>& triples, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& t : triples) {
    out << sanitize(t.query_id) << '\t' << sanitize(t.nl) << '\t' << render_sql(t.sql) << '\t'
        << t.y << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace metasql
