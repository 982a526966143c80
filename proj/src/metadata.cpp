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

#include "metasql/metadata.hpp"

#include <bit>
#include <charconv>

#include "metasql/error.hpp"
#include "metasql/eval.hpp"
#include "strings.hpp"

namespace metasql {

namespace {

constexpr std::array<std::string_view, kTagCount> kTagNames = {
    "project", "join",  "where",     "group",  "having",  "order",   "limit",
    "distinct", "agg",  "union",     "intersect", "except", "subquery",
};

bool block_has_aggregate(const SqlQuery& q) {
  for (const auto& e : q.select) {
    if (e.has_aggregate()) return true;
  }
  for (const auto& o : q.order_by) {
    if (o.expr.has_aggregate()) return true;
  }
  bool found = false;
  auto scan = [&](const Predicate& p, auto&& self) -> void {
    if (p.kind == Predicate::Kind::kLeaf) {
      found = found || p.leaf.lhs.has_aggregate();
      return;
    }
    for (const auto& c : p.children) self(c, self);
  };
  if (q.having) scan(*q.having, scan);
  return found;
}

bool block_has_distinct(const SqlQuery& q) {
  if (q.distinct) return true;
  for (const auto& e : q.select) {
    if (e.value.left.distinct || (e.value.op != ArithOp::kNone && e.value.right.distinct)) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::string_view tag_name(OperatorTag tag) { return kTagNames[static_cast<std::size_t>(tag)]; }

std::optional<OperatorTag> tag_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTagCount; ++i) {
    if (kTagNames[i] == name) return kAllTags[i];
  }
  return std::nullopt;
}

std::size_t TagSet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<OperatorTag> TagSet::to_vector() const {
  std::vector<OperatorTag> out;
  for (auto t : kAllTags) {
    if (contains(t)) out.push_back(t);
  }
  return out;
}

TagSet extract_operator_tags(const SqlQuery& q) {
  TagSet tags{OperatorTag::kProject};
  if (q.from.tables.size() > 1) tags.insert(OperatorTag::kJoin);
  if (q.where) tags.insert(OperatorTag::kWhere);
  if (!q.group_by.empty()) tags.insert(OperatorTag::kGroup);
  if (q.having) tags.insert(OperatorTag::kHaving);
  if (!q.order_by.empty()) tags.insert(OperatorTag::kOrder);
  if (q.limit) tags.insert(OperatorTag::kLimit);
  if (block_has_distinct(q)) tags.insert(OperatorTag::kDistinct);
  if (block_has_aggregate(q)) tags.insert(OperatorTag::kAgg);
  // A chain of set operations belongs to the top-level structure.
  for (const SqlQuery* cur = &q; cur->set_op; cur = &*cur->set_op->right) {
    switch (cur->set_op->kind) {
      case SetOpKind::kUnion: tags.insert(OperatorTag::kUnion); break;
      case SetOpKind::kIntersect: tags.insert(OperatorTag::kIntersect); break;
      case SetOpKind::kExcept: tags.insert(OperatorTag::kExcept); break;
    }
  }
  if (!predicate_subqueries(q).empty()) tags.insert(OperatorTag::kSubquery);
  return tags;
}

int component_score(OperatorTag tag) {
  switch (tag) {
    case OperatorTag::kProject: return 0;
    case OperatorTag::kWhere: return 100;
    case OperatorTag::kUnion:
    case OperatorTag::kIntersect:
    case OperatorTag::kExcept:
    case OperatorTag::kSubquery: return 300;
    default: return 50;
  }
}

int compute_hardness(const SqlQuery& q) {
  int score = kBaseRating;
  for (auto t : extract_operator_tags(q).to_vector()) score += component_score(t);
  return score;
}

std::string flatten_metadata(const QueryMetadata& m) {
  std::string out = m.correctness == Correctness::kCorrect ? "correct" : "incorrect";
  out += " | rating:" + std::to_string(m.hardness) + " | tags:";
  std::vector<std::string_view> names;
  for (auto t : m.tags.to_vector()) names.push_back(tag_name(t));
  out += detail::join(names, ",");
  return out;
}

QueryMetadata parse_metadata(std::string_view text) {
  const auto segments = detail::split(text, " | ");
  if (segments.size() != 3) {
    throw FormatError("metadata must have three ' | '-separated segments: '" + std::string(text) +
                      "'");
  }
  QueryMetadata m;
  if (segments[0] == "correct") {
    m.correctness = Correctness::kCorrect;
  } else if (segments[0] == "incorrect") {
    m.correctness = Correctness::kIncorrect;
  } else {
    throw FormatError("bad correctness segment '" + segments[0] + "'");
  }

  constexpr std::string_view kRating = "rating:";
  const std::string& rating = segments[1];
  if (rating.rfind(kRating, 0) != 0) throw FormatError("bad rating segment '" + rating + "'");
  const char* first = rating.data() + kRating.size();
  const char* last = rating.data() + rating.size();
  auto [ptr, ec] = std::from_chars(first, last, m.hardness);
  if (ec != std::errc() || ptr != last || first == last || m.hardness < kBaseRating) {
    throw FormatError("bad rating segment '" + rating + "'");
  }

  constexpr std::string_view kTags = "tags:";
  const std::string& tags = segments[2];
  if (tags.rfind(kTags, 0) != 0) throw FormatError("bad tags segment '" + tags + "'");
  const std::string_view list = std::string_view(tags).substr(kTags.size());
  if (!list.empty()) {
    for (const auto& name : detail::split(list, ",")) {
      auto tag = tag_from_name(name);
      if (!tag) throw FormatError("unknown tag '" + name + "' in segment '" + tags + "'");
      m.tags.insert(*tag);
    }
  }
  return m;
}

QueryMetadata metadata_for(const SqlQuery& query, Correctness correctness) {
  return QueryMetadata{correctness, compute_hardness(query), extract_operator_tags(query)};
}

Correctness label_correctness(const SqlQuery& candidate, const SqlQuery& gold) {
  return exact_match(candidate, gold) ? Correctness::kCorrect : Correctness::kIncorrect;
}

}  // namespace metasql
