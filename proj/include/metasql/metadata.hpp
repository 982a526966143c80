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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metasql/sql_ast.hpp"

namespace metasql {

// Closed operator-tag vocabulary. Declaration order is the canonical order
// used for serialization and for iteration over a TagSet.
enum class OperatorTag : std::uint8_t {
  kProject,
  kJoin,
  kWhere,
  kGroup,
  kHaving,
  kOrder,
  kLimit,
  kDistinct,
  kAgg,
  kUnion,
  kIntersect,
  kExcept,
  kSubquery,
};

inline constexpr std::size_t kTagCount = 13;

inline constexpr std::array<OperatorTag, kTagCount> kAllTags = {
    OperatorTag::kProject,  OperatorTag::kJoin,  OperatorTag::kWhere,     OperatorTag::kGroup,
    OperatorTag::kHaving,   OperatorTag::kOrder, OperatorTag::kLimit,     OperatorTag::kDistinct,
    OperatorTag::kAgg,      OperatorTag::kUnion, OperatorTag::kIntersect, OperatorTag::kExcept,
    OperatorTag::kSubquery,
};

std::string_view tag_name(OperatorTag tag);
std::optional<OperatorTag> tag_from_name(std::string_view name);

// Ordered set of operator tags backed by a bit mask.
class TagSet {
 public:
  TagSet() = default;
  TagSet(std::initializer_list<OperatorTag> tags) {
    for (auto t : tags) insert(t);
  }

  void insert(OperatorTag t) { bits_ |= bit(t); }
  void erase(OperatorTag t) { bits_ &= static_cast<std::uint16_t>(~bit(t)); }
  bool contains(OperatorTag t) const { return (bits_ & bit(t)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const;
  bool is_subset_of(const TagSet& other) const { return (bits_ & ~other.bits_) == 0; }
  std::uint16_t mask() const { return bits_; }

  // Tags in vocabulary order.
  std::vector<OperatorTag> to_vector() const;

  bool operator==(const TagSet&) const = default;

 private:
  static std::uint16_t bit(OperatorTag t) {
    return static_cast<std::uint16_t>(1u << static_cast<unsigned>(t));
  }
  std::uint16_t bits_ = 0;
};

enum class Correctness { kCorrect, kIncorrect };

inline constexpr int kBaseRating = 100;

struct QueryMetadata {
  Correctness correctness = Correctness::kCorrect;
  int hardness = kBaseRating;
  TagSet tags;

  bool operator==(const QueryMetadata&) const = default;
};

// One tag per component category present in the top-level block; `project`
// is always present.
TagSet extract_operator_tags(const SqlQuery& query);

// Base rating plus one flat score per component category present at the top
// level. Set operations and nested subqueries contribute their flat score
// without recursing into their own clauses.
int compute_hardness(const SqlQuery& query);

// Per-category score added on top of the base rating.
int component_score(OperatorTag tag);

// "<correctness> | rating:<hardness> | tags:<t1>,<t2>"
std::string flatten_metadata(const QueryMetadata& metadata);

// Exact inverse of flatten_metadata. Throws FormatError naming the offending
// segment.
QueryMetadata parse_metadata(std::string_view text);

QueryMetadata metadata_for(const SqlQuery& query, Correctness correctness = Correctness::kCorrect);

// `correct` iff the candidate exactly matches the gold query.
Correctness label_correctness(const SqlQuery& candidate, const SqlQuery& gold);

}  // namespace metasql
