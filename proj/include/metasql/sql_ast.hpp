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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "metasql/schema.hpp"

namespace metasql {

// Nullable owning pointer with value semantics: copies are deep and
// comparison looks through to the pointee.
template <class T>
class Box {
 public:
  Box() = default;
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Box(const Box& other) : ptr_(other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr;
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  explicit operator bool() const { return ptr_ != nullptr; }
  const T& operator*() const { return *ptr_; }
  T& operator*() { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T* operator->() { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) {
    if (!a.ptr_ || !b.ptr_) return !a.ptr_ && !b.ptr_;
    return *a.ptr_ == *b.ptr_;
  }

 private:
  std::unique_ptr<T> ptr_;
};

enum class Aggregate { kNone, kMax, kMin, kCount, kSum, kAvg };
enum class ArithOp { kNone, kAdd, kSub, kMul, kDiv };
enum class CompareOp { kEq, kNe, kLt, kGt, kLe, kGe, kBetween, kIn, kLike, kIs };
enum class SetOpKind { kUnion, kIntersect, kExcept };

std::string_view to_string(Aggregate agg);
std::string_view to_string(SetOpKind kind);

struct ColumnRef {
  std::string table;   // lower-cased original table name; empty for a bare '*'
  std::string column;  // lower-cased original column name, or "*"
  bool resolved = true;

  bool is_star() const { return column == "*"; }
  bool operator==(const ColumnRef&) const = default;
};

struct Literal {
  enum class Kind { kNumber, kString, kNull };
  Kind kind = Kind::kString;
  std::string text;  // verbatim, without quotes
  // Set for values that exact-match comparison may ignore.
  bool value_erasable = true;

  bool operator==(const Literal&) const = default;
};

struct ColumnUnit {
  Aggregate agg = Aggregate::kNone;
  std::variant<ColumnRef, Literal> target;
  bool distinct = false;

  const ColumnRef* column() const { return std::get_if<ColumnRef>(&target); }
  bool operator==(const ColumnUnit&) const = default;
};

// A column unit optionally combined arithmetically with a second one.
struct ValueUnit {
  ColumnUnit left;
  ArithOp op = ArithOp::kNone;
  ColumnUnit right;  // meaningful only when op != kNone

  bool operator==(const ValueUnit&) const = default;
};

// Select item, ORDER BY key, or predicate left-hand side.
struct Expr {
  Aggregate agg = Aggregate::kNone;
  ValueUnit value;

  bool has_aggregate() const;
  bool is_constant() const;
  bool operator==(const Expr&) const = default;
};

struct SqlQuery;
using Subquery = Box<SqlQuery>;
using LiteralList = std::vector<Literal>;
using Operand = std::variant<Literal, Expr, Subquery, LiteralList>;

struct Comparison {
  Expr lhs;
  CompareOp op = CompareOp::kEq;
  bool negated = false;  // NOT IN, NOT LIKE, NOT BETWEEN, IS NOT
  Operand rhs;
  std::optional<Operand> upper;  // BETWEEN upper bound

  bool operator==(const Comparison&) const = default;
};

struct Predicate {
  enum class Kind { kLeaf, kAnd, kOr };
  Kind kind = Kind::kLeaf;
  Comparison leaf;
  std::vector<Predicate> children;

  static Predicate make_leaf(Comparison c);
  // Top-level conjuncts: the children of an AND node, otherwise the node itself.
  std::vector<const Predicate*> conjuncts() const;
  bool operator==(const Predicate&) const = default;
};

struct TableRef {
  std::string name;  // lower-cased original name; "__subN" for derived tables
  Subquery derived;
  bool resolved = true;

  bool operator==(const TableRef&) const = default;
};

struct JoinCondition {
  ColumnRef left;
  ColumnRef right;
  bool operator==(const JoinCondition&) const = default;
};

struct FromClause {
  std::vector<TableRef> tables;
  std::vector<JoinCondition> conditions;
  bool operator==(const FromClause&) const = default;
};

struct OrderItem {
  Expr expr;
  bool descending = false;
  bool operator==(const OrderItem&) const = default;
};

struct SetOperation {
  SetOpKind kind = SetOpKind::kUnion;
  Subquery right;
  bool operator==(const SetOperation&) const = default;
};

// Canonical AST of one SELECT statement in the Spider dialect.
struct SqlQuery {
  bool distinct = false;
  std::vector<Expr> select;
  FromClause from;
  std::optional<Predicate> where;
  std::vector<ColumnRef> group_by;
  std::optional<Predicate> having;
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> limit;
  std::optional<SetOperation> set_op;

  bool operator==(const SqlQuery&) const = default;
};

struct ParseOptions {
  // Strict mode raises UnknownTable/UnknownColumn; lenient mode keeps the
  // identifier and clears its `resolved` flag.
  bool strict = true;
};

// Parses one Spider-dialect SELECT statement and returns its canonical form.
// Throws SyntaxError, UnknownTable or UnknownColumn; never returns a partial
// AST.
SqlQuery parse_sql(std::string_view text, const SchemaDb& schema, ParseOptions options = {});

// Deterministic normal form. Idempotent.
SqlQuery canonicalize(const SqlQuery& query);

struct RenderOptions {
  // Replace every erasable literal by a placeholder.
  bool erase_values = false;
};

std::string render_sql(const SqlQuery& query, RenderOptions options = {});
std::string render_expr(const Expr& expr, RenderOptions options = {});
std::string render_column(const ColumnRef& column);
std::string render_predicate(const Predicate& pred, RenderOptions options = {});
std::string render_comparison(const Comparison& cmp, RenderOptions options = {});
std::string render_operand(const Operand& operand, RenderOptions options = {});
std::string render_from(const FromClause& from, RenderOptions options = {});
std::string render_order_item(const OrderItem& item, RenderOptions options = {});

// True when any column or table reference failed to resolve.
bool has_unresolved(const SqlQuery& query);

// Subqueries nested inside predicate operands of this query block only
// (WHERE and HAVING), not inside set-operation operands.
std::vector<const SqlQuery*> predicate_subqueries(const SqlQuery& query);

// Every column referenced anywhere in this block (not descending into
// subqueries).
std::vector<ColumnRef> block_columns(const SqlQuery& query);

}  // namespace metasql
