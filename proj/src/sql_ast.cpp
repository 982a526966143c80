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

#include "metasql/sql_ast.hpp"

#include <algorithm>
#include <utility>

#include "strings.hpp"

namespace metasql {

std::string_view to_string(Aggregate agg) {
  switch (agg) {
    case Aggregate::kNone: return "";
    case Aggregate::kMax: return "max";
    case Aggregate::kMin: return "min";
    case Aggregate::kCount: return "count";
    case Aggregate::kSum: return "sum";
    case Aggregate::kAvg: return "avg";
  }
  return "";
}

std::string_view to_string(SetOpKind kind) {
  switch (kind) {
    case SetOpKind::kUnion: return "UNION";
    case SetOpKind::kIntersect: return "INTERSECT";
    case SetOpKind::kExcept: return "EXCEPT";
  }
  return "";
}

bool Expr::has_aggregate() const {
  return agg != Aggregate::kNone || value.left.agg != Aggregate::kNone ||
         (value.op != ArithOp::kNone && value.right.agg != Aggregate::kNone);
}

bool Expr::is_constant() const {
  const bool left_const = std::holds_alternative<Literal>(value.left.target);
  if (value.op == ArithOp::kNone) return left_const;
  return left_const && std::holds_alternative<Literal>(value.right.target);
}

Predicate Predicate::make_leaf(Comparison c) {
  Predicate p;
  p.kind = Kind::kLeaf;
  p.leaf = std::move(c);
  return p;
}

std::vector<const Predicate*> Predicate::conjuncts() const {
  std::vector<const Predicate*> out;
  if (kind == Kind::kAnd) {
    for (const auto& c : children) out.push_back(&c);
  } else {
    out.push_back(this);
  }
  return out;
}

// --- rendering -------------------------------------------------------------

namespace {

std::string render_literal(const Literal& lit, const RenderOptions& options) {
  if (options.erase_values && lit.value_erasable) return "'value'";
  switch (lit.kind) {
    case Literal::Kind::kNumber: return lit.text;
    case Literal::Kind::kNull: return "NULL";
    case Literal::Kind::kString: {
      std::string out = "'";
      for (char c : lit.text) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
  }
  return lit.text;
}

std::string render_target(const std::variant<ColumnRef, Literal>& target,
                          const RenderOptions& options) {
  if (const auto* c = std::get_if<ColumnRef>(&target)) return render_column(*c);
  return render_literal(std::get<Literal>(target), options);
}

std::string render_unit(const ColumnUnit& u, const RenderOptions& options) {
  std::string inner = (u.distinct ? "DISTINCT " : "") + render_target(u.target, options);
  if (u.agg == Aggregate::kNone) return inner;
  return std::string(to_string(u.agg)) + "(" + inner + ")";
}

std::string_view arith_symbol(ArithOp op) {
  switch (op) {
    case ArithOp::kAdd: return " + ";
    case ArithOp::kSub: return " - ";
    case ArithOp::kMul: return " * ";
    case ArithOp::kDiv: return " / ";
    case ArithOp::kNone: return "";
  }
  return "";
}

std::string render_value(const ValueUnit& v, const RenderOptions& options) {
  std::string out = render_unit(v.left, options);
  if (v.op != ArithOp::kNone) {
    out += arith_symbol(v.op);
    out += render_unit(v.right, options);
  }
  return out;
}

std::string_view compare_symbol(CompareOp op, bool negated) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    case CompareOp::kLt: return "<";
    case CompareOp::kGt: return ">";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGe: return ">=";
    case CompareOp::kBetween: return negated ? "NOT BETWEEN" : "BETWEEN";
    case CompareOp::kIn: return negated ? "NOT IN" : "IN";
    case CompareOp::kLike: return negated ? "NOT LIKE" : "LIKE";
    case CompareOp::kIs: return negated ? "IS NOT" : "IS";
  }
  return "=";
}

}  // namespace

std::string render_column(const ColumnRef& column) {
  return column.table.empty() ? column.column : column.table + "." + column.column;
}

std::string render_expr(const Expr& expr, RenderOptions options) {
  std::string v = render_value(expr.value, options);
  if (expr.agg == Aggregate::kNone) return v;
  return std::string(to_string(expr.agg)) + "(" + v + ")";
}

std::string render_operand(const Operand& operand, RenderOptions options) {
  struct Visitor {
    const RenderOptions& options;
    std::string operator()(const Literal& l) const { return render_literal(l, options); }
    std::string operator()(const Expr& e) const { return render_expr(e, options); }
    std::string operator()(const Subquery& s) const {
      return "(" + render_sql(*s, options) + ")";
    }
    std::string operator()(const LiteralList& list) const {
      std::vector<std::string> parts;
      for (const auto& l : list) parts.push_back(render_literal(l, options));
      return "(" + detail::join(parts, ", ") + ")";
    }
  };
  return std::visit(Visitor{options}, operand);
}

std::string render_comparison(const Comparison& cmp, RenderOptions options) {
  std::string out = render_expr(cmp.lhs, options);
  out += " ";
  out += compare_symbol(cmp.op, cmp.negated);
  out += " ";
  out += render_operand(cmp.rhs, options);
  if (cmp.upper) out += " AND " + render_operand(*cmp.upper, options);
  return out;
}

std::string render_predicate(const Predicate& pred, RenderOptions options) {
  if (pred.kind == Predicate::Kind::kLeaf) return render_comparison(pred.leaf, options);
  std::vector<std::string> parts;
  for (const auto& c : pred.children) {
    std::string s = render_predicate(c, options);
    if (c.kind != Predicate::Kind::kLeaf) s = "(" + s + ")";
    parts.push_back(std::move(s));
  }
  return detail::join(parts, pred.kind == Predicate::Kind::kAnd ? " AND " : " OR ");
}

std::string render_from(const FromClause& from, RenderOptions options) {
  std::vector<std::string> tables;
  for (const auto& t : from.tables) {
    if (t.derived) {
      tables.push_back("(" + render_sql(*t.derived, options) + ") AS " + t.name);
    } else {
      tables.push_back(t.name);
    }
  }
  std::string out = detail::join(tables, " JOIN ");
  if (!from.conditions.empty()) {
    std::vector<std::string> conds;
    for (const auto& c : from.conditions) {
      conds.push_back(render_column(c.left) + " = " + render_column(c.right));
    }
    out += " ON " + detail::join(conds, " AND ");
  }
  return out;
}

std::string render_order_item(const OrderItem& item, RenderOptions options) {
  return render_expr(item.expr, options) + (item.descending ? " DESC" : " ASC");
}

std::string render_sql(const SqlQuery& q, RenderOptions options) {
  std::string out = "SELECT ";
  if (q.distinct) out += "DISTINCT ";
  std::vector<std::string> items;
  for (const auto& e : q.select) items.push_back(render_expr(e, options));
  out += detail::join(items, ", ");
  out += " FROM " + render_from(q.from, options);
  if (q.where) out += " WHERE " + render_predicate(*q.where, options);
  if (!q.group_by.empty()) {
    std::vector<std::string> cols;
    for (const auto& c : q.group_by) cols.push_back(render_column(c));
    out += " GROUP BY " + detail::join(cols, ", ");
  }
  if (q.having) out += " HAVING " + render_predicate(*q.having, options);
  if (!q.order_by.empty()) {
    std::vector<std::string> keys;
    for (const auto& o : q.order_by) keys.push_back(render_order_item(o, options));
    out += " ORDER BY " + detail::join(keys, ", ");
  }
  if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
  if (q.set_op) {
    out += " ";
    out += to_string(q.set_op->kind);
    out += " " + render_sql(*q.set_op->right, options);
  }
  return out;
}

// --- canonicalization ------------------------------------------------------

namespace {

bool is_plain_column(const Expr& e) {
  return e.agg == Aggregate::kNone && e.value.op == ArithOp::kNone &&
         e.value.left.agg == Aggregate::kNone && !e.value.left.distinct &&
         e.value.left.column() != nullptr && !e.value.left.column()->is_star();
}

CompareOp mirror(CompareOp op) {
  switch (op) {
    case CompareOp::kLt: return CompareOp::kGt;
    case CompareOp::kGt: return CompareOp::kLt;
    case CompareOp::kLe: return CompareOp::kGe;
    case CompareOp::kGe: return CompareOp::kLe;
    default: return op;
  }
}

bool is_binary_comparison(CompareOp op) {
  return op == CompareOp::kEq || op == CompareOp::kNe || op == CompareOp::kLt ||
         op == CompareOp::kGt || op == CompareOp::kLe || op == CompareOp::kGe;
}

Operand canonical_operand(const Operand& operand);

Comparison canonical_comparison(Comparison c) {
  c.rhs = canonical_operand(c.rhs);
  if (c.upper) c.upper = canonical_operand(*c.upper);
  if (!is_binary_comparison(c.op) || c.negated) return c;
  const Expr* rhs_expr = std::get_if<Expr>(&c.rhs);
  if (!rhs_expr || rhs_expr->is_constant()) return c;
  bool swap = false;
  if (c.lhs.is_constant()) {
    swap = true;
  } else if (render_expr(*rhs_expr) < render_expr(c.lhs)) {
    swap = true;
  }
  if (!swap) return c;
  Expr new_lhs = *rhs_expr;
  Operand new_rhs;
  if (c.lhs.is_constant() && c.lhs.value.op == ArithOp::kNone &&
      c.lhs.agg == Aggregate::kNone && c.lhs.value.left.agg == Aggregate::kNone) {
    new_rhs = std::get<Literal>(c.lhs.value.left.target);
  } else {
    new_rhs = c.lhs;
  }
  c.lhs = std::move(new_lhs);
  c.rhs = std::move(new_rhs);
  c.op = mirror(c.op);
  return c;
}

Predicate canonical_predicate(const Predicate& p) {
  if (p.kind == Predicate::Kind::kLeaf) return Predicate::make_leaf(canonical_comparison(p.leaf));
  Predicate out;
  out.kind = p.kind;
  for (const auto& child : p.children) {
    Predicate c = canonical_predicate(child);
    if (c.kind == p.kind) {
      for (auto& gc : c.children) out.children.push_back(std::move(gc));
    } else {
      out.children.push_back(std::move(c));
    }
  }
  if (out.children.size() == 1) return std::move(out.children.front());
  std::stable_sort(out.children.begin(), out.children.end(),
                   [](const Predicate& a, const Predicate& b) {
                     return render_predicate(a) < render_predicate(b);
                   });
  return out;
}

Operand canonical_operand(const Operand& operand) {
  if (const auto* sub = std::get_if<Subquery>(&operand)) return Subquery(canonicalize(**sub));
  return operand;
}

std::optional<Predicate> rebuild_conjunction(std::vector<Predicate> parts) {
  if (parts.empty()) return std::nullopt;
  if (parts.size() == 1) return std::move(parts.front());
  Predicate p;
  p.kind = Predicate::Kind::kAnd;
  p.children = std::move(parts);
  return p;
}

// Moves column-to-column equalities between two FROM tables out of WHERE and
// into the join conditions, so comma joins and JOIN ... ON compare equal.
void extract_join_conditions(SqlQuery& q) {
  if (!q.where || q.from.tables.size() < 2) return;
  auto in_from = [&](const std::string& table) {
    return std::any_of(q.from.tables.begin(), q.from.tables.end(),
                       [&](const TableRef& t) { return t.name == table; });
  };
  std::vector<Predicate> keep;
  for (const Predicate* conj : q.where->conjuncts()) {
    if (conj->kind == Predicate::Kind::kLeaf) {
      const Comparison& c = conj->leaf;
      const Expr* rhs = std::get_if<Expr>(&c.rhs);
      if (c.op == CompareOp::kEq && !c.negated && rhs && is_plain_column(c.lhs) &&
          is_plain_column(*rhs)) {
        const ColumnRef& l = *c.lhs.value.left.column();
        const ColumnRef& r = *rhs->value.left.column();
        if (l.table != r.table && in_from(l.table) && in_from(r.table)) {
          q.from.conditions.push_back(JoinCondition{l, r});
          continue;
        }
      }
    }
    keep.push_back(*conj);
  }
  q.where = rebuild_conjunction(std::move(keep));
}

}  // namespace

SqlQuery canonicalize(const SqlQuery& query) {
  SqlQuery q = query;
  for (auto& t : q.from.tables) {
    if (t.derived) t.derived = Subquery(canonicalize(*t.derived));
  }
  if (q.where) q.where = canonical_predicate(*q.where);
  extract_join_conditions(q);
  if (q.where) q.where = canonical_predicate(*q.where);
  if (q.having) q.having = canonical_predicate(*q.having);
  if (q.set_op) q.set_op->right = Subquery(canonicalize(*q.set_op->right));

  for (auto& jc : q.from.conditions) {
    if (render_column(jc.right) < render_column(jc.left)) std::swap(jc.left, jc.right);
  }
  auto jc_key = [](const JoinCondition& c) {
    return render_column(c.left) + "=" + render_column(c.right);
  };
  std::sort(q.from.conditions.begin(), q.from.conditions.end(),
            [&](const JoinCondition& a, const JoinCondition& b) { return jc_key(a) < jc_key(b); });
  q.from.conditions.erase(std::unique(q.from.conditions.begin(), q.from.conditions.end()),
                          q.from.conditions.end());

  auto table_key = [](const TableRef& t) {
    return t.derived ? "(" + render_sql(*t.derived) + ")" : t.name;
  };
  std::stable_sort(q.from.tables.begin(), q.from.tables.end(),
                   [&](const TableRef& a, const TableRef& b) { return table_key(a) < table_key(b); });
  std::stable_sort(q.select.begin(), q.select.end(), [](const Expr& a, const Expr& b) {
    return render_expr(a) < render_expr(b);
  });
  std::stable_sort(q.group_by.begin(), q.group_by.end(), [](const ColumnRef& a, const ColumnRef& b) {
    return render_column(a) < render_column(b);
  });
  return q;
}

// --- traversal helpers -----------------------------------------------------

namespace {

template <class Fn>
void for_each_leaf(const Predicate& p, Fn&& fn) {
  if (p.kind == Predicate::Kind::kLeaf) {
    fn(p.leaf);
    return;
  }
  for (const auto& c : p.children) for_each_leaf(c, fn);
}

template <class Fn>
void for_each_operand(const Comparison& c, Fn&& fn) {
  fn(c.rhs);
  if (c.upper) fn(*c.upper);
}

void collect_expr_columns(const Expr& e, std::vector<ColumnRef>& out) {
  if (const auto* c = e.value.left.column()) out.push_back(*c);
  if (e.value.op != ArithOp::kNone) {
    if (const auto* c = e.value.right.column()) out.push_back(*c);
  }
}

}  // namespace

std::vector<const SqlQuery*> predicate_subqueries(const SqlQuery& query) {
  std::vector<const SqlQuery*> out;
  auto visit = [&](const Comparison& c) {
    for_each_operand(c, [&](const Operand& o) {
      if (const auto* s = std::get_if<Subquery>(&o)) out.push_back(&**s);
    });
  };
  if (query.where) for_each_leaf(*query.where, visit);
  if (query.having) for_each_leaf(*query.having, visit);
  return out;
}

std::vector<ColumnRef> block_columns(const SqlQuery& q) {
  std::vector<ColumnRef> out;
  for (const auto& e : q.select) collect_expr_columns(e, out);
  for (const auto& jc : q.from.conditions) {
    out.push_back(jc.left);
    out.push_back(jc.right);
  }
  auto visit = [&](const Comparison& c) {
    collect_expr_columns(c.lhs, out);
    for_each_operand(c, [&](const Operand& o) {
      if (const auto* e = std::get_if<Expr>(&o)) collect_expr_columns(*e, out);
    });
  };
  if (q.where) for_each_leaf(*q.where, visit);
  if (q.having) for_each_leaf(*q.having, visit);
  for (const auto& g : q.group_by) out.push_back(g);
  for (const auto& o : q.order_by) collect_expr_columns(o.expr, out);
  return out;
}

bool has_unresolved(const SqlQuery& q) {
  for (const auto& c : block_columns(q)) {
    if (!c.resolved) return true;
  }
  for (const auto& t : q.from.tables) {
    if (!t.resolved) return true;
    if (t.derived && has_unresolved(*t.derived)) return true;
  }
  for (const auto* sub : predicate_subqueries(q)) {
    if (has_unresolved(*sub)) return true;
  }
  return q.set_op && has_unresolved(*q.set_op->right);
}

}  // namespace metasql
