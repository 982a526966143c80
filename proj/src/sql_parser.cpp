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

#include <cctype>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "metasql/error.hpp"
#include "metasql/sql_ast.hpp"
#include "strings.hpp"

namespace metasql {

namespace {

struct Token {
  enum class Kind { kIdent, kNumber, kString, kSymbol, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
        ++i;
      }
      out.push_back({Token::Kind::kIdent, std::string(text.substr(start, i - start)), start});
    } else if (c == '`') {
      auto end = text.find('`', i + 1);
      if (end == std::string_view::npos) throw SyntaxError(start, "`", "unterminated identifier");
      out.push_back({Token::Kind::kIdent, std::string(text.substr(i + 1, end - i - 1)), start});
      i = end + 1;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      while (i < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
        ++i;
      }
      out.push_back({Token::Kind::kNumber, std::string(text.substr(start, i - start)), start});
    } else if (c == '\'' || c == '"') {
      std::string value;
      ++i;
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == c) {
          if (i + 1 < text.size() && text[i + 1] == c) {
            value += c;
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        value += text[i++];
      }
      if (!closed) throw SyntaxError(start, std::string(1, c), "unterminated string literal");
      out.push_back({Token::Kind::kString, std::move(value), start});
    } else {
      static constexpr std::string_view kTwoChar[] = {"!=", "<>", "<=", ">="};
      std::string sym(1, c);
      for (auto two : kTwoChar) {
        if (text.substr(i, 2) == two) sym = std::string(two);
      }
      static const std::string kSingles = "(),.*=<>+-/;";
      if (sym.size() == 1 && kSingles.find(c) == std::string::npos) {
        throw SyntaxError(start, sym, "unexpected character");
      }
      i += sym.size();
      out.push_back({Token::Kind::kSymbol, std::move(sym), start});
    }
  }
  out.push_back({Token::Kind::kEnd, "", text.size()});
  return out;
}

const std::unordered_set<std::string>& reserved_words() {
  static const std::unordered_set<std::string> kWords = {
      "select", "from",  "where",  "group",   "by",        "having", "order", "limit",
      "union",  "intersect", "except", "join", "on",        "as",     "and",   "or",
      "not",    "in",    "like",   "between", "is",        "null",   "distinct", "asc",
      "desc",   "inner", "left",   "right",   "outer",     "cross",  "natural", "all",
      "exists"};
  return kWords;
}

std::optional<Aggregate> aggregate_from(std::string_view word) {
  if (detail::iequals(word, "max")) return Aggregate::kMax;
  if (detail::iequals(word, "min")) return Aggregate::kMin;
  if (detail::iequals(word, "count")) return Aggregate::kCount;
  if (detail::iequals(word, "sum")) return Aggregate::kSum;
  if (detail::iequals(word, "avg")) return Aggregate::kAvg;
  return std::nullopt;
}

// One table visible in a query block.
struct ScopeEntry {
  std::string name;   // canonical
  std::string alias;  // lower-cased alias, may be empty
  std::optional<std::size_t> schema_table;
  bool resolved = true;
  bool derived = false;
};

using Scope = std::vector<ScopeEntry>;

class Parser {
 public:
  Parser(std::string_view text, const SchemaDb& schema, ParseOptions options)
      : tokens_(tokenize(text)), schema_(schema), options_(options) {}

  SqlQuery parse() {
    SqlQuery q = parse_query();
    accept_symbol(";");
    if (peek().kind != Token::Kind::kEnd) fail("unexpected trailing input");
    return q;
  }

 private:
  // --- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(index_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (index_ < tokens_.size() - 1) ++index_;
    return t;
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(peek().pos, peek().text, message);
  }
  bool is_keyword(const Token& t, std::string_view kw) const {
    return t.kind == Token::Kind::kIdent && detail::iequals(t.text, kw);
  }
  bool accept_keyword(std::string_view kw) {
    if (is_keyword(peek(), kw)) {
      next();
      return true;
    }
    return false;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail("expected " + detail::to_upper(kw));
  }
  bool is_symbol(const Token& t, std::string_view s) const {
    return t.kind == Token::Kind::kSymbol && t.text == s;
  }
  bool accept_symbol(std::string_view s) {
    if (is_symbol(peek(), s)) {
      next();
      return true;
    }
    return false;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("expected '" + std::string(s) + "'");
  }
  bool is_plain_identifier(const Token& t) const {
    return t.kind == Token::Kind::kIdent && !reserved_words().contains(detail::to_lower(t.text));
  }

  // --- statements ----------------------------------------------------------

  SqlQuery parse_query() {
    SqlQuery q = parse_select();
    std::optional<SetOpKind> kind;
    if (accept_keyword("union")) {
      kind = SetOpKind::kUnion;
    } else if (accept_keyword("intersect")) {
      kind = SetOpKind::kIntersect;
    } else if (accept_keyword("except")) {
      kind = SetOpKind::kExcept;
    }
    if (kind) {
      accept_keyword("all");
      q.set_op = SetOperation{*kind, parse_query()};
    }
    return q;
  }

  SqlQuery parse_select() {
    expect_keyword("select");
    SqlQuery q;
    q.distinct = accept_keyword("distinct");

    // Select items are resolved once FROM is known.
    std::vector<std::string> item_aliases;
    resolve_now_ = false;
    do {
      q.select.push_back(parse_expr());
      std::string alias;
      if (accept_keyword("as")) {
        if (peek().kind != Token::Kind::kIdent) fail("expected alias");
        alias = detail::to_lower(next().text);
      } else if (is_plain_identifier(peek())) {
        alias = detail::to_lower(next().text);
      }
      item_aliases.push_back(std::move(alias));
    } while (accept_symbol(","));

    expect_keyword("from");
    Scope scope;
    std::optional<Predicate> on_conditions;
    q.from = parse_from(scope, on_conditions);

    scopes_.push_back(std::move(scope));
    resolve_now_ = true;
    for (auto& item : q.select) resolve_expr(item);

    std::vector<Predicate> where_parts;
    if (on_conditions) where_parts.push_back(std::move(*on_conditions));
    if (accept_keyword("where")) where_parts.push_back(parse_condition());
    if (where_parts.size() == 1) {
      q.where = std::move(where_parts.front());
    } else if (where_parts.size() > 1) {
      Predicate conj;
      conj.kind = Predicate::Kind::kAnd;
      conj.children = std::move(where_parts);
      q.where = std::move(conj);
    }

    if (accept_keyword("group")) {
      expect_keyword("by");
      do {
        q.group_by.push_back(parse_column_ref());
      } while (accept_symbol(","));
    }
    if (accept_keyword("having")) q.having = parse_condition();
    if (accept_keyword("order")) {
      expect_keyword("by");
      do {
        OrderItem item;
        item.expr = parse_order_expr(q, item_aliases);
        if (accept_keyword("desc")) {
          item.descending = true;
        } else {
          accept_keyword("asc");
        }
        q.order_by.push_back(std::move(item));
      } while (accept_symbol(","));
    }
    if (accept_keyword("limit")) {
      if (peek().kind != Token::Kind::kNumber) fail("expected LIMIT count");
      const Token& t = next();
      try {
        q.limit = std::stoll(t.text);
      } catch (const std::exception&) {
        throw SyntaxError(t.pos, t.text, "invalid LIMIT count");
      }
      if (*q.limit < 0) throw SyntaxError(t.pos, t.text, "negative LIMIT");
    }
    scopes_.pop_back();
    return q;
  }

  Expr parse_order_expr(const SqlQuery& q, const std::vector<std::string>& aliases) {
    const Token& t = peek();
    if (is_plain_identifier(t) && !is_symbol(peek(1), ".") && !is_symbol(peek(1), "(")) {
      const std::string lowered = detail::to_lower(t.text);
      for (std::size_t i = 0; i < aliases.size(); ++i) {
        if (!aliases[i].empty() && aliases[i] == lowered) {
          next();
          return q.select[i];
        }
      }
    }
    return parse_expr();
  }

  FromClause parse_from(Scope& scope, std::optional<Predicate>& on_conditions) {
    FromClause from;
    std::vector<Predicate> ons;
    parse_table_ref(from, scope);
    while (true) {
      if (accept_symbol(",")) {
        parse_table_ref(from, scope);
        continue;
      }
      bool join = false;
      if (accept_keyword("join")) {
        join = true;
      } else if (is_keyword(peek(), "inner") || is_keyword(peek(), "left") ||
                 is_keyword(peek(), "right") || is_keyword(peek(), "cross") ||
                 is_keyword(peek(), "natural")) {
        next();
        accept_keyword("outer");
        expect_keyword("join");
        join = true;
      }
      if (!join) break;
      parse_table_ref(from, scope);
      if (accept_keyword("on")) {
        // ON conditions are resolved against the tables seen so far.
        const bool saved = resolve_now_;
        resolve_now_ = true;
        scopes_.push_back(scope);
        ons.push_back(parse_condition());
        scopes_.pop_back();
        resolve_now_ = saved;
      }
    }
    if (ons.size() == 1) {
      on_conditions = std::move(ons.front());
    } else if (ons.size() > 1) {
      Predicate conj;
      conj.kind = Predicate::Kind::kAnd;
      conj.children = std::move(ons);
      on_conditions = std::move(conj);
    }
    return from;
  }

  void parse_table_ref(FromClause& from, Scope& scope) {
    ScopeEntry entry;
    TableRef ref;
    if (is_symbol(peek(), "(")) {
      next();
      if (!is_keyword(peek(), "select")) fail("expected subquery");
      const bool saved = resolve_now_;
      auto saved_scopes = std::move(scopes_);
      scopes_.clear();
      ref.derived = parse_query();
      scopes_ = std::move(saved_scopes);
      resolve_now_ = saved;
      expect_symbol(")");
      ref.name = "__sub" + std::to_string(from.tables.size());
      entry.derived = true;
    } else {
      if (peek().kind != Token::Kind::kIdent) fail("expected table name");
      const std::string raw = next().text;
      if (auto idx = schema_.find_table(raw)) {
        ref.name = detail::to_lower(schema_.tables()[*idx].name);
        entry.schema_table = idx;
      } else if (options_.strict) {
        throw UnknownTable(raw, schema_.db_id());
      } else {
        ref.name = detail::to_lower(raw);
        ref.resolved = false;
        entry.resolved = false;
      }
    }
    if (accept_keyword("as")) {
      if (peek().kind != Token::Kind::kIdent) fail("expected alias");
      entry.alias = detail::to_lower(next().text);
    } else if (is_plain_identifier(peek())) {
      entry.alias = detail::to_lower(next().text);
    }
    entry.name = ref.name;
    scope.push_back(std::move(entry));
    from.tables.push_back(std::move(ref));
  }

  // --- predicates ----------------------------------------------------------

  Predicate parse_condition() {
    std::vector<Predicate> parts;
    parts.push_back(parse_conjunction());
    while (accept_keyword("or")) parts.push_back(parse_conjunction());
    if (parts.size() == 1) return std::move(parts.front());
    Predicate p;
    p.kind = Predicate::Kind::kOr;
    p.children = std::move(parts);
    return p;
  }

  Predicate parse_conjunction() {
    std::vector<Predicate> parts;
    parts.push_back(parse_factor());
    while (accept_keyword("and")) parts.push_back(parse_factor());
    if (parts.size() == 1) return std::move(parts.front());
    Predicate p;
    p.kind = Predicate::Kind::kAnd;
    p.children = std::move(parts);
    return p;
  }

  Predicate parse_factor() {
    if (is_symbol(peek(), "(") && !is_keyword(peek(1), "select")) {
      next();
      Predicate inner = parse_condition();
      expect_symbol(")");
      return inner;
    }
    return Predicate::make_leaf(parse_comparison());
  }

  Comparison parse_comparison() {
    Comparison c;
    c.lhs = parse_expr();
    if (accept_keyword("is")) {
      c.op = CompareOp::kIs;
      c.negated = accept_keyword("not");
      expect_keyword("null");
      c.rhs = Literal{Literal::Kind::kNull, "NULL", false};
      return c;
    }
    const bool negated = accept_keyword("not");
    if (accept_keyword("between")) {
      c.op = CompareOp::kBetween;
      c.negated = negated;
      c.rhs = parse_operand();
      expect_keyword("and");
      c.upper = parse_operand();
      return c;
    }
    if (accept_keyword("in")) {
      c.op = CompareOp::kIn;
      c.negated = negated;
      expect_symbol("(");
      if (is_keyword(peek(), "select")) {
        c.rhs = Subquery(parse_query());
      } else {
        LiteralList list;
        do {
          list.push_back(parse_literal());
        } while (accept_symbol(","));
        c.rhs = std::move(list);
      }
      expect_symbol(")");
      return c;
    }
    if (accept_keyword("like")) {
      c.op = CompareOp::kLike;
      c.negated = negated;
      c.rhs = parse_operand();
      return c;
    }
    if (negated) fail("expected IN, LIKE or BETWEEN after NOT");
    const Token& t = peek();
    if (t.kind != Token::Kind::kSymbol) fail("expected comparison operator");
    if (t.text == "=") {
      c.op = CompareOp::kEq;
    } else if (t.text == "!=" || t.text == "<>") {
      c.op = CompareOp::kNe;
    } else if (t.text == "<") {
      c.op = CompareOp::kLt;
    } else if (t.text == ">") {
      c.op = CompareOp::kGt;
    } else if (t.text == "<=") {
      c.op = CompareOp::kLe;
    } else if (t.text == ">=") {
      c.op = CompareOp::kGe;
    } else {
      fail("expected comparison operator");
    }
    next();
    c.rhs = parse_operand();
    return c;
  }

  bool at_literal() const {
    const Token& t = peek();
    return t.kind == Token::Kind::kNumber || t.kind == Token::Kind::kString ||
           is_keyword(t, "null") ||
           (is_symbol(t, "-") && peek(1).kind == Token::Kind::kNumber);
  }

  Literal parse_literal() {
    const Token& t = peek();
    if (t.kind == Token::Kind::kNumber) return Literal{Literal::Kind::kNumber, next().text, true};
    if (t.kind == Token::Kind::kString) return Literal{Literal::Kind::kString, next().text, true};
    if (is_keyword(t, "null")) {
      next();
      return Literal{Literal::Kind::kNull, "NULL", false};
    }
    if (is_symbol(t, "-") && peek(1).kind == Token::Kind::kNumber) {
      next();
      return Literal{Literal::Kind::kNumber, "-" + next().text, true};
    }
    fail("expected literal");
  }

  Operand parse_operand() {
    if (is_symbol(peek(), "(") && is_keyword(peek(1), "select")) {
      next();
      Subquery sub(parse_query());
      expect_symbol(")");
      return sub;
    }
    if (at_literal()) {
      // A literal followed by arithmetic is an expression, not a value.
      const bool arith_follows = [&] {
        std::size_t k = is_symbol(peek(), "-") ? 2 : 1;
        const Token& after = peek(k);
        return is_symbol(after, "+") || is_symbol(after, "-") || is_symbol(after, "*") ||
               is_symbol(after, "/");
      }();
      if (!arith_follows) return parse_literal();
    }
    return parse_expr();
  }

  // --- expressions ---------------------------------------------------------

  std::optional<ArithOp> accept_arith() {
    if (accept_symbol("+")) return ArithOp::kAdd;
    if (accept_symbol("-")) return ArithOp::kSub;
    if (accept_symbol("*")) return ArithOp::kMul;
    if (accept_symbol("/")) return ArithOp::kDiv;
    return std::nullopt;
  }

  Expr parse_expr() {
    Expr e;
    const Token& t = peek();
    if (t.kind == Token::Kind::kIdent && is_symbol(peek(1), "(")) {
      auto agg = aggregate_from(t.text);
      if (!agg) fail("unsupported function");
      next();
      next();
      const bool distinct = accept_keyword("distinct");
      ColumnUnit first = parse_column_unit();
      first.distinct = first.distinct || distinct;
      if (auto op = accept_arith()) {
        ColumnUnit second = parse_column_unit();
        expect_symbol(")");
        e.agg = *agg;
        e.value = ValueUnit{std::move(first), *op, std::move(second)};
        if (accept_arith()) fail("unsupported arithmetic nesting");
        return e;
      }
      expect_symbol(")");
      if (first.agg != Aggregate::kNone) fail("nested aggregate");
      if (auto op = accept_arith()) {
        first.agg = *agg;
        e.value = ValueUnit{std::move(first), *op, parse_column_unit()};
        return e;
      }
      e.agg = *agg;
      e.value.left = std::move(first);
      return e;
    }
    e.value.left = parse_column_unit();
    if (auto op = accept_arith()) {
      e.value.op = *op;
      e.value.right = parse_column_unit();
    }
    return e;
  }

  ColumnUnit parse_column_unit() {
    ColumnUnit u;
    const Token& t = peek();
    if (t.kind == Token::Kind::kIdent && is_symbol(peek(1), "(")) {
      auto agg = aggregate_from(t.text);
      if (!agg) fail("unsupported function");
      next();
      next();
      u.agg = *agg;
      u.distinct = accept_keyword("distinct");
      u.target = parse_atom();
      expect_symbol(")");
      return u;
    }
    u.target = parse_atom();
    return u;
  }

  std::variant<ColumnRef, Literal> parse_atom() {
    if (accept_symbol("*")) return ColumnRef{"", "*", true};
    if (at_literal()) return parse_literal();
    return parse_column_ref();
  }

  ColumnRef parse_column_ref() {
    const Token& t = peek();
    if (t.kind != Token::Kind::kIdent) fail("expected column");
    ColumnRef raw{"", next().text, false};
    if (accept_symbol(".")) {
      raw.table = raw.column;
      if (accept_symbol("*")) {
        raw.column = "*";
      } else {
        if (peek().kind != Token::Kind::kIdent) fail("expected column after '.'");
        raw.column = next().text;
      }
    }
    if (resolve_now_) return resolve(raw);
    return raw;
  }

  // --- resolution ----------------------------------------------------------

  void resolve_expr(Expr& e) {
    auto fix = [&](ColumnUnit& u) {
      if (auto* c = std::get_if<ColumnRef>(&u.target)) *c = resolve(*c);
    };
    fix(e.value.left);
    if (e.value.op != ArithOp::kNone) fix(e.value.right);
  }

  ColumnRef unresolved(const ColumnRef& raw, std::string table) const {
    const std::string display = raw.table.empty() ? raw.column : raw.table + "." + raw.column;
    if (options_.strict) throw UnknownColumn(display, schema_.db_id());
    return ColumnRef{std::move(table), detail::to_lower(raw.column), false};
  }

  ColumnRef bind(const ScopeEntry& entry, const ColumnRef& raw) const {
    if (raw.column == "*") return ColumnRef{entry.name, "*", entry.resolved};
    if (entry.derived) return ColumnRef{entry.name, detail::to_lower(raw.column), true};
    if (!entry.resolved) return ColumnRef{entry.name, detail::to_lower(raw.column), false};
    if (auto col = schema_.find_column(*entry.schema_table, raw.column)) {
      return ColumnRef{entry.name, detail::to_lower(schema_.columns()[*col].name), true};
    }
    return unresolved(raw, entry.name);
  }

  ColumnRef resolve(const ColumnRef& raw) const {
    if (raw.resolved) return raw;
    if (raw.table.empty() && raw.column == "*") return ColumnRef{"", "*", true};
    if (!raw.table.empty()) {
      const std::string q = detail::to_lower(raw.table);
      for (auto s = scopes_.rbegin(); s != scopes_.rend(); ++s) {
        for (const auto& entry : *s) {
          if (entry.alias == q || (entry.alias.empty() && entry.name == q)) return bind(entry, raw);
        }
        for (const auto& entry : *s) {
          if (entry.name == q) return bind(entry, raw);
        }
      }
      return unresolved(raw, q);
    }
    for (auto s = scopes_.rbegin(); s != scopes_.rend(); ++s) {
      for (const auto& entry : *s) {
        if (entry.schema_table && schema_.find_column(*entry.schema_table, raw.column)) {
          return bind(entry, raw);
        }
      }
      // Derived tables expose unknown column sets; accept the first one.
      for (const auto& entry : *s) {
        if (entry.derived) return bind(entry, raw);
      }
    }
    return unresolved(raw, "");
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
  const SchemaDb& schema_;
  ParseOptions options_;
  std::vector<Scope> scopes_;
  bool resolve_now_ = true;
};

}  // namespace

SqlQuery parse_sql(std::string_view text, const SchemaDb& schema, ParseOptions options) {
  Parser parser(text, schema, options);
  return canonicalize(parser.parse());
}

}  // namespace metasql
