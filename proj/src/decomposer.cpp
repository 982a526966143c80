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

#include "metasql/decomposer.hpp"

#include <fstream>

#include "metasql/error.hpp"
#include "strings.hpp"

namespace metasql {

std::string_view unit_type_name(UnitType type) {
  switch (type) {
    case UnitType::kProjection: return "Projection";
    case UnitType::kJoin: return "Join";
    case UnitType::kPredicate: return "Predicate";
    case UnitType::kGroup: return "Group";
    case UnitType::kSort: return "Sort";
  }
  return "Projection";
}

namespace {

std::optional<UnitType> unit_type_from_name(std::string_view name) {
  for (auto t : {UnitType::kProjection, UnitType::kJoin, UnitType::kPredicate, UnitType::kGroup,
                 UnitType::kSort}) {
    if (detail::iequals(unit_type_name(t), name)) return t;
  }
  return std::nullopt;
}

TemplateCatalog make_builtin() {
  TemplateCatalog c;
  c.set(UnitType::kProjection, "plain", "Find the {columns}.");
  c.set(UnitType::kJoin, "single", "{Entity}");
  c.set(UnitType::kJoin, "multi", "The {entity} with {others}.");
  c.set(UnitType::kPredicate, "clause", "The {entity} {qualifier}.");
  c.set(UnitType::kPredicate, "named", "named {value}");
  c.set(UnitType::kPredicate, "equality", "whose {column} is {value}");
  c.set(UnitType::kPredicate, "inequality", "whose {column} is not {value}");
  c.set(UnitType::kPredicate, "comparison", "whose {column} is {relation} {value}");
  c.set(UnitType::kPredicate, "membership", "whose {column} {relation} {value}");
  c.set(UnitType::kPredicate, "aggregate", "with {column} {relation} {value}");
  c.set(UnitType::kPredicate, "set_arm", "{operator}(Find the {columns} of) the {entity}{qualifiers}");
  c.set(UnitType::kGroup, "plain", "For each {columns}.");
  c.set(UnitType::kSort, "superlative", "The {extreme} {column}.");
  c.set(UnitType::kSort, "ordered", "Sorted by {columns} in {direction} order.");
  c.set(UnitType::kSort, "limit", "The first {count} results.");
  return c;
}

std::string fill(const std::string& tmpl, const std::map<std::string, std::string>& slots) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close == std::string::npos) throw TemplateGap("unterminated slot in template: " + tmpl);
      const std::string name = tmpl.substr(i + 1, close - i - 1);
      auto it = slots.find(name);
      if (it == slots.end()) throw TemplateGap("template slot {" + name + "} has no filler");
      out += it->second;
      i = close + 1;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

// "a", "a and b", "a, b and c"
std::string enumerate(const std::vector<std::string>& items) {
  if (items.size() <= 1) return items.empty() ? "" : items.front();
  std::vector<std::string> head(items.begin(), items.end() - 1);
  return detail::join(head, ", ") + " and " + items.back();
}

std::string_view aggregate_words(Aggregate agg) {
  switch (agg) {
    case Aggregate::kCount: return "number of";
    case Aggregate::kMax: return "maximum";
    case Aggregate::kMin: return "minimum";
    case Aggregate::kSum: return "total";
    case Aggregate::kAvg: return "average";
    case Aggregate::kNone: break;
  }
  return "";
}

std::string_view arith_words(ArithOp op) {
  switch (op) {
    case ArithOp::kAdd: return "plus";
    case ArithOp::kSub: return "minus";
    case ArithOp::kMul: return "times";
    case ArithOp::kDiv: return "divided by";
    case ArithOp::kNone: break;
  }
  return "";
}

class Renderer {
 public:
  Renderer(const SchemaDb& schema, const TemplateCatalog& catalog)
      : schema_(schema), catalog_(catalog) {}

  std::string projection(const SqlQuery& f) const {
    std::vector<std::string> cols;
    for (const auto& e : f.select) cols.push_back(expr_phrase(e, f, true));
    std::string columns = enumerate(cols);
    if (f.distinct) columns = "distinct " + columns;
    return fill(catalog_.get(UnitType::kProjection, "plain"), {{"columns", columns}});
  }

  std::string join(const SqlQuery& f) const {
    std::vector<std::string> names;
    for (const auto& t : f.from.tables) names.push_back(entity(t.name));
    if (names.empty()) throw TemplateGap("FROM clause without tables");
    if (names.size() == 1) {
      return fill(catalog_.get(UnitType::kJoin, "single"),
                  {{"Entity", capitalize(names[0])}, {"entity", names[0]}});
    }
    std::vector<std::string> others(names.begin() + 1, names.end());
    return fill(catalog_.get(UnitType::kJoin, "multi"),
                {{"entity", names[0]}, {"others", enumerate(others)}});
  }

  std::string predicate(const SqlQuery& f) const {
    if (f.set_op) return set_arm(f.set_op->kind, *f.set_op->right, true);
    const Predicate* p = f.where ? &*f.where : f.having ? &*f.having : nullptr;
    if (p == nullptr) throw TemplateGap("predicate unit without a condition");
    return fill(catalog_.get(UnitType::kPredicate, "clause"),
                {{"entity", predicate_entity(*p, f)}, {"qualifier", qualifier(*p, f, 0)}});
  }

  std::string group(const SqlQuery& f) const {
    std::vector<std::string> cols;
    for (const auto& c : f.group_by) cols.push_back(column_phrase(c, f, true));
    return fill(catalog_.get(UnitType::kGroup, "plain"), {{"columns", enumerate(cols)}});
  }

  std::string sort(const SqlQuery& f) const {
    if (f.order_by.size() == 1 && f.limit && *f.limit == 1) {
      const auto& item = f.order_by.front();
      return fill(catalog_.get(UnitType::kSort, "superlative"),
                  {{"extreme", item.descending ? "highest" : "lowest"},
                   {"column", expr_phrase(item.expr, f, false)}});
    }
    std::vector<std::string> parts;
    if (!f.order_by.empty()) {
      std::vector<std::string> cols;
      for (const auto& item : f.order_by) cols.push_back(expr_phrase(item.expr, f, false));
      parts.push_back(fill(
          catalog_.get(UnitType::kSort, "ordered"),
          {{"columns", enumerate(cols)},
           {"direction", f.order_by.front().descending ? "descending" : "ascending"}}));
    }
    if (f.limit) {
      parts.push_back(
          fill(catalog_.get(UnitType::kSort, "limit"), {{"count", std::to_string(*f.limit)}}));
    }
    if (parts.empty()) throw TemplateGap("sort unit without ORDER BY or LIMIT");
    return detail::join(parts, " ");
  }

 private:
  std::string entity(const std::string& table) const {
    if (table.starts_with("__sub")) throw TemplateGap("derived table in FROM");
    return schema_.table_natural_name(table);
  }

  std::string default_table(const SqlQuery& f) const {
    if (f.from.tables.empty()) throw TemplateGap("no table to name");
    return f.from.tables.front().name;
  }

  std::string column_phrase(const ColumnRef& c, const SqlQuery& f, bool prefixed) const {
    const std::string table = c.table.empty() ? default_table(f) : c.table;
    if (c.is_star()) return entity(table) + " records";
    const std::string col = schema_.column_natural_name(table, c.column);
    if (!prefixed) return col;
    const std::string ent = entity(table);
    if (detail::starts_with_icase(col, ent)) return col;
    return ent + " " + col;
  }

  std::string unit_phrase(const ColumnUnit& u, Aggregate outer, const SqlQuery& f,
                          bool prefixed) const {
    const Aggregate agg = u.agg != Aggregate::kNone ? u.agg : outer;
    std::string base;
    if (const auto* c = u.column()) {
      if (c->is_star() && agg == Aggregate::kCount) {
        return "number of " + entity(c->table.empty() ? default_table(f) : c->table);
      }
      base = column_phrase(*c, f, prefixed);
    } else {
      base = std::get<Literal>(u.target).text;
    }
    if (u.distinct) base = "distinct " + base;
    if (agg == Aggregate::kNone) return base;
    return std::string(aggregate_words(agg)) + " " + base;
  }

  std::string expr_phrase(const Expr& e, const SqlQuery& f, bool prefixed) const {
    if (e.value.op == ArithOp::kNone) return unit_phrase(e.value.left, e.agg, f, prefixed);
    std::string inner = unit_phrase(e.value.left, Aggregate::kNone, f, prefixed) + " " +
                        std::string(arith_words(e.value.op)) + " " +
                        unit_phrase(e.value.right, Aggregate::kNone, f, prefixed);
    if (e.agg == Aggregate::kNone) return inner;
    return std::string(aggregate_words(e.agg)) + " " + inner;
  }

  std::string predicate_entity(const Predicate& p, const SqlQuery& f) const {
    const Predicate* leaf = &p;
    while (leaf->kind != Predicate::Kind::kLeaf && !leaf->children.empty()) {
      leaf = &leaf->children.front();
    }
    const auto* c = leaf->leaf.lhs.value.left.column();
    if (c && !c->table.empty() && !c->is_star()) return entity(c->table);
    return entity(default_table(f));
  }

  std::string value_phrase(const Operand& o, const SqlQuery& f, int depth, bool like) const {
    if (const auto* lit = std::get_if<Literal>(&o)) {
      if (lit->kind == Literal::Kind::kNull) return "null";
      std::string text = lit->text;
      if (like) {
        std::erase(text, '%');
      }
      return text;
    }
    if (const auto* list = std::get_if<LiteralList>(&o)) {
      std::vector<std::string> items;
      for (const auto& l : *list) items.push_back(l.text);
      return enumerate(items);
    }
    if (const auto* e = std::get_if<Expr>(&o)) return "the " + expr_phrase(*e, f, true);
    const auto& sub = std::get<Subquery>(o);
    if (depth >= 1) throw TemplateGap("predicate nested deeper than one level");
    if (sub->set_op) throw TemplateGap("set operation inside a nested predicate");
    return "the result of " + arm_description(*sub, depth + 1);
  }

  std::string qualifier(const Predicate& p, const SqlQuery& f, int depth) const {
    if (p.kind != Predicate::Kind::kLeaf) {
      std::vector<std::string> parts;
      for (const auto& child : p.children) parts.push_back(qualifier(child, f, depth));
      return detail::join(parts, p.kind == Predicate::Kind::kAnd ? " and " : " or ");
    }
    const Comparison& c = p.leaf;
    const bool like = c.op == CompareOp::kLike;
    std::string value = value_phrase(c.rhs, f, depth, like);
    if (c.upper) value += " and " + value_phrase(*c.upper, f, depth, false);

    if (c.lhs.has_aggregate()) {
      return fill(catalog_.get(UnitType::kPredicate, "aggregate"),
                  {{"column", expr_phrase(c.lhs, f, false)},
                   {"relation", relation_words(c)},
                   {"value", value}});
    }
    const std::string column = expr_phrase(c.lhs, f, false);
    switch (c.op) {
      case CompareOp::kEq:
        if (std::holds_alternative<Literal>(c.rhs) && detail::iequals(column, "name")) {
          return fill(catalog_.get(UnitType::kPredicate, "named"), {{"value", value}});
        }
        return fill(catalog_.get(UnitType::kPredicate, "equality"),
                    {{"column", column}, {"value", value}});
      case CompareOp::kNe:
        return fill(catalog_.get(UnitType::kPredicate, "inequality"),
                    {{"column", column}, {"value", value}});
      case CompareOp::kLt:
      case CompareOp::kGt:
      case CompareOp::kLe:
      case CompareOp::kGe:
        return fill(catalog_.get(UnitType::kPredicate, "comparison"),
                    {{"column", column}, {"relation", relation_words(c)}, {"value", value}});
      default:
        return fill(catalog_.get(UnitType::kPredicate, "membership"),
                    {{"column", column}, {"relation", membership_words(c)}, {"value", value}});
    }
  }

  static std::string relation_words(const Comparison& c) {
    switch (c.op) {
      case CompareOp::kEq: return "equal to";
      case CompareOp::kNe: return "not equal to";
      case CompareOp::kLt: return "less than";
      case CompareOp::kGt: return "greater than";
      case CompareOp::kLe: return "at most";
      case CompareOp::kGe: return "at least";
      default: return membership_words(c);
    }
  }

  static std::string membership_words(const Comparison& c) {
    switch (c.op) {
      case CompareOp::kIn: return c.negated ? "is not in" : "is in";
      case CompareOp::kLike: return c.negated ? "does not contain" : "contains";
      case CompareOp::kBetween: return c.negated ? "is not between" : "is between";
      case CompareOp::kIs: return c.negated ? "is not" : "is";
      default: return "is";
    }
  }

  // "(Find the <columns> of) the <entity> <qualifiers>"
  std::string arm_description(const SqlQuery& arm, int depth,
                              std::string_view op_prefix = "") const {
    std::vector<std::string> cols;
    for (const auto& e : arm.select) cols.push_back(expr_phrase(e, arm, false));
    std::vector<std::string> ents;
    for (const auto& t : arm.from.tables) ents.push_back(entity(t.name));
    if (ents.empty()) throw TemplateGap("nested query without tables");
    std::string entity_text = ents.front();
    if (ents.size() > 1) {
      entity_text += " with " + enumerate(std::vector<std::string>(ents.begin() + 1, ents.end()));
    }
    std::string quals;
    if (arm.where) quals = " " + qualifier(*arm.where, arm, depth);
    return fill(catalog_.get(UnitType::kPredicate, "set_arm"), {{"operator", std::string(op_prefix)},
                                                                {"columns", enumerate(cols)},
                                                                {"entity", entity_text},
                                                                {"qualifiers", quals}});
  }

  std::string set_arm(SetOpKind kind, const SqlQuery& arm, bool) const {
    std::string_view prefix;
    if (kind == SetOpKind::kUnion) prefix = "Or ";
    if (kind == SetOpKind::kExcept) prefix = "Except ";
    return arm_description(arm, 0, prefix);
  }

  const SchemaDb& schema_;
  const TemplateCatalog& catalog_;
};

std::string fragment_text(UnitType type, const SqlQuery& f) {
  std::vector<std::string> parts;
  switch (type) {
    case UnitType::kProjection: {
      std::vector<std::string> cols;
      for (const auto& e : f.select) cols.push_back(render_expr(e));
      return std::string("SELECT ") + (f.distinct ? "DISTINCT " : "") + detail::join(cols, ", ");
    }
    case UnitType::kJoin:
      return "FROM " + render_from(f.from);
    case UnitType::kPredicate:
      if (f.set_op) {
        return std::string(to_string(f.set_op->kind)) + " " + render_sql(*f.set_op->right);
      }
      if (f.where) return "WHERE " + render_predicate(*f.where);
      if (f.having) return "HAVING " + render_predicate(*f.having);
      return "";
    case UnitType::kGroup: {
      std::vector<std::string> cols;
      for (const auto& c : f.group_by) cols.push_back(render_column(c));
      return "GROUP BY " + detail::join(cols, ", ");
    }
    case UnitType::kSort: {
      std::string out;
      if (!f.order_by.empty()) {
        std::vector<std::string> items;
        for (const auto& o : f.order_by) items.push_back(render_order_item(o));
        out = "ORDER BY " + detail::join(items, ", ");
      }
      if (f.limit) out += std::string(out.empty() ? "" : " ") + "LIMIT " + std::to_string(*f.limit);
      return out;
    }
  }
  return "";
}

}  // namespace

const TemplateCatalog& TemplateCatalog::builtin() {
  static const TemplateCatalog kBuiltin = make_builtin();
  return kBuiltin;
}

TemplateCatalog TemplateCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read template catalog " + path.string());
  TemplateCatalog c = builtin();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto fields = detail::split(line, "\t");
    const auto where = "template catalog " + path.string() + " line " + std::to_string(line_no);
    if (fields.size() != 3) throw FormatError(where + ": expected type, pattern, template");
    auto type = unit_type_from_name(fields[0]);
    if (!type) throw FormatError(where + ": unknown unit type '" + fields[0] + "'");
    c.set(*type, fields[1], fields[2]);
  }
  return c;
}

const std::string& TemplateCatalog::get(UnitType type, std::string_view pattern) const {
  auto it = templates_.find({type, std::string(pattern)});
  if (it == templates_.end()) {
    throw TemplateGap("no " + std::string(unit_type_name(type)) + " template for pattern '" +
                      std::string(pattern) + "'");
  }
  return it->second;
}

void TemplateCatalog::set(UnitType type, std::string pattern, std::string text) {
  templates_[{type, std::move(pattern)}] = std::move(text);
}

std::string render_unit_nl(UnitType type, const SqlQuery& fragment, const SchemaDb& schema,
                           const TemplateCatalog& catalog) {
  Renderer r(schema, catalog);
  switch (type) {
    case UnitType::kProjection: return r.projection(fragment);
    case UnitType::kJoin: return r.join(fragment);
    case UnitType::kPredicate: return r.predicate(fragment);
    case UnitType::kGroup: return r.group(fragment);
    case UnitType::kSort: return r.sort(fragment);
  }
  throw TemplateGap("unknown unit type");
}

std::vector<PhraseUnit> decompose(const SqlQuery& query, const SchemaDb& schema,
                                  const TemplateCatalog& catalog) {
  std::vector<PhraseUnit> units;
  auto add = [&](UnitType type, SqlQuery fragment) {
    PhraseUnit u;
    u.type = type;
    u.fragment_text = fragment_text(type, fragment);
    try {
      u.nl_text = render_unit_nl(type, fragment, schema, catalog);
    } catch (const TemplateGap&) {
      u.nl_text = u.fragment_text;
      u.fallback = true;
    }
    u.fragment = std::move(fragment);
    units.push_back(std::move(u));
  };

  {
    SqlQuery f;
    f.distinct = query.distinct;
    f.select = query.select;
    f.from = query.from;
    add(UnitType::kProjection, std::move(f));
  }
  if (!query.from.tables.empty()) {
    SqlQuery f;
    f.from = query.from;
    add(UnitType::kJoin, std::move(f));
  }
  if (query.where) {
    for (const auto* c : query.where->conjuncts()) {
      SqlQuery f;
      f.from = query.from;
      f.where = *c;
      add(UnitType::kPredicate, std::move(f));
    }
  }
  if (query.having) {
    for (const auto* c : query.having->conjuncts()) {
      SqlQuery f;
      f.from = query.from;
      f.having = *c;
      add(UnitType::kPredicate, std::move(f));
    }
  }
  for (const SqlQuery* arm_owner = &query; arm_owner->set_op; arm_owner = &*arm_owner->set_op->right) {
    SqlQuery arm = *arm_owner->set_op->right;
    arm.set_op.reset();
    SqlQuery f;
    f.set_op = SetOperation{arm_owner->set_op->kind, Subquery(std::move(arm))};
    add(UnitType::kPredicate, std::move(f));
  }
  if (!query.group_by.empty()) {
    SqlQuery f;
    f.from = query.from;
    f.group_by = query.group_by;
    add(UnitType::kGroup, std::move(f));
  }
  if (!query.order_by.empty() || query.limit) {
    SqlQuery f;
    f.from = query.from;
    f.order_by = query.order_by;
    f.limit = query.limit;
    add(UnitType::kSort, std::move(f));
  }
  return units;
}

}  // namespace metasql
