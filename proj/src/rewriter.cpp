// Copyright 2026 The talkback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "talkback/rewriter.hpp"

#include <set>

#include "talkback/error.hpp"

namespace talkback {

std::string_view to_string(Motif::Kind kind) {
  switch (kind) {
    case Motif::Kind::Division: return "Division";
    case Motif::Kind::SameValue: return "SameValue";
    case Motif::Kind::SuperlativeAll: return "SuperlativeAll";
  }
  return "?";
}

bool is_higher_order(const Motif& m) { return m.kind != Motif::Kind::Division; }

namespace {

const QueryJoinEdge* crossing_edge(const QueryGraph& g, std::size_t level) {
  for (const auto& e : g.joins) {
    if (e.crosses_nesting && e.to_level == level) return &e;
  }
  return nullptr;
}

std::string relation_of(const QueryGraph& g, std::string_view alias) {
  const QueryNode* n = g.find_node(alias);
  return n == nullptr ? "" : n->relation;
}

void detect_division(const QueryGraph& g, std::vector<Motif>& out) {
  for (std::size_t i = 0; i < g.nested.size(); ++i) {
    const NestedQuery& middle = g.nested[i];
    if (middle.connector != qg::Connector::NotExists) continue;
    const QueryGraph& mid = *middle.child;
    for (const auto& inner_entry : mid.nested) {
      if (inner_entry.connector != qg::Connector::NotExists) continue;
      const QueryGraph& inner = *inner_entry.child;
      const QueryJoinEdge* to_middle = crossing_edge(inner, 1);
      const QueryJoinEdge* to_outer = crossing_edge(inner, 2);
      if (to_middle == nullptr || to_outer == nullptr) continue;
      Motif m;
      m.kind = Motif::Kind::Division;
      m.anchor = std::string(qg::to_string(middle.site)) + "[" + std::to_string(i) + "]";
      m.params["range_alias"] = to_outer->to_alias;
      m.params["range"] = relation_of(g, to_outer->to_alias);
      m.params["divisor_alias"] = to_middle->to_alias;
      m.params["divisor"] = relation_of(mid, to_middle->to_alias);
      out.push_back(std::move(m));
      break;
    }
  }
}

bool is_constant_one(const sql::Expr& e) {
  const auto* c = std::get_if<sql::Constant>(&e);
  const auto* v = c ? std::get_if<std::int64_t>(&c->value) : nullptr;
  return v != nullptr && *v == 1;
}

void detect_same_value(const QueryGraph& g, std::vector<Motif>& out) {
  for (const auto& n : g.nodes) {
    for (std::size_t i = 0; i < n.having_part.size(); ++i) {
      const sql::Compare& c = n.having_part[i];
      if (c.op != sql::CompareOp::Eq) continue;
      const sql::CountDistinct* cd = std::get_if<sql::CountDistinct>(&c.lhs);
      const sql::Expr* other = &c.rhs;
      if (cd == nullptr) {
        cd = std::get_if<sql::CountDistinct>(&c.rhs);
        other = &c.lhs;
      }
      if (cd == nullptr || !is_constant_one(*other)) continue;
      Motif m;
      m.kind = Motif::Kind::SameValue;
      m.anchor = n.alias + ".having[" + std::to_string(i) + "]";
      m.params["alias"] = n.alias;
      m.params["relation"] = n.relation;
      m.params["attribute"] = cd->column.attribute;
      out.push_back(std::move(m));
    }
  }
}

void detect_superlative(const QueryGraph& g, const SchemaGraph* schema, std::vector<Motif>& out) {
  for (std::size_t i = 0; i < g.nested.size(); ++i) {
    const NestedQuery& n = g.nested[i];
    if (n.connector != qg::Connector::CompareAll || !n.correlated || !n.atom) continue;
    const auto& all = std::get<sql::CompareAll>(*n.atom);
    if (all.op == sql::CompareOp::Eq || all.op == sql::CompareOp::Ne) continue;
    const auto* lhs = std::get_if<sql::ColumnRef>(&all.lhs);
    if (lhs == nullptr || lhs->outer_level != 0) continue;
    const QueryGraph& child = *n.child;
    if (child.projections.size() != 1) continue;
    const auto* col = std::get_if<sql::ColumnRef>(&child.projections.front().expr);
    if (col == nullptr || col->outer_level != 0) continue;
    std::string outer_rel = relation_of(g, lhs->alias);
    std::string inner_rel = relation_of(child, col->alias);
    if (!text::iequals(outer_rel, inner_rel) || !text::iequals(lhs->attribute, col->attribute)) continue;
    bool min = all.op == sql::CompareOp::Lt || all.op == sql::CompareOp::Le;
    bool temporal = false;
    if (schema != nullptr) {
      if (const AttributeNode* a = schema->find_attribute(outer_rel, lhs->attribute)) temporal = a->temporal;
    }
    Motif m;
    m.kind = Motif::Kind::SuperlativeAll;
    m.anchor = std::string(qg::to_string(n.site)) + "[" + std::to_string(i) + "]";
    m.params["alias"] = lhs->alias;
    m.params["relation"] = outer_rel;
    m.params["attribute"] = lhs->attribute;
    m.params["direction"] = min ? "min" : "max";
    m.params["superlative"] = temporal ? (min ? "earliest" : "latest") : (min ? "smallest" : "largest");
    out.push_back(std::move(m));
  }
}

// ---------------------------------------------------------------------------
// Flattening

std::string obstacle(const sql::Query& q, bool nested);

std::string expr_obstacle(const sql::Expr& e) {
  if (std::holds_alternative<sql::ScalarSubquery>(e)) return "a scalar subquery is present";
  return "";
}

std::string obstacle(const sql::Query& q, bool nested) {
  if (nested) {
    if (q.select_star || q.select.size() != 1 || !std::holds_alternative<sql::ColumnRef>(q.select.front().expr))
      return "an IN subquery must select exactly one column";
    if (!q.group_by.empty() || !q.having.empty() || !q.order_by.empty())
      return "an IN subquery carries grouping, having or ordering";
    if (qg::is_correlated(q)) return "an IN subquery is correlated with its enclosing query";
  }
  for (const auto& s : q.select) {
    if (std::string why = expr_obstacle(s.expr); !why.empty()) return why;
  }
  for (const auto& a : q.having) {
    if (!sql::subqueries(a).empty()) return "a subquery appears in HAVING";
  }
  for (const auto& a : q.where) {
    if (const auto* in = std::get_if<sql::InSubquery>(&a)) {
      if (!std::holds_alternative<sql::ColumnRef>(in->lhs)) return "IN has a non-column left operand";
      if (std::string why = obstacle(*in->query, true); !why.empty()) return why;
    } else if (std::holds_alternative<sql::Exists>(a)) {
      return "EXISTS or NOT EXISTS nesting";
    } else if (std::holds_alternative<sql::CompareAll>(a)) {
      return "a quantified ALL comparison";
    } else if (!sql::subqueries(a).empty()) {
      return "a scalar subquery is compared";
    }
  }
  return "";
}

void rename_alias(sql::Query& q, const std::string& from, const std::string& to) {
  auto fix = [&](sql::ColumnRef& c) {
    if (c.outer_level == 0 && text::iequals(c.alias, from)) c.alias = to;
  };
  for (auto& f : q.from) {
    if (text::iequals(f.alias, from)) f.alias = to;
  }
  for (auto& s : q.select) {
    if (auto* c = std::get_if<sql::ColumnRef>(&s.expr)) fix(*c);
  }
  for (auto& a : q.where) {
    // Children are already flat, so every atom is a plain comparison.
    if (auto* cmp = std::get_if<sql::Compare>(&a)) {
      if (auto* c = std::get_if<sql::ColumnRef>(&cmp->lhs)) fix(*c);
      if (auto* c = std::get_if<sql::ColumnRef>(&cmp->rhs)) fix(*c);
    }
  }
}

sql::Query flatten_rec(const sql::Query& q) {
  sql::Query out = q;
  out.where.clear();
  for (const auto& atom : q.where) {
    const auto* in = std::get_if<sql::InSubquery>(&atom);
    if (in == nullptr) {
      out.where.push_back(atom);
      continue;
    }
    sql::Query child = flatten_rec(*in->query);
    for (const auto& f : std::vector<sql::FromItem>(child.from)) {
      if (out.find_alias(f.alias) == nullptr) continue;
      std::string fresh;
      for (int k = 2;; ++k) {
        fresh = f.alias + "_" + std::to_string(k);
        if (out.find_alias(fresh) == nullptr && child.find_alias(fresh) == nullptr) break;
      }
      rename_alias(child, f.alias, fresh);
    }
    out.where.push_back(sql::Compare{in->lhs, sql::CompareOp::Eq, child.select.front().expr});
    for (auto& a : child.where) out.where.push_back(std::move(a));
    for (auto& f : child.from) out.from.push_back(std::move(f));
  }
  return out;
}

}  // namespace

std::vector<Motif> detect_motifs(const QueryGraph& g, const SchemaGraph* schema) {
  std::vector<Motif> out;
  detect_division(g, out);
  detect_same_value(g, out);
  detect_superlative(g, schema, out);
  return out;
}

std::string flatten_obstacle(const sql::Query& q) { return obstacle(q, false); }

sql::Query flatten(const sql::Query& q) {
  if (std::string why = flatten_obstacle(q); !why.empty()) throw Error(ErrorKind::NotFlattenable, why);
  return flatten_rec(q);
}

}  // namespace talkback
