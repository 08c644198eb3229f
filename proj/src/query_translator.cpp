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

#include "talkback/query_translator.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "json.hpp"
#include "talkback/error.hpp"
#include "talkback/rewriter.hpp"

namespace talkback {

std::string_view to_string(TranslationStyle style) {
  return style == TranslationStyle::Declarative ? "declarative" : "procedural";
}

std::string operator_phrase(sql::CompareOp op, const AttributeNode* attribute) {
  if (attribute != nullptr) {
    auto it = attribute->lexicon.find(std::string(sql::to_string(op)));
    if (it == attribute->lexicon.end() && op == sql::CompareOp::Ne) it = attribute->lexicon.find("<>");
    if (it != attribute->lexicon.end()) return it->second;
  }
  switch (op) {
    case sql::CompareOp::Eq: return "is";
    case sql::CompareOp::Ne: return "is not";
    case sql::CompareOp::Lt: return "is less than";
    case sql::CompareOp::Le: return "is at most";
    case sql::CompareOp::Gt: return "is greater than";
    case sql::CompareOp::Ge: return "is at least";
  }
  return "?";
}

namespace {

std::string value_text(const Cell& c) { return is_null(c) ? "null" : cell_to_string(c); }

struct Words {
  const SchemaGraph& schema;

  std::string singular(std::string_view relation) const {
    const RelationNode* r = schema.find_relation(relation);
    return r ? r->noun.singular : text::to_lower(relation);
  }
  std::string plural(std::string_view relation) const {
    const RelationNode* r = schema.find_relation(relation);
    return r ? r->noun.plural : text::pluralize(text::to_lower(relation));
  }
  std::string attr_singular(std::string_view relation, std::string_view attribute) const {
    const AttributeNode* a = schema.find_attribute(relation, attribute);
    return a ? a->noun.singular : std::string(attribute);
  }
  std::string attr_plural(std::string_view relation, std::string_view attribute) const {
    const AttributeNode* a = schema.find_attribute(relation, attribute);
    return a ? a->noun.plural : text::pluralize(attribute);
  }
  bool is_heading(std::string_view relation, std::string_view attribute) const {
    const RelationNode* r = schema.find_relation(relation);
    return r && text::iequals(r->heading_attribute, attribute);
  }
  bool in_primary_key(std::string_view relation, std::string_view attribute) const {
    const RelationNode* r = schema.find_relation(relation);
    if (r == nullptr || r->keys.empty()) return false;
    return std::any_of(r->keys.front().begin(), r->keys.front().end(),
                       [&](const std::string& k) { return text::iequals(k, attribute); });
  }
};

/// col op constant, with the column on the left.
struct ConstantCompare {
  const sql::ColumnRef* column = nullptr;
  sql::CompareOp op = sql::CompareOp::Eq;
  const Cell* value = nullptr;
};

std::optional<ConstantCompare> as_constant_compare(const sql::Compare& c) {
  const auto* lc = std::get_if<sql::ColumnRef>(&c.lhs);
  const auto* rk = std::get_if<sql::Constant>(&c.rhs);
  if (lc && rk) return ConstantCompare{lc, c.op, &rk->value};
  const auto* rc = std::get_if<sql::ColumnRef>(&c.rhs);
  const auto* lk = std::get_if<sql::Constant>(&c.lhs);
  if (rc && lk) return ConstantCompare{rc, sql::mirror(c.op), &lk->value};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lexicalizer: predicates in words. How a tuple variable is referred to is
// left to the caller.

class Lexicalizer {
 public:
  /// (alias, relation, scope level) -> noun phrase for that tuple variable.
  using RefFn = std::function<std::string(const std::string&, const std::string&, std::size_t)>;
  /// relation, alias -> bare noun used when listing a subquery's range.
  using RangeFn = std::function<std::string(const std::string&, const std::string&, bool plural)>;

  Lexicalizer(const SchemaGraph& schema, RefFn ref, RangeFn range)
      : words_{schema}, ref_(std::move(ref)), range_(std::move(range)) {}

  std::vector<const sql::Query*> scopes;
  bool grouped = false;

  std::string relation_of(const sql::ColumnRef& c) const {
    if (c.outer_level >= scopes.size()) return "";
    const sql::Query* q = scopes[scopes.size() - 1 - c.outer_level];
    const sql::FromItem* f = q->find_alias(c.alias);
    return f ? f->relation : "";
  }

  std::string ref(const sql::ColumnRef& c) const { return ref_(c.alias, relation_of(c), c.outer_level); }

  std::string column(const sql::ColumnRef& c) const {
    return "the " + words_.attr_singular(relation_of(c), c.attribute) + " of " + ref(c);
  }

  std::string expr(const sql::Expr& e) {
    if (const auto* c = std::get_if<sql::ColumnRef>(&e)) return column(*c);
    if (const auto* k = std::get_if<sql::Constant>(&e)) return value_text(k->value);
    if (std::holds_alternative<sql::CountStar>(e))
      return grouped ? "the number of combinations in the group" : "the number of combinations";
    if (const auto* d = std::get_if<sql::CountDistinct>(&e))
      return "the number of distinct " + words_.attr_plural(relation_of(d->column), d->column.attribute) + " of " +
             ref(d->column);
    return scalar(*std::get<sql::ScalarSubquery>(e).query);
  }

  /// `heading_np`: a heading equality reads as a noun phrase ("the actor
  /// Brad Pitt") rather than a clause ("the actor is Brad Pitt").
  std::string compare(const sql::Compare& c, bool heading_np) {
    if (auto k = as_constant_compare(c); k && k->op == sql::CompareOp::Eq) {
      std::string rel = relation_of(*k->column);
      if (words_.is_heading(rel, k->column->attribute)) {
        if (heading_np) return "the " + words_.singular(rel) + " " + value_text(*k->value);
        return ref(*k->column) + " is " + value_text(*k->value);
      }
    }
    const AttributeNode* attr = nullptr;
    if (const auto* lc = std::get_if<sql::ColumnRef>(&c.lhs))
      attr = words_.schema.find_attribute(relation_of(*lc), lc->attribute);
    return expr(c.lhs) + " " + operator_phrase(c.op, attr) + " " + expr(c.rhs);
  }

  std::string atom(const sql::Atom& a, bool heading_np = false) {
    if (const auto* c = std::get_if<sql::Compare>(&a)) return compare(*c, heading_np);
    if (const auto* in = std::get_if<sql::InSubquery>(&a)) return expr(in->lhs) + " is among " + values(*in->query);
    if (const auto* ex = std::get_if<sql::Exists>(&a)) return exists(*ex->query, ex->negated);
    const auto& all = std::get<sql::CompareAll>(a);
    const AttributeNode* attr = nullptr;
    if (const auto* lc = std::get_if<sql::ColumnRef>(&all.lhs))
      attr = words_.schema.find_attribute(relation_of(*lc), lc->attribute);
    return expr(all.lhs) + " " + operator_phrase(all.op, attr) + " every one of " + values(*all.query);
  }

 private:
  Words words_;
  RefFn ref_;
  RangeFn range_;

  std::string conditions(const sql::Query& q) {
    std::vector<std::string> parts;
    bool saved = grouped;
    grouped = false;
    for (const auto& a : q.where) parts.push_back(atom(a));
    grouped = !q.group_by.empty();
    for (const auto& a : q.having) parts.push_back(atom(a));
    grouped = saved;
    return text::join(parts, " and ");
  }

  std::string range(const sql::Query& q, bool plural) const {
    std::vector<std::string> items;
    for (const auto& f : q.from) items.push_back(range_(f.relation, f.alias, plural));
    return text::join_list(items);
  }

  std::string rows(const sql::Query& q) {
    scopes.push_back(&q);
    std::string conds = conditions(q);
    std::string out = range(q, true) + (conds.empty() ? "" : " where " + conds);
    scopes.pop_back();
    return out;
  }

  std::string first_item(const sql::Query& q) {
    if (q.select_star || q.select.empty()) return "rows of " + rows(q);
    scopes.push_back(&q);
    const sql::Expr& e = q.select.front().expr;
    std::string head;
    if (const auto* c = std::get_if<sql::ColumnRef>(&e)) {
      head = c->outer_level == 0 ? "the " + words_.attr_plural(relation_of(*c), c->attribute) + " of " : "";
      if (c->outer_level != 0) head = column(*c) + " for ";
    } else if (std::holds_alternative<sql::CountStar>(e)) {
      head = "the number of ";
    } else if (const auto* d = std::get_if<sql::CountDistinct>(&e)) {
      head = "the number of distinct " + words_.attr_plural(relation_of(d->column), d->column.attribute) + " of ";
    } else {
      head = "the values of ";
    }
    scopes.pop_back();
    return head + rows(q);
  }

  std::string values(const sql::Query& q) { return first_item(q); }
  std::string scalar(const sql::Query& q) { return first_item(q); }

  std::string exists(const sql::Query& q, bool negated) {
    scopes.push_back(&q);
    std::string conds = conditions(q);
    std::string head;
    if (negated) {
      head = "there is no " + range(q, false);
    } else {
      std::vector<std::string> items;
      for (const auto& f : q.from) items.push_back(text::with_article(range_(f.relation, f.alias, false)));
      head = "there is " + text::join_list(items);
    }
    scopes.pop_back();
    return head + (conds.empty() ? "" : " such that " + conds);
  }
};

// ---------------------------------------------------------------------------
// Mentions: how tuple variables are introduced and referred back to in
// declarative output.

class Mentions {
 public:
  enum class Style { Plural, Ordinal };

  Mentions(const qg::QueryGraph& g, const SchemaGraph& schema, Style style, std::string root)
      : g_(g), words_{schema}, style_(style), root_(std::move(root)) {
    std::map<std::string, std::size_t, text::ILess> seen;
    for (const auto& n : g.nodes) {
      index_[n.alias] = ++seen[n.relation];
      count_[n.relation] = seen[n.relation];
    }
    for (const auto& n : g.nodes) count_[n.relation] = seen[n.relation];
  }

  const qg::QueryNode& node(const std::string& alias) const { return *g_.find_node(alias); }

  bool is_plural(const std::string& alias) const {
    return style_ == Style::Plural && text::iequals(alias, root_) && !singular_root_;
  }

  std::optional<std::size_t> constant(const std::string& alias, const std::string& attribute) const {
    const auto& n = node(alias);
    for (std::size_t i = 0; i < n.where_part.size(); ++i) {
      if (consumed_.count({text::to_lower(alias), i})) continue;
      auto k = as_constant_compare(n.where_part[i]);
      if (k && k->op == sql::CompareOp::Eq && text::iequals(k->column->attribute, attribute)) return i;
    }
    return std::nullopt;
  }

  std::string consume(const std::string& alias, std::size_t i) {
    consumed_.insert({text::to_lower(alias), i});
    return value_text(*as_constant_compare(node(alias).where_part[i])->value);
  }

  bool is_consumed(const std::string& alias, std::size_t i) const {
    return consumed_.count({text::to_lower(alias), i}) > 0;
  }

  std::string mention(const std::string& alias) {
    const auto& n = node(alias);
    std::string sing = words_.singular(n.relation);
    bool first = mentioned_.insert(text::to_lower(alias)).second;
    if (auto h = heading_constant(alias)) {
      if (text::iequals(alias, root_)) singular_root_ = true;
      return "the " + sing + " " + consume(alias, *h);
    }
    if (!first) return reference(alias);
    if (style_ == Style::Plural && text::iequals(alias, root_)) return words_.plural(n.relation);
    if (style_ == Style::Ordinal && count_[n.relation] > 1) {
      bool other = std::any_of(g_.nodes.begin(), g_.nodes.end(), [&](const qg::QueryNode& o) {
        return !text::iequals(o.alias, alias) && text::iequals(o.relation, n.relation) &&
               mentioned_.count(text::to_lower(o.alias));
      });
      if (other) return "another " + sing;
    }
    return text::with_article(sing);
  }

  /// Mention that prefers the heading value: "the actor Brad Pitt".
  std::string heading_mention(const std::string& alias) { return mention(alias); }

  std::string reference(const std::string& alias) const {
    const auto& n = node(alias);
    std::string sing = words_.singular(n.relation);
    auto cit = count_.find(n.relation);
    if (cit != count_.end() && cit->second > 1) return "the " + text::ordinal(index_.at(alias)) + " " + sing;
    return "the " + sing;
  }

  /// First mention through mention(), later ones through reference().
  std::string refer(const std::string& alias) {
    return mentioned_.count(text::to_lower(alias)) ? reference(alias) : mention(alias);
  }

  bool mentioned(const std::string& alias) const { return mentioned_.count(text::to_lower(alias)) > 0; }

 private:
  const qg::QueryGraph& g_;
  Words words_;
  Style style_;
  std::string root_;
  bool singular_root_ = false;
  std::map<std::string, std::size_t, text::ILess> index_;
  std::map<std::string, std::size_t, text::ILess> count_;
  std::set<std::string> mentioned_;
  std::set<std::pair<std::string, std::size_t>> consumed_;

  std::optional<std::size_t> heading_constant(const std::string& alias) const {
    const RelationNode* r = words_.schema.find_relation(node(alias).relation);
    if (r == nullptr) return std::nullopt;
    return constant(alias, r->heading_attribute);
  }
};

// ---------------------------------------------------------------------------
// Declarative traversal shared by the plural and ordinal renderings.

struct Step {
  std::string anchor;
  std::string relay;  // empty when the step is a single edge
  std::string target;
  std::size_t join = 0;
  std::optional<std::size_t> second_join;
  const JoinEdge* edge = nullptr;
  const JoinPathTemplate* path = nullptr;
};

class Declarative {
 public:
  Declarative(const qg::QueryGraph& g, const SchemaGraph& schema, Mentions::Style style, const std::string& root)
      : g_(g), schema_(schema), words_{schema}, m_(g, schema, style, root) {
    for (std::size_t j = 0; j < g.joins.size(); ++j) {
      const auto& e = g.joins[j];
      if (e.crosses_nesting) continue;
      adj_[e.from_alias].push_back(j);
      adj_[e.to_alias].push_back(j);
    }
  }

  Mentions& mentions() { return m_; }
  std::set<std::size_t>& used() { return used_; }
  std::set<std::string, text::ILess>& visited() { return visited_; }

  const std::string& other(std::size_t j, const std::string& alias) const {
    const auto& e = g_.joins[j];
    return text::iequals(e.from_alias, alias) ? e.to_alias : e.from_alias;
  }

  const JoinEdge* schema_edge(std::size_t j) const {
    const auto& e = g_.joins[j];
    if (e.op != sql::CompareOp::Eq) return nullptr;
    return schema_.find_join(node(e.from_alias).relation, e.from_attribute, node(e.to_alias).relation,
                             e.to_attribute);
  }

  /// Candidate step from `x` along join `j`, folding a relay relation into a
  /// join-path step when the schema has a template for the path.
  std::optional<Step> step(const std::string& x, std::size_t j, bool fk_only) const {
    if (used_.count(j)) return std::nullopt;
    const auto& e = g_.joins[j];
    bool eq = e.op == sql::CompareOp::Eq;
    if (!eq || (fk_only && !e.fk_backed)) return std::nullopt;
    std::string y = other(j, x);
    if (visited_.count(y) || text::iequals(x, y)) return std::nullopt;
    Step s{x, "", y, j, std::nullopt, schema_edge(j), nullptr};
    const auto& yn = node(y);
    const auto& ya = adj_.find(y)->second;
    if (yn.where_part.empty() && yn.select_part.empty() && ya.size() == 2) {
      std::size_t k = ya[0] == j ? ya[1] : ya[0];
      const auto& f = g_.joins[k];
      std::string z = other(k, y);
      // In ordinal mode a relay may close back onto a node already mentioned:
      // "and the name of another actor who has played in the movie".
      bool open = !visited_.count(z) || fk_only;
      if (!used_.count(k) && f.fk_backed && e.fk_backed && open && !text::iequals(z, x)) {
        if (const JoinPathTemplate* p =
                schema_.find_join_path({node(x).relation, yn.relation, node(z).relation})) {
          s.relay = y;
          s.target = z;
          s.second_join = k;
          s.path = p;
          s.edge = nullptr;
        }
      }
    }
    return s;
  }

  void take(const Step& s) {
    used_.insert(s.join);
    if (s.second_join) used_.insert(*s.second_join);
    if (!s.relay.empty()) visited_.insert(s.relay);
    visited_.insert(s.target);
  }

  /// Phrase attaching `s.target` to `s.anchor`. `before` is set when the
  /// chosen phrase goes in front of the anchor's noun.
  std::string phrase(const Step& s, bool anchor_plural, bool allow_before, bool& before) {
    before = false;
    const std::vector<QueryPhrase>* phrases = nullptr;
    if (s.path) phrases = &s.path->phrases;
    else if (s.edge) phrases = &s.edge->phrases;
    if (phrases != nullptr) {
      for (const auto& p : *phrases) {
        if (!text::iequals(p.anchor, node(s.anchor).relation)) continue;
        if (p.position == QueryPhrase::Position::Before && !allow_before) continue;
        std::string source = anchor_plural && !p.plural_text.empty() ? p.plural_text : p.text;
        if (auto out = try_phrase(s, source)) {
          before = p.position == QueryPhrase::Position::Before;
          return *out;
        }
      }
    }
    return fallback(s);
  }

  /// "whose year is 2005" for the node's predicates no phrase consumed.
  std::string whose(const std::string& alias) {
    const auto& n = node(alias);
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < n.where_part.size(); ++i) {
      if (m_.is_consumed(alias, i)) continue;
      const auto& c = n.where_part[i];
      auto k = as_constant_compare(c);
      if (!k) continue;
      const AttributeNode* attr = schema_.find_attribute(n.relation, k->column->attribute);
      parts.push_back("whose " + words_.attr_singular(n.relation, k->column->attribute) + " " +
                      operator_phrase(k->op, attr) + " " + value_text(*k->value));
      m_.consume(alias, i);
    }
    return text::join(parts, " and ");
  }

  /// Every predicate and join not yet rendered, as clauses.
  std::vector<std::string> leftovers() {
    Lexicalizer lx(
        schema_, [&](const std::string& alias, const std::string&, std::size_t) { return m_.refer(alias); },
        [&](const std::string& rel, const std::string&, bool plural) {
          return plural ? words_.plural(rel) : words_.singular(rel);
        });
    lx.scopes.push_back(&g_.source);
    std::vector<std::string> out;
    for (std::size_t j = 0; j < g_.joins.size(); ++j) {
      if (used_.count(j) || g_.joins[j].crosses_nesting) continue;
      const auto& e = g_.joins[j];
      sql::Compare c{sql::ColumnRef{e.from_alias, e.from_attribute, 0}, e.op,
                     sql::ColumnRef{e.to_alias, e.to_attribute, 0}};
      out.push_back(lx.compare(c, false));
      used_.insert(j);
    }
    for (const auto& n : g_.nodes) {
      for (std::size_t i = 0; i < n.where_part.size(); ++i) {
        if (m_.is_consumed(n.alias, i)) continue;
        out.push_back(lx.compare(n.where_part[i], false));
        m_.consume(n.alias, i);
      }
    }
    return out;
  }

  const qg::QueryNode& node(const std::string& alias) const { return *g_.find_node(alias); }
  const std::vector<std::size_t>& adjacent(const std::string& alias) const {
    static const std::vector<std::size_t> kNone;
    auto it = adj_.find(alias);
    return it == adj_.end() ? kNone : it->second;
  }

 private:
  const qg::QueryGraph& g_;
  const SchemaGraph& schema_;
  Words words_;
  Mentions m_;
  std::map<std::string, std::vector<std::size_t>, text::ILess> adj_;
  std::set<std::size_t> used_;
  std::set<std::string, text::ILess> visited_;

  std::vector<std::string> step_nodes(const Step& s) const {
    std::vector<std::string> out{s.target};
    if (!s.relay.empty()) out.push_back(s.relay);
    out.push_back(s.anchor);
    return out;
  }

  std::optional<std::string> alias_for(const Step& s, const std::string& relation) const {
    if (relation.empty()) return s.target;
    for (const auto& a : step_nodes(s)) {
      if (text::iequals(node(a).relation, relation)) return a;
    }
    return std::nullopt;
  }

  class Source : public PlaceholderSource {
   public:
    Source(Declarative& d, const Step& s) : d_(d), s_(s) {}
    std::size_t arity(std::string_view) const override { return 1; }
    std::string resolve_alias(const Placeholder& p) const override {
      return p.alias.empty() ? d_.node(s_.target).relation : p.alias;
    }
    std::string render(const Placeholder& p, std::string_view relation, std::size_t) const override {
      std::string alias = *d_.alias_for(s_, std::string(relation));
      switch (p.variant) {
        case PlaceholderVariant::Value: return d_.m_.consume(alias, *d_.m_.constant(alias, p.attribute));
        case PlaceholderVariant::Noun: return d_.m_.mention(alias);
        case PlaceholderVariant::Heading: return d_.m_.heading_mention(alias);
      }
      return "";
    }

   private:
    Declarative& d_;
    const Step& s_;
  };

  std::optional<std::string> try_phrase(const Step& s, const std::string& source) {
    TemplateExpr expr;
    try {
      expr = schema_.parse(source);
    } catch (const Error&) {
      return std::nullopt;
    }
    for (const auto& p : collect_placeholders(expr)) {
      auto alias = alias_for(s, p.alias);
      if (!alias) return std::nullopt;
      if (p.variant == PlaceholderVariant::Value && !m_.constant(*alias, p.attribute)) return std::nullopt;
    }
    return instantiate(expr, Source(*this, s));
  }

  std::string fallback(const Step& s) {
    const auto& e = g_.joins[s.join];
    if (s.edge != nullptr || s.path != nullptr) return "linked to " + m_.mention(s.target);
    bool forward = text::iequals(e.from_alias, s.anchor);
    const std::string& mine = forward ? e.from_attribute : e.to_attribute;
    const std::string& theirs = forward ? e.to_attribute : e.from_attribute;
    sql::CompareOp op = forward ? e.op : sql::mirror(e.op);
    const AttributeNode* attr = schema_.find_attribute(node(s.anchor).relation, mine);
    return "whose " + words_.attr_singular(node(s.anchor).relation, mine) + " " + operator_phrase(op, attr) +
           " the " + words_.attr_singular(node(s.target).relation, theirs) + " of " + m_.mention(s.target);
  }
};

struct Rendered {
  std::optional<std::string> text;
  std::string why;  // set when text is empty
};

std::string root_of(const qg::QueryGraph& g, const SchemaGraph& schema) {
  const qg::QueryNode* best = nullptr;
  double best_weight = 0;
  for (const auto& n : g.nodes) {
    if (n.select_part.empty() && !g.select_star) continue;
    const RelationNode* r = schema.find_relation(n.relation);
    double w = r ? r->weight : 0;
    if (best == nullptr || w > best_weight) {
      best = &n;
      best_weight = w;
    }
  }
  if (best == nullptr) {
    for (const auto& n : g.nodes) {
      const RelationNode* r = schema.find_relation(n.relation);
      double w = r ? r->weight : 0;
      if (best == nullptr || w > best_weight) {
        best = &n;
        best_weight = w;
      }
    }
  }
  return best ? best->alias : "";
}

bool plain_projections(const qg::QueryGraph& g) {
  return std::all_of(g.projections.begin(), g.projections.end(),
                     [](const sql::SelectItem& s) { return std::holds_alternative<sql::ColumnRef>(s.expr); });
}

std::string order_suffix(const qg::QueryGraph& g, const Words& w, const std::string& root) {
  if (g.order_note.empty()) return "";
  std::vector<std::string> items;
  for (const auto& o : g.order_note) {
    const qg::QueryNode* n = g.find_node(o.column.alias);
    std::string rel = n ? n->relation : "";
    std::string phrase = text::iequals(o.column.alias, root) ? w.attr_singular(rel, o.column.attribute)
                                                              : w.attr_singular(rel, o.column.attribute) + " of the " +
                                                                    w.singular(rel);
    items.push_back(phrase + (o.descending ? " in descending order" : ""));
  }
  return ", sorted by " + text::join_list(items);
}

/// Path and subgraph queries: "Find the titles of movies where ...".
Rendered render_plural(const qg::QueryGraph& g, const SchemaGraph& schema) {
  if (g.nodes.empty()) return {std::nullopt, "no relations"};
  if (!plain_projections(g)) return {std::nullopt, "aggregate projections"};
  if (!g.nested.empty() || !g.group_note.empty() || !g.residual.empty())
    return {std::nullopt, "nesting, grouping or residual predicates"};
  Words w{schema};
  std::string root = root_of(g, schema);
  Declarative d(g, schema, Mentions::Style::Plural, root);

  // Plan a spanning tree from the root.
  std::map<std::string, std::vector<Step>, text::ILess> children;
  d.visited().insert(root);
  std::function<void(const std::string&)> plan = [&](const std::string& x) {
    for (std::size_t j : d.adjacent(x)) {
      auto s = d.step(x, j, false);
      if (!s) continue;
      d.take(*s);
      children[x].push_back(*s);
      plan(s->target);
    }
  };
  plan(root);
  if (d.visited().size() != g.nodes.size()) return {std::nullopt, "the join graph is disconnected"};

  std::function<void(const std::string&, std::set<std::string, text::ILess>&)> subtree =
      [&](const std::string& x, std::set<std::string, text::ILess>& out) {
        out.insert(x);
        for (const auto& s : children[x]) {
          if (!s.relay.empty()) out.insert(s.relay);
          subtree(s.target, out);
        }
      };
  std::set<std::size_t> tree_joins = d.used();
  auto silent = [&](const Step& s) {
    std::set<std::string, text::ILess> nodes;
    subtree(s.target, nodes);
    if (!s.relay.empty()) nodes.insert(s.relay);
    bool projected = false;
    for (const auto& a : nodes) {
      const auto& n = d.node(a);
      if (!n.where_part.empty()) return false;
      if (!n.select_part.empty()) projected = true;
    }
    for (std::size_t j = 0; j < g.joins.size(); ++j) {
      if (tree_joins.count(j)) continue;
      if (nodes.count(g.joins[j].from_alias) || nodes.count(g.joins[j].to_alias)) return false;
    }
    return projected;
  };

  std::vector<std::string> before;
  std::vector<std::string> after;
  std::function<void(const std::string&)> render = [&](const std::string& x) {
    for (const auto& s : children[x]) {
      if (silent(s)) continue;
      bool is_root = text::iequals(x, root);
      bool put_before = false;
      std::string p = d.phrase(s, d.mentions().is_plural(x), is_root, put_before);
      (put_before ? before : after).push_back(p);
      if (std::string extra = d.whose(s.target); !extra.empty()) after.push_back(extra);
      render(s.target);
    }
  };
  // Mention the root first so its heading constant, if any, is consumed.
  std::string root_noun = d.mentions().mention(root);
  render(root);
  std::string root_whose = d.whose(root);
  std::vector<std::string> rest = d.leftovers();

  std::vector<std::string> items;
  for (const auto& p : g.projections) {
    const auto& c = std::get<sql::ColumnRef>(p.expr);
    std::string rel = d.node(c.alias).relation;
    if (text::iequals(c.alias, root)) items.push_back(w.attr_plural(rel, c.attribute));
    else if (w.is_heading(rel, c.attribute)) items.push_back(w.plural(rel));
    else items.push_back(w.singular(rel) + " " + w.attr_plural(rel, c.attribute));
  }
  std::vector<std::string> np;
  for (const auto& b : before) np.push_back(b);
  np.push_back(root_noun);
  if (!root_whose.empty()) np.push_back(root_whose);
  for (const auto& a : after) np.push_back(a);
  std::string out = "Find ";
  if (!items.empty()) out += "the " + text::join_list(items) + " of ";
  out += text::join(np, " ");
  if (!rest.empty()) out += " such that " + text::join(rest, " and ");
  out += order_suffix(g, w, root);
  return {text::normalize_whitespace(out), ""};
}

/// Multi-instance and cyclic queries: one clause per projection with
/// "a/another" introductions and "the first/second" back-references.
Rendered render_ordinal(const qg::QueryGraph& g, const SchemaGraph& schema) {
  if (g.nodes.empty() || g.select_star || g.projections.empty()) return {std::nullopt, "no projected columns"};
  if (!plain_projections(g)) return {std::nullopt, "aggregate projections"};
  if (!g.nested.empty() || !g.group_note.empty() || !g.residual.empty())
    return {std::nullopt, "nesting, grouping or residual predicates"};
  Words w{schema};
  Declarative d(g, schema, Mentions::Style::Ordinal, "");
  std::set<std::string, text::ILess> pending;
  for (const auto& p : g.projections) pending.insert(std::get<sql::ColumnRef>(p.expr).alias);

  std::function<void(const std::string&, std::vector<std::string>&)> extend =
      [&](const std::string& x, std::vector<std::string>& parts) {
        for (std::size_t j : d.adjacent(x)) {
          auto s = d.step(x, j, true);
          if (!s || pending.count(s->target)) continue;
          bool seen = d.visited().count(s->target) > 0;
          d.take(*s);
          bool unused = false;
          parts.push_back(d.phrase(*s, false, false, unused));
          if (std::string extra = d.whose(s->target); !extra.empty()) parts.push_back(extra);
          if (!seen) extend(s->target, parts);
        }
      };

  std::vector<std::string> clauses;
  for (const auto& p : g.projections) {
    const auto& c = std::get<sql::ColumnRef>(p.expr);
    pending.erase(c.alias);
    std::string rel = d.node(c.alias).relation;
    std::vector<std::string> parts{"the " + w.attr_singular(rel, c.attribute) + " of " +
                                   d.mentions().refer(c.alias)};
    if (std::string extra = d.whose(c.alias); !extra.empty()) parts.push_back(extra);
    if (d.visited().insert(c.alias).second) extend(c.alias, parts);
    clauses.push_back(text::join(parts, " "));
  }
  for (auto& rest : d.leftovers()) clauses.push_back(std::move(rest));
  std::string out = "Find " + text::join(clauses, ", and ") + order_suffix(g, w, "");
  return {text::normalize_whitespace(out), ""};
}

// ---------------------------------------------------------------------------
// Motif renderings for nested, aggregate and higher-order queries.

/// "movies", or "the years of movies" when non-identifying columns are asked for.
std::optional<std::string> subject(const qg::QueryGraph& g, const std::string& alias, const Words& w) {
  const qg::QueryNode* n = g.find_node(alias);
  if (n == nullptr) return std::nullopt;
  std::vector<std::string> extra;
  for (const auto& p : g.projections) {
    const auto* c = std::get_if<sql::ColumnRef>(&p.expr);
    if (c == nullptr || !text::iequals(c->alias, alias)) return std::nullopt;
    if (w.is_heading(n->relation, c->attribute) || w.in_primary_key(n->relation, c->attribute)) continue;
    extra.push_back(w.attr_plural(n->relation, c->attribute));
  }
  if (extra.empty()) return w.plural(n->relation);
  return "the " + text::join_list(extra) + " of " + w.plural(n->relation);
}

bool only_crossing_equalities(const qg::QueryGraph& g) {
  if (g.nodes.size() != 1 || !g.nested.empty() || !g.residual.empty() || !g.outer_filters.empty()) return false;
  if (!g.nodes.front().where_part.empty() || !g.group_note.empty()) return false;
  return std::all_of(g.joins.begin(), g.joins.end(), [](const qg::QueryJoinEdge& e) {
    return e.crosses_nesting && e.op == sql::CompareOp::Eq;
  });
}

Rendered render_division(const qg::QueryGraph& g, const Motif& m, const Words& w) {
  const std::string& range = m.params.at("range_alias");
  if (g.nodes.size() != 1 || !text::iequals(g.nodes.front().alias, range) || g.source.where.size() != 1 ||
      !g.group_note.empty() || !g.source.having.empty() || !g.nodes.front().where_part.empty())
    return {std::nullopt, "the outer query has conditions besides the division"};
  const qg::QueryGraph& middle = *g.nested.front().child;
  if (middle.nodes.size() != 1 || middle.source.where.size() != 1 || middle.nested.size() != 1)
    return {std::nullopt, "the middle query has extra conditions"};
  if (!only_crossing_equalities(*middle.nested.front().child))
    return {std::nullopt, "the innermost query has extra conditions"};
  auto subj = subject(g, range, w);
  if (!subj) return {std::nullopt, "projections outside the range relation"};
  return {"Find " + *subj + " that have all " + w.plural(m.params.at("divisor")), ""};
}

Rendered render_same_value(const qg::QueryGraph& g, const Motif& m, const Words& w) {
  if (!g.nested.empty() || !g.residual.empty() || g.source.having.size() != 1)
    return {std::nullopt, "conditions besides the count"};
  for (const auto& n : g.nodes) {
    if (!n.where_part.empty()) return {std::nullopt, "filters on " + n.alias};
  }
  qg::Shape s = qg::shape(g);
  if (s.cyclic || s.multi_instance) return {std::nullopt, "the join core is not a tree over distinct relations"};
  for (const auto& e : g.joins) {
    if (!e.fk_backed) return {std::nullopt, "a join is not backed by a foreign key"};
  }
  if (g.projections.empty()) return {std::nullopt, "no projection"};
  const auto* first = std::get_if<sql::ColumnRef>(&g.projections.front().expr);
  if (first == nullptr) return {std::nullopt, "aggregate projection"};
  std::string owner = first->alias;
  for (const auto& c : g.group_note) {
    if (!text::iequals(c.alias, owner)) return {std::nullopt, "grouping spans several relations"};
  }
  auto subj = subject(g, owner, w);
  if (!subj) return {std::nullopt, "projections span several relations"};
  const std::string& rel = m.params.at("relation");
  const std::string& attr = m.params.at("attribute");
  const AttributeNode* a = w.schema.find_attribute(rel, attr);
  std::string tail;
  if (a != nullptr && a->temporal) {
    tail = w.plural(rel) + " are all in the same " + w.attr_singular(rel, attr);
  } else {
    tail = w.plural(rel) + " all have the same " + w.attr_singular(rel, attr);
  }
  return {"Find " + *subj + " whose " + tail, ""};
}

Rendered render_superlative(const qg::QueryGraph& g, const SchemaGraph& schema, const Motif& m, const Words& w) {
  std::size_t site = 0;
  for (; site < g.nested.size(); ++site) {
    if (g.nested[site].connector == qg::Connector::CompareAll) break;
  }
  if (g.nested.size() != 1 || site != 0) return {std::nullopt, "other nested conditions are present"};
  const qg::QueryGraph& child = *g.nested.front().child;
  if (!only_crossing_equalities(child)) return {std::nullopt, "the ALL subquery has conditions beyond correlation"};
  std::vector<std::string> same;
  for (const auto& e : child.joins) {
    if (e.to_level != 1 || !text::iequals(e.to_alias, m.params.at("alias")) ||
        !text::iequals(e.from_attribute, e.to_attribute))
      return {std::nullopt, "the correlation is not a same-attribute match"};
    same.push_back(w.attr_singular(m.params.at("relation"), e.to_attribute));
  }
  qg::QueryGraph outer = g;
  outer.nested.clear();
  std::string root = root_of(outer, schema);
  if (!text::iequals(root, m.params.at("alias"))) return {std::nullopt, "the superlative is not on the answer relation"};
  Rendered base = render_plural(outer, schema);
  if (!base.text) return base;
  std::string out = *base.text + " with the " + m.params.at("superlative") + " " +
                    w.attr_singular(m.params.at("relation"), m.params.at("attribute"));
  if (!same.empty()) out += " among " + w.plural(m.params.at("relation")) + " with the same " + text::join_list(same);
  return {out, ""};
}

std::string describe(const Motif& m) {
  std::vector<std::string> params;
  for (const auto& [k, v] : m.params) params.push_back(k + "=" + v);
  return std::string(to_string(m.kind)) + "(" + text::join(params, ", ") + ")";
}

std::string higher_order_note(const Motif& m, const Words& w) {
  if (m.kind == Motif::Kind::SameValue) {
    const std::string& rel = m.params.at("relation");
    const std::string& attr = m.params.at("attribute");
    const AttributeNode* a = w.schema.find_attribute(rel, attr);
    std::string reading = a && a->temporal ? "all in the same " + w.attr_singular(rel, attr)
                                            : "all with the same " + w.attr_singular(rel, attr);
    return "HigherOrder: count(distinct " + m.params.at("alias") + "." + attr + ") = 1 is read as '" + reading +
           "' (SameValue motif); this reading is a heuristic";
  }
  return "HigherOrder: the ALL comparison on " + m.params.at("alias") + "." + m.params.at("attribute") +
         " is read as '" + m.params.at("superlative") + "' (SuperlativeAll motif); this reading is a heuristic";
}

// ---------------------------------------------------------------------------
// Procedural rendering.

class Procedural {
 public:
  Procedural(const qg::QueryGraph& g, const SchemaGraph& schema) : g_(g), schema_(schema), w_{schema} {
    count(g.source);
  }

  std::vector<std::string> steps() {
    const sql::Query& q = g_.source;
    Lexicalizer lx(
        schema_, [&](const std::string& alias, const std::string& rel, std::size_t) { return ref(alias, rel); },
        [&](const std::string& rel, const std::string& alias, bool plural) { return bare(rel, alias, plural); });
    lx.scopes.push_back(&q);
    std::vector<std::string> out;
    if (q.from.empty()) return {"Report nothing."};

    // Scans, folding foreign-key joins into one combination step.
    std::set<std::size_t> used;
    std::set<std::string, text::ILess> reached{q.from.front().alias};
    std::vector<std::string> combined;
    out.push_back("Consider each " + bare(q.from.front().relation, q.from.front().alias, false) + ".");
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t i = 0; i < q.where.size(); ++i) {
        if (used.count(i)) continue;
        auto link = fk_link(q, q.where[i]);
        if (!link) continue;
        bool a = reached.count(link->first) > 0, b = reached.count(link->second) > 0;
        if (a == b) continue;
        const std::string& fresh = a ? link->second : link->first;
        reached.insert(fresh);
        used.insert(i);
        const sql::FromItem* f = q.find_alias(fresh);
        combined.push_back(bare(f->relation, f->alias, true));
        grew = true;
      }
    }
    if (!combined.empty()) out.push_back("Combine it with the matching " + text::join_list(combined) + ".");
    for (const auto& f : q.from) {
      if (reached.insert(f.alias).second) out.push_back("Pair each combination with each " + bare(f.relation, f.alias, false) + ".");
    }
    std::vector<std::string> filters;
    for (std::size_t i = 0; i < q.where.size(); ++i) {
      if (used.count(i)) continue;
      const sql::Atom& a = q.where[i];
      if (is_local_join(a)) {
        out.push_back("Keep combinations where " + lx.atom(a) + ".");
      } else if (std::holds_alternative<sql::Compare>(a) && sql::subqueries(a).empty()) {
        filters.push_back(lx.atom(a));
      }
    }
    if (!filters.empty()) out.push_back("Keep those where " + text::join(filters, " and ") + ".");
    for (const auto& a : q.where) {
      if (std::holds_alternative<sql::Compare>(a) && sql::subqueries(a).empty()) continue;
      out.push_back("Keep those where " + lx.atom(a) + ".");
    }
    bool grouped = !q.group_by.empty();
    if (grouped) {
      std::vector<std::string> cols;
      for (const auto& c : q.group_by) cols.push_back(lx.column(c));
      out.push_back("Group the combinations by " + text::join_list(cols) + ".");
    }
    lx.grouped = grouped;
    for (const auto& a : q.having) out.push_back(std::string(grouped ? "Keep groups where " : "Keep the result if ") + lx.atom(a) + ".");
    if (!q.order_by.empty()) {
      std::vector<std::string> cols;
      for (const auto& o : q.order_by) cols.push_back(lx.column(o.column) + (o.descending ? " in descending order" : ""));
      out.push_back("Sort the results by " + text::join_list(cols) + ".");
    }
    if (q.select_star) {
      std::vector<std::string> items;
      for (const auto& f : q.from) items.push_back(ref(f.alias, f.relation));
      out.push_back("Report every attribute of " + text::join_list(items) + ".");
    } else {
      std::vector<std::string> items;
      for (const auto& s : q.select) items.push_back(lx.expr(s.expr));
      out.push_back("Report " + text::join_list(items) + ".");
    }
    return out;
  }

 private:
  const qg::QueryGraph& g_;
  const SchemaGraph& schema_;
  Words w_;
  std::map<std::string, std::size_t, text::ILess> counts_;

  void count(const sql::Query& q) {
    for (const auto& f : q.from) ++counts_[f.relation];
    auto nested = [&](const std::vector<sql::Atom>& atoms) {
      for (const auto& a : atoms) {
        for (const sql::Query* s : sql::subqueries(a)) count(*s);
      }
    };
    nested(q.where);
    nested(q.having);
    for (const auto& s : q.select) {
      if (const auto* sq = std::get_if<sql::ScalarSubquery>(&s.expr)) count(*sq->query);
    }
  }

  bool repeated(const std::string& rel) const {
    auto it = counts_.find(rel);
    return it != counts_.end() && it->second > 1;
  }

  std::string ref(const std::string& alias, const std::string& rel) const {
    return repeated(rel) ? w_.singular(rel) + " " + alias : "the " + w_.singular(rel);
  }

  std::string bare(const std::string& rel, const std::string& alias, bool plural) const {
    std::string noun = plural ? w_.plural(rel) : w_.singular(rel);
    return repeated(rel) ? noun + " " + alias : noun;
  }

  static bool is_local_join(const sql::Atom& a) {
    const auto* c = std::get_if<sql::Compare>(&a);
    if (c == nullptr) return false;
    const auto* l = std::get_if<sql::ColumnRef>(&c->lhs);
    const auto* r = std::get_if<sql::ColumnRef>(&c->rhs);
    return l && r && l->outer_level == 0 && r->outer_level == 0 && !text::iequals(l->alias, r->alias);
  }

  std::optional<std::pair<std::string, std::string>> fk_link(const sql::Query& q, const sql::Atom& a) const {
    if (!is_local_join(a)) return std::nullopt;
    const auto& c = std::get<sql::Compare>(a);
    if (c.op != sql::CompareOp::Eq) return std::nullopt;
    const auto& l = std::get<sql::ColumnRef>(c.lhs);
    const auto& r = std::get<sql::ColumnRef>(c.rhs);
    const sql::FromItem* lf = q.find_alias(l.alias);
    const sql::FromItem* rf = q.find_alias(r.alias);
    if (!lf || !rf || schema_.find_join(lf->relation, l.attribute, rf->relation, r.attribute) == nullptr)
      return std::nullopt;
    return std::make_pair(l.alias, r.alias);
  }
};

}  // namespace

// ---------------------------------------------------------------------------

std::vector<MotifPattern> load_motif_patterns(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedDocument, std::string("motif pattern file: ") + e.what(), e.byte);
  }
  if (!doc.is_array()) throw Error(ErrorKind::MalformedDocument, "motif pattern file must be a JSON list");
  std::vector<MotifPattern> out;
  for (const auto& entry : doc) {
    if (!entry.is_object() || !entry.contains("phrase") || !entry["phrase"].is_string())
      throw Error(ErrorKind::MalformedDocument, "motif pattern entries need a string 'phrase'");
    MotifPattern p;
    p.phrase = entry["phrase"].get<std::string>();
    if (entry.contains("shape")) {
      const auto& shape = entry["shape"];
      if (!shape.is_object()) throw Error(ErrorKind::MalformedDocument, "'shape' must be an object");
      if (shape.contains("class")) {
        if (!shape["class"].is_string()) throw Error(ErrorKind::MalformedDocument, "'class' must be a string");
        p.label = parse_class_label(shape["class"].get<std::string>());
        if (!p.label) throw Error(ErrorKind::MalformedDocument, "unknown class '" + shape["class"].get<std::string>() + "'");
      }
      if (shape.contains("relations")) {
        if (!shape["relations"].is_object()) throw Error(ErrorKind::MalformedDocument, "'relations' must be an object");
        for (const auto& [rel, n] : shape["relations"].items()) {
          if (!n.is_number_unsigned()) throw Error(ErrorKind::MalformedDocument, "relation counts must be positive integers");
          p.relations[rel] = n.get<std::size_t>();
        }
      }
      if (shape.contains("projections")) {
        if (!shape["projections"].is_array()) throw Error(ErrorKind::MalformedDocument, "'projections' must be a list");
        for (const auto& proj : shape["projections"]) {
          if (!proj.is_string()) throw Error(ErrorKind::MalformedDocument, "projections are REL.attribute strings");
          p.projections.push_back(proj.get<std::string>());
        }
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

bool matches(const MotifPattern& pattern, const qg::QueryGraph& g, const QueryClass& cls) {
  if (pattern.label && *pattern.label != cls.label) return false;
  if (!pattern.relations.empty()) {
    std::map<std::string, std::size_t, text::ILess> counts;
    for (const auto& n : g.nodes) ++counts[n.relation];
    if (counts.size() != pattern.relations.size()) return false;
    for (const auto& [rel, n] : pattern.relations) {
      auto it = counts.find(rel);
      if (it == counts.end() || it->second != n) return false;
    }
  }
  if (!pattern.projections.empty()) {
    if (g.projections.size() != pattern.projections.size()) return false;
    for (std::size_t i = 0; i < g.projections.size(); ++i) {
      const auto* c = std::get_if<sql::ColumnRef>(&g.projections[i].expr);
      const qg::QueryNode* n = c ? g.find_node(c->alias) : nullptr;
      if (n == nullptr || !text::iequals(n->relation + "." + c->attribute, pattern.projections[i])) return false;
    }
  }
  return true;
}

std::string lexicalize_predicate(const sql::Atom& atom, const sql::Query& scope, const SchemaGraph& schema) {
  Words w{schema};
  // Ordinals follow FROM order within each scope.
  std::vector<const sql::Query*>* scopes_ptr = nullptr;
  auto ordinal_ref = [&](const std::string& alias, const std::string& rel, std::size_t level) {
    const sql::Query* q = (*scopes_ptr)[scopes_ptr->size() - 1 - level];
    std::size_t index = 0, total = 0;
    for (const auto& f : q->from) {
      if (!text::iequals(f.relation, rel)) continue;
      ++total;
      if (text::iequals(f.alias, alias)) index = total;
    }
    return total > 1 ? "the " + text::ordinal(index) + " " + w.singular(rel) : "the " + w.singular(rel);
  };
  Lexicalizer lx(schema, ordinal_ref, [&](const std::string& rel, const std::string&, bool plural) {
    return plural ? w.plural(rel) : w.singular(rel);
  });
  scopes_ptr = &lx.scopes;
  lx.scopes.push_back(&scope);
  lx.grouped = !scope.group_by.empty();
  return lx.atom(atom, true);
}

TranslationResult translate_procedural(const qg::QueryGraph& g, const SchemaGraph& schema) {
  TranslationResult r;
  r.style = TranslationStyle::Procedural;
  auto steps = Procedural(g, schema).steps();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) r.text += "\n";
    r.text += std::to_string(i + 1) + ". " + text::normalize_whitespace(steps[i]);
  }
  return r;
}

TranslationResult translate(const qg::QueryGraph& g, const SchemaGraph& schema, const QueryClass& cls,
                            const std::vector<MotifPattern>& patterns) {
  Words w{schema};
  auto procedural = [&](std::vector<std::string> notes) {
    TranslationResult r = translate_procedural(g, schema);
    r.class_used = cls;
    r.notes = std::move(notes);
    return r;
  };
  auto declarative = [&](std::string text, std::vector<std::string> notes) {
    TranslationResult r;
    r.text = std::move(text);
    r.style = TranslationStyle::Declarative;
    r.class_used = cls;
    r.notes = std::move(notes);
    return r;
  };

  for (const auto& p : patterns) {
    if (matches(p, g, cls)) return declarative(p.phrase, {"rendered by a user motif pattern"});
  }

  Rendered rendered;
  switch (cls.label) {
    case QueryClassLabel::Path:
    case QueryClassLabel::Subgraph:
      rendered = render_plural(g, schema);
      break;
    case QueryClassLabel::GraphMultiInstance:
    case QueryClassLabel::GraphCyclic:
      rendered = render_ordinal(g, schema);
      break;
    case QueryClassLabel::NestedFlattenable: {
      std::string why = flatten_obstacle(g.source);
      if (!why.empty()) return procedural({"not flattenable: " + why});
      sql::Query flat = flatten(g.source);
      qg::QueryGraph fg = qg::build(flat, schema);
      QueryClass fc = classify(fg, &schema);
      TranslationResult r = translate(fg, schema, fc, patterns);
      r.class_used = cls;
      r.notes.insert(r.notes.begin(), "flattened to: " + sql::to_sql(flat) + " (" + std::string(to_string(fc.label)) + ")");
      return r;
    }
    case QueryClassLabel::NestedGeneral:
    case QueryClassLabel::Aggregate:
    case QueryClassLabel::HigherOrder: {
      std::vector<std::string> notes;
      std::vector<Motif> motifs = detect_motifs(g, &schema);
      for (const auto& m : motifs) {
        if (is_higher_order(m)) notes.push_back(higher_order_note(m, w));
      }
      if (cls.label == QueryClassLabel::HigherOrder && notes.empty())
        notes.push_back("HigherOrder: the meaning is not derivable from the query graph");
      for (const auto& m : motifs) {
        Rendered attempt;
        switch (m.kind) {
          case Motif::Kind::Division: attempt = render_division(g, m, w); break;
          case Motif::Kind::SameValue: attempt = render_same_value(g, m, w); break;
          case Motif::Kind::SuperlativeAll: attempt = render_superlative(g, schema, m, w); break;
        }
        if (attempt.text) {
          notes.push_back(describe(m) + " motif rendered declaratively");
          return declarative(text::normalize_whitespace(*attempt.text), notes);
        }
        notes.push_back(describe(m) + " motif does not cover the query: " + attempt.why);
      }
      if (motifs.empty()) notes.push_back("no motif covers the query");
      notes.push_back("rendered procedurally");
      return procedural(notes);
    }
  }
  if (!rendered.text) return procedural({"declarative rendering unavailable: " + rendered.why});
  return declarative(*rendered.text, {});
}

}  // namespace talkback
