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

#include "talkback/query_graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace talkback::qg {

std::string_view to_string(Connector c) {
  switch (c) {
    case Connector::In: return "in";
    case Connector::Exists: return "exists";
    case Connector::NotExists: return "not exists";
    case Connector::CompareAll: return "compare all";
    case Connector::Scalar: return "scalar";
  }
  return "?";
}

std::string_view to_string(Site s) {
  switch (s) {
    case Site::Select: return "select";
    case Site::Where: return "where";
    case Site::Having: return "having";
  }
  return "?";
}

bool NestedQuery::operator==(const NestedQuery&) const = default;

const QueryNode* QueryGraph::find_node(std::string_view alias) const {
  for (const auto& n : nodes) {
    if (text::iequals(n.alias, alias)) return &n;
  }
  return nullptr;
}

namespace {

using Scope = std::map<std::string, std::string, text::ILess>;  // alias -> relation

bool escapes(const sql::Query& q, std::size_t depth);

bool escapes(const sql::ColumnRef& c, std::size_t depth) { return c.outer_level > depth; }

bool escapes(const sql::Expr& e, std::size_t depth) {
  if (const auto* c = std::get_if<sql::ColumnRef>(&e)) return escapes(*c, depth);
  if (const auto* d = std::get_if<sql::CountDistinct>(&e)) return escapes(d->column, depth);
  if (const auto* s = std::get_if<sql::ScalarSubquery>(&e)) return escapes(*s->query, depth + 1);
  return false;
}

bool escapes(const sql::Atom& atom, std::size_t depth) {
  return std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, sql::Compare>) {
          return escapes(a.lhs, depth) || escapes(a.rhs, depth);
        } else if constexpr (std::is_same_v<T, sql::Exists>) {
          return escapes(*a.query, depth + 1);
        } else {
          return escapes(a.lhs, depth) || escapes(*a.query, depth + 1);
        }
      },
      atom);
}

bool escapes(const sql::Query& q, std::size_t depth) {
  for (const auto& s : q.select) {
    if (escapes(s.expr, depth)) return true;
  }
  for (const auto& a : q.where) {
    if (escapes(a, depth)) return true;
  }
  for (const auto& a : q.having) {
    if (escapes(a, depth)) return true;
  }
  for (const auto& c : q.group_by) {
    if (escapes(c, depth)) return true;
  }
  return false;
}

struct Refs {
  std::set<std::string, text::ILess> local;
  bool outer = false;
  bool aggregate = false;
  bool subquery = false;
};

void collect(const sql::Expr& e, Refs& r) {
  if (const auto* c = std::get_if<sql::ColumnRef>(&e)) {
    if (c->outer_level == 0) r.local.insert(c->alias);
    else r.outer = true;
  } else if (const auto* d = std::get_if<sql::CountDistinct>(&e)) {
    r.aggregate = true;
    if (d->column.outer_level == 0) r.local.insert(d->column.alias);
    else r.outer = true;
  } else if (std::holds_alternative<sql::CountStar>(e)) {
    r.aggregate = true;
  } else if (std::holds_alternative<sql::ScalarSubquery>(e)) {
    r.subquery = true;
  }
}

class Builder {
 public:
  explicit Builder(const SchemaGraph& graph) : graph_(graph) {}

  QueryGraph build(const sql::Query& q) {
    QueryGraph g;
    g.source = q;
    g.select_star = q.select_star;
    g.projections = q.select;
    g.group_note = q.group_by;
    g.order_note = q.order_by;
    Scope scope;
    for (const auto& f : q.from) {
      g.nodes.push_back(QueryNode{f.alias, f.relation, {}, {}, {}});
      scope[f.alias] = f.relation;
    }
    scopes_.push_back(scope);
    for (const auto& item : q.select) {
      if (const auto* c = std::get_if<sql::ColumnRef>(&item.expr)) {
        if (auto* n = node(g, *c)) n->select_part.push_back({c->attribute, item.alias, false});
      } else if (const auto* d = std::get_if<sql::CountDistinct>(&item.expr)) {
        if (auto* n = node(g, d->column))
          n->select_part.push_back({"count(distinct " + d->column.attribute + ")", item.alias, true});
      } else if (const auto* s = std::get_if<sql::ScalarSubquery>(&item.expr)) {
        add_nested(g, Connector::Scalar, Site::Select, std::nullopt, *s->query);
      }
    }
    for (const auto& a : q.where) place(g, a, Site::Where);
    for (const auto& a : q.having) place(g, a, Site::Having);
    scopes_.pop_back();
    return g;
  }

 private:
  const SchemaGraph& graph_;
  std::vector<Scope> scopes_;

  static QueryNode* node(QueryGraph& g, const sql::ColumnRef& c) {
    if (c.outer_level != 0) return nullptr;
    for (auto& n : g.nodes) {
      if (text::iequals(n.alias, c.alias)) return &n;
    }
    return nullptr;
  }

  std::string relation_of(const sql::ColumnRef& c) const {
    if (c.outer_level >= scopes_.size()) return "";
    const Scope& s = scopes_[scopes_.size() - 1 - c.outer_level];
    auto it = s.find(c.alias);
    return it == s.end() ? "" : it->second;
  }

  void add_nested(QueryGraph& g, Connector connector, Site site, std::optional<sql::Atom> atom,
                  const sql::Query& child) {
    NestedQuery n{connector, site, std::move(atom), Box<QueryGraph>(build(child)), is_correlated(child)};
    g.nested.push_back(std::move(n));
  }

  void place(QueryGraph& g, const sql::Atom& atom, Site site) {
    if (const auto* in = std::get_if<sql::InSubquery>(&atom)) {
      add_nested(g, Connector::In, site, atom, *in->query);
      return;
    }
    if (const auto* ex = std::get_if<sql::Exists>(&atom)) {
      add_nested(g, ex->negated ? Connector::NotExists : Connector::Exists, site, atom, *ex->query);
      return;
    }
    if (const auto* all = std::get_if<sql::CompareAll>(&atom)) {
      add_nested(g, Connector::CompareAll, site, atom, *all->query);
      return;
    }
    const auto& cmp = std::get<sql::Compare>(atom);
    Refs refs;
    collect(cmp.lhs, refs);
    collect(cmp.rhs, refs);
    if (refs.subquery) {
      for (const sql::Query* sub : sql::subqueries(atom)) add_nested(g, Connector::Scalar, site, atom, *sub);
      return;
    }
    const auto* lc = std::get_if<sql::ColumnRef>(&cmp.lhs);
    const auto* rc = std::get_if<sql::ColumnRef>(&cmp.rhs);
    if (refs.aggregate) {
      if (refs.local.size() == 1 && !refs.outer) {
        node(g, sql::ColumnRef{*refs.local.begin(), "", 0})->having_part.push_back(cmp);
      } else {
        g.residual.push_back(cmp);
      }
      return;
    }
    if (lc && rc && !(lc->outer_level == 0 && rc->outer_level == 0 && text::iequals(lc->alias, rc->alias)) &&
        (lc->outer_level == 0 || rc->outer_level == 0)) {
      // Keep the local end first so crossing edges point outward.
      const sql::ColumnRef* a = lc;
      const sql::ColumnRef* b = rc;
      sql::CompareOp op = cmp.op;
      if (a->outer_level != 0) {
        std::swap(a, b);
        op = sql::mirror(op);
      }
      QueryJoinEdge e;
      e.from_alias = a->alias;
      e.from_attribute = a->attribute;
      e.to_alias = b->alias;
      e.to_attribute = b->attribute;
      e.op = op;
      e.crosses_nesting = b->outer_level != 0;
      e.to_level = b->outer_level;
      e.in_having = site == Site::Having;
      e.fk_backed = op == sql::CompareOp::Eq &&
                    graph_.find_join(relation_of(*a), a->attribute, relation_of(*b), b->attribute) != nullptr;
      g.joins.push_back(std::move(e));
      return;
    }
    if (refs.local.size() == 1) {
      QueryNode* n = node(g, sql::ColumnRef{*refs.local.begin(), "", 0});
      if (refs.outer) {
        // A local column against an outer expression that is not a plain column.
        g.residual.push_back(cmp);
      } else if (site == Site::Having) {
        n->having_part.push_back(cmp);
      } else {
        n->where_part.push_back(cmp);
      }
      return;
    }
    if (refs.local.empty() && refs.outer) {
      g.outer_filters.push_back(cmp);
      return;
    }
    g.residual.push_back(cmp);
  }
};

std::string escape_record(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::string_view("{}|<>\"").find(c) != std::string_view::npos) out += '\\';
    out += c;
  }
  return out;
}

std::string escape_label(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string render_compare(const sql::Compare& c) { return sql::to_sql(sql::Atom{c}); }

class DotWriter {
 public:
  std::string run(const QueryGraph& g) {
    out_ = "digraph query {\n  rankdir=LR;\n  compound=true;\n  node [shape=record];\n";
    write(g, "q0", 1);
    for (const auto& line : cross_edges_) out_ += line;
    out_ += "}\n";
    return out_;
  }

 private:
  std::string out_;
  std::vector<std::string> cross_edges_;
  std::size_t clusters_ = 0;
  // Node ids of enclosing graphs, innermost last.
  std::vector<std::string> prefixes_;

  static std::string id(const std::string& prefix, const std::string& alias) {
    return "\"" + prefix + "_" + escape_label(alias) + "\"";
  }

  void write(const QueryGraph& g, const std::string& prefix, std::size_t indent) {
    std::string pad(indent * 2, ' ');
    prefixes_.push_back(prefix);
    for (const auto& n : g.nodes) {
      std::vector<std::string> select;
      for (const auto& s : n.select_part)
        select.push_back(escape_record(s.attribute + (s.output_alias.empty() ? "" : ": " + s.output_alias)));
      std::vector<std::string> where;
      for (const auto& w : n.where_part) where.push_back(escape_record(render_compare(w)));
      std::vector<std::string> having;
      for (const auto& h : n.having_part) having.push_back(escape_record(render_compare(h)));
      out_ += pad + id(prefix, n.alias) + " [label=\"{\\<\\<FROM\\>\\>\\n" + escape_record(n.relation + " " + n.alias) +
              "|\\<\\<SELECT\\>\\>\\n" + text::join(select, "\\n") + "|\\<\\<WHERE\\>\\>\\n" +
              text::join(where, "\\n") + "|\\<\\<HAVING\\>\\>\\n" + text::join(having, "\\n") + "}\"];\n";
    }
    for (const auto& e : g.joins) {
      std::string label = e.from_alias + "." + e.from_attribute + " " + std::string(sql::to_string(e.op)) + " " +
                          e.to_alias + "." + e.to_attribute;
      std::string style = e.fk_backed ? "" : ", style=bold";
      if (e.crosses_nesting) {
        const std::string& outer = prefixes_[prefixes_.size() - 1 - e.to_level];
        cross_edges_.push_back("  " + id(prefix, e.from_alias) + " -> " + id(outer, e.to_alias) + " [label=\"" +
                               escape_label(label) + "\", style=dotted];\n");
      } else {
        out_ += pad + id(prefix, e.from_alias) + " -> " + id(prefix, e.to_alias) + " [label=\"" + escape_label(label) +
                "\"" + style + "];\n";
      }
    }
    std::string anchor = g.nodes.empty() ? "" : id(prefix, g.nodes.front().alias);
    if (!g.group_note.empty()) {
      std::vector<std::string> cols;
      for (const auto& c : g.group_note) cols.push_back(c.alias + "." + c.attribute);
      out_ += pad + "\"" + prefix + "_group\" [shape=note, label=\"<<GROUP BY>>\\n" + escape_label(text::join(cols, ", ")) +
              "\"];\n";
      if (!anchor.empty()) out_ += pad + anchor + " -> \"" + prefix + "_group\" [style=dotted, arrowhead=none];\n";
    }
    if (!g.order_note.empty()) {
      std::vector<std::string> cols;
      for (const auto& o : g.order_note)
        cols.push_back(o.column.alias + "." + o.column.attribute + (o.descending ? " desc" : " asc"));
      out_ += pad + "\"" + prefix + "_order\" [shape=note, label=\"<<ORDER BY>>\\n" + escape_label(text::join(cols, ", ")) +
              "\"];\n";
      if (!anchor.empty()) out_ += pad + anchor + " -> \"" + prefix + "_order\" [style=dotted, arrowhead=none];\n";
    }
    std::vector<std::string> residual;
    for (const auto& r : g.residual) residual.push_back(render_compare(r));
    for (const auto& r : g.outer_filters) residual.push_back(render_compare(r));
    if (!residual.empty()) {
      out_ += pad + "\"" + prefix + "_conditions\" [shape=note, label=\"" + escape_label(text::join(residual, "\\n")) +
              "\"];\n";
    }
    for (const auto& n : g.nested) {
      std::string child_prefix = "q" + std::to_string(++clusters_);
      out_ += pad + "subgraph cluster_" + child_prefix + " {\n" + pad + "  label=\"NQ" + std::to_string(clusters_) +
              "\";\n" + pad + "  style=dashed;\n";
      write(*n.child, child_prefix, indent + 1);
      out_ += pad + "}\n";
      if (!anchor.empty() && !n.child->nodes.empty()) {
        std::string label = std::string(to_string(n.connector)) + " (" + std::string(to_string(n.site)) + ")";
        out_ += pad + anchor + " -> " + id(child_prefix, n.child->nodes.front().alias) + " [lhead=cluster_" +
                child_prefix + ", style=dashed, label=\"" + label + "\"];\n";
      }
    }
    prefixes_.pop_back();
  }
};

}  // namespace

bool is_correlated(const sql::Query& q) { return escapes(q, 0); }

QueryGraph build(const sql::Query& resolved, const SchemaGraph& graph) { return Builder(graph).build(resolved); }

std::size_t total_nodes(const QueryGraph& g) {
  std::size_t n = g.nodes.size();
  for (const auto& c : g.nested) n += total_nodes(*c.child);
  return n;
}

std::size_t placed_predicates(const QueryGraph& g) {
  std::size_t n = g.joins.size() + g.outer_filters.size() + g.residual.size();
  for (const auto& node : g.nodes) n += node.where_part.size() + node.having_part.size();
  // A comparison between two scalar subqueries yields two entries for one atom.
  const sql::Atom* last = nullptr;
  for (const auto& nested : g.nested) {
    if (nested.atom) {
      if (last == nullptr || !(*last == *nested.atom)) ++n;
      last = &*nested.atom;
    }
    n += placed_predicates(*nested.child);
  }
  return n;
}

Shape shape(const QueryGraph& g) {
  Shape s;
  std::map<std::string, std::size_t, text::ILess> index;
  std::map<std::string, std::size_t, text::ILess> per_relation;
  for (const auto& n : g.nodes) {
    s.degree[n.alias] = 0;
    index.emplace(n.alias, index.size());
    if (++per_relation[n.relation] > 1) s.multi_instance = true;
  }
  std::vector<std::size_t> parent(index.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::vector<std::size_t> any_parent = parent;
  std::function<std::size_t(std::size_t)> find_any = [&](std::size_t x) {
    return any_parent[x] == x ? x : any_parent[x] = find_any(any_parent[x]);
  };
  std::size_t local_edges = 0;
  bool any_cycle = false;
  for (const auto& e : g.joins) {
    if (e.crosses_nesting) continue;
    ++s.degree[e.from_alias];
    ++s.degree[e.to_alias];
    ++local_edges;
    std::size_t a = index.at(e.from_alias);
    std::size_t b = index.at(e.to_alias);
    std::size_t ra = find_any(a), rb = find_any(b);
    if (ra == rb) any_cycle = true;
    else any_parent[ra] = rb;
    if (e.op != sql::CompareOp::Eq) continue;
    std::size_t ea = find(a), eb = find(b);
    if (ea == eb) s.cyclic = true;
    else parent[ea] = eb;
  }
  for (const auto& [alias, d] : s.degree) s.max_degree = std::max(s.max_degree, d);
  // n nodes, n-1 edges, acyclic => connected tree; degree <= 2 makes it a path.
  s.simple_path = !any_cycle && local_edges + 1 == g.nodes.size() && s.max_degree <= 2;

  std::function<void(const QueryGraph&)> scan = [&](const QueryGraph& q) {
    if (!q.group_note.empty()) s.aggregate = true;
    for (const auto& p : q.projections) {
      if (sql::is_aggregate(p.expr)) s.aggregate = true;
    }
    for (const auto& a : q.source.having) {
      if (const auto* c = std::get_if<sql::Compare>(&a)) {
        if (sql::is_aggregate(c->lhs) || sql::is_aggregate(c->rhs)) s.aggregate = true;
      }
    }
    for (const auto& n : q.nested) scan(*n.child);
  };
  scan(g);
  for (const auto& n : g.nested) {
    s.connectors.insert(n.connector);
    if (n.correlated) s.correlated_nesting = true;
  }
  return s;
}

std::string emit_dot(const QueryGraph& g) { return DotWriter().run(g); }

}  // namespace talkback::qg
