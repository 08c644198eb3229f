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

#include "talkback/evaluator.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "talkback/error.hpp"

namespace talkback {

namespace {

struct CellVectorLess {
  bool operator()(const std::vector<Cell>& a, const std::vector<Cell>& b) const {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      int c = compare_cells(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return a.size() < b.size();
  }
};

bool compare(const Cell& a, sql::CompareOp op, const Cell& b) {
  if (is_null(a) || is_null(b)) return false;
  int c = compare_cells(a, b);
  switch (op) {
    case sql::CompareOp::Eq: return c == 0;
    case sql::CompareOp::Ne: return c != 0;
    case sql::CompareOp::Lt: return c < 0;
    case sql::CompareOp::Le: return c <= 0;
    case sql::CompareOp::Gt: return c > 0;
    case sql::CompareOp::Ge: return c >= 0;
  }
  return false;
}

using Binding = std::vector<const Tuple*>;

struct Frame {
  const sql::Query* query = nullptr;
  const Binding* binding = nullptr;        // null for an empty group
  const std::vector<Binding>* group = nullptr;  // set while evaluating grouped output
};

class Evaluator {
 public:
  explicit Evaluator(const Database& db) : db_(db) {}

  ResultSet run(const sql::Query& q, std::vector<Frame>& stack) {
    std::vector<const std::vector<Tuple>*> tables;
    static const std::vector<Tuple> kEmpty;
    for (const auto& f : q.from) {
      auto it = db_.tables.find(f.relation);
      tables.push_back(it == db_.tables.end() ? &kEmpty : &it->second);
    }

    std::vector<Binding> rows;
    Binding current(q.from.size(), nullptr);
    stack.push_back(Frame{&q, &current, nullptr});
    enumerate(q, tables, 0, current, rows, stack);
    stack.pop_back();

    ResultSet out;
    out.columns = column_names(q);
    bool grouped = !q.group_by.empty() || !q.having.empty() || has_aggregate(q);
    // (binding used for ordering, output row)
    std::vector<std::pair<const Binding*, std::vector<Cell>>> produced;
    std::vector<std::vector<Binding>> groups;
    if (grouped) {
      std::map<std::vector<Cell>, std::size_t, CellVectorLess> index;
      for (const auto& b : rows) {
        std::vector<Cell> key;
        stack.push_back(Frame{&q, &b, nullptr});
        for (const auto& c : q.group_by) key.push_back(column(c, stack));
        stack.pop_back();
        auto [it, fresh] = index.emplace(key, groups.size());
        if (fresh) groups.emplace_back();
        groups[it->second].push_back(b);
      }
      if (q.group_by.empty() && groups.empty()) groups.emplace_back();
      for (const auto& g : groups) {
        const Binding* rep = g.empty() ? nullptr : &g.front();
        stack.push_back(Frame{&q, rep, &g});
        bool keep = std::all_of(q.having.begin(), q.having.end(), [&](const sql::Atom& a) { return test(a, stack); });
        if (keep) produced.emplace_back(rep, project(q, stack));
        stack.pop_back();
      }
    } else {
      for (const auto& b : rows) {
        stack.push_back(Frame{&q, &b, nullptr});
        produced.emplace_back(&b, project(q, stack));
        stack.pop_back();
      }
    }
    if (!q.order_by.empty()) {
      std::vector<std::pair<std::vector<Cell>, std::size_t>> keyed;
      for (std::size_t i = 0; i < produced.size(); ++i) {
        std::vector<Cell> key;
        stack.push_back(Frame{&q, produced[i].first, nullptr});
        for (const auto& o : q.order_by) key.push_back(column(o.column, stack));
        stack.pop_back();
        keyed.emplace_back(std::move(key), i);
      }
      std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
        for (std::size_t k = 0; k < q.order_by.size(); ++k) {
          int c = compare_cells(a.first[k], b.first[k]);
          if (c != 0) return q.order_by[k].descending ? c > 0 : c < 0;
        }
        return false;
      });
      for (const auto& [key, i] : keyed) out.rows.push_back(produced[i].second);
    } else {
      for (auto& p : produced) out.rows.push_back(std::move(p.second));
    }
    return out;
  }

 private:
  const Database& db_;

  static bool has_aggregate(const sql::Query& q) {
    return std::any_of(q.select.begin(), q.select.end(), [](const auto& s) { return sql::is_aggregate(s.expr); });
  }

  std::vector<std::string> column_names(const sql::Query& q) const {
    std::vector<std::string> names;
    if (q.select_star) {
      for (const auto& f : q.from) {
        auto it = db_.tables.find(f.relation);
        if (it == db_.tables.end() || it->second.empty()) continue;
        for (const auto& [attr, value] : it->second.front().values) names.push_back(f.alias + "." + attr);
      }
      return names;
    }
    for (const auto& s : q.select) names.push_back(s.alias.empty() ? sql::to_sql(s.expr) : s.alias);
    return names;
  }

  void enumerate(const sql::Query& q, const std::vector<const std::vector<Tuple>*>& tables, std::size_t i,
                 Binding& current, std::vector<Binding>& rows, std::vector<Frame>& stack) {
    if (i == tables.size()) {
      if (std::all_of(q.where.begin(), q.where.end(), [&](const sql::Atom& a) { return test(a, stack); }))
        rows.push_back(current);
      return;
    }
    for (const auto& t : *tables[i]) {
      current[i] = &t;
      enumerate(q, tables, i + 1, current, rows, stack);
    }
    current[i] = nullptr;
  }

  std::vector<Cell> project(const sql::Query& q, std::vector<Frame>& stack) {
    std::vector<Cell> row;
    if (q.select_star) {
      const Binding* b = stack.back().binding;
      if (b == nullptr) return row;
      for (const Tuple* t : *b) {
        for (const auto& [attr, value] : t->values) row.push_back(value);
      }
      return row;
    }
    for (const auto& s : q.select) row.push_back(value(s.expr, stack));
    return row;
  }

  static Cell column(const sql::ColumnRef& c, const std::vector<Frame>& stack) {
    if (c.outer_level >= stack.size()) throw Error(ErrorKind::EvaluationError, "column " + c.alias + "." + c.attribute + " is out of scope");
    const Frame& f = stack[stack.size() - 1 - c.outer_level];
    if (f.binding == nullptr) return Cell{};
    for (std::size_t i = 0; i < f.query->from.size(); ++i) {
      if (!text::iequals(f.query->from[i].alias, c.alias)) continue;
      const Tuple* t = (*f.binding)[i];
      if (t == nullptr) return Cell{};
      const Cell* v = t->find(c.attribute);
      if (v == nullptr) throw Error(ErrorKind::EvaluationError, "tuple of " + t->relation + " lacks " + c.attribute);
      return *v;
    }
    throw Error(ErrorKind::EvaluationError, "alias " + c.alias + " is not bound");
  }

  Cell value(const sql::Expr& e, std::vector<Frame>& stack) {
    if (const auto* c = std::get_if<sql::ColumnRef>(&e)) return column(*c, stack);
    if (const auto* k = std::get_if<sql::Constant>(&e)) return k->value;
    if (std::holds_alternative<sql::CountStar>(e)) {
      const Frame& f = stack.back();
      if (f.group == nullptr) throw Error(ErrorKind::EvaluationError, "count(*) outside a grouped context");
      return static_cast<std::int64_t>(f.group->size());
    }
    if (const auto* d = std::get_if<sql::CountDistinct>(&e)) {
      Frame f = stack.back();
      if (f.group == nullptr) throw Error(ErrorKind::EvaluationError, "count(distinct) outside a grouped context");
      std::set<std::vector<Cell>, CellVectorLess> seen;
      for (const auto& b : *f.group) {
        stack.back().binding = &b;
        Cell v = column(d->column, stack);
        if (!is_null(v)) seen.insert({v});
      }
      stack.back() = f;
      return static_cast<std::int64_t>(seen.size());
    }
    const auto& sub = std::get<sql::ScalarSubquery>(e);
    ResultSet r = run(*sub.query, stack);
    if (r.rows.empty()) return Cell{};
    if (r.rows.size() > 1 || r.rows.front().size() != 1)
      throw Error(ErrorKind::EvaluationError, "scalar subquery returned more than one value");
    return r.rows.front().front();
  }

  bool test(const sql::Atom& atom, std::vector<Frame>& stack) {
    if (const auto* c = std::get_if<sql::Compare>(&atom)) {
      return compare(value(c->lhs, stack), c->op, value(c->rhs, stack));
    }
    if (const auto* in = std::get_if<sql::InSubquery>(&atom)) {
      Cell lhs = value(in->lhs, stack);
      if (is_null(lhs)) return false;
      ResultSet r = run(*in->query, stack);
      return std::any_of(r.rows.begin(), r.rows.end(),
                         [&](const auto& row) { return !row.empty() && compare(lhs, sql::CompareOp::Eq, row.front()); });
    }
    if (const auto* ex = std::get_if<sql::Exists>(&atom)) {
      ResultSet r = run(*ex->query, stack);
      return ex->negated ? r.rows.empty() : !r.rows.empty();
    }
    const auto& all = std::get<sql::CompareAll>(atom);
    Cell lhs = value(all.lhs, stack);
    ResultSet r = run(*all.query, stack);
    return std::all_of(r.rows.begin(), r.rows.end(),
                       [&](const auto& row) { return !row.empty() && compare(lhs, all.op, row.front()); });
  }
};

void constants_of(const sql::Query& q, std::vector<Cell>& out);

void constants_of(const sql::Expr& e, std::vector<Cell>& out) {
  if (const auto* k = std::get_if<sql::Constant>(&e)) out.push_back(k->value);
  if (const auto* s = std::get_if<sql::ScalarSubquery>(&e)) constants_of(*s->query, out);
}

void constants_of(const sql::Query& q, std::vector<Cell>& out) {
  for (const auto& s : q.select) constants_of(s.expr, out);
  auto atoms = [&](const std::vector<sql::Atom>& list) {
    for (const auto& a : list) {
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, sql::Compare>) {
              constants_of(x.lhs, out);
              constants_of(x.rhs, out);
            } else if constexpr (std::is_same_v<T, sql::Exists>) {
              constants_of(*x.query, out);
            } else {
              constants_of(x.lhs, out);
              constants_of(*x.query, out);
            }
          },
          a);
    }
  };
  atoms(q.where);
  atoms(q.having);
}

}  // namespace

bool same_multiset(const ResultSet& a, const ResultSet& b) {
  if (a.columns.size() != b.columns.size() || a.rows.size() != b.rows.size()) return false;
  auto x = a.rows;
  auto y = b.rows;
  std::sort(x.begin(), x.end(), CellVectorLess{});
  std::sort(y.begin(), y.end(), CellVectorLess{});
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (CellVectorLess{}(x[i], y[i]) || CellVectorLess{}(y[i], x[i])) return false;
  }
  return true;
}

std::string to_string(const ResultSet& r) {
  std::string out = text::join(r.columns, "\t") + "\n";
  for (const auto& row : r.rows) {
    std::vector<std::string> cells;
    for (const auto& c : row) cells.push_back(is_null(c) ? "NULL" : cell_to_string(c));
    out += text::join(cells, "\t") + "\n";
  }
  return out;
}

ResultSet evaluate(const sql::Query& resolved, const Database& db) {
  std::vector<Frame> stack;
  return Evaluator(db).run(resolved, stack);
}

std::vector<Cell> query_constants(const sql::Query& q) {
  std::vector<Cell> out;
  constants_of(q, out);
  return out;
}

Database random_database(const SchemaGraph& graph, std::uint64_t seed, std::size_t max_rows,
                         const std::vector<Cell>& seeds) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  std::vector<std::string> text_seeds;
  std::vector<std::int64_t> int_seeds;
  for (const auto& c : seeds) {
    if (const auto* s = std::get_if<std::string>(&c)) {
      if (std::find(text_seeds.begin(), text_seeds.end(), *s) == text_seeds.end()) text_seeds.push_back(*s);
    } else if (const auto* i = std::get_if<std::int64_t>(&c)) {
      if (std::find(int_seeds.begin(), int_seeds.end(), *i) == int_seeds.end()) int_seeds.push_back(*i);
    }
  }

  auto in_key = [&](const RelationNode& r, const std::string& attr) {
    for (const auto& key : r.keys) {
      for (const auto& k : key) {
        if (text::iequals(k, attr)) return true;
      }
    }
    return false;
  };
  auto foreign = [&](const std::string& rel, const std::string& attr) -> const JoinEdge* {
    for (const auto& j : graph.joins) {
      if (text::iequals(j.from_relation, rel) && text::iequals(j.from_key, attr)) return &j;
    }
    return nullptr;
  };

  Database db;
  // Phase one: every column except foreign keys.
  for (const auto& r : graph.relations) {
    std::size_t n = max_rows == 0 ? 0 : pick(max_rows + 1);
    auto attrs = graph.attributes_of(r.name);
    std::vector<Tuple>& table = db.tables[r.name];
    for (std::size_t row = 0; row < n; ++row) {
      Tuple t;
      t.relation = r.name;
      t.row = row;
      for (const AttributeNode* a : attrs) {
        std::size_t domain = in_key(r, a->name) ? std::max<std::size_t>(4, 2 * max_rows) : 4;
        Cell v;
        std::size_t k = pick(domain);
        if (a->type == ValueType::Integer) {
          v = k < int_seeds.size() ? int_seeds[k] : static_cast<std::int64_t>(k + 1);
        } else {
          v = k < text_seeds.size() ? text_seeds[k] : a->name + std::to_string(k + 1);
        }
        t.values.emplace_back(a->name, std::move(v));
      }
      table.push_back(std::move(t));
    }
  }
  // Phase two: foreign keys point at existing keys most of the time.
  for (const auto& r : graph.relations) {
    for (auto& t : db.tables[r.name]) {
      for (auto& [attr, value] : t.values) {
        const JoinEdge* fk = foreign(r.name, attr);
        if (fk == nullptr) continue;
        const auto& target = db.tables[fk->to_relation];
        bool hit = pick(10) < 8;
        if (hit && !target.empty()) {
          const Cell* ref = target[pick(target.size())].find(fk->to_key);
          if (ref != nullptr) value = *ref;
          continue;
        }
        if (std::holds_alternative<std::int64_t>(value)) value = static_cast<std::int64_t>(1000 + pick(1000));
        else value = "dangling" + std::to_string(pick(1000));
      }
    }
  }
  // Enforce every declared key by dropping later duplicates.
  for (const auto& r : graph.relations) {
    auto& table = db.tables[r.name];
    std::vector<std::set<std::vector<Cell>, CellVectorLess>> seen(r.keys.size());
    std::vector<Tuple> kept;
    for (auto& t : table) {
      bool duplicate = false;
      std::vector<std::vector<Cell>> keys;
      for (const auto& key : r.keys) {
        std::vector<Cell> values;
        for (const auto& k : key) values.push_back(*t.find(k));
        keys.push_back(std::move(values));
      }
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (seen[i].count(keys[i])) duplicate = true;
      }
      if (duplicate) continue;
      for (std::size_t i = 0; i < keys.size(); ++i) seen[i].insert(keys[i]);
      t.row = kept.size();
      kept.push_back(std::move(t));
    }
    table = std::move(kept);
  }
  return db;
}

}  // namespace talkback
