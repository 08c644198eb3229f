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

#include "talkback/sql_frontend.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <optional>
#include <set>

#include "talkback/error.hpp"

namespace talkback::sql {

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

CompareOp mirror(CompareOp op) {
  switch (op) {
    case CompareOp::Lt: return CompareOp::Gt;
    case CompareOp::Le: return CompareOp::Ge;
    case CompareOp::Gt: return CompareOp::Lt;
    case CompareOp::Ge: return CompareOp::Le;
    default: return op;
  }
}

bool is_aggregate(const Expr& e) {
  return std::holds_alternative<CountStar>(e) || std::holds_alternative<CountDistinct>(e);
}

const FromItem* Query::find_alias(std::string_view alias) const {
  for (const auto& f : from) {
    if (text::iequals(f.alias, alias)) return &f;
  }
  return nullptr;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Ident, QuotedIdent, Number, String, Symbol, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  std::size_t pos = 0;
};

const std::set<std::string, text::ILess>& reserved() {
  static const std::set<std::string, text::ILess> words = {
      "select", "from",  "where",  "and",    "or",    "not",   "in",      "exists", "all",   "any",
      "some",   "group", "by",     "having", "order", "asc",   "desc",    "as",     "distinct",
      "join",   "on",    "union",  "intersect", "except", "left", "right", "inner", "outer", "full",
      "cross",  "natural", "limit", "null",  "is",    "like",  "between", "case",   "when",  "then",
      "else",   "end"};
  return words;
}

// Curly single quotes, as word processors substitute them.
constexpr std::string_view kOpenQuote = "\xE2\x80\x98";
constexpr std::string_view kCloseQuote = "\xE2\x80\x99";

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (s.substr(i, 2) == "--") {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(c) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(c)) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))
        throw Error(ErrorKind::Unsupported, "decimal numbers are outside the supported subset", start);
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (c == '\'' || s.substr(i, kOpenQuote.size()) == kOpenQuote) {
      bool curly = c != '\'';
      i += curly ? kOpenQuote.size() : 1;
      std::string value;
      bool closed = false;
      while (i < s.size()) {
        if (!curly && s[i] == '\'') {
          if (i + 1 < s.size() && s[i + 1] == '\'') {
            value += '\'';
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        if (curly && s.substr(i, kCloseQuote.size()) == kCloseQuote) {
          i += kCloseQuote.size();
          closed = true;
          break;
        }
        value += s[i++];
      }
      if (!closed) throw Error(ErrorKind::SyntaxError, "unterminated string literal", start, {"'"});
      out.push_back({Tok::String, std::move(value), start});
      continue;
    }
    if (c == '"') {
      ++i;
      std::string value;
      while (i < s.size() && s[i] != '"') value += s[i++];
      if (i >= s.size()) throw Error(ErrorKind::SyntaxError, "unterminated quoted identifier", start, {"\""});
      ++i;
      if (value.empty()) throw Error(ErrorKind::SyntaxError, "empty quoted identifier", start, {"identifier"});
      out.push_back({Tok::QuotedIdent, std::move(value), start});
      continue;
    }
    static const char* const kTwo[] = {"<=", ">=", "<>", "!=", "||"};
    bool matched = false;
    for (const char* op : kTwo) {
      if (s.substr(i, 2) == op) {
        out.push_back({Tok::Symbol, op, start});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("(),.*=<>+-/;%").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Tok::Symbol, std::string(1, static_cast<char>(c)), start});
      ++i;
      continue;
    }
    throw Error(ErrorKind::SyntaxError, "unexpected character", start, {"SQL token"});
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  Query parse_statement() {
    Query q = parse_query();
    if (is_symbol(";")) next();
    if (peek().type != Tok::End) {
      reject_set_operator();
      fail("unexpected input after query", {"end of input"});
    }
    return q;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  bool is_kw(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.type == Tok::Ident && text::iequals(t.text, kw);
  }
  bool is_symbol(std::string_view sym, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.type == Tok::Symbol && t.text == sym;
  }

  [[noreturn]] void fail(const std::string& message, std::vector<std::string> expected) const {
    std::string found = peek().type == Tok::End ? "end of input" : "'" + peek().text + "'";
    throw Error(ErrorKind::SyntaxError, message + " (found " + found + ")", peek().pos, std::move(expected));
  }
  [[noreturn]] void unsupported(const std::string& construct) const {
    throw Error(ErrorKind::Unsupported, construct + " is outside the supported SQL subset", peek().pos);
  }

  void expect_kw(std::string_view kw) {
    if (!is_kw(kw)) fail("expected " + text::to_upper(kw), {text::to_upper(kw)});
    next();
  }
  void expect_symbol(std::string_view sym) {
    if (!is_symbol(sym)) fail("expected '" + std::string(sym) + "'", {std::string(sym)});
    next();
  }

  void reject_set_operator() const {
    if (is_kw("union") || is_kw("intersect") || is_kw("except")) unsupported("set operator " + text::to_upper(peek().text));
    if (is_kw("limit")) unsupported("LIMIT");
  }

  std::string identifier(const char* what) {
    const Token& t = peek();
    if (t.type == Tok::QuotedIdent || (t.type == Tok::Ident && !reserved().count(t.text))) return next().text;
    fail(std::string("expected ") + what, {what});
  }

  bool at_identifier() const {
    const Token& t = peek();
    return t.type == Tok::QuotedIdent || (t.type == Tok::Ident && !reserved().count(t.text));
  }

  Query parse_query() {
    Query q;
    expect_kw("select");
    if (is_kw("distinct")) unsupported("SELECT DISTINCT");
    if (is_kw("all")) next();
    if (is_symbol("*")) {
      next();
      q.select_star = true;
    } else {
      for (;;) {
        SelectItem item;
        item.expr = parse_expr();
        if (is_kw("as")) {
          next();
          item.alias = identifier("column alias");
        } else if (at_identifier()) {
          item.alias = identifier("column alias");
        }
        q.select.push_back(std::move(item));
        if (!is_symbol(",")) break;
        next();
      }
    }
    if (!is_kw("from")) fail("expected FROM", {"FROM", ","});
    next();
    for (;;) {
      std::size_t pos = peek().pos;
      FromItem item;
      item.relation = identifier("relation name");
      item.alias = item.relation;
      if (is_kw("as")) {
        next();
        item.alias = identifier("alias");
      } else if (at_identifier()) {
        item.alias = identifier("alias");
      }
      if (q.find_alias(item.alias) != nullptr)
        throw Error(ErrorKind::SyntaxError, "duplicate alias '" + item.alias + "' in FROM", pos, {"distinct alias"});
      q.from.push_back(std::move(item));
      static const char* const kJoinWords[] = {"join", "inner", "left", "right", "full", "cross", "natural", "on"};
      for (const char* w : kJoinWords) {
        if (is_kw(w)) unsupported("JOIN syntax");
      }
      if (!is_symbol(",")) break;
      next();
    }
    if (is_kw("where")) {
      next();
      q.where = parse_condition();
    }
    if (is_kw("group")) {
      next();
      expect_kw("by");
      for (;;) {
        q.group_by.push_back(parse_column());
        if (!is_symbol(",")) break;
        next();
      }
    }
    if (is_kw("having")) {
      next();
      q.having = parse_condition();
    }
    if (is_kw("order")) {
      next();
      expect_kw("by");
      for (;;) {
        OrderItem item;
        item.column = parse_column();
        if (is_kw("asc")) {
          next();
        } else if (is_kw("desc")) {
          next();
          item.descending = true;
        }
        q.order_by.push_back(std::move(item));
        if (!is_symbol(",")) break;
        next();
      }
    }
    reject_set_operator();
    return q;
  }

  std::vector<Atom> parse_condition() {
    std::vector<Atom> atoms;
    parse_conjunct(atoms);
    for (;;) {
      if (is_kw("or")) unsupported("OR");
      if (!is_kw("and")) break;
      next();
      parse_conjunct(atoms);
    }
    return atoms;
  }

  void parse_conjunct(std::vector<Atom>& out) {
    if (is_kw("not")) {
      next();
      if (!is_kw("exists")) unsupported("NOT other than NOT EXISTS");
      next();
      out.push_back(Exists{true, parse_subquery()});
      return;
    }
    if (is_kw("exists")) {
      next();
      out.push_back(Exists{false, parse_subquery()});
      return;
    }
    if (is_symbol("(") && !is_kw("select", 1)) {
      next();
      auto inner = parse_condition();
      expect_symbol(")");
      for (auto& a : inner) out.push_back(std::move(a));
      return;
    }
    Expr lhs = parse_expr();
    if (is_kw("not")) {
      if (is_kw("in", 1)) unsupported("NOT IN");
      unsupported("NOT after an operand");
    }
    if (is_kw("in")) {
      next();
      if (!is_symbol("(")) fail("expected '(' after IN", {"("});
      if (!is_kw("select", 1)) {
        next();
        unsupported("IN with a value list");
      }
      out.push_back(InSubquery{std::move(lhs), parse_subquery()});
      return;
    }
    if (is_kw("like") || is_kw("between") || is_kw("is")) unsupported(text::to_upper(peek().text));
    CompareOp op = parse_operator();
    if (is_kw("all")) {
      next();
      out.push_back(CompareAll{std::move(lhs), op, parse_subquery()});
      return;
    }
    if (is_kw("any") || is_kw("some")) unsupported(text::to_upper(peek().text) + " quantifier");
    out.push_back(Compare{std::move(lhs), op, parse_expr()});
  }

  CompareOp parse_operator() {
    const Token& t = peek();
    if (t.type == Tok::Symbol) {
      CompareOp op;
      bool ok = true;
      if (t.text == "=") op = CompareOp::Eq;
      else if (t.text == "!=" || t.text == "<>") op = CompareOp::Ne;
      else if (t.text == "<") op = CompareOp::Lt;
      else if (t.text == "<=") op = CompareOp::Le;
      else if (t.text == ">") op = CompareOp::Gt;
      else if (t.text == ">=") op = CompareOp::Ge;
      else ok = false;
      if (ok) {
        next();
        return op;
      }
    }
    fail("expected a comparison operator", {"=", "!=", "<", "<=", ">", ">=", "IN"});
  }

  Box<Query> parse_subquery() {
    expect_symbol("(");
    if (!is_kw("select")) fail("expected a subquery", {"SELECT"});
    Query q = parse_query();
    expect_symbol(")");
    return Box<Query>(std::move(q));
  }

  Expr parse_expr() {
    Expr e = parse_operand();
    if (is_symbol("+") || is_symbol("-") || is_symbol("*") || is_symbol("/") || is_symbol("%") || is_symbol("||"))
      unsupported("arithmetic");
    return e;
  }

  Expr parse_operand() {
    const Token& t = peek();
    if (t.type == Tok::Number) return Constant{parse_number(false)};
    if (is_symbol("-") && peek(1).type == Tok::Number) {
      next();
      return Constant{parse_number(true)};
    }
    if (t.type == Tok::String) return Constant{next().text};
    if (is_kw("null")) unsupported("NULL literals");
    if (is_symbol("(")) {
      if (!is_kw("select", 1)) {
        next();
        unsupported("parenthesized expressions");
      }
      return ScalarSubquery{parse_subquery()};
    }
    if (t.type == Tok::Ident && is_symbol("(", 1)) {
      std::string fn = text::to_lower(t.text);
      if (fn == "count") {
        next();
        next();
        if (is_symbol("*")) {
          next();
          expect_symbol(")");
          return CountStar{};
        }
        if (is_kw("distinct")) {
          next();
          ColumnRef c = parse_column();
          expect_symbol(")");
          return CountDistinct{std::move(c)};
        }
        unsupported("count over a column without DISTINCT");
      }
      unsupported("function " + t.text);
    }
    if (at_identifier()) return parse_column();
    fail("expected an operand", {"column", "constant", "count", "("});
  }

  Cell parse_number(bool negative) {
    const Token& t = next();
    std::int64_t v = 0;
    std::string digits = (negative ? "-" : "") + t.text;
    if (!text::parse_int64(digits, v))
      throw Error(ErrorKind::SyntaxError, "integer literal out of range", t.pos, {"integer"});
    return v;
  }

  ColumnRef parse_column() {
    ColumnRef c;
    std::string first = identifier("column");
    if (is_symbol(".")) {
      next();
      c.alias = first;
      c.attribute = identifier("attribute name");
    } else {
      c.attribute = first;
    }
    return c;
  }
};

// ---------------------------------------------------------------------------
// Name resolution

struct Scope {
  std::vector<std::pair<std::string, const RelationNode*>> aliases;
};

class Resolver {
 public:
  explicit Resolver(const SchemaGraph& g) : g_(g) {}

  void resolve(Query& q) {
    Scope scope;
    for (auto& f : q.from) {
      const RelationNode* r = g_.find_relation(f.relation);
      if (r == nullptr) throw Error(ErrorKind::UnknownRelation, "unknown relation " + f.relation);
      if (text::iequals(f.alias, f.relation)) f.alias = r->name;
      f.relation = r->name;
      scope.aliases.emplace_back(f.alias, r);
    }
    stack_.push_back(std::move(scope));
    for (auto& item : q.select) resolve(item.expr);
    for (auto& a : q.where) resolve(a);
    for (auto& c : q.group_by) resolve(c);
    for (auto& a : q.having) resolve(a);
    for (auto& o : q.order_by) resolve(o.column);
    stack_.pop_back();
  }

 private:
  const SchemaGraph& g_;
  std::vector<Scope> stack_;

  void resolve(Atom& atom) {
    std::visit(
        [&](auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, Compare>) {
            resolve(a.lhs);
            resolve(a.rhs);
          } else if constexpr (std::is_same_v<T, InSubquery>) {
            resolve(a.lhs);
            resolve(*a.query);
          } else if constexpr (std::is_same_v<T, Exists>) {
            resolve(*a.query);
          } else {
            resolve(a.lhs);
            resolve(*a.query);
          }
        },
        atom);
  }

  void resolve(Expr& e) {
    if (auto* c = std::get_if<ColumnRef>(&e)) resolve(*c);
    else if (auto* d = std::get_if<CountDistinct>(&e)) resolve(d->column);
    else if (auto* s = std::get_if<ScalarSubquery>(&e)) resolve(*s->query);
  }

  void resolve(ColumnRef& c) {
    if (!c.alias.empty()) {
      for (std::size_t level = 0; level < stack_.size(); ++level) {
        const Scope& scope = stack_[stack_.size() - 1 - level];
        for (const auto& [alias, rel] : scope.aliases) {
          if (!text::iequals(alias, c.alias)) continue;
          const AttributeNode* a = g_.find_attribute(rel->name, c.attribute);
          if (a == nullptr)
            throw Error(ErrorKind::UnknownColumn, "relation " + rel->name + " (alias " + alias + ") has no attribute " +
                                                      c.attribute);
          c.alias = alias;
          c.attribute = a->name;
          c.outer_level = level;
          return;
        }
      }
      throw Error(ErrorKind::UnknownRelation, "no relation or alias named " + c.alias + " is in scope");
    }
    for (std::size_t level = 0; level < stack_.size(); ++level) {
      const Scope& scope = stack_[stack_.size() - 1 - level];
      std::vector<std::pair<std::string, const AttributeNode*>> hits;
      for (const auto& [alias, rel] : scope.aliases) {
        if (const AttributeNode* a = g_.find_attribute(rel->name, c.attribute)) hits.emplace_back(alias, a);
      }
      if (hits.size() > 1) {
        std::vector<std::string> names;
        for (const auto& h : hits) names.push_back(h.first);
        throw Error(ErrorKind::AmbiguousColumn, "column " + c.attribute + " could belong to " + text::join(names, ", "));
      }
      if (hits.size() == 1) {
        c.alias = hits.front().first;
        c.attribute = hits.front().second->name;
        c.outer_level = level;
        return;
      }
    }
    throw Error(ErrorKind::UnknownColumn, "no relation in scope has a column " + c.attribute);
  }
};

// ---------------------------------------------------------------------------
// Rendering

std::string quote_string(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

std::string render_identifier(const std::string& s) {
  bool plain = !s.empty() && (std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_') && !reserved().count(s) &&
               std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
  return plain ? s : "\"" + s + "\"";
}

std::string render_column(const ColumnRef& c) {
  return c.alias.empty() ? render_identifier(c.attribute)
                         : render_identifier(c.alias) + "." + render_identifier(c.attribute);
}

std::string render_atoms(const std::vector<Atom>& atoms) {
  std::vector<std::string> parts;
  for (const auto& a : atoms) parts.push_back(to_sql(a));
  return text::join(parts, " and ");
}

}  // namespace

Query parse_sql(std::string_view text) { return Parser(text).parse_statement(); }

Query resolve_names(const Query& query, const SchemaGraph& graph) {
  Query out = query;
  Resolver(graph).resolve(out);
  return out;
}

std::string to_sql(const Expr& e) {
  if (const auto* c = std::get_if<ColumnRef>(&e)) return render_column(*c);
  if (const auto* k = std::get_if<Constant>(&e)) {
    if (const auto* i = std::get_if<std::int64_t>(&k->value)) return std::to_string(*i);
    if (const auto* s = std::get_if<std::string>(&k->value)) return quote_string(*s);
    return "null";
  }
  if (std::holds_alternative<CountStar>(e)) return "count(*)";
  if (const auto* d = std::get_if<CountDistinct>(&e)) return "count(distinct " + render_column(d->column) + ")";
  return "(" + to_sql(*std::get<ScalarSubquery>(e).query) + ")";
}

std::string to_sql(const Atom& atom) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Compare>) {
          return to_sql(a.lhs) + " " + std::string(to_string(a.op)) + " " + to_sql(a.rhs);
        } else if constexpr (std::is_same_v<T, InSubquery>) {
          return to_sql(a.lhs) + " in (" + to_sql(*a.query) + ")";
        } else if constexpr (std::is_same_v<T, Exists>) {
          return std::string(a.negated ? "not exists (" : "exists (") + to_sql(*a.query) + ")";
        } else {
          return to_sql(a.lhs) + " " + std::string(to_string(a.op)) + " all (" + to_sql(*a.query) + ")";
        }
      },
      atom);
}

std::string to_sql(const Query& q) {
  std::string out = "select ";
  if (q.select_star) {
    out += "*";
  } else {
    std::vector<std::string> items;
    for (const auto& s : q.select) items.push_back(to_sql(s.expr) + (s.alias.empty() ? "" : " as " + render_identifier(s.alias)));
    out += text::join(items, ", ");
  }
  std::vector<std::string> from;
  for (const auto& f : q.from) from.push_back(render_identifier(f.relation) + " " + render_identifier(f.alias));
  out += " from " + text::join(from, ", ");
  if (!q.where.empty()) out += " where " + render_atoms(q.where);
  if (!q.group_by.empty()) {
    std::vector<std::string> cols;
    for (const auto& c : q.group_by) cols.push_back(render_column(c));
    out += " group by " + text::join(cols, ", ");
  }
  if (!q.having.empty()) out += " having " + render_atoms(q.having);
  if (!q.order_by.empty()) {
    std::vector<std::string> cols;
    for (const auto& o : q.order_by) cols.push_back(render_column(o.column) + (o.descending ? " desc" : " asc"));
    out += " order by " + text::join(cols, ", ");
  }
  return out;
}

std::vector<const Query*> subqueries(const Atom& atom) {
  std::vector<const Query*> out;
  auto from_expr = [&](const Expr& e) {
    if (const auto* s = std::get_if<ScalarSubquery>(&e)) out.push_back(s->query.get());
  };
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Compare>) {
          from_expr(a.lhs);
          from_expr(a.rhs);
        } else if constexpr (std::is_same_v<T, Exists>) {
          out.push_back(a.query.get());
        } else {
          from_expr(a.lhs);
          out.push_back(a.query.get());
        }
      },
      atom);
  return out;
}

std::size_t count_atoms(const Query& q) {
  std::size_t n = q.where.size() + q.having.size();
  auto nested = [&](const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) {
      for (const Query* s : subqueries(a)) n += count_atoms(*s);
    }
  };
  nested(q.where);
  nested(q.having);
  for (const auto& item : q.select) {
    if (const auto* s = std::get_if<ScalarSubquery>(&item.expr)) n += count_atoms(*s->query);
  }
  return n;
}

}  // namespace talkback::sql
