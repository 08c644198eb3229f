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

#include "talkback/template_engine.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "talkback/data_store.hpp"
#include "talkback/error.hpp"
#include "talkback/schema_model.hpp"

namespace talkback {

namespace {

enum class Tok { String, LBrace, RBrace, LBrack, RBrack, LParen, RParen, Plus, Dot, Colon, Less, Equal, Ident, Other, End };

struct Token {
  Tok type;
  std::string text;
  std::size_t pos;
};

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (c == '"') {
      std::string value;
      ++i;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i];
        if (d == '\\' && i + 1 < src.size()) {
          value += src[i + 1];
          i += 2;
          continue;
        }
        if (d == '"') {
          closed = true;
          ++i;
          break;
        }
        if (d == '{' || d == '}') {
          throw Error(ErrorKind::MalformedTemplate,
                      "placeholder delimiter inside a literal", i);
        }
        value += d;
        ++i;
      }
      if (!closed) throw Error(ErrorKind::UnbalancedBraces, "unterminated string literal", start);
      out.push_back({Tok::String, std::move(value), start});
      continue;
    }
    if (is_ident_char(c)) {
      while (i < src.size() && is_ident_char(src[i])) ++i;
      out.push_back({Tok::Ident, std::string(src.substr(start, i - start)), start});
      continue;
    }
    Tok t = Tok::Other;
    switch (c) {
      case '{': t = Tok::LBrace; break;
      case '}': t = Tok::RBrace; break;
      case '[': t = Tok::LBrack; break;
      case ']': t = Tok::RBrack; break;
      case '(': t = Tok::LParen; break;
      case ')': t = Tok::RParen; break;
      case '+': t = Tok::Plus; break;
      case '.': t = Tok::Dot; break;
      case ':': t = Tok::Colon; break;
      case '<': t = Tok::Less; break;
      case '=': t = Tok::Equal; break;
      default: break;
    }
    out.push_back({t, std::string(1, c), start});
    ++i;
  }
  out.push_back({Tok::End, "", src.size()});
  return out;
}

class TemplateParser {
 public:
  TemplateParser(std::string_view src, const TemplateDefinitions& defs)
      : tokens_(lex(src)), defs_(defs) {}

  TemplateExpr parse_all() {
    TemplateExpr e = parse_expr(false);
    if (peek().type == Tok::RBrace) throw Error(ErrorKind::UnbalancedBraces, "unmatched '}'", peek().pos);
    if (peek().type != Tok::End) throw Error(ErrorKind::MalformedTemplate, "expected '+' or end of template", peek().pos);
    return e;
  }

  ListLoop parse_definition_only() {
    if (!is_keyword(peek(), "DEFINE"))
      throw Error(ErrorKind::MalformedTemplate, "expected DEFINE", peek().pos);
    ListLoop loop = parse_loop();
    if (peek().type != Tok::End) throw Error(ErrorKind::MalformedTemplate, "trailing input after definition", peek().pos);
    return loop;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  static bool is_keyword(const Token& t, std::string_view kw) {
    return t.type == Tok::Ident && text::iequals(t.text, kw);
  }

  const Token& expect(Tok type, std::string_view what) {
    if (peek().type != type) {
      if (peek().type == Tok::End && (type == Tok::RBrace || type == Tok::RBrack))
        throw Error(ErrorKind::UnbalancedBraces, "missing " + std::string(what), peek().pos);
      throw Error(ErrorKind::MalformedTemplate, "expected " + std::string(what), peek().pos);
    }
    return next();
  }

  TemplateExpr parse_expr(bool in_body) {
    TemplateExpr e;
    auto at_end = [&] {
      return peek().type == Tok::End || (in_body && peek().type == Tok::RBrace);
    };
    if (at_end()) return e;
    for (;;) {
      parse_part(e);
      if (peek().type != Tok::Plus) break;
      next();
    }
    if (in_body && peek().type != Tok::RBrace) {
      if (peek().type == Tok::End) throw Error(ErrorKind::UnbalancedBraces, "missing '}' after loop body", peek().pos);
      throw Error(ErrorKind::MalformedTemplate, "expected '+' or '}'", peek().pos);
    }
    return e;
  }

  void parse_part(TemplateExpr& e) {
    const Token& t = peek();
    switch (t.type) {
      case Tok::String: {
        std::string value = next().text;
        if (!value.empty()) e.parts.emplace_back(Literal{std::move(value)});
        return;
      }
      case Tok::LBrace:
        e.parts.emplace_back(parse_placeholder());
        return;
      case Tok::Ident:
        if (is_keyword(t, "DEFINE")) {
          e.parts.emplace_back(Box<ListLoop>(parse_loop()));
          return;
        } else {
          auto it = defs_.find(t.text);
          if (it == defs_.end())
            throw Error(ErrorKind::UnknownDefinition, "unknown list definition '" + t.text + "'", t.pos);
          next();
          ListLoop copy = it->second;
          copy.referenced = true;
          e.parts.emplace_back(Box<ListLoop>(std::move(copy)));
          return;
        }
      case Tok::RBrace:
        throw Error(ErrorKind::UnbalancedBraces, "unmatched '}'", t.pos);
      case Tok::End:
        throw Error(ErrorKind::MalformedTemplate, "expected a template part", t.pos);
      default:
        throw Error(ErrorKind::MalformedTemplate, "unexpected '" + t.text + "'", t.pos);
    }
  }

  Placeholder parse_placeholder() {
    std::size_t open = next().pos;
    if (peek().type == Tok::End) throw Error(ErrorKind::UnbalancedBraces, "unterminated placeholder", open);
    Placeholder p;
    std::string first = expect(Tok::Ident, "placeholder name").text;
    std::optional<std::string> second;
    if (peek().type == Tok::Dot) {
      next();
      second = expect(Tok::Ident, "attribute name").text;
    }
    bool has_variant = false;
    if (peek().type == Tok::Colon) {
      next();
      const Token& v = expect(Tok::Ident, "placeholder variant");
      if (text::iequals(v.text, "value")) p.variant = PlaceholderVariant::Value;
      else if (text::iequals(v.text, "noun")) p.variant = PlaceholderVariant::Noun;
      else if (text::iequals(v.text, "heading")) p.variant = PlaceholderVariant::Heading;
      else throw Error(ErrorKind::MalformedTemplate, "unknown placeholder variant '" + v.text + "'", v.pos);
      has_variant = true;
    }
    if (peek().type != Tok::RBrace) {
      if (peek().type == Tok::End) throw Error(ErrorKind::UnbalancedBraces, "unterminated placeholder", open);
      throw Error(ErrorKind::MalformedTemplate, "expected '}' closing placeholder", peek().pos);
    }
    next();
    if (second) {
      p.alias = first;
      p.attribute = *second;
    } else if (has_variant) {
      p.alias = first;
    } else {
      p.attribute = first;
    }
    if (p.variant == PlaceholderVariant::Value && p.attribute.empty())
      throw Error(ErrorKind::MalformedTemplate, "value placeholder needs an attribute", open);
    return p;
  }

  ListLoop parse_loop() {
    next();  // DEFINE
    ListLoop loop;
    loop.name = expect(Tok::Ident, "list name").text;
    if (!is_keyword(peek(), "AS")) throw Error(ErrorKind::MalformedTemplate, "expected AS", peek().pos);
    next();
    loop.guards.push_back(parse_guarded(loop, Guard::LessThanArity));
    loop.guards.push_back(parse_guarded(loop, Guard::EqualsArity));
    return loop;
  }

  GuardedBody parse_guarded(ListLoop& loop, Guard wanted) {
    const Token& open = peek();
    if (open.type != Tok::LBrack)
      throw Error(ErrorKind::UnknownGuard,
                  wanted == Guard::LessThanArity ? "expected guard [i < arityOf(...)]"
                                                 : "expected guard [i = arityOf(...)]",
                  open.pos);
    next();
    const Token& var = peek();
    if (var.type != Tok::Ident) throw Error(ErrorKind::UnknownGuard, "guard must test the loop index", var.pos);
    next();
    const Token& op = next();
    Guard g;
    if (op.type == Tok::Less) g = Guard::LessThanArity;
    else if (op.type == Tok::Equal) g = Guard::EqualsArity;
    else throw Error(ErrorKind::UnknownGuard, "unsupported guard operator '" + op.text + "'", op.pos);
    if (g != wanted)
      throw Error(ErrorKind::UnknownGuard, "guards must appear as [i < arityOf] then [i = arityOf]", op.pos);
    const Token& fn = peek();
    if (!is_keyword(fn, "arityOf")) throw Error(ErrorKind::UnknownGuard, "guard must compare with arityOf(...)", fn.pos);
    next();
    expect(Tok::LParen, "'('");
    std::string alias = expect(Tok::Ident, "arity alias").text;
    std::string attribute;
    if (peek().type == Tok::Dot) {
      next();
      attribute = expect(Tok::Ident, "arity attribute").text;
    }
    expect(Tok::RParen, "')'");
    expect(Tok::RBrack, "']'");
    if (g == Guard::LessThanArity) {
      loop.arity_alias = alias;
      loop.arity_attribute = attribute;
    } else if (!text::iequals(alias, loop.arity_alias)) {
      throw Error(ErrorKind::UnknownGuard, "both guards must range over the same list", fn.pos);
    }

    GuardedBody body;
    body.guard = g;
    while (peek().type == Tok::String) {
      body.connectors.push_back(next().text);
      expect(Tok::Plus, "'+' after connector");
    }
    const Token& lb = peek();
    if (lb.type != Tok::LBrace) throw Error(ErrorKind::MalformedTemplate, "expected '{' opening loop body", lb.pos);
    next();
    body.body = parse_expr(true);
    expect(Tok::RBrace, "'}' closing loop body");
    if (body.body.empty()) throw Error(ErrorKind::EmptyLoopBody, "loop body is empty", lb.pos);
    return body;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const TemplateDefinitions& defs_;
};

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string placeholder_text(const Placeholder& p) {
  std::string out = "{";
  if (!p.alias.empty()) {
    out += p.alias;
    if (!p.attribute.empty()) out += "." + p.attribute;
  } else {
    out += p.attribute;
  }
  if (p.variant == PlaceholderVariant::Noun) out += ":noun";
  if (p.variant == PlaceholderVariant::Heading) out += ":heading";
  return out + "}";
}

std::string loop_text(const ListLoop& loop) {
  std::string out = "DEFINE " + loop.name + " AS";
  std::string arity = loop.arity_alias;
  if (!loop.arity_attribute.empty()) arity += "." + loop.arity_attribute;
  for (const auto& g : loop.guards) {
    out += g.guard == Guard::LessThanArity ? " [i < arityOf(" : " [i = arityOf(";
    out += arity + ")]";
    for (const auto& c : g.connectors) out += " " + quote(c) + " +";
    out += " { " + to_string(g.body) + " }";
  }
  return out;
}

void collect(const TemplateExpr& e, std::vector<Placeholder>& out) {
  for (const auto& part : e.parts) {
    if (const auto* p = std::get_if<Placeholder>(&part)) {
      out.push_back(*p);
    } else if (const auto* loop = std::get_if<Box<ListLoop>>(&part)) {
      for (const auto& g : (*loop)->guards) collect(g.body, out);
    }
  }
}

using Cursor = std::map<std::string, std::size_t, text::ILess>;

void render(const TemplateExpr& e, const PlaceholderSource& src, Cursor& cursor, std::string& out) {
  for (const auto& part : e.parts) {
    if (const auto* lit = std::get_if<Literal>(&part)) {
      out += lit->text;
    } else if (const auto* p = std::get_if<Placeholder>(&part)) {
      std::string alias = src.resolve_alias(*p);
      std::size_t n = src.arity(alias);
      if (n == 0) throw Error(ErrorKind::UnboundAlias, "alias '" + alias + "' has no bound tuples");
      auto it = cursor.find(alias);
      out += src.render(*p, alias, it == cursor.end() ? 0 : it->second);
    } else {
      const ListLoop& loop = *std::get<Box<ListLoop>>(part);
      std::size_t n = src.arity(loop.arity_alias);
      Cursor saved = cursor;
      for (std::size_t i = 0; i < n; ++i) {
        cursor[loop.arity_alias] = i;
        const GuardedBody& g = (i + 1 < n) ? loop.guards[0] : loop.guards[1];
        if (i > 0) {
          for (const auto& c : g.connectors) out += c;
        }
        render(g.body, src, cursor, out);
      }
      cursor = std::move(saved);
    }
  }
}

class TupleSource : public PlaceholderSource {
 public:
  TupleSource(const TupleBindings& bindings, const SchemaGraph* schema)
      : bindings_(bindings), schema_(schema) {}

  std::size_t arity(std::string_view alias) const override {
    auto it = bindings_.find(alias);
    if (it == bindings_.end())
      throw Error(ErrorKind::UnboundAlias, "alias '" + std::string(alias) + "' is not bound");
    return it->second.size();
  }

  std::string resolve_alias(const Placeholder& p) const override {
    if (!p.alias.empty()) return p.alias;
    std::vector<std::string> owners;
    for (const auto& [alias, tuples] : bindings_) {
      if (!tuples.empty() && tuples.front()->find(p.attribute) != nullptr) owners.push_back(alias);
    }
    if (owners.size() != 1) {
      throw Error(ErrorKind::MissingAttribute,
                  owners.empty() ? "no bound tuple has attribute '" + p.attribute + "'"
                                 : "attribute '" + p.attribute + "' is ambiguous between bindings");
    }
    return owners.front();
  }

  std::string render(const Placeholder& p, std::string_view alias, std::size_t index) const override {
    const Tuple& t = *bindings_.find(alias)->second.at(index);
    switch (p.variant) {
      case PlaceholderVariant::Value: {
        const Cell* c = t.find(p.attribute);
        if (c == nullptr)
          throw Error(ErrorKind::MissingAttribute, "relation " + t.relation + " has no attribute '" + p.attribute + "'");
        return is_null(*c) ? std::string() : cell_to_string(*c);
      }
      case PlaceholderVariant::Noun: {
        if (schema_ != nullptr) {
          if (const auto* r = schema_->find_relation(t.relation)) return r->noun.singular;
        }
        return text::to_lower(t.relation);
      }
      case PlaceholderVariant::Heading: {
        const RelationNode* r = schema_ != nullptr ? schema_->find_relation(t.relation) : nullptr;
        if (r == nullptr)
          throw Error(ErrorKind::MissingAttribute, "heading of " + t.relation + " needs a schema");
        const Cell* c = t.find(r->heading_attribute);
        return c == nullptr || is_null(*c) ? std::string() : cell_to_string(*c);
      }
    }
    return {};
  }

 private:
  const TupleBindings& bindings_;
  const SchemaGraph* schema_;
};

}  // namespace

TemplateExpr parse_template(std::string_view source, const TemplateDefinitions& definitions) {
  return TemplateParser(source, definitions).parse_all();
}

ListLoop parse_definition(std::string_view source, const TemplateDefinitions& definitions) {
  return TemplateParser(source, definitions).parse_definition_only();
}

std::string to_string(const TemplateExpr& expr) {
  if (expr.parts.empty()) return "\"\"";
  std::vector<std::string> parts;
  for (const auto& part : expr.parts) {
    if (const auto* lit = std::get_if<Literal>(&part)) {
      parts.push_back(quote(lit->text));
    } else if (const auto* p = std::get_if<Placeholder>(&part)) {
      parts.push_back(placeholder_text(*p));
    } else {
      const ListLoop& loop = *std::get<Box<ListLoop>>(part);
      parts.push_back(loop.referenced ? loop.name : loop_text(loop));
    }
  }
  return text::join(parts, " + ");
}

std::string to_string(const ListLoop& loop) { return loop_text(loop); }

std::vector<Placeholder> collect_placeholders(const TemplateExpr& expr) {
  std::vector<Placeholder> out;
  collect(expr, out);
  return out;
}

std::string PlaceholderSource::resolve_alias(const Placeholder& placeholder) const {
  if (placeholder.alias.empty())
    throw Error(ErrorKind::MissingAttribute, "unqualified placeholder '" + placeholder.attribute + "'");
  return placeholder.alias;
}

std::string instantiate(const TemplateExpr& expr, const PlaceholderSource& source) {
  std::string out;
  Cursor cursor;
  render(expr, source, cursor, out);
  return out;
}

std::string instantiate(const TemplateExpr& expr, const TupleBindings& bindings, const SchemaGraph* schema) {
  return instantiate(expr, TupleSource(bindings, schema));
}

Clause Clause::from_text(std::string_view text, std::size_t subject_len) {
  Clause c;
  c.tokens = text::tokenize(text);
  c.subject_len = std::min(subject_len, c.tokens.size());
  return c;
}

std::string Clause::text() const { return text::join(tokens, " "); }

namespace {

std::size_t common_prefix(const std::vector<std::string>& a, std::size_t a_len, const std::vector<std::string>& b) {
  std::size_t n = std::min(a_len, b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

std::vector<Clause> merge_pass(const std::vector<Clause>& in) {
  std::vector<Clause> out;
  std::size_t i = 0;
  while (i < in.size()) {
    const Clause& first = in[i];
    std::size_t prefix = first.tokens.size();
    std::size_t j = i + 1;
    while (j < in.size()) {
      std::size_t l = common_prefix(first.tokens, prefix, in[j].tokens);
      std::size_t threshold = std::max<std::size_t>({1, first.subject_len, in[j].subject_len});
      if (l < threshold) break;
      prefix = l;
      ++j;
    }
    if (j == i + 1) {
      out.push_back(first);
    } else {
      Clause fused;
      fused.subject_len = first.subject_len;
      fused.tokens.assign(first.tokens.begin(), first.tokens.begin() + static_cast<std::ptrdiff_t>(prefix));
      for (std::size_t k = i; k < j; ++k) {
        fused.tokens.insert(fused.tokens.end(), in[k].tokens.begin() + static_cast<std::ptrdiff_t>(prefix),
                            in[k].tokens.end());
      }
      out.push_back(std::move(fused));
    }
    i = j;
  }
  return out;
}

}  // namespace

std::vector<Clause> merge_common(std::vector<Clause> clauses) {
  for (;;) {
    std::vector<Clause> next = merge_pass(clauses);
    if (next.size() == clauses.size()) return next;
    clauses = std::move(next);
  }
}

}  // namespace talkback
