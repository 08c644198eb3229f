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

#include "talkback/schema_model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "talkback/error.hpp"

namespace talkback {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::DanglingReference: return "DanglingReference";
    case DiagnosticKind::MissingHeading: return "MissingHeading";
    case DiagnosticKind::DuplicateName: return "DuplicateName";
    case DiagnosticKind::NegativeWeight: return "NegativeWeight";
    case DiagnosticKind::BadTemplate: return "BadTemplate";
    case DiagnosticKind::MissingProjection: return "MissingProjection";
    case DiagnosticKind::BadJoinPath: return "BadJoinPath";
    case DiagnosticKind::Disconnected: return "Disconnected";
    case DiagnosticKind::EmptySchema: return "EmptySchema";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Lookups

const RelationNode* SchemaGraph::find_relation(std::string_view name) const {
  for (const auto& r : relations) {
    if (text::iequals(r.name, name)) return &r;
  }
  for (const auto& r : relations) {
    for (const auto& a : r.aliases) {
      if (text::iequals(a, name)) return &r;
    }
  }
  return nullptr;
}

const AttributeNode* SchemaGraph::find_attribute(std::string_view relation, std::string_view attribute) const {
  const RelationNode* r = find_relation(relation);
  if (r == nullptr) return nullptr;
  for (const auto& a : attributes) {
    if (text::iequals(a.relation, r->name) && text::iequals(a.name, attribute)) return &a;
  }
  return nullptr;
}

const ProjectionEdge* SchemaGraph::find_projection(std::string_view relation, std::string_view attribute) const {
  const RelationNode* r = find_relation(relation);
  if (r == nullptr) return nullptr;
  for (const auto& p : projections) {
    if (text::iequals(p.relation, r->name) && text::iequals(p.attribute, attribute)) return &p;
  }
  return nullptr;
}

std::vector<const AttributeNode*> SchemaGraph::attributes_of(std::string_view relation) const {
  std::vector<const AttributeNode*> out;
  const RelationNode* r = find_relation(relation);
  if (r == nullptr) return out;
  for (const auto& a : attributes) {
    if (text::iequals(a.relation, r->name)) out.push_back(&a);
  }
  return out;
}

bool SchemaGraph::is_join_key(std::string_view relation, std::string_view attribute) const {
  const RelationNode* r = find_relation(relation);
  if (r == nullptr) return false;
  for (const auto& j : joins) {
    if (text::iequals(j.from_relation, r->name) && text::iequals(j.from_key, attribute)) return true;
    if (text::iequals(j.to_relation, r->name) && text::iequals(j.to_key, attribute)) return true;
  }
  return false;
}

std::vector<const JoinEdge*> SchemaGraph::joins_of(std::string_view relation) const {
  std::vector<const JoinEdge*> out;
  const RelationNode* r = find_relation(relation);
  if (r == nullptr) return out;
  for (const auto& j : joins) {
    if (text::iequals(j.from_relation, r->name) || text::iequals(j.to_relation, r->name)) out.push_back(&j);
  }
  return out;
}

const JoinPathTemplate* SchemaGraph::find_join_path(const std::vector<std::string>& path) const {
  auto same = [&](const std::vector<std::string>& candidate, bool reversed) {
    if (candidate.size() != path.size()) return false;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const std::string& c = reversed ? candidate[candidate.size() - 1 - i] : candidate[i];
      const RelationNode* a = find_relation(c);
      const RelationNode* b = find_relation(path[i]);
      if (a == nullptr || a != b) return false;
    }
    return true;
  };
  for (const auto& jp : join_paths) {
    if (same(jp.path, false) || same(jp.path, true)) return &jp;
  }
  return nullptr;
}

const JoinEdge* SchemaGraph::find_join(std::string_view rel_a, std::string_view attr_a, std::string_view rel_b,
                                       std::string_view attr_b) const {
  const RelationNode* a = find_relation(rel_a);
  const RelationNode* b = find_relation(rel_b);
  if (a == nullptr || b == nullptr) return nullptr;
  for (const auto& j : joins) {
    const RelationNode* from = find_relation(j.from_relation);
    const RelationNode* to = find_relation(j.to_relation);
    if (from == a && to == b && text::iequals(j.from_key, attr_a) && text::iequals(j.to_key, attr_b)) return &j;
    if (from == b && to == a && text::iequals(j.from_key, attr_b) && text::iequals(j.to_key, attr_a)) return &j;
  }
  return nullptr;
}

TemplateDefinitions SchemaGraph::parsed_definitions() const {
  TemplateDefinitions defs;
  for (const auto& d : definitions) {
    ListLoop loop = parse_definition(d, defs);
    std::string name = loop.name;
    defs.insert_or_assign(name, std::move(loop));
  }
  return defs;
}

TemplateExpr SchemaGraph::parse(std::string_view template_text) const {
  return parse_template(template_text, parsed_definitions());
}

// ---------------------------------------------------------------------------
// Loading

namespace {

NounForms default_noun(std::string_view name) {
  std::string singular = text::to_lower(name);
  std::replace(singular.begin(), singular.end(), '_', ' ');
  return {singular, text::pluralize(singular)};
}

std::string opt_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw Error(ErrorKind::MalformedDocument, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::string req_string(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw Error(ErrorKind::MalformedDocument, std::string(where) + ": '" + key + "' must be a string");
  return it->get<std::string>();
}

double opt_weight(const json& obj) {
  auto it = obj.find("weight");
  if (it == obj.end()) return 1.0;
  if (!it->is_number()) throw Error(ErrorKind::MalformedDocument, "'weight' must be a number");
  return it->get<double>();
}

NounForms read_noun(const json& obj, std::string_view fallback_name) {
  NounForms noun = default_noun(fallback_name);
  auto it = obj.find("noun");
  if (it == obj.end()) return noun;
  if (it->is_string()) {
    noun.singular = it->get<std::string>();
    noun.plural = text::pluralize(noun.singular);
    return noun;
  }
  if (!it->is_object()) throw Error(ErrorKind::MalformedDocument, "'noun' must be an object");
  std::string s = opt_string(*it, "singular");
  std::string p = opt_string(*it, "plural");
  if (!s.empty()) noun.singular = s;
  noun.plural = !p.empty() ? p : text::pluralize(noun.singular);
  return noun;
}

std::vector<QueryPhrase> read_phrases(const json& obj) {
  std::vector<QueryPhrase> out;
  auto it = obj.find("phrases");
  if (it == obj.end()) return out;
  if (!it->is_array()) throw Error(ErrorKind::MalformedDocument, "'phrases' must be a list");
  for (const auto& p : *it) {
    if (!p.is_object()) throw Error(ErrorKind::MalformedDocument, "phrase entries must be objects");
    QueryPhrase q;
    q.anchor = req_string(p, "anchor", "phrase");
    q.text = req_string(p, "text", "phrase");
    q.plural_text = opt_string(p, "plural");
    std::string pos = opt_string(p, "position");
    if (pos.empty() || text::iequals(pos, "after")) q.position = QueryPhrase::Position::After;
    else if (text::iequals(pos, "before")) q.position = QueryPhrase::Position::Before;
    else throw Error(ErrorKind::MalformedDocument, "phrase position must be 'before' or 'after'");
    out.push_back(std::move(q));
  }
  return out;
}

SchemaGraph build_graph(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::MalformedDocument, "annotation document must be a JSON object");
  SchemaGraph g;
  auto rels = doc.find("relations");
  if (rels != doc.end()) {
    if (!rels->is_array()) throw Error(ErrorKind::MalformedDocument, "'relations' must be a list");
    for (const auto& r : *rels) {
      if (!r.is_object()) throw Error(ErrorKind::MalformedDocument, "relation entries must be objects");
      RelationNode node;
      node.name = req_string(r, "name", "relation");
      node.noun = read_noun(r, node.name);
      auto heading = r.find("heading");
      if (heading == r.end() || !heading->is_string())
        throw Error(ErrorKind::MissingHeading, "relation " + node.name + " declares no heading attribute");
      node.heading_attribute = heading->get<std::string>();
      node.weight = opt_weight(r);
      node.short_template = opt_string(r, "short_template");
      node.long_template = opt_string(r, "long_template");
      if (auto a = r.find("aliases"); a != r.end()) {
        if (!a->is_array()) throw Error(ErrorKind::MalformedDocument, "'aliases' must be a list");
        for (const auto& s : *a) node.aliases.push_back(s.get<std::string>());
      }
      bool keys_declared = false;
      if (auto k = r.find("keys"); k != r.end()) {
        if (!k->is_array()) throw Error(ErrorKind::MalformedDocument, "'keys' must be a list of lists");
        keys_declared = true;
        for (const auto& key : *k) {
          if (key.is_string()) {
            node.keys.push_back({key.get<std::string>()});
            continue;
          }
          if (!key.is_array()) throw Error(ErrorKind::MalformedDocument, "each key must be a list of attributes");
          std::vector<std::string> cols;
          for (const auto& c : key) cols.push_back(c.get<std::string>());
          node.keys.push_back(std::move(cols));
        }
      }
      auto attrs = r.find("attributes");
      if (attrs == r.end() || !attrs->is_array())
        throw Error(ErrorKind::MalformedDocument, "relation " + node.name + ": 'attributes' must be a list");
      for (const auto& a : *attrs) {
        AttributeNode attr;
        attr.relation = node.name;
        if (a.is_string()) {
          attr.name = a.get<std::string>();
        } else if (a.is_object()) {
          attr.name = req_string(a, "name", "attribute");
        } else {
          throw Error(ErrorKind::MalformedDocument, "attribute entries must be names or objects");
        }
        const json empty = json::object();
        const json& ao = a.is_object() ? a : empty;
        attr.is_heading = text::iequals(attr.name, node.heading_attribute);
        attr.weight = opt_weight(ao);
        attr.noun = read_noun(ao, attr.name);
        std::string type = opt_string(ao, "type");
        if (type.empty() || text::iequals(type, "text")) attr.type = ValueType::Text;
        else if (text::iequals(type, "integer")) attr.type = ValueType::Integer;
        else throw Error(ErrorKind::MalformedDocument, "attribute type must be 'text' or 'integer'");
        if (auto t = ao.find("temporal"); t != ao.end()) attr.temporal = t->get<bool>();
        if (auto l = ao.find("lexicon"); l != ao.end()) {
          if (!l->is_object()) throw Error(ErrorKind::MalformedDocument, "'lexicon' must be an object");
          for (const auto& [op, phrase] : l->items()) attr.lexicon[op] = phrase.get<std::string>();
        }
        g.projections.push_back({node.name, attr.name, opt_string(ao, "template")});
        g.attributes.push_back(std::move(attr));
      }
      (void)keys_declared;
      g.relations.push_back(std::move(node));
    }
  }
  auto joins = doc.find("joins");
  if (joins != doc.end()) {
    if (!joins->is_array()) throw Error(ErrorKind::MalformedDocument, "'joins' must be a list");
    for (const auto& j : *joins) {
      if (!j.is_object()) throw Error(ErrorKind::MalformedDocument, "join entries must be objects");
      if (auto p = j.find("path"); p != j.end()) {
        JoinPathTemplate jp;
        if (!p->is_array()) throw Error(ErrorKind::MalformedDocument, "'path' must be a list");
        for (const auto& s : *p) jp.path.push_back(s.get<std::string>());
        jp.template_text = opt_string(j, "template");
        jp.procedural_template = opt_string(j, "procedural_template");
        jp.phrases = read_phrases(j);
        g.join_paths.push_back(std::move(jp));
      } else {
        JoinEdge e;
        e.from_relation = req_string(j, "from", "join");
        e.to_relation = req_string(j, "to", "join");
        e.from_key = req_string(j, "from_key", "join");
        e.to_key = req_string(j, "to_key", "join");
        e.template_text = opt_string(j, "template");
        e.relative_clause = opt_string(j, "relative_clause");
        e.procedural_template = opt_string(j, "procedural_template");
        e.phrases = read_phrases(j);
        g.joins.push_back(std::move(e));
      }
    }
  }
  if (auto d = doc.find("definitions"); d != doc.end()) {
    if (!d->is_array()) throw Error(ErrorKind::MalformedDocument, "'definitions' must be a list");
    for (const auto& s : *d) g.definitions.push_back(s.get<std::string>());
  }
  // Relations without declared keys take the primary-key side of their join edges.
  for (auto& r : g.relations) {
    if (!r.keys.empty()) continue;
    for (const auto& e : g.joins) {
      if (!text::iequals(e.to_relation, r.name)) continue;
      std::vector<std::string> key{e.to_key};
      if (std::find(r.keys.begin(), r.keys.end(), key) == r.keys.end()) r.keys.push_back(key);
    }
  }
  return g;
}

ErrorKind error_kind_for(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::DanglingReference: return ErrorKind::DanglingReference;
    case DiagnosticKind::MissingHeading: return ErrorKind::MissingHeading;
    case DiagnosticKind::BadTemplate: return ErrorKind::BadTemplate;
    default: return ErrorKind::MalformedDocument;
  }
}

}  // namespace

SchemaGraph load_schema_text(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedDocument, e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  SchemaGraph g;
  try {
    g = build_graph(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedDocument, e.what());
  }
  auto diagnostics = validate(g);
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) throw Error(error_kind_for(d.kind), d.subject + ": " + d.message);
  }
  g.diagnostics = std::move(diagnostics);
  return g;
}

SchemaGraph load_schema(std::istream& source) {
  std::stringstream buffer;
  buffer << source.rdbuf();
  return load_schema_text(buffer.str());
}

SchemaGraph load_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return load_schema(in);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

struct Validator {
  const SchemaGraph& g;
  std::vector<Diagnostic> out;

  void error(DiagnosticKind kind, std::string subject, std::string message) {
    out.push_back({Severity::Error, kind, std::move(subject), std::move(message)});
  }

  void check_template(const std::string& text, const std::string& subject, const TemplateDefinitions& defs) {
    if (text.empty()) return;
    TemplateExpr expr;
    try {
      expr = parse_template(text, defs);
    } catch (const Error& e) {
      error(DiagnosticKind::BadTemplate, subject, e.what());
      return;
    }
    check_placeholders(collect_placeholders(expr), subject);
  }

  void check_placeholders(const std::vector<Placeholder>& placeholders, const std::string& subject) {
    for (const auto& p : placeholders) {
      if (p.alias.empty()) {
        bool found = std::any_of(g.attributes.begin(), g.attributes.end(),
                                 [&](const AttributeNode& a) { return text::iequals(a.name, p.attribute); });
        if (!found) error(DiagnosticKind::DanglingReference, subject, "placeholder names unknown attribute " + p.attribute);
        continue;
      }
      if (g.find_relation(p.alias) == nullptr) {
        error(DiagnosticKind::DanglingReference, subject, "placeholder names unknown relation " + p.alias);
        continue;
      }
      if (!p.attribute.empty() && g.find_attribute(p.alias, p.attribute) == nullptr)
        error(DiagnosticKind::DanglingReference, subject,
              "placeholder names unknown attribute " + p.alias + "." + p.attribute);
    }
  }

  void check_phrases(const std::vector<QueryPhrase>& phrases, const std::vector<std::string>& endpoints,
                     const std::string& subject, const TemplateDefinitions& defs) {
    for (const auto& p : phrases) {
      bool ok = std::any_of(endpoints.begin(), endpoints.end(),
                            [&](const std::string& e) { return text::iequals(e, p.anchor); });
      if (!ok) error(DiagnosticKind::DanglingReference, subject, "phrase anchor " + p.anchor + " is not an endpoint");
      check_template(p.text, subject, defs);
      check_template(p.plural_text, subject, defs);
    }
  }

  void run() {
    TemplateDefinitions defs;
    for (std::size_t i = 0; i < g.definitions.size(); ++i) {
      try {
        ListLoop loop = parse_definition(g.definitions[i], defs);
        std::vector<Placeholder> ph;
        for (const auto& guard : loop.guards) {
          auto more = collect_placeholders(guard.body);
          ph.insert(ph.end(), more.begin(), more.end());
        }
        check_placeholders(ph, "definition " + loop.name);
        std::string name = loop.name;
        defs.insert_or_assign(name, std::move(loop));
      } catch (const Error& e) {
        error(DiagnosticKind::BadTemplate, "definition #" + std::to_string(i), e.what());
      }
    }

    if (g.relations.empty()) {
      out.push_back({Severity::Warning, DiagnosticKind::EmptySchema, "schema", "schema declares no relations"});
    }

    std::set<std::string, text::ILess> names;
    for (const auto& r : g.relations) {
      if (!names.insert(r.name).second) error(DiagnosticKind::DuplicateName, r.name, "duplicate relation name");
      if (r.weight < 0) error(DiagnosticKind::NegativeWeight, r.name, "relation weight is negative");
      auto attrs = g.attributes_of(r.name);
      std::size_t headings = std::count_if(attrs.begin(), attrs.end(), [](const AttributeNode* a) { return a->is_heading; });
      const AttributeNode* declared = g.find_attribute(r.name, r.heading_attribute);
      if (headings != 1 || declared == nullptr || !declared->is_heading) {
        error(DiagnosticKind::MissingHeading, r.name,
              headings == 0 ? "no heading attribute" : "heading attribute must be exactly one declared attribute");
      }
      for (const auto& key : r.keys) {
        for (const auto& col : key) {
          if (g.find_attribute(r.name, col) == nullptr)
            error(DiagnosticKind::DanglingReference, r.name, "key names unknown attribute " + col);
        }
      }
      check_template(r.short_template, r.name + " short_template", defs);
      check_template(r.long_template, r.name + " long_template", defs);
    }

    std::set<std::pair<std::string, std::string>> seen_attrs;
    for (const auto& a : g.attributes) {
      std::string subject = a.relation + "." + a.name;
      if (g.find_relation(a.relation) == nullptr) {
        error(DiagnosticKind::DanglingReference, subject, "attribute of unknown relation");
        continue;
      }
      if (!seen_attrs.insert({text::to_lower(a.relation), text::to_lower(a.name)}).second)
        error(DiagnosticKind::DuplicateName, subject, "duplicate attribute");
      if (a.weight < 0) error(DiagnosticKind::NegativeWeight, subject, "attribute weight is negative");
      std::size_t edges = std::count_if(g.projections.begin(), g.projections.end(), [&](const ProjectionEdge& p) {
        return text::iequals(p.relation, a.relation) && text::iequals(p.attribute, a.name);
      });
      if (edges != 1) error(DiagnosticKind::MissingProjection, subject, "attribute needs exactly one projection edge");
    }
    for (const auto& p : g.projections) {
      std::string subject = p.relation + "." + p.attribute;
      if (g.find_attribute(p.relation, p.attribute) == nullptr) {
        error(DiagnosticKind::DanglingReference, subject, "projection edge to unknown attribute");
        continue;
      }
      check_template(p.template_text, subject + " template", defs);
    }

    for (const auto& j : g.joins) {
      std::string subject = j.from_relation + "." + j.from_key + "->" + j.to_relation + "." + j.to_key;
      bool ok = true;
      if (g.find_relation(j.from_relation) == nullptr) {
        error(DiagnosticKind::DanglingReference, subject, "join from unknown relation " + j.from_relation);
        ok = false;
      } else if (g.find_attribute(j.from_relation, j.from_key) == nullptr) {
        error(DiagnosticKind::DanglingReference, subject, "unknown foreign key " + j.from_key);
        ok = false;
      }
      if (g.find_relation(j.to_relation) == nullptr) {
        error(DiagnosticKind::DanglingReference, subject, "join to unknown relation " + j.to_relation);
        ok = false;
      } else if (g.find_attribute(j.to_relation, j.to_key) == nullptr) {
        error(DiagnosticKind::DanglingReference, subject, "unknown primary key " + j.to_key);
        ok = false;
      }
      if (!ok) continue;
      check_template(j.template_text, subject + " template", defs);
      check_template(j.relative_clause, subject + " relative_clause", defs);
      check_template(j.procedural_template, subject + " procedural_template", defs);
      check_phrases(j.phrases, {j.from_relation, j.to_relation}, subject, defs);
    }

    for (const auto& jp : g.join_paths) {
      std::string subject = "path " + text::join(jp.path, "-");
      if (jp.path.size() < 3) {
        error(DiagnosticKind::BadJoinPath, subject, "a join path needs at least three relations");
        continue;
      }
      bool ok = true;
      for (const auto& r : jp.path) {
        if (g.find_relation(r) == nullptr) {
          error(DiagnosticKind::DanglingReference, subject, "unknown relation " + r);
          ok = false;
        }
      }
      if (!ok) continue;
      for (std::size_t i = 0; i + 1 < jp.path.size(); ++i) {
        const RelationNode* a = g.find_relation(jp.path[i]);
        const RelationNode* b = g.find_relation(jp.path[i + 1]);
        bool connected = std::any_of(g.joins.begin(), g.joins.end(), [&](const JoinEdge& e) {
          const RelationNode* f = g.find_relation(e.from_relation);
          const RelationNode* t = g.find_relation(e.to_relation);
          return (f == a && t == b) || (f == b && t == a);
        });
        if (!connected)
          error(DiagnosticKind::BadJoinPath, subject, "no join edge between " + a->name + " and " + b->name);
      }
      check_template(jp.template_text, subject + " template", defs);
      check_template(jp.procedural_template, subject + " procedural_template", defs);
      check_phrases(jp.phrases, {jp.path.front(), jp.path.back()}, subject, defs);
    }

    check_connectivity();
  }

  void check_connectivity() {
    if (g.relations.size() < 2) return;
    std::set<const RelationNode*> reached{&g.relations.front()};
    std::vector<const RelationNode*> stack{&g.relations.front()};
    while (!stack.empty()) {
      const RelationNode* r = stack.back();
      stack.pop_back();
      for (const auto& e : g.joins) {
        const RelationNode* f = g.find_relation(e.from_relation);
        const RelationNode* t = g.find_relation(e.to_relation);
        if (f == nullptr || t == nullptr) continue;
        const RelationNode* other = f == r ? t : (t == r ? f : nullptr);
        if (other != nullptr && reached.insert(other).second) stack.push_back(other);
      }
    }
    std::vector<std::string> missing;
    for (const auto& r : g.relations) {
      if (!reached.count(&r)) missing.push_back(r.name);
    }
    if (!missing.empty()) {
      out.push_back({Severity::Warning, DiagnosticKind::Disconnected, text::join(missing, ","),
                     "not reachable from " + g.relations.front().name + " over join edges"});
    }
  }
};

}  // namespace

std::vector<Diagnostic> validate(const SchemaGraph& graph) {
  Validator v{graph, {}};
  v.run();
  return std::move(v.out);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

ojson phrases_json(const std::vector<QueryPhrase>& phrases) {
  ojson arr = ojson::array();
  for (const auto& p : phrases) {
    ojson o;
    o["anchor"] = p.anchor;
    o["text"] = p.text;
    if (!p.plural_text.empty()) o["plural"] = p.plural_text;
    o["position"] = p.position == QueryPhrase::Position::Before ? "before" : "after";
    arr.push_back(std::move(o));
  }
  return arr;
}

}  // namespace

std::string serialize_schema(const SchemaGraph& graph) {
  ojson doc;
  doc["relations"] = ojson::array();
  for (const auto& r : graph.relations) {
    ojson o;
    o["name"] = r.name;
    o["noun"] = {{"singular", r.noun.singular}, {"plural", r.noun.plural}};
    o["heading"] = r.heading_attribute;
    o["weight"] = r.weight;
    if (!r.aliases.empty()) o["aliases"] = r.aliases;
    o["keys"] = r.keys;
    if (!r.short_template.empty()) o["short_template"] = r.short_template;
    if (!r.long_template.empty()) o["long_template"] = r.long_template;
    o["attributes"] = ojson::array();
    for (const auto* a : graph.attributes_of(r.name)) {
      ojson ao;
      ao["name"] = a->name;
      ao["noun"] = {{"singular", a->noun.singular}, {"plural", a->noun.plural}};
      ao["weight"] = a->weight;
      ao["type"] = a->type == ValueType::Integer ? "integer" : "text";
      if (a->temporal) ao["temporal"] = true;
      if (!a->lexicon.empty()) ao["lexicon"] = a->lexicon;
      if (const auto* p = graph.find_projection(r.name, a->name); p != nullptr && !p->template_text.empty())
        ao["template"] = p->template_text;
      o["attributes"].push_back(std::move(ao));
    }
    doc["relations"].push_back(std::move(o));
  }
  doc["joins"] = ojson::array();
  for (const auto& j : graph.joins) {
    ojson o;
    o["from"] = j.from_relation;
    o["to"] = j.to_relation;
    o["from_key"] = j.from_key;
    o["to_key"] = j.to_key;
    if (!j.template_text.empty()) o["template"] = j.template_text;
    if (!j.relative_clause.empty()) o["relative_clause"] = j.relative_clause;
    if (!j.procedural_template.empty()) o["procedural_template"] = j.procedural_template;
    if (!j.phrases.empty()) o["phrases"] = phrases_json(j.phrases);
    doc["joins"].push_back(std::move(o));
  }
  for (const auto& jp : graph.join_paths) {
    ojson o;
    o["path"] = jp.path;
    if (!jp.template_text.empty()) o["template"] = jp.template_text;
    if (!jp.procedural_template.empty()) o["procedural_template"] = jp.procedural_template;
    if (!jp.phrases.empty()) o["phrases"] = phrases_json(jp.phrases);
    doc["joins"].push_back(std::move(o));
  }
  if (!graph.definitions.empty()) doc["definitions"] = graph.definitions;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string emit_dot(const SchemaGraph& graph) {
  std::vector<const RelationNode*> rels;
  for (const auto& r : graph.relations) rels.push_back(&r);
  std::sort(rels.begin(), rels.end(), [](const RelationNode* a, const RelationNode* b) { return a->name < b->name; });
  std::vector<const JoinEdge*> edges;
  for (const auto& j : graph.joins) edges.push_back(&j);
  std::sort(edges.begin(), edges.end(), [](const JoinEdge* a, const JoinEdge* b) {
    return std::tie(a->from_relation, a->to_relation, a->from_key, a->to_key) <
           std::tie(b->from_relation, b->to_relation, b->from_key, b->to_key);
  });

  std::ostringstream out;
  out << "digraph schema {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=box];\n";
  for (const auto* r : rels) {
    out << "  \"" << dot_escape(r->name) << "\" [label=\"" << dot_escape(r->name) << "\\n"
        << dot_escape(r->noun.singular) << " (heading: " << dot_escape(r->heading_attribute) << ")\"];\n";
  }
  for (const auto* e : edges) {
    out << "  \"" << dot_escape(e->from_relation) << "\" -> \"" << dot_escape(e->to_relation) << "\" [label=\""
        << dot_escape(e->from_key) << " = " << dot_escape(e->to_key) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace talkback
