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

#include "talkback/narrator.hpp"

#include <algorithm>
#include <functional>

#include "talkback/error.hpp"
#include "talkback/template_engine.hpp"

namespace talkback {

std::string_view to_string(NarrationMode mode) {
  return mode == NarrationMode::Declarative ? "declarative" : "procedural";
}

std::string_view to_string(PatternInstance::Kind kind) {
  switch (kind) {
    case PatternInstance::Kind::Unary: return "unary";
    case PatternInstance::Kind::Join: return "join";
    case PatternInstance::Kind::Split: return "split";
  }
  return "unknown";
}

std::string Narrative::text() const { return text::join(sentences, " "); }

namespace {

// Every template that narration may instantiate.
std::vector<std::string> narration_templates(const SchemaGraph& g) {
  std::vector<std::string> out;
  for (const auto& r : g.relations) {
    out.push_back(r.short_template);
    out.push_back(r.long_template);
  }
  for (const auto& p : g.projections) out.push_back(p.template_text);
  for (const auto& j : g.joins) {
    out.push_back(j.template_text);
    out.push_back(j.relative_clause);
    out.push_back(j.procedural_template);
  }
  for (const auto& jp : g.join_paths) {
    out.push_back(jp.template_text);
    out.push_back(jp.procedural_template);
  }
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

bool referenced_by_templates(const SchemaGraph& g, const RelationNode& rel) {
  TemplateDefinitions defs;
  try {
    defs = g.parsed_definitions();
  } catch (const Error&) {
  }
  for (const auto& t : narration_templates(g)) {
    TemplateExpr expr;
    try {
      expr = parse_template(t, defs);
    } catch (const Error&) {
      continue;
    }
    for (const auto& p : collect_placeholders(expr)) {
      if (!p.alias.empty()) {
        if (g.find_relation(p.alias) == &rel) return true;
      } else if (g.find_attribute(rel.name, p.attribute) != nullptr) {
        return true;
      }
    }
  }
  return false;
}

const RelationNode* other_end(const SchemaGraph& g, const JoinEdge& e, const RelationNode* from) {
  const RelationNode* a = g.find_relation(e.from_relation);
  const RelationNode* b = g.find_relation(e.to_relation);
  if (a == from) return b;
  if (b == from) return a;
  return nullptr;
}

struct Step {
  const RelationNode* parent = nullptr;
  const RelationNode* child = nullptr;
  std::vector<const RelationNode*> path;  // parent, relays..., child
  std::vector<const JoinEdge*> edges;
};

std::vector<std::string> path_names(const Step& s) {
  std::vector<std::string> out;
  for (const auto* r : s.path) out.push_back(r->name);
  return out;
}

// DFS over join edges with relay collapsing.
struct Traversal {
  const SchemaGraph& g;
  const NarrationPlan& plan;
  const RelationNode* root = nullptr;
  std::set<const RelationNode*> relays;
  std::set<const RelationNode*> allowed;
  std::set<const RelationNode*> visited;
  std::vector<const RelationNode*> order;
  std::map<const RelationNode*, std::vector<Step>> children;
  std::vector<PatternInstance> patterns;
  std::set<std::pair<const RelationNode*, const RelationNode*>> linked;

  Traversal(const SchemaGraph& graph, const NarrationPlan& p) : g(graph), plan(p) {
    root = g.find_relation(resolve_start(g, plan));
    for (const auto& r : g.relations) {
      if (is_relay(g, r.name)) relays.insert(&r);
    }
    std::set<const RelationNode*> filter;
    if (plan.relation_filter) {
      for (const auto& name : *plan.relation_filter) {
        if (const auto* r = g.find_relation(name)) filter.insert(r);
      }
    }
    for (const auto& r : g.relations) {
      bool ok = plan.relation_filter ? filter.count(&r) > 0 : r.weight > 0;
      if (ok || &r == root) allowed.insert(&r);
    }
    visit(root, nullptr);
  }

  void expand(const Step& partial, std::vector<Step>& out) const {
    const RelationNode* last = partial.path.back();
    for (const JoinEdge* e : g.joins_of(last->name)) {
      const RelationNode* other = other_end(g, *e, last);
      if (other == nullptr || other == last) continue;
      if (std::find(partial.path.begin(), partial.path.end(), other) != partial.path.end()) continue;
      Step next = partial;
      next.path.push_back(other);
      next.edges.push_back(e);
      if (relays.count(other)) {
        expand(next, out);
      } else if (allowed.count(other)) {
        next.child = other;
        out.push_back(std::move(next));
      }
    }
  }

  void visit(const RelationNode* r, const RelationNode* parent) {
    visited.insert(r);
    order.push_back(r);
    Step start;
    start.parent = r;
    start.path = {r};
    std::vector<Step> candidates;
    expand(start, candidates);

    std::vector<const RelationNode*> fresh;
    for (const auto& c : candidates) {
      if (!visited.count(c.child) && std::find(fresh.begin(), fresh.end(), c.child) == fresh.end())
        fresh.push_back(c.child);
    }
    if (fresh.size() >= 2) {
      PatternInstance split{PatternInstance::Kind::Split, {r->name}, std::nullopt};
      for (const auto* f : fresh) split.relations.push_back(f->name);
      patterns.push_back(std::move(split));
    }
    for (const auto& c : candidates) {
      if (c.child == parent) continue;
      auto key = std::minmax(r, c.child);
      if (visited.count(c.child)) {
        if (linked.insert(key).second)
          patterns.push_back({PatternInstance::Kind::Join, {r->name, c.child->name}, relay_of(c)});
        continue;
      }
      linked.insert(key);
      for (std::size_t i = 1; i + 1 < c.path.size(); ++i) visited.insert(c.path[i]);
      patterns.push_back({PatternInstance::Kind::Unary, {r->name, c.child->name}, relay_of(c)});
      children[r].push_back(c);
      visit(c.child, r);
    }
  }

  static std::optional<std::string> relay_of(const Step& s) {
    if (s.path.size() > 2) return s.path[1]->name;
    return std::nullopt;
  }

  std::vector<const RelationNode*> narrated() const { return order; }
};

bool in_primary_key(const RelationNode& r, const std::string& attribute) {
  if (r.keys.empty()) return false;
  const auto& pk = r.keys.front();
  return std::any_of(pk.begin(), pk.end(), [&](const std::string& k) { return text::iequals(k, attribute); });
}

// Attributes that need a clause of their own: not the heading, not a join
// key, not part of the primary key.
std::vector<const AttributeNode*> clause_attributes(const SchemaGraph& g, const RelationNode& r) {
  std::vector<const AttributeNode*> out;
  for (const auto* a : g.attributes_of(r.name)) {
    if (!a->is_heading && !g.is_join_key(r.name, a->name) && !in_primary_key(r, a->name)) out.push_back(a);
  }
  return out;
}

std::optional<std::string> fallback_reason(const SchemaGraph& g, const Traversal& t) {
  for (const auto* r : t.order) {
    auto attrs = clause_attributes(g, *r);
    if (attrs.size() > 2 && r->long_template.empty())
      return r->name + " needs " + std::to_string(attrs.size()) + " attribute clauses and has no long template";
  }
  for (const auto& [hub, steps] : t.children) {
    if (steps.size() > 2) return "split at " + hub->name + " fuses " + std::to_string(steps.size()) + " branches";
  }
  return std::nullopt;
}

std::string finish_sentence(std::string_view s) {
  std::string out = text::normalize_whitespace(s);
  if (!out.empty() && !text::ends_with_terminal_punctuation(out)) out += '.';
  return out;
}

class Narrator {
 public:
  Narrator(const SchemaGraph& g, const Database& db, const NarrationPlan& plan, const Traversal& t,
           NarrationMode mode, Narrative& out)
      : g_(g), db_(db), plan_(plan), t_(t), mode_(mode), out_(out), defs_(g.parsed_definitions()) {}

  void run() {
    const RelationNode* root = t_.root;
    std::vector<const Tuple*> rows;
    for (const auto& tuple : db_.table(root->name)) rows.push_back(&tuple);
    rank(*root, rows);
    rows = admit(*root, rows);
    if (rows.empty()) out_.diagnostics.push_back("relation " + root->name + " has no tuples to narrate");
    for (const Tuple* tuple : rows) {
      auto sentences = describe(*root, *tuple, /*merge=*/true);
      if (sentences.empty() && !root->short_template.empty()) {
        TupleBindings b;
        bind(b, *root, {tuple});
        add(render(root->short_template, b, default_mention(*root, *tuple)));
      }
      for (auto& s : sentences) add(std::move(s));
      narrate_children(*root, *tuple);
    }
  }

 private:
  const SchemaGraph& g_;
  const Database& db_;
  const NarrationPlan& plan_;
  const Traversal& t_;
  NarrationMode mode_;
  Narrative& out_;
  TemplateDefinitions defs_;
  std::set<std::pair<const Tuple*, std::string>> covered_;

  bool procedural() const { return mode_ == NarrationMode::Procedural; }

  void add(std::string sentence) {
    sentence = finish_sentence(sentence);
    if (!sentence.empty()) out_.sentences.push_back(std::move(sentence));
  }

  void rank(const RelationNode& r, std::vector<const Tuple*>& rows) const {
    RankSpec spec = plan_.rank;
    if (!spec.attribute.empty()) {
      auto dot = spec.attribute.find('.');
      if (dot != std::string::npos) {
        if (g_.find_relation(spec.attribute.substr(0, dot)) != &r) spec = RankSpec::load_order();
        else spec.attribute = spec.attribute.substr(dot + 1);
      }
      if (!spec.attribute.empty() && g_.find_attribute(r.name, spec.attribute) == nullptr) spec = RankSpec::load_order();
    }
    rank_tuples(rows, spec);
  }

  // Budget is global per relation: a tuple already chosen stays free to reuse.
  std::vector<const Tuple*> admit(const RelationNode& r, const std::vector<const Tuple*>& ranked) {
    auto& chosen = out_.selected_rows[r.name];
    std::vector<const Tuple*> out;
    for (const Tuple* t : ranked) {
      if (chosen.count(t->row)) {
        out.push_back(t);
      } else if (chosen.size() < plan_.tuple_budget) {
        chosen.insert(t->row);
        out.push_back(t);
      }
    }
    return out;
  }

  void bind(TupleBindings& b, const RelationNode& r, std::vector<const Tuple*> tuples) {
    auto& rows = out_.bound_rows[r.name];
    for (const Tuple* t : tuples) rows.insert(t->row);
    for (const auto& alias : r.aliases) b[alias] = tuples;
    b[r.name] = std::move(tuples);
  }

  std::string heading_of(const RelationNode& r, const Tuple& t) const {
    const Cell* c = t.find(r.heading_attribute);
    return c == nullptr || is_null(*c) ? std::string() : cell_to_string(*c);
  }

  std::string default_mention(const RelationNode& r, const Tuple& t) const {
    return "There is " + text::with_article(r.noun.singular) + " " + heading_of(r, t) + ".";
  }

  // Marks every attribute a template realizes. Placeholders inside a loop over
  // their own alias realize all bound tuples; others only the first one.
  void cover(const TemplateExpr& expr, const TupleBindings& b) { cover(expr, b, {}); }

  void cover(const TemplateExpr& expr, const TupleBindings& b, std::set<const RelationNode*> looping) {
    for (const auto& part : expr.parts) {
      if (const auto* p = std::get_if<Placeholder>(&part)) {
        const RelationNode* r = nullptr;
        if (!p->alias.empty()) {
          r = g_.find_relation(p->alias);
        } else {
          for (const auto& [alias, tuples] : b) {
            if (!tuples.empty() && tuples.front()->find(p->attribute) != nullptr) r = g_.find_relation(alias);
          }
        }
        if (r == nullptr) continue;
        auto it = b.find(r->name);
        if (it == b.end() || it->second.empty()) continue;
        std::string attr;
        if (p->variant == PlaceholderVariant::Value) attr = p->attribute;
        else if (p->variant == PlaceholderVariant::Heading) attr = r->heading_attribute;
        else continue;
        std::size_t n = looping.count(r) ? it->second.size() : 1;
        for (std::size_t i = 0; i < n; ++i) covered_.insert({it->second[i], text::to_lower(attr)});
      } else if (const auto* loop = std::get_if<Box<ListLoop>>(&part)) {
        auto inner = looping;
        if (const auto* r = g_.find_relation((*loop)->arity_alias)) inner.insert(r);
        for (const auto& guard : (*loop)->guards) cover(guard.body, b, inner);
      }
    }
  }

  bool is_covered(const Tuple* t, const std::string& attr) const {
    return covered_.count({t, text::to_lower(attr)}) > 0;
  }

  // Instantiates template text; procedural mode swaps failures for `fallback`.
  std::string render(const std::string& source, const TupleBindings& b, const std::string& fallback) {
    try {
      TemplateExpr expr = parse_template(source, defs_);
      std::string s = instantiate(expr, b, &g_);
      cover(expr, b);
      return s;
    } catch (const Error& e) {
      if (!procedural()) throw;
      out_.diagnostics.push_back(std::string("template failed, using a plain sentence: ") + e.what());
      return fallback;
    }
  }

  std::size_t subject_length(const RelationNode& r, const Tuple& t, const std::vector<std::string>& tokens) const {
    auto head = text::tokenize(heading_of(r, t));
    if (head.empty()) return 1;
    auto it = std::search(tokens.begin(), tokens.end(), head.begin(), head.end());
    if (it == tokens.end()) return 1;
    return static_cast<std::size_t>(it - tokens.begin()) + head.size();
  }

  // Sentences for the attributes of t not yet realized elsewhere.
  std::vector<std::string> describe(const RelationNode& r, const Tuple& t, bool merge) {
    std::vector<const AttributeNode*> pending;
    for (const auto* a : clause_attributes(g_, r)) {
      const Cell* c = t.find(a->name);
      if (c == nullptr || is_null(*c) || is_covered(&t, a->name)) continue;
      pending.push_back(a);
    }
    if (pending.empty()) return {};
    TupleBindings b;
    bind(b, r, {&t});
    if (!r.long_template.empty() && (!procedural() || merge)) {
      return {render(r.long_template, b, default_mention(r, t))};
    }
    std::vector<Clause> clauses;
    for (const auto* a : pending) {
      std::string fallback = heading_of(r, t) + "'s " + a->noun.singular + " is " + cell_to_string(*t.find(a->name));
      const ProjectionEdge* p = g_.find_projection(r.name, a->name);
      std::string s;
      std::size_t subject = 0;
      if (p != nullptr && !p->template_text.empty()) {
        s = render(p->template_text, b, fallback);
      } else {
        s = fallback;
        covered_.insert({&t, text::to_lower(a->name)});
      }
      Clause c = Clause::from_text(s, 0);
      subject = s == fallback ? text::tokenize(heading_of(r, t) + "'s " + a->noun.singular).size()
                              : subject_length(r, t, c.tokens);
      c.subject_len = std::min(subject, c.tokens.size());
      clauses.push_back(std::move(c));
    }
    if (merge) clauses = merge_common(std::move(clauses));
    std::vector<std::string> out;
    for (const auto& c : clauses) out.push_back(c.text());
    return out;
  }

  // Tuples of step.child reachable from p, through any relays.
  std::vector<const Tuple*> reach(const Step& s, const Tuple& p) {
    std::vector<const Tuple*> frontier{&p};
    for (const JoinEdge* e : s.edges) {
      std::vector<const Tuple*> next;
      std::set<const Tuple*> seen;
      for (const Tuple* t : frontier) {
        for (const Tuple* n : follow_join(db_, g_, *e, *t)) {
          if (seen.insert(n).second) next.push_back(n);
        }
      }
      std::sort(next.begin(), next.end(), [](const Tuple* a, const Tuple* b) { return a->row < b->row; });
      frontier = std::move(next);
    }
    rank(*s.child, frontier);
    return admit(*s.child, frontier);
  }

  std::string step_template(const Step& s) const {
    std::string declarative, proc;
    if (s.path.size() > 2) {
      if (const auto* jp = g_.find_join_path(path_names(s))) {
        declarative = jp->template_text;
        proc = jp->procedural_template;
      }
    } else {
      declarative = s.edges.front()->template_text;
      proc = s.edges.front()->procedural_template;
    }
    if (procedural() && !proc.empty()) return proc;
    return declarative;
  }

  std::string link_sentence(const Step& s, const Tuple& p, const std::vector<const Tuple*>& kids) {
    std::vector<std::string> names;
    for (const Tuple* k : kids) {
      names.push_back(heading_of(*s.child, *k));
      covered_.insert({k, text::to_lower(s.child->heading_attribute)});
    }
    const NounForms& noun = s.child->noun;
    return heading_of(*s.parent, p) + " is linked to the " + (kids.size() == 1 ? noun.singular : noun.plural) + " " +
           text::join_list(names) + ".";
  }

  void narrate_children(const RelationNode& r, const Tuple& p) {
    auto it = t_.children.find(&r);
    if (it == t_.children.end()) return;
    const auto& steps = it->second;
    if (steps.size() >= 2 && !procedural() && fuse_split(r, p, steps)) return;
    for (const auto& s : steps) narrate_step(s, p);
  }

  void narrate_step(const Step& s, const Tuple& p) {
    auto kids = reach(s, p);
    if (kids.empty()) return;
    std::string tmpl = step_template(s);
    if (!tmpl.empty()) {
      TupleBindings b;
      bind(b, *s.parent, {&p});
      bind(b, *s.child, kids);
      add(render(tmpl, b, link_sentence(s, p, kids)));
    } else {
      add(link_sentence(s, p, kids));
    }
    follow_up(s, kids);
  }

  void follow_up(const Step& s, const std::vector<const Tuple*>& kids) {
    for (const Tuple* k : kids) {
      for (auto& sentence : describe(*s.child, *k, !procedural())) add(std::move(sentence));
      narrate_children(*s.child, *k);
    }
  }

  // One sentence for all branches of a split: the leading template parts shared
  // by every branch are said once, then each branch with its relative clause.
  bool fuse_split(const RelationNode& hub, const Tuple& h, const std::vector<Step>& steps) {
    std::vector<TemplateExpr> exprs;
    for (const auto& s : steps) {
      std::string tmpl = step_template(s);
      if (tmpl.empty()) return false;
      exprs.push_back(parse_template(tmpl, defs_));
    }
    std::size_t shared = 0;
    for (;; ++shared) {
      bool same = std::all_of(exprs.begin(), exprs.end(), [&](const TemplateExpr& e) {
        return shared < e.parts.size() && shared < exprs.front().parts.size() && e.parts[shared] == exprs.front().parts[shared];
      });
      if (!same) break;
    }
    if (shared == 0) return false;
    TemplateExpr frame;
    frame.parts.assign(exprs.front().parts.begin(), exprs.front().parts.begin() + static_cast<std::ptrdiff_t>(shared));
    TupleBindings hub_only;
    bind(hub_only, hub, {&h});
    std::string frame_text;
    try {
      frame_text = instantiate(frame, hub_only, &g_);
    } catch (const Error&) {
      return false;  // the shared prefix mentions a branch; nothing to factor out
    }
    cover(frame, hub_only);

    std::vector<std::string> items;
    std::vector<std::vector<const Tuple*>> kids_per_step;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const Step& s = steps[i];
      kids_per_step.push_back(reach(s, h));
      TemplateExpr rest;
      rest.parts.assign(exprs[i].parts.begin() + static_cast<std::ptrdiff_t>(shared), exprs[i].parts.end());
      std::string relative = s.path.size() == 2 ? s.edges.front()->relative_clause : std::string();
      for (const Tuple* k : kids_per_step.back()) {
        TupleBindings b;
        bind(b, hub, {&h});
        bind(b, *s.child, {k});
        std::string item = instantiate(rest, b, &g_);
        cover(rest, b);
        if (!relative.empty()) {
          TemplateExpr rel = parse_template(relative, defs_);
          item += " " + instantiate(rel, b, &g_);
          cover(rel, b);
        }
        items.push_back(text::normalize_whitespace(item));
      }
    }
    if (!items.empty()) add(frame_text + text::join_list(items));
    for (std::size_t i = 0; i < steps.size(); ++i) follow_up(steps[i], kids_per_step[i]);
    return true;
  }
};

}  // namespace

bool is_relay(const SchemaGraph& graph, std::string_view relation) {
  const RelationNode* r = graph.find_relation(relation);
  if (r == nullptr) return false;
  if (!r->short_template.empty() || !r->long_template.empty()) return false;
  for (const auto* a : graph.attributes_of(r->name)) {
    const ProjectionEdge* p = graph.find_projection(r->name, a->name);
    if (p != nullptr && !p->template_text.empty()) return false;
  }
  if (graph.joins_of(r->name).size() < 2) return false;
  return !referenced_by_templates(graph, *r);
}

std::string resolve_start(const SchemaGraph& graph, const NarrationPlan& plan) {
  if (!plan.start_relation.empty()) {
    const RelationNode* r = graph.find_relation(plan.start_relation);
    if (r == nullptr) throw Error(ErrorKind::UnknownStart, "unknown start relation " + plan.start_relation);
    return r->name;
  }
  if (graph.relations.empty()) throw Error(ErrorKind::UnknownStart, "schema has no relations to start from");
  const RelationNode* best = &graph.relations.front();
  for (const auto& r : graph.relations) {
    if (r.weight > best->weight) best = &r;
  }
  return best->name;
}

std::vector<PatternInstance> detect_patterns(const SchemaGraph& graph, const NarrationPlan& plan) {
  return Traversal(graph, plan).patterns;
}

NarrationMode fallback_mode(const SchemaGraph& graph, const NarrationPlan& plan) {
  if (graph.relations.empty()) return NarrationMode::Declarative;
  Traversal t(graph, plan);
  return fallback_reason(graph, t) ? NarrationMode::Procedural : NarrationMode::Declarative;
}

Narrative narrate(const SchemaGraph& graph, const Database& db, const NarrationPlan& plan) {
  if (plan.tuple_budget == 0) throw Error(ErrorKind::MalformedDocument, "tuple budget must be at least 1");
  Narrative out;
  Traversal t(graph, plan);
  out.patterns = t.patterns;
  NarrationMode mode = plan.mode;
  if (mode == NarrationMode::Declarative) {
    if (auto reason = fallback_reason(graph, t)) {
      mode = NarrationMode::Procedural;
      out.diagnostics.push_back("fell back to procedural narration: " + *reason);
    }
  }
  out.mode_used = mode;
  Narrator(graph, db, plan, t, mode, out).run();
  return out;
}

}  // namespace talkback
