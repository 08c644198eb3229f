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

#include "talkback/data_store.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "talkback/error.hpp"

namespace talkback {

const Cell* Tuple::find(std::string_view attribute) const {
  for (const auto& [name, cell] : values) {
    if (text::iequals(name, attribute)) return &cell;
  }
  return nullptr;
}

const Cell& Tuple::at(std::string_view attribute) const {
  const Cell* c = find(attribute);
  if (c == nullptr) throw Error(ErrorKind::UnknownAttribute, relation + " has no attribute " + std::string(attribute));
  return *c;
}

const std::vector<Tuple>& Database::table(std::string_view relation) const {
  auto it = tables.find(relation);
  if (it == tables.end()) throw Error(ErrorKind::UnknownRelation, "no table " + std::string(relation));
  return it->second;
}

namespace {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 1;  // line on which the record starts
};

std::vector<Record> parse_records(std::string_view text) {
  std::vector<Record> out;
  std::size_t i = 0;
  std::size_t line = 1;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < text.size()) {
    Record rec;
    rec.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      if (i < text.size() && text[i] == '"') {
        std::size_t quote_line = line;
        ++i;
        while (true) {
          if (i >= text.size())
            throw Error(ErrorKind::MalformedDocument, "unterminated quote starting on line " + std::to_string(quote_line));
          char c = text[i++];
          if (c == '"') {
            if (i < text.size() && text[i] == '"') {
              field += '"';
              ++i;
              continue;
            }
            break;
          }
          if (c == '\n') ++line;
          field += c;
        }
      }
      // Unquoted content (or trailing junk after a closing quote, kept verbatim).
      while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') field += text[i++];
      rec.fields.push_back(std::move(field));
      field.clear();
      if (i >= text.size()) {
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {
        if (text[i] == '\r') ++i;
        if (i < text.size() && text[i] == '\n') ++i;
        ++line;
        done = true;
      }
    }
    // Blank lines carry no record.
    if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
    out.push_back(std::move(rec));
  }
  return out;
}

Cell type_cell(const std::string& raw, bool integer_column) {
  if (raw.empty()) return std::monostate{};
  if (integer_column) {
    std::int64_t v = 0;
    text::parse_int64(raw, v);
    return v;
  }
  return raw;
}

std::vector<Tuple> load_table(const SchemaGraph& graph, const RelationNode& rel, std::string_view content) {
  auto records = parse_records(content);
  auto attrs = graph.attributes_of(rel.name);
  if (records.empty()) throw Error(ErrorKind::HeaderMismatch, rel.name + ".csv has no header row");
  const auto& header = records.front().fields;

  // Map declared attribute -> column index; header must be the declared set exactly.
  std::vector<std::size_t> column(attrs.size());
  std::set<std::string> seen;
  for (const auto& h : header) {
    if (!seen.insert(text::to_lower(text::trim(h))).second)
      throw Error(ErrorKind::HeaderMismatch, rel.name + ".csv repeats column " + h);
  }
  if (header.size() != attrs.size())
    throw Error(ErrorKind::HeaderMismatch, rel.name + ".csv has " + std::to_string(header.size()) +
                                               " columns, relation declares " + std::to_string(attrs.size()));
  for (std::size_t a = 0; a < attrs.size(); ++a) {
    auto it = std::find_if(header.begin(), header.end(),
                           [&](const std::string& h) { return text::iequals(text::trim(h), attrs[a]->name); });
    if (it == header.end()) throw Error(ErrorKind::HeaderMismatch, rel.name + ".csv lacks column " + attrs[a]->name);
    column[a] = static_cast<std::size_t>(it - header.begin());
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].fields.size() != header.size())
      throw Error(ErrorKind::RaggedRow, rel.name + ".csv line " + std::to_string(records[r].line) + " has " +
                                            std::to_string(records[r].fields.size()) + " fields, expected " +
                                            std::to_string(header.size()));
  }

  // A column is integer when every non-empty cell parses as one.
  std::vector<bool> integer(header.size(), true);
  for (std::size_t c = 0; c < header.size(); ++c) {
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& raw = records[r].fields[c];
      std::int64_t v = 0;
      if (!raw.empty() && !text::parse_int64(raw, v)) {
        integer[c] = false;
        break;
      }
    }
  }

  std::vector<Tuple> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    Tuple t;
    t.relation = rel.name;
    t.row = r - 1;
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      t.values.emplace_back(attrs[a]->name, type_cell(records[r].fields[column[a]], integer[column[a]]));
    }
    rows.push_back(std::move(t));
  }
  return rows;
}

std::string slurp(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  for (auto& r : parse_records(text)) out.push_back(std::move(r.fields));
  return out;
}

Database load_data(const SchemaGraph& graph, const std::map<std::string, std::istream*, text::ILess>& streams) {
  Database db;
  for (const auto& [name, stream] : streams) {
    const RelationNode* rel = graph.find_relation(name);
    if (rel == nullptr) throw Error(ErrorKind::UnknownRelation, "data for undeclared relation " + name);
    if (db.tables.count(rel->name)) throw Error(ErrorKind::MalformedDocument, "two tables for relation " + rel->name);
    db.tables[rel->name] = load_table(graph, *rel, slurp(*stream));
  }
  for (const auto& r : graph.relations) db.tables.try_emplace(r.name);
  return db;
}

Database load_data_dir(const SchemaGraph& graph, const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) throw Error(ErrorKind::Io, "not a directory: " + directory.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && text::iequals(entry.path().extension().string(), ".csv")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::ifstream> owned;
  owned.reserve(files.size());
  std::map<std::string, std::istream*, text::ILess> streams;
  for (const auto& f : files) {
    owned.emplace_back(f, std::ios::binary);
    if (!owned.back()) throw Error(ErrorKind::Io, "cannot open " + f.string());
    streams[f.stem().string()] = &owned.back();
  }
  return load_data(graph, streams);
}

std::vector<const Tuple*> follow_join(const Database& db, const SchemaGraph& graph, const JoinEdge& edge,
                                      const Tuple& t) {
  const RelationNode* from = graph.find_relation(edge.from_relation);
  const RelationNode* to = graph.find_relation(edge.to_relation);
  const RelationNode* mine = graph.find_relation(t.relation);
  if (mine == nullptr || (mine != from && mine != to))
    throw Error(ErrorKind::WrongRelation, "tuple of " + t.relation + " is not an endpoint of " + edge.from_relation +
                                              "-" + edge.to_relation);
  bool forward = mine == from;
  const RelationNode* other = forward ? to : from;
  const std::string& my_key = forward ? edge.from_key : edge.to_key;
  const std::string& other_key = forward ? edge.to_key : edge.from_key;

  std::vector<const Tuple*> out;
  const Cell& key = t.at(my_key);
  if (is_null(key)) return out;
  for (const auto& candidate : db.table(other->name)) {
    const Cell* c = candidate.find(other_key);
    if (c != nullptr && !is_null(*c) && *c == key) out.push_back(&candidate);
  }
  return out;
}

RankSpec RankSpec::parse(std::string_view spec) {
  std::string s = text::trim(spec);
  if (s.empty() || text::iequals(s, "load-order")) return load_order();
  RankSpec r;
  auto colon = s.find(':');
  r.attribute = text::trim(s.substr(0, colon));
  if (colon != std::string::npos) {
    std::string dir = text::trim(s.substr(colon + 1));
    if (text::iequals(dir, "desc")) r.descending = true;
    else if (!text::iequals(dir, "asc")) throw Error(ErrorKind::MalformedDocument, "rank direction must be asc or desc");
  }
  return r;
}

int compare_cells(const Cell& a, const Cell& b) {
  bool na = is_null(a), nb = is_null(b);
  if (na || nb) return na == nb ? 0 : (na ? -1 : 1);
  const auto* ia = std::get_if<std::int64_t>(&a);
  const auto* ib = std::get_if<std::int64_t>(&b);
  if (ia && ib) return *ia < *ib ? -1 : (*ia > *ib ? 1 : 0);
  std::string sa = cell_to_string(a), sb = cell_to_string(b);
  return sa < sb ? -1 : (sa > sb ? 1 : 0);
}

void rank_tuples(std::vector<const Tuple*>& tuples, const RankSpec& rank) {
  if (rank.attribute.empty()) {
    std::stable_sort(tuples.begin(), tuples.end(), [](const Tuple* a, const Tuple* b) { return a->row < b->row; });
    return;
  }
  for (const Tuple* t : tuples) t->at(rank.attribute);  // surfaces UnknownAttribute up front
  std::stable_sort(tuples.begin(), tuples.end(), [&](const Tuple* a, const Tuple* b) {
    int c = compare_cells(a->at(rank.attribute), b->at(rank.attribute));
    return rank.descending ? c > 0 : c < 0;
  });
}

std::vector<const Tuple*> select_tuples(const Database& db, const SchemaGraph& graph, std::string_view relation,
                                        std::size_t budget, const RankSpec& rank) {
  const RelationNode* rel = graph.find_relation(relation);
  if (rel == nullptr) throw Error(ErrorKind::UnknownRelation, "unknown relation " + std::string(relation));
  if (!rank.attribute.empty() && graph.find_attribute(rel->name, rank.attribute) == nullptr)
    throw Error(ErrorKind::UnknownAttribute, rel->name + " has no attribute " + rank.attribute);
  std::vector<const Tuple*> all;
  for (const auto& t : db.table(rel->name)) all.push_back(&t);
  rank_tuples(all, rank);
  if (all.size() > budget) all.resize(budget);
  return all;
}

}  // namespace talkback
