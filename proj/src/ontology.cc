// Copyright 2026 The tagmap Authors.
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

#include "tagmap/ontology.h"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "tagmap/error.h"

namespace tagmap {

namespace {

std::string Trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(Trim(std::string_view(line).substr(
        start, tab == std::string::npos ? std::string::npos : tab - start)));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool SkipLine(const std::string& line) {
  auto t = Trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

std::string QualifiedName(std::string_view language, std::string_view label) {
  std::string name(language);
  name += ':';
  name += label;
  return name;
}

std::pair<std::string, std::string> SplitQualified(std::string_view name) {
  auto colon = name.find(':');
  if (colon == std::string_view::npos) return {"", std::string(name)};
  return {std::string(name.substr(0, colon)),
          std::string(name.substr(colon + 1))};
}

RelationClasses DefaultRelationClasses() {
  return {
      {"wikiPageRedirects", RelationClass::kEquivalence},
      {"sameAs", RelationClass::kEquivalence},
      {"stylisticOrigin", RelationClass::kRelatedness},
      {"musicSubgenre", RelationClass::kRelatedness},
      {"derivative", RelationClass::kRelatedness},
      {"musicFusionGenre", RelationClass::kRelatedness},
  };
}

RelationClasses ReadRelationClasses(std::istream& in) {
  RelationClasses classes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (SkipLine(line)) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected relation=class", lineno);
    }
    auto relation = Trim(std::string_view(line).substr(0, eq));
    auto value = Trim(std::string_view(line).substr(eq + 1));
    if (relation.empty()) throw ParseError("empty relation name", lineno);
    if (value == "equivalence") {
      classes[relation] = RelationClass::kEquivalence;
    } else if (value == "relatedness") {
      classes[relation] = RelationClass::kRelatedness;
    } else {
      throw ParseError("unknown relation class '" + value + "'", lineno);
    }
  }
  return classes;
}

RelationClasses LoadRelationClasses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return ReadRelationClasses(in);
}

ConceptGraph ConceptGraph::Build(const std::vector<std::string>& concepts,
                                 const std::vector<Edge>& edges,
                                 const RelationClasses& classes,
                                 BuildStats* stats) {
  ConceptGraph g;
  g.classes_ = classes;
  BuildStats local;

  auto intern = [&g](const std::string& c) {
    if (c.empty()) throw ValidationError("empty concept identifier");
    auto [it, inserted] = g.index_.emplace(c, g.concepts_.size());
    if (inserted) g.concepts_.push_back(c);
    return it->second;
  };
  for (const auto& c : concepts) intern(c);

  std::set<Edge> seen;
  for (const auto& e : edges) {
    if (e.relation.empty()) throw ValidationError("empty relation type");
    if (classes.count(e.relation) == 0) {
      throw ValidationError("relation '" + e.relation +
                            "' has no equivalence/relatedness class");
    }
    auto s = intern(e.source);
    auto t = intern(e.target);
    if (s == t) {
      ++local.dropped_self_loops;
      continue;
    }
    if (!seen.insert(e).second) {
      ++local.duplicate_edges;
      continue;
    }
    g.edges_.push_back(e);
    g.edge_indices_.emplace_back(s, t);
  }

  g.adjacency_.assign(g.concepts_.size(), {});
  g.equivalent_.assign(g.concepts_.size(), {});
  for (std::size_t k = 0; k < g.edges_.size(); ++k) {
    auto [s, t] = g.edge_indices_[k];
    g.adjacency_[s].push_back(t);
    g.adjacency_[t].push_back(s);
    if (g.ClassOf(g.edges_[k]) == RelationClass::kEquivalence) {
      g.equivalent_[s].push_back(t);
      g.equivalent_[t].push_back(s);
    }
  }
  for (auto* lists : {&g.adjacency_, &g.equivalent_}) {
    for (auto& v : *lists) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }
  if (stats) *stats = local;
  return g;
}

std::optional<std::size_t> ConceptGraph::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ConceptGraph::index(std::string_view name) const {
  auto i = find(name);
  if (!i) throw LookupError("unknown concept '" + std::string(name) + "'");
  return *i;
}

RelationClass ConceptGraph::ClassOf(const Edge& edge) const {
  auto it = classes_.find(edge.relation);
  if (it == classes_.end()) {
    throw ValidationError("relation '" + edge.relation + "' is unclassified");
  }
  return it->second;
}

bool ConceptGraph::IsEquivalencePair(std::size_t i, std::size_t j) const {
  const auto& eq = equivalent_[i];
  return std::binary_search(eq.begin(), eq.end(), j);
}

ConceptGraph ReadGraph(std::istream& in, const RelationClasses& classes,
                       ConceptGraph::BuildStats* stats) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (SkipLine(line)) continue;
    auto fields = SplitTabs(line);
    if (fields.size() != 3) {
      throw ParseError("expected 3 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    }
    for (const auto& f : fields) {
      if (f.empty()) throw ParseError("empty field", lineno);
    }
    if (classes.count(fields[1]) == 0) {
      throw ValidationError("line " + std::to_string(lineno) +
                            ": relation '" + fields[1] +
                            "' has no equivalence/relatedness class");
    }
    edges.push_back({fields[0], fields[1], fields[2]});
  }
  return ConceptGraph::Build({}, edges, classes, stats);
}

ConceptGraph LoadGraph(const std::filesystem::path& path,
                       const RelationClasses& classes,
                       ConceptGraph::BuildStats* stats) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return ReadGraph(in, classes, stats);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WriteGraph(std::ostream& out, const ConceptGraph& graph) {
  for (const auto& e : graph.edges()) {
    out << e.source << '\t' << e.relation << '\t' << e.target << '\n';
  }
}

Alignment ReadAlignment(std::istream& in) {
  Alignment alignment;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (SkipLine(line)) continue;
    auto fields = SplitTabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("expected source<TAB>target", lineno);
    }
    alignment.emplace_back(fields[0], fields[1]);
  }
  return alignment;
}

Alignment LoadAlignment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return ReadAlignment(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<std::vector<std::size_t>> ComponentIndex::Members() const {
  std::vector<std::vector<std::size_t>> members(component_count);
  for (std::size_t i = 0; i < component_of.size(); ++i) {
    members[component_of[i]].push_back(i);
  }
  return members;
}

ComponentIndex ConnectedComponents(const ConceptGraph& graph) {
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  ComponentIndex index;
  index.component_of.assign(graph.size(), kUnset);
  std::vector<std::size_t> stack;
  for (std::size_t root = 0; root < graph.size(); ++root) {
    if (index.component_of[root] != kUnset) continue;
    auto id = index.component_count++;
    index.component_of[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      for (auto j : graph.neighbors(i)) {
        if (index.component_of[j] == kUnset) {
          index.component_of[j] = id;
          stack.push_back(j);
        }
      }
    }
  }
  return index;
}

std::size_t Degree(const ConceptGraph& graph, std::string_view name) {
  return graph.neighbors(graph.index(name)).size();
}

ConceptGraph MergeAligned(const ConceptGraph& source,
                          const ConceptGraph& target,
                          const Alignment& alignment) {
  for (const auto& c : target.concepts()) {
    if (source.contains(c)) {
      throw ValidationError("concept '" + c +
                            "' appears in both graphs; identifiers must be "
                            "language-qualified");
    }
  }
  RelationClasses classes = source.relation_classes();
  for (const auto& [rel, cls] : target.relation_classes()) {
    auto [it, inserted] = classes.emplace(rel, cls);
    if (!inserted && it->second != cls) {
      throw ValidationError("relation '" + rel +
                            "' is classed differently in the two graphs");
    }
  }
  std::string same_as(kAlignmentRelation);
  auto [it, inserted] = classes.emplace(same_as, RelationClass::kEquivalence);
  if (!inserted && it->second != RelationClass::kEquivalence) {
    throw ValidationError("sameAs must be an equivalence relation");
  }

  std::vector<Edge> edges = source.edges();
  edges.insert(edges.end(), target.edges().begin(), target.edges().end());
  for (const auto& [s, t] : alignment) {
    if (!source.contains(s)) {
      throw ValidationError("alignment source '" + s +
                            "' is not in the source graph");
    }
    if (!target.contains(t)) {
      throw ValidationError("alignment target '" + t +
                            "' is not in the target graph");
    }
    edges.push_back({s, same_as, t});
  }
  std::vector<std::string> concepts = source.concepts();
  concepts.insert(concepts.end(), target.concepts().begin(),
                  target.concepts().end());
  return ConceptGraph::Build(concepts, edges, classes);
}

std::vector<int> BreadthFirstDistances(const ConceptGraph& graph,
                                       std::size_t source) {
  std::vector<int> dist(graph.size(), -1);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    auto i = queue.front();
    queue.pop_front();
    for (auto j : graph.neighbors(i)) {
      if (dist[j] < 0) {
        dist[j] = dist[i] + 1;
        queue.push_back(j);
      }
    }
  }
  return dist;
}

std::vector<double> GeodesicScores(const ConceptGraph& graph,
                                   const std::vector<std::string>& sources,
                                   const std::vector<std::string>& targets,
                                   GeodesicDiagnostics* diagnostics) {
  if (targets.empty()) throw ValidationError("no target concepts");
  GeodesicDiagnostics diag;
  std::vector<std::optional<std::size_t>> target_idx;
  target_idx.reserve(targets.size());
  for (const auto& t : targets) {
    target_idx.push_back(graph.find(t));
    if (!target_idx.back()) ++diag.missing_targets;
  }

  std::vector<double> scores(targets.size(), 0.0);
  if (sources.empty()) {
    if (diagnostics) *diagnostics = diag;
    return scores;
  }
  for (const auto& s : sources) {
    auto si = graph.find(s);
    if (!si) {
      ++diag.missing_sources;
      continue;
    }
    auto dist = BreadthFirstDistances(graph, *si);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (!target_idx[k]) continue;
      int d = dist[*target_idx[k]];
      if (d >= 0) scores[k] += 1.0 / (1.0 + d);
    }
  }
  for (auto& s : scores) s /= static_cast<double>(sources.size());
  if (diagnostics) *diagnostics = diag;
  return scores;
}

}  // namespace tagmap
