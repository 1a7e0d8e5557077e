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

#ifndef TAGMAP_ONTOLOGY_H_
#define TAGMAP_ONTOLOGY_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tagmap {

// Concept identifiers are language-qualified: "<lang>:<label>".
std::string QualifiedName(std::string_view language, std::string_view label);
// Splits at the first ':'. Unqualified names yield an empty language.
std::pair<std::string, std::string> SplitQualified(std::string_view name);

enum class RelationClass { kEquivalence, kRelatedness };

using RelationClasses = std::map<std::string, RelationClass>;

// wikiPageRedirects and sameAs are equivalence; stylisticOrigin,
// musicSubgenre, derivative and musicFusionGenre are relatedness.
RelationClasses DefaultRelationClasses();

// Key/value text, one `relation=equivalence|relatedness` per line; blank
// lines and `#` comments ignored.
RelationClasses ReadRelationClasses(std::istream& in);
RelationClasses LoadRelationClasses(const std::filesystem::path& path);

inline constexpr std::string_view kAlignmentRelation = "sameAs";

struct Edge {
  std::string source;
  std::string relation;
  std::string target;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Directed typed graph over concept identifiers. Immutable once built.
// Concepts are indexed in order of first appearance.
class ConceptGraph {
 public:
  struct BuildStats {
    std::size_t duplicate_edges = 0;
    std::size_t dropped_self_loops = 0;
  };

  ConceptGraph() = default;

  // Validates and indexes. Endpoints of `edges` are added to the concept
  // set after `concepts`. Duplicate edges are collapsed and self-loops
  // dropped; both are counted in `stats`. Throws ValidationError for a
  // relation missing from `classes` or an empty identifier.
  static ConceptGraph Build(const std::vector<std::string>& concepts,
                            const std::vector<Edge>& edges,
                            const RelationClasses& classes,
                            BuildStats* stats = nullptr);

  std::size_t size() const { return concepts_.size(); }
  const std::vector<std::string>& concepts() const { return concepts_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const RelationClasses& relation_classes() const { return classes_; }

  std::optional<std::size_t> find(std::string_view name) const;
  bool contains(std::string_view name) const {
    return find(name).has_value();
  }
  // Throws LookupError.
  std::size_t index(std::string_view name) const;

  RelationClass ClassOf(const Edge& edge) const;

  // Distinct neighbours in the undirected view, ascending by index.
  const std::vector<std::size_t>& neighbors(std::size_t i) const {
    return adjacency_[i];
  }
  // True when some equivalence edge joins i and j in either direction.
  bool IsEquivalencePair(std::size_t i, std::size_t j) const;

  // Edge endpoints as indices, parallel to edges().
  const std::vector<std::pair<std::size_t, std::size_t>>& edge_indices()
      const {
    return edge_indices_;
  }

 private:
  std::vector<std::string> concepts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::pair<std::size_t, std::size_t>> edge_indices_;
  RelationClasses classes_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::vector<std::size_t>> equivalent_;
};

// Reads `source<TAB>relation<TAB>target` records. `#` lines and blank
// lines are skipped. Throws ParseError with the line number for malformed
// records and ValidationError for an unclassified relation.
ConceptGraph ReadGraph(std::istream& in, const RelationClasses& classes,
                       ConceptGraph::BuildStats* stats = nullptr);
ConceptGraph LoadGraph(const std::filesystem::path& path,
                       const RelationClasses& classes,
                       ConceptGraph::BuildStats* stats = nullptr);
void WriteGraph(std::ostream& out, const ConceptGraph& graph);

using Alignment = std::vector<std::pair<std::string, std::string>>;

// `source<TAB>target` records.
Alignment ReadAlignment(std::istream& in);
Alignment LoadAlignment(const std::filesystem::path& path);

struct ComponentIndex {
  std::vector<std::size_t> component_of;  // by concept index
  std::size_t component_count = 0;

  // Concept indices grouped by component id.
  std::vector<std::vector<std::size_t>> Members() const;
};

// Undirected reachability. Ids are assigned in order of the smallest
// concept index they contain.
ComponentIndex ConnectedComponents(const ConceptGraph& graph);

// Throws LookupError for an unknown concept.
std::size_t Degree(const ConceptGraph& graph, std::string_view name);

// Union of both graphs plus one `sameAs` equivalence edge per alignment
// pair. Throws ValidationError naming the concept when an endpoint is
// absent, or when the two graphs share a concept identifier.
ConceptGraph MergeAligned(const ConceptGraph& source,
                          const ConceptGraph& target,
                          const Alignment& alignment);

struct GeodesicDiagnostics {
  std::size_t missing_sources = 0;
  std::size_t missing_targets = 0;
};

// For each target t: mean over sources s of 1/(1+d(s,t)), d being the
// undirected hop distance; unreachable or absent pairs contribute 0.
std::vector<double> GeodesicScores(const ConceptGraph& graph,
                                   const std::vector<std::string>& sources,
                                   const std::vector<std::string>& targets,
                                   GeodesicDiagnostics* diagnostics = nullptr);

// Hop distances from `source` to every concept; -1 when unreachable.
std::vector<int> BreadthFirstDistances(const ConceptGraph& graph,
                                       std::size_t source);

}  // namespace tagmap

#endif  // TAGMAP_ONTOLOGY_H_
