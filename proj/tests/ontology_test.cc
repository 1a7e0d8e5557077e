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

#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "tagmap/error.h"
#include "test_util.h"

namespace tagmap {
namespace {

ConceptGraph Parse(const std::string& text,
                   ConceptGraph::BuildStats* stats = nullptr) {
  std::istringstream in(text);
  return ReadGraph(in, DefaultRelationClasses(), stats);
}

ConceptGraph Undirected(std::size_t n,
                        const std::vector<std::pair<int, int>>& pairs) {
  std::vector<std::string> concepts;
  for (std::size_t i = 0; i < n; ++i) concepts.push_back(testing::Name(i));
  std::vector<Edge> edges;
  for (auto [a, b] : pairs) {
    edges.push_back({testing::Name(a), "musicSubgenre", testing::Name(b)});
  }
  return ConceptGraph::Build(concepts, edges, DefaultRelationClasses());
}

TEST_CASE("load_graph parses a sub-genre edge") {
  auto g = Parse("en:hiphop\tmusicSubgenre\ten:rap_west_coast\n");
  CHECK(g.size() == 2);
  CHECK(g.edges().size() == 1);
  CHECK(g.ClassOf(g.edges()[0]) == RelationClass::kRelatedness);
}

TEST_CASE("load_graph on empty input") {
  auto g = Parse("");
  CHECK(g.size() == 0);
  CHECK(g.edges().empty());
}

TEST_CASE("load_graph drops self-loops and duplicates") {
  ConceptGraph::BuildStats stats;
  auto g = Parse("a\tsameAs\ta\n", &stats);
  CHECK(g.size() == 1);
  CHECK(g.edges().empty());
  CHECK(stats.dropped_self_loops == 1);

  g = Parse("# comment\na\tsameAs\tb\n\na\tsameAs\tb\n", &stats);
  CHECK(g.edges().size() == 1);
  CHECK(stats.duplicate_edges == 1);
}

TEST_CASE("load_graph errors") {
  try {
    Parse("a\tsameAs\tb\na\tsameAs\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(Parse("a\tsameAs\t\n"), ParseError);
  CHECK_THROWS_AS(Parse("a\tinfluencedBy\tb\n"), ValidationError);
}

TEST_CASE("relation classes config") {
  std::istringstream in("# classes\nsameAs = equivalence\nrelated=relatedness\n");
  auto classes = ReadRelationClasses(in);
  CHECK(classes.at("sameAs") == RelationClass::kEquivalence);
  CHECK(classes.at("related") == RelationClass::kRelatedness);
  std::istringstream bad("x=similar\n");
  CHECK_THROWS_AS(ReadRelationClasses(bad), ParseError);
  CHECK(DefaultRelationClasses().size() == 6);
}

TEST_CASE("connected_components") {
  SUBCASE("two components") {
    auto g = Undirected(3, {{0, 1}});
    auto c = ConnectedComponents(g);
    CHECK(c.component_count == 2);
    CHECK(c.component_of == std::vector<std::size_t>{0, 0, 1});
  }
  SUBCASE("empty") {
    CHECK(ConnectedComponents(ConceptGraph()).component_count == 0);
  }
  SUBCASE("path") {
    auto g = Undirected(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    CHECK(ConnectedComponents(g).component_count == 1);
  }
}

TEST_CASE("degree counts distinct undirected neighbours") {
  auto star = Undirected(4, {{0, 1}, {0, 2}, {3, 0}});
  CHECK(Degree(star, "c00") == 3);
  auto iso = Undirected(2, {});
  CHECK(Degree(iso, "c00") == 0);
  auto both = Undirected(2, {{0, 1}, {1, 0}});
  CHECK(Degree(both, "c00") == 1);
  CHECK_THROWS_AS(Degree(both, "zz"), LookupError);
}

TEST_CASE("merge_aligned") {
  auto gs = Parse("en:a\tmusicSubgenre\ten:b\n");
  auto gt = Parse("fr:x\tmusicSubgenre\tfr:y\n");
  SUBCASE("empty alignment keeps components apart") {
    auto m = MergeAligned(gs, gt, {});
    CHECK(ConnectedComponents(m).component_count == 2);
  }
  SUBCASE("one alignment joins the components") {
    auto m = MergeAligned(gs, gt, {{"en:a", "fr:y"}});
    CHECK(ConnectedComponents(m).component_count == 1);
    CHECK(m.IsEquivalencePair(m.index("en:a"), m.index("fr:y")));
  }
  SUBCASE("aligned singletons") {
    auto s = ConceptGraph::Build({"en:s"}, {}, DefaultRelationClasses());
    auto t = ConceptGraph::Build({"fr:t"}, {}, DefaultRelationClasses());
    auto m = MergeAligned(s, t, {{"en:s", "fr:t"}});
    CHECK(ConnectedComponents(m).component_count == 1);
  }
  SUBCASE("missing endpoint") {
    CHECK_THROWS_WITH_AS(MergeAligned(gs, gt, {{"en:zz", "fr:x"}}),
                         doctest::Contains("en:zz"), ValidationError);
    CHECK_THROWS_AS(MergeAligned(gs, gt, {{"en:a", "fr:zz"}}), ValidationError);
  }
  SUBCASE("shared identifiers are rejected") {
    CHECK_THROWS_AS(MergeAligned(gs, gs, {}), ValidationError);
  }
}

TEST_CASE("geodesic_scores") {
  auto path = Undirected(3, {{0, 1}, {1, 2}});
  auto s = GeodesicScores(path, {"c00"}, {"c00", "c01", "c02"});
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(0.5));
  CHECK(s[2] == doctest::Approx(1.0 / 3.0));

  auto split = Undirected(3, {{0, 1}});
  GeodesicDiagnostics diag;
  auto t = GeodesicScores(split, {"c00", "nope"}, {"c02", "c00", "gone"}, &diag);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == doctest::Approx(0.5));  // 1 for c00, 0 for the missing source
  CHECK(t[2] == 0.0);
  CHECK(diag.missing_sources == 1);
  CHECK(diag.missing_targets == 1);
  CHECK_THROWS_AS(GeodesicScores(split, {"c00"}, {}), ValidationError);
}

// Floyd-Warshall distances on the undirected view.
std::vector<std::vector<int>> AllPairs(const ConceptGraph& g) {
  const int inf = 1 << 20;
  const auto n = g.size();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [s, t] : g.edge_indices()) d[s][t] = d[t][s] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

TEST_CASE("properties on random small graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = testing::RandomGraphInstance(rng, 20, 1);
    const auto& g = inst.graph;

    auto comps = ConnectedComponents(g);
    std::size_t total = 0;
    for (const auto& m : comps.Members()) total += m.size();
    CHECK(total == g.size());

    auto dist = AllPairs(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::set<std::size_t> brute;
      for (auto [s, t] : g.edge_indices()) {
        if (s == i) brute.insert(t);
        if (t == i) brute.insert(s);
      }
      CHECK(Degree(g, g.concepts()[i]) == brute.size());
      for (std::size_t j = 0; j < g.size(); ++j) {
        bool reachable = dist[i][j] < (1 << 20);
        CHECK(reachable == (comps.component_of[i] == comps.component_of[j]));
      }
    }

    // Adding an edge never lowers a geodesic score.
    std::vector<std::string> sources{g.concepts()[0]};
    if (g.size() > 2) sources.push_back(g.concepts()[2]);
    auto before = GeodesicScores(g, sources, g.concepts());
    for (std::size_t k = 0; k < g.concepts().size(); ++k) {
      const int d = dist[g.index(sources[0])][k];
      if (sources.size() == 1 && d < (1 << 20)) {
        CHECK(before[k] == doctest::Approx(1.0 / (1.0 + d)));
      }
    }
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    auto a = pick(rng), b = pick(rng);
    if (a == b) continue;
    auto edges = g.edges();
    edges.push_back({g.concepts()[a], "musicSubgenre", g.concepts()[b]});
    auto g2 = ConceptGraph::Build(g.concepts(), edges, DefaultRelationClasses());
    auto after = GeodesicScores(g2, sources, g.concepts());
    for (std::size_t k = 0; k < after.size(); ++k) {
      CHECK(after[k] >= before[k] - 1e-15);
    }
  }
}

TEST_CASE("merge_aligned component structure is symmetric") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = testing::RandomGraphInstance(rng, 12, 1).graph;
    auto b = testing::RandomGraphInstance(rng, 12, 1).graph;
    auto prefix = [](const ConceptGraph& g, const std::string& p) {
      std::vector<std::string> cs;
      for (const auto& c : g.concepts()) cs.push_back(p + c);
      std::vector<Edge> es;
      for (const auto& e : g.edges()) {
        es.push_back({p + e.source, e.relation, p + e.target});
      }
      return ConceptGraph::Build(cs, es, DefaultRelationClasses());
    };
    auto gs = prefix(a, "s:");
    auto gt = prefix(b, "t:");
    Alignment align{{"s:c00", "t:c01"}, {"s:c01", "t:c00"}};
    Alignment reversed{{"t:c01", "s:c00"}, {"t:c00", "s:c01"}};
    auto m1 = MergeAligned(gs, gt, align);
    auto m2 = MergeAligned(gt, gs, reversed);
    auto c1 = ConnectedComponents(m1);
    auto c2 = ConnectedComponents(m2);
    REQUIRE(c1.component_count == c2.component_count);
    for (const auto& x : m1.concepts()) {
      for (const auto& y : m1.concepts()) {
        CHECK((c1.component_of[m1.index(x)] == c1.component_of[m1.index(y)]) ==
              (c2.component_of[m2.index(x)] == c2.component_of[m2.index(y)]));
      }
    }
  }
}

}  // namespace
}  // namespace tagmap
