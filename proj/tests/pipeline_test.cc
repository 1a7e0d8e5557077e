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

#include "tagmap/pipeline.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "tagmap/error.h"
#include "tagmap/synth.h"

namespace tagmap {
namespace {

namespace fs = std::filesystem;

fs::path Scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "tagmap_pipeline_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void WriteFile(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("synth is deterministic under a fixed seed") {
  auto a = GenerateSynth({.tags = 20, .items = 40, .seed = 3});
  auto b = GenerateSynth({.tags = 20, .items = 40, .seed = 3});
  auto c = GenerateSynth({.tags = 20, .items = 40, .seed = 4});
  CHECK(a.source_tokens.matrix() == b.source_tokens.matrix());
  CHECK(a.target_tokens.matrix() == b.target_tokens.matrix());
  CHECK(a.source_tags == b.source_tags);
  CHECK(a.source_edges == b.source_edges);
  std::ostringstream ca, cb;
  WriteCorpus(ca, a.corpus);
  WriteCorpus(cb, b.corpus);
  CHECK(ca.str() == cb.str());
  CHECK(a.source_tokens.matrix() != c.source_tokens.matrix());

  CHECK_THROWS_AS(GenerateSynth({.tags = 0}), ValidationError);
  CHECK_THROWS_AS(GenerateSynth({.noise = -1}), ValidationError);
}

TEST_CASE("noise-free synth gives identical cross-lingual tag vectors") {
  auto dir = Scratch("noise0");
  WriteSynthBundle(GenerateSynth({.tags = 15, .items = 30, .noise = 0.0}), dir);
  auto config = LoadConfig(dir / "config.json");
  config.composition.strategy = CompositionStrategy::kAverage;
  auto corpus = LoadConfiguredCorpus(config);
  auto composed = RunCompose(config, corpus);
  auto bundle = GenerateSynth({.tags = 15, .items = 30, .noise = 0.0});
  const auto& l1 = composed.embeddings.at("l1");
  const auto& l2 = composed.embeddings.at("l2");
  for (std::size_t t = 0; t < bundle.source_tags.size(); ++t) {
    auto u = l1.at("l1:" + bundle.source_tags[t]).transpose();
    auto v = l2.at("l2:" + bundle.target_tags[t]).transpose();
    CHECK(Cosine(u, v) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("config parsing and validation") {
  auto dir = Scratch("config");
  WriteSynthBundle(GenerateSynth({.tags = 10, .items = 20}), dir);
  auto base = LoadConfig(dir / "config.json");
  CHECK_NOTHROW(base.Validate());
  CHECK(base.Resolve("corpus.tsv") == dir / "corpus.tsv");

  auto round = PipelineConfig::FromJson(base.ToJson(), dir);
  CHECK(round.ToJson() == base.ToJson());

  auto bad = base;
  bad.target_language = bad.source_language;
  CHECK_THROWS_AS(bad.Validate(), ValidationError);
  bad = base;
  bad.folds = 1;
  CHECK_THROWS_AS(bad.Validate(), ValidationError);
  bad = base;
  bad.scorer = ScorerKind::kTranslation;
  bad.translation_table.reset();
  CHECK_THROWS_AS(bad.Validate(), ValidationError);
  bad = base;
  bad.retrofit = RetrofitMode::kAligned;
  bad.alignment.reset();
  CHECK_THROWS_AS(bad.Validate(), ValidationError);
  bad = base;
  bad.tolerance = 0;
  CHECK_THROWS_AS(bad.Validate(), ValidationError);

  auto j = base.ToJson();
  j["scorer"] = "oracle";
  CHECK_THROWS_AS(PipelineConfig::FromJson(j, dir), ValidationError);
  j = base.ToJson();
  j["eval"]["k"] = "three";
  CHECK_THROWS_AS(PipelineConfig::FromJson(j, dir), ValidationError);
  CHECK_THROWS_AS(ParseRetrofitMode("sideways"), ValidationError);
  CHECK_THROWS_AS(ParseSolver("cg"), ValidationError);
}

TEST_CASE("pipeline equals direct module calls") {
  auto dir = Scratch("direct");
  WriteSynthBundle(GenerateSynth({.tags = 20, .items = 60}), dir);
  auto config = LoadConfig(dir / "config.json");
  config.retrofit = RetrofitMode::kOff;
  auto report = RunPipeline(config);

  auto corpus = LoadCorpus(dir / "corpus.tsv");
  auto classes = DefaultRelationClasses();
  LanguageEmbeddings emb;
  for (const std::string lang : {"l1", "l2"}) {
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& item : corpus.items) {
      auto it = item.tags.find(lang);
      if (it == item.tags.end()) continue;
      for (const auto& t : it->second) {
        if (seen.insert(t).second) labels.push_back(t);
      }
    }
    auto graph = LoadGraph(dir / (lang + ".graph.tsv"), classes);
    for (const auto& c : graph.concepts()) {
      auto label = SplitQualified(c).second;
      if (seen.insert(label).second) labels.push_back(label);
    }
    auto table = LoadTokenTable(dir / (lang + ".vec"));
    auto composed = BuildTagEmbeddings(labels, table,
                                       {.strategy = CompositionStrategy::kSif});
    emb.emplace(lang, composed.ToEmbeddingSet(lang + ":"));
  }
  auto ann = AnnotateCorpus(corpus, EmbeddingScorer{&emb.at("l1"), &emb.at("l2")},
                            "l1", "l2");
  auto direct = CrossValidate(ann.scores, ann.truth, 3, config.seed);
  CHECK(direct.mean_macro_auc == report.mean_macro_auc);
  CHECK(direct.std_macro_auc == report.std_macro_auc);
  CHECK(direct.fold_of == report.fold_of);

  auto out = dir / "out";
  for (const char* f : {"composed.l1.vec", "composed.l2.vec", "scores.tsv",
                        "truth.tsv", "auc.tsv", "folds.tsv", "summary.json",
                        "manifest.json", "compose_report.json"}) {
    CHECK(fs::exists(out / f));
  }
  auto written = ReadAnnotation(config);
  CHECK(written.scores.values == ann.scores.values);

  // Equal manifests give identical reports.
  auto first = ReadFile(out / "summary.json");
  RunPipeline(config);
  CHECK(ReadFile(out / "summary.json") == first);
  auto manifest = RunManifest::FromJson(ReadJson(out / "manifest.json"));
  CHECK(manifest.input_digests.at("corpus") == FileDigest(dir / "corpus.tsv"));
}

TEST_CASE("aligned toy matches the direct solve") {
  auto dir = Scratch("aligned");
  WriteFile(dir / "en.emb", "2 2\nen:a 1 0\nen:b 0.5 2\n");
  WriteFile(dir / "en.graph.tsv", "en:a\tmusicSubgenre\ten:b\n");
  WriteFile(dir / "fr.graph.tsv", "fr:x\tstylisticOrigin\tfr:y\n");
  WriteFile(dir / "alignment.tsv", "en:a\tfr:x\n");
  WriteFile(dir / "corpus.tsv", "i1\ten\ta|b\ni1\tfr\tx|y\ni2\ten\ta\ni2\tfr\tx\n");
  nlohmann::json j = {
      {"languages",
       {{"en", {{"embeddings", "en.emb"}, {"graph", "en.graph.tsv"}}},
        {"fr", {{"graph", "fr.graph.tsv"}}}}},
      {"alignment", "alignment.tsv"},
      {"corpus", "corpus.tsv"},
      {"source_language", "en"},
      {"target_language", "fr"},
      {"retrofit", {{"mode", "aligned"}, {"known_languages", {"en"}}, {"tol", 1e-12}, {"max_iter", 100000}}},
      {"eval", {{"k", 2}}},
  };
  WriteJson(dir / "config.json", j);
  auto config = LoadConfig(dir / "config.json");
  config.Validate();
  auto corpus = LoadConfiguredCorpus(config);
  auto composed = RunCompose(config, corpus);
  auto out = RunRetrofit(config, composed.embeddings);

  auto graph = ConceptGraph::Build(
      {"en:a", "en:b", "fr:x", "fr:y"},
      {{"en:a", "musicSubgenre", "en:b"},
       {"fr:x", "stylisticOrigin", "fr:y"},
       {"en:a", "sameAs", "fr:x"}},
      DefaultRelationClasses());
  EmbeddingSet initial(2);
  initial.Add("en:a", Eigen::Vector2d(1, 0));
  initial.Add("en:b", Eigen::Vector2d(0.5, 2));
  auto oracle = DirectSolve(graph, initial, {"en:a", "en:b"});
  for (const char* key : {"fr:x", "fr:y"}) {
    CHECK((out.embeddings.at("fr").at(key) - oracle.at(key)).lpNorm<Eigen::Infinity>() < 1e-6);
  }
  for (const char* key : {"en:a", "en:b"}) {
    CHECK((out.embeddings.at("en").at(key) - oracle.at(key)).lpNorm<Eigen::Infinity>() < 1e-6);
  }
  CHECK(out.reports.at("aligned").converged);

  auto direct_cfg = config;
  direct_cfg.solver = SolverKind::kDirect;
  auto d = RunRetrofit(direct_cfg, composed.embeddings);
  CHECK((d.embeddings.at("fr").at("fr:y") - oracle.at("fr:y")).norm() < 1e-12);
}

TEST_CASE("baseline scorers on synthetic data") {
  auto dir = Scratch("baselines");
  WriteSynthBundle(GenerateSynth({.tags = 30, .items = 90}), dir);
  auto config = LoadConfig(dir / "config.json");
  config.scorer = ScorerKind::kTranslation;
  config.retrofit = RetrofitMode::kOff;
  CHECK(RunPipeline(config).mean_macro_auc == 1.0);

  config.scorer = ScorerKind::kGeodesic;
  config.output_dir = "geo";
  CHECK(RunPipeline(config).mean_macro_auc > 0.9);
}

TEST_CASE("evaluate on hand-made toys") {
  auto dir = Scratch("toys");
  WriteFile(dir / "corpus.tsv",
            "i1\ten\ta\ni1\tfr\tA\ni2\ten\tb\ni2\tfr\tB\n"
            "i3\ten\tc\ni3\tfr\tC\ni4\ten\ta\ni4\tfr\tA\n"
            "i5\ten\tb\ni5\tfr\tB\ni6\ten\tc\ni6\tfr\tC\n");
  WriteFile(dir / "table.tsv", "a\tA\nb\tB\nc\tC\n");
  WriteFile(dir / "en.emb", "3 3\nen:a 1 0 0\nen:b 0 1 0\nen:c 0 0 1\n");
  WriteFile(dir / "fr.emb", "3 3\nfr:A 1 0 0\nfr:B 0 1 0\nfr:C 0 0 1\n");
  nlohmann::json j = {
      {"languages", {{"en", {{"embeddings", "en.emb"}}}, {"fr", {{"embeddings", "fr.emb"}}}}},
      {"corpus", "corpus.tsv"},
      {"translation_table", "table.tsv"},
      {"source_language", "en"},
      {"target_language", "fr"},
      {"scorer", "translation"},
      {"eval", {{"k", 2}}},
  };
  WriteJson(dir / "config.json", j);
  auto config = LoadConfig(dir / "config.json");
  CHECK(RunPipeline(config).mean_macro_auc == 1.0);
  config.scorer = ScorerKind::kEmbedding;
  CHECK(RunPipeline(config).mean_macro_auc == 1.0);

  // Path en:s - fr:near - fr:far: the 1-hop target outranks the 2-hop one.
  auto g = ConceptGraph::Build({"en:s", "fr:near", "fr:far"},
                               {{"en:s", "sameAs", "fr:near"},
                                {"fr:near", "musicSubgenre", "fr:far"}},
                               DefaultRelationClasses());
  AnnotationCorpus corpus;
  corpus.items.push_back({"x", {{"en", {"s"}}, {"fr", {"near"}}}});
  corpus.items.push_back({"y", {{"en", {"s"}}, {"fr", {"far"}}}});
  auto ann = AnnotateCorpus(corpus, GeodesicScorer{&g}, "en", "fr");
  REQUIRE(ann.scores.tags == std::vector<std::string>{"far", "near"});
  CHECK(ann.scores.values(0, 1) == doctest::Approx(0.5));
  CHECK(ann.scores.values(0, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("monolingual retrofitting on synthetic data") {
  auto dir = Scratch("mono");
  WriteSynthBundle(GenerateSynth({.tags = 30, .items = 90}), dir);
  auto config = LoadConfig(dir / "config.json");
  auto corpus = LoadConfiguredCorpus(config);
  auto composed = RunCompose(config, corpus);
  auto out = RunRetrofit(config, composed.embeddings);
  REQUIRE(out.reports.size() == 2);
  for (const auto& [lang, r] : out.reports) {
    CHECK(r.converged);
    CHECK(r.objective_final <= r.objective_initial);
  }
  // Same concept set before and after.
  for (const auto& [lang, set] : composed.embeddings) {
    std::set<std::string> before(set.keys().begin(), set.keys().end());
    const auto& after = out.embeddings.at(lang).keys();
    CHECK(std::set<std::string>(after.begin(), after.end()) == before);
  }
}

}  // namespace
}  // namespace tagmap
