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

#include <fstream>
#include <set>

#include "tagmap/error.h"

namespace tagmap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<fs::path> OptionalPath(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return fs::path(j.at(key).get<std::string>());
}

json PathOrNull(const std::optional<fs::path>& p) {
  return p ? json(p->generic_string()) : json(nullptr);
}

template <typename T>
T Get(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

std::string_view ScorerName(ScorerKind s) {
  switch (s) {
    case ScorerKind::kEmbedding: return "embedding";
    case ScorerKind::kTranslation: return "translation";
    case ScorerKind::kGeodesic: return "geodesic";
  }
  return "";
}

std::string_view RetrofitName(RetrofitMode m) {
  switch (m) {
    case RetrofitMode::kOff: return "off";
    case RetrofitMode::kMonolingual: return "monolingual";
    case RetrofitMode::kAligned: return "aligned";
  }
  return "";
}

}  // namespace

ScorerKind ParseScorer(std::string_view name) {
  if (name == "embedding") return ScorerKind::kEmbedding;
  if (name == "translation") return ScorerKind::kTranslation;
  if (name == "geodesic") return ScorerKind::kGeodesic;
  throw ValidationError("unknown scorer '" + std::string(name) +
                        "' (expected embedding, translation or geodesic)");
}

RetrofitMode ParseRetrofitMode(std::string_view name) {
  if (name == "off") return RetrofitMode::kOff;
  if (name == "monolingual") return RetrofitMode::kMonolingual;
  if (name == "aligned") return RetrofitMode::kAligned;
  throw ValidationError("unknown retrofit mode '" + std::string(name) +
                        "' (expected off, monolingual or aligned)");
}

SolverKind ParseSolver(std::string_view name) {
  if (name == "jacobi") return SolverKind::kJacobi;
  if (name == "direct") return SolverKind::kDirect;
  throw ValidationError("unknown solver '" + std::string(name) +
                        "' (expected jacobi or direct)");
}

fs::path PipelineConfig::Resolve(const fs::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

void PipelineConfig::Validate() const {
  if (source_language.empty() || target_language.empty()) {
    throw ValidationError("source_language and target_language are required");
  }
  if (source_language == target_language) {
    throw ValidationError("source and target languages must differ");
  }
  if (corpus.empty()) throw ValidationError("corpus path is required");
  if (!(tolerance > 0)) throw ValidationError("tol must be positive");
  if (max_iterations < 1) throw ValidationError("max_iter must be >= 1");
  if (folds < 2) throw ValidationError("eval.k must be >= 2");
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
  if (composition.strategy == CompositionStrategy::kSif &&
      !(composition.a > 0)) {
    throw ValidationError("composition.a must be positive");
  }
  auto has_vectors = [&](const std::string& lang) {
    auto it = languages.find(lang);
    return it != languages.end() &&
           (it->second.tokens || it->second.embeddings);
  };
  auto has_graph = [&](const std::string& lang) {
    auto it = languages.find(lang);
    return it != languages.end() && it->second.graph.has_value();
  };
  switch (scorer) {
    case ScorerKind::kTranslation:
      if (!translation_table) {
        throw ValidationError("the translation scorer requires translation_table");
      }
      break;
    case ScorerKind::kGeodesic:
      if (!has_graph(source_language) || !has_graph(target_language)) {
        throw ValidationError("the geodesic scorer requires graphs for both languages");
      }
      if (!alignment) {
        throw ValidationError("the geodesic scorer requires an alignment file");
      }
      break;
    case ScorerKind::kEmbedding:
      for (const auto& lang : {source_language, target_language}) {
        // Aligned retrofitting learns vectors for graph-only languages.
        bool learned = retrofit == RetrofitMode::kAligned && has_graph(lang);
        if (!has_vectors(lang) && !learned) {
          throw ValidationError("language '" + lang +
                                "' needs tokens or embeddings for the "
                                "embedding scorer");
        }
      }
      break;
  }
  if (retrofit == RetrofitMode::kAligned) {
    if (!alignment) {
      throw ValidationError("aligned retrofitting requires an alignment file");
    }
    if (known_languages.empty()) {
      throw ValidationError("aligned retrofitting requires known_languages");
    }
    for (const auto& lang : known_languages) {
      if (!has_vectors(lang)) {
        throw ValidationError("known language '" + lang +
                              "' has no tokens or embeddings");
      }
    }
  }
  if (retrofit != RetrofitMode::kOff && scorer == ScorerKind::kEmbedding) {
    bool any_graph = false;
    for (const auto& [lang, in] : languages) any_graph = any_graph || in.graph;
    if (!any_graph) throw ValidationError("retrofitting requires a graph");
  }
}

json PipelineConfig::ToJson() const {
  json langs = json::object();
  for (const auto& [lang, in] : languages) {
    langs[lang] = {{"tokens", PathOrNull(in.tokens)},
                   {"graph", PathOrNull(in.graph)},
                   {"embeddings", PathOrNull(in.embeddings)}};
  }
  return {
      {"languages", langs},
      {"relation_classes", PathOrNull(relation_classes)},
      {"alignment", PathOrNull(alignment)},
      {"corpus", corpus.generic_string()},
      {"min_frequency", min_frequency},
      {"translation_table", PathOrNull(translation_table)},
      {"source_language", source_language},
      {"target_language", target_language},
      {"composition",
       {{"strategy", StrategyName(composition.strategy)},
        {"a", composition.a},
        {"pc_fit", pc_fit == PcFit::kJoint ? "joint" : "per_language"}}},
      {"scorer", ScorerName(scorer)},
      {"retrofit",
       {{"mode", RetrofitName(retrofit)},
        {"known_languages", known_languages},
        {"solver", solver == SolverKind::kDirect ? "direct" : "jacobi"},
        {"tol", tolerance},
        {"max_iter", max_iterations},
        {"degree", degree == DegreeMode::kRelatednessOnly ? "relatedness"
                                                          : "all"}}},
      {"eval", {{"k", folds}, {"seed", seed}}},
      {"output_dir", output_dir.generic_string()},
      {"jobs", jobs},
  };
}

PipelineConfig PipelineConfig::FromJson(const json& j,
                                        const fs::path& base_dir) {
  PipelineConfig c;
  c.base_dir = base_dir;
  try {
    if (j.contains("languages")) {
      for (const auto& [lang, in] : j.at("languages").items()) {
        c.languages[lang] = {OptionalPath(in, "tokens"),
                             OptionalPath(in, "graph"),
                             OptionalPath(in, "embeddings")};
      }
    }
    c.relation_classes = OptionalPath(j, "relation_classes");
    c.alignment = OptionalPath(j, "alignment");
    c.corpus = Get<std::string>(j, "corpus", "");
    c.min_frequency = Get<std::size_t>(j, "min_frequency", 0);
    c.translation_table = OptionalPath(j, "translation_table");
    c.source_language = Get<std::string>(j, "source_language", "");
    c.target_language = Get<std::string>(j, "target_language", "");
    if (j.contains("composition")) {
      const auto& comp = j.at("composition");
      c.composition.strategy =
          ParseStrategy(Get<std::string>(comp, "strategy", "sif"));
      c.composition.a = Get<double>(comp, "a", kDefaultSifA);
      auto fit = Get<std::string>(comp, "pc_fit", "per_language");
      if (fit == "joint") {
        c.pc_fit = PcFit::kJoint;
      } else if (fit != "per_language") {
        throw ValidationError("composition.pc_fit must be per_language or joint");
      }
    }
    c.scorer = ParseScorer(Get<std::string>(j, "scorer", "embedding"));
    if (j.contains("retrofit")) {
      const auto& r = j.at("retrofit");
      c.retrofit = ParseRetrofitMode(Get<std::string>(r, "mode", "off"));
      c.known_languages =
          Get<std::set<std::string>>(r, "known_languages", {});
      c.solver = ParseSolver(Get<std::string>(r, "solver", "jacobi"));
      c.tolerance = Get<double>(r, "tol", 1e-6);
      c.max_iterations = Get<int>(r, "max_iter", 1000);
      c.degree = ParseDegreeMode(Get<std::string>(r, "degree", "all"));
    }
    if (j.contains("eval")) {
      c.folds = Get<std::size_t>(j.at("eval"), "k", 3);
      c.seed = Get<std::uint64_t>(j.at("eval"), "seed", 0);
    }
    c.output_dir = Get<std::string>(j, "output_dir", "out");
    c.jobs = Get<int>(j, "jobs", 1);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig LoadConfig(const fs::path& path) {
  auto j = ReadJson(path);
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return PipelineConfig::FromJson(j, base);
}

AnnotationCorpus LoadConfiguredCorpus(const PipelineConfig& config) {
  return LoadCorpus(config.Resolve(config.corpus),
                    {.min_frequency = config.min_frequency});
}

namespace {

RelationClasses ConfiguredClasses(const PipelineConfig& config) {
  return config.relation_classes
             ? LoadRelationClasses(config.Resolve(*config.relation_classes))
             : DefaultRelationClasses();
}

ConceptGraph LanguageGraph(const PipelineConfig& config,
                           const std::string& lang) {
  const auto& in = config.languages.at(lang);
  return LoadGraph(config.Resolve(*in.graph), ConfiguredClasses(config));
}

}  // namespace

std::map<std::string, std::vector<std::string>> ConceptLabels(
    const PipelineConfig& config, const AnnotationCorpus& corpus) {
  std::map<std::string, std::vector<std::string>> labels;
  std::map<std::string, std::set<std::string>> seen;
  auto add = [&](const std::string& lang, const std::string& label) {
    if (seen[lang].insert(label).second) labels[lang].push_back(label);
  };
  for (const auto& item : corpus.items) {
    for (const auto& [lang, tags] : item.tags) {
      if (config.languages.count(lang) == 0) continue;
      for (const auto& t : tags) add(lang, t);
    }
  }
  for (const auto& [lang, in] : config.languages) {
    if (!in.graph) continue;
    auto graph = LanguageGraph(config, lang);
    for (const auto& c : graph.concepts()) {
      auto [l, label] = SplitQualified(c);
      if (l == lang) add(lang, label);
    }
  }
  return labels;
}

ComposeOutcome RunCompose(const PipelineConfig& config,
                          const AnnotationCorpus& corpus) {
  ComposeOutcome out;
  out.diagnostics = json::object();
  auto labels = ConceptLabels(config, corpus);

  std::map<std::string, ComposedEmbeddings> composed;
  for (const auto& [lang, in] : config.languages) {
    const auto& tags = labels[lang];
    std::string prefix = lang + ":";
    if (in.embeddings) {
      auto given = LoadEmbeddings(config.Resolve(*in.embeddings));
      EmbeddingSet set(given.dim());
      std::size_t missing = 0;
      for (const auto& t : tags) {
        auto key = prefix + t;
        auto idx = given.find(key);
        if (idx && given.known(*idx)) {
          set.Add(key, given.row(*idx));
        } else {
          ++missing;
          set.AddUnknown(key);
        }
      }
      out.diagnostics[lang] = {{"source", "embeddings"},
                               {"tags", tags.size()},
                               {"missing", missing}};
      out.embeddings.emplace(lang, std::move(set));
      continue;
    }
    if (!in.tokens) continue;
    auto table = LoadTokenTable(config.Resolve(*in.tokens));
    auto c = config.pc_fit == PcFit::kJoint
                 ? ComposeTags(tags, table, config.composition)
                 : BuildTagEmbeddings(tags, table, config.composition);
    composed.emplace(lang, std::move(c));
  }

  if (config.pc_fit == PcFit::kJoint &&
      config.composition.strategy == CompositionStrategy::kSif &&
      !composed.empty()) {
    Eigen::Index rows = 0;
    const auto dim = composed.begin()->second.weighted.cols();
    for (const auto& [lang, c] : composed) {
      if (c.weighted.cols() != dim) {
        throw ValidationError("joint PC fit needs equal token dimensions");
      }
      rows += c.weighted.rows();
    }
    RowMatrix stacked(rows, dim);
    Eigen::Index at = 0;
    for (const auto& [lang, c] : composed) {
      stacked.middleRows(at, c.weighted.rows()) = c.weighted;
      at += c.weighted.rows();
    }
    auto direction = FirstSingularDirection(stacked);
    for (auto& [lang, c] : composed) {
      c.direction = direction;
      c.vectors = ProjectOff(c.weighted, direction.u);
    }
  }

  for (const auto& [lang, c] : composed) {
    out.diagnostics[lang] = {
        {"source", "tokens"},
        {"strategy", StrategyName(config.composition.strategy)},
        {"tags", c.tags.size()},
        {"empty_tags", c.empty_tags},
        {"oov_tags", c.oov_tags},
        {"pc_iterations", c.direction.iterations},
        {"pc_converged", c.direction.converged}};
    out.embeddings.emplace(lang, c.ToEmbeddingSet(lang + ":"));
  }
  return out;
}

ConceptGraph MergedGraph(const PipelineConfig& config,
                         const std::vector<std::string>& langs) {
  Alignment pending;
  if (config.alignment) pending = LoadAlignment(config.Resolve(*config.alignment));
  std::optional<ConceptGraph> merged;
  for (const auto& lang : langs) {
    auto it = config.languages.find(lang);
    if (it == config.languages.end() || !it->second.graph) continue;
    auto g = LanguageGraph(config, lang);
    // Aligned concepts without ontology edges join as isolated nodes.
    std::vector<std::string> concepts = g.concepts();
    std::set<std::string> have(concepts.begin(), concepts.end());
    for (const auto& [a, b] : pending) {
      for (const auto* c : {&a, &b}) {
        if (SplitQualified(*c).first == lang && have.insert(*c).second) {
          concepts.push_back(*c);
        }
      }
    }
    if (concepts.size() != g.size()) {
      g = ConceptGraph::Build(concepts, g.edges(), g.relation_classes());
    }
    if (!merged) {
      merged = std::move(g);
      continue;
    }
    Alignment now;
    Alignment later;
    for (const auto& [a, b] : pending) {
      if (merged->contains(a) && g.contains(b)) {
        now.emplace_back(a, b);
      } else if (merged->contains(b) && g.contains(a)) {
        now.emplace_back(b, a);
      } else {
        later.emplace_back(a, b);
      }
    }
    merged = MergeAligned(*merged, g, now);
    pending = std::move(later);
  }
  if (!merged) throw ValidationError("no graph configured for the languages");
  std::set<std::string> wanted(langs.begin(), langs.end());
  for (const auto& [a, b] : pending) {
    // Pairs between languages outside this merge are irrelevant here.
    if (wanted.count(SplitQualified(a).first) &&
        wanted.count(SplitQualified(b).first)) {
      throw ValidationError("alignment pair '" + a + "' - '" + b +
                            "' references a concept absent from the graphs");
    }
  }
  return *merged;
}

namespace {

RetrofitResult Solve(const PipelineConfig& config,
                     const RetrofitProblem& problem) {
  SolverOptions options;
  options.tolerance = config.tolerance;
  options.max_iterations = config.max_iterations;
  options.degree = config.degree;
  options.jobs = config.jobs;
  if (config.solver == SolverKind::kJacobi) {
    return JacobiRetrofit(problem, options);
  }
  RetrofitResult r;
  r.embeddings = DirectSolve(problem);
  r.report.objective_initial =
      ObjectiveValue(problem.initial, problem.initial, problem.weights);
  r.report.objective_final =
      ObjectiveValue(r.embeddings.matrix(), problem.initial, problem.weights);
  r.report.converged = true;
  r.report.components = ConnectedComponents(problem.graph).component_count;
  return r;
}

// Entries whose key starts with `<lang>:`.
EmbeddingSet Restrict(const EmbeddingSet& all, const std::string& lang) {
  EmbeddingSet out(all.dim());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (SplitQualified(all.key(i)).first == lang) {
      out.Add(all.key(i), all.row(i), all.known(i));
    }
  }
  return out;
}

}  // namespace

RetrofitOutcome RunRetrofit(const PipelineConfig& config,
                            const LanguageEmbeddings& composed) {
  RetrofitOutcome out;
  if (config.retrofit == RetrofitMode::kOff) {
    out.embeddings = composed;
    return out;
  }
  if (config.retrofit == RetrofitMode::kMonolingual) {
    for (const auto& [lang, initial] : composed) {
      const auto& in = config.languages.at(lang);
      if (!in.graph) {
        out.embeddings.emplace(lang, initial);
        continue;
      }
      auto problem = MakeProblem(LanguageGraph(config, lang), initial,
                                 KnownConcepts(initial), config.degree);
      auto result = Solve(config, problem);
      out.embeddings.emplace(lang, Restrict(result.embeddings, lang));
      out.reports.emplace(lang, result.report);
    }
    return out;
  }

  std::vector<std::string> langs;
  for (const auto& [lang, in] : config.languages) {
    if (in.graph) langs.push_back(lang);
  }
  auto graph = MergedGraph(config, langs);
  std::size_t dim = 0;
  for (const auto& lang : config.known_languages) {
    dim = composed.at(lang).dim();
  }
  EmbeddingSet initial(dim);
  ConceptSet known;
  for (const auto& [lang, set] : composed) {
    bool is_known = config.known_languages.count(lang) != 0;
    if (is_known && set.dim() != dim) {
      throw ValidationError("known languages differ in embedding dimension");
    }
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (is_known && set.known(i)) {
        initial.Add(set.key(i), set.row(i));
        known.insert(set.key(i));
      } else {
        initial.AddUnknown(set.key(i));
      }
    }
  }
  auto problem = MakeProblem(graph, initial, known, config.degree);
  auto result = Solve(config, problem);
  out.reports.emplace("aligned", result.report);
  std::set<std::string> all_langs;
  for (const auto& [lang, set] : composed) all_langs.insert(lang);
  for (const auto& lang : langs) all_langs.insert(lang);
  for (const auto& lang : all_langs) {
    out.embeddings.emplace(lang, Restrict(result.embeddings, lang));
  }
  return out;
}

Annotation RunAnnotate(const PipelineConfig& config,
                       const AnnotationCorpus& corpus,
                       const LanguageEmbeddings& embeddings) {
  const auto& src = config.source_language;
  const auto& tgt = config.target_language;
  switch (config.scorer) {
    case ScorerKind::kEmbedding: {
      for (const auto& lang : {src, tgt}) {
        if (embeddings.count(lang) == 0) {
          throw ValidationError("no embeddings for language '" + lang + "'");
        }
      }
      EmbeddingScorer s{&embeddings.at(src), &embeddings.at(tgt)};
      return AnnotateCorpus(corpus, s, src, tgt);
    }
    case ScorerKind::kTranslation: {
      auto table = LoadTranslationTable(config.Resolve(*config.translation_table));
      return AnnotateCorpus(corpus, TranslationScorer{&table}, src, tgt);
    }
    case ScorerKind::kGeodesic: {
      auto graph = MergedGraph(config, {src, tgt});
      return AnnotateCorpus(corpus, GeodesicScorer{&graph}, src, tgt);
    }
  }
  throw ValidationError("unhandled scorer");
}

CrossValidationReport RunEvaluate(const PipelineConfig& config,
                                  const Annotation& annotation) {
  return CrossValidate(annotation.scores, annotation.truth, config.folds,
                       config.seed);
}

RunManifest BuildManifest(const PipelineConfig& config) {
  RunManifest m;
  auto add = [&](const std::string& label, const std::optional<fs::path>& p) {
    if (p && fs::exists(config.Resolve(*p))) {
      m.input_digests[label] = FileDigest(config.Resolve(*p));
    }
  };
  add("corpus", config.corpus);
  add("relation_classes", config.relation_classes);
  add("alignment", config.alignment);
  add("translation_table", config.translation_table);
  for (const auto& [lang, in] : config.languages) {
    add(lang + ".tokens", in.tokens);
    add(lang + ".graph", in.graph);
    add(lang + ".embeddings", in.embeddings);
  }
  m.parameters = config.ToJson();
  return m;
}

fs::path ComposedPath(const PipelineConfig& c, const std::string& lang) {
  return c.Resolve(c.output_dir) / ("composed." + lang + ".vec");
}

fs::path RetrofitPath(const PipelineConfig& c, const std::string& lang) {
  return c.Resolve(c.output_dir) / ("retrofit." + lang + ".vec");
}

json ReportJson(const SolverReport& r) {
  return {{"iterations", r.iterations},
          {"max_delta", r.max_delta},
          {"objective_initial", r.objective_initial},
          {"objective_final", r.objective_final},
          {"converged", r.converged},
          {"components", r.components}};
}

namespace {

fs::path OutputDir(const PipelineConfig& config) {
  auto dir = config.Resolve(config.output_dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

void WriteComposeOutputs(const PipelineConfig& config,
                         const ComposeOutcome& outcome) {
  auto dir = OutputDir(config);
  for (const auto& [lang, set] : outcome.embeddings) {
    SaveEmbeddings(ComposedPath(config, lang), set);
  }
  WriteJson(dir / "compose_report.json", outcome.diagnostics);
  WriteJson(dir / "manifest.json", BuildManifest(config).ToJson());
}

void WriteRetrofitOutputs(const PipelineConfig& config,
                          const RetrofitOutcome& outcome) {
  auto dir = OutputDir(config);
  for (const auto& [lang, set] : outcome.embeddings) {
    SaveEmbeddings(RetrofitPath(config, lang), set);
  }
  json reports = json::object();
  for (const auto& [name, r] : outcome.reports) reports[name] = ReportJson(r);
  WriteJson(dir / "retrofit_report.json", reports);
  WriteJson(dir / "manifest.json", BuildManifest(config).ToJson());
}

void WriteAnnotation(const PipelineConfig& config, const Annotation& a) {
  auto dir = OutputDir(config);
  SaveScoreMatrix(dir / "scores.tsv", a.scores);
  SaveScoreMatrix(dir / "truth.tsv", a.truth);
  WriteJson(dir / "annotate_report.json",
            {{"items", a.scores.items.size()},
             {"tags", a.scores.tags.size()},
             {"skipped_items", a.skipped_items},
             {"untranslated_tags", a.untranslated_tags},
             {"missing_concepts", a.missing_concepts}});
}

Annotation ReadAnnotation(const PipelineConfig& config) {
  auto dir = config.Resolve(config.output_dir);
  Annotation a;
  a.scores = LoadScoreMatrix(dir / "scores.tsv");
  a.truth = LoadScoreMatrix(dir / "truth.tsv");
  if (a.scores.items != a.truth.items || a.scores.tags != a.truth.tags) {
    throw ValidationError("scores.tsv and truth.tsv do not line up");
  }
  return a;
}

void WriteEvaluation(const PipelineConfig& config,
                     const CrossValidationReport& report,
                     const Annotation& annotation) {
  auto dir = OutputDir(config);
  {
    std::ofstream out(dir / "auc.tsv");
    WritePerTagTsv(out, annotation.truth.tags, report.mean_per_tag_auc);
  }
  {
    std::ofstream out(dir / "folds.tsv");
    WriteFolds(out, annotation.truth.items, report.fold_of);
  }
  auto summary = SummaryJson(report);
  summary["pair"] = config.source_language + "-" + config.target_language;
  summary["config"] = config.ToJson();
  WriteJson(dir / "summary.json", summary);
  WriteJson(dir / "manifest.json", BuildManifest(config).ToJson());
}

CrossValidationReport RunPipeline(const PipelineConfig& config) {
  config.Validate();
  auto corpus = LoadConfiguredCorpus(config);
  LanguageEmbeddings embeddings;
  if (config.scorer == ScorerKind::kEmbedding) {
    auto composed = RunCompose(config, corpus);
    WriteComposeOutputs(config, composed);
    auto retrofitted = RunRetrofit(config, composed.embeddings);
    if (config.retrofit != RetrofitMode::kOff) {
      WriteRetrofitOutputs(config, retrofitted);
    }
    embeddings = std::move(retrofitted.embeddings);
  }
  auto annotation = RunAnnotate(config, corpus, embeddings);
  WriteAnnotation(config, annotation);
  auto report = RunEvaluate(config, annotation);
  WriteEvaluation(config, report, annotation);
  return report;
}

}  // namespace tagmap
