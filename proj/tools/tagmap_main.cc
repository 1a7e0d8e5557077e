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

// Command-line front end: compose, retrofit, annotate, evaluate, synth and
// pipeline subcommands over one JSON config.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tagmap/error.h"
#include "tagmap/pipeline.h"
#include "tagmap/synth.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tagmap;

enum ExitCode { kOk = 0, kFailure = 1, kInvalid = 2, kInfeasible = 3, kUnparsable = 4 };

// Flags that override config keys. Unset flags leave the config alone.
struct Overrides {
  std::string config;
  std::optional<std::string> source, target, strategy, pc_fit, scorer;
  std::optional<std::string> retrofit_mode, solver, degree, output_dir;
  std::optional<double> a, tol;
  std::optional<int> max_iter;
  std::optional<std::size_t> k, min_frequency;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> known_languages;
};

void AddConfigOptions(CLI::App* cmd, Overrides& o, bool solver_flags) {
  cmd->add_option("-c,--config", o.config, "pipeline config (JSON)")->required();
  cmd->add_option("--source", o.source, "source language");
  cmd->add_option("--target", o.target, "target language");
  cmd->add_option("--strategy", o.strategy, "composition: avg or sif");
  cmd->add_option("--a", o.a, "SIF smoothing constant");
  cmd->add_option("--pc-fit", o.pc_fit, "per_language or joint");
  cmd->add_option("--scorer", o.scorer, "embedding, translation or geodesic");
  cmd->add_option("--retrofit-mode", o.retrofit_mode, "off, monolingual or aligned");
  cmd->add_option("--known-language", o.known_languages,
                  "language with known vectors in aligned mode (repeatable)");
  if (solver_flags) {
    cmd->add_option("--mode", o.solver, "solver: jacobi or direct");
    cmd->add_option("--tol", o.tol, "largest coordinate change at convergence");
    cmd->add_option("--max-iter", o.max_iter, "sweep limit");
    cmd->add_option("--degree", o.degree, "degree for relatedness weights: all or relatedness");
  }
  cmd->add_option("--k", o.k, "cross-validation folds");
  cmd->add_option("--seed", o.seed, "fold assignment seed");
  cmd->add_option("--min-frequency", o.min_frequency, "drop rarer corpus tags");
  cmd->add_option("-o,--output-dir", o.output_dir, "output directory");
}

PipelineConfig Configure(const Overrides& o, std::optional<int> jobs) {
  auto c = LoadConfig(o.config);
  if (o.source) c.source_language = *o.source;
  if (o.target) c.target_language = *o.target;
  if (o.strategy) c.composition.strategy = ParseStrategy(*o.strategy);
  if (o.a) c.composition.a = *o.a;
  if (o.pc_fit) {
    if (*o.pc_fit == "joint") c.pc_fit = PcFit::kJoint;
    else if (*o.pc_fit == "per_language") c.pc_fit = PcFit::kPerLanguage;
    else throw ValidationError("--pc-fit must be per_language or joint");
  }
  if (o.scorer) c.scorer = ParseScorer(*o.scorer);
  if (o.retrofit_mode) c.retrofit = ParseRetrofitMode(*o.retrofit_mode);
  if (!o.known_languages.empty()) {
    c.known_languages = {o.known_languages.begin(), o.known_languages.end()};
  }
  if (o.solver) c.solver = ParseSolver(*o.solver);
  if (o.tol) c.tolerance = *o.tol;
  if (o.max_iter) c.max_iterations = *o.max_iter;
  if (o.degree) c.degree = ParseDegreeMode(*o.degree);
  if (o.k) c.folds = *o.k;
  if (o.seed) c.seed = *o.seed;
  if (o.min_frequency) c.min_frequency = *o.min_frequency;
  // A command-line output directory is taken relative to the working
  // directory, not the config.
  if (o.output_dir) c.output_dir = fs::absolute(*o.output_dir);
  if (jobs) c.jobs = *jobs;
  c.Validate();
  return c;
}

void PrintJson(const json& j) { std::cout << j.dump(2) << '\n'; }

// Embeddings written by an earlier stage, or recomputed when absent.
LanguageEmbeddings StageEmbeddings(const PipelineConfig& c,
                                   const AnnotationCorpus& corpus) {
  LanguageEmbeddings out;
  for (const auto& lang : {c.source_language, c.target_language}) {
    auto retrofitted = RetrofitPath(c, lang);
    auto composed = ComposedPath(c, lang);
    if (c.retrofit != RetrofitMode::kOff && fs::exists(retrofitted)) {
      out.emplace(lang, LoadEmbeddings(retrofitted));
    } else if (c.retrofit == RetrofitMode::kOff && fs::exists(composed)) {
      out.emplace(lang, LoadEmbeddings(composed));
    }
  }
  if (out.size() == 2) return out;
  std::cerr << "note: stage outputs missing, recomputing embeddings\n";
  auto composed = RunCompose(c, corpus);
  return RunRetrofit(c, composed.embeddings).embeddings;
}

int RunCompose(const PipelineConfig& c) {
  auto corpus = LoadConfiguredCorpus(c);
  auto out = tagmap::RunCompose(c, corpus);
  WriteComposeOutputs(c, out);
  PrintJson(out.diagnostics);
  return kOk;
}

int RunRetrofitStage(const PipelineConfig& c) {
  if (c.retrofit == RetrofitMode::kOff) {
    throw ValidationError(
        "retrofit mode is off; set retrofit.mode or pass --retrofit-mode");
  }
  LanguageEmbeddings composed;
  bool have_all = true;
  for (const auto& [lang, in] : c.languages) {
    if (!in.tokens && !in.embeddings) continue;
    auto p = ComposedPath(c, lang);
    if (!fs::exists(p)) {
      have_all = false;
      break;
    }
    composed.emplace(lang, LoadEmbeddings(p));
  }
  if (!have_all) {
    std::cerr << "note: composed embeddings missing, composing first\n";
    auto corpus = LoadConfiguredCorpus(c);
    auto out = tagmap::RunCompose(c, corpus);
    WriteComposeOutputs(c, out);
    composed = std::move(out.embeddings);
  }
  auto out = RunRetrofit(c, composed);
  WriteRetrofitOutputs(c, out);
  json reports = json::object();
  for (const auto& [name, r] : out.reports) reports[name] = ReportJson(r);
  PrintJson(reports);
  return kOk;
}

Annotation Annotate(const PipelineConfig& c) {
  auto corpus = LoadConfiguredCorpus(c);
  LanguageEmbeddings embeddings;
  if (c.scorer == ScorerKind::kEmbedding) embeddings = StageEmbeddings(c, corpus);
  auto a = RunAnnotate(c, corpus, embeddings);
  WriteAnnotation(c, a);
  return a;
}

int RunAnnotateStage(const PipelineConfig& c) {
  auto a = Annotate(c);
  PrintJson({{"items", a.scores.items.size()},
             {"tags", a.scores.tags.size()},
             {"skipped_items", a.skipped_items}});
  return kOk;
}

int RunEvaluateStage(const PipelineConfig& c) {
  auto dir = c.Resolve(c.output_dir);
  Annotation a = fs::exists(dir / "scores.tsv") && fs::exists(dir / "truth.tsv")
                     ? ReadAnnotation(c)
                     : Annotate(c);
  auto report = RunEvaluate(c, a);
  WriteEvaluation(c, report, a);
  PrintJson(SummaryJson(report));
  return kOk;
}

struct StandaloneRetrofit {
  std::string known, graph, output, relations, report, mode = "jacobi";
  std::string degree = "all";
  double tol = 1e-6;
  int max_iter = 1000;
};

int RunStandaloneRetrofit(const StandaloneRetrofit& s, int jobs) {
  auto classes = s.relations.empty() ? DefaultRelationClasses()
                                     : LoadRelationClasses(s.relations);
  auto graph = LoadGraph(s.graph, classes);
  auto initial = LoadEmbeddings(s.known);
  auto problem = MakeProblem(graph, initial, KnownConcepts(initial),
                             ParseDegreeMode(s.degree));
  SolverReport report;
  EmbeddingSet result;
  if (ParseSolver(s.mode) == SolverKind::kDirect) {
    result = DirectSolve(problem);
    report.converged = true;
    report.objective_initial =
        ObjectiveValue(problem.initial, problem.initial, problem.weights);
    report.objective_final =
        ObjectiveValue(result.matrix(), problem.initial, problem.weights);
    report.components = ConnectedComponents(problem.graph).component_count;
  } else {
    if (!(s.tol > 0)) throw ValidationError("--tol must be positive");
    auto r = JacobiRetrofit(problem, {.tolerance = s.tol,
                                      .max_iterations = s.max_iter,
                                      .degree = ParseDegreeMode(s.degree),
                                      .jobs = jobs});
    result = std::move(r.embeddings);
    report = r.report;
  }
  SaveEmbeddings(s.output, result);
  auto j = ReportJson(report);
  if (!s.report.empty()) WriteJson(s.report, j);
  PrintJson(j);
  return kOk;
}

int RunSynth(SynthOptions options, const std::string& out) {
  options.Validate();
  WriteSynthBundle(GenerateSynth(options), out);
  std::cout << "wrote synthetic bundle to " << out << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-lingual tag annotation with retrofitted concept embeddings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  std::optional<int> jobs;
  app.add_option("-j,--jobs", jobs, "worker thread cap")
      ->check(CLI::PositiveNumber)
      ->expected(1);

  Overrides compose_o, retrofit_o, annotate_o, evaluate_o, pipeline_o;
  auto* compose = app.add_subcommand("compose", "compose tag embeddings from token vectors");
  AddConfigOptions(compose, compose_o, false);

  auto* retrofit = app.add_subcommand(
      "retrofit", "retrofit embeddings to the configured graphs, or to one graph "
                  "with --known/--graph/--output");
  StandaloneRetrofit standalone;
  retrofit->add_option("-c,--config", retrofit_o.config, "pipeline config (JSON)");
  retrofit->add_option("--known", standalone.known, "initial vectors (word-vector text)");
  retrofit->add_option("--graph", standalone.graph, "concept graph edge list");
  retrofit->add_option("--output", standalone.output, "where to write retrofitted vectors");
  retrofit->add_option("--relation-classes", standalone.relations, "relation=class file");
  retrofit->add_option("--report", standalone.report, "write the solver report here");
  retrofit->add_option("--mode", retrofit_o.solver, "solver: jacobi or direct");
  retrofit->add_option("--tol", retrofit_o.tol, "largest coordinate change at convergence");
  retrofit->add_option("--max-iter", retrofit_o.max_iter, "sweep limit");
  retrofit->add_option("--degree", retrofit_o.degree, "all or relatedness");
  retrofit->add_option("--retrofit-mode", retrofit_o.retrofit_mode, "monolingual or aligned");
  retrofit->add_option("--known-language", retrofit_o.known_languages, "aligned mode");
  retrofit->add_option("-o,--output-dir", retrofit_o.output_dir, "output directory");

  auto* annotate = app.add_subcommand("annotate", "score target tags for every item");
  AddConfigOptions(annotate, annotate_o, false);
  auto* evaluate = app.add_subcommand("evaluate", "cross-validated macro-AUC");
  AddConfigOptions(evaluate, evaluate_o, false);
  auto* pipeline = app.add_subcommand("pipeline", "run every stage");
  AddConfigOptions(pipeline, pipeline_o, true);

  auto* synth = app.add_subcommand("synth", "write a synthetic two-language dataset");
  SynthOptions synth_options;
  std::string synth_out;
  synth->add_option("-o,--out", synth_out, "bundle directory")->required();
  synth->add_option("--tags", synth_options.tags, "tags per language");
  synth->add_option("--items", synth_options.items, "corpus items");
  synth->add_option("--noise", synth_options.noise, "target token noise");
  synth->add_option("--seed", synth_options.seed, "random seed");
  synth->add_option("--dim", synth_options.dim, "vector dimension");
  synth->add_option("--vocabulary", synth_options.vocabulary, "tokens per language");
  synth->add_option("--alias-fraction", synth_options.alias_fraction,
                    "share of tags given a redirect alias");
  synth->add_option("--source", synth_options.source_language, "source language code");
  synth->add_option("--target", synth_options.target_language, "target language code");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (compose->parsed()) return RunCompose(Configure(compose_o, jobs));
    if (retrofit->parsed()) {
      bool any_standalone = !standalone.known.empty() || !standalone.graph.empty() ||
                            !standalone.output.empty();
      if (retrofit_o.config.empty()) {
        if (standalone.known.empty() || standalone.graph.empty() ||
            standalone.output.empty()) {
          throw ValidationError(
              "retrofit needs --config, or all of --known, --graph and --output");
        }
        if (retrofit_o.solver) standalone.mode = *retrofit_o.solver;
        if (retrofit_o.tol) standalone.tol = *retrofit_o.tol;
        if (retrofit_o.max_iter) standalone.max_iter = *retrofit_o.max_iter;
        if (retrofit_o.degree) standalone.degree = *retrofit_o.degree;
        return RunStandaloneRetrofit(standalone, jobs.value_or(1));
      }
      if (any_standalone) {
        throw ValidationError("--known/--graph/--output cannot be combined with --config");
      }
      return RunRetrofitStage(Configure(retrofit_o, jobs));
    }
    if (annotate->parsed()) return RunAnnotateStage(Configure(annotate_o, jobs));
    if (evaluate->parsed()) return RunEvaluateStage(Configure(evaluate_o, jobs));
    if (pipeline->parsed()) {
      auto report = RunPipeline(Configure(pipeline_o, jobs));
      PrintJson(SummaryJson(report));
      return kOk;
    }
    if (synth->parsed()) return RunSynth(synth_options, synth_out);
  } catch (const FeasibilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnparsable;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kInvalid;
}
