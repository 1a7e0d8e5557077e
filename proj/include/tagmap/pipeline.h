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

#ifndef TAGMAP_PIPELINE_H_
#define TAGMAP_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tagmap/compose.h"
#include "tagmap/embedding.h"
#include "tagmap/eval.h"
#include "tagmap/io.h"
#include "tagmap/mapping.h"
#include "tagmap/retrofit.h"

namespace tagmap {

struct LanguageInputs {
  std::optional<std::filesystem::path> tokens;      // token table
  std::optional<std::filesystem::path> graph;       // edge list
  // Pre-computed concept vectors (keys `<lang>:<tag>`), used instead of
  // composing from a token table.
  std::optional<std::filesystem::path> embeddings;
};

enum class ScorerKind { kEmbedding, kTranslation, kGeodesic };
enum class RetrofitMode { kOff, kMonolingual, kAligned };
enum class SolverKind { kJacobi, kDirect };
enum class PcFit { kPerLanguage, kJoint };

struct PipelineConfig {
  std::filesystem::path base_dir;  // relative paths resolve against it
  std::map<std::string, LanguageInputs> languages;
  std::optional<std::filesystem::path> relation_classes;
  std::optional<std::filesystem::path> alignment;
  std::filesystem::path corpus;
  std::size_t min_frequency = 0;
  std::optional<std::filesystem::path> translation_table;
  std::string source_language;
  std::string target_language;

  CompositionOptions composition;
  PcFit pc_fit = PcFit::kPerLanguage;

  ScorerKind scorer = ScorerKind::kEmbedding;

  RetrofitMode retrofit = RetrofitMode::kOff;
  std::set<std::string> known_languages;
  SolverKind solver = SolverKind::kJacobi;
  double tolerance = 1e-6;
  int max_iterations = 1000;
  DegreeMode degree = DegreeMode::kAllNeighbors;

  std::size_t folds = 3;
  std::uint64_t seed = 0;

  std::filesystem::path output_dir = "out";
  int jobs = 1;

  std::filesystem::path Resolve(const std::filesystem::path& p) const;
  // Throws ValidationError describing the first violated rule.
  void Validate() const;
  nlohmann::json ToJson() const;
  static PipelineConfig FromJson(const nlohmann::json& j,
                                 const std::filesystem::path& base_dir);
};

PipelineConfig LoadConfig(const std::filesystem::path& path);

ScorerKind ParseScorer(std::string_view name);
RetrofitMode ParseRetrofitMode(std::string_view name);
SolverKind ParseSolver(std::string_view name);

using LanguageEmbeddings = std::map<std::string, EmbeddingSet>;

struct ComposeOutcome {
  LanguageEmbeddings embeddings;
  nlohmann::json diagnostics;
};

struct RetrofitOutcome {
  LanguageEmbeddings embeddings;
  // One report per retrofitted language, or a single "aligned" entry.
  std::map<std::string, SolverReport> reports;
};

// Concepts to embed per language: every corpus tag plus every graph
// concept of that language, by unqualified label, in first-seen order.
std::map<std::string, std::vector<std::string>> ConceptLabels(
    const PipelineConfig& config, const AnnotationCorpus& corpus);

ComposeOutcome RunCompose(const PipelineConfig& config,
                          const AnnotationCorpus& corpus);
RetrofitOutcome RunRetrofit(const PipelineConfig& config,
                            const LanguageEmbeddings& composed);
Annotation RunAnnotate(const PipelineConfig& config,
                       const AnnotationCorpus& corpus,
                       const LanguageEmbeddings& embeddings);
CrossValidationReport RunEvaluate(const PipelineConfig& config,
                                  const Annotation& annotation);

// Union of the configured graphs of `langs`, joined by the alignment
// pairs that connect them.
ConceptGraph MergedGraph(const PipelineConfig& config,
                         const std::vector<std::string>& langs);

AnnotationCorpus LoadConfiguredCorpus(const PipelineConfig& config);
RunManifest BuildManifest(const PipelineConfig& config);

// File names under the output directory.
std::filesystem::path ComposedPath(const PipelineConfig& c,
                                   const std::string& lang);
std::filesystem::path RetrofitPath(const PipelineConfig& c,
                                   const std::string& lang);

// Writers used by the CLI stages.
void WriteComposeOutputs(const PipelineConfig& config,
                         const ComposeOutcome& outcome);
void WriteRetrofitOutputs(const PipelineConfig& config,
                          const RetrofitOutcome& outcome);
void WriteAnnotation(const PipelineConfig& config, const Annotation& a);
Annotation ReadAnnotation(const PipelineConfig& config);
void WriteEvaluation(const PipelineConfig& config,
                     const CrossValidationReport& report,
                     const Annotation& annotation);

nlohmann::json ReportJson(const SolverReport& report);

// Every stage end to end; writes all outputs.
CrossValidationReport RunPipeline(const PipelineConfig& config);

}  // namespace tagmap

#endif  // TAGMAP_PIPELINE_H_
