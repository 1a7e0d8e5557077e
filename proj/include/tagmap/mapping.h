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

#ifndef TAGMAP_MAPPING_H_
#define TAGMAP_MAPPING_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tagmap/embedding.h"
#include "tagmap/ontology.h"

namespace tagmap {

struct AnnotationCorpus;

// Target tags of one language in scoring order.
class TagVocabulary {
 public:
  TagVocabulary() = default;
  // Throws ValidationError on a duplicate tag.
  TagVocabulary(std::string language, std::vector<std::string> tags);

  const std::string& language() const { return language_; }
  const std::vector<std::string>& tags() const { return tags_; }
  std::size_t size() const { return tags_.size(); }
  std::optional<std::size_t> find(std::string_view tag) const;

 private:
  std::string language_;
  std::vector<std::string> tags_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Each source tag maps to at most one target tag.
class TranslationTable {
 public:
  // Throws ValidationError when a source tag is given two targets.
  void Add(const std::string& source, const std::string& target);
  std::optional<std::string> Translate(std::string_view source) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

// `source_tag<TAB>target_tag` lines.
TranslationTable ReadTranslationTable(std::istream& in);
TranslationTable LoadTranslationTable(const std::filesystem::path& path);

// u.v / (|u| |v|), 0 when either norm is zero. Throws ValidationError on a
// dimension mismatch.
double Cosine(const Eigen::Ref<const Eigen::VectorXd>& u,
              const Eigen::Ref<const Eigen::VectorXd>& v);

// Mean cosine between each source embedding and every target tag. Source
// and target keys are looked up verbatim; throws LookupError naming a
// missing key.
Eigen::VectorXd ScoreTargets(const std::vector<std::string>& source_keys,
                             const EmbeddingSet& source_embeddings,
                             const EmbeddingSet& target_embeddings,
                             const std::vector<std::string>& target_keys);

// Mean of per-source indicator vectors over the vocabulary.
Eigen::VectorXd TranslationScores(const std::vector<std::string>& source_tags,
                                  const TranslationTable& table,
                                  const TagVocabulary& vocabulary,
                                  std::size_t* untranslated = nullptr);

// Item x tag matrix of reals; also used for 0/1 ground truth.
struct ScoreMatrix {
  std::vector<std::string> items;
  std::vector<std::string> tags;
  RowMatrix values;
};

void WriteScoreMatrix(std::ostream& out, const ScoreMatrix& m);
ScoreMatrix ReadScoreMatrix(std::istream& in);
void SaveScoreMatrix(const std::filesystem::path& path, const ScoreMatrix& m);
ScoreMatrix LoadScoreMatrix(const std::filesystem::path& path);

// Embedding scorer: keys are `<lang>:<tag>` in both sets.
struct EmbeddingScorer {
  const EmbeddingSet* source = nullptr;
  const EmbeddingSet* target = nullptr;
};
struct TranslationScorer {
  const TranslationTable* table = nullptr;
};
// Geodesic baseline over a graph whose concepts are `<lang>:<tag>`.
struct GeodesicScorer {
  const ConceptGraph* graph = nullptr;
};
using Scorer = std::variant<EmbeddingScorer, TranslationScorer, GeodesicScorer>;

struct Annotation {
  ScoreMatrix scores;
  ScoreMatrix truth;
  std::size_t skipped_items = 0;     // no source or no target tags
  std::size_t untranslated_tags = 0; // translation scorer only
  std::size_t missing_concepts = 0;  // geodesic scorer only
};

// Target vocabulary: every distinct target-language tag of the items
// tagged in both languages, sorted.
TagVocabulary TargetVocabulary(const AnnotationCorpus& corpus,
                               const std::string& source_language,
                               const std::string& target_language);

// Scores every item tagged in both languages against `vocabulary`.
Annotation AnnotateCorpus(const AnnotationCorpus& corpus, const Scorer& scorer,
                          const std::string& source_language,
                          const std::string& target_language,
                          const TagVocabulary& vocabulary);
Annotation AnnotateCorpus(const AnnotationCorpus& corpus, const Scorer& scorer,
                          const std::string& source_language,
                          const std::string& target_language);

}  // namespace tagmap

#endif  // TAGMAP_MAPPING_H_
