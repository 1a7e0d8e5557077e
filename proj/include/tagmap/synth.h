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

#ifndef TAGMAP_SYNTH_H_
#define TAGMAP_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tagmap/embedding.h"
#include "tagmap/io.h"
#include "tagmap/ontology.h"

namespace tagmap {

struct SynthOptions {
  std::size_t tags = 50;         // per language
  std::size_t items = 200;
  double noise = 0.05;           // relative to token vector scale
  std::uint64_t seed = 7;
  std::size_t dim = 32;
  std::size_t vocabulary = 0;    // tokens per language; 0 means 3 * tags
  double alias_fraction = 0.2;   // tags given an out-of-vocabulary redirect
  std::string source_language = "l1";
  std::string target_language = "l2";

  // Throws ValidationError.
  void Validate() const;
};

// Two languages whose token tables are noisy orthogonal images of one
// another, brought back into a shared space with the known rotation (as
// released aligned multilingual vectors are). Tag i of the target language
// is built from the images of the tokens of source tag i.
struct SynthBundle {
  SynthOptions options;
  EmbeddingSet source_tokens;
  EmbeddingSet target_tokens;
  std::vector<std::string> source_tags;  // labels, parallel
  std::vector<std::string> target_tags;
  std::vector<Edge> source_edges;        // concepts are `<lang>:<label>`
  std::vector<Edge> target_edges;
  Alignment alignment;
  AnnotationCorpus corpus;
};

SynthBundle GenerateSynth(const SynthOptions& options);

// Writes tokens, graphs, alignment, corpus, the ground-truth mapping
// (usable as a translation table) and a pipeline config.json into `dir`.
void WriteSynthBundle(const SynthBundle& bundle,
                      const std::filesystem::path& dir);

}  // namespace tagmap

#endif  // TAGMAP_SYNTH_H_
