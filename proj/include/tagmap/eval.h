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

#ifndef TAGMAP_EVAL_H_
#define TAGMAP_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tagmap/mapping.h"

namespace tagmap {

// Probability that a random positive outscores a random negative, ties
// counted as one half. nullopt when the labels hold a single class.
std::optional<double> RocAuc(std::span<const double> scores,
                             std::span<const std::uint8_t> labels);

struct EvalReport {
  std::vector<std::string> tags;
  std::vector<std::optional<double>> per_tag_auc;  // parallel to tags
  std::vector<std::string> skipped_tags;
  double macro_auc = 0.0;
};

// Column-wise AUC, averaged over the tags where it is defined. Throws
// ValidationError on a shape mismatch and EvaluationError when every tag
// is degenerate.
EvalReport MacroAuc(const ScoreMatrix& scores, const ScoreMatrix& truth);

// Rows restricted to `rows` (indices into the matrices).
EvalReport MacroAuc(const ScoreMatrix& scores, const ScoreMatrix& truth,
                    const std::vector<std::size_t>& rows);

// Iterative stratification for multi-label data. `labels[i]` lists the
// positive label ids of item i, each in [0, label_count). Returns the fold
// of every item. Throws ValidationError for k < 2, k greater than the item
// count, or an item without labels.
std::vector<std::size_t> IterativeStratifiedSplit(
    const std::vector<std::vector<std::size_t>>& labels,
    std::size_t label_count, std::size_t k, std::uint64_t seed);

// Positive label ids per row of a 0/1 matrix.
std::vector<std::vector<std::size_t>> PositiveLabels(const ScoreMatrix& truth);

struct CrossValidationReport {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;  // per row
  std::vector<EvalReport> folds;
  double mean_macro_auc = 0.0;
  double std_macro_auc = 0.0;  // sample (n - 1)
  // Mean of each tag's AUC over the folds where it is defined.
  std::vector<std::optional<double>> mean_per_tag_auc;
};

// Mean and sample standard deviation of `values`.
std::pair<double, double> MeanAndSampleStd(const std::vector<double>& values);

// Splits the rows by iterative stratification over the truth labels, then
// evaluates macro-AUC on each fold.
CrossValidationReport CrossValidate(const ScoreMatrix& scores,
                                    const ScoreMatrix& truth, std::size_t k,
                                    std::uint64_t seed);

// `tag<TAB>auc` lines; undefined AUCs are written as `nan`.
void WritePerTagTsv(std::ostream& out, const std::vector<std::string>& tags,
                    const std::vector<std::optional<double>>& auc);
// `item_id<TAB>fold` lines.
void WriteFolds(std::ostream& out, const std::vector<std::string>& items,
                const std::vector<std::size_t>& fold_of);

nlohmann::json SummaryJson(const CrossValidationReport& report);

}  // namespace tagmap

#endif  // TAGMAP_EVAL_H_
