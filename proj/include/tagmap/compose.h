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

#ifndef TAGMAP_COMPOSE_H_
#define TAGMAP_COMPOSE_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tagmap/embedding.h"

namespace tagmap {

// Pre-trained token vectors. Ranks are 1-based file positions; token files
// ship sorted by descending corpus frequency, so rank z stands in for a
// frequency of 1/z.
class TokenTable {
 public:
  TokenTable() = default;
  explicit TokenTable(EmbeddingSet vectors) : vectors_(std::move(vectors)) {}

  std::size_t dim() const { return vectors_.dim(); }
  std::size_t size() const { return vectors_.size(); }
  const EmbeddingSet& vectors() const { return vectors_; }

  // Rank of a token, 0 when out of vocabulary.
  std::size_t rank(std::string_view token) const;
  bool contains(std::string_view token) const {
    return vectors_.contains(token);
  }

 private:
  EmbeddingSet vectors_;
};

TokenTable LoadTokenTable(const std::filesystem::path& path);

// `_ - / ,` become spaces, `( ) ' : . ! $` are deleted, ASCII letters are
// lowercased, then the result is split on whitespace. May return an empty
// list.
std::vector<std::string> PreprocessTag(std::string_view raw);

inline constexpr double kDefaultSifA = 1e-3;

// Weight a/(a + 1/z) for a token of rank z.
double SifWeight(double a, std::size_t rank);

// Mean of token vectors; out-of-vocabulary tokens count as zero vectors.
// Throws CompositionError on an empty list.
Eigen::VectorXd ComposeAverage(const std::vector<std::string>& tokens,
                               const TokenTable& table);

// SIF-weighted mean. Throws CompositionError on an empty list and
// ValidationError when a <= 0.
Eigen::VectorXd SifWeightedMean(const std::vector<std::string>& tokens,
                                const TokenTable& table, double a);

struct PowerIterationOptions {
  double tolerance = 1e-9;
  int max_iterations = 1000;
};

struct PrincipalDirection {
  Eigen::VectorXd u;  // unit vector, or empty when the input is all zero
  int iterations = 0;
  bool converged = false;
};

// Unit vector maximizing sum_i (u^T row_i)^2, by power iteration on
// rows^T rows.
PrincipalDirection FirstSingularDirection(
    const RowMatrix& rows, const PowerIterationOptions& options = {});

// Projects every row off the first singular direction. An all-zero matrix
// is returned unchanged and `direction` is left with an empty u.
RowMatrix RemoveFirstComponent(const RowMatrix& rows,
                               PrincipalDirection* direction = nullptr,
                               const PowerIterationOptions& options = {});

// rows - (rows u) u^T for a unit vector u.
RowMatrix ProjectOff(const RowMatrix& rows, const Eigen::VectorXd& u);

enum class CompositionStrategy { kAverage, kSif };

CompositionStrategy ParseStrategy(std::string_view name);
std::string_view StrategyName(CompositionStrategy strategy);

struct CompositionOptions {
  CompositionStrategy strategy = CompositionStrategy::kSif;
  double a = kDefaultSifA;
};

struct ComposedEmbeddings {
  std::vector<std::string> tags;  // deduplicated input order
  RowMatrix weighted;             // per-tag composition before PC removal
  RowMatrix vectors;              // final vectors
  std::set<std::string> zero_mask;
  std::size_t empty_tags = 0;     // preprocessing produced no token
  std::size_t oov_tags = 0;       // tokens present, none in vocabulary
  PrincipalDirection direction;   // sif only

  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  // Zero-masked tags become unknown entries. Keys are `prefix + tag`.
  EmbeddingSet ToEmbeddingSet(std::string_view prefix = {}) const;
};

// Preprocesses and composes each tag. Duplicate labels are composed once.
// With the sif strategy the first singular direction of the composed
// matrix is removed from every row.
ComposedEmbeddings BuildTagEmbeddings(const std::vector<std::string>& tags,
                                      const TokenTable& table,
                                      const CompositionOptions& options);

// Per-tag composition only, without PC removal. Used to fit one direction
// jointly over several languages.
ComposedEmbeddings ComposeTags(const std::vector<std::string>& tags,
                               const TokenTable& table,
                               const CompositionOptions& options);

}  // namespace tagmap

#endif  // TAGMAP_COMPOSE_H_
