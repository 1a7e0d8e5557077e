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

#include "tagmap/compose.h"

#include <cctype>
#include <random>
#include <unordered_set>

#include "tagmap/error.h"

namespace tagmap {

std::size_t TokenTable::rank(std::string_view token) const {
  auto i = vectors_.find(token);
  return i ? *i + 1 : 0;
}

TokenTable LoadTokenTable(const std::filesystem::path& path) {
  return TokenTable(LoadEmbeddings(path));
}

std::vector<std::string> PreprocessTag(std::string_view raw) {
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '_':
      case '-':
      case '/':
      case ',':
        cleaned.push_back(' ');
        break;
      case '(':
      case ')':
      case '\'':
      case ':':
      case '.':
      case '!':
      case '$':
        break;
      default:
        cleaned.push_back(static_cast<char>(
            std::tolower(static_cast<unsigned char>(c))));
    }
  }
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() &&
           std::isspace(static_cast<unsigned char>(cleaned[i]))) {
      ++i;
    }
    std::size_t start = i;
    while (i < cleaned.size() &&
           !std::isspace(static_cast<unsigned char>(cleaned[i]))) {
      ++i;
    }
    if (i > start) tokens.push_back(cleaned.substr(start, i - start));
  }
  return tokens;
}

double SifWeight(double a, std::size_t rank) {
  return a / (a + 1.0 / static_cast<double>(rank));
}

Eigen::VectorXd ComposeAverage(const std::vector<std::string>& tokens,
                               const TokenTable& table) {
  if (tokens.empty()) throw CompositionError("cannot compose an empty tag");
  Eigen::VectorXd sum =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.dim()));
  for (const auto& t : tokens) {
    if (auto i = table.vectors().find(t)) sum += table.vectors().row(*i);
  }
  return sum / static_cast<double>(tokens.size());
}

Eigen::VectorXd SifWeightedMean(const std::vector<std::string>& tokens,
                                const TokenTable& table, double a) {
  if (tokens.empty()) throw CompositionError("cannot compose an empty tag");
  if (!(a > 0)) throw ValidationError("sif parameter a must be positive");
  Eigen::VectorXd sum =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.dim()));
  for (const auto& t : tokens) {
    if (auto i = table.vectors().find(t)) {
      sum += SifWeight(a, *i + 1) * table.vectors().row(*i);
    }
  }
  return sum / static_cast<double>(tokens.size());
}

PrincipalDirection FirstSingularDirection(
    const RowMatrix& rows, const PowerIterationOptions& options) {
  PrincipalDirection result;
  if (rows.size() == 0 || rows.isZero(0.0)) return result;

  const Eigen::MatrixXd gram = rows.transpose() * rows;
  // Fixed-seed start so a start orthogonal to the top direction has
  // probability zero and runs stay reproducible.
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(gram.rows());
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = normal(rng);
  v.normalize();

  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd next = gram * v;
    double norm = next.norm();
    if (norm == 0.0) {
      // The start fell in the null space; restart from the gram diagonal.
      Eigen::Index col;
      gram.diagonal().maxCoeff(&col);
      next = gram.col(col);
      norm = next.norm();
    }
    next /= norm;
    double delta = (next - v).lpNorm<Eigen::Infinity>();
    v = next;
    result.iterations = it;
    if (delta < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.u = v;
  return result;
}

RowMatrix ProjectOff(const RowMatrix& rows, const Eigen::VectorXd& u) {
  if (u.size() == 0) return rows;
  if (u.size() != rows.cols()) {
    throw ValidationError("direction dimension does not match rows");
  }
  Eigen::VectorXd coeff = rows * u;
  return rows - coeff * u.transpose();
}

RowMatrix RemoveFirstComponent(const RowMatrix& rows,
                               PrincipalDirection* direction,
                               const PowerIterationOptions& options) {
  auto dir = FirstSingularDirection(rows, options);
  RowMatrix out = ProjectOff(rows, dir.u);
  if (direction) *direction = std::move(dir);
  return out;
}

CompositionStrategy ParseStrategy(std::string_view name) {
  if (name == "avg") return CompositionStrategy::kAverage;
  if (name == "sif") return CompositionStrategy::kSif;
  throw ValidationError("unknown composition strategy '" + std::string(name) +
                        "' (expected avg or sif)");
}

std::string_view StrategyName(CompositionStrategy strategy) {
  return strategy == CompositionStrategy::kSif ? "sif" : "avg";
}

EmbeddingSet ComposedEmbeddings::ToEmbeddingSet(std::string_view prefix) const {
  EmbeddingSet set(dim());
  for (std::size_t i = 0; i < tags.size(); ++i) {
    std::string key(prefix);
    key += tags[i];
    if (zero_mask.count(tags[i]) != 0) {
      set.AddUnknown(std::move(key));
    } else {
      Eigen::VectorXd v = vectors.row(static_cast<Eigen::Index>(i)).transpose();
      set.Add(std::move(key), v, !v.isZero(0.0));
    }
  }
  return set;
}

ComposedEmbeddings ComposeTags(const std::vector<std::string>& tags,
                               const TokenTable& table,
                               const CompositionOptions& options) {
  if (options.strategy == CompositionStrategy::kSif && !(options.a > 0)) {
    throw ValidationError("sif parameter a must be positive");
  }
  ComposedEmbeddings out;
  std::unordered_set<std::string> seen;
  for (const auto& t : tags) {
    if (seen.insert(t).second) out.tags.push_back(t);
  }
  const auto n = static_cast<Eigen::Index>(out.tags.size());
  out.weighted = RowMatrix::Zero(n, static_cast<Eigen::Index>(table.dim()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& tag = out.tags[static_cast<std::size_t>(i)];
    auto tokens = PreprocessTag(tag);
    if (tokens.empty()) {
      ++out.empty_tags;
      out.zero_mask.insert(tag);
      continue;
    }
    bool any_known = false;
    for (const auto& tok : tokens) any_known = any_known || table.contains(tok);
    if (!any_known) {
      ++out.oov_tags;
      out.zero_mask.insert(tag);
      continue;
    }
    out.weighted.row(i) =
        options.strategy == CompositionStrategy::kSif
            ? SifWeightedMean(tokens, table, options.a).transpose()
            : ComposeAverage(tokens, table).transpose();
  }
  out.vectors = out.weighted;
  return out;
}

ComposedEmbeddings BuildTagEmbeddings(const std::vector<std::string>& tags,
                                      const TokenTable& table,
                                      const CompositionOptions& options) {
  auto out = ComposeTags(tags, table, options);
  if (options.strategy == CompositionStrategy::kSif) {
    out.vectors = RemoveFirstComponent(out.weighted, &out.direction);
  }
  return out;
}

}  // namespace tagmap
