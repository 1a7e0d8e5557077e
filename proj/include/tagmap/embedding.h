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

#ifndef TAGMAP_EMBEDDING_H_
#define TAGMAP_EMBEDDING_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace tagmap {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRow = Eigen::Map<const Eigen::VectorXd>;

// Ordered map from key (a concept identifier or a token) to a d-dimensional
// vector, plus a known/unknown flag per entry. Unknown entries stand for
// concepts with no initial vector and always hold the zero vector.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  explicit EmbeddingSet(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }

  const std::vector<std::string>& keys() const { return keys_; }
  const std::string& key(std::size_t i) const { return keys_[i]; }

  std::optional<std::size_t> find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key).has_value(); }
  // Throws LookupError naming the key.
  std::size_t index(std::string_view key) const;

  ConstRow row(std::size_t i) const {
    return ConstRow(data_.data() + i * dim_, static_cast<Eigen::Index>(dim_));
  }
  ConstRow at(std::string_view key) const { return row(index(key)); }
  bool known(std::size_t i) const { return known_[i]; }

  Eigen::Map<const RowMatrix> matrix() const;

  // Appends an entry. Throws ValidationError on a duplicate key or a
  // dimension mismatch. An unknown entry must be the zero vector.
  void Add(std::string key, const Eigen::Ref<const Eigen::VectorXd>& vector,
           bool known = true);
  void AddUnknown(std::string key);

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> keys_;
  std::vector<double> data_;
  std::vector<bool> known_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Builds a set from matrix rows. Rows that are exactly zero are flagged
// unknown.
EmbeddingSet FromRows(const std::vector<std::string>& keys,
                      const RowMatrix& rows);

// Text word-vector format: a header line `N d`, then N lines
// `key v1 ... vd`. Keys may contain single spaces: the last d fields of a
// line are the vector and everything before them is the key. All-zero
// vectors load as unknown entries.
EmbeddingSet ReadEmbeddings(std::istream& in);
EmbeddingSet LoadEmbeddings(const std::filesystem::path& path);

// Writes with 17 significant digits so a reload is bit-exact.
void WriteEmbeddings(std::ostream& out, const EmbeddingSet& set);
void SaveEmbeddings(const std::filesystem::path& path,
                    const EmbeddingSet& set);

}  // namespace tagmap

#endif  // TAGMAP_EMBEDDING_H_
