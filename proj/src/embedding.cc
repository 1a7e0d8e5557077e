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

#include "tagmap/embedding.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tagmap/error.h"

namespace tagmap {

std::optional<std::size_t> EmbeddingSet::find(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingSet::index(std::string_view key) const {
  auto i = find(key);
  if (!i) throw LookupError("no embedding for '" + std::string(key) + "'");
  return *i;
}

Eigen::Map<const RowMatrix> EmbeddingSet::matrix() const {
  return Eigen::Map<const RowMatrix>(data_.data(),
                                     static_cast<Eigen::Index>(size()),
                                     static_cast<Eigen::Index>(dim_));
}

void EmbeddingSet::Add(std::string key,
                       const Eigen::Ref<const Eigen::VectorXd>& vector,
                       bool known) {
  if (static_cast<std::size_t>(vector.size()) != dim_) {
    throw ValidationError("embedding for '" + key + "' has dimension " +
                          std::to_string(vector.size()) + ", expected " +
                          std::to_string(dim_));
  }
  if (!known && !vector.isZero(0.0)) {
    throw ValidationError("unknown embedding '" + key + "' must be zero");
  }
  if (index_.count(key) != 0) {
    throw ValidationError("duplicate embedding key '" + key + "'");
  }
  index_.emplace(key, keys_.size());
  keys_.push_back(std::move(key));
  data_.insert(data_.end(), vector.data(), vector.data() + vector.size());
  known_.push_back(known);
}

void EmbeddingSet::AddUnknown(std::string key) {
  Add(std::move(key), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_)),
      false);
}

EmbeddingSet FromRows(const std::vector<std::string>& keys,
                      const RowMatrix& rows) {
  if (static_cast<Eigen::Index>(keys.size()) != rows.rows()) {
    throw ValidationError("key count does not match row count");
  }
  EmbeddingSet set(static_cast<std::size_t>(rows.cols()));
  for (std::size_t i = 0; i < keys.size(); ++i) {
    Eigen::VectorXd v = rows.row(static_cast<Eigen::Index>(i)).transpose();
    bool known = !v.isZero(0.0);
    set.Add(keys[i], v, known);
  }
  return set;
}

namespace {

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

bool ParseDouble(const std::string& s, double* out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  *out = std::strtod(begin, &end);
  // Underflow to a denormal or zero is fine; overflow is not.
  bool overflow = errno == ERANGE && std::abs(*out) >= 1.0;
  return end != begin && *end == '\0' && !overflow;
}

}  // namespace

EmbeddingSet ReadEmbeddings(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw FormatError("missing header", 1);
  ++lineno;
  auto header = SplitFields(line);
  long long count = 0;
  long long dim = 0;
  if (header.size() != 2) throw FormatError("header must be `N d`", lineno);
  try {
    count = std::stoll(header[0]);
    dim = std::stoll(header[1]);
  } catch (const std::exception&) {
    throw FormatError("header must be `N d`", lineno);
  }
  if (count < 0 || dim <= 0) throw FormatError("bad header values", lineno);

  EmbeddingSet set(static_cast<std::size_t>(dim));
  Eigen::VectorXd v(dim);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    if (fields.size() < static_cast<std::size_t>(dim) + 1) {
      throw FormatError("expected a key and " + std::to_string(dim) +
                            " values, got " + std::to_string(fields.size()) +
                            " fields",
                        lineno);
    }
    std::size_t key_fields = fields.size() - static_cast<std::size_t>(dim);
    std::string key = fields[0];
    for (std::size_t f = 1; f < key_fields; ++f) key += " " + fields[f];
    for (long long k = 0; k < dim; ++k) {
      if (!ParseDouble(fields[key_fields + k], &v[k])) {
        throw FormatError("bad value '" + fields[key_fields + k] + "'", lineno);
      }
    }
    try {
      set.Add(std::move(key), v, !v.isZero(0.0));
    } catch (const ValidationError& e) {
      throw FormatError(e.what(), lineno);
    }
  }
  if (set.size() != static_cast<std::size_t>(count)) {
    throw FormatError("header announces " + std::to_string(count) +
                      " entries, file has " + std::to_string(set.size()));
  }
  return set;
}

EmbeddingSet LoadEmbeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return ReadEmbeddings(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WriteEmbeddings(std::ostream& out, const EmbeddingSet& set) {
  out << set.size() << ' ' << set.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << set.key(i);
    auto r = set.row(i);
    for (Eigen::Index k = 0; k < r.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", r[k]);
      out << ' ' << buf;
    }
    out << '\n';
  }
}

void SaveEmbeddings(const std::filesystem::path& path,
                    const EmbeddingSet& set) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  WriteEmbeddings(out, set);
}

}  // namespace tagmap
