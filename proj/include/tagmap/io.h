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

#ifndef TAGMAP_IO_H_
#define TAGMAP_IO_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace tagmap {

struct CorpusItem {
  std::string id;
  std::map<std::string, std::set<std::string>> tags;  // language -> tags
};

struct AnnotationCorpus {
  std::vector<CorpusItem> items;

  std::set<std::string> Languages() const;
  // Items tagged in both languages, in corpus order.
  std::vector<const CorpusItem*> PairView(const std::string& source,
                                          const std::string& target) const;
};

struct CorpusLoadOptions {
  // Tags seen on fewer items than this, per language, are dropped. 0 or 1
  // disables the filter.
  std::size_t min_frequency = 0;
};

struct CorpusLoadReport {
  std::size_t merged_records = 0;  // repeated (item, language) lines
  std::map<std::string, std::size_t> dropped_tags;  // per language
  std::size_t emptied_entries = 0;  // (item, language) sets left empty
};

// Lines `item_id<TAB>lang<TAB>tag1|tag2|...`; blank and `#` lines skipped.
// Throws ParseError with the line number on a malformed line.
AnnotationCorpus ReadCorpus(std::istream& in,
                            const CorpusLoadOptions& options = {},
                            CorpusLoadReport* report = nullptr);
AnnotationCorpus LoadCorpus(const std::filesystem::path& path,
                            const CorpusLoadOptions& options = {},
                            CorpusLoadReport* report = nullptr);
void WriteCorpus(std::ostream& out, const AnnotationCorpus& corpus);
void SaveCorpus(const std::filesystem::path& path,
                const AnnotationCorpus& corpus);

struct LanguageStats {
  std::size_t unique_tags = 0;
  std::size_t tag_occurrences = 0;
  double mean_tags_per_item = 0.0;
  double std_tags_per_item = 0.0;  // population
};

struct CorpusStats {
  std::size_t items = 0;
  LanguageStats source;
  LanguageStats target;
};

// Statistics of the pair view. Throws ValidationError for a language that
// tags no item.
CorpusStats ComputeCorpusStats(const AnnotationCorpus& corpus,
                               const std::string& source,
                               const std::string& target);

// Lower-case hex SHA-256 of a file's bytes.
std::string FileDigest(const std::filesystem::path& path);

inline constexpr const char* kToolVersion = "0.1.0";

// Input digests plus run parameters; equal manifests reproduce reports
// bit for bit.
struct RunManifest {
  std::map<std::string, std::string> input_digests;  // label -> sha256
  nlohmann::json parameters = nlohmann::json::object();
  std::string tool_version = kToolVersion;

  nlohmann::json ToJson() const;
  static RunManifest FromJson(const nlohmann::json& j);
};

void WriteJson(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json ReadJson(const std::filesystem::path& path);

}  // namespace tagmap

#endif  // TAGMAP_IO_H_
