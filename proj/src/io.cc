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

#include "tagmap/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "tagmap/error.h"

namespace tagmap {

namespace {

std::string Trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? pos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::set<std::string> AnnotationCorpus::Languages() const {
  std::set<std::string> langs;
  for (const auto& item : items) {
    for (const auto& [lang, tags] : item.tags) langs.insert(lang);
  }
  return langs;
}

std::vector<const CorpusItem*> AnnotationCorpus::PairView(
    const std::string& source, const std::string& target) const {
  std::vector<const CorpusItem*> view;
  for (const auto& item : items) {
    if (item.tags.count(source) != 0 && item.tags.count(target) != 0) {
      view.push_back(&item);
    }
  }
  return view;
}

AnnotationCorpus ReadCorpus(std::istream& in, const CorpusLoadOptions& options,
                            CorpusLoadReport* report) {
  AnnotationCorpus corpus;
  CorpusLoadReport local;
  std::map<std::string, std::size_t> position;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = Split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError("expected item<TAB>lang<TAB>tags, got " +
                           std::to_string(fields.size()) + " fields",
                       lineno);
    }
    auto id = Trim(fields[0]);
    auto lang = Trim(fields[1]);
    if (id.empty()) throw ParseError("empty item id", lineno);
    if (lang.empty()) throw ParseError("empty language", lineno);
    std::set<std::string> tags;
    for (const auto& t : Split(fields[2], '|')) {
      auto tag = Trim(t);
      if (!tag.empty()) tags.insert(tag);
    }
    if (tags.empty()) throw ParseError("no tags", lineno);

    auto [it, inserted] = position.emplace(id, corpus.items.size());
    if (inserted) corpus.items.push_back({id, {}});
    auto& slot = corpus.items[it->second].tags[lang];
    if (!slot.empty()) ++local.merged_records;
    slot.insert(tags.begin(), tags.end());
  }

  if (options.min_frequency > 1) {
    std::map<std::string, std::map<std::string, std::size_t>> freq;
    for (const auto& item : corpus.items) {
      for (const auto& [lang, tags] : item.tags) {
        for (const auto& t : tags) ++freq[lang][t];
      }
    }
    for (const auto& [lang, counts] : freq) {
      for (const auto& [tag, n] : counts) {
        if (n < options.min_frequency) ++local.dropped_tags[lang];
      }
    }
    for (auto& item : corpus.items) {
      for (auto it = item.tags.begin(); it != item.tags.end();) {
        auto& tags = it->second;
        const auto& counts = freq[it->first];
        for (auto t = tags.begin(); t != tags.end();) {
          t = counts.at(*t) < options.min_frequency ? tags.erase(t) : std::next(t);
        }
        if (tags.empty()) {
          ++local.emptied_entries;
          it = item.tags.erase(it);
        } else {
          ++it;
        }
      }
    }
    std::erase_if(corpus.items,
                  [](const CorpusItem& item) { return item.tags.empty(); });
  }
  if (report) *report = local;
  return corpus;
}

AnnotationCorpus LoadCorpus(const std::filesystem::path& path,
                            const CorpusLoadOptions& options,
                            CorpusLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return ReadCorpus(in, options, report);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WriteCorpus(std::ostream& out, const AnnotationCorpus& corpus) {
  for (const auto& item : corpus.items) {
    for (const auto& [lang, tags] : item.tags) {
      out << item.id << '\t' << lang << '\t';
      bool first = true;
      for (const auto& t : tags) {
        out << (first ? "" : "|") << t;
        first = false;
      }
      out << '\n';
    }
  }
}

void SaveCorpus(const std::filesystem::path& path,
                const AnnotationCorpus& corpus) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  WriteCorpus(out, corpus);
}

namespace {

LanguageStats StatsFor(const std::vector<const CorpusItem*>& view,
                       const std::string& lang) {
  LanguageStats s;
  if (view.empty()) return s;
  std::set<std::string> unique;
  std::vector<double> sizes;
  for (const auto* item : view) {
    const auto& tags = item->tags.at(lang);
    unique.insert(tags.begin(), tags.end());
    sizes.push_back(static_cast<double>(tags.size()));
    s.tag_occurrences += tags.size();
  }
  s.unique_tags = unique.size();
  double mean = static_cast<double>(s.tag_occurrences) /
                static_cast<double>(sizes.size());
  double ss = 0.0;
  for (double x : sizes) ss += (x - mean) * (x - mean);
  s.mean_tags_per_item = mean;
  s.std_tags_per_item = std::sqrt(ss / static_cast<double>(sizes.size()));
  return s;
}

}  // namespace

CorpusStats ComputeCorpusStats(const AnnotationCorpus& corpus,
                               const std::string& source,
                               const std::string& target) {
  auto langs = corpus.Languages();
  for (const auto& l : {source, target}) {
    if (langs.count(l) == 0) {
      throw ValidationError("language '" + l + "' tags no corpus item");
    }
  }
  auto view = corpus.PairView(source, target);
  CorpusStats stats;
  stats.items = view.size();
  stats.source = StatsFor(view, source);
  stats.target = StatsFor(view, target);
  return stats;
}

std::string FileDigest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof(byte), "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

nlohmann::json RunManifest::ToJson() const {
  return {{"inputs", input_digests},
          {"parameters", parameters},
          {"tool_version", tool_version}};
}

RunManifest RunManifest::FromJson(const nlohmann::json& j) {
  RunManifest m;
  m.input_digests = j.at("inputs").get<std::map<std::string, std::string>>();
  m.parameters = j.at("parameters");
  m.tool_version = j.at("tool_version").get<std::string>();
  return m;
}

void WriteJson(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json ReadJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace tagmap
