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

#include "tagmap/mapping.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "tagmap/error.h"
#include "tagmap/io.h"

namespace tagmap {

TagVocabulary::TagVocabulary(std::string language,
                             std::vector<std::string> tags)
    : language_(std::move(language)), tags_(std::move(tags)) {
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (!index_.emplace(tags_[i], i).second) {
      throw ValidationError("duplicate tag '" + tags_[i] + "' in vocabulary");
    }
  }
}

std::optional<std::size_t> TagVocabulary::find(std::string_view tag) const {
  auto it = index_.find(tag);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void TranslationTable::Add(const std::string& source,
                           const std::string& target) {
  auto [it, inserted] = entries_.emplace(source, target);
  if (!inserted && it->second != target) {
    throw ValidationError("tag '" + source + "' translates to both '" +
                          it->second + "' and '" + target + "'");
  }
}

std::optional<std::string> TranslationTable::Translate(
    std::string_view source) const {
  auto it = entries_.find(source);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

TranslationTable ReadTranslationTable(std::istream& in) {
  TranslationTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError("expected source_tag<TAB>target_tag", lineno);
    }
    auto source = line.substr(0, tab);
    auto target = line.substr(tab + 1);
    if (source.empty() || target.empty()) throw ParseError("empty tag", lineno);
    try {
      table.Add(source, target);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return table;
}

TranslationTable LoadTranslationTable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return ReadTranslationTable(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

double Cosine(const Eigen::Ref<const Eigen::VectorXd>& u,
              const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine of vectors with dimensions " +
                          std::to_string(u.size()) + " and " +
                          std::to_string(v.size()));
  }
  double nu = u.norm();
  double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.dot(v) / (nu * nv);
}

Eigen::VectorXd ScoreTargets(const std::vector<std::string>& source_keys,
                             const EmbeddingSet& source_embeddings,
                             const EmbeddingSet& target_embeddings,
                             const std::vector<std::string>& target_keys) {
  if (source_keys.empty()) throw ValidationError("no source tags to score");
  if (source_embeddings.dim() != target_embeddings.dim()) {
    throw ValidationError("source and target embeddings differ in dimension");
  }
  std::vector<std::size_t> targets;
  targets.reserve(target_keys.size());
  for (const auto& t : target_keys) targets.push_back(target_embeddings.index(t));

  Eigen::VectorXd scores =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(target_keys.size()));
  for (const auto& s : source_keys) {
    auto src = source_embeddings.at(s);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      scores[static_cast<Eigen::Index>(k)] +=
          Cosine(src, target_embeddings.row(targets[k]));
    }
  }
  return scores / static_cast<double>(source_keys.size());
}

Eigen::VectorXd TranslationScores(const std::vector<std::string>& source_tags,
                                  const TranslationTable& table,
                                  const TagVocabulary& vocabulary,
                                  std::size_t* untranslated) {
  Eigen::VectorXd scores =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocabulary.size()));
  std::size_t missing = 0;
  for (const auto& s : source_tags) {
    auto t = table.Translate(s);
    auto column = t ? vocabulary.find(*t) : std::nullopt;
    if (column) {
      scores[static_cast<Eigen::Index>(*column)] += 1.0;
    } else {
      ++missing;
    }
  }
  if (untranslated) *untranslated = missing;
  if (!source_tags.empty()) scores /= static_cast<double>(source_tags.size());
  return scores;
}

void WriteScoreMatrix(std::ostream& out, const ScoreMatrix& m) {
  out << "item";
  for (const auto& t : m.tags) out << '\t' << t;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.items.size(); ++i) {
    out << m.items[i];
    for (Eigen::Index k = 0; k < m.values.cols(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g",
                    m.values(static_cast<Eigen::Index>(i), k));
      out << '\t' << buf;
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

ScoreMatrix ReadScoreMatrix(std::istream& in) {
  ScoreMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing header row", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = SplitTabs(line);
  m.tags.assign(header.begin() + 1, header.end());
  if (m.tags.size() == 1 && m.tags[0].empty()) m.tags.clear();
  std::vector<double> data;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitTabs(line);
    if (fields.size() != m.tags.size() + 1) {
      throw FormatError("expected " + std::to_string(m.tags.size() + 1) +
                            " columns, got " + std::to_string(fields.size()),
                        lineno);
    }
    m.items.push_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      char* end = nullptr;
      double v = std::strtod(fields[k].c_str(), &end);
      if (end == fields[k].c_str() || *end != '\0') {
        throw FormatError("bad value '" + fields[k] + "'", lineno);
      }
      data.push_back(v);
    }
  }
  m.values = RowMatrix(static_cast<Eigen::Index>(m.items.size()),
                       static_cast<Eigen::Index>(m.tags.size()));
  if (!data.empty()) {
    m.values = Eigen::Map<RowMatrix>(data.data(), m.values.rows(),
                                     m.values.cols());
  }
  return m;
}

void SaveScoreMatrix(const std::filesystem::path& path, const ScoreMatrix& m) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  WriteScoreMatrix(out, m);
}

ScoreMatrix LoadScoreMatrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return ReadScoreMatrix(in);
  } catch (const ParseError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

TagVocabulary TargetVocabulary(const AnnotationCorpus& corpus,
                               const std::string& source_language,
                               const std::string& target_language) {
  std::set<std::string> tags;
  for (const auto* item : corpus.PairView(source_language, target_language)) {
    const auto& t = item->tags.at(target_language);
    tags.insert(t.begin(), t.end());
  }
  return TagVocabulary(target_language,
                       std::vector<std::string>(tags.begin(), tags.end()));
}

Annotation AnnotateCorpus(const AnnotationCorpus& corpus, const Scorer& scorer,
                          const std::string& source_language,
                          const std::string& target_language,
                          const TagVocabulary& vocabulary) {
  Annotation out;
  out.scores.tags = vocabulary.tags();
  out.truth.tags = vocabulary.tags();

  std::vector<std::string> target_keys;
  for (const auto& t : vocabulary.tags()) {
    target_keys.push_back(QualifiedName(target_language, t));
  }

  std::vector<Eigen::VectorXd> rows;
  std::vector<Eigen::VectorXd> truth_rows;
  for (const auto& item : corpus.items) {
    auto src = item.tags.find(source_language);
    auto tgt = item.tags.find(target_language);
    if (src == item.tags.end() || tgt == item.tags.end() ||
        src->second.empty() || tgt->second.empty()) {
      ++out.skipped_items;
      continue;
    }
    std::vector<std::string> sources(src->second.begin(), src->second.end());
    Eigen::VectorXd row;
    if (const auto* e = std::get_if<EmbeddingScorer>(&scorer)) {
      std::vector<std::string> keys;
      for (const auto& s : sources) keys.push_back(QualifiedName(source_language, s));
      row = ScoreTargets(keys, *e->source, *e->target, target_keys);
    } else if (const auto* t = std::get_if<TranslationScorer>(&scorer)) {
      std::size_t missing = 0;
      row = TranslationScores(sources, *t->table, vocabulary, &missing);
      out.untranslated_tags += missing;
    } else {
      const auto& g = std::get<GeodesicScorer>(scorer);
      std::vector<std::string> keys;
      for (const auto& s : sources) keys.push_back(QualifiedName(source_language, s));
      GeodesicDiagnostics diag;
      auto scores = GeodesicScores(*g.graph, keys, target_keys, &diag);
      out.missing_concepts += diag.missing_sources;
      row = Eigen::Map<Eigen::VectorXd>(scores.data(),
                                        static_cast<Eigen::Index>(scores.size()));
    }
    Eigen::VectorXd truth =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocabulary.size()));
    for (const auto& t : tgt->second) {
      if (auto col = vocabulary.find(t)) truth[static_cast<Eigen::Index>(*col)] = 1.0;
    }
    out.scores.items.push_back(item.id);
    out.truth.items.push_back(item.id);
    rows.push_back(std::move(row));
    truth_rows.push_back(std::move(truth));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(vocabulary.size());
  out.scores.values = RowMatrix(n, m);
  out.truth.values = RowMatrix(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.scores.values.row(i) = rows[static_cast<std::size_t>(i)].transpose();
    out.truth.values.row(i) = truth_rows[static_cast<std::size_t>(i)].transpose();
  }
  return out;
}

Annotation AnnotateCorpus(const AnnotationCorpus& corpus, const Scorer& scorer,
                          const std::string& source_language,
                          const std::string& target_language) {
  return AnnotateCorpus(corpus, scorer, source_language, target_language,
                        TargetVocabulary(corpus, source_language,
                                         target_language));
}

}  // namespace tagmap
