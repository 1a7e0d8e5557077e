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

#include "tagmap/synth.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"
#include "tagmap/error.h"

namespace tagmap {

namespace fs = std::filesystem;

void SynthOptions::Validate() const {
  if (tags < 2) throw ValidationError("synth: need at least 2 tags");
  if (items < tags) {
    throw ValidationError("synth: items must be at least the tag count");
  }
  if (dim < 2) throw ValidationError("synth: dim must be at least 2");
  if (!(noise >= 0)) throw ValidationError("synth: noise must be >= 0");
  if (vocabulary != 0 && vocabulary < 3) {
    throw ValidationError("synth: vocabulary must be at least 3");
  }
  if (!(alias_fraction >= 0 && alias_fraction <= 1)) {
    throw ValidationError("synth: alias_fraction must lie in [0, 1]");
  }
  if (source_language.empty() || target_language.empty() ||
      source_language == target_language) {
    throw ValidationError("synth: need two distinct language ids");
  }
}

namespace {

std::string Numbered(const char* stem, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03zu", stem, n);
  return buf;
}

template <typename Rng>
std::size_t Draw(Rng& rng, std::initializer_list<double> weights) {
  std::discrete_distribution<std::size_t> d(weights);
  return d(rng);
}

}  // namespace

SynthBundle GenerateSynth(const SynthOptions& options) {
  options.Validate();
  SynthBundle b;
  b.options = options;
  const std::size_t vocab =
      options.vocabulary ? options.vocabulary : 3 * options.tags;
  const auto dim = static_cast<Eigen::Index>(options.dim);
  const auto& src = options.source_language;
  const auto& tgt = options.target_language;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    }
    return m;
  };

  Eigen::MatrixXd rotation =
      Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(dim, dim)).householderQ();
  b.source_tokens = EmbeddingSet(options.dim);
  b.target_tokens = EmbeddingSet(options.dim);
  for (std::size_t t = 0; t < vocab; ++t) {
    Eigen::VectorXd v = gaussian(dim, 1).col(0);
    Eigen::VectorXd image = rotation * v + options.noise * gaussian(dim, 1).col(0);
    b.source_tokens.Add(Numbered("tok", t), v);
    b.target_tokens.Add(Numbered("mot", t), rotation.transpose() * image);
  }

  std::vector<std::vector<std::size_t>> tag_tokens;
  std::set<std::vector<std::size_t>> used;
  std::uniform_int_distribution<std::size_t> pick_token(0, vocab - 1);
  while (tag_tokens.size() < options.tags) {
    std::size_t m = 1 + Draw(rng, {0.3, 0.5, 0.2});
    std::vector<std::size_t> toks;
    while (toks.size() < m) {
      auto t = pick_token(rng);
      if (std::find(toks.begin(), toks.end(), t) == toks.end()) toks.push_back(t);
    }
    auto key = toks;
    std::sort(key.begin(), key.end());
    if (!used.insert(key).second) continue;
    tag_tokens.push_back(toks);
  }
  for (const auto& toks : tag_tokens) {
    std::string s;
    std::string t;
    for (std::size_t k = 0; k < toks.size(); ++k) {
      s += (k ? "_" : "") + Numbered("tok", toks[k]);
      t += (k ? " " : "") + Numbered("mot", toks[k]);
    }
    t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
    b.source_tags.push_back(s);
    b.target_tags.push_back(t);
  }

  // Identical structure in both languages: sub-genre links between tags
  // sharing a token, a few origin links, and redirects from aliases whose
  // tokens are out of vocabulary.
  auto add_both = [&](const std::string& rel, std::size_t i, std::size_t j) {
    b.source_edges.push_back({QualifiedName(src, b.source_tags[i]), rel,
                              QualifiedName(src, b.source_tags[j])});
    b.target_edges.push_back({QualifiedName(tgt, b.target_tags[i]), rel,
                              QualifiedName(tgt, b.target_tags[j])});
  };
  for (std::size_t i = 1; i < options.tags; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      bool shares = std::any_of(
          tag_tokens[i].begin(), tag_tokens[i].end(), [&](std::size_t t) {
            return std::find(tag_tokens[j].begin(), tag_tokens[j].end(), t) !=
                   tag_tokens[j].end();
          });
      if (shares) {
        add_both("musicSubgenre", i, j);
        break;
      }
    }
  }
  std::uniform_int_distribution<std::size_t> pick_tag(0, options.tags - 1);
  for (std::size_t e = 0; e < options.tags / 10; ++e) {
    auto i = pick_tag(rng);
    auto j = pick_tag(rng);
    if (i != j) add_both("stylisticOrigin", i, j);
  }
  std::bernoulli_distribution alias(options.alias_fraction);
  for (std::size_t i = 0; i < options.tags; ++i) {
    if (!alias(rng)) continue;
    b.source_edges.push_back({QualifiedName(src, Numbered("alias_q", i)),
                              "wikiPageRedirects",
                              QualifiedName(src, b.source_tags[i])});
    b.target_edges.push_back({QualifiedName(tgt, Numbered("alias_r", i)),
                              "wikiPageRedirects",
                              QualifiedName(tgt, b.target_tags[i])});
  }
  for (std::size_t i = 0; i < options.tags; ++i) {
    b.alignment.emplace_back(QualifiedName(src, b.source_tags[i]),
                             QualifiedName(tgt, b.target_tags[i]));
  }

  for (std::size_t n = 0; n < options.items; ++n) {
    std::size_t k = 1 + Draw(rng, {0.5, 0.35, 0.15});
    std::set<std::size_t> chosen;
    if (n < options.tags) chosen.insert(n);
    while (chosen.size() < k) chosen.insert(pick_tag(rng));
    CorpusItem item{Numbered("item", n), {}};
    for (auto i : chosen) {
      item.tags[src].insert(b.source_tags[i]);
      item.tags[tgt].insert(b.target_tags[i]);
    }
    b.corpus.items.push_back(std::move(item));
  }
  return b;
}

void WriteSynthBundle(const SynthBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& o = bundle.options;
  SaveEmbeddings(dir / (o.source_language + ".vec"), bundle.source_tokens);
  SaveEmbeddings(dir / (o.target_language + ".vec"), bundle.target_tokens);
  auto write_edges = [&](const std::string& lang,
                         const std::vector<Edge>& edges) {
    std::ofstream out(dir / (lang + ".graph.tsv"));
    for (const auto& e : edges) {
      out << e.source << '\t' << e.relation << '\t' << e.target << '\n';
    }
  };
  write_edges(o.source_language, bundle.source_edges);
  write_edges(o.target_language, bundle.target_edges);
  {
    std::ofstream out(dir / "alignment.tsv");
    for (const auto& [s, t] : bundle.alignment) out << s << '\t' << t << '\n';
  }
  {
    std::ofstream out(dir / "mapping.tsv");
    for (std::size_t i = 0; i < bundle.source_tags.size(); ++i) {
      out << bundle.source_tags[i] << '\t' << bundle.target_tags[i] << '\n';
    }
  }
  SaveCorpus(dir / "corpus.tsv", bundle.corpus);

  nlohmann::json config = {
      {"languages",
       {{o.source_language,
         {{"tokens", o.source_language + ".vec"},
          {"graph", o.source_language + ".graph.tsv"}}},
        {o.target_language,
         {{"tokens", o.target_language + ".vec"},
          {"graph", o.target_language + ".graph.tsv"}}}}},
      {"alignment", "alignment.tsv"},
      {"corpus", "corpus.tsv"},
      {"translation_table", "mapping.tsv"},
      {"source_language", o.source_language},
      {"target_language", o.target_language},
      {"composition", {{"strategy", "sif"}, {"a", 1e-3}}},
      {"scorer", "embedding"},
      {"retrofit",
       {{"mode", "monolingual"},
        {"known_languages", {o.source_language}},
        {"tol", 1e-6},
        {"max_iter", 1000}}},
      {"eval", {{"k", 3}, {"seed", o.seed}}},
      {"output_dir", "out"},
  };
  WriteJson(dir / "config.json", config);
}

}  // namespace tagmap
