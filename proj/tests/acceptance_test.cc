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

// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "tagmap/compose.h"
#include "tagmap/error.h"
#include "tagmap/eval.h"
#include "tagmap/mapping.h"
#include "tagmap/pipeline.h"
#include "tagmap/retrofit.h"
#include "tagmap/synth.h"
#include "test_util.h"

namespace tagmap {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using Vec = Eigen::VectorXd;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

double MaxDiff(const EmbeddingSet& a, const EmbeddingSet& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst,
                     (a.row(i) - b.at(a.key(i))).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

Outcome OracleEquivalence() {
  auto start = Clock::now();
  std::mt19937_64 rng(20260101);
  double worst = 0.0;
  for (int g = 0; g < 100; ++g) {
    auto inst = testing::RandomGraphInstance(rng, 50, 8);
    auto jac = JacobiRetrofit(inst.graph, inst.initial, inst.known,
                              {.tolerance = 1e-9, .max_iterations = 10000});
    auto direct = DirectSolve(inst.graph, inst.initial, inst.known);
    worst = std::max(worst, MaxDiff(direct, jac.embeddings));
  }
  double secs = Seconds(start);
  return {worst <= 1e-6 && secs < 30.0,
          "100 graphs, max |jacobi - direct| = " + Fmt("%.3g", worst) +
              " (tol 1e-6), " + Fmt("%.2f", secs) + " s (limit 30 s)"};
}

Outcome OrderInsensitivity() {
  std::mt19937_64 rng(424242);
  double worst = 0.0;
  bool all_converged = true;
  for (int g = 0; g < 10; ++g) {
    auto inst = testing::RandomGraphInstance(rng, 50, 8);
    auto problem = MakeProblem(inst.graph, inst.initial, inst.known);
    auto sync = JacobiRetrofit(problem, {.tolerance = 1e-10, .max_iterations = 100000});
    all_converged = all_converged && sync.report.converged;
    for (int p = 0; p < 20; ++p) {
      SolverOptions async{.tolerance = 1e-10, .max_iterations = 100000,
                          .order = UpdateOrder::kAsynchronous};
      async.permutation.resize(problem.graph.size());
      std::iota(async.permutation.begin(), async.permutation.end(), 0);
      std::shuffle(async.permutation.begin(), async.permutation.end(), rng);
      auto r = JacobiRetrofit(problem, async);
      all_converged = all_converged && r.report.converged;
      worst = std::max(worst, MaxDiff(sync.embeddings, r.embeddings));
    }
  }
  return {all_converged && worst <= 1e-6,
          "10 graphs x 20 orders, max |async - sync| = " + Fmt("%.3g", worst) +
              " (tol 1e-6)"};
}

// Components without a known concept, found by union-find over the edge list.
std::set<std::set<std::string>> EmptyComponents(const ConceptGraph& g,
                                                const ConceptSet& known) {
  std::vector<std::size_t> parent(g.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = root(parent[x]);
  };
  for (const auto& e : g.edges()) {
    parent[root(g.index(e.source))] = root(g.index(e.target));
  }
  std::map<std::size_t, std::set<std::string>> comps;
  for (std::size_t i = 0; i < g.size(); ++i) comps[root(i)].insert(g.concepts()[i]);
  std::set<std::set<std::string>> out;
  for (const auto& [r, members] : comps) {
    bool has = std::any_of(members.begin(), members.end(),
                           [&](const auto& m) { return known.count(m) != 0; });
    if (!has) out.insert(members);
  }
  return out;
}

Outcome FeasibilityPrecondition() {
  std::mt19937_64 rng(777);
  int infeasible = 0;
  bool ok = true;
  for (int g = 0; g < 200 && infeasible < 50; ++g) {
    auto inst = testing::RandomGraphInstance(rng, 30, 3, false);
    auto expected = EmptyComponents(inst.graph, inst.known);
    if (expected.empty()) continue;
    ++infeasible;
    auto report = CheckFeasible(inst.graph, inst.known);
    std::set<std::set<std::string>> reported;
    for (const auto& c : report.Offending()) {
      reported.insert({c.members.begin(), c.members.end()});
    }
    ok = ok && !report.feasible && reported == expected;
    try {
      JacobiRetrofit(inst.graph, inst.initial, inst.known);
      ok = false;
    } catch (const FeasibilityError&) {
    }
    auto known = inst.known;
    auto initial = inst.initial;
    for (const auto& members : expected) {
      known.insert(*members.begin());
      initial.Add(*members.begin(), testing::RandomVector(rng, initial.dim()));
    }
    ok = ok && CheckFeasible(inst.graph, known).feasible;
    try {
      JacobiRetrofit(inst.graph, initial, known);
    } catch (const Error&) {
      ok = false;
    }
  }
  return {ok && infeasible >= 50,
          std::to_string(infeasible) +
              " infeasible graphs: offending components exact, solver "
              "refused, one known vector per component flips the verdict"};
}

TokenTable SixTokens() {
  EmbeddingSet set(3);
  set.Add("rock", Vec::Unit(3, 0));
  set.Add("pop", Vec::Unit(3, 1));
  set.Add("jazz", Vec::Unit(3, 2));
  set.Add("hard", Eigen::Vector3d(1, 1, 0));
  set.Add("soft", Eigen::Vector3d(0, 1, 1));
  set.Add("free", Eigen::Vector3d(2, -1, 1));
  return TokenTable(std::move(set));
}

Outcome SifCorrectness() {
  auto table = SixTokens();
  std::vector<std::string> tags{"hard rock", "soft-pop", "free_jazz",
                                "Rock/Jazz/unknown"};
  // Straight-line evaluation: token -> (rank, vector) by hand.
  const double a = 1e-3;
  std::vector<std::vector<std::pair<int, Vec>>> toks = {
      {{4, Eigen::Vector3d(1, 1, 0)}, {1, Vec::Unit(3, 0)}},
      {{5, Eigen::Vector3d(0, 1, 1)}, {2, Vec::Unit(3, 1)}},
      {{6, Eigen::Vector3d(2, -1, 1)}, {3, Vec::Unit(3, 2)}},
      {{1, Vec::Unit(3, 0)}, {3, Vec::Unit(3, 2)}, {0, Vec::Zero(3)}},
  };
  Eigen::MatrixXd bar(4, 3);
  for (int i = 0; i < 4; ++i) {
    Vec sum = Vec::Zero(3);
    for (const auto& [rank, v] : toks[i]) {
      if (rank > 0) sum += a / (a + 1.0 / rank) * v;
    }
    bar.row(i) = sum.transpose() / static_cast<double>(toks[i].size());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(bar, Eigen::ComputeFullV);
  Vec u = svd.matrixV().col(0);
  Eigen::MatrixXd expected = bar - (bar * u) * u.transpose();
  auto got = BuildTagEmbeddings(tags, table, {.strategy = CompositionStrategy::kSif, .a = a});
  double sif_err = (got.vectors - expected).cwiseAbs().maxCoeff();

  double limit_err = 0.0;
  for (const auto& tag : tags) {
    auto tokens = PreprocessTag(tag);
    Vec avg = ComposeAverage(tokens, table);
    Vec sif = SifWeightedMean(tokens, table, 1e12);
    limit_err = std::max(limit_err, (sif - avg).norm() / avg.norm());
  }
  return {sif_err <= 1e-6 && limit_err <= 1e-6,
          "max entry error vs dense SVD = " + Fmt("%.3g", sif_err) +
              " (tol 1e-6), large-a relative error = " +
              Fmt("%.3g", limit_err) + " (tol 1e-6)"};
}

Outcome AucOracle() {
  std::vector<double> hs{0.9, 0.8, 0.3, 0.2};
  std::vector<std::uint8_t> hy{1, 0, 1, 0};
  bool hand = RocAuc(hs, hy) == std::optional<double>(0.75);
  std::mt19937_64 rng(5150);
  std::uniform_int_distribution<int> len(2, 200), coarse(0, 20);
  std::bernoulli_distribution coin(0.3);
  int exact = 0, checked = 0;
  while (checked < 50) {
    int n = len(rng);
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (int i = 0; i < n; ++i) {
      s[i] = coarse(rng) / 20.0;
      y[i] = coin(rng);
    }
    double wins = 0;
    std::size_t pairs = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!y[i] || y[j]) continue;
        ++pairs;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
    }
    if (pairs == 0) continue;
    ++checked;
    auto got = RocAuc(s, y);
    if (got && *got == wins / static_cast<double>(pairs)) ++exact;
  }
  return {hand && exact == 50,
          std::string("hand case ") + (hand ? "0.75" : "WRONG") + ", " +
              std::to_string(exact) + "/50 random instances exactly equal"};
}

Outcome StratifiedSplit() {
  std::vector<std::vector<std::size_t>> labels{
      {0}, {0, 1}, {0, 2}, {1}, {0, 1}, {2}, {0}, {1, 2}, {1}, {0}, {2}, {1}};
  auto folds = IterativeStratifiedSplit(labels, 3, 3, 7);
  bool deterministic = folds == IterativeStratifiedSplit(labels, 3, 3, 7);
  std::vector<std::vector<int>> count(3, std::vector<int>(3));
  std::vector<int> total(3);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (auto l : labels[i]) {
      ++count[folds[i]][l];
      ++total[l];
    }
  }
  double worst = 0.0;
  for (int f = 0; f < 3; ++f) {
    for (int l = 0; l < 3; ++l) {
      worst = std::max(worst, std::abs(count[f][l] - total[l] / 3.0));
    }
  }
  return {deterministic && worst <= 1.0,
          "max |fold count - proportional| = " + Fmt("%.3f", worst) +
              " (limit 1), deterministic: " + (deterministic ? "yes" : "no")};
}

Outcome SyntheticEndToEnd() {
  auto start = Clock::now();
  auto dir = fs::temp_directory_path() / "tagmap_acceptance_synth";
  fs::remove_all(dir);
  WriteSynthBundle(GenerateSynth({.tags = 50, .items = 200, .noise = 0.05, .seed = 7}), dir);
  auto config = LoadConfig(dir / "config.json");
  config.composition.strategy = CompositionStrategy::kSif;
  config.scorer = ScorerKind::kEmbedding;
  config.folds = 3;
  config.retrofit = RetrofitMode::kMonolingual;
  config.output_dir = "out_retrofit";
  double with = RunPipeline(config).mean_macro_auc;
  config.retrofit = RetrofitMode::kOff;
  config.output_dir = "out_off";
  double without = RunPipeline(config).mean_macro_auc;
  double secs = Seconds(start);
  return {with > 0.95 && without - with <= 0.02 && secs < 60.0,
          "macro-AUC retrofit " + Fmt("%.4f", with) + " (> 0.95), off " +
              Fmt("%.4f", without) + ", drop " + Fmt("%.4f", without - with) +
              " (<= 0.02), " + Fmt("%.2f", secs) + " s (limit 60 s)"};
}

Outcome FullScaleDocumented() {
  const char* root_env = std::getenv("TAGMAP_SOURCE_DIR");
  fs::path root = root_env ? root_env : ".";
  std::ifstream doc(root / "docs" / "experiments.md");
  if (!doc) return {false, "docs/experiments.md missing"};
  std::stringstream ss;
  ss << doc.rdbuf();
  const std::string text = ss.str();
  const std::vector<std::string> columns{
      "GTrans", "DBpSameAs", "FT_avg", "FT_sif", "mBERT_avg", "mBERT_sif",
      "XLM_avg", "XLM_sif", "XLM_Ctxt", "mBERT_Ctxt", "LASER",
      "Rfit_uΩ FT_sif", "DBp_aΩ NNDist", "Rfit_aΩ^en FT_sif",
      "Rfit_aΩ^source FT_sif", "Rfit_aΩ^target FT_sif", "Rfit_aΩ^ja FT_sif"};
  std::vector<std::string> missing;
  for (const auto& c : columns) {
    // Column names appear as the first cell of a table row.
    if (text.find("| " + c) == std::string::npos &&
        text.find(", " + c) == std::string::npos) {
      missing.push_back(c);
    }
  }
  std::set<std::string> referenced;
  std::regex ref("`([a-z_]+\\.json)`");
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("| ", 0) != 0) continue;  // table rows only
    for (auto it = std::sregex_iterator(line.begin(), line.end(), ref);
         it != std::sregex_iterator(); ++it) {
      referenced.insert((*it)[1]);
    }
  }
  std::size_t valid = 0;
  std::vector<std::string> problems;
  std::set<std::string> on_disk;
  for (const auto& entry : fs::directory_iterator(root / "configs" / "experiments")) {
    on_disk.insert(entry.path().filename().string());
  }
  for (const auto& name : referenced) {
    try {
      auto config = LoadConfig(root / "configs" / "experiments" / name);
      config.Validate();
      if (config.relation_classes) {
        LoadRelationClasses(config.Resolve(*config.relation_classes));
      }
      ++valid;
    } catch (const Error& e) {
      problems.push_back(name + ": " + e.what());
    }
  }
  bool covered = on_disk == referenced;

  // Inputs in the documented formats, as distributed.
  bool formats = true;
  try {
    std::istringstream vec("2 3 \nthe 0.1 -0.2 1e-320 \nrock 0.45 0 1 \n");
    formats = formats && ReadEmbeddings(vec).size() == 2;
    std::istringstream graph("nl:Rock\tmusicSubgenre\tnl:Hardrock\n"
                             "nl:Hardrock\twikiPageRedirects\tnl:Hard_rock\n");
    formats = formats && ReadGraph(graph, DefaultRelationClasses()).size() == 3;
    std::istringstream corpus("42\ten\trock|hard rock\n42\tnl\tRock\n");
    formats = formats && ReadCorpus(corpus, {.min_frequency = 1}).items.size() == 1;
  } catch (const Error&) {
    formats = false;
  }

  std::string detail = std::to_string(columns.size() - missing.size()) + "/" +
                       std::to_string(columns.size()) + " columns mapped, " +
                       std::to_string(valid) + "/" +
                       std::to_string(referenced.size()) +
                       " configs parse and validate, formats accepted: " +
                       (formats ? "yes" : "no") +
                       "; published numbers not reproducible without the "
                       "full-scale data (by design)";
  for (const auto& m : missing) detail += "\n    missing column " + m;
  for (const auto& p : problems) detail += "\n    " + p;
  if (!covered) detail += "\n    configs on disk and in the docs differ";
  return {missing.empty() && problems.empty() && covered && formats &&
              valid == referenced.size() && !referenced.empty(),
          detail};
}

Outcome ScalingInvariance() {
  auto bundle = GenerateSynth({.tags = 50, .items = 200, .seed = 7});
  auto compose = [](const std::vector<std::string>& tags, const EmbeddingSet& tokens,
                    const std::string& lang) {
    return BuildTagEmbeddings(tags, TokenTable(tokens), {})
        .ToEmbeddingSet(lang + ":");
  };
  auto src = compose(bundle.source_tags, bundle.source_tokens, "l1");
  auto tgt = compose(bundle.target_tags, bundle.target_tokens, "l2");
  auto scaled = [](const EmbeddingSet& set, double c) {
    EmbeddingSet out(set.dim());
    for (std::size_t i = 0; i < set.size(); ++i) {
      out.Add(set.key(i), c * set.row(i), set.known(i));
    }
    return out;
  };
  auto base = AnnotateCorpus(bundle.corpus, EmbeddingScorer{&src, &tgt}, "l1", "l2");
  auto base_auc = MacroAuc(base.scores, base.truth);
  double worst = 0.0;
  bool identical = true;
  for (double c : {0.5, 3.0, 1e-3, 1e4}) {
    auto s2 = scaled(src, c);
    auto t2 = scaled(tgt, c);
    for (const auto& [s, t] : {std::pair{&s2, &tgt}, std::pair{&src, &t2}}) {
      auto ann = AnnotateCorpus(bundle.corpus, EmbeddingScorer{s, t}, "l1", "l2");
      worst = std::max(worst, (ann.scores.values - base.scores.values).cwiseAbs().maxCoeff());
      auto auc = MacroAuc(ann.scores, ann.truth);
      for (std::size_t k = 0; k < auc.per_tag_auc.size(); ++k) {
        const auto& x = auc.per_tag_auc[k];
        const auto& y = base_auc.per_tag_auc[k];
        identical = identical && x.has_value() == y.has_value() &&
                    (!x || std::memcmp(&*x, &*y, sizeof(double)) == 0);
      }
    }
  }
  return {worst <= 1e-12 && identical,
          "max score change " + Fmt("%.3g", worst) +
              " (tol 1e-12), per-tag AUCs bit-identical: " +
              (identical ? "yes" : "no")};
}

}  // namespace
}  // namespace tagmap

int main() {
  using namespace tagmap;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle equivalence", OracleEquivalence},
      {"update-order insensitivity", OrderInsensitivity},
      {"feasibility precondition", FeasibilityPrecondition},
      {"SIF correctness", SifCorrectness},
      {"AUC oracle", AucOracle},
      {"stratified split", StratifiedSplit},
      {"synthetic end-to-end", SyntheticEndToEnd},
      {"full-scale inputs documented", FullScaleDocumented},
      {"scaling invariance", ScalingInvariance},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("Criterion %zu (%s): %s - %s\n", i + 1, criteria[i].first,
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
