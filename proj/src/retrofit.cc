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

#include "tagmap/retrofit.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "tagmap/error.h"

namespace tagmap {

ConceptSet KnownConcepts(const EmbeddingSet& set) {
  ConceptSet known;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.known(i)) known.insert(set.key(i));
  }
  return known;
}

std::vector<ComponentVerdict> FeasibilityReport::Offending() const {
  std::vector<ComponentVerdict> out;
  for (const auto& c : components) {
    if (!c.has_known) out.push_back(c);
  }
  return out;
}

std::string FeasibilityReport::Describe(std::size_t max_listed) const {
  auto bad = Offending();
  std::ostringstream os;
  os << bad.size() << " of " << components.size()
     << " connected components have no known vector";
  std::size_t listed = 0;
  for (const auto& c : bad) {
    if (listed++ == max_listed) {
      os << "; ...";
      break;
    }
    os << "; component " << c.component << " {";
    for (std::size_t k = 0; k < c.members.size() && k < 5; ++k) {
      os << (k ? ", " : "") << c.members[k];
    }
    if (c.members.size() > 5) os << ", ... (" << c.members.size() << ")";
    os << "}";
  }
  return os.str();
}

FeasibilityReport CheckFeasible(const ConceptGraph& graph,
                                const ConceptSet& known) {
  auto index = ConnectedComponents(graph);
  FeasibilityReport report;
  report.components.resize(index.component_count);
  for (std::size_t c = 0; c < index.component_count; ++c) {
    report.components[c].component = c;
  }
  for (std::size_t i = 0; i < graph.size(); ++i) {
    auto& verdict = report.components[index.component_of[i]];
    verdict.members.push_back(graph.concepts()[i]);
    if (known.count(graph.concepts()[i]) != 0) verdict.has_known = true;
  }
  for (const auto& c : report.components) {
    report.feasible = report.feasible && c.has_known;
  }
  return report;
}

DegreeMode ParseDegreeMode(std::string_view name) {
  if (name == "all") return DegreeMode::kAllNeighbors;
  if (name == "relatedness") return DegreeMode::kRelatednessOnly;
  throw ValidationError("unknown degree mode '" + std::string(name) +
                        "' (expected all or relatedness)");
}

double RetrofitWeights::beta(std::size_t i, std::size_t j) const {
  const auto& l = links[i];
  auto it = std::lower_bound(
      l.begin(), l.end(), j,
      [](const Link& link, std::size_t n) { return link.neighbor < n; });
  if (it == l.end() || it->neighbor != j) return 0.0;
  return it->beta_out;
}

RetrofitWeights BuildWeights(const ConceptGraph& graph,
                             const ConceptSet& known, DegreeMode mode) {
  const std::size_t n = graph.size();
  RetrofitWeights w;
  w.alpha.assign(n, 0.0);
  w.links.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (known.count(graph.concepts()[i]) != 0) w.alpha[i] = 1.0;
  }

  std::vector<std::size_t> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : graph.neighbors(i)) {
      if (mode == DegreeMode::kAllNeighbors || !graph.IsEquivalencePair(i, j)) {
        ++degree[i];
      }
    }
  }
  auto directed = [&](std::size_t i, std::size_t j) {
    if (graph.IsEquivalencePair(i, j)) return 1.0;
    return 1.0 / static_cast<double>(degree[i]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : graph.neighbors(i)) {
      w.links[i].push_back({j, directed(i, j), directed(j, i),
                            graph.IsEquivalencePair(i, j)});
    }
  }
  return w;
}

SystemMatrices BuildSystem(const RetrofitWeights& weights) {
  const auto n = static_cast<Eigen::Index>(weights.size());
  SystemMatrices m;
  m.a = Eigen::MatrixXd::Zero(n, n);
  m.b = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.a(i, i) = weights.alpha[static_cast<std::size_t>(i)];
    for (const auto& link : weights.links[static_cast<std::size_t>(i)]) {
      m.b(i, static_cast<Eigen::Index>(link.neighbor)) =
          -0.5 * link.pair_weight();
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    m.b(i, i) = m.b.row(i).cwiseAbs().sum();
  }
  return m;
}

double ObjectiveValue(const RowMatrix& q, const RowMatrix& q_hat,
                      const RetrofitWeights& weights) {
  const auto n = static_cast<Eigen::Index>(weights.size());
  if (q.rows() != n || q_hat.rows() != n || q.cols() != q_hat.cols()) {
    throw ValidationError("objective: matrix shapes do not match the weights");
  }
  double value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (weights.alpha[ui] != 0.0) {
      value += weights.alpha[ui] * (q.row(i) - q_hat.row(i)).squaredNorm();
    }
    for (const auto& link : weights.links[ui]) {
      if (link.neighbor <= ui) continue;
      value += link.pair_weight() *
               (q.row(i) - q.row(static_cast<Eigen::Index>(link.neighbor)))
                   .squaredNorm();
    }
  }
  return value;
}

RetrofitProblem MakeProblem(const ConceptGraph& graph,
                            const EmbeddingSet& initial,
                            const ConceptSet& known, DegreeMode mode) {
  for (const auto& k : known) {
    if (!initial.contains(k)) {
      throw ValidationError("known concept '" + k +
                            "' has no initial embedding");
    }
  }
  std::vector<std::string> concepts = graph.concepts();
  for (const auto& key : initial.keys()) {
    if (!graph.contains(key)) concepts.push_back(key);
  }
  RetrofitProblem p;
  p.graph = concepts.size() == graph.size()
                ? graph
                : ConceptGraph::Build(concepts, graph.edges(),
                                      graph.relation_classes());
  p.initial = RowMatrix::Zero(static_cast<Eigen::Index>(p.graph.size()),
                              static_cast<Eigen::Index>(initial.dim()));
  for (const auto& k : known) {
    auto src = initial.index(k);
    if (!initial.known(src)) continue;
    p.known.insert(k);
    p.initial.row(static_cast<Eigen::Index>(p.graph.index(k))) =
        initial.row(src).transpose();
  }
  p.weights = BuildWeights(p.graph, p.known, mode);
  return p;
}

namespace {

void RequireFeasible(const RetrofitProblem& problem) {
  auto report = CheckFeasible(problem.graph, problem.known);
  if (!report.feasible) {
    throw FeasibilityError("retrofitting is ill-posed: " + report.Describe());
  }
}

// Runs fn(c) for every component c on up to `jobs` threads.
template <typename Fn>
void ForEachComponent(std::size_t count, int jobs, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count < 2) {
    for (std::size_t c = 0; c < count; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (auto c = next++; c < count; c = next++) fn(c);
    });
  }
  for (auto& t : pool) t.join();
}

struct ComponentOutcome {
  int iterations = 0;
  double max_delta = 0.0;
  bool converged = false;
  std::size_t monotone_violations = 0;
};

double ComponentObjective(const std::vector<std::size_t>& members,
                          const RowMatrix& q, const RowMatrix& q_hat,
                          const RetrofitWeights& w) {
  double value = 0.0;
  for (auto i : members) {
    const auto ri = static_cast<Eigen::Index>(i);
    if (w.alpha[i] != 0.0) {
      value += w.alpha[i] * (q.row(ri) - q_hat.row(ri)).squaredNorm();
    }
    for (const auto& link : w.links[i]) {
      if (link.neighbor <= i) continue;
      value += link.pair_weight() *
               (q.row(ri) - q.row(static_cast<Eigen::Index>(link.neighbor)))
                   .squaredNorm();
    }
  }
  return value;
}

ComponentOutcome SolveComponent(const std::vector<std::size_t>& members,
                                const RetrofitProblem& problem,
                                const SolverOptions& options, RowMatrix& q) {
  const auto& w = problem.weights;
  const auto& q_hat = problem.initial;
  const auto dim = q.cols();
  ComponentOutcome out;

  std::vector<double> denominator(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) {
    auto i = members[k];
    double d = w.alpha[i];
    for (const auto& link : w.links[i]) d += link.pair_weight();
    denominator[k] = d;
  }

  auto update = [&](std::size_t k, const RowMatrix& from) {
    auto i = members[k];
    Eigen::RowVectorXd acc = w.alpha[i] * q_hat.row(static_cast<Eigen::Index>(i));
    for (const auto& link : w.links[i]) {
      acc += link.pair_weight() *
             from.row(static_cast<Eigen::Index>(link.neighbor));
    }
    return Eigen::RowVectorXd(acc / denominator[k]);
  };

  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.order == UpdateOrder::kAsynchronous &&
      !options.permutation.empty()) {
    std::vector<std::size_t> position(problem.graph.size(), 0);
    for (std::size_t p = 0; p < options.permutation.size(); ++p) {
      position[options.permutation[p]] = p;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return position[members[x]] < position[members[y]];
    });
  }

  RowMatrix next;
  if (options.order == UpdateOrder::kSynchronous) {
    next = RowMatrix(static_cast<Eigen::Index>(members.size()), dim);
  }
  double previous = options.check_monotone
                        ? ComponentObjective(members, q, q_hat, w)
                        : 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    double delta = 0.0;
    if (options.order == UpdateOrder::kSynchronous) {
      for (std::size_t k = 0; k < members.size(); ++k) {
        next.row(static_cast<Eigen::Index>(k)) = update(k, q);
      }
      for (std::size_t k = 0; k < members.size(); ++k) {
        auto row = static_cast<Eigen::Index>(members[k]);
        delta = std::max(delta,
                         (next.row(static_cast<Eigen::Index>(k)) - q.row(row))
                             .lpNorm<Eigen::Infinity>());
        q.row(row) = next.row(static_cast<Eigen::Index>(k));
      }
    } else {
      for (auto k : order) {
        auto row = static_cast<Eigen::Index>(members[k]);
        Eigen::RowVectorXd v = update(k, q);
        delta = std::max(delta, (v - q.row(row)).lpNorm<Eigen::Infinity>());
        q.row(row) = v;
      }
    }
    out.iterations = it;
    out.max_delta = delta;
    if (options.check_monotone) {
      double current = ComponentObjective(members, q, q_hat, w);
      if (current > previous * (1.0 + 1e-12) + 1e-300) {
        ++out.monotone_violations;
      }
      previous = current;
    }
    if (delta < options.tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

EmbeddingSet ToEmbeddings(const ConceptGraph& graph, const RowMatrix& q) {
  EmbeddingSet set(static_cast<std::size_t>(q.cols()));
  for (std::size_t i = 0; i < graph.size(); ++i) {
    Eigen::VectorXd v = q.row(static_cast<Eigen::Index>(i)).transpose();
    set.Add(graph.concepts()[i], v, !v.isZero(0.0));
  }
  return set;
}

}  // namespace

RetrofitResult JacobiRetrofit(const RetrofitProblem& problem,
                              const SolverOptions& options) {
  if (!(options.tolerance > 0)) {
    throw ValidationError("solver tolerance must be positive");
  }
  if (options.max_iterations < 1) {
    throw ValidationError("max_iterations must be at least 1");
  }
  RequireFeasible(problem);

  RowMatrix q = problem.initial;
  if (options.start) {
    if (options.start->rows() != q.rows() || options.start->cols() != q.cols()) {
      throw ValidationError("start matrix shape does not match the problem");
    }
    q = *options.start;
  }
  if (!options.permutation.empty() &&
      options.permutation.size() != problem.graph.size()) {
    throw ValidationError("update permutation must cover every concept");
  }

  auto members = ConnectedComponents(problem.graph).Members();
  std::vector<ComponentOutcome> outcomes(members.size());

  RetrofitResult result;
  result.report.objective_initial =
      ObjectiveValue(q, problem.initial, problem.weights);
  ForEachComponent(members.size(), options.jobs, [&](std::size_t c) {
    outcomes[c] = SolveComponent(members[c], problem, options, q);
  });

  auto& report = result.report;
  report.components = members.size();
  report.converged = true;
  for (const auto& o : outcomes) {
    report.iterations = std::max(report.iterations, o.iterations);
    report.max_delta = std::max(report.max_delta, o.max_delta);
    report.converged = report.converged && o.converged;
    report.monotone_violations += o.monotone_violations;
  }
  report.objective_final = ObjectiveValue(q, problem.initial, problem.weights);
  result.embeddings = ToEmbeddings(problem.graph, q);
  return result;
}

RetrofitResult JacobiRetrofit(const ConceptGraph& graph,
                              const EmbeddingSet& initial,
                              const ConceptSet& known,
                              const SolverOptions& options) {
  return JacobiRetrofit(MakeProblem(graph, initial, known, options.degree),
                        options);
}

EmbeddingSet DirectSolve(const RetrofitProblem& problem) {
  RequireFeasible(problem);
  const auto& w = problem.weights;
  RowMatrix q = RowMatrix::Zero(problem.initial.rows(), problem.initial.cols());
  for (const auto& members : ConnectedComponents(problem.graph).Members()) {
    const auto m = static_cast<Eigen::Index>(members.size());
    std::vector<Eigen::Index> local(problem.graph.size(), -1);
    for (Eigen::Index k = 0; k < m; ++k) {
      local[members[static_cast<std::size_t>(k)]] = k;
    }
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd rhs(m, problem.initial.cols());
    for (Eigen::Index k = 0; k < m; ++k) {
      auto i = members[static_cast<std::size_t>(k)];
      system(k, k) = w.alpha[i];
      for (const auto& link : w.links[i]) {
        // 2B: off-diagonal -(beta_ij + beta_ji), diagonal the row sum.
        system(k, local[link.neighbor]) -= link.pair_weight();
        system(k, k) += link.pair_weight();
      }
      rhs.row(k) = w.alpha[i] * problem.initial.row(static_cast<Eigen::Index>(i));
    }
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) {
      throw FeasibilityError(
          "retrofitting system is singular; some component lacks a known "
          "vector");
    }
    Eigen::MatrixXd sol = llt.solve(rhs);
    for (Eigen::Index k = 0; k < m; ++k) {
      q.row(static_cast<Eigen::Index>(members[static_cast<std::size_t>(k)])) =
          sol.row(k);
    }
  }
  return ToEmbeddings(problem.graph, q);
}

EmbeddingSet DirectSolve(const ConceptGraph& graph,
                         const EmbeddingSet& initial, const ConceptSet& known,
                         DegreeMode mode) {
  return DirectSolve(MakeProblem(graph, initial, known, mode));
}

}  // namespace tagmap
