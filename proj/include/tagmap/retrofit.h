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

#ifndef TAGMAP_RETROFIT_H_
#define TAGMAP_RETROFIT_H_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tagmap/embedding.h"
#include "tagmap/ontology.h"

namespace tagmap {

using ConceptSet = std::set<std::string>;

// Concepts of `set` flagged known.
ConceptSet KnownConcepts(const EmbeddingSet& set);

struct ComponentVerdict {
  std::size_t component = 0;
  std::vector<std::string> members;
  bool has_known = false;
};

struct FeasibilityReport {
  std::vector<ComponentVerdict> components;
  bool feasible = true;

  std::vector<ComponentVerdict> Offending() const;
  std::string Describe(std::size_t max_listed = 10) const;
};

// A unique retrofitting optimum exists iff every connected component holds
// at least one known concept.
FeasibilityReport CheckFeasible(const ConceptGraph& graph,
                                const ConceptSet& known);

// Which neighbours count toward degree(i) in the relatedness weight.
enum class DegreeMode { kAllNeighbors, kRelatednessOnly };

DegreeMode ParseDegreeMode(std::string_view name);

// alpha_i is 1 for known concepts and 0 otherwise. For every undirected
// neighbour pair, beta_ij = 1 when an equivalence edge joins them and
// 1/degree(i) otherwise. Non-adjacent pairs have beta 0.
struct RetrofitWeights {
  struct Link {
    std::size_t neighbor = 0;
    double beta_out = 0.0;  // beta_ij
    double beta_in = 0.0;   // beta_ji
    bool equivalence = false;

    double pair_weight() const { return beta_out + beta_in; }
  };

  std::vector<double> alpha;
  std::vector<std::vector<Link>> links;  // ascending by neighbor

  std::size_t size() const { return alpha.size(); }
  double beta(std::size_t i, std::size_t j) const;
};

RetrofitWeights BuildWeights(const ConceptGraph& graph,
                             const ConceptSet& known,
                             DegreeMode mode = DegreeMode::kAllNeighbors);

// A is diag(alpha). B is symmetric with B_ij = -(beta_ij + beta_ji)/2 off
// the diagonal and B_ii = sum_j |B_ij|. The objective's gradient vanishes
// where (A + 2B) Q = A Q_hat.
struct SystemMatrices {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
};

SystemMatrices BuildSystem(const RetrofitWeights& weights);

// Phi(Q) = sum_i alpha_i |q_i - qhat_i|^2
//        + sum over directed pairs (i, j) of beta_ij |q_i - q_j|^2,
// where every undirected neighbour pair carries both directions.
double ObjectiveValue(const RowMatrix& q, const RowMatrix& q_hat,
                      const RetrofitWeights& weights);

// A graph widened with every concept of an initial embedding set, and the
// initial matrix aligned to its concept order. Rows of unknown concepts
// are zero.
struct RetrofitProblem {
  ConceptGraph graph;
  RowMatrix initial;
  ConceptSet known;
  RetrofitWeights weights;
};

// `known` concepts must appear in `initial`; those whose initial vector is
// flagged unknown are demoted to alpha = 0.
RetrofitProblem MakeProblem(const ConceptGraph& graph,
                            const EmbeddingSet& initial,
                            const ConceptSet& known,
                            DegreeMode mode = DegreeMode::kAllNeighbors);

enum class UpdateOrder { kSynchronous, kAsynchronous };

struct SolverOptions {
  double tolerance = 1e-6;
  int max_iterations = 1000;
  DegreeMode degree = DegreeMode::kAllNeighbors;
  UpdateOrder order = UpdateOrder::kSynchronous;
  // Visiting order for asynchronous sweeps, as concept indices of the
  // problem graph. Empty means index order.
  std::vector<std::size_t> permutation;
  // Starting point; defaults to Q_hat with unknown rows at zero.
  std::optional<RowMatrix> start;
  // Evaluate Phi after every sweep and count increases.
  bool check_monotone = false;
  int jobs = 1;
};

struct SolverReport {
  int iterations = 0;
  double max_delta = 0.0;
  double objective_initial = 0.0;
  double objective_final = 0.0;
  bool converged = false;
  std::size_t components = 0;
  std::size_t monotone_violations = 0;
};

struct RetrofitResult {
  EmbeddingSet embeddings;  // every concept of the problem graph
  SolverReport report;
};

// Iterates q_i <- (sum_j (beta_ij + beta_ji) q_j + alpha_i qhat_i) /
//                 (sum_j (beta_ij + beta_ji) + alpha_i)
// per connected component until the largest coordinate change falls below
// the tolerance. Throws FeasibilityError listing components without a
// known concept.
RetrofitResult JacobiRetrofit(const RetrofitProblem& problem,
                              const SolverOptions& options = {});
RetrofitResult JacobiRetrofit(const ConceptGraph& graph,
                              const EmbeddingSet& initial,
                              const ConceptSet& known,
                              const SolverOptions& options = {});

// Dense per-component solve of (A + 2B) Q = A Q_hat.
EmbeddingSet DirectSolve(const RetrofitProblem& problem);
EmbeddingSet DirectSolve(const ConceptGraph& graph,
                         const EmbeddingSet& initial, const ConceptSet& known,
                         DegreeMode mode = DegreeMode::kAllNeighbors);

}  // namespace tagmap

#endif  // TAGMAP_RETROFIT_H_
