// Copyright 2026 The PGM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PGM_JUNCTION_TREE_HPP_
#define PGM_JUNCTION_TREE_HPP_

#include <vector>

#include "pgm/clique_vector.hpp"

namespace pgm {

struct TreeEdge {
  int first = 0;
  int second = 0;
  Clique separator;
};

// Size of a model over a clique set: what has to be held in memory to run
// belief propagation on it.
struct ModelSize {
  std::vector<double> clique_sizes;
  double parameter_count = 0.0;
  double peak_bytes = 0.0;
  // Attributes in the largest clique (treewidth + 1).
  std::size_t largest_clique = 0;
};

// Default refusal threshold on the total parameter count.
inline constexpr double kDefaultParameterCap = 5e7;

ModelSize model_size(const Domain& domain, const std::vector<Clique>& cliques);

// Throws FeasibilityError naming the largest clique when `size` exceeds the
// parameter cap.
void check_model_size(const Domain& domain, const std::vector<Clique>& cliques,
                      double parameter_cap = kDefaultParameterCap);

class JunctionTree {
 public:
  JunctionTree(DomainPtr domain, std::vector<Clique> cliques,
               std::vector<TreeEdge> edges, std::vector<int> elimination_order);

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  const std::vector<Clique>& cliques() const { return cliques_; }
  const std::vector<TreeEdge>& edges() const { return edges_; }
  const std::vector<int>& elimination_order() const { return elimination_order_; }

  // Smallest maximal clique containing `clique` (first on ties), or -1.
  int containing(const Clique& clique) const;

  ModelSize size() const { return model_size(*domain_, cliques_); }

  // Breadth-first order from clique 0; parents precede children.
  const std::vector<int>& schedule() const { return schedule_; }
  int parent(int node) const { return parent_[node]; }
  const std::vector<int>& children(int node) const { return children_[node]; }
  // Separator between `node` and its parent.
  const Clique& parent_separator(int node) const { return parent_sep_[node]; }

 private:
  DomainPtr domain_;
  std::vector<Clique> cliques_;
  std::vector<TreeEdge> edges_;
  std::vector<int> elimination_order_;
  std::vector<int> schedule_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<Clique> parent_sep_;
};

// Triangulates the union graph of `cliques` by greedy min-fill (ties broken
// by attribute order) and joins the maximal cliques with a maximum-weight
// spanning tree on separator size. Attributes in no input clique become
// singleton cliques.
JunctionTree build_junction_tree(DomainPtr domain,
                                 const std::vector<Clique>& cliques);

struct OracleResult {
  CliqueVector marginals;
  double log_partition = 0.0;
};

// Exact clique marginals (scaled to `total`) and log-partition of the model
// p(x) proportional to exp(sum_C theta_C(x_C)), by two-pass log-space belief
// propagation. `theta` must be keyed by exactly the tree's cliques.
OracleResult marginal_oracle(const JunctionTree& tree, const CliqueVector& theta,
                             double total);

// Shannon entropy of the junction-tree distribution with marginals `mu`:
// sum of clique entropies minus separator entropies. Each factor is
// normalised by its own sum.
double tree_entropy(const CliqueVector& mu, const JunctionTree& tree);

}  // namespace pgm

#endif  // PGM_JUNCTION_TREE_HPP_
