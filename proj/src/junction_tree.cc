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

#include "pgm/junction_tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>
#include <tuple>

#include "pgm/errors.hpp"

namespace pgm {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<int> parent_;
};

// Greedy min-fill elimination. Returns the elimination cliques in order and
// writes the order itself to `order`.
std::vector<Clique> eliminate_min_fill(int d, const std::vector<Clique>& cliques,
                                       std::vector<int>& order) {
  std::vector<std::vector<char>> adj(d, std::vector<char>(d, 0));
  for (const auto& c : cliques) {
    for (int a : c) {
      for (int b : c) {
        if (a != b) adj[a][b] = 1;
      }
    }
  }
  std::vector<char> alive(d, 1);
  std::vector<Clique> out;
  order.clear();
  for (int step = 0; step < d; ++step) {
    int best = -1;
    long best_fill = 0;
    for (int v = 0; v < d; ++v) {
      if (!alive[v]) continue;
      std::vector<int> nbrs;
      for (int u = 0; u < d; ++u) {
        if (alive[u] && adj[v][u]) nbrs.push_back(u);
      }
      long fill = 0;
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
          if (!adj[nbrs[i]][nbrs[j]]) ++fill;
        }
      }
      if (best < 0 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }
    std::vector<int> members{best};
    for (int u = 0; u < d; ++u) {
      if (alive[u] && adj[best][u]) members.push_back(u);
    }
    for (int a : members) {
      for (int b : members) {
        if (a != b) adj[a][b] = 1;
      }
    }
    alive[best] = 0;
    order.push_back(best);
    out.emplace_back(std::move(members));
  }
  return out;
}

}  // namespace

ModelSize model_size(const Domain& domain, const std::vector<Clique>& cliques) {
  ModelSize size;
  for (const auto& c : cliques) {
    const double n = domain.clique_size(c);
    size.clique_sizes.push_back(n);
    size.parameter_count += n;
    size.largest_clique = std::max(size.largest_clique, c.size());
  }
  // theta, mu, one belief and one gradient buffer per clique, plus messages.
  size.peak_bytes = 8.0 * 5.0 * size.parameter_count;
  return size;
}

void check_model_size(const Domain& domain, const std::vector<Clique>& cliques,
                      double parameter_cap) {
  const ModelSize size = model_size(domain, cliques);
  if (size.parameter_count <= parameter_cap) return;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < cliques.size(); ++i) {
    if (size.clique_sizes[i] > size.clique_sizes[worst]) worst = i;
  }
  std::ostringstream msg;
  msg << "model needs " << size.parameter_count << " parameters (cap "
      << parameter_cap << "); largest clique "
      << to_string(domain, cliques[worst]) << " has "
      << size.clique_sizes[worst] << " cells";
  throw FeasibilityError(msg.str());
}

JunctionTree::JunctionTree(DomainPtr domain, std::vector<Clique> cliques,
                           std::vector<TreeEdge> edges,
                           std::vector<int> elimination_order)
    : domain_(std::move(domain)),
      cliques_(std::move(cliques)),
      edges_(std::move(edges)),
      elimination_order_(std::move(elimination_order)) {
  const int n = static_cast<int>(cliques_.size());
  if (n == 0) throw CliqueError("junction tree needs at least one clique");
  if (static_cast<int>(edges_.size()) != n - 1) {
    throw CliqueError("junction tree edge count must be cliques - 1");
  }
  std::vector<std::vector<std::pair<int, const Clique*>>> adj(n);
  for (const auto& e : edges_) {
    adj[e.first].push_back({e.second, &e.separator});
    adj[e.second].push_back({e.first, &e.separator});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end(), [](auto& x, auto& y) {
    return x.first < y.first;
  });
  parent_.assign(n, -1);
  children_.assign(n, {});
  parent_sep_.assign(n, Clique{});
  std::vector<char> seen(n, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    schedule_.push_back(v);
    for (const auto& [u, sep] : adj[v]) {
      if (seen[u]) continue;
      seen[u] = 1;
      parent_[u] = v;
      parent_sep_[u] = *sep;
      children_[v].push_back(u);
      queue.push_back(u);
    }
  }
  if (static_cast<int>(schedule_.size()) != n) {
    throw CliqueError("junction tree edges do not connect every clique");
  }
}

int JunctionTree::containing(const Clique& clique) const {
  int best = -1;
  double best_size = 0.0;
  for (std::size_t i = 0; i < cliques_.size(); ++i) {
    if (!clique.is_subset_of(cliques_[i])) continue;
    const double s = domain_->clique_size(cliques_[i]);
    if (best < 0 || s < best_size) {
      best = static_cast<int>(i);
      best_size = s;
    }
  }
  return best;
}

JunctionTree build_junction_tree(DomainPtr domain,
                                 const std::vector<Clique>& cliques) {
  const int d = static_cast<int>(domain->size());
  for (const auto& c : cliques) {
    if (!c.empty() && c.attrs().back() >= d) {
      throw CliqueError("clique refers to an attribute outside the domain");
    }
  }
  std::vector<int> order;
  std::vector<Clique> elim = eliminate_min_fill(d, cliques, order);

  // Keep maximal elimination cliques only; first occurrence wins on ties.
  std::vector<Clique> maximal;
  for (std::size_t i = 0; i < elim.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < elim.size() && !dominated; ++j) {
      if (i == j || !elim[i].is_subset_of(elim[j])) continue;
      dominated = elim[i] != elim[j] || j < i;
    }
    if (!dominated) maximal.push_back(elim[i]);
  }
  if (maximal.empty()) maximal.push_back(Clique{});
  std::sort(maximal.begin(), maximal.end());

  const int n = static_cast<int>(maximal.size());
  std::vector<std::tuple<int, int, int>> candidates;  // (-weight, i, j)
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int w = static_cast<int>(maximal[i].intersected(maximal[j]).size());
      candidates.emplace_back(-w, i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  DisjointSets sets(n);
  std::vector<TreeEdge> edges;
  for (const auto& [w, i, j] : candidates) {
    if (sets.join(i, j)) {
      edges.push_back({i, j, maximal[i].intersected(maximal[j])});
      if (static_cast<int>(edges.size()) == n - 1) break;
    }
  }
  return JunctionTree(std::move(domain), std::move(maximal), std::move(edges),
                      std::move(order));
}

OracleResult marginal_oracle(const JunctionTree& tree, const CliqueVector& theta,
                             double total) {
  const auto& cliques = tree.cliques();
  const int n = static_cast<int>(cliques.size());
  if (theta.size() != cliques.size()) {
    throw ParameterMismatchError("parameter vector has " +
                                 std::to_string(theta.size()) +
                                 " cliques, junction tree has " +
                                 std::to_string(n));
  }
  for (const auto& c : cliques) {
    if (!theta.contains(c)) {
      throw ParameterMismatchError("parameter vector lacks junction-tree clique " +
                                   to_string(tree.domain(), c));
    }
    if (theta.at(c).space() != Space::kLog) {
      throw ParameterMismatchError("parameters must be in log space");
    }
  }

  const auto& schedule = tree.schedule();
  std::vector<Factor> up(n), down(n);

  // Collect: leaves towards the root.
  for (auto it = schedule.rbegin(); it != schedule.rend(); ++it) {
    const int v = *it;
    if (tree.parent(v) < 0) continue;
    Factor belief = theta.at(cliques[v]);
    for (int c : tree.children(v)) belief = factor_product(belief, up[c]);
    up[v] = factor_logsumexp(belief, tree.parent_separator(v));
  }
  // Distribute: root towards the leaves.
  for (int v : schedule) {
    const auto& kids = tree.children(v);
    for (int c : kids) {
      Factor belief = theta.at(cliques[v]);
      if (tree.parent(v) >= 0) belief = factor_product(belief, down[v]);
      for (int k : kids) {
        if (k != c) belief = factor_product(belief, up[k]);
      }
      down[c] = factor_logsumexp(belief, tree.parent_separator(c));
    }
  }

  OracleResult result;
  for (int v = 0; v < n; ++v) {
    Factor belief = theta.at(cliques[v]);
    if (tree.parent(v) >= 0) belief = factor_product(belief, down[v]);
    for (int c : tree.children(v)) belief = factor_product(belief, up[c]);
    auto [mu, log_z] = log_normalize(belief, total);
    if (v == schedule.front()) result.log_partition = log_z;
    result.marginals.insert(std::move(mu));
  }
  return result;
}

double tree_entropy(const CliqueVector& mu, const JunctionTree& tree) {
  double h = 0.0;
  for (const auto& c : tree.cliques()) h += entropy(mu.at(c));
  const double scale = mu.at(tree.cliques().front()).sum();
  for (const auto& e : tree.edges()) {
    const Factor a = factor_project(mu.at(tree.cliques()[e.first]), e.separator);
    const Factor b = factor_project(mu.at(tree.cliques()[e.second]), e.separator);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i] - b[i]) > 1e-8 * std::max(1.0, std::abs(scale))) {
        throw ConsistencyError("marginals disagree on separator " +
                               to_string(tree.domain(), e.separator));
      }
    }
    h -= entropy(a);
  }
  return h;
}

}  // namespace pgm
