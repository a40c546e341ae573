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


#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "pgm/errors.hpp"
#include "pgm/junction_tree.hpp"
#include "support/oracles.hpp"

namespace pgm {
namespace {

using testing::joint_from_theta;
using testing::joint_marginal;
using testing::random_theta;

DomainPtr binary(int d) {
  std::vector<Attribute> attrs;
  for (int i = 0; i < d; ++i) attrs.push_back({std::string(1, static_cast<char>('A' + i)), 2});
  return make_domain(attrs);
}

std::set<Clique> as_set(const std::vector<Clique>& v) { return {v.begin(), v.end()}; }

// Running intersection: for every attribute, the cliques holding it form a
// connected subtree.
bool running_intersection(const JunctionTree& t) {
  const int n = static_cast<int>(t.cliques().size());
  for (std::size_t a = 0; a < t.domain().size(); ++a) {
    std::vector<int> holders;
    for (int i = 0; i < n; ++i) {
      if (t.cliques()[i].contains(static_cast<int>(a))) holders.push_back(i);
    }
    if (holders.empty()) return false;
    std::vector<bool> seen(n, false);
    std::vector<int> stack{holders[0]};
    seen[holders[0]] = true;
    int reached = 0;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      ++reached;
      for (const auto& e : t.edges()) {
        int v = -1;
        if (e.first == u) v = e.second;
        if (e.second == u) v = e.first;
        if (v >= 0 && !seen[v] && t.cliques()[v].contains(static_cast<int>(a))) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    if (reached != static_cast<int>(holders.size())) return false;
  }
  return true;
}

TEST(BuildJunctionTree, ChainStaysChain) {
  auto t = build_junction_tree(binary(4), {Clique({0, 1}), Clique({1, 2}), Clique({2, 3})});
  EXPECT_EQ(as_set(t.cliques()), as_set({Clique({0, 1}), Clique({1, 2}), Clique({2, 3})}));
  ASSERT_EQ(t.edges().size(), 2u);
  for (const auto& e : t.edges()) EXPECT_EQ(e.separator.size(), 1u);
  EXPECT_TRUE(running_intersection(t));
}

TEST(BuildJunctionTree, TriangleMerges) {
  auto t = build_junction_tree(binary(3), {Clique({0, 1}), Clique({1, 2}), Clique({0, 2})});
  ASSERT_EQ(t.cliques().size(), 1u);
  EXPECT_EQ(t.cliques()[0], Clique({0, 1, 2}));
}

TEST(BuildJunctionTree, UncoveredAttributesGetSingletons) {
  auto t = build_junction_tree(binary(3), {Clique({0, 1})});
  EXPECT_EQ(as_set(t.cliques()), as_set({Clique({0, 1}), Clique({2})}));
  EXPECT_GE(t.containing(Clique({1})), 0);
  EXPECT_EQ(t.containing(Clique({0, 2})), -1);
}

TEST(BuildJunctionTree, RandomCliqueSetsAreValid) {
  std::mt19937_64 rng(5);
  auto d = binary(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Clique> cs;
    const int k = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < k; ++i) {
      std::vector<int> attrs;
      for (int a = 0; a < 8; ++a) {
        if (rng() % 4 == 0) attrs.push_back(a);
      }
      if (attrs.empty()) attrs.push_back(static_cast<int>(rng() % 8));
      cs.push_back(Clique(attrs));
    }
    auto t = build_junction_tree(d, cs);
    EXPECT_TRUE(running_intersection(t));
    EXPECT_EQ(t.edges().size() + 1, t.cliques().size());
    for (const auto& c : cs) EXPECT_GE(t.containing(c), 0);
    // Maximal: no clique inside another.
    for (std::size_t i = 0; i < t.cliques().size(); ++i)
      for (std::size_t j = 0; j < t.cliques().size(); ++j)
        if (i != j) EXPECT_FALSE(t.cliques()[i].is_subset_of(t.cliques()[j]));
  }
}

TEST(ModelSize, CountsAndCap) {
  auto d = make_domain({{"A", 10}, {"B", 10}, {"C", 10}});
  auto s = model_size(*d, {Clique({0, 1}), Clique({1, 2})});
  EXPECT_EQ(s.parameter_count, 200.0);
  EXPECT_EQ(s.largest_clique, 2u);
  EXPECT_THROW(check_model_size(*d, {d->all()}, 999.0), FeasibilityError);
  EXPECT_NO_THROW(check_model_size(*d, {d->all()}, 1000.0));
}

TEST(MarginalOracle, ZeroParameters) {
  auto d = binary(3);
  auto t = build_junction_tree(d, {Clique({0, 1}), Clique({1, 2})});
  auto r = marginal_oracle(t, CliqueVector::zeros(d, t.cliques(), Space::kLog), 1.0);
  for (const auto& [c, f] : r.marginals)
    for (double v : f.values()) EXPECT_NEAR(v, 0.25, 1e-15);
  EXPECT_NEAR(r.log_partition, std::log(8.0), 1e-14);
}

TEST(MarginalOracle, SingleClique) {
  auto d = binary(2);
  auto t = build_junction_tree(d, {d->all()});
  CliqueVector theta;
  theta.insert(Factor(d, d->all(), {0, std::log(2.0), std::log(3.0), std::log(4.0)}, Space::kLog));
  auto r = marginal_oracle(t, theta, 1.0);
  const auto& mu = r.marginals.at(d->all());
  EXPECT_NEAR(mu[0], 0.1, 1e-15);
  EXPECT_NEAR(mu[3], 0.4, 1e-15);
  EXPECT_NEAR(r.log_partition, std::log(10.0), 1e-14);
}

TEST(MarginalOracle, MatchesEnumeration) {
  std::mt19937_64 rng(7);
  auto d = make_domain({{"A", 2}, {"B", 3}, {"C", 2}, {"D", 3}});
  auto t = build_junction_tree(d, {Clique({0, 1}), Clique({1, 2}), Clique({2, 3})});
  for (int trial = 0; trial < 10; ++trial) {
    auto theta = random_theta(t, rng, 1.5);
    const double total = 3.5;
    auto r = marginal_oracle(t, theta, total);
    double log_z = 0;
    auto joint = joint_from_theta(*d, theta, total, &log_z);
    EXPECT_NEAR(r.log_partition, log_z, 1e-10);
    for (const auto& [c, f] : r.marginals) {
      auto want = joint_marginal(*d, joint, c);
      for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(f[i], want[i], 1e-10);
      EXPECT_NEAR(f.sum(), total, 1e-9 * total);
    }
    // Separator consistency.
    for (const auto& e : t.edges()) {
      auto a = factor_project(r.marginals.at(t.cliques()[e.first]), e.separator);
      auto b = factor_project(r.marginals.at(t.cliques()[e.second]), e.separator);
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9 * total);
    }
  }
}

TEST(MarginalOracle, ShiftInvariance) {
  std::mt19937_64 rng(8);
  auto d = make_domain({{"A", 2}, {"B", 3}, {"C", 2}});
  auto t = build_junction_tree(d, {Clique({0, 1}), Clique({1, 2})});
  auto theta = random_theta(t, rng);
  auto shifted = theta;
  shifted.at(t.cliques()[0]) += 2.5;
  auto r = marginal_oracle(t, theta, 1.0);
  auto s = marginal_oracle(t, shifted, 1.0);
  EXPECT_NEAR(s.log_partition - r.log_partition, 2.5, 1e-12);
  for (const auto& [c, f] : r.marginals)
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(s.marginals.at(c)[i], f[i], 1e-14);
}

TEST(MarginalOracle, WrongKeysRejected) {
  auto d = binary(3);
  auto t = build_junction_tree(d, {Clique({0, 1}), Clique({1, 2})});
  EXPECT_THROW(marginal_oracle(t, CliqueVector::zeros(d, {Clique({0, 1})}, Space::kLog), 1.0),
               ParameterMismatchError);
}

TEST(TreeEntropy, UniformChain) {
  auto d = binary(3);
  auto t = build_junction_tree(d, {Clique({0, 1}), Clique({1, 2})});
  auto r = marginal_oracle(t, CliqueVector::zeros(d, t.cliques(), Space::kLog), 1.0);
  EXPECT_NEAR(tree_entropy(r.marginals, t), std::log(8.0), 1e-14);
}

TEST(TreeEntropy, MatchesBruteForce) {
  std::mt19937_64 rng(9);
  auto d = make_domain({{"A", 3}, {"B", 2}, {"C", 4}});
  auto t = build_junction_tree(d, {Clique({0, 1}), Clique({1, 2})});
  for (int trial = 0; trial < 5; ++trial) {
    auto theta = random_theta(t, rng);
    auto r = marginal_oracle(t, theta, 1.0);
    auto joint = joint_from_theta(*d, theta, 1.0);
    EXPECT_NEAR(tree_entropy(r.marginals, t), testing::shannon_entropy(joint), 1e-12);
  }
  // Single clique reduces to the table entropy.
  auto whole = build_junction_tree(d, {d->all()});
  auto theta = random_theta(whole, rng);
  auto r = marginal_oracle(whole, theta, 1.0);
  EXPECT_NEAR(tree_entropy(r.marginals, whole), entropy(r.marginals.at(d->all())), 1e-14);
}

}  // namespace
}  // namespace pgm
