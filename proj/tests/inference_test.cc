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
#include <vector>

#include <gtest/gtest.h>

#include "pgm/errors.hpp"
#include "pgm/inference.hpp"
#include "support/oracles.hpp"

namespace pgm {
namespace {

using testing::joint_from_theta;
using testing::joint_marginal;
using testing::kronecker;
using testing::random_theta;

GraphicalModel random_chain_model(std::mt19937_64& rng, const DomainPtr& d, double total) {
  std::vector<Clique> cs;
  for (std::size_t i = 0; i + 1 < d->size(); ++i) {
    cs.push_back(Clique({static_cast<int>(i), static_cast<int>(i + 1)}));
  }
  auto tree = build_junction_tree(d, cs);
  auto theta = random_theta(tree, rng);
  return GraphicalModel(tree, theta, total);
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

TEST(BuildBlock, TableRows) {
  Matrix p(3, 3);
  p << 1, 0, 0, 1, 1, 0, 1, 1, 1;
  EXPECT_EQ(build_block(BlockKind::kPrefix, {}, 3), p);

  Matrix e2(1, 4);
  e2 << 0, 1, 0, 0;
  EXPECT_EQ(build_block(BlockKind::kIndicator, {.index = 2}, 4), e2);

  Matrix mean(1, 3);
  mean << 1, 2, 3;
  EXPECT_EQ(build_block(BlockKind::kMean, {}, 3), mean);

  Matrix moments(2, 3);
  moments << 1, 2, 3, 1, 4, 9;
  EXPECT_EQ(build_block(BlockKind::kMoments, {.moments = 2}, 3), moments);

  Matrix set(1, 4);
  set << 1, 0, 1, 0;
  EXPECT_EQ(build_block(BlockKind::kSetIndicator, {.set = {1, 3}}, 4), set);

  Matrix bucket(2, 4);
  bucket << 1, 1, 0, 0, 0, 0, 1, 1;
  EXPECT_EQ(build_block(BlockKind::kBucket, {.mapping = {1, 1, 2, 2}}, 4), bucket);

  EXPECT_EQ(build_block(BlockKind::kOnes, {}, 3), Matrix::Ones(1, 3));
  EXPECT_EQ(build_block(BlockKind::kIdentity, {}, 2), Matrix::Identity(2, 2));
}

TEST(BuildBlock, BadParameters) {
  EXPECT_THROW(build_block(BlockKind::kIndicator, {.index = 0}, 4), BlockParameterError);
  EXPECT_THROW(build_block(BlockKind::kIndicator, {.index = 5}, 4), BlockParameterError);
  EXPECT_THROW(build_block(BlockKind::kBucket, {.mapping = {1, 2}}, 3), BlockParameterError);
  EXPECT_THROW(build_block(BlockKind::kMoments, {.moments = 0}, 3), BlockParameterError);
  EXPECT_THROW(parse_block_kind("nope"), BlockParameterError);
  EXPECT_EQ(parse_block_kind("P"), BlockKind::kPrefix);
  EXPECT_EQ(parse_block_kind(to_string(BlockKind::kMoments)), BlockKind::kMoments);
}

TEST(ModelMarginal, CachedCliqueAndEmpty) {
  std::mt19937_64 rng(1);
  auto d = make_domain({{"A", 2}, {"B", 2}, {"C", 2}});
  auto model = random_chain_model(rng, d, 5.0);
  const auto& cached = model.marginals().at(Clique({0, 1}));
  auto got = model_marginal(model, Clique({0, 1}));
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], cached[i]);
  auto scalar = model_marginal(model, Clique());
  ASSERT_EQ(scalar.size(), 1u);
  EXPECT_NEAR(scalar[0], 5.0, 1e-12);
}

TEST(ModelMarginal, UnmeasuredPairMatchesEnumeration) {
  std::mt19937_64 rng(2);
  auto d = make_domain({{"A", 2}, {"B", 2}, {"C", 2}});
  auto model = random_chain_model(rng, d, 1.0);
  auto joint = joint_from_theta(*d, model.theta(), 1.0);
  auto want = joint_marginal(*d, joint, Clique({0, 2}));
  auto got = model_marginal(model, Clique({0, 2}));
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
}

TEST(ModelMarginal, CellCapRefuses) {
  std::mt19937_64 rng(3);
  auto d = make_domain({{"A", 4}, {"B", 4}, {"C", 4}, {"D", 4}});
  auto model = random_chain_model(rng, d, 1.0);
  EXPECT_THROW(model_marginal(model, d->all(), {.cell_cap = 10}), FeasibilityError);
}

TEST(FactoredQuery, AllOnesGivesTotal) {
  std::mt19937_64 rng(4);
  auto d = make_domain({{"A", 2}, {"B", 3}, {"C", 2}});
  auto model = random_chain_model(rng, d, 12.0);
  FactoredQuery q;
  for (std::size_t i = 0; i < d->size(); ++i) q.blocks.push_back(Matrix::Ones(1, d->cardinality(i)));
  auto a = answer_factored_query(model, q);
  ASSERT_EQ(a.values.size(), 1u);
  EXPECT_NEAR(a.values[0], 12.0, 1e-10);
  EXPECT_NEAR(answer_factored_query(model, q, AnswerScale::kNormalized).values[0], 1.0, 1e-12);
}

TEST(FactoredQuery, MarginalQueriesAgreeOnEverySubset) {
  std::mt19937_64 rng(5);
  auto d = make_domain({{"A", 2}, {"B", 3}, {"C", 2}, {"D", 2}});
  auto model = random_chain_model(rng, d, 3.0);
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<int> attrs;
    for (int i = 0; i < 4; ++i) {
      if (mask & (1 << i)) attrs.push_back(i);
    }
    const Clique c(attrs);
    auto a = answer_factored_query(model, marginal_query(*d, c));
    auto m = model_marginal(model, c);
    ASSERT_EQ(a.values.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(a.values[i], m[i], 1e-10);
  }
}

TEST(FactoredQuery, SignedBlocksMatchDenseKronecker) {
  std::mt19937_64 rng(6);
  auto d = make_domain({{"A", 2}, {"B", 2}, {"C", 2}});
  for (int trial = 0; trial < 10; ++trial) {
    auto model = random_chain_model(rng, d, 1.0);
    auto joint = joint_from_theta(*d, model.theta(), 1.0);
    FactoredQuery q;
    for (int i = 0; i < 3; ++i) q.blocks.push_back(random_matrix(rng, 1 + trial % 3, 2));
    const Vector want =
        kronecker(q.blocks) * Eigen::Map<const Vector>(joint.data(), static_cast<Eigen::Index>(joint.size()));
    auto got = answer_factored_query(model, q);
    ASSERT_EQ(got.values.size(), static_cast<std::size_t>(want.size()));
    for (Eigen::Index i = 0; i < want.size(); ++i) EXPECT_NEAR(got.values[i], want[i], 1e-10);
  }
}

TEST(FactoredQuery, BlockwiseScalingIsLinear) {
  std::mt19937_64 rng(7);
  auto d = make_domain({{"A", 2}, {"B", 3}, {"C", 2}});
  auto model = random_chain_model(rng, d, 1.0);
  FactoredQuery q, scaled;
  const double s[3] = {2.0, -0.5, 3.0};
  for (int i = 0; i < 3; ++i) {
    q.blocks.push_back(random_matrix(rng, 2, d->cardinality(i)));
    scaled.blocks.push_back(s[i] * q.blocks.back());
  }
  auto a = answer_factored_query(model, q);
  auto b = answer_factored_query(model, scaled);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(b.values[i], -3.0 * a.values[i], 1e-12);
}

TEST(FactoredQuery, PrefixThenDifferenceRecoversMarginal) {
  std::mt19937_64 rng(8);
  auto d = make_domain({{"A", 4}, {"B", 3}});
  auto model = random_chain_model(rng, d, 1.0);
  FactoredQuery q{{build_block(BlockKind::kPrefix, {}, 4), Matrix::Ones(1, 3)}};
  auto cdf = answer_factored_query(model, q);
  auto m = model_marginal(model, Clique({0}));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(cdf.values[i] - (i == 0 ? 0.0 : cdf.values[i - 1]), m[i], 1e-12);
  }
}

TEST(FactoredQuery, WrongShapesRejected) {
  std::mt19937_64 rng(9);
  auto d = make_domain({{"A", 2}, {"B", 3}});
  auto model = random_chain_model(rng, d, 1.0);
  EXPECT_THROW(answer_factored_query(model, {{Matrix::Ones(1, 2)}}), QueryError);
  EXPECT_THROW(answer_factored_query(model, {{Matrix::Ones(1, 2), Matrix::Ones(1, 2)}}),
               QueryError);
}

TEST(Sampling, PointMass) {
  auto d = make_domain({{"A", 3}, {"B", 2}});
  auto tree = build_junction_tree(d, {d->all()});
  const double ninf = -std::numeric_limits<double>::infinity();
  CliqueVector theta;
  theta.insert(Factor(d, d->all(), {ninf, ninf, ninf, 0.0, ninf, ninf}, Space::kLog));
  GraphicalModel model(tree, theta, 1.0);
  auto data = sample_synthetic(model, 200, 3);
  ASSERT_EQ(data.records(), 200u);
  for (std::size_t r = 0; r < data.records(); ++r) {
    EXPECT_EQ(data.record(r)[0], 1);
    EXPECT_EQ(data.record(r)[1], 1);
  }
}

TEST(Sampling, DeterministicForSeed) {
  std::mt19937_64 rng(10);
  auto d = make_domain({{"A", 3}, {"B", 2}, {"C", 4}});
  auto model = random_chain_model(rng, d, 1.0);
  auto a = sample_synthetic(model, 500, 42);
  auto b = sample_synthetic(model, 500, 42);
  auto c = sample_synthetic(model, 500, 43);
  EXPECT_TRUE(std::equal(a.cells().begin(), a.cells().end(), b.cells().begin()));
  EXPECT_FALSE(std::equal(a.cells().begin(), a.cells().end(), c.cells().begin()));
}

TEST(Sampling, UniformOneWayFrequencies) {
  auto d = make_domain({{"A", 5}, {"B", 3}});
  auto tree = build_junction_tree(d, {Clique({0}), Clique({1})});
  auto model = GraphicalModel::uniform(tree, 1.0);
  const std::size_t n = 100000;
  auto data = sample_synthetic(model, n, 1);
  for (int a = 0; a < 2; ++a) {
    auto f = data.marginal(Clique({a}));
    const double p = 1.0 / static_cast<double>(f.size());
    const double se = std::sqrt(p * (1 - p) / n);
    for (double v : f.values()) EXPECT_LT(std::abs(v / n - p), 4 * se);
  }
}

TEST(Sampling, ChainMarginalsWithinSamplingError) {
  std::mt19937_64 rng(11);
  auto d = make_domain({{"A", 3}, {"B", 2}, {"C", 3}});
  auto model = random_chain_model(rng, d, 1.0);
  const std::size_t n = 100000;
  auto data = sample_synthetic(model, n, 5);
  int outside = 0, cells = 0;
  for (const auto& [c, mu] : model.marginals()) {
    auto f = data.marginal(c);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double p = mu[i];
      const double se = std::sqrt(p * (1 - p) / n);
      ++cells;
      if (std::abs(f[i] / n - p) > 4 * se) ++outside;
    }
  }
  EXPECT_EQ(outside, 0) << "of " << cells;
}

}  // namespace
}  // namespace pgm
