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
#include "pgm/mechanisms.hpp"

namespace pgm {
namespace {

TEST(Sensitivity, Examples) {
  EXPECT_DOUBLE_EQ(sensitivity(Matrix::Identity(5, 5), 100), 0.02);
  EXPECT_DOUBLE_EQ(sensitivity(Matrix::Ones(1, 7), 1), 2.0);
  EXPECT_DOUBLE_EQ(sensitivity(build_block(BlockKind::kPrefix, {}, 4), 1), 8.0);
  EXPECT_THROW(sensitivity(Matrix::Identity(2, 2), 0), MechanismError);
}

TEST(Rational, ExactShares) {
  Rational sum;
  for (int i = 0; i < 10; ++i) sum = sum + Rational::of(1, 10);
  EXPECT_EQ(sum, Rational::of(1, 1));
  EXPECT_EQ(Rational::of(2, 4), Rational::of(1, 2));
  EXPECT_EQ(Rational::of(1, 6) + Rational::of(1, 3), Rational::of(1, 2));
}

TEST(Accountant, DebitsAndRefusesOverspend) {
  PrivacyAccountant acc(2.0);
  acc.debit(Rational::of(1, 3), "laplace", Clique({0}));
  acc.debit(Rational::of(2, 3), "laplace", Clique({1}));
  EXPECT_EQ(acc.consumed_share(), Rational::of(1, 1));
  EXPECT_DOUBLE_EQ(acc.consumed(), 2.0);
  EXPECT_THROW(acc.debit(Rational::of(1, 1000), "laplace", Clique({0})), BudgetError);
  EXPECT_EQ(acc.entries().size(), 2u);
  EXPECT_THROW(PrivacyAccountant(0.0), BudgetError);
}

TEST(LaplaceMeasure, NoiselessIsExact) {
  auto d = make_domain({{"A", 3}});
  Factor mu(d, Clique({0}), {10, 20, 70});
  std::mt19937_64 rng(1);
  Matrix q = build_block(BlockKind::kPrefix, {}, 3);
  auto m = laplace_measure(mu, q, 1.0, 100, rng, true);
  EXPECT_EQ(m.answer, (Vector{{10, 30, 100}}));
  // b = (2 * 3 / 100) * total / eps.
  EXPECT_NEAR(m.noise_scale, 6.0, 1e-12);
}

TEST(LaplaceMeasure, ReproducibleAndUnbiased) {
  auto d = make_domain({{"A", 2}});
  Factor mu(d, Clique({0}), {0.5, 0.5});
  std::mt19937_64 r1(7), r2(7);
  auto a = laplace_measure(mu, Matrix::Identity(2, 2), 0.5, 10, r1);
  auto b = laplace_measure(mu, Matrix::Identity(2, 2), 0.5, 10, r2);
  EXPECT_EQ(a.answer, b.answer);

  std::mt19937_64 rng(8);
  const int n = 100000;
  double sum = 0, sq = 0, scale = 0;
  for (int i = 0; i < n / 2; ++i) {
    auto m = laplace_measure(mu, Matrix::Identity(2, 2), 0.5, 10, rng);
    scale = m.noise_scale;
    for (int k = 0; k < 2; ++k) {
      const double z = m.answer[k] - 0.5;
      sum += z;
      sq += z * z;
    }
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_LT(std::abs(mean), 5 * std::sqrt(2 * scale * scale / n));
  EXPECT_NEAR(var / (2 * scale * scale), 1.0, 0.05);
}

TEST(LaplaceMeasure, ShareDebitsAccountant) {
  auto d = make_domain({{"A", 2}});
  Factor mu(d, Clique({0}), {3, 7});
  std::mt19937_64 rng(9);
  PrivacyAccountant acc(1.0);
  auto m = laplace_measure(mu, Matrix::Identity(2, 2), Rational::of(1, 4), 10, rng, acc);
  EXPECT_DOUBLE_EQ(acc.consumed(), 0.25);
  EXPECT_NEAR(m.noise_scale, 2.0 / 0.25, 1e-12);
}

TEST(ExponentialSelect, UniformWhenScoresEqual) {
  std::mt19937_64 rng(10);
  const std::vector<double> scores(5, 3.0);
  std::vector<int> counts(5, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[exponential_select(scores, 1.0, 1.0, rng)];
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / 5.0) * (c - n / 5.0) / (n / 5.0);
  // 4 degrees of freedom, p = 0.001.
  EXPECT_LT(chi2, 18.47);
}

TEST(ExponentialSelect, LargeEpsilonPicksArgmax) {
  std::mt19937_64 rng(11);
  const std::vector<double> scores{1.0, 4.0, 2.0};
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += exponential_select(scores, 1e4, 1.0, rng) == 1;
  EXPECT_GT(hits, 9990);
}

TEST(ExponentialSelect, TwoScoreOdds) {
  std::mt19937_64 rng(12);
  const double eps = 1.0, s = 1.5, sens = 0.5;
  const std::vector<double> scores{0.0, s};
  int ones = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) ones += exponential_select(scores, eps, sens, rng) == 1;
  const double odds = static_cast<double>(ones) / (n - ones);
  EXPECT_NEAR(odds / std::exp(eps * s / (2 * sens)), 1.0, 0.05);
}

TEST(WorkloadError, Examples) {
  auto d = make_domain({{"A", 2}, {"B", 2}});
  auto tree = build_junction_tree(d, {Clique({0})});
  auto uniform = GraphicalModel::uniform(tree, 1.0);
  Workload w{{{Clique({0}), Matrix::Identity(2, 2)}}};
  CliqueVector truth;
  truth.insert(Factor(d, Clique({0}), {1.0, 0.0}));
  EXPECT_NEAR(workload_error(truth, uniform, w), 0.5, 1e-15);
  CliqueVector same;
  same.insert(Factor(d, Clique({0}), {0.5, 0.5}));
  EXPECT_NEAR(workload_error(same, uniform, w), 0.0, 1e-15);
}

TEST(WorkloadError, TwoCliquesByHand) {
  auto d = make_domain({{"A", 2}, {"B", 3}});
  auto tree = build_junction_tree(d, {d->all()});
  auto model = GraphicalModel::uniform(tree, 1.0);
  Matrix wb(2, 3);
  wb << 1, 1, 0, 0, 1, 1;
  Workload w{{{Clique({0}), Matrix::Identity(2, 2)}, {Clique({1}), wb}}};
  CliqueVector truth;
  truth.insert(Factor(d, Clique({0}), {0.2, 0.8}));
  truth.insert(Factor(d, Clique({1}), {0.5, 0.25, 0.25}));
  // A: |0.2-0.5| + |0.8-0.5| = 0.6 over 2*1.
  // B: W mu = (0.75, 0.5), W mu_hat = (2/3, 2/3): 1/12 + 1/6 over 2*1.25.
  const double want = 0.5 * (0.6 / 2.0 + (1.0 / 12 + 1.0 / 6) / 2.5);
  EXPECT_NEAR(workload_error(truth, model, w), want, 1e-15);
}

TEST(WorkloadError, ZeroAnswersRejected) {
  auto d = make_domain({{"A", 2}});
  auto model = GraphicalModel::uniform(build_junction_tree(d, {d->all()}), 1.0);
  Workload w{{{Clique({0}), Matrix::Identity(2, 2)}}};
  CliqueVector truth;
  truth.insert(Factor(d, Clique({0}), {0.0, 0.0}));
  EXPECT_THROW(workload_error(truth, model, w), WorkloadError);
  EXPECT_THROW(workload_error(truth, model, Workload{}), WorkloadError);
}

TEST(AdjacentTriples, Examples) {
  auto three = adjacent_triples_workload(3, 2);
  ASSERT_EQ(three.cliques.size(), 1u);
  EXPECT_EQ(three.cliques[0], Clique({0, 1, 2}));
  EXPECT_EQ(three.domain->name(0), "a1");

  auto five = adjacent_triples_workload(5, 2);
  ASSERT_EQ(five.cliques.size(), 3u);
  EXPECT_EQ(five.cliques[1], Clique({1, 2, 3}));
  EXPECT_EQ(five.cliques[2], Clique({2, 3, 4}));
  EXPECT_EQ(five.workload.entries[0].matrix, Matrix::Identity(8, 8));

  auto hundred = adjacent_triples_workload(100, 10);
  auto tree = build_junction_tree(hundred.domain, hundred.cliques);
  EXPECT_EQ(tree.size().parameter_count, 98000.0);
  EXPECT_THROW(adjacent_triples_workload(2, 2), WorkloadError);
}

Dataset small_dataset(std::mt19937_64& rng, std::size_t n) {
  auto d = make_domain({{"A", 3}, {"B", 2}, {"C", 2}});
  std::vector<std::int32_t> cells;
  std::discrete_distribution<int> a({0.6, 0.3, 0.1});
  for (std::size_t i = 0; i < n; ++i) {
    const int x = a(rng);
    const int y = (x == 0) ? 0 : static_cast<int>(rng() % 2);
    const int z = (rng() % 10 < 8) ? y : 1 - y;
    cells.insert(cells.end(), {x, y, z});
  }
  return Dataset(d, cells);
}

TEST(Mwem, SingleRoundNoiselessFitsMeasuredRow) {
  std::mt19937_64 rng(13);
  Dataset data = small_dataset(rng, 500);
  Matrix row = build_block(BlockKind::kIndicator, {.index = 1}, 3);
  Workload w{{{Clique({0}), row}}};
  MwemOptions opt;
  opt.rounds = 1;
  opt.noiseless = true;
  auto r = mwem_pgm(data, w, opt, rng);
  ASSERT_EQ(r.measurements.size(), 1u);
  EXPECT_LT(r.last_report.final_loss, 1e-8);
  const double truth = data.marginal(Clique({0}))[0];
  EXPECT_NEAR(model_marginal(r.model, Clique({0}))[0], truth, 1e-4 * truth);
  EXPECT_EQ(r.accountant.consumed_share(), Rational::of(1, 1));
  EXPECT_TRUE(r.accountant.any_noiseless());
}

TEST(Mwem, SpendsExactlyTheBudget) {
  std::mt19937_64 rng(14);
  Dataset data = small_dataset(rng, 1000);
  Workload w{{{Clique({0, 1}), Matrix::Identity(6, 6)}, {Clique({1, 2}), Matrix::Identity(4, 4)}}};
  MwemOptions opt;
  opt.rounds = 7;
  opt.epsilon = 0.9;
  opt.estimator.iterations = 200;
  auto r = mwem_pgm(data, w, opt, rng);
  EXPECT_EQ(r.accountant.consumed_share(), Rational::of(1, 1));
  EXPECT_EQ(r.accountant.entries().size(), 14u);
  EXPECT_EQ(r.rounds.size(), 7u);
  EXPECT_NEAR(r.model.total(), 1000.0, 1e-9);
}

TEST(FitModel, NoMeasurementsGivesUniform) {
  auto d = make_domain({{"A", 4}, {"B", 2}});
  auto fit = fit_model(d, {}, 8.0, {});
  auto m = model_marginal(fit.model, Clique({0}));
  for (double v : m.values()) EXPECT_NEAR(v, 2.0, 1e-12);
}

TEST(FitModel, ParameterCapEnforced) {
  auto d = make_domain({{"A", 100}, {"B", 100}});
  LinearMeasurement m{d->all(), Matrix::Ones(1, 10000), Vector::Ones(1), 1.0};
  EstimatorConfig config;
  config.parameter_cap = 5000;
  EXPECT_THROW(fit_model(d, {m}, 1.0, config), FeasibilityError);
}

}  // namespace
}  // namespace pgm
