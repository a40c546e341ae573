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


// Parallel kernels against the serial reference, on sizes either side of the
// parallel threshold.

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "pgm/kernels.hpp"

namespace pgm::kernels {
namespace {

std::vector<double> randoms(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

std::int64_t cells(const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

class KernelTest : public ::testing::TestWithParam<std::vector<std::int64_t>> {};

TEST_P(KernelTest, BroadcastCombineMatchesReference) {
  const auto shape = GetParam();
  std::mt19937_64 rng(11);
  // a spans axes 0..k-1, b the last axes; zero stride on the rest.
  const std::size_t k = shape.size() / 2 + 1;
  std::vector<std::int64_t> a_shape(shape.begin(), shape.begin() + k);
  std::vector<std::int64_t> b_shape(shape.begin() + (shape.size() - k), shape.end());
  auto a = randoms(cells(a_shape), rng);
  auto b = randoms(cells(b_shape), rng);
  auto as = row_major_strides(a_shape);
  auto bs = row_major_strides(b_shape);
  std::vector<std::int64_t> a_strides(shape.size(), 0), b_strides(shape.size(), 0);
  for (std::size_t i = 0; i < k; ++i) a_strides[i] = as[i];
  for (std::size_t i = 0; i < k; ++i) b_strides[shape.size() - k + i] = bs[i];
  for (Combine op : {Combine::kMultiply, Combine::kAdd}) {
    std::vector<double> fast(cells(shape)), slow(cells(shape));
    broadcast_combine(shape, a, a_strides, b, b_strides, op, fast);
    reference::broadcast_combine(shape, a, a_strides, b, b_strides, op, slow);
    EXPECT_EQ(fast, slow);
  }
}

TEST_P(KernelTest, ReductionsMatchReference) {
  const auto shape = GetParam();
  std::mt19937_64 rng(12);
  auto in = randoms(cells(shape), rng);
  for (std::uint32_t mask = 0; mask < (1u << shape.size()); ++mask) {
    std::vector<std::uint8_t> keep(shape.size());
    std::int64_t out_cells = 1;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      keep[i] = (mask >> i) & 1u;
      if (keep[i]) out_cells *= shape[i];
    }
    std::vector<double> fast(out_cells), slow(out_cells);
    reduce_sum(shape, in, keep, fast);
    reference::reduce_sum(shape, in, keep, slow);
    for (std::int64_t i = 0; i < out_cells; ++i) EXPECT_NEAR(fast[i], slow[i], 1e-9);
    reduce_logsumexp(shape, in, keep, fast);
    reference::reduce_logsumexp(shape, in, keep, slow);
    for (std::int64_t i = 0; i < out_cells; ++i) EXPECT_NEAR(fast[i], slow[i], 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, KernelTest,
                         ::testing::Values(std::vector<std::int64_t>{3},
                                           std::vector<std::int64_t>{2, 3, 4},
                                           std::vector<std::int64_t>{40, 30, 25},
                                           std::vector<std::int64_t>{8, 8, 8, 8, 8}));

TEST(Kernels, MaxAndSumExp) {
  std::vector<double> v{1.0, 5.0, -2.0};
  EXPECT_EQ(max_value(v), 5.0);
  EXPECT_NEAR(sum_exp_shifted(v, 5.0), std::exp(-4.0) + 1.0 + std::exp(-7.0), 1e-15);
  EXPECT_EQ(row_major_strides(std::vector<std::int64_t>{2, 3, 4}),
            (std::vector<std::int64_t>{12, 4, 1}));
}

}  // namespace
}  // namespace pgm::kernels
