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

// Dense tensor kernels behind Factor. Tensors are row-major; an operand that
// does not carry one of the output axes has stride 0 on that axis.
//
// The default kernels are OpenMP-parallel over output cells. Each output
// cell is produced by exactly one thread with a fixed accumulation order, so
// results are bitwise identical for any thread count. The `reference`
// namespace holds the plain serial loops the parallel kernels are tested
// and benchmarked against.

#ifndef PGM_KERNELS_HPP_
#define PGM_KERNELS_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace pgm::kernels {

enum class Combine { kMultiply, kAdd };

// out[x] = a[x . a_strides] (op) b[x . b_strides] for every x in `shape`.
void broadcast_combine(std::span<const std::int64_t> shape,
                       std::span<const double> a,
                       std::span<const std::int64_t> a_strides,
                       std::span<const double> b,
                       std::span<const std::int64_t> b_strides,
                       Combine op, std::span<double> out);

// Sums `in` (of `in_shape`) over every axis where keep[axis] is zero.
// `out` has the shape of the kept axes in their original order.
void reduce_sum(std::span<const std::int64_t> in_shape,
                std::span<const double> in, std::span<const std::uint8_t> keep,
                std::span<double> out);

// Same as reduce_sum but computes log(sum(exp(.))) stably. Cells whose
// inputs are all -inf produce -inf.
void reduce_logsumexp(std::span<const std::int64_t> in_shape,
                      std::span<const double> in, std::span<const std::uint8_t> keep,
                      std::span<double> out);

// Largest-value helpers used by log-space normalisation.
double max_value(std::span<const double> in);
double sum_exp_shifted(std::span<const double> in, double shift);

// Row-major strides for `shape`.
std::vector<std::int64_t> row_major_strides(std::span<const std::int64_t> shape);

// Number of output cells below which the kernels stay single threaded.
inline constexpr std::int64_t kParallelThreshold = 1 << 14;

namespace reference {

void broadcast_combine(std::span<const std::int64_t> shape,
                       std::span<const double> a,
                       std::span<const std::int64_t> a_strides,
                       std::span<const double> b,
                       std::span<const std::int64_t> b_strides,
                       Combine op, std::span<double> out);

void reduce_sum(std::span<const std::int64_t> in_shape,
                std::span<const double> in, std::span<const std::uint8_t> keep,
                std::span<double> out);

void reduce_logsumexp(std::span<const std::int64_t> in_shape,
                      std::span<const double> in, std::span<const std::uint8_t> keep,
                      std::span<double> out);

}  // namespace reference

}  // namespace pgm::kernels

#endif  // PGM_KERNELS_HPP_
