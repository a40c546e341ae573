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

#include "pgm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#define PGM_PRAGMA(x) _Pragma(#x)
#else
#define PGM_PRAGMA(x)
#endif

namespace pgm::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::int64_t kChunk = 4096;

std::int64_t product(std::span<const std::int64_t> shape) {
  std::int64_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

// Offsets (under `strides`) of every cell of `shape`, in row-major order.
std::vector<std::int64_t> enumerate_offsets(
    const std::vector<std::int64_t>& shape,
    const std::vector<std::int64_t>& strides) {
  const std::int64_t total = product(shape);
  std::vector<std::int64_t> out(static_cast<std::size_t>(total));
  std::vector<std::int64_t> coord(shape.size(), 0);
  std::int64_t off = 0;
  for (std::int64_t i = 0; i < total; ++i) {
    out[i] = off;
    for (int ax = static_cast<int>(shape.size()) - 1; ax >= 0; --ax) {
      if (++coord[ax] < shape[ax]) {
        off += strides[ax];
        break;
      }
      off -= strides[ax] * (shape[ax] - 1);
      coord[ax] = 0;
    }
  }
  return out;
}

struct ReducePlan {
  std::vector<std::int64_t> kept;        // input offset of each output cell
  std::vector<std::int64_t> eliminated;  // offsets summed into each cell
};

ReducePlan make_plan(std::span<const std::int64_t> in_shape,
                     std::span<const std::uint8_t> keep) {
  const auto strides = row_major_strides(in_shape);
  std::vector<std::int64_t> ks, kst, es, est;
  for (std::size_t ax = 0; ax < in_shape.size(); ++ax) {
    if (keep[ax]) {
      ks.push_back(in_shape[ax]);
      kst.push_back(strides[ax]);
    } else {
      es.push_back(in_shape[ax]);
      est.push_back(strides[ax]);
    }
  }
  return {enumerate_offsets(ks, kst), enumerate_offsets(es, est)};
}

}  // namespace

std::vector<std::int64_t> row_major_strides(
    std::span<const std::int64_t> shape) {
  std::vector<std::int64_t> strides(shape.size());
  std::int64_t s = 1;
  for (int ax = static_cast<int>(shape.size()) - 1; ax >= 0; --ax) {
    strides[ax] = s;
    s *= shape[ax];
  }
  return strides;
}

void broadcast_combine(std::span<const std::int64_t> shape,
                       std::span<const double> a,
                       std::span<const std::int64_t> a_strides,
                       std::span<const double> b,
                       std::span<const std::int64_t> b_strides,
                       Combine op, std::span<double> out) {
  const std::int64_t total = product(shape);
  const int rank = static_cast<int>(shape.size());
  const std::int64_t chunks = (total + kChunk - 1) / kChunk;

  PGM_PRAGMA(omp parallel for schedule(static) if (total > kParallelThreshold))
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t begin = c * kChunk;
    const std::int64_t end = std::min(total, begin + kChunk);
    std::vector<std::int64_t> coord(rank, 0);
    std::int64_t rem = begin, ao = 0, bo = 0;
    for (int ax = rank - 1; ax >= 0; --ax) {
      coord[ax] = rem % shape[ax];
      rem /= shape[ax];
      ao += coord[ax] * a_strides[ax];
      bo += coord[ax] * b_strides[ax];
    }
    for (std::int64_t i = begin; i < end; ++i) {
      out[i] = op == Combine::kMultiply ? a[ao] * b[bo] : a[ao] + b[bo];
      for (int ax = rank - 1; ax >= 0; --ax) {
        if (++coord[ax] < shape[ax]) {
          ao += a_strides[ax];
          bo += b_strides[ax];
          break;
        }
        ao -= a_strides[ax] * (shape[ax] - 1);
        bo -= b_strides[ax] * (shape[ax] - 1);
        coord[ax] = 0;
      }
    }
  }
}

void reduce_sum(std::span<const std::int64_t> in_shape,
                std::span<const double> in, std::span<const std::uint8_t> keep,
                std::span<double> out) {
  const ReducePlan plan = make_plan(in_shape, keep);
  const auto n_out = static_cast<std::int64_t>(plan.kept.size());
  const auto* elim = plan.eliminated.data();
  const auto n_elim = static_cast<std::int64_t>(plan.eliminated.size());
  const std::int64_t work = n_out * n_elim;

  PGM_PRAGMA(omp parallel for schedule(static) if (work > kParallelThreshold && n_out > 1))
  for (std::int64_t o = 0; o < n_out; ++o) {
    const double* base = in.data() + plan.kept[o];
    double s = 0.0;
    for (std::int64_t e = 0; e < n_elim; ++e) s += base[elim[e]];
    out[o] = s;
  }
}

void reduce_logsumexp(std::span<const std::int64_t> in_shape,
                      std::span<const double> in,
                      std::span<const std::uint8_t> keep,
                      std::span<double> out) {
  const ReducePlan plan = make_plan(in_shape, keep);
  const auto n_out = static_cast<std::int64_t>(plan.kept.size());
  const auto* elim = plan.eliminated.data();
  const auto n_elim = static_cast<std::int64_t>(plan.eliminated.size());
  const std::int64_t work = n_out * n_elim;

  PGM_PRAGMA(omp parallel for schedule(static) if (work > kParallelThreshold && n_out > 1))
  for (std::int64_t o = 0; o < n_out; ++o) {
    const double* base = in.data() + plan.kept[o];
    double m = kNegInf;
    for (std::int64_t e = 0; e < n_elim; ++e) m = std::max(m, base[elim[e]]);
    if (m == kNegInf || !std::isfinite(m)) {
      out[o] = m;
      continue;
    }
    double s = 0.0;
    for (std::int64_t e = 0; e < n_elim; ++e) s += std::exp(base[elim[e]] - m);
    out[o] = m + std::log(s);
  }
}

double max_value(std::span<const double> in) {
  double m = kNegInf;
  for (double v : in) m = std::max(m, v);
  return m;
}

double sum_exp_shifted(std::span<const double> in, double shift) {
  double s = 0.0;
  for (double v : in) s += std::exp(v - shift);
  return s;
}

namespace reference {

namespace {

// Decomposes a row-major linear index into per-axis coordinates.
void unravel(std::int64_t index, std::span<const std::int64_t> shape,
             std::vector<std::int64_t>& coord) {
  for (int ax = static_cast<int>(shape.size()) - 1; ax >= 0; --ax) {
    coord[ax] = index % shape[ax];
    index /= shape[ax];
  }
}

std::int64_t dot(const std::vector<std::int64_t>& coord,
                 std::span<const std::int64_t> strides) {
  std::int64_t off = 0;
  for (std::size_t ax = 0; ax < coord.size(); ++ax) off += coord[ax] * strides[ax];
  return off;
}

// Maps every input cell to its output cell.
std::vector<std::int64_t> output_index(std::span<const std::int64_t> in_shape,
                                       std::span<const std::uint8_t> keep) {
  std::vector<std::int64_t> out_shape;
  for (std::size_t ax = 0; ax < in_shape.size(); ++ax) {
    if (keep[ax]) out_shape.push_back(in_shape[ax]);
  }
  const auto out_strides = row_major_strides(out_shape);
  std::vector<std::int64_t> full(in_shape.size(), 0);
  for (std::size_t ax = 0, k = 0; ax < in_shape.size(); ++ax) {
    if (keep[ax]) full[ax] = out_strides[k++];
  }
  const std::int64_t total = product(in_shape);
  std::vector<std::int64_t> map(static_cast<std::size_t>(total));
  std::vector<std::int64_t> coord(in_shape.size());
  for (std::int64_t i = 0; i < total; ++i) {
    unravel(i, in_shape, coord);
    map[i] = dot(coord, full);
  }
  return map;
}

}  // namespace

void broadcast_combine(std::span<const std::int64_t> shape,
                       std::span<const double> a,
                       std::span<const std::int64_t> a_strides,
                       std::span<const double> b,
                       std::span<const std::int64_t> b_strides,
                       Combine op, std::span<double> out) {
  const std::int64_t total = product(shape);
  std::vector<std::int64_t> coord(shape.size());
  for (std::int64_t i = 0; i < total; ++i) {
    unravel(i, shape, coord);
    const double x = a[dot(coord, a_strides)];
    const double y = b[dot(coord, b_strides)];
    out[i] = op == Combine::kMultiply ? x * y : x + y;
  }
}

void reduce_sum(std::span<const std::int64_t> in_shape,
                std::span<const double> in, std::span<const std::uint8_t> keep,
                std::span<double> out) {
  const auto map = output_index(in_shape, keep);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < map.size(); ++i) out[map[i]] += in[i];
}

void reduce_logsumexp(std::span<const std::int64_t> in_shape,
                      std::span<const double> in,
                      std::span<const std::uint8_t> keep,
                      std::span<double> out) {
  const auto map = output_index(in_shape, keep);
  std::vector<double> m(out.size(), kNegInf);
  for (std::size_t i = 0; i < map.size(); ++i) m[map[i]] = std::max(m[map[i]], in[i]);
  std::vector<double> s(out.size(), 0.0);
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (std::isfinite(m[map[i]])) s[map[i]] += std::exp(in[i] - m[map[i]]);
  }
  for (std::size_t o = 0; o < out.size(); ++o) {
    out[o] = std::isfinite(m[o]) ? m[o] + std::log(s[o]) : m[o];
  }
}

}  // namespace reference

}  // namespace pgm::kernels
