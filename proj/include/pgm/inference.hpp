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

#ifndef PGM_INFERENCE_HPP_
#define PGM_INFERENCE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pgm/dataset.hpp"
#include "pgm/estimation.hpp"

namespace pgm {

// Q = Q_1 (x) ... (x) Q_d, one r_i x n_i block per domain attribute. The
// Kronecker product itself is never formed.
struct FactoredQuery {
  std::vector<Matrix> blocks;
};

enum class AnswerScale { kNormalized, kCounts };

// Answers indexed by z = (z_1, ..., z_d); axes with r_i = 1 are squeezed.
struct QueryAnswer {
  std::vector<std::int64_t> shape;
  std::vector<double> values;
  AnswerScale scale = AnswerScale::kCounts;
};

struct InferenceOptions {
  // Largest intermediate factor (in cells) variable elimination may build.
  double cell_cap = 1e8;
};

// Building blocks for factored queries. Category and row indices in the
// parameters are 1-based, matching the block definitions:
//   kIdentity      I      n x n   keep variable in
//   kOnes          1      1 x n   marginalize variable out
//   kIndicator     e_j    1 x n   inject evidence (index = j)
//   kSetIndicator  e_S    1 x n   evidence disjunction (set = S)
//   kPrefix        P      n x n   Q(b, a) = 1 for b >= a (CDF)
//   kBucket        R_f    r x n   Q(f(a), a) = 1 (mapping = f, rows = r)
//   kMean          E      1 x n   Q(1, a) = a
//   kMoments       E_k    k x n   Q(b, a) = a^b for b <= k (moments = k)
enum class BlockKind {
  kIdentity,
  kOnes,
  kIndicator,
  kSetIndicator,
  kPrefix,
  kBucket,
  kMean,
  kMoments,
};

struct BlockParams {
  std::int64_t index = 1;
  std::vector<std::int64_t> set;
  std::vector<std::int64_t> mapping;
  std::int64_t rows = 0;  // 0 = max(mapping)
  std::int64_t moments = 1;
};

Matrix build_block(BlockKind kind, const BlockParams& params, std::int64_t n);
BlockKind parse_block_kind(const std::string& name);
std::string to_string(BlockKind kind);

// Identity blocks on `clique`, all-ones rows elsewhere.
FactoredQuery marginal_query(const Domain& domain, const Clique& clique);

// Marginal of the model on any attribute subset, scaled to the model total.
// Read from the cached clique marginals when a junction-tree clique covers
// `target`; otherwise computed by variable elimination.
Factor model_marginal(const GraphicalModel& model, const Clique& target,
                      const InferenceOptions& options = {});

// (Q_1 (x) ... (x) Q_d) p, by variable elimination over an augmented model
// with one pairwise factor per query block. Single-row blocks are folded into
// an existing model factor up front.
QueryAnswer answer_factored_query(const GraphicalModel& model,
                                  const FactoredQuery& query,
                                  AnswerScale scale = AnswerScale::kCounts,
                                  const InferenceOptions& options = {});

// `count` i.i.d. records by forward sampling along the junction tree.
// Deterministic for a given seed.
Dataset sample_synthetic(const GraphicalModel& model, std::size_t count,
                         std::uint64_t seed);

}  // namespace pgm

#endif  // PGM_INFERENCE_HPP_
