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

#include "pgm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "pgm/errors.hpp"
#include "pgm/kernels.hpp"

namespace pgm {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw BlockParameterError(what);
}

// Min-fill choice among `candidates` over the interaction graph of `scopes`.
int pick_min_fill(const std::vector<Clique>& scopes, const std::set<int>& candidates) {
  int best = -1;
  long best_fill = 0;
  for (int v : candidates) {
    Clique nbrs;
    for (const auto& s : scopes) {
      if (s.contains(v)) nbrs = nbrs.united(s);
    }
    std::vector<int> others;
    for (int u : nbrs) {
      if (u != v) others.push_back(u);
    }
    long fill = 0;
    for (std::size_t i = 0; i < others.size(); ++i) {
      for (std::size_t j = i + 1; j < others.size(); ++j) {
        const bool linked = std::any_of(scopes.begin(), scopes.end(), [&](const Clique& s) {
          return s.contains(others[i]) && s.contains(others[j]);
        });
        if (!linked) ++fill;
      }
    }
    if (best < 0 || fill < best_fill) {
      best = v;
      best_fill = fill;
    }
  }
  return best;
}

// Uniform double in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw(const std::vector<double>& cdf, std::size_t begin, std::size_t n,
                 std::mt19937_64& rng) {
  const double total = cdf[begin + n - 1];
  if (!(total > 0.0)) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  }
  const double u = uniform01(rng) * total;
  auto first = cdf.begin() + static_cast<std::ptrdiff_t>(begin);
  auto it = std::upper_bound(first, first + static_cast<std::ptrdiff_t>(n), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - first), n - 1);
}

}  // namespace

Matrix build_block(BlockKind kind, const BlockParams& params, std::int64_t n) {
  require(n >= 1, "block needs a positive attribute cardinality");
  const auto cols = static_cast<Eigen::Index>(n);
  switch (kind) {
    case BlockKind::kIdentity:
      return Matrix::Identity(cols, cols);
    case BlockKind::kOnes:
      return Matrix::Ones(1, cols);
    case BlockKind::kIndicator: {
      require(params.index >= 1 && params.index <= n,
              "indicator index " + std::to_string(params.index) + " outside [1, " +
                  std::to_string(n) + "]");
      Matrix q = Matrix::Zero(1, cols);
      q(0, params.index - 1) = 1.0;
      return q;
    }
    case BlockKind::kSetIndicator: {
      Matrix q = Matrix::Zero(1, cols);
      for (auto j : params.set) {
        require(j >= 1 && j <= n, "set element " + std::to_string(j) + " outside [1, " +
                                      std::to_string(n) + "]");
        q(0, j - 1) = 1.0;
      }
      return q;
    }
    case BlockKind::kPrefix: {
      Matrix q = Matrix::Zero(cols, cols);
      for (Eigen::Index b = 0; b < cols; ++b) {
        for (Eigen::Index a = 0; a <= b; ++a) q(b, a) = 1.0;
      }
      return q;
    }
    case BlockKind::kBucket: {
      require(static_cast<std::int64_t>(params.mapping.size()) == n,
              "bucket mapping needs one entry per category");
      std::int64_t rows = params.rows;
      if (rows == 0) rows = *std::max_element(params.mapping.begin(), params.mapping.end());
      require(rows >= 1, "bucket mapping needs at least one row");
      Matrix q = Matrix::Zero(rows, cols);
      for (std::int64_t a = 0; a < n; ++a) {
        const auto f = params.mapping[a];
        require(f >= 1 && f <= rows, "bucket mapping value " + std::to_string(f) +
                                         " outside [1, " + std::to_string(rows) + "]");
        q(f - 1, a) = 1.0;
      }
      return q;
    }
    case BlockKind::kMean: {
      Matrix q(1, cols);
      for (Eigen::Index a = 0; a < cols; ++a) q(0, a) = static_cast<double>(a + 1);
      return q;
    }
    case BlockKind::kMoments: {
      require(params.moments >= 1, "moment count must be at least 1");
      Matrix q(params.moments, cols);
      for (std::int64_t b = 0; b < params.moments; ++b) {
        for (Eigen::Index a = 0; a < cols; ++a) {
          q(b, a) = std::pow(static_cast<double>(a + 1), static_cast<double>(b + 1));
        }
      }
      return q;
    }
  }
  throw BlockParameterError("unknown block kind");
}

BlockKind parse_block_kind(const std::string& name) {
  if (name == "identity" || name == "I") return BlockKind::kIdentity;
  if (name == "ones" || name == "total" || name == "1") return BlockKind::kOnes;
  if (name == "indicator" || name == "e_j") return BlockKind::kIndicator;
  if (name == "set" || name == "e_S") return BlockKind::kSetIndicator;
  if (name == "prefix" || name == "P") return BlockKind::kPrefix;
  if (name == "bucket" || name == "R_f") return BlockKind::kBucket;
  if (name == "mean" || name == "E") return BlockKind::kMean;
  if (name == "moments" || name == "E_k") return BlockKind::kMoments;
  throw BlockParameterError("unknown block kind '" + name + "'");
}

std::string to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::kIdentity: return "identity";
    case BlockKind::kOnes: return "ones";
    case BlockKind::kIndicator: return "indicator";
    case BlockKind::kSetIndicator: return "set";
    case BlockKind::kPrefix: return "prefix";
    case BlockKind::kBucket: return "bucket";
    case BlockKind::kMean: return "mean";
    case BlockKind::kMoments: return "moments";
  }
  return "unknown";
}

FactoredQuery marginal_query(const Domain& domain, const Clique& clique) {
  FactoredQuery q;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto n = domain.cardinality(static_cast<int>(i));
    q.blocks.push_back(clique.contains(static_cast<int>(i))
                           ? build_block(BlockKind::kIdentity, {}, n)
                           : build_block(BlockKind::kOnes, {}, n));
  }
  return q;
}

Factor model_marginal(const GraphicalModel& model, const Clique& target,
                      const InferenceOptions& options) {
  const int host = model.tree().containing(target);
  if (host >= 0) {
    return factor_project(model.marginals().at(model.tree().cliques()[host]), target);
  }
  QueryAnswer a = answer_factored_query(model, marginal_query(model.domain(), target),
                                        AnswerScale::kCounts, options);
  for (double& v : a.values) v = std::max(v, 0.0);
  return Factor(model.domain_ptr(), target, std::move(a.values));
}

QueryAnswer answer_factored_query(const GraphicalModel& model,
                                  const FactoredQuery& query, AnswerScale scale,
                                  const InferenceOptions& options) {
  const Domain& domain = model.domain();
  const int d = static_cast<int>(domain.size());
  if (static_cast<int>(query.blocks.size()) != d) {
    throw QueryError("factored query needs one block per attribute (" +
                     std::to_string(d) + "), got " +
                     std::to_string(query.blocks.size()));
  }
  for (int i = 0; i < d; ++i) {
    if (query.blocks[i].cols() != domain.cardinality(i) || query.blocks[i].rows() < 1) {
      throw QueryError("block for '" + domain.name(i) + "' must have " +
                       std::to_string(domain.cardinality(i)) + " columns");
    }
  }

  // Augmented domain: the x attributes, then one z attribute per multi-row block.
  std::vector<Attribute> attrs = domain.attributes();
  std::vector<int> z_of(d, -1);
  for (int i = 0; i < d; ++i) {
    if (query.blocks[i].rows() > 1) {
      z_of[i] = static_cast<int>(attrs.size());
      attrs.push_back({"z:" + domain.name(i), query.blocks[i].rows()});
    }
  }
  const DomainPtr aug = make_domain(std::move(attrs));

  std::vector<Factor> pots;
  double log_scale = -model.log_partition();
  for (const auto& [clique, theta] : model.theta()) {
    const double shift = kernels::max_value(theta.values());
    std::vector<double> v(theta.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::exp(theta[k] - shift);
    log_scale += shift;
    pots.emplace_back(aug, clique, std::move(v));
  }
  for (int i = 0; i < d; ++i) {
    const Matrix& q = query.blocks[i];
    const auto n = q.cols();
    if (z_of[i] < 0) {
      // Single row: fold into the smallest factor already holding x_i.
      Factor row(aug, Clique{i}, std::vector<double>(q.data(), q.data() + n));
      auto host = pots.end();
      for (auto it = pots.begin(); it != pots.end(); ++it) {
        if (it->clique().contains(i) && (host == pots.end() || it->size() < host->size())) {
          host = it;
        }
      }
      *host = factor_product(*host, row);
      continue;
    }
    const auto r = q.rows();
    std::vector<double> v(static_cast<std::size_t>(n * r));
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < r; ++b) v[a * r + b] = q(b, a);
    }
    pots.emplace_back(aug, Clique{i, z_of[i]}, std::move(v));
  }

  std::set<int> remaining;
  for (int i = 0; i < d; ++i) remaining.insert(i);
  while (!remaining.empty()) {
    std::vector<Clique> scopes;
    for (const auto& p : pots) scopes.push_back(p.clique());
    const int v = pick_min_fill(scopes, remaining);
    remaining.erase(v);

    Clique scope;
    std::vector<Factor> bucket, rest;
    for (auto& p : pots) {
      if (p.clique().contains(v)) {
        scope = scope.united(p.clique());
        bucket.push_back(std::move(p));
      } else {
        rest.push_back(std::move(p));
      }
    }
    if (aug->clique_size(scope) > options.cell_cap) {
      std::ostringstream msg;
      msg << "variable elimination would build a factor over "
          << to_string(*aug, scope) << " with " << aug->clique_size(scope)
          << " cells (cap " << options.cell_cap << ")";
      throw FeasibilityError(msg.str());
    }
    Factor joint = bucket.front();
    for (std::size_t k = 1; k < bucket.size(); ++k) joint = factor_product(joint, bucket[k]);
    Factor tau = factor_project(joint, scope.without(Clique{v}));
    const double peak = tau.max_abs();
    if (peak > 0.0 && std::isfinite(peak)) {
      tau *= 1.0 / peak;
      log_scale += std::log(peak);
    }
    rest.push_back(std::move(tau));
    pots = std::move(rest);
  }

  Factor result = pots.front();
  for (std::size_t k = 1; k < pots.size(); ++k) result = factor_product(result, pots[k]);

  QueryAnswer answer;
  answer.scale = scale;
  for (int i = 0; i < d; ++i) {
    if (z_of[i] >= 0) answer.shape.push_back(query.blocks[i].rows());
  }
  const double factor = std::exp(log_scale) * (scale == AnswerScale::kCounts ? model.total() : 1.0);
  answer.values.assign(result.values().begin(), result.values().end());
  for (double& x : answer.values) x *= factor;
  return answer;
}

Dataset sample_synthetic(const GraphicalModel& model, std::size_t count,
                         std::uint64_t seed) {
  const JunctionTree& tree = model.tree();
  const Domain& domain = model.domain();
  const std::size_t d = domain.size();
  const auto& cliques = tree.cliques();

  // Per clique: cumulative weights of the non-separator cells, one row per
  // separator assignment.
  struct Table {
    Clique sep, rest;
    std::vector<std::int64_t> sep_strides, rest_shape;
    std::int64_t rows = 1, cols = 1;
    std::vector<double> cdf;
  };
  std::vector<Table> tables(cliques.size());
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    Table& t = tables[c];
    const Clique& clique = cliques[c];
    t.sep = tree.parent(static_cast<int>(c)) >= 0 ? tree.parent_separator(static_cast<int>(c))
                                                  : Clique{};
    t.rest = clique.without(t.sep);
    std::vector<std::int64_t> sep_shape;
    for (int a : t.sep) sep_shape.push_back(domain.cardinality(a));
    for (int a : t.rest) t.rest_shape.push_back(domain.cardinality(a));
    t.sep_strides = kernels::row_major_strides(sep_shape);
    const auto rest_strides = kernels::row_major_strides(t.rest_shape);
    for (auto s : sep_shape) t.rows *= s;
    for (auto s : t.rest_shape) t.cols *= s;
    t.cdf.assign(static_cast<std::size_t>(t.rows * t.cols), 0.0);

    const Factor& mu = model.marginals().at(clique);
    const auto shape = mu.shape();
    std::vector<std::int64_t> coord(shape.size(), 0);
    for (std::size_t k = 0; k < mu.size(); ++k) {
      std::int64_t si = 0, ri = 0;
      for (std::size_t ax = 0, sp = 0, rp = 0; ax < shape.size(); ++ax) {
        if (t.sep.contains(clique[ax])) {
          si += coord[ax] * t.sep_strides[sp++];
        } else {
          ri += coord[ax] * rest_strides[rp++];
        }
      }
      t.cdf[si * t.cols + ri] = std::max(mu[k], 0.0);
      for (int ax = static_cast<int>(shape.size()) - 1; ax >= 0; --ax) {
        if (++coord[ax] < shape[ax]) break;
        coord[ax] = 0;
      }
    }
    for (std::int64_t r = 0; r < t.rows; ++r) {
      for (std::int64_t k = 1; k < t.cols; ++k) t.cdf[r * t.cols + k] += t.cdf[r * t.cols + k - 1];
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::int32_t> cells(count * d, 0);
  for (std::size_t rec = 0; rec < count; ++rec) {
    std::int32_t* row = cells.data() + rec * d;
    for (int c : tree.schedule()) {
      const Table& t = tables[c];
      std::int64_t si = 0;
      for (std::size_t k = 0; k < t.sep.size(); ++k) si += row[t.sep[k]] * t.sep_strides[k];
      std::int64_t ri = static_cast<std::int64_t>(
          draw(t.cdf, static_cast<std::size_t>(si * t.cols), static_cast<std::size_t>(t.cols), rng));
      for (int k = static_cast<int>(t.rest.size()) - 1; k >= 0; --k) {
        row[t.rest[k]] = static_cast<std::int32_t>(ri % t.rest_shape[k]);
        ri /= t.rest_shape[k];
      }
    }
  }
  return Dataset(model.domain_ptr(), std::move(cells));
}

}  // namespace pgm
