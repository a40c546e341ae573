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

#ifndef PGM_CLIQUE_VECTOR_HPP_
#define PGM_CLIQUE_VECTOR_HPP_

#include <map>
#include <vector>

#include "pgm/factor.hpp"

namespace pgm {

// Factors keyed by clique over one shared domain. Holds parameter vectors
// (log space) and marginal vectors (linear space).
class CliqueVector {
 public:
  CliqueVector() = default;

  static CliqueVector zeros(const DomainPtr& domain,
                            const std::vector<Clique>& cliques,
                            Space space = Space::kLinear);

  void insert(Factor factor);
  bool contains(const Clique& clique) const { return entries_.count(clique) > 0; }
  const Factor& at(const Clique& clique) const;
  Factor& at(const Clique& clique);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::vector<Clique> cliques() const;
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }

  // this += alpha * other (matching clique sets).
  CliqueVector& axpy(double alpha, const CliqueVector& other);
  CliqueVector& operator*=(double s);
  CliqueVector scaled(double s) const;
  // Copy with every factor retagged to `space`.
  CliqueVector with_space(Space space) const;

  double dot(const CliqueVector& other) const;
  double max_abs() const;
  bool all_finite() const;

  // (1 - c) * a + c * b.
  static CliqueVector mix(const CliqueVector& a, const CliqueVector& b, double c);

 private:
  void check_matching(const CliqueVector& other) const;

  std::map<Clique, Factor> entries_;
};

}  // namespace pgm

#endif  // PGM_CLIQUE_VECTOR_HPP_
