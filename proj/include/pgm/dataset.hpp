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

#ifndef PGM_DATASET_HPP_
#define PGM_DATASET_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "pgm/factor.hpp"

namespace pgm {

// Integer-coded records over a domain, stored row-major (one row per
// record, one column per domain attribute).
class Dataset {
 public:
  Dataset() = default;
  // Throws DomainError if any value lies outside [0, n_i).
  Dataset(DomainPtr domain, std::vector<std::int32_t> cells);

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t records() const {
    return domain_->size() == 0 ? 0 : cells_.size() / domain_->size();
  }
  std::span<const std::int32_t> record(std::size_t i) const {
    return {cells_.data() + i * domain_->size(), domain_->size()};
  }
  std::span<const std::int32_t> cells() const { return cells_; }

  // Count-scale contingency table over `clique`.
  Factor marginal(const Clique& clique) const;

 private:
  DomainPtr domain_;
  std::vector<std::int32_t> cells_;
};

}  // namespace pgm

#endif  // PGM_DATASET_HPP_
