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

#include "pgm/dataset.hpp"

#include "pgm/errors.hpp"
#include "pgm/kernels.hpp"

namespace pgm {

Dataset::Dataset(DomainPtr domain, std::vector<std::int32_t> cells)
    : domain_(std::move(domain)), cells_(std::move(cells)) {
  const std::size_t d = domain_->size();
  if (d == 0 ? !cells_.empty() : cells_.size() % d != 0) {
    throw DomainError("record buffer is not a whole number of rows");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const int attr = static_cast<int>(i % d);
    if (cells_[i] < 0 || cells_[i] >= domain_->cardinality(attr)) {
      throw DomainError("record " + std::to_string(i / d) + " has value " +
                        std::to_string(cells_[i]) + " out of range for '" +
                        domain_->name(attr) + "'");
    }
  }
}

Factor Dataset::marginal(const Clique& clique) const {
  Factor out = Factor::filled(domain_, clique, 0.0);
  const auto strides = kernels::row_major_strides(out.shape());
  auto& values = out.mutable_values();
  const std::size_t d = domain_->size();
  for (std::size_t r = 0; r < records(); ++r) {
    std::int64_t idx = 0;
    for (std::size_t k = 0; k < clique.size(); ++k) {
      idx += cells_[r * d + clique[k]] * strides[k];
    }
    values[idx] += 1.0;
  }
  return out;
}

}  // namespace pgm
