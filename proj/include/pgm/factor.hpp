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

#ifndef PGM_FACTOR_HPP_
#define PGM_FACTOR_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pgm/domain.hpp"

namespace pgm {

enum class Space { kLinear, kLog };

// A dense real tensor over a clique. Axes follow the domain's attribute
// order and values are stored row-major. Binary operations align axes by
// attribute, never by position.
class Factor {
 public:
  Factor() = default;
  Factor(DomainPtr domain, Clique clique, std::vector<double> values,
         Space space = Space::kLinear);

  static Factor filled(DomainPtr domain, Clique clique, double value,
                       Space space = Space::kLinear);
  static Factor scalar(DomainPtr domain, double value,
                       Space space = Space::kLinear);

  const DomainPtr& domain_ptr() const { return domain_; }
  const Domain& domain() const { return *domain_; }
  const Clique& clique() const { return clique_; }
  Space space() const { return space_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  std::vector<std::int64_t> shape() const;
  double sum() const;
  double max_abs() const;

  // Broadcasts onto a superset clique (the transpose of projection).
  Factor expand(const Clique& superset) const;
  // Copy with the space tag replaced; values untouched.
  Factor with_space(Space space) const;

  Factor& operator+=(const Factor& other);  // same clique required
  Factor& operator-=(const Factor& other);
  Factor& operator*=(double s);
  Factor& operator+=(double s);

 private:
  DomainPtr domain_;
  Clique clique_;
  std::vector<double> values_;
  Space space_ = Space::kLinear;
};

// Throws DomainMismatchError when the two factors live on different domains.
void check_same_domain(const Domain& a, const Domain& b);

// result(x_{A u B}) = f(x_A) * g(x_B), or f + g when both are in log space.
Factor factor_product(const Factor& f, const Factor& g);

// Sums out every attribute not in `target` (linear space only).
Factor factor_project(const Factor& f, const Clique& target);

// log-space counterpart of factor_project: log sum exp over eliminated axes.
Factor factor_logsumexp(const Factor& f, const Clique& target);

// Exponentiates a log-space factor into a linear factor summing to `total`.
// Returns the factor and log(sum(exp(f))).
std::pair<Factor, double> log_normalize(const Factor& f, double total);

// Shannon entropy of a linear factor (normalised by its own sum), with the
// 0 log 0 = 0 convention.
double entropy(const Factor& f);

}  // namespace pgm

#endif  // PGM_FACTOR_HPP_
