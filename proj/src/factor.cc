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

#include "pgm/factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pgm/errors.hpp"
#include "pgm/kernels.hpp"

namespace pgm {

namespace {

// Strides of `f` laid against the axes of `target` (0 for absent axes).
std::vector<std::int64_t> aligned_strides(const Factor& f,
                                          const Clique& target) {
  const auto own = kernels::row_major_strides(f.shape());
  std::vector<std::int64_t> out(target.size(), 0);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const int pos = f.clique().position(target[i]);
    if (pos >= 0) out[i] = own[pos];
  }
  return out;
}

std::vector<std::uint8_t> keep_mask(const Clique& from, const Clique& to) {
  if (!to.is_subset_of(from)) {
    throw CliqueError("projection target is not a subset of the factor clique");
  }
  std::vector<std::uint8_t> keep(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) keep[i] = to.contains(from[i]);
  return keep;
}

}  // namespace

Factor::Factor(DomainPtr domain, Clique clique, std::vector<double> values,
               Space space)
    : domain_(std::move(domain)),
      clique_(std::move(clique)),
      values_(std::move(values)),
      space_(space) {
  if (!domain_) throw DomainError("factor requires a domain");
  if (!clique_.empty() && clique_.attrs().back() >= static_cast<int>(domain_->size())) {
    throw CliqueError("clique refers to an attribute outside the domain");
  }
  const auto cells = domain_->clique_cells(clique_);
  if (static_cast<std::int64_t>(values_.size()) != cells) {
    throw CliqueError("factor over " + to_string(*domain_, clique_) + " needs " +
                      std::to_string(cells) + " values, got " +
                      std::to_string(values_.size()));
  }
}

Factor Factor::filled(DomainPtr domain, Clique clique, double value,
                      Space space) {
  const auto cells = domain->clique_cells(clique);
  return Factor(std::move(domain), std::move(clique),
                std::vector<double>(static_cast<std::size_t>(cells), value),
                space);
}

Factor Factor::scalar(DomainPtr domain, double value, Space space) {
  return Factor(std::move(domain), Clique{}, {value}, space);
}

std::vector<std::int64_t> Factor::shape() const {
  std::vector<std::int64_t> s;
  s.reserve(clique_.size());
  for (int a : clique_) s.push_back(domain_->cardinality(a));
  return s;
}

double Factor::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double Factor::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Factor Factor::expand(const Clique& superset) const {
  if (!clique_.is_subset_of(superset)) {
    throw CliqueError("expansion target " + to_string(*domain_, superset) +
                      " does not contain " + to_string(*domain_, clique_));
  }
  if (superset == clique_) return *this;
  Factor out = filled(domain_, superset, 0.0, space_);
  const auto shape = out.shape();
  const auto strides = aligned_strides(*this, superset);
  const std::vector<std::int64_t> zero(shape.size(), 0);
  const double unit = space_ == Space::kLog ? 0.0 : 1.0;
  kernels::broadcast_combine(shape, values_, strides,
                             std::span<const double>(&unit, 1), zero,
                             space_ == Space::kLog ? kernels::Combine::kAdd
                                                   : kernels::Combine::kMultiply,
                             out.values_);
  return out;
}

Factor Factor::with_space(Space space) const {
  Factor out = *this;
  out.space_ = space;
  return out;
}

Factor& Factor::operator+=(const Factor& other) {
  check_same_domain(*domain_, other.domain());
  if (other.clique_ != clique_) {
    throw CliqueError("elementwise sum of factors over different cliques");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Factor& Factor::operator-=(const Factor& other) {
  check_same_domain(*domain_, other.domain());
  if (other.clique_ != clique_) {
    throw CliqueError("elementwise difference of factors over different cliques");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Factor& Factor::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Factor& Factor::operator+=(double s) {
  for (double& v : values_) v += s;
  return *this;
}

void check_same_domain(const Domain& a, const Domain& b) {
  if (&a != &b && !(a == b)) {
    throw DomainMismatchError("factors are defined over different domains");
  }
}

Factor factor_product(const Factor& f, const Factor& g) {
  check_same_domain(f.domain(), g.domain());
  if (f.space() != g.space()) {
    throw DomainMismatchError("cannot multiply a log-space and a linear factor");
  }
  const Clique target = f.clique().united(g.clique());
  Factor out = Factor::filled(f.domain_ptr(), target, 0.0, f.space());
  kernels::broadcast_combine(out.shape(), f.values(), aligned_strides(f, target),
                             g.values(), aligned_strides(g, target),
                             f.space() == Space::kLog ? kernels::Combine::kAdd
                                                      : kernels::Combine::kMultiply,
                             out.mutable_values());
  return out;
}

Factor factor_project(const Factor& f, const Clique& target) {
  if (f.space() != Space::kLinear) {
    throw DomainMismatchError("factor_project expects a linear-space factor");
  }
  const auto keep = keep_mask(f.clique(), target);
  if (target == f.clique()) return f;
  Factor out = Factor::filled(f.domain_ptr(), target, 0.0, Space::kLinear);
  kernels::reduce_sum(f.shape(), f.values(), keep, out.mutable_values());
  return out;
}

Factor factor_logsumexp(const Factor& f, const Clique& target) {
  if (f.space() != Space::kLog) {
    throw DomainMismatchError("factor_logsumexp expects a log-space factor");
  }
  const auto keep = keep_mask(f.clique(), target);
  if (target == f.clique()) return f;
  Factor out = Factor::filled(f.domain_ptr(), target, 0.0, Space::kLog);
  kernels::reduce_logsumexp(f.shape(), f.values(), keep, out.mutable_values());
  return out;
}

std::pair<Factor, double> log_normalize(const Factor& f, double total) {
  if (f.space() != Space::kLog) {
    throw DomainMismatchError("log_normalize expects a log-space factor");
  }
  const double m = kernels::max_value(f.values());
  if (m == -std::numeric_limits<double>::infinity()) {
    throw DegenerateFactorError("every entry of the log factor is -inf");
  }
  if (!std::isfinite(m)) {
    throw DegenerateFactorError("log factor contains non-finite entries");
  }
  const double s = kernels::sum_exp_shifted(f.values(), m);
  const double log_z = m + std::log(s);
  std::vector<double> values(f.size());
  const double scale = total / s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::exp(f[i] - m) * scale;
  }
  return {Factor(f.domain_ptr(), f.clique(), std::move(values), Space::kLinear),
          log_z};
}

double entropy(const Factor& f) {
  const double total = f.sum();
  double h = 0.0;
  for (double v : f.values()) {
    if (v > 0.0) {
      const double p = v / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace pgm
