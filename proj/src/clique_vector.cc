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

#include "pgm/clique_vector.hpp"

#include <algorithm>
#include <cmath>

#include "pgm/errors.hpp"

namespace pgm {

CliqueVector CliqueVector::zeros(const DomainPtr& domain,
                                 const std::vector<Clique>& cliques,
                                 Space space) {
  CliqueVector out;
  for (const auto& c : cliques) out.insert(Factor::filled(domain, c, 0.0, space));
  return out;
}

void CliqueVector::insert(Factor factor) {
  if (!entries_.empty()) {
    check_same_domain(entries_.begin()->second.domain(), factor.domain());
  }
  Clique key = factor.clique();
  entries_.insert_or_assign(std::move(key), std::move(factor));
}

const Factor& CliqueVector::at(const Clique& clique) const {
  auto it = entries_.find(clique);
  if (it == entries_.end()) throw CliqueError("clique vector has no such clique");
  return it->second;
}

Factor& CliqueVector::at(const Clique& clique) {
  auto it = entries_.find(clique);
  if (it == entries_.end()) throw CliqueError("clique vector has no such clique");
  return it->second;
}

std::vector<Clique> CliqueVector::cliques() const {
  std::vector<Clique> out;
  out.reserve(entries_.size());
  for (const auto& [c, f] : entries_) out.push_back(c);
  return out;
}

void CliqueVector::check_matching(const CliqueVector& other) const {
  if (other.entries_.size() != entries_.size()) {
    throw CliqueError("clique vectors have different clique sets");
  }
  for (auto a = entries_.begin(), b = other.entries_.begin(); a != entries_.end();
       ++a, ++b) {
    if (a->first != b->first) {
      throw CliqueError("clique vectors have different clique sets");
    }
  }
}

CliqueVector& CliqueVector::axpy(double alpha, const CliqueVector& other) {
  check_matching(other);
  auto b = other.entries_.begin();
  for (auto& [c, f] : entries_) {
    auto& dst = f.mutable_values();
    const auto src = b->second.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += alpha * src[i];
    ++b;
  }
  return *this;
}

CliqueVector& CliqueVector::operator*=(double s) {
  for (auto& [c, f] : entries_) f *= s;
  return *this;
}

CliqueVector CliqueVector::scaled(double s) const {
  CliqueVector out = *this;
  out *= s;
  return out;
}

CliqueVector CliqueVector::with_space(Space space) const {
  CliqueVector out;
  for (const auto& [c, f] : entries_) out.insert(f.with_space(space));
  return out;
}

double CliqueVector::dot(const CliqueVector& other) const {
  check_matching(other);
  double s = 0.0;
  auto b = other.entries_.begin();
  for (const auto& [c, f] : entries_) {
    const auto x = f.values();
    const auto y = b->second.values();
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    ++b;
  }
  return s;
}

double CliqueVector::max_abs() const {
  double m = 0.0;
  for (const auto& [c, f] : entries_) m = std::max(m, f.max_abs());
  return m;
}

bool CliqueVector::all_finite() const {
  for (const auto& [c, f] : entries_) {
    for (double v : f.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

CliqueVector CliqueVector::mix(const CliqueVector& a, const CliqueVector& b,
                               double c) {
  CliqueVector out = a.scaled(1.0 - c);
  out.axpy(c, b);
  return out;
}

}  // namespace pgm
