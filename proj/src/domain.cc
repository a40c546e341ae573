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

#include "pgm/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "pgm/errors.hpp"

namespace pgm {

Clique::Clique(std::vector<int> attrs) : attrs_(std::move(attrs)) {
  std::sort(attrs_.begin(), attrs_.end());
  if (std::adjacent_find(attrs_.begin(), attrs_.end()) != attrs_.end()) {
    throw CliqueError("clique contains a duplicate attribute");
  }
  if (!attrs_.empty() && attrs_.front() < 0) {
    throw CliqueError("clique contains a negative attribute index");
  }
}

bool Clique::contains(int attr) const {
  return std::binary_search(attrs_.begin(), attrs_.end(), attr);
}

bool Clique::is_subset_of(const Clique& other) const {
  return std::includes(other.attrs_.begin(), other.attrs_.end(),
                       attrs_.begin(), attrs_.end());
}

int Clique::position(int attr) const {
  auto it = std::lower_bound(attrs_.begin(), attrs_.end(), attr);
  if (it == attrs_.end() || *it != attr) return -1;
  return static_cast<int>(it - attrs_.begin());
}

Clique Clique::united(const Clique& other) const {
  Clique out;
  std::set_union(attrs_.begin(), attrs_.end(), other.attrs_.begin(),
                 other.attrs_.end(), std::back_inserter(out.attrs_));
  return out;
}

Clique Clique::intersected(const Clique& other) const {
  Clique out;
  std::set_intersection(attrs_.begin(), attrs_.end(), other.attrs_.begin(),
                        other.attrs_.end(), std::back_inserter(out.attrs_));
  return out;
}

Clique Clique::without(const Clique& other) const {
  Clique out;
  std::set_difference(attrs_.begin(), attrs_.end(), other.attrs_.begin(),
                      other.attrs_.end(), std::back_inserter(out.attrs_));
  return out;
}

Domain::Domain(std::vector<Attribute> attrs) : attrs_(std::move(attrs)) {
  std::set<std::string> seen;
  for (const auto& a : attrs_) {
    if (a.cardinality < 1) {
      throw DomainError("attribute '" + a.name +
                        "' has non-positive cardinality");
    }
    if (!seen.insert(a.name).second) {
      throw DomainError("duplicate attribute name '" + a.name + "'");
    }
  }
}

int Domain::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    if (attrs_[i].name == name) return static_cast<int>(i);
  }
  throw DomainError("unknown attribute '" + std::string(name) + "'");
}

bool Domain::contains(std::string_view name) const {
  return std::any_of(attrs_.begin(), attrs_.end(),
                     [&](const Attribute& a) { return a.name == name; });
}

Clique Domain::clique(const std::vector<std::string>& names) const {
  std::vector<int> idx;
  idx.reserve(names.size());
  for (const auto& n : names) idx.push_back(index_of(n));
  return Clique(std::move(idx));
}

Clique Domain::all() const {
  std::vector<int> idx(attrs_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return Clique(std::move(idx));
}

std::vector<std::string> Domain::names(const Clique& clique) const {
  std::vector<std::string> out;
  out.reserve(clique.size());
  for (int a : clique) out.push_back(attrs_.at(a).name);
  return out;
}

double Domain::clique_size(const Clique& clique) const {
  double size = 1.0;
  for (int a : clique) size *= static_cast<double>(attrs_.at(a).cardinality);
  return size;
}

std::int64_t Domain::clique_cells(const Clique& clique) const {
  std::int64_t cells = 1;
  for (int a : clique) {
    const std::int64_t n = attrs_.at(a).cardinality;
    if (cells > std::numeric_limits<std::int64_t>::max() / n) {
      throw DomainError("clique " + to_string(*this, clique) +
                        " has too many cells to materialize");
    }
    cells *= n;
  }
  return cells;
}

double Domain::log10_size() const {
  double s = 0.0;
  for (const auto& a : attrs_) s += std::log10(static_cast<double>(a.cardinality));
  return s;
}

std::string Domain::size_string() const {
  const double lg = log10_size();
  char buf[64];
  if (lg < 15.0) {
    std::snprintf(buf, sizeof(buf), "%.0f", std::round(std::pow(10.0, lg)));
    return buf;
  }
  double exponent = std::floor(lg);
  double mantissa = std::pow(10.0, lg - exponent);
  if (mantissa >= 9.95) {
    mantissa /= 10.0;
    exponent += 1.0;
  }
  std::snprintf(buf, sizeof(buf), "%.1fe%.0f", mantissa, exponent);
  return buf;
}

std::string to_string(const Domain& domain, const Clique& clique) {
  std::string out = "{";
  bool first = true;
  for (int a : clique) {
    if (!first) out += ",";
    out += a < static_cast<int>(domain.size()) ? domain.name(a)
                                               : std::to_string(a);
    first = false;
  }
  return out + "}";
}

}  // namespace pgm
