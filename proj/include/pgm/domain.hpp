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

#ifndef PGM_DOMAIN_HPP_
#define PGM_DOMAIN_HPP_

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pgm {

struct Attribute {
  std::string name;
  std::int64_t cardinality = 1;

  bool operator==(const Attribute&) const = default;
};

// An ordered subset of a domain's attributes, stored as attribute indices in
// ascending (domain) order. Two cliques over the same attribute set compare
// equal regardless of how they were constructed.
class Clique {
 public:
  Clique() = default;
  // Sorts the indices; throws CliqueError on duplicates or negatives.
  explicit Clique(std::vector<int> attrs);
  Clique(std::initializer_list<int> attrs)
      : Clique(std::vector<int>(attrs)) {}

  std::size_t size() const { return attrs_.size(); }
  bool empty() const { return attrs_.empty(); }
  const std::vector<int>& attrs() const { return attrs_; }
  int operator[](std::size_t i) const { return attrs_[i]; }
  auto begin() const { return attrs_.begin(); }
  auto end() const { return attrs_.end(); }

  bool contains(int attr) const;
  bool is_subset_of(const Clique& other) const;
  // Position of `attr` inside this clique, or -1.
  int position(int attr) const;

  Clique united(const Clique& other) const;
  Clique intersected(const Clique& other) const;
  Clique without(const Clique& other) const;

  auto operator<=>(const Clique&) const = default;
  bool operator==(const Clique&) const = default;

 private:
  std::vector<int> attrs_;
};

// Named discrete attributes with cardinalities. The product of all
// cardinalities is never formed as an integer; use log10_size().
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<Attribute> attrs);

  std::size_t size() const { return attrs_.size(); }
  const Attribute& operator[](std::size_t i) const { return attrs_[i]; }
  const std::vector<Attribute>& attributes() const { return attrs_; }
  std::int64_t cardinality(int attr) const { return attrs_[attr].cardinality; }
  const std::string& name(int attr) const { return attrs_[attr].name; }

  // Index of the named attribute; throws DomainError if absent.
  int index_of(std::string_view name) const;
  bool contains(std::string_view name) const;

  Clique clique(const std::vector<std::string>& names) const;
  Clique all() const;
  std::vector<std::string> names(const Clique& clique) const;

  // Number of cells of the clique's marginal, as a double (saturates to inf).
  double clique_size(const Clique& clique) const;
  // Exact cell count; throws DomainError if it does not fit in 63 bits.
  std::int64_t clique_cells(const Clique& clique) const;

  double log10_size() const;
  // e.g. "1.2e19"; exact integer text when the size is below 1e15.
  std::string size_string() const;

  bool operator==(const Domain&) const = default;

 private:
  std::vector<Attribute> attrs_;
};

using DomainPtr = std::shared_ptr<const Domain>;

inline DomainPtr make_domain(std::vector<Attribute> attrs) {
  return std::make_shared<const Domain>(std::move(attrs));
}

// Human-readable "{A,B}".
std::string to_string(const Domain& domain, const Clique& clique);

}  // namespace pgm

#endif  // PGM_DOMAIN_HPP_
