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

#ifndef PGM_IO_HPP_
#define PGM_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pgm/domain.hpp"
#include "pgm/estimation.hpp"
#include "pgm/mechanisms.hpp"

namespace pgm {

using Json = nlohmann::ordered_json;

// How raw CSV text becomes a category index.
struct AttributeCoding {
  enum class Kind {
    kCategorical,  // value dictionary; first-seen order unless `values` given
    kInteger,      // the text is already the index
    kBinned,       // equal-width bins over [min, max)
  };
  Kind kind = Kind::kCategorical;
  std::vector<std::string> values;
  double min = 0.0;
  double max = 0.0;
  // Out-of-range numbers are errors; otherwise they clamp to the end bins.
  bool strict = true;
};

struct DomainFile {
  DomainPtr domain;
  std::vector<AttributeCoding> coding;
};

// {"name": cardinality, ...} in attribute order. An entry may instead be an
// object {"size": n, "values": [...]} / {"size": n, "coding": "integer"} /
// {"size": n, "min": a, "max": b, "strict": true}.
DomainFile parse_domain(const Json& j);
Json domain_to_json(const Domain& domain);

// Binning rules {"attr": {"min": a, "max": b, "bins": n, "strict": bool}}
// applied over a parsed domain. `bins` must equal the attribute cardinality.
void apply_binning(DomainFile& file, const Json& rules);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Serializes with every double printed to 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);

// Query matrix over `clique` from a spec. Accepted forms:
//   "identity"                         same block on every attribute
//   {"A": "identity", "B": {"kind": "indicator", "index": 2}}
//   {"matrix": [[...], ...]}           dense rows over the clique's cells
// Attributes missing from a per-attribute object default to identity.
Matrix parse_clique_query(const Domain& domain, const Clique& clique, const Json& spec);

struct MeasurementSpec {
  Clique clique;
  Matrix query;
  // Relative share of the budget.
  std::int64_t weight = 1;
};

// [{"clique": ["A", "B"], "query": <spec>, "weight": 1}, ...]
std::vector<MeasurementSpec> parse_measurement_specs(const Domain& domain, const Json& j);

// Same layout as measurement specs; weights are ignored.
Workload parse_workload(const Domain& domain, const Json& j);

Json factor_to_json(const Factor& f);
Json measurement_to_json(const Domain& domain, const LinearMeasurement& m);
LinearMeasurement measurement_from_json(const Domain& domain, const Json& j);
Json accountant_to_json(const Domain& domain, const PrivacyAccountant& accountant);
Json model_size_to_json(const Domain& domain, const std::vector<Clique>& cliques);

}  // namespace pgm

#endif  // PGM_IO_HPP_
