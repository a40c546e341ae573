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

#ifndef PGM_RUN_HPP_
#define PGM_RUN_HPP_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include "pgm/dataset.hpp"
#include "pgm/io.hpp"

namespace pgm {

struct LoadedDataset {
  Dataset data;
  // Per attribute: the value list, the bin layout or "integer".
  Json dictionary;
};

// Reads a CSV with a header row. Columns not in the domain are ignored.
// Categorical attributes without a declared value list are coded in
// first-seen order, and `file` is updated with the dictionary.
LoadedDataset load_dataset(const std::filesystem::path& csv, DomainFile& file);

enum class TotalMode { kKnown, kEstimate };
enum class MechanismKind { kLaplace, kMwem };

struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path domain;
  Json binning;
  Json measurements;  // list of specs
  Json workload;      // list of specs; null = identity on measured cliques
  MechanismKind mechanism = MechanismKind::kLaplace;
  int rounds = 5;
  double epsilon = 1.0;
  Estimator algorithm = Estimator::kAccelerated;
  int iterations = 1000;
  StepRule step_rule = StepRule::kInverseSqrt;
  double parameter_cap = kDefaultParameterCap;
  TotalMode total = TotalMode::kKnown;
  std::uint64_t seed = 0;
  std::size_t synthetic_records = 0;  // 0 = skip
  std::filesystem::path output = "out";
  bool noiseless = false;
};

// Relative paths (including a measurement or workload file given as a string)
// are resolved against the config file's directory.
RunConfig parse_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const Json& j, const std::filesystem::path& base);

struct RunResult {
  double workload_error = 0.0;
  double total = 0.0;
  int iterations = 0;
  double final_loss = 0.0;
};

// Full pipeline. Writes into config.output:
//   measurements.json  estimation_report.json  marginals.json  model_size.json
//   workload_error.json  values.json  timing.json  summary.txt  [synthetic.csv]
// Everything but timing.json is a deterministic function of the config.
RunResult run(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace pgm

#endif  // PGM_RUN_HPP_
