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

// pgm run  --config run.json [--seed N] [--out DIR] [-v] [--noiseless]
// pgm size --config run.json

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pgm/errors.hpp"
#include "pgm/io.hpp"
#include "pgm/run.hpp"

namespace {

int size_command(const std::string& config_path) {
  pgm::RunConfig config = pgm::parse_run_config(config_path);
  pgm::DomainFile file = pgm::parse_domain(pgm::read_json_file(config.domain));
  std::vector<pgm::Clique> cliques;
  const pgm::Json& specs = config.measurements.is_null() ? config.workload : config.measurements;
  for (const auto& s : pgm::parse_measurement_specs(*file.domain, specs)) {
    cliques.push_back(s.clique);
  }
  const pgm::JunctionTree tree = pgm::build_junction_tree(file.domain, cliques);
  pgm::Json out = pgm::model_size_to_json(*file.domain, tree.cliques());
  out["attributes"] = file.domain->size();
  out["log10_domain_size"] = file.domain->log10_size();
  out["parameter_cap"] = config.parameter_cap;
  out["feasible"] = out["parameter_count"].get<double>() <= config.parameter_cap;
  std::cout << pgm::dump_json(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graphical-model estimation from noisy marginal measurements"};
  app.require_subcommand(1);

  std::string config_path;
  std::int64_t seed = -1;
  std::string out_dir;
  int verbosity = 0;
  bool noiseless = false;

  CLI::App* run_cmd = app.add_subcommand("run", "measure, estimate and report");
  run_cmd->add_option("-c,--config", config_path, "config file (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-s,--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("-o,--out", out_dir, "override the output directory");
  run_cmd->add_flag("-v,--verbose", verbosity, "progress on stderr");
  run_cmd->add_flag("--noiseless", noiseless, "skip the noise draws (testing only, not private)");

  CLI::App* size_cmd = app.add_subcommand("size", "model size for the configured cliques");
  size_cmd->add_option("-c,--config", config_path, "config file (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (size_cmd->parsed()) return size_command(config_path);

    pgm::RunConfig config = pgm::parse_run_config(config_path);
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) config.output = out_dir;
    if (noiseless) config.noiseless = true;
    if (config.noiseless) std::cerr << "warning: noiseless run, outputs are not private\n";
    const pgm::RunResult r = pgm::run(config, verbosity > 0 ? &std::cerr : nullptr);
    std::cout << "wrote " << config.output.string() << " (workload error " << r.workload_error
              << ")\n";
  } catch (const pgm::Error& e) {
    std::cerr << "error [" << e.module() << "] " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
