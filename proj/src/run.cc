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

#include "pgm/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <unordered_map>

#include "pgm/errors.hpp"
#include "pgm/inference.hpp"

namespace pgm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Independent stream per pipeline phase, all keyed by the master seed.
std::mt19937_64 phase_stream(std::uint64_t seed, std::uint32_t phase) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    phase};
  return std::mt19937_64(seq);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// One CSV record; double quotes may wrap fields and "" escapes a quote.
std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      if (!trim(cur).empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": stray quote");
      }
      cur.clear();
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
  out.push_back(was_quoted ? cur : trim(cur));
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json names_json(const Domain& domain, const Clique& clique) {
  Json out = Json::array();
  for (const auto& n : domain.names(clique)) out.push_back(n);
  return out;
}

std::string algorithm_name(Estimator e) {
  return e == Estimator::kAccelerated ? "alg2" : "alg1";
}

Json report_to_json(const EstimationReport& r) {
  Json out;
  out["algorithm"] = r.algorithm;
  out["iterations"] = r.iterations;
  out["final_loss"] = r.final_loss;
  out["step_rule"] = r.step_rule;
  out["lipschitz"] = r.lipschitz;
  out["max_abs_theta"] = r.max_abs_theta;
  out["stopped_early"] = r.stopped_early;
  if (r.averaged_marginals) out["averaged_loss"] = r.averaged_loss;
  out["loss_trace"] = r.loss_trace;
  out["step_sizes"] = r.step_sizes;
  return out;
}

void write_synthetic(const std::filesystem::path& path, const Dataset& data,
                     const DomainFile& file) {
  const Domain& d = data.domain();
  std::ostringstream out;
  for (std::size_t a = 0; a < d.size(); ++a) out << (a ? "," : "") << csv_field(d.name(a));
  out << '\n';
  for (std::size_t i = 0; i < data.records(); ++i) {
    const auto rec = data.record(i);
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (a) out << ',';
      const AttributeCoding& c = file.coding[a];
      const std::int32_t v = rec[a];
      switch (c.kind) {
        case AttributeCoding::Kind::kCategorical:
          out << csv_field(c.values[v]);
          break;
        case AttributeCoding::Kind::kInteger:
          out << v;
          break;
        case AttributeCoding::Kind::kBinned: {
          // Bin midpoint, which re-bins to the same index.
          const double w = (c.max - c.min) / static_cast<double>(d.cardinality(a));
          out << format_double(c.min + (v + 0.5) * w);
          break;
        }
      }
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace

LoadedDataset load_dataset(const std::filesystem::path& csv, DomainFile& file) {
  const Domain& d = *file.domain;
  std::ifstream in(csv);
  if (!in) throw ParseError("cannot open " + csv.string());

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(csv.string() + ": empty file");
  const auto header = split_csv(line, line_no);
  std::vector<std::size_t> column(d.size(), header.size());
  for (std::size_t a = 0; a < d.size(); ++a) {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == d.name(a)) column[a] = k;
    }
    if (column[a] == header.size()) {
      throw ParseError(csv.string() + ": missing column " + d.name(a));
    }
  }

  std::vector<std::unordered_map<std::string, std::int32_t>> lookup(d.size());
  for (std::size_t a = 0; a < d.size(); ++a) {
    for (std::size_t k = 0; k < file.coding[a].values.size(); ++k) {
      lookup[a].emplace(file.coding[a].values[k], static_cast<std::int32_t>(k));
    }
  }
  std::vector<bool> declared(d.size());
  for (std::size_t a = 0; a < d.size(); ++a) declared[a] = !file.coding[a].values.empty();

  std::vector<std::int32_t> cells;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line, line_no);
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    for (std::size_t a = 0; a < d.size(); ++a) {
      const std::string& text = fields[column[a]];
      const std::int64_t n = d.cardinality(a);
      AttributeCoding& c = file.coding[a];
      const std::string where = "line " + std::to_string(line_no) + ", column " + d.name(a);
      std::int64_t code = 0;
      switch (c.kind) {
        case AttributeCoding::Kind::kCategorical: {
          auto it = lookup[a].find(text);
          if (it != lookup[a].end()) {
            code = it->second;
          } else if (declared[a]) {
            throw ParseError(where + ": unknown value \"" + text + "\"");
          } else if (static_cast<std::int64_t>(c.values.size()) == n) {
            throw ParseError(where + ": value \"" + text + "\" is category " +
                             std::to_string(n + 1) + " but the domain allows " +
                             std::to_string(n));
          } else {
            code = static_cast<std::int64_t>(c.values.size());
            c.values.push_back(text);
            lookup[a].emplace(text, static_cast<std::int32_t>(code));
          }
          break;
        }
        case AttributeCoding::Kind::kInteger: {
          std::size_t used = 0;
          try {
            code = std::stoll(text, &used);
          } catch (const std::exception&) {
            used = 0;
          }
          if (used == 0 || used != text.size()) {
            throw ParseError(where + ": \"" + text + "\" is not an integer");
          }
          if (code < 0 || code >= n) {
            throw ParseError(where + ": " + text + " outside [0, " + std::to_string(n) + ")");
          }
          break;
        }
        case AttributeCoding::Kind::kBinned: {
          std::size_t used = 0;
          double v = 0.0;
          try {
            v = std::stod(text, &used);
          } catch (const std::exception&) {
            used = 0;
          }
          if (used == 0 || used != text.size() || !std::isfinite(v)) {
            throw ParseError(where + ": \"" + text + "\" is not a number");
          }
          if (v < c.min || v >= c.max) {
            if (c.strict) {
              throw ParseError(where + ": " + text + " outside [" + format_double(c.min) +
                               ", " + format_double(c.max) + ")");
            }
            v = std::clamp(v, c.min, c.max);
          }
          code = static_cast<std::int64_t>(
              std::floor((v - c.min) / (c.max - c.min) * static_cast<double>(n)));
          code = std::clamp<std::int64_t>(code, 0, n - 1);
          break;
        }
      }
      cells.push_back(static_cast<std::int32_t>(code));
    }
  }

  LoadedDataset out{Dataset(file.domain, std::move(cells)), Json::object()};
  for (std::size_t a = 0; a < d.size(); ++a) {
    const AttributeCoding& c = file.coding[a];
    switch (c.kind) {
      case AttributeCoding::Kind::kCategorical:
        out.dictionary[d.name(a)] = c.values;
        break;
      case AttributeCoding::Kind::kInteger:
        out.dictionary[d.name(a)] = "integer";
        break;
      case AttributeCoding::Kind::kBinned:
        out.dictionary[d.name(a)] = {{"min", c.min}, {"max", c.max},
                                     {"bins", d.cardinality(a)}, {"strict", c.strict}};
        break;
    }
  }
  return out;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path());
}

RunConfig parse_run_config(const Json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() ? p : base / p; };
  auto require = [&](const char* key) -> const Json& {
    if (!j.contains(key)) throw ConfigError(std::string("config lacks \"") + key + "\"");
    return j[key];
  };
  auto inline_or_file = [&](const Json& v) {
    return v.is_string() ? read_json_file(resolve(v.get<std::string>())) : v;
  };
  RunConfig c;
  try {
    c.dataset = resolve(require("dataset").get<std::string>());
    c.domain = resolve(require("domain").get<std::string>());
    c.binning = j.value("binning", Json());
    c.epsilon = j.value("epsilon", 1.0);
    c.iterations = j.value("iterations", 1000);
    c.rounds = j.value("rounds", 5);
    c.parameter_cap = j.value("parameter_cap", kDefaultParameterCap);
    c.seed = j.value("seed", std::uint64_t{0});
    c.synthetic_records = j.value("synthetic", std::size_t{0});
    c.noiseless = j.value("noiseless", false);
    c.output = resolve(j.value("output", std::string("out")));

    const std::string mech = j.value("mechanism", std::string("laplace"));
    if (mech == "laplace") c.mechanism = MechanismKind::kLaplace;
    else if (mech == "mwem") c.mechanism = MechanismKind::kMwem;
    else throw ConfigError("unknown mechanism \"" + mech + "\" (laplace, mwem)");

    const std::string alg = j.value("algorithm", std::string("alg2"));
    if (alg == "alg1") c.algorithm = Estimator::kMirrorDescent;
    else if (alg == "alg2") c.algorithm = Estimator::kAccelerated;
    else throw ConfigError("unknown algorithm \"" + alg + "\" (alg1, alg2)");

    const std::string rule = j.value("step_rule", std::string("inverse_sqrt"));
    if (rule == "constant") c.step_rule = StepRule::kConstant;
    else if (rule == "inverse_sqrt") c.step_rule = StepRule::kInverseSqrt;
    else if (rule == "line_search") c.step_rule = StepRule::kLineSearch;
    else throw ConfigError("unknown step rule \"" + rule + "\"");

    const std::string total = j.value("total", std::string("known"));
    if (total == "known") c.total = TotalMode::kKnown;
    else if (total == "estimate") c.total = TotalMode::kEstimate;
    else throw ConfigError("unknown total mode \"" + total + "\" (known, estimate)");

    if (j.contains("measurements")) c.measurements = inline_or_file(j["measurements"]);
    if (j.contains("workload")) c.workload = inline_or_file(j["workload"]);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) throw ConfigError("epsilon must be positive");
  if (c.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (c.rounds < 1) throw ConfigError("rounds must be at least 1");
  if (c.mechanism == MechanismKind::kLaplace && c.measurements.is_null()) {
    throw ConfigError("laplace mechanism needs \"measurements\"");
  }
  if (c.mechanism == MechanismKind::kMwem && c.workload.is_null()) {
    throw ConfigError("mwem needs a \"workload\"");
  }
  return c;
}

RunResult run(const RunConfig& config, std::ostream* log) {
  auto say = [&](const std::string& s) {
    if (log) *log << s << '\n';
  };
  Json timing;
  const auto t_start = Clock::now();

  DomainFile file = parse_domain(read_json_file(config.domain));
  apply_binning(file, config.binning);
  const DomainPtr domain = file.domain;
  std::filesystem::create_directories(config.output);

  EstimatorConfig est;
  est.algorithm = config.algorithm;
  est.iterations = config.iterations;
  est.step_rule = config.step_rule;
  est.parameter_cap = config.parameter_cap;

  // Measurement phase: the only code that sees the raw records.
  auto t0 = Clock::now();
  std::vector<LinearMeasurement> measurements;
  std::optional<PrivacyAccountant> accountant;
  std::optional<MwemResult> mwem;
  Workload workload;
  CliqueVector truth;
  Json dictionary;
  std::int64_t records = 0;
  {
    LoadedDataset loaded = load_dataset(config.dataset, file);
    const Dataset& data = loaded.data;
    dictionary = std::move(loaded.dictionary);
    records = static_cast<std::int64_t>(data.records());
    if (records == 0) throw ParseError(config.dataset.string() + ": no records");
    say("loaded " + std::to_string(records) + " records over a domain of size " +
        domain->size_string());

    std::vector<MeasurementSpec> specs;
    if (!config.measurements.is_null()) specs = parse_measurement_specs(*domain, config.measurements);
    if (!config.workload.is_null()) {
      workload = parse_workload(*domain, config.workload);
    } else {
      for (const auto& s : specs) {
        const auto n = static_cast<Eigen::Index>(domain->clique_cells(s.clique));
        workload.entries.push_back({s.clique, Matrix::Identity(n, n)});
      }
    }
    for (const auto& w : workload.entries) {
      if (!truth.contains(w.clique)) truth.insert(data.marginal(w.clique));
    }

    auto rng = phase_stream(config.seed, 1);
    if (config.mechanism == MechanismKind::kLaplace) {
      accountant.emplace(config.epsilon);
      std::int64_t weight = 0;
      for (const auto& s : specs) weight += s.weight;
      for (const auto& s : specs) {
        measurements.push_back(laplace_measure(data.marginal(s.clique), s.query,
                                               Rational::of(s.weight, weight), records, rng,
                                               *accountant, 0, config.noiseless));
      }
    } else {
      MwemOptions opts;
      opts.epsilon = config.epsilon;
      opts.rounds = config.rounds;
      opts.estimator = est;
      opts.noiseless = config.noiseless;
      mwem.emplace(mwem_pgm(data, workload, opts, rng));
      measurements = mwem->measurements;
      accountant.emplace(mwem->accountant);
    }
  }
  timing["measure_seconds"] = seconds_since(t0);
  say("took " + std::to_string(measurements.size()) + " measurements");

  Json mjson;
  Json mlist = Json::array();
  for (const auto& m : measurements) mlist.push_back(measurement_to_json(*domain, m));
  mjson["measurements"] = mlist;
  mjson["accountant"] = accountant_to_json(*domain, *accountant);
  if (mwem) {
    Json rounds = Json::array();
    for (const auto& r : mwem->rounds) {
      rounds.push_back({{"round", r.round}, {"clique", names_json(*domain, r.clique)},
                        {"row", r.row}, {"score", r.score}});
    }
    mjson["mwem_rounds"] = rounds;
  }
  write_text_file(config.output / "measurements.json", dump_json(mjson));
  write_text_file(config.output / "values.json", dump_json(dictionary));

  // Everything below works from the measurement log alone.
  double total = static_cast<double>(records);
  Json total_json = {{"mode", config.total == TotalMode::kKnown ? "known" : "estimate"}};
  if (config.total == TotalMode::kEstimate) {
    const TotalEstimate te = estimate_total(measurements);
    total = te.total;
    total_json["variance"] = te.variance;
    if (!(total > 0.0)) {
      throw TotalUnidentifiableError("estimated total " + format_double(total) +
                                     " is not positive");
    }
  }
  total_json["total"] = total;

  std::vector<Clique> cliques;
  for (const auto& m : measurements) cliques.push_back(m.clique);
  const JunctionTree tree = build_junction_tree(domain, cliques);
  const Json size_json = model_size_to_json(*domain, tree.cliques());
  write_text_file(config.output / "model_size.json", dump_json(size_json));
  say("model: " + std::to_string(tree.cliques().size()) + " cliques, " +
      format_double(size_json["parameter_count"].get<double>()) + " parameters");

  t0 = Clock::now();
  std::optional<Estimate> fit;
  try {
    fit.emplace(fit_model(domain, measurements, total, est));
  } catch (const FeasibilityError& e) {
    throw FeasibilityError(std::string(e.what()) + "; model size " + dump_json(size_json, 0));
  }
  timing["estimate_seconds"] = seconds_since(t0);
  timing["iteration_seconds"] = fit->report.seconds;
  const GraphicalModel& model = fit->model;
  say("estimation finished after " + std::to_string(fit->report.iterations) +
      " iterations, loss " + format_double(fit->report.final_loss));

  Json report = report_to_json(fit->report);
  report["total"] = total_json;
  report["model_size"] = size_json;
  write_text_file(config.output / "estimation_report.json", dump_json(report));

  Json marg = Json::array();
  for (const auto& [clique, f] : model.marginals()) marg.push_back(factor_to_json(f));
  write_text_file(config.output / "marginals.json", dump_json(Json{{"marginals", marg}}));

  RunResult result;
  result.total = total;
  result.iterations = fit->report.iterations;
  result.final_loss = fit->report.final_loss;

  Json werr;
  if (!workload.entries.empty()) {
    result.workload_error = workload_error(truth, model, workload);
    Json per = Json::array();
    for (const auto& w : workload.entries) {
      Workload single{{w}};
      per.push_back({{"clique", names_json(*domain, w.clique)},
                     {"error", workload_error(truth, model, single)}});
    }
    werr["workload_error"] = result.workload_error;
    werr["per_clique"] = per;
    say("workload error " + format_double(result.workload_error));
  }
  write_text_file(config.output / "workload_error.json", dump_json(werr));

  if (config.synthetic_records > 0) {
    t0 = Clock::now();
    auto seeder = phase_stream(config.seed, 2);
    const Dataset synth = sample_synthetic(model, config.synthetic_records, seeder());
    write_synthetic(config.output / "synthetic.csv", synth, file);
    timing["synthetic_seconds"] = seconds_since(t0);
  }
  timing["total_seconds"] = seconds_since(t_start);
  write_text_file(config.output / "timing.json", dump_json(timing));

  std::ostringstream sum;
  sum << "records            " << records << '\n'
      << "domain size        " << domain->size_string() << '\n'
      << "mechanism          " << (config.mechanism == MechanismKind::kLaplace ? "laplace" : "mwem")
      << '\n'
      << "epsilon            " << format_double(config.epsilon) << " (consumed "
      << format_double(accountant->consumed()) << ")\n"
      << "noiseless          " << (accountant->any_noiseless() ? "yes" : "no") << '\n'
      << "measurements       " << measurements.size() << '\n'
      << "model parameters   " << format_double(size_json["parameter_count"].get<double>()) << '\n'
      << "algorithm          " << algorithm_name(config.algorithm) << '\n'
      << "iterations         " << fit->report.iterations << '\n'
      << "final loss         " << format_double(fit->report.final_loss) << '\n'
      << "total              " << format_double(total) << '\n';
  if (!workload.entries.empty()) {
    sum << "workload error     " << format_double(result.workload_error) << '\n';
  }
  write_text_file(config.output / "summary.txt", sum.str());
  return result;
}

}  // namespace pgm
