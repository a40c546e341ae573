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

#include "pgm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pgm/errors.hpp"
#include "pgm/inference.hpp"

namespace pgm {

namespace {

std::int64_t get_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ConfigError(what + " must be an integer");
  return j.get<std::int64_t>();
}

double get_number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

std::vector<std::int64_t> get_int_list(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be a list of integers");
  std::vector<std::int64_t> out;
  for (const auto& v : j) out.push_back(get_int(v, what));
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix parse_block(const Json& spec, std::int64_t n, const std::string& attr) {
  if (spec.is_string()) return build_block(parse_block_kind(spec.get<std::string>()), {}, n);
  if (!spec.is_object() || !spec.contains("kind")) {
    throw ConfigError("block for " + attr + " must be a name or an object with \"kind\"");
  }
  BlockParams p;
  if (spec.contains("index")) p.index = get_int(spec["index"], attr + ".index");
  if (spec.contains("set")) p.set = get_int_list(spec["set"], attr + ".set");
  if (spec.contains("mapping")) p.mapping = get_int_list(spec["mapping"], attr + ".mapping");
  if (spec.contains("rows")) p.rows = get_int(spec["rows"], attr + ".rows");
  if (spec.contains("moments")) p.moments = get_int(spec["moments"], attr + ".moments");
  return build_block(parse_block_kind(spec["kind"].get<std::string>()), p, n);
}

Clique parse_clique(const Domain& domain, const Json& j) {
  if (!j.is_array()) throw ConfigError("\"clique\" must be a list of attribute names");
  std::vector<std::string> names;
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError("\"clique\" must be a list of attribute names");
    names.push_back(v.get<std::string>());
  }
  return domain.clique(names);
}

Json names_json(const Domain& domain, const Clique& clique) {
  Json out = Json::array();
  for (const auto& n : domain.names(clique)) out.push_back(n);
  return out;
}

void dump_value(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? "\n" + std::string(indent * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(indent * depth, ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += sep;
        dump_value(it.value(), indent, depth + 1, out);
      }
      out += close;
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Flat numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat && indent > 0 ? ", " : ",";
        first = false;
        if (!flat) out += pad;
        dump_value(v, indent, depth + 1, out);
      }
      if (!flat) out += close;
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

DomainFile parse_domain(const Json& j) {
  if (!j.is_object() || j.empty()) {
    throw ConfigError("domain must be a non-empty object of name -> cardinality");
  }
  DomainFile file;
  std::vector<Attribute> attrs;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& name = it.key();
    AttributeCoding coding;
    std::int64_t n = 0;
    if (it.value().is_number_integer()) {
      n = it.value().get<std::int64_t>();
    } else if (it.value().is_object()) {
      const Json& e = it.value();
      if (!e.contains("size")) throw ConfigError("domain entry " + name + " lacks \"size\"");
      n = get_int(e["size"], name + ".size");
      if (e.contains("values")) {
        for (const auto& v : e["values"]) {
          coding.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
        if (static_cast<std::int64_t>(coding.values.size()) != n) {
          throw ConfigError("domain entry " + name + " lists " +
                            std::to_string(coding.values.size()) + " values for size " +
                            std::to_string(n));
        }
      } else if (e.contains("min") || e.contains("max")) {
        coding.kind = AttributeCoding::Kind::kBinned;
        coding.min = get_number(e.value("min", Json()), name + ".min");
        coding.max = get_number(e.value("max", Json()), name + ".max");
        coding.strict = e.value("strict", true);
        if (!(coding.max > coding.min)) throw ConfigError("empty bin range for " + name);
      } else if (e.value("coding", std::string("categorical")) == "integer") {
        coding.kind = AttributeCoding::Kind::kInteger;
      }
    } else {
      throw ConfigError("domain entry " + name + " must be an integer or an object");
    }
    if (n < 1) throw ConfigError("cardinality of " + name + " must be at least 1");
    attrs.push_back({name, n});
    file.coding.push_back(std::move(coding));
  }
  file.domain = make_domain(std::move(attrs));
  return file;
}

Json domain_to_json(const Domain& domain) {
  Json out = Json::object();
  for (const auto& a : domain.attributes()) out[a.name] = a.cardinality;
  return out;
}

void apply_binning(DomainFile& file, const Json& rules) {
  if (rules.is_null()) return;
  if (!rules.is_object()) throw ConfigError("\"binning\" must be an object");
  for (auto it = rules.begin(); it != rules.end(); ++it) {
    const int attr = file.domain->index_of(it.key());
    const Json& r = it.value();
    AttributeCoding c;
    c.kind = AttributeCoding::Kind::kBinned;
    c.min = get_number(r.value("min", Json()), it.key() + ".min");
    c.max = get_number(r.value("max", Json()), it.key() + ".max");
    c.strict = r.value("strict", true);
    if (!(c.max > c.min)) throw ConfigError("empty bin range for " + it.key());
    if (r.contains("bins") && get_int(r["bins"], it.key() + ".bins") != file.domain->cardinality(attr)) {
      throw ConfigError("bin count for " + it.key() + " differs from its cardinality");
    }
    file.coding[attr] = c;
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_value(j, indent, 0, out);
  out += '\n';
  return out;
}

Matrix parse_clique_query(const Domain& domain, const Clique& clique, const Json& spec) {
  if (spec.is_object() && spec.contains("matrix")) {
    const Json& rows = spec["matrix"];
    const auto cols = domain.clique_cells(clique);
    if (!rows.is_array() || rows.empty()) throw ConfigError("\"matrix\" must be a list of rows");
    Matrix q(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].is_array() || static_cast<std::int64_t>(rows[i].size()) != cols) {
        throw ConfigError("matrix row " + std::to_string(i) + " must have " +
                          std::to_string(cols) + " entries");
      }
      for (std::int64_t k = 0; k < cols; ++k) q(i, k) = get_number(rows[i][k], "matrix entry");
    }
    return q;
  }
  if (spec.is_object()) {
    for (auto it = spec.begin(); it != spec.end(); ++it) {
      if (!clique.contains(domain.index_of(it.key()))) {
        throw ConfigError("block given for " + it.key() + ", which is not in the clique");
      }
    }
  } else if (!spec.is_string() && !spec.is_null()) {
    throw ConfigError("query must be a block name, a per-attribute object or a matrix");
  }
  Matrix q = Matrix::Ones(1, 1);
  for (int a : clique) {
    const std::string& name = domain.name(a);
    Json block = "identity";
    if (spec.is_string()) block = spec;
    else if (spec.is_object() && spec.contains(name)) block = spec[name];
    q = kron(q, parse_block(block, domain.cardinality(a), name));
  }
  return q;
}

std::vector<MeasurementSpec> parse_measurement_specs(const Domain& domain, const Json& j) {
  if (!j.is_array()) throw ConfigError("measurements must be a list");
  std::vector<MeasurementSpec> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("clique")) {
      throw ConfigError("each measurement needs a \"clique\"");
    }
    MeasurementSpec s;
    s.clique = parse_clique(domain, e["clique"]);
    s.query = parse_clique_query(domain, s.clique, e.value("query", Json("identity")));
    if (e.contains("weight")) s.weight = get_int(e["weight"], "weight");
    if (s.weight < 1) throw ConfigError("measurement weight must be at least 1");
    out.push_back(std::move(s));
  }
  return out;
}

Workload parse_workload(const Domain& domain, const Json& j) {
  Workload w;
  for (auto& s : parse_measurement_specs(domain, j)) {
    w.entries.push_back({std::move(s.clique), std::move(s.query)});
  }
  return w;
}

Json factor_to_json(const Factor& f) {
  Json out;
  out["attributes"] = names_json(f.domain(), f.clique());
  out["shape"] = f.shape();
  out["values"] = std::vector<double>(f.values().begin(), f.values().end());
  return out;
}

Json measurement_to_json(const Domain& domain, const LinearMeasurement& m) {
  Json out;
  out["clique"] = names_json(domain, m.clique);
  out["noise_scale"] = m.noise_scale;
  out["answer"] = std::vector<double>(m.answer.data(), m.answer.data() + m.answer.size());
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.query.rows(); ++i) {
    std::vector<double> row(m.query.cols());
    for (Eigen::Index k = 0; k < m.query.cols(); ++k) row[k] = m.query(i, k);
    rows.push_back(row);
  }
  out["query"] = {{"matrix", rows}};
  return out;
}

LinearMeasurement measurement_from_json(const Domain& domain, const Json& j) {
  LinearMeasurement m;
  m.clique = parse_clique(domain, j.at("clique"));
  m.query = parse_clique_query(domain, m.clique, j.value("query", Json("identity")));
  const Json& ans = j.at("answer");
  m.answer.resize(static_cast<Eigen::Index>(ans.size()));
  for (std::size_t i = 0; i < ans.size(); ++i) m.answer[i] = get_number(ans[i], "answer");
  m.noise_scale = get_number(j.at("noise_scale"), "noise_scale");
  validate_measurement(domain, m);
  return m;
}

Json accountant_to_json(const Domain& domain, const PrivacyAccountant& accountant) {
  Json out;
  out["budget"] = accountant.budget();
  out["consumed"] = accountant.consumed();
  out["remaining"] = accountant.remaining();
  out["consumed_share"] = std::to_string(accountant.consumed_share().num) + "/" +
                          std::to_string(accountant.consumed_share().den);
  out["noiseless"] = accountant.any_noiseless();
  Json entries = Json::array();
  for (const auto& e : accountant.entries()) {
    Json r;
    r["round"] = e.round;
    r["mechanism"] = e.mechanism;
    r["clique"] = names_json(domain, e.clique);
    r["share"] = std::to_string(e.share.num) + "/" + std::to_string(e.share.den);
    r["epsilon"] = e.epsilon;
    r["noiseless"] = e.noiseless;
    entries.push_back(r);
  }
  out["entries"] = entries;
  return out;
}

Json model_size_to_json(const Domain& domain, const std::vector<Clique>& cliques) {
  const ModelSize s = model_size(domain, cliques);
  Json out;
  Json cs = Json::array();
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    cs.push_back({{"clique", names_json(domain, cliques[i])}, {"cells", s.clique_sizes[i]}});
  }
  out["cliques"] = cs;
  out["parameter_count"] = s.parameter_count;
  out["peak_bytes"] = s.peak_bytes;
  out["largest_clique"] = s.largest_clique;
  out["domain_size"] = domain.size_string();
  return out;
}

}  // namespace pgm
