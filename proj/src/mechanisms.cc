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

#include "pgm/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pgm/errors.hpp"

namespace pgm {

namespace {

// Uniform double strictly inside (0, 1).
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double laplace_draw(double scale, std::mt19937_64& rng) {
  const double u = open_uniform(rng) - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

Eigen::Map<const Vector> as_vector(const Factor& f) {
  return {f.values().data(), static_cast<Eigen::Index>(f.size())};
}

}  // namespace

Rational Rational::of(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw MechanismError("rational denominator must be positive");
  const std::int64_t g = std::gcd(num, den);
  return {num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

Rational Rational::operator+(const Rational& other) const {
  const std::int64_t l = std::lcm(den, other.den);
  return of(num * (l / den) + other.num * (l / other.den), l);
}

PrivacyAccountant::PrivacyAccountant(double budget) : budget_(budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw BudgetError("privacy budget must be positive and finite");
  }
}

void PrivacyAccountant::debit(Rational share, std::string mechanism, Clique clique,
                              int round, bool noiseless) {
  if (share.num < 0) throw BudgetError("budget share must be non-negative");
  const Rational next = consumed_ + share;
  if (next.exceeds_one()) {
    throw BudgetError("debit of " + std::to_string(budget_ * share.value()) +
                      " exceeds the remaining budget " + std::to_string(remaining()));
  }
  consumed_ = next;
  entries_.push_back({round, std::move(mechanism), std::move(clique), share,
                      budget_ * share.value(), noiseless});
}

bool PrivacyAccountant::any_noiseless() const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return e.noiseless; });
}

double sensitivity(const Matrix& q, std::int64_t m) {
  if (q.size() == 0) throw MechanismError("sensitivity of an empty matrix");
  if (m < 1) throw MechanismError("record count must be at least 1");
  const double col_norm = q.cwiseAbs().colwise().sum().maxCoeff();
  return 2.0 * col_norm / static_cast<double>(m);
}

LinearMeasurement laplace_measure(const Factor& data_marginal, const Matrix& q,
                                  double epsilon, std::int64_t m, std::mt19937_64& rng,
                                  bool noiseless) {
  if (!(epsilon > 0.0)) throw MechanismError("epsilon must be positive");
  if (q.cols() != static_cast<Eigen::Index>(data_marginal.size())) {
    throw MechanismError("query columns do not match the marginal size");
  }
  LinearMeasurement out;
  out.clique = data_marginal.clique();
  out.query = q;
  out.answer = q * as_vector(data_marginal);
  out.noise_scale = sensitivity(q, m) / epsilon * data_marginal.sum();
  if (!(out.noise_scale > 0.0)) {
    throw MechanismError("measurement has zero noise scale; empty marginal or query");
  }
  if (!noiseless) {
    for (Eigen::Index i = 0; i < out.answer.size(); ++i) {
      out.answer[i] += laplace_draw(out.noise_scale, rng);
    }
  }
  return out;
}

LinearMeasurement laplace_measure(const Factor& data_marginal, const Matrix& q,
                                  Rational share, std::int64_t m, std::mt19937_64& rng,
                                  PrivacyAccountant& accountant, int round,
                                  bool noiseless) {
  const double epsilon = accountant.budget() * share.value();
  LinearMeasurement out = laplace_measure(data_marginal, q, epsilon, m, rng, noiseless);
  accountant.debit(share, "laplace", data_marginal.clique(), round, noiseless);
  return out;
}

std::size_t exponential_select(std::span<const double> scores, double epsilon,
                               double score_sensitivity, std::mt19937_64& rng) {
  if (scores.empty()) throw MechanismError("exponential mechanism needs candidates");
  if (!(epsilon > 0.0)) throw MechanismError("epsilon must be positive");
  if (!(score_sensitivity > 0.0)) throw MechanismError("score sensitivity must be positive");
  const double top = *std::max_element(scores.begin(), scores.end());
  if (!std::isfinite(top)) throw MechanismError("scores must be finite");
  std::vector<double> cdf(scores.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw MechanismError("scores must be finite");
    acc += std::exp(epsilon * (scores[i] - top) / (2.0 * score_sensitivity));
    cdf[i] = acc;
  }
  const double u = open_uniform(rng) * acc;
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), scores.size() - 1);
}

double workload_error(const CliqueVector& truth, const GraphicalModel& model,
                      const Workload& workload) {
  if (workload.entries.empty()) throw WorkloadError("workload is empty");
  double total = 0.0;
  for (const auto& w : workload.entries) {
    const Factor& mu = truth.at(w.clique);
    const Factor est = model_marginal(model, w.clique);
    if (w.matrix.cols() != static_cast<Eigen::Index>(mu.size())) {
      throw WorkloadError("workload matrix for " + to_string(model.domain(), w.clique) +
                          " has the wrong column count");
    }
    const Vector a = w.matrix * as_vector(mu);
    const Vector b = w.matrix * as_vector(est);
    const double denom = 2.0 * a.lpNorm<1>();
    if (!(denom > 0.0)) {
      throw WorkloadError("true workload answers on " + to_string(model.domain(), w.clique) +
                          " are all zero");
    }
    total += (a - b).lpNorm<1>() / denom;
  }
  return total / static_cast<double>(workload.entries.size());
}

AdjacentTriples adjacent_triples_workload(int d, std::int64_t cardinality) {
  if (d < 3) throw WorkloadError("adjacent triples need at least 3 attributes");
  std::vector<Attribute> attrs;
  for (int i = 0; i < d; ++i) attrs.push_back({"a" + std::to_string(i + 1), cardinality});
  AdjacentTriples out;
  out.domain = make_domain(std::move(attrs));
  for (int i = 0; i + 2 < d; ++i) {
    Clique c{i, i + 1, i + 2};
    const auto n = static_cast<Eigen::Index>(out.domain->clique_cells(c));
    out.cliques.push_back(c);
    out.workload.entries.push_back({c, Matrix::Identity(n, n)});
  }
  return out;
}

Estimate fit_model(const DomainPtr& domain, const std::vector<LinearMeasurement>& measurements,
                   double total, const EstimatorConfig& config) {
  std::vector<Clique> cliques;
  for (const auto& m : measurements) {
    validate_measurement(*domain, m);
    cliques.push_back(m.clique);
  }
  JunctionTree tree = build_junction_tree(domain, cliques);
  check_model_size(*domain, tree.cliques(), config.parameter_cap);
  if (measurements.empty()) {
    return {GraphicalModel::uniform(std::move(tree), total), EstimationReport{}};
  }
  LossSpec spec = LossSpec::l2(measurements, true);
  if (config.algorithm == Estimator::kAccelerated) {
    AcceleratedOptions opts;
    opts.iterations = config.iterations;
    return accelerated_estimate(tree, spec, total, opts);
  }
  MirrorDescentOptions opts;
  opts.iterations = config.iterations;
  opts.rule = config.step_rule;
  return mirror_descent(tree, spec, total, opts);
}

MwemResult mwem_pgm(const Dataset& data, const Workload& workload,
                    const MwemOptions& options, std::mt19937_64& rng) {
  if (options.rounds < 1) throw MechanismError("MWEM needs at least one round");
  if (workload.entries.empty()) throw WorkloadError("workload is empty");
  const DomainPtr& domain = data.domain_ptr();
  const auto m = static_cast<std::int64_t>(data.records());
  if (m < 1) throw MechanismError("dataset is empty");

  // The only reads of the raw data: true marginals feeding the mechanisms.
  std::vector<Factor> truth;
  std::vector<Vector> true_answers;
  for (const auto& w : workload.entries) {
    truth.push_back(data.marginal(w.clique));
    true_answers.push_back(w.matrix * as_vector(truth.back()));
  }

  const auto share = Rational::of(1, 2 * static_cast<std::int64_t>(options.rounds));
  MwemResult result{GraphicalModel::uniform(build_junction_tree(domain, {}), static_cast<double>(m)),
                    PrivacyAccountant(options.epsilon), {}, {}, {}};

  for (int round = 1; round <= options.rounds; ++round) {
    std::vector<double> scores;
    std::vector<std::pair<std::size_t, std::size_t>> index;
    for (std::size_t e = 0; e < workload.entries.size(); ++e) {
      const auto& w = workload.entries[e];
      const Factor est = model_marginal(result.model, w.clique);
      const Vector est_answers = w.matrix * as_vector(est);
      for (Eigen::Index r = 0; r < est_answers.size(); ++r) {
        scores.push_back(std::abs(true_answers[e][r] - est_answers[r]));
        index.emplace_back(e, static_cast<std::size_t>(r));
      }
    }
    const double select_eps = options.epsilon * share.value();
    const std::size_t pick = exponential_select(scores, select_eps, 2.0, rng);
    const auto [entry, row] = index[pick];
    const auto& w = workload.entries[entry];
    result.accountant.debit(share, "exponential", w.clique, round);

    const Matrix q = w.matrix.row(static_cast<Eigen::Index>(row));
    result.measurements.push_back(laplace_measure(truth[entry], q, share, m, rng,
                                                  result.accountant, round, options.noiseless));
    result.rounds.push_back({round, entry, row, w.clique, scores[pick]});

    Estimate fit = fit_model(domain, result.measurements, static_cast<double>(m),
                             options.estimator);
    result.model = std::move(fit.model);
    result.last_report = std::move(fit.report);
  }
  return result;
}

}  // namespace pgm
