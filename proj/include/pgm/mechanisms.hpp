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

#ifndef PGM_MECHANISMS_HPP_
#define PGM_MECHANISMS_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pgm/dataset.hpp"
#include "pgm/estimation.hpp"
#include "pgm/inference.hpp"

namespace pgm {

// Exact fraction, used for budget shares so that the shares of a run add up
// to the whole budget without rounding.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational of(std::int64_t num, std::int64_t den);
  Rational operator+(const Rational& other) const;
  bool operator==(const Rational&) const = default;
  bool exceeds_one() const { return num > den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

class PrivacyAccountant {
 public:
  struct Entry {
    int round = 0;
    std::string mechanism;
    Clique clique;
    Rational share;
    double epsilon = 0.0;
    bool noiseless = false;
  };

  explicit PrivacyAccountant(double budget);

  double budget() const { return budget_; }
  // Throws BudgetError if the shares would exceed the budget.
  void debit(Rational share, std::string mechanism, Clique clique, int round = 0,
             bool noiseless = false);
  Rational consumed_share() const { return consumed_; }
  double consumed() const { return budget_ * consumed_.value(); }
  double remaining() const { return budget_ - consumed(); }
  bool any_noiseless() const;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  double budget_;
  Rational consumed_;
  std::vector<Entry> entries_;
};

struct SubWorkload {
  Clique clique;
  Matrix matrix;
};

struct Workload {
  std::vector<SubWorkload> entries;
};

// (2 / m) * max column L1 norm of q.
double sensitivity(const Matrix& q, std::int64_t m);

// y = q * data_marginal + Laplace(b) noise. The noise scale is
// sensitivity(q, m) / epsilon times the marginal's total, so it is the
// textbook scale for a normalised marginal and 2 |q|_1 / epsilon for counts.
// With `noiseless` the answer is exact and b is still recorded.
LinearMeasurement laplace_measure(const Factor& data_marginal, const Matrix& q,
                                  double epsilon, std::int64_t m, std::mt19937_64& rng,
                                  bool noiseless = false);

// As above, spending `share` of the accountant's budget.
LinearMeasurement laplace_measure(const Factor& data_marginal, const Matrix& q,
                                  Rational share, std::int64_t m, std::mt19937_64& rng,
                                  PrivacyAccountant& accountant, int round = 0,
                                  bool noiseless = false);

// Index i with probability proportional to exp(eps * score_i / (2 * sens)).
std::size_t exponential_select(std::span<const double> scores, double epsilon,
                               double score_sensitivity, std::mt19937_64& rng);

// Mean over workload entries of |W mu - W mu_hat|_1 / (2 |W mu|_1), with
// mu_hat read from the model by model_marginal. `truth` is keyed by the
// workload cliques and must be on the same scale as the model.
double workload_error(const CliqueVector& truth, const GraphicalModel& model,
                      const Workload& workload);

struct AdjacentTriples {
  DomainPtr domain;
  std::vector<Clique> cliques;
  Workload workload;
};

// d attributes "a1".."ad" of equal cardinality; identity queries on every
// window (i, i+1, i+2).
AdjacentTriples adjacent_triples_workload(int d, std::int64_t cardinality);

enum class Estimator { kMirrorDescent, kAccelerated };

struct EstimatorConfig {
  Estimator algorithm = Estimator::kAccelerated;
  int iterations = 1000;
  // Mirror descent only.
  StepRule step_rule = StepRule::kInverseSqrt;
  double parameter_cap = kDefaultParameterCap;
};

struct MwemOptions {
  double epsilon = 1.0;
  int rounds = 5;
  EstimatorConfig estimator;
  bool noiseless = false;
};

struct MwemRound {
  int round = 0;
  std::size_t entry = 0;
  std::size_t row = 0;
  Clique clique;
  double score = 0.0;
};

struct MwemResult {
  GraphicalModel model;
  PrivacyAccountant accountant;
  std::vector<LinearMeasurement> measurements;
  std::vector<MwemRound> rounds;
  EstimationReport last_report;
};

// MWEM with the multiplicative-weights step replaced by graphical-model
// estimation over every measurement taken so far. Each round spends
// epsilon / (2T) on exponential-mechanism selection of a workload row
// (score = absolute count error, sensitivity 2) and epsilon / (2T) on a
// Laplace measurement of that row.
MwemResult mwem_pgm(const Dataset& data, const Workload& workload,
                    const MwemOptions& options, std::mt19937_64& rng);

// Fits a model to `measurements` with the configured estimator.
Estimate fit_model(const DomainPtr& domain, const std::vector<LinearMeasurement>& measurements,
                   double total, const EstimatorConfig& config);

}  // namespace pgm

#endif  // PGM_MECHANISMS_HPP_
