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

// Estimation of a graphical model from noisy linear measurements of its
// marginals. Both optimizers work on the marginal polytope through the
// marginal oracle: every iterate they hand to the loss is an exact set of
// junction-tree marginals.

#ifndef PGM_ESTIMATION_HPP_
#define PGM_ESTIMATION_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pgm/junction_tree.hpp"

namespace pgm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// y = Q mu_C + Laplace(noise_scale) noise, entrywise.
struct LinearMeasurement {
  Clique clique;
  Matrix query;
  Vector answer;
  double noise_scale = 1.0;
};

// Throws MeasurementError if the shapes disagree with the domain or the
// noise scale is not positive.
void validate_measurement(const Domain& domain, const LinearMeasurement& m);

enum class LossKind { kL1, kL2, kCustom };

struct LossEvaluation {
  double value = 0.0;
  CliqueVector gradient;
};

// A convex loss that depends on the marginals only. It receives marginals
// keyed by the model cliques and must return a gradient with the same keys.
using CustomLoss = std::function<LossEvaluation(const CliqueVector& mu)>;

struct LossSpec {
  LossKind kind = LossKind::kL2;
  std::vector<LinearMeasurement> measurements;
  // True when the measurements were divided through by their noise scales.
  bool rescaled = false;
  CustomLoss custom;
  // Per measurement: s when the query is s * I, else 0. Filled by l1()/l2();
  // lets the loss skip dense products for plain marginal measurements.
  std::vector<double> identity_scale;

  static LossSpec l1(std::vector<LinearMeasurement> ms, bool rescale = true);
  static LossSpec l2(std::vector<LinearMeasurement> ms, bool rescale = true);
  static LossSpec from_function(CustomLoss fn);
};

// L1: sum_C |Q_C mu_C - y_C|_1 with subgradient Q^T sign(.).
// L2: sum_C 0.5 |Q_C mu_C - y_C|^2 with gradient Q^T (.).
// Measurement cliques that are strict subsets of a key of `mu` are read by
// projection and their gradients broadcast back into that key.
LossEvaluation loss_value_and_gradient(const CliqueVector& mu,
                                       const LossSpec& spec);

// Divides each measurement's rows and answers by its noise scale and sets
// the scale to 1, so that every answer has unit noise.
std::vector<LinearMeasurement> rescale_measurements(
    std::vector<LinearMeasurement> ms);

struct TotalEstimate {
  double total = 0.0;
  double variance = 0.0;
};

// Inverse-variance combination of the per-measurement totals 1^T Q^+ y over
// the measurements whose row space contains the all-ones vector.
TotalEstimate estimate_total(const std::vector<LinearMeasurement>& ms);

// Largest eigenvalue of Q^T Q for the block-diagonal measurement matrix
// (rows sharing a clique are stacked into one block), by power iteration.
double lipschitz_constant(const std::vector<LinearMeasurement>& ms);

// The estimated distribution p(x) proportional to exp(sum_C theta_C(x_C)),
// with cached marginals scaled to `total`.
class GraphicalModel {
 public:
  GraphicalModel(JunctionTree tree, CliqueVector theta, double total);
  // Uses a marginal-oracle result already computed for `theta`.
  GraphicalModel(JunctionTree tree, CliqueVector theta, double total,
                 OracleResult oracle);

  const JunctionTree& tree() const { return tree_; }
  const Domain& domain() const { return tree_.domain(); }
  const DomainPtr& domain_ptr() const { return tree_.domain_ptr(); }
  const CliqueVector& theta() const { return theta_; }
  const CliqueVector& marginals() const { return marginals_; }
  double total() const { return total_; }
  double log_partition() const { return log_partition_; }

  // Uniform model over the tree's cliques.
  static GraphicalModel uniform(JunctionTree tree, double total);

 private:
  JunctionTree tree_;
  CliqueVector theta_;
  double total_;
  CliqueVector marginals_;
  double log_partition_ = 0.0;
};

struct EstimationReport {
  std::string algorithm;
  int iterations = 0;
  std::vector<double> loss_trace;
  double final_loss = 0.0;
  std::string step_rule;
  std::vector<double> step_sizes;
  std::vector<double> seconds;
  double max_abs_theta = 0.0;
  double lipschitz = 0.0;
  bool stopped_early = false;
  // Algorithm 2 only: the averaged marginals. The model's own marginals are
  // those of the last oracle call.
  std::optional<CliqueVector> averaged_marginals;
  double averaged_loss = 0.0;
};

struct Estimate {
  GraphicalModel model;
  EstimationReport report;
};

enum class StepRule {
  kConstant,     // eta_t = step
  kInverseSqrt,  // eta_t = step / sqrt(t)
  kLineSearch,   // backtracking from twice the last accepted step
};

struct MirrorDescentOptions {
  int iterations = 10000;
  StepRule rule = StepRule::kInverseSqrt;
  // Base step. Zero selects 1 / |grad L(mu_0)|_inf at the uniform start.
  double step = 0.0;
  int max_halvings = 20;
  bool early_stop = true;
  double tolerance = 1e-9;
  int window = 20;
};

struct AcceleratedOptions {
  int iterations = 10000;
  // Lipschitz constant of grad L. Zero computes it from the measurements.
  double lipschitz = 0.0;
  bool early_stop = true;
  double tolerance = 1e-9;
  int window = 20;
};

// Entropic mirror descent over the marginal polytope: starting from
// theta = 0, mu = oracle(theta), theta -= eta_t * grad L(mu).
Estimate mirror_descent(const JunctionTree& tree, const LossSpec& spec,
                        double total, const MirrorDescentOptions& options = {});

// Accelerated dual averaging for losses with Lipschitz gradients. Rejects
// the L1 loss.
Estimate accelerated_estimate(const JunctionTree& tree, const LossSpec& spec,
                              double total,
                              const AcceleratedOptions& options = {});

std::string to_string(StepRule rule);

}  // namespace pgm

#endif  // PGM_ESTIMATION_HPP_
