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

#include "pgm/estimation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "pgm/errors.hpp"

namespace pgm {

namespace {

using Clock = std::chrono::steady_clock;

// Smallest key of `mu` containing `clique`.
const Factor* container(const CliqueVector& mu, const Clique& clique) {
  const Factor* best = nullptr;
  for (const auto& [c, f] : mu) {
    if (clique.is_subset_of(c) && (best == nullptr || f.size() < best->size())) {
      best = &f;
    }
  }
  return best;
}

Eigen::Map<const Vector> as_vector(const Factor& f) {
  return {f.values().data(), static_cast<Eigen::Index>(f.size())};
}

LossEvaluation linear_loss(const CliqueVector& mu, const LossSpec& spec) {
  LossEvaluation out;
  out.gradient = mu.with_space(Space::kLinear);
  for (auto& [c, f] : out.gradient) std::fill(f.mutable_values().begin(),
                                              f.mutable_values().end(), 0.0);

  std::map<Clique, Factor> projected;
  std::map<Clique, Vector> sub_gradients;
  const bool have_scales = spec.identity_scale.size() == spec.measurements.size();
  for (std::size_t k = 0; k < spec.measurements.size(); ++k) {
    const LinearMeasurement& m = spec.measurements[k];
    const double diag = have_scales ? spec.identity_scale[k] : 0.0;
    auto it = projected.find(m.clique);
    if (it == projected.end()) {
      const Factor* host = container(mu, m.clique);
      if (host == nullptr) {
        throw CoverageError("measurement clique " +
                            to_string(mu.begin()->second.domain(), m.clique) +
                            " is not covered by any model clique");
      }
      it = projected.emplace(m.clique, factor_project(host->with_space(Space::kLinear),
                                                      m.clique)).first;
    }
    const Vector residual = diag != 0.0 ? Vector(diag * as_vector(it->second) - m.answer)
                                        : Vector(m.query * as_vector(it->second) - m.answer);
    Vector g;
    if (spec.kind == LossKind::kL1) {
      out.value += residual.lpNorm<1>();
      const Vector sign = residual.unaryExpr([](double r) {
        return static_cast<double>((r > 0.0) - (r < 0.0));
      });
      g = diag != 0.0 ? Vector(diag * sign) : Vector(m.query.transpose() * sign);
    } else {
      out.value += 0.5 * residual.squaredNorm();
      g = diag != 0.0 ? Vector(diag * residual) : Vector(m.query.transpose() * residual);
    }
    auto [slot, inserted] = sub_gradients.try_emplace(m.clique, g);
    if (!inserted) slot->second += g;
  }

  for (const auto& [clique, g] : sub_gradients) {
    const Factor& host = *container(mu, clique);
    Factor small(host.domain_ptr(), clique,
                 std::vector<double>(g.data(), g.data() + g.size()));
    out.gradient.at(host.clique()) += small.expand(host.clique());
  }
  return out;
}

double identity_scale_of(const Matrix& q) {
  if (q.rows() != q.cols() || q.rows() == 0) return 0.0;
  const double s = q(0, 0);
  if (s == 0.0) return 0.0;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      if (q(i, j) != (i == j ? s : 0.0)) return 0.0;
    }
  }
  return s;
}

bool finite(const LossEvaluation& e) {
  return std::isfinite(e.value) && e.gradient.all_finite();
}

// Relative loss change over the last `window` entries below `tolerance`.
bool converged(const std::vector<double>& trace, int window, double tolerance) {
  if (static_cast<int>(trace.size()) <= window) return false;
  const double now = trace.back();
  const double then = trace[trace.size() - 1 - window];
  return std::abs(then - now) <= tolerance * std::max(std::abs(now), 1e-300);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void validate_measurement(const Domain& domain, const LinearMeasurement& m) {
  if (!m.clique.empty() && m.clique.attrs().back() >= static_cast<int>(domain.size())) {
    throw MeasurementError("measurement clique is outside the domain");
  }
  const double cells = domain.clique_size(m.clique);
  if (static_cast<double>(m.query.cols()) != cells) {
    throw MeasurementError("query over " + to_string(domain, m.clique) + " has " +
                           std::to_string(m.query.cols()) + " columns, expected " +
                           std::to_string(static_cast<long long>(cells)));
  }
  if (m.query.rows() != m.answer.size()) {
    throw MeasurementError("answer length does not match query rows for " +
                           to_string(domain, m.clique));
  }
  if (!(m.noise_scale > 0.0) || !std::isfinite(m.noise_scale)) {
    throw MeasurementError("noise scale must be positive for " +
                           to_string(domain, m.clique));
  }
}

LossSpec LossSpec::l1(std::vector<LinearMeasurement> ms, bool rescale) {
  LossSpec spec;
  spec.kind = LossKind::kL1;
  spec.rescaled = rescale;
  spec.measurements = rescale ? rescale_measurements(std::move(ms)) : std::move(ms);
  for (const auto& m : spec.measurements) spec.identity_scale.push_back(identity_scale_of(m.query));
  return spec;
}

LossSpec LossSpec::l2(std::vector<LinearMeasurement> ms, bool rescale) {
  LossSpec spec = l1(std::move(ms), rescale);
  spec.kind = LossKind::kL2;
  return spec;
}

LossSpec LossSpec::from_function(CustomLoss fn) {
  LossSpec spec;
  spec.kind = LossKind::kCustom;
  spec.custom = std::move(fn);
  return spec;
}

LossEvaluation loss_value_and_gradient(const CliqueVector& mu,
                                       const LossSpec& spec) {
  if (spec.kind == LossKind::kCustom) {
    if (!spec.custom) throw EstimationError("custom loss has no evaluator");
    return spec.custom(mu);
  }
  if (mu.empty()) throw CoverageError("loss evaluated on an empty marginal vector");
  return linear_loss(mu, spec);
}

std::vector<LinearMeasurement> rescale_measurements(
    std::vector<LinearMeasurement> ms) {
  for (auto& m : ms) {
    if (!(m.noise_scale > 0.0)) {
      throw MeasurementError("cannot rescale a measurement with non-positive noise");
    }
    m.query /= m.noise_scale;
    m.answer /= m.noise_scale;
    m.noise_scale = 1.0;
  }
  return ms;
}

TotalEstimate estimate_total(const std::vector<LinearMeasurement>& ms) {
  double weighted = 0.0, weights = 0.0;
  for (const auto& m : ms) {
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(m.query);
    const Matrix pinv = cod.pseudoInverse();
    const Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(m.query.cols()) * pinv;
    const Eigen::RowVectorXd back = v * m.query;
    const double miss = (back.array() - 1.0).abs().maxCoeff();
    if (!(miss <= 1e-8)) continue;  // all-ones not in the row space
    const double m_c = v.dot(m.answer);
    const double var = 2.0 * m.noise_scale * m.noise_scale * v.squaredNorm();
    if (!(var > 0.0)) continue;
    weighted += m_c / var;
    weights += 1.0 / var;
  }
  if (weights == 0.0) {
    throw TotalUnidentifiableError(
        "no measurement has the all-ones vector in its row space");
  }
  return {weighted / weights, 1.0 / weights};
}

double lipschitz_constant(const std::vector<LinearMeasurement>& ms) {
  if (ms.empty()) throw EstimationError("lipschitz constant of an empty measurement set");
  std::map<Clique, std::vector<const Matrix*>> blocks;
  for (const auto& m : ms) blocks[m.clique].push_back(&m.query);

  double best = 0.0;
  for (const auto& [clique, qs] : blocks) {
    const Eigen::Index n = qs.front()->cols();
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
    v.normalize();
    double lambda = 0.0;
    for (int iter = 0; iter < 100000; ++iter) {
      Vector w = Vector::Zero(n);
      for (const Matrix* q : qs) w.noalias() += q->transpose() * (*q * v);
      const double next = v.dot(w);
      const double norm = w.norm();
      if (norm == 0.0) {
        lambda = 0.0;
        break;
      }
      v = w / norm;
      const bool done = std::abs(next - lambda) <= 1e-12 * std::abs(next);
      lambda = next;
      if (done) break;
    }
    best = std::max(best, lambda);
  }
  return best;
}

GraphicalModel::GraphicalModel(JunctionTree tree, CliqueVector theta, double total)
    : tree_(std::move(tree)), theta_(std::move(theta)), total_(total) {
  OracleResult r = marginal_oracle(tree_, theta_, total_);
  marginals_ = std::move(r.marginals);
  log_partition_ = r.log_partition;
}

GraphicalModel::GraphicalModel(JunctionTree tree, CliqueVector theta, double total,
                               OracleResult oracle)
    : tree_(std::move(tree)),
      theta_(std::move(theta)),
      total_(total),
      marginals_(std::move(oracle.marginals)),
      log_partition_(oracle.log_partition) {}

GraphicalModel GraphicalModel::uniform(JunctionTree tree, double total) {
  CliqueVector theta = CliqueVector::zeros(tree.domain_ptr(), tree.cliques(), Space::kLog);
  return GraphicalModel(std::move(tree), std::move(theta), total);
}

std::string to_string(StepRule rule) {
  switch (rule) {
    case StepRule::kConstant: return "constant";
    case StepRule::kInverseSqrt: return "inverse-sqrt";
    case StepRule::kLineSearch: return "line-search";
  }
  return "unknown";
}

Estimate mirror_descent(const JunctionTree& tree, const LossSpec& spec, double total,
                        const MirrorDescentOptions& options) {
  if (options.iterations < 1) throw EstimationError("iteration count must be at least 1");
  if (!(total > 0.0)) throw EstimationError("total must be positive");

  EstimationReport report;
  report.algorithm = "mirror-descent";
  report.step_rule = to_string(options.rule);

  CliqueVector theta = CliqueVector::zeros(tree.domain_ptr(), tree.cliques(), Space::kLog);
  OracleResult current = marginal_oracle(tree, theta, total);
  LossEvaluation eval = loss_value_and_gradient(current.marginals, spec);
  if (!finite(eval)) throw NumericFailureError(0, "non-finite loss at the uniform start");

  double base = options.step;
  if (base <= 0.0) {
    const double g = eval.gradient.max_abs();
    base = g > 0.0 ? 1.0 / g : 1.0;
  }
  double last_step = base / 2.0;

  for (int t = 1; t <= options.iterations; ++t) {
    const auto start = Clock::now();
    report.loss_trace.push_back(eval.value);

    double eta = base;
    if (options.rule == StepRule::kInverseSqrt) eta = base / std::sqrt(static_cast<double>(t));
    if (options.rule == StepRule::kLineSearch) eta = 2.0 * last_step;

    CliqueVector next_theta;
    OracleResult next;
    LossEvaluation next_eval;
    // False when the step overflows the parameters.
    auto take_step = [&](double step) {
      next_theta = theta;
      next_theta.axpy(-step, eval.gradient);
      if (!next_theta.all_finite()) return false;
      next = marginal_oracle(tree, next_theta, total);
      next_eval = loss_value_and_gradient(next.marginals, spec);
      return true;
    };
    bool stepped = take_step(eta);

    if (options.rule == StepRule::kLineSearch) {
      // Armijo condition along the mirror step.
      auto sufficient = [&]() {
        if (!stepped || !std::isfinite(next_eval.value)) return false;
        CliqueVector delta = next.marginals;
        delta.axpy(-1.0, current.marginals);
        return next_eval.value <= eval.value + 0.5 * eval.gradient.dot(delta.with_space(Space::kLinear)) &&
               next_eval.value <= eval.value;
      };
      int halvings = 0;
      while (!sufficient() && halvings < options.max_halvings) {
        eta /= 2.0;
        ++halvings;
        stepped = take_step(eta);
      }
      if (!sufficient()) {
        // No acceptable step: stay put.
        eta = 0.0;
        stepped = true;
        next_theta = theta;
        next = current;
        next_eval = eval;
      } else {
        last_step = eta;
      }
    }

    if (!stepped) {
      throw NumericFailureError(t, "parameters overflowed at iteration " + std::to_string(t));
    }
    if (!finite(next_eval)) {
      throw NumericFailureError(t, "non-finite loss or gradient at iteration " +
                                       std::to_string(t));
    }
    theta = std::move(next_theta);
    current = std::move(next);
    eval = std::move(next_eval);
    report.step_sizes.push_back(eta);
    report.seconds.push_back(seconds_since(start));
    report.iterations = t;

    if (options.early_stop && converged(report.loss_trace, options.window, options.tolerance)) {
      report.stopped_early = true;
      break;
    }
  }

  report.final_loss = eval.value;
  report.max_abs_theta = theta.max_abs();
  return {GraphicalModel(tree, std::move(theta), total, std::move(current)),
          std::move(report)};
}

Estimate accelerated_estimate(const JunctionTree& tree, const LossSpec& spec,
                              double total, const AcceleratedOptions& options) {
  if (options.iterations < 1) throw EstimationError("iteration count must be at least 1");
  if (!(total > 0.0)) throw EstimationError("total must be positive");
  if (spec.kind == LossKind::kL1) {
    throw EstimationError(
        "the accelerated estimator needs a loss with Lipschitz gradient; "
        "use mirror descent for L1");
  }
  double lipschitz = options.lipschitz;
  if (lipschitz <= 0.0) {
    if (spec.kind == LossKind::kCustom) {
      throw EstimationError("custom losses must supply a Lipschitz constant");
    }
    lipschitz = lipschitz_constant(spec.measurements);
  }
  if (!(lipschitz > 0.0)) throw EstimationError("Lipschitz constant must be positive");

  EstimationReport report;
  report.algorithm = "accelerated";
  report.step_rule = "t(t+1)/(4K total)";
  report.lipschitz = lipschitz;

  CliqueVector theta = CliqueVector::zeros(tree.domain_ptr(), tree.cliques(), Space::kLog);
  OracleResult last = marginal_oracle(tree, theta, total);
  CliqueVector mu = last.marginals;
  CliqueVector nu = last.marginals;
  CliqueVector gbar = CliqueVector::zeros(tree.domain_ptr(), tree.cliques(), Space::kLinear);
  LossEvaluation averaged{};

  for (int t = 1; t <= options.iterations; ++t) {
    const auto start = Clock::now();
    const double c = 2.0 / (t + 1.0);
    const CliqueVector omega = CliqueVector::mix(mu, nu, c);
    const LossEvaluation at_omega = loss_value_and_gradient(omega, spec);
    if (!finite(at_omega)) {
      throw NumericFailureError(t, "non-finite loss or gradient at iteration " +
                                       std::to_string(t));
    }
    gbar *= (1.0 - c);
    gbar.axpy(c, at_omega.gradient.with_space(Space::kLinear));
    const double scale = t * (t + 1.0) / (4.0 * lipschitz * total);
    theta = gbar.scaled(-scale).with_space(Space::kLog);
    last = marginal_oracle(tree, theta, total);
    nu = last.marginals;
    mu = CliqueVector::mix(mu, nu, c);

    averaged = loss_value_and_gradient(mu, spec);
    if (!std::isfinite(averaged.value)) {
      throw NumericFailureError(t, "non-finite loss at iteration " + std::to_string(t));
    }
    report.loss_trace.push_back(averaged.value);
    report.step_sizes.push_back(scale);
    report.seconds.push_back(seconds_since(start));
    report.iterations = t;
    if (options.early_stop && converged(report.loss_trace, options.window, options.tolerance)) {
      report.stopped_early = true;
      break;
    }
  }

  report.averaged_loss = averaged.value;
  report.final_loss = averaged.value;
  report.averaged_marginals = mu;
  report.max_abs_theta = theta.max_abs();
  return {GraphicalModel(tree, std::move(theta), total, std::move(last)),
          std::move(report)};
}

}  // namespace pgm
