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

// Brute-force reference computations for tests. Everything here works on the
// full joint table, so only small domains are allowed.

#ifndef PGM_TESTS_SUPPORT_ORACLES_HPP_
#define PGM_TESTS_SUPPORT_ORACLES_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "pgm/clique_vector.hpp"
#include "pgm/dataset.hpp"
#include "pgm/domain.hpp"
#include "pgm/estimation.hpp"
#include "pgm/junction_tree.hpp"

namespace pgm::testing {

// Full joint of exp(sum_C theta_C), normalized to `total`, row-major over
// the domain; `log_z` receives log sum exp.
std::vector<double> joint_from_theta(const Domain& domain, const CliqueVector& theta,
                                     double total, double* log_z = nullptr);

// Marginal of a dense joint onto `clique`.
std::vector<double> joint_marginal(const Domain& domain, const std::vector<double>& joint,
                                   const Clique& clique);

// Dense M_C: rows are clique cells, columns full-domain cells.
Matrix marginal_operator(const Domain& domain, const Clique& clique);

Matrix kronecker(const std::vector<Matrix>& blocks);

// Euclidean projection onto {x >= 0, sum x = total}.
Vector project_simplex(const Vector& v, double total = 1.0);

// min over p in total * simplex of the L2 loss of the measurements, by
// FISTA with restarts on the dense table. Returns the optimal value.
double dense_l2_optimum(const Domain& domain, const std::vector<LinearMeasurement>& ms,
                        double total, int iterations = 50000, Vector* argmin = nullptr);

// Loss of a full joint under the (already rescaled) measurements.
double dense_loss(const Domain& domain, const std::vector<LinearMeasurement>& ms,
                  const Vector& p, bool l1);

std::vector<double> random_normals(std::size_t n, std::mt19937_64& rng);

// Random theta on the tree's cliques with N(0, sd^2) entries.
CliqueVector random_theta(const JunctionTree& tree, std::mt19937_64& rng, double sd = 1.0);

double shannon_entropy(const std::vector<double>& p);

}  // namespace pgm::testing

#endif  // PGM_TESTS_SUPPORT_ORACLES_HPP_
