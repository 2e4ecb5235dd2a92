/*
 Copyright 2026 The lqtioc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef LQTIOC_TESTS_FIXTURES_HPP
#define LQTIOC_TESTS_FIXTURES_HPP

#include <algorithm>
#include <cmath>

#include "lqtioc/assembler.hpp"
#include "lqtioc/lqt.hpp"
#include "lqtioc/random.hpp"
#include "lqtioc/solver.hpp"

namespace lqtioc::testing {

struct Instance {
  SystemModel model;
  CostSpec cost;
};

// Generic (A, B) near the identity, Q = Q0 Q0ᵀ with Q0 n×q_rank, R ≻ 0.
inline Instance random_instance(Rng& rng, int n, int p, int K, int q_rank = -1) {
  if (q_rank < 0) q_rank = n;
  MatrixXd a = MatrixXd::Identity(n, n) + 0.3 * rng.normal_matrix(n, n);
  MatrixXd b = rng.normal_matrix(n, p);
  const MatrixXd q0 = rng.normal_matrix(n, std::max(q_rank, 0));
  const MatrixXd r0 = rng.normal_matrix(p, p);
  MatrixXd q = q0 * q0.transpose();
  MatrixXd r = r0 * r0.transpose() + 0.5 * MatrixXd::Identity(p, p);
  return {SystemModel(std::move(a), std::move(b)),
          CostSpec(std::move(q), std::move(r), rng.normal_vector(n), K)};
}

inline TrajectoryBatch closed_loop_batch(const Instance& inst, int M, std::uint64_t seed,
                                         double process_var = 0.1) {
  const PolicySequence policy = solve_riccati(inst.model, inst.cost);
  const int n = inst.model.n();
  return simulate(inst.model, policy, uniform_sampler(n, -1.0, 1.0),
                  gaussian_sampler(n, process_var), M, seed);
}

inline MatrixXd e1_row(int dim) {
  MatrixXd c = MatrixXd::Zero(1, dim);
  c(0, 0) = 1.0;
  return c;
}

// The standard pipeline with the e₁ normalization.
inline ThetaEstimate identify(const TrajectoryBatch& batch, const SystemModel& model, int T = 1,
                              const ConstraintOptions& opts = {}) {
  const GroupedData grouped = group_trajectories(batch, T, model);
  const CoefficientSystem sys = attach_default_constraint(
      assemble_Z(build_phi_blocks(grouped, model)), opts);
  return solve_theta(sys);
}

// Minimum of the tracking cost over the stacked input vector for the
// noise-free system started at x0, by one dense linear solve.
inline double stacked_qp_minimum(const SystemModel& model, const CostSpec& cost,
                                 const VectorXd& x0, VectorXd* u_opt = nullptr) {
  const int n = model.n();
  const int p = model.p();
  const int K = cost.K();
  const int steps = K + 1;
  MatrixXd phi(n * steps, n);
  MatrixXd gamma = MatrixXd::Zero(n * steps, p * steps);
  MatrixXd power = model.A();
  for (int k = 0; k < steps; ++k) {
    phi.block(k * n, 0, n, n) = power;
    power = model.A() * power;
  }
  for (int k = 0; k < steps; ++k) {
    MatrixXd ab = model.B();
    for (int j = k; j >= 0; --j) {
      gamma.block(k * n, j * p, n, p) = ab;
      ab = model.A() * ab;
    }
  }
  MatrixXd qbar = MatrixXd::Zero(n * steps, n * steps);
  MatrixXd rbar = MatrixXd::Zero(p * steps, p * steps);
  VectorXd dbar(n * steps);
  for (int k = 0; k < steps; ++k) {
    qbar.block(k * n, k * n, n, n) = cost.Q();
    rbar.block(k * p, k * p, p, p) = cost.R();
    dbar.segment(k * n, n) = cost.d();
  }
  const VectorXd free = phi * x0 - dbar;
  const MatrixXd hess = gamma.transpose() * qbar * gamma + rbar;
  const VectorXd u = -hess.ldlt().solve(gamma.transpose() * qbar * free);
  if (u_opt) *u_opt = u;
  const VectorXd e = free + gamma * u;
  return e.dot(qbar * e) + u.dot(rbar * u);
}

inline double max_rel_diff(const MatrixXd& a, const MatrixXd& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

}  // namespace lqtioc::testing

#endif  // LQTIOC_TESTS_FIXTURES_HPP
