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
#ifndef LQTIOC_PMP_HPP
#define LQTIOC_PMP_HPP

// Open-loop baseline built from the discrete maximum principle. Per
// trajectory i the unknowns are θ and costates μ_1..μ_{K+1} (μ_{K+2} = 0):
//
//   μ_k − Aᵀμ_{k+1} − (Q x_k + q) = 0     k = 1..K+1
//   Bᵀμ_{k+1} + R u_k             = 0     k = 0..K
//
// with x_{K+1} replaced by A x_K + B u_K.

#include <vector>

#include "lqtioc/lqt.hpp"
#include "lqtioc/solver.hpp"

namespace lqtioc {

struct PmpBlock {
  MatrixXd G;  // rows × θ
  MatrixXd F;  // rows × n(K+1), costate coefficients
};

struct PmpSystem {
  int n = 0;
  int p = 0;
  int K = 0;
  std::vector<PmpBlock> blocks;  // one per trajectory

  [[nodiscard]] int theta_dim() const { return tri(p) + tri(n) + n; }
  [[nodiscard]] int costate_dim() const { return n * (K + 1); }
  /// Dense [G_1 F_1 0 ...; G_2 0 F_2 ...; ...]; for small problems.
  [[nodiscard]] MatrixXd joint_matrix() const;
};

PmpSystem build_pmp(const TrajectoryBatch& batch, const SystemModel& model);

/// μ_k = P_k x_k + η_k, k = 1..K+1, stacked; x_{K+1} replaced as above.
VectorXd truth_costates(const PolicySequence& policy, const SystemModel& model,
                        const Trajectory& trajectory);

/// ‖G θ + F μ‖ / (‖G‖_F ‖θ‖ + ‖F‖_F ‖μ‖) for one trajectory block.
double pmp_residual_at(const PmpBlock& block, const VectorXd& theta, const VectorXd& costates);

/// Least squares over (θ, μ) with the costates eliminated per trajectory by
/// projecting onto the orthogonal complement of range(F_i). Throws
/// RankDeficientPmp when [C; projected rows] lacks full column rank.
ThetaEstimate solve_pmp(const TrajectoryBatch& batch, const SystemModel& model, const MatrixXd& C,
                        const VectorXd& c);

/// Same estimate from one dense joint solve; reference implementation.
ThetaEstimate solve_pmp_dense(const TrajectoryBatch& batch, const SystemModel& model,
                              const MatrixXd& C, const VectorXd& c);

/// C = e₁ᵀ, c = 1.
ThetaEstimate solve_pmp(const TrajectoryBatch& batch, const SystemModel& model);

}  // namespace lqtioc

#endif  // LQTIOC_PMP_HPP
