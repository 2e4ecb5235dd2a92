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
#ifndef LQTIOC_SOLVER_HPP
#define LQTIOC_SOLVER_HPP

#include <string>

#include "lqtioc/assembler.hpp"
#include "lqtioc/lqt.hpp"

namespace lqtioc {

struct AlphaConvention {
  std::string normalization = "C theta = c";
  bool sign_flipped = false;
};

/// Estimated (Q, R, q, d) with the diagnostics needed to judge it.
struct ThetaEstimate {
  int n = 0;
  int p = 0;
  VectorXd theta;  // [vech(R); vech(Q); q]
  MatrixXd Q_hat;
  MatrixXd R_hat;
  VectorXd q_hat;
  VectorXd d_hat;  // −Q̂†q̂
  MatrixXd kernel_projector;  // I − Q̂†Q̂
  AlphaConvention alpha_convention;
  double residual = 0.0;  // ‖Hθ − h‖
  int q_rank = 0;
  int unidentifiable_dim = 0;  // n − rank(Q̂)
  VectorXd q_eigenvalues;
  VectorXd r_eigenvalues;
};

/// Inputs for reconstruct(); θ split back into its three segments.
struct CostEstimate {
  MatrixXd Q_hat;
  MatrixXd R_hat;
  VectorXd q_hat;
  VectorXd d_hat;
  MatrixXd kernel_projector;
  int q_rank = 0;
};

/// Inverse-vech of both weight blocks and d̂ = −Q̂†q̂, with rank of Q̂ decided
/// at kWeightRankTol.
CostEstimate reconstruct(const VectorXd& theta, int n, int p);

/// Builds a full estimate from a θ vector (eigenvalue diagnostics included).
ThetaEstimate make_estimate(const VectorXd& theta, int n, int p, double residual = 0.0);

/// θ = least-squares solution of Hθ = h for the standard parameterization.
ThetaEstimate solve_theta(const CoefficientSystem& system);

/// Flips θ when trace(R̂) < 0 so that R̂ has nonnegative trace.
ThetaEstimate sign_normalize(const ThetaEstimate& estimate);

/// (αQ̂, αR̂, d̂ + P^{ker(Q̂)}λ) as a cost with horizon K; every member of
/// this family induces the same optimal policy.
CostSpec general_solution(const ThetaEstimate& estimate, double alpha, const VectorXd& lambda,
                          int horizon);

/// ‖a − b‖ / ‖b‖
double relative_error(const VectorXd& estimate, const VectorXd& truth);

/// Truth θ rescaled to satisfy the same linear normalization Cθ = c (single
/// row) as the estimate.
VectorXd normalize_theta(const VectorXd& theta, const MatrixXd& C, const VectorXd& c);

}  // namespace lqtioc

#endif  // LQTIOC_SOLVER_HPP
