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
#include "lqtioc/solver.hpp"

#include "lqtioc/error.hpp"

namespace lqtioc {

CostEstimate reconstruct(const VectorXd& theta, int n, int p) {
  if (theta.size() != tri(p) + tri(n) + n) {
    throw IocError(ErrorCode::kDimensionMismatch, "theta length does not match n, p");
  }
  CostEstimate out;
  out.R_hat = symmetrize(unvech(theta.head(tri(p)), p));
  out.Q_hat = symmetrize(unvech(theta.segment(tri(p), tri(n)), n));
  out.q_hat = theta.tail(n);
  const MatrixXd q_pinv = pinv(out.Q_hat, kWeightRankTol);
  out.d_hat = -q_pinv * out.q_hat;
  out.kernel_projector = symmetrize(MatrixXd::Identity(n, n) - q_pinv * out.Q_hat);
  out.q_rank = numerical_rank(out.Q_hat, kWeightRankTol);
  return out;
}

ThetaEstimate make_estimate(const VectorXd& theta, int n, int p, double residual) {
  CostEstimate parts = reconstruct(theta, n, p);
  ThetaEstimate est;
  est.n = n;
  est.p = p;
  est.theta = theta;
  est.Q_hat = std::move(parts.Q_hat);
  est.R_hat = std::move(parts.R_hat);
  est.q_hat = std::move(parts.q_hat);
  est.d_hat = std::move(parts.d_hat);
  est.kernel_projector = std::move(parts.kernel_projector);
  est.residual = residual;
  est.q_rank = parts.q_rank;
  est.unidentifiable_dim = n - parts.q_rank;
  est.q_eigenvalues = Eigen::SelfAdjointEigenSolver<MatrixXd>(est.Q_hat, Eigen::EigenvaluesOnly)
                          .eigenvalues();
  est.r_eigenvalues = Eigen::SelfAdjointEigenSolver<MatrixXd>(est.R_hat, Eigen::EigenvaluesOnly)
                          .eigenvalues();
  return est;
}

ThetaEstimate solve_theta(const CoefficientSystem& system) {
  if (system.input_dim != tri(system.p) || system.state_dim != tri(system.n) + system.n) {
    throw IocError(ErrorCode::kDimensionMismatch,
                   "solve_theta expects the standard (vech) parameterization");
  }
  if (system.h_min_singular <= kSingularTol * system.h_max_singular) {
    throw IocError(ErrorCode::kHRankDeficient, "H lacks full column rank");
  }
  const LeastSquaresSolution sol = solve_constrained(system);
  return make_estimate(sol.x, system.n, system.p, sol.residual);
}

ThetaEstimate sign_normalize(const ThetaEstimate& estimate) {
  if (!(estimate.theta.norm() > 1e-300)) {
    throw IocError(ErrorCode::kDegenerateEstimate, "theta is numerically zero");
  }
  if (estimate.R_hat.trace() >= 0.0) return estimate;
  ThetaEstimate flipped = make_estimate(-estimate.theta, estimate.n, estimate.p, estimate.residual);
  flipped.alpha_convention = estimate.alpha_convention;
  flipped.alpha_convention.sign_flipped = !estimate.alpha_convention.sign_flipped;
  return flipped;
}

CostSpec general_solution(const ThetaEstimate& estimate, double alpha, const VectorXd& lambda,
                          int horizon) {
  if (!(alpha > 0.0)) {
    throw IocError(ErrorCode::kNonPositiveAlpha, "alpha must be positive");
  }
  if (lambda.size() != estimate.n) {
    throw IocError(ErrorCode::kDimensionMismatch, "lambda length must equal n");
  }
  return CostSpec(alpha * estimate.Q_hat, alpha * estimate.R_hat,
                  estimate.d_hat + estimate.kernel_projector * lambda, horizon);
}

double relative_error(const VectorXd& estimate, const VectorXd& truth) {
  return (estimate - truth).norm() / truth.norm();
}

VectorXd normalize_theta(const VectorXd& theta, const MatrixXd& C, const VectorXd& c) {
  if (C.rows() != 1 || c.size() != 1 || C.cols() != theta.size()) {
    throw IocError(ErrorCode::kDimensionMismatch, "normalize_theta needs a single-row constraint");
  }
  const double current = (C * theta)(0);
  if (current == 0.0) {
    throw IocError(ErrorCode::kDegenerateEstimate, "truth is orthogonal to the constraint row");
  }
  return theta * (c(0) / current);
}

}  // namespace lqtioc
