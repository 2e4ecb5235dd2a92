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
#include "lqtioc/structured.hpp"

#include "lqtioc/error.hpp"

namespace lqtioc {

MatrixXd LaplacianSpec::Q() const {
  return kron(L + MatrixXd::Identity(N, N), MatrixXd::Identity(n0, n0));
}

MatrixXd LaplacianSpec::R() const { return phi.asDiagonal(); }

VectorXd LaplacianSpec::d() const {
  VectorXd out(n());
  for (int j = 0; j < N; ++j) out.segment(j * n0, n0) = per_agent_targets[static_cast<std::size_t>(j)];
  return out;
}

CostSpec LaplacianSpec::cost(int horizon) const { return CostSpec(Q(), R(), d(), horizon); }

void LaplacianSpec::validate() const {
  if (N < 1 || n0 < 1 || L.rows() != N || L.cols() != N ||
      static_cast<int>(per_agent_targets.size()) != N) {
    throw IocError(ErrorCode::kConfig, "Laplacian spec dimensions are inconsistent");
  }
  for (const auto& t : per_agent_targets) {
    if (t.size() != n0) throw IocError(ErrorCode::kConfig, "agent target has wrong length");
  }
  const double scale = std::max(1.0, L.norm());
  if ((L - L.transpose()).norm() > 1e-10 * scale) {
    throw IocError(ErrorCode::kConfig, "Laplacian must be symmetric");
  }
  if (L.rowwise().sum().norm() > 1e-10 * scale) {
    throw IocError(ErrorCode::kConfig, "Laplacian rows must sum to zero");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(L, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw IocError(ErrorCode::kConfig, "Laplacian must be positive semi-definite");
  }
  if (phi.size() < 1 || phi.minCoeff() <= 0.0) {
    throw IocError(ErrorCode::kConfig, "input weights phi must be positive");
  }
}

LiftOperators build_F(int N, int n0) {
  LiftOperators ops;
  const MatrixXd h = commutation_matrix(n0, N);
  const MatrixXd vec_identity = vec(MatrixXd::Identity(n0, n0));
  ops.F = kron(h, MatrixXd::Identity(n0, n0)) * kron(MatrixXd::Identity(N, N), vec_identity);
  ops.lifted = kron(MatrixXd::Identity(N, N), ops.F);
  return ops;
}

MatrixXd structured_input_matrix(const MatrixXd& inputs) {
  const Eigen::Index p = inputs.rows();
  MatrixXd out = MatrixXd::Zero(p, p * inputs.cols());
  for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
    out.block(0, j * p, p, p) = inputs.col(j).asDiagonal();
  }
  return out;
}

MatrixXd diagonal_embedding(int p) {
  MatrixXd e = MatrixXd::Zero(static_cast<Eigen::Index>(p) * p, p);
  for (int i = 0; i < p; ++i) e(i * p + i, i) = 1.0;
  return e;
}

namespace {

MatrixXd laplacian_state_map(int N, int n0) {
  const int n = N * n0;
  return block_diag(build_F(N, n0).lifted * duplication_matrix(N), MatrixXd::Identity(n, n));
}

// tri(p) × p selection with vech(diag(φ)) = V φ.
MatrixXd diagonal_vech_selection(int p) {
  MatrixXd v = MatrixXd::Zero(tri(p), p);
  int idx = 0;
  for (int j = 0; j < p; ++j) {
    v(idx, j) = 1.0;
    idx += p - j;
  }
  return v;
}

MatrixXd column_sum_rows(int N) {
  return kron(MatrixXd::Identity(N, N), MatrixXd::Ones(1, N));
}

}  // namespace

ParameterMaps laplacian_maps(int N, int n0, int p, ValueStructure values) {
  ParameterMaps maps;
  maps.input_map = diagonal_embedding(p);
  maps.state_map = laplacian_state_map(N, n0);
  maps.value_map = values == ValueStructure::kLaplacian ? maps.state_map
                                                        : augmented_duplication_matrix(N * n0);
  return maps;
}

MatrixXd structured_lift_matrix(int N, int n0, int p) {
  const int n = N * n0;
  const MatrixXd dn_pinv = pinv(duplication_matrix(n));
  const MatrixXd q_block = dn_pinv * build_F(N, n0).lifted * duplication_matrix(N);
  MatrixXd lift = MatrixXd::Zero(tri(p) + tri(n) + n, p + tri(N) + n);
  lift.block(0, 0, tri(p), p) = diagonal_vech_selection(p);
  lift.block(tri(p), p, tri(n), tri(N)) = q_block;
  lift.block(tri(p) + tri(n), p + tri(N), n, n) = MatrixXd::Identity(n, n);
  return lift;
}

MatrixXd reduced_laplacian_constraint(int N, int n0, int p) {
  const int n = N * n0;
  MatrixXd c = MatrixXd::Zero(N, p + tri(N) + n);
  c.block(0, p, N, tri(N)) = column_sum_rows(N) * duplication_matrix(N);
  return c;
}

MatrixXd full_laplacian_constraint(int N, int n0, int p) {
  const int n = N * n0;
  MatrixXd c = MatrixXd::Zero(N, tri(p) + tri(n) + n);
  c.block(0, tri(p), N, tri(n)) =
      column_sum_rows(N) * pinv(build_F(N, n0).lifted) * duplication_matrix(n);
  return c;
}

StructuredTheta lift_structured(const VectorXd& bar_theta, int N, int n0, int p) {
  const int n = N * n0;
  if (bar_theta.size() != p + tri(N) + n) {
    throw IocError(ErrorCode::kDimensionMismatch, "structured theta has the wrong length");
  }
  StructuredTheta out;
  out.bar_theta = bar_theta;
  out.theta = structured_lift_matrix(N, n0, p) * bar_theta;
  return out;
}

VectorXd structured_theta_of(const LaplacianSpec& spec) {
  const int n = spec.n();
  const int p = static_cast<int>(spec.phi.size());
  VectorXd out(p + tri(spec.N) + n);
  out << spec.phi, vech(spec.L + MatrixXd::Identity(spec.N, spec.N)), -spec.Q() * spec.d();
  return out;
}

StructuredResult solve_structured(const TrajectoryBatch& batch, const SystemModel& model, int T,
                                  int N, int n0, const StructuredOptions& options) {
  const int n = N * n0;
  const int p = model.p();
  if (model.n() != n) {
    throw IocError(ErrorCode::kDimensionMismatch, "model state dimension differs from N*n0");
  }
  const GroupedData grouped = group_trajectories(batch, T, model);
  const PhiBlocks blocks = build_phi_blocks(grouped, model, laplacian_maps(N, n0, p, options.values));
  CoefficientSystem system = assemble_Z(blocks);

  MatrixXd C;
  if (options.constraint == ConstraintForm::kReduced) {
    C = reduced_laplacian_constraint(N, n0, p);
  } else {
    C = full_laplacian_constraint(N, n0, p) * structured_lift_matrix(N, n0, p);
  }
  system = attach_constraint(std::move(system), C, VectorXd::Ones(N), options.consistency);
  const LeastSquaresSolution sol = solve_constrained(system);

  StructuredResult out;
  out.estimate = lift_structured(sol.x, N, n0, p);
  out.residual = sol.residual;
  out.full_estimate = make_estimate(out.estimate.theta, n, p, sol.residual);

  LaplacianSpec& lap = out.laplacian;
  lap.N = N;
  lap.n0 = n0;
  lap.phi = sol.x.head(p);
  lap.L = unvech(sol.x.segment(p, tri(N)), N) - MatrixXd::Identity(N, N);
  for (int j = 0; j < N; ++j) {
    lap.per_agent_targets.push_back(out.full_estimate.d_hat.segment(j * n0, n0));
  }
  out.laplacian_eigenvalues =
      Eigen::SelfAdjointEigenSolver<MatrixXd>(lap.L, Eigen::EigenvaluesOnly).eigenvalues();
  out.system = std::move(system);
  return out;
}

ThetaEstimate solve_unstructured_laplacian(const TrajectoryBatch& batch,
                                           const SystemModel& model, int T, int N, int n0,
                                           const ConstraintOptions& options) {
  const GroupedData grouped = group_trajectories(batch, T, model);
  const PhiBlocks blocks = build_phi_blocks(grouped, model);
  CoefficientSystem system = assemble_Z(blocks);
  system = attach_constraint(std::move(system), full_laplacian_constraint(N, n0, model.p()),
                             VectorXd::Ones(N), options);
  return solve_theta(system);
}

ProjectionReport projection_gain(const VectorXd& theta_tilde, const VectorXd& theta_hat,
                                 const VectorXd& theta_true) {
  if (theta_tilde.size() != theta_true.size() || theta_hat.size() != theta_true.size()) {
    throw IocError(ErrorCode::kDimensionMismatch, "projection_gain needs equal-length vectors");
  }
  ProjectionReport r;
  r.structured_sq = (theta_hat - theta_true).squaredNorm();
  r.unstructured_sq = (theta_tilde - theta_true).squaredNorm();
  r.gap_sq = (theta_tilde - theta_hat).squaredNorm();
  r.identity_residual = r.unstructured_sq - r.gap_sq - r.structured_sq;
  return r;
}

std::vector<Edge> edge_list(const MatrixXd& laplacian) {
  std::vector<Edge> edges;
  for (int i = 0; i < laplacian.rows(); ++i) {
    for (int j = i + 1; j < laplacian.cols(); ++j) edges.push_back({i, j, -laplacian(i, j)});
  }
  return edges;
}

}  // namespace lqtioc
