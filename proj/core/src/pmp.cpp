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
#include "lqtioc/pmp.hpp"

#include "lqtioc/assembler.hpp"
#include "lqtioc/error.hpp"

namespace lqtioc {

namespace {

VectorXd terminal_state(const SystemModel& model, const Trajectory& t, int K) {
  return model.A() * t.states.col(K) + model.B() * t.inputs.col(K);
}

void check_rank(const MatrixXd& H) {
  const VectorXd sv = H.rows() > 2 * H.cols() ? tall_singular_values(H) : singular_values(H);
  if (H.rows() < H.cols() || !(sv.minCoeff() > kSingularTol * sv.maxCoeff())) {
    throw IocError(ErrorCode::kRankDeficientPmp, "stacked costate system lacks full column rank");
  }
}

void check_constraint(const MatrixXd& C, const VectorXd& c, int theta_dim) {
  if (C.cols() != theta_dim || C.rows() != c.size() || C.rows() < 1) {
    throw IocError(ErrorCode::kDimensionMismatch, "constraint does not match theta length");
  }
}

}  // namespace

MatrixXd PmpSystem::joint_matrix() const {
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.G.rows();
  const auto m = static_cast<Eigen::Index>(blocks.size());
  MatrixXd out = MatrixXd::Zero(rows, theta_dim() + m * costate_dim());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const PmpBlock& b = blocks[static_cast<std::size_t>(i)];
    out.block(r, 0, b.G.rows(), theta_dim()) = b.G;
    out.block(r, theta_dim() + i * costate_dim(), b.F.rows(), costate_dim()) = b.F;
    r += b.G.rows();
  }
  return out;
}

PmpSystem build_pmp(const TrajectoryBatch& batch, const SystemModel& model) {
  batch.validate();
  if (batch.M() < 1) throw IocError(ErrorCode::kConfig, "PMP baseline needs trajectories");
  if (batch.n != model.n() || batch.p != model.p()) {
    throw IocError(ErrorCode::kDimensionMismatch, "batch and model dimensions differ");
  }
  PmpSystem sys;
  sys.n = batch.n;
  sys.p = batch.p;
  sys.K = batch.K;
  const int n = sys.n, p = sys.p, K = sys.K;
  const int r = tri(p);
  const int qq = tri(n) + n;
  const MatrixXd dbar = augmented_duplication_matrix(n);
  const MatrixXd dp = duplication_matrix(p);
  const Eigen::Index state_rows = static_cast<Eigen::Index>(n) * (K + 1);
  const Eigen::Index input_rows = static_cast<Eigen::Index>(p) * (K + 1);

  for (const Trajectory& t : batch.trajectories) {
    PmpBlock b;
    b.G = MatrixXd::Zero(state_rows + input_rows, r + qq);
    b.F = MatrixXd::Zero(state_rows + input_rows, sys.costate_dim());
    // Costate rows, μ_k at column block k−1.
    for (int k = 1; k <= K + 1; ++k) {
      const Eigen::Index row = static_cast<Eigen::Index>(k - 1) * n;
      VectorXd xa(n + 1);
      xa << (k == K + 1 ? terminal_state(model, t, K) : VectorXd(t.states.col(k))), 1.0;
      b.G.block(row, r, n, qq) = -kron_transpose_apply(xa, n, dbar);
      b.F.block(row, static_cast<Eigen::Index>(k - 1) * n, n, n) = MatrixXd::Identity(n, n);
      if (k <= K) b.F.block(row, static_cast<Eigen::Index>(k) * n, n, n) = -model.A().transpose();
    }
    // Input rows, μ_{k+1} at column block k.
    for (int k = 0; k <= K; ++k) {
      const Eigen::Index row = state_rows + static_cast<Eigen::Index>(k) * p;
      b.G.block(row, 0, p, r) = kron_transpose_apply(VectorXd(t.inputs.col(k)), p, dp);
      b.F.block(row, static_cast<Eigen::Index>(k) * n, p, n) = model.B().transpose();
    }
    sys.blocks.push_back(std::move(b));
  }
  return sys;
}

VectorXd truth_costates(const PolicySequence& policy, const SystemModel& model,
                        const Trajectory& trajectory) {
  const int K = policy.K();
  const int n = model.n();
  VectorXd mu(static_cast<Eigen::Index>(n) * (K + 1));
  for (int k = 1; k <= K + 1; ++k) {
    const VectorXd x = k == K + 1 ? terminal_state(model, trajectory, K)
                                  : VectorXd(trajectory.states.col(k));
    mu.segment(static_cast<Eigen::Index>(k - 1) * n, n) = policy.P(k) * x + policy.eta(k);
  }
  return mu;
}

double pmp_residual_at(const PmpBlock& block, const VectorXd& theta, const VectorXd& costates) {
  const VectorXd r = block.G * theta + block.F * costates;
  const double scale = block.G.norm() * theta.norm() + block.F.norm() * costates.norm();
  return scale > 0.0 ? r.norm() / scale : r.norm();
}

ThetaEstimate solve_pmp(const TrajectoryBatch& batch, const SystemModel& model, const MatrixXd& C,
                        const VectorXd& c) {
  const PmpSystem sys = build_pmp(batch, model);
  check_constraint(C, c, sys.theta_dim());
  const Eigen::Index keep = sys.blocks.front().F.rows() - sys.costate_dim();
  MatrixXd H(C.rows() + static_cast<Eigen::Index>(sys.blocks.size()) * keep, sys.theta_dim());
  H.topRows(C.rows()) = C;
  Eigen::Index row = C.rows();
  for (const PmpBlock& b : sys.blocks) {
    // F has an identity-led triangular structure, so it always has full
    // column rank and its left null space has dimension `keep`.
    const Eigen::HouseholderQR<MatrixXd> qr(b.F);
    const MatrixXd qtg = qr.householderQ().transpose() * b.G;
    H.middleRows(row, keep) = qtg.bottomRows(keep);
    row += keep;
  }
  check_rank(H);
  VectorXd h = VectorXd::Zero(H.rows());
  h.head(c.size()) = c;
  const VectorXd theta = H.colPivHouseholderQr().solve(h);
  return make_estimate(theta, sys.n, sys.p, (H * theta - h).norm());
}

ThetaEstimate solve_pmp_dense(const TrajectoryBatch& batch, const SystemModel& model,
                              const MatrixXd& C, const VectorXd& c) {
  const PmpSystem sys = build_pmp(batch, model);
  check_constraint(C, c, sys.theta_dim());
  const MatrixXd joint = sys.joint_matrix();
  MatrixXd H = MatrixXd::Zero(C.rows() + joint.rows(), joint.cols());
  H.topLeftCorner(C.rows(), C.cols()) = C;
  H.bottomRows(joint.rows()) = joint;
  check_rank(H);
  VectorXd h = VectorXd::Zero(H.rows());
  h.head(c.size()) = c;
  const VectorXd z = H.colPivHouseholderQr().solve(h);
  return make_estimate(z.head(sys.theta_dim()), sys.n, sys.p, (H * z - h).norm());
}

ThetaEstimate solve_pmp(const TrajectoryBatch& batch, const SystemModel& model) {
  MatrixXd C = MatrixXd::Zero(1, tri(batch.p) + tri(batch.n) + batch.n);
  C(0, 0) = 1.0;
  return solve_pmp(batch, model, C, VectorXd::Ones(1));
}

}  // namespace lqtioc
