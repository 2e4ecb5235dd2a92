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
#include <gtest/gtest.h>

#include <functional>

#include "fixtures.hpp"
#include "lqtioc/assembler.hpp"
#include "lqtioc/error.hpp"
#include "lqtioc/error_analysis.hpp"

namespace lqtioc {
namespace {

using testing::closed_loop_batch;
using testing::random_instance;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const IocError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no IocError thrown";
  return ErrorCode::kConfig;
}

TEST(Duplication, SmallCases) {
  EXPECT_TRUE(duplication_matrix(1) == MatrixXd::Ones(1, 1));
  MatrixXd d2(4, 3);
  d2 << 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1;
  EXPECT_TRUE(duplication_matrix(2) == d2);
  const MatrixXd d5 = duplication_matrix(5);
  EXPECT_EQ(numerical_rank(d5), 15);
  EXPECT_TRUE((d5.array() == 0.0 || d5.array() == 1.0).all());
}

TEST(Duplication, AugmentedIdentity) {
  Rng rng(1);
  const MatrixXd P = symmetrize(rng.normal_matrix(3, 3));
  const VectorXd eta = rng.normal_vector(3);
  VectorXd packed(9), full(12);
  packed << vech(P), eta;
  full << vec(P), eta;
  EXPECT_TRUE((augmented_duplication_matrix(3) * packed).isApprox(full));
}

TEST(Grouping, SingleGroupIsPlainStacking) {
  Rng rng(2);
  const auto inst = random_instance(rng, 3, 2, 6);
  const TrajectoryBatch b = closed_loop_batch(inst, 13, 4);
  const GroupedData g = group_trajectories(b, 1, inst.model);
  EXPECT_EQ(g.s, 13);
  EXPECT_EQ(g.discarded, 0);
  for (int k = 0; k <= 6; ++k) {
    for (int i = 0; i < 13; ++i) {
      EXPECT_TRUE(g.X[k].col(i).head(3) == b.trajectories[i].states.col(k));
      EXPECT_EQ(g.X[k](3, i), 1.0);
      EXPECT_TRUE(g.U[k].col(i) == b.trajectories[i].inputs.col(k));
    }
  }
}

TEST(Grouping, LeftoverDiscardedAndYRelation) {
  Rng rng(3);
  const auto inst = random_instance(rng, 3, 2, 6);
  const TrajectoryBatch b = closed_loop_batch(inst, 27, 5);
  const GroupedData g = group_trajectories(b, 2, inst.model);
  EXPECT_EQ(g.s, 13);
  EXPECT_EQ(g.discarded, 1);
  MatrixXd m = MatrixXd::Zero(4, 6);
  m.topLeftCorner(3, 3) = inst.model.A();
  m.topRightCorner(3, 2) = inst.model.B();
  m(3, 3) = 1.0;
  for (int k = 0; k <= 6; ++k) {
    MatrixXd xu(6, g.s);
    xu << g.X[k], g.U[k];
    EXPECT_TRUE(g.Y[k].isApprox(m * xu, 1e-14));
    EXPECT_TRUE((g.X[k].row(3).array() == 1.0).all());
  }
}

TEST(Grouping, IdenticalGroupsAverageToAnyGroup) {
  Rng rng(4);
  const auto inst = random_instance(rng, 2, 1, 4);
  const TrajectoryBatch one = closed_loop_batch(inst, 4, 6);
  TrajectoryBatch rep = one;
  rep.trajectories.clear();
  for (int r = 0; r < 3; ++r) {
    for (const auto& t : one.trajectories) rep.trajectories.push_back(t);
  }
  GroupingOptions opts;
  opts.keep_groups = true;
  const GroupedData g = group_trajectories(rep, 3, inst.model, opts);
  for (int k = 0; k <= 4; ++k) {
    EXPECT_TRUE(g.X[k].isApprox(g.group_X[k][1], 1e-14));
    EXPECT_TRUE(g.U[k].isApprox(g.group_U[k][2], 1e-14));
  }
}

TEST(Grouping, Errors) {
  Rng rng(5);
  const auto inst = random_instance(rng, 3, 1, 6);
  const TrajectoryBatch b = closed_loop_batch(inst, 7, 1);
  EXPECT_EQ(code_of([&] { (void)group_trajectories(b, 2, inst.model); }),
            ErrorCode::kGroupTooSmall);
  // Identical noiseless rollouts give rank-one X_k.
  const PolicySequence pol = solve_riccati(inst.model, inst.cost);
  const VectorXd x0 = VectorXd::Ones(3);
  const TrajectoryBatch same =
      simulate(inst.model, pol, [x0](Rng&) { return x0; }, zero_sampler(3), 6, 1);
  EXPECT_EQ(code_of([&] { (void)group_trajectories(same, 1, inst.model); }),
            ErrorCode::kRankDeficientData);
}

TEST(PhiBlocks, ScalarInputBlock) {
  TrajectoryBatch b;
  b.n = 1;
  b.p = 1;
  b.K = 2;
  const SystemModel model(MatrixXd::Constant(1, 1, 0.9), MatrixXd::Ones(1, 1));
  for (int i = 0; i < 2; ++i) {
    Trajectory t;
    t.states = MatrixXd(1, 4);
    t.inputs = MatrixXd(1, 3);
    t.states << 1.0 + i, 0.5 - i, 0.2 + 2 * i, 0.1;
    t.inputs << 0.3 + i, -0.7 * i, 0.4;
    b.trajectories.push_back(t);
  }
  const PhiBlocks pb = build_phi_blocks(group_trajectories(b, 1, model), model);
  ASSERT_EQ(pb.blocks[0].u.rows(), 2);
  ASSERT_EQ(pb.blocks[0].u.cols(), 1);
  EXPECT_DOUBLE_EQ(pb.blocks[0].u(0, 0), 0.3);
  EXPECT_DOUBLE_EQ(pb.blocks[0].u(1, 0), 1.3);
}

TEST(PhiBlocks, ShapesAndRank) {
  Rng rng(6);
  const auto inst = random_instance(rng, 3, 2, 6);
  const TrajectoryBatch b = closed_loop_batch(inst, 5, 7);
  const PhiBlocks pb = build_phi_blocks(group_trajectories(b, 1, inst.model), inst.model);
  ASSERT_EQ(pb.blocks.size(), 7u);
  for (const auto& blk : pb.blocks) {
    EXPECT_EQ(blk.y.rows(), 5 * 3);
    EXPECT_EQ(blk.y.cols(), 9);
    EXPECT_EQ(blk.by.rows(), 5 * 2);
    EXPECT_EQ(numerical_rank(blk.x), 9);
  }
}

TEST(AssembleZ, TruthInKernelWithRankDeficiencyOne) {
  Rng rng(7);
  const auto inst = random_instance(rng, 3, 2, 6);
  const TrajectoryBatch b = closed_loop_batch(inst, 6, 8);
  const CoefficientSystem sys = assemble_Z(build_phi_blocks(group_trajectories(b, 1, inst.model), inst.model));
  const VectorXd th = inst.cost.theta();
  ASSERT_EQ(sys.Z.cols(), th.size());
  EXPECT_LE((sys.Z * th).norm() / (spectral_norm(sys.Z) * th.norm()), 1e-8);
  EXPECT_EQ(numerical_rank(sys.Z, 1e-9), th.size() - 1);

  Eigen::JacobiSVD<MatrixXd> svd(sys.Z, Eigen::ComputeFullV);
  VectorXd ker = svd.matrixV().col(th.size() - 1);
  ker *= th(0) / ker(0);
  EXPECT_LE(relative_error(ker, th), 1e-6);
}

TEST(AssembleZ, StackedResidualAndElimination) {
  Rng rng(8);
  const auto inst = random_instance(rng, 2, 1, 5);
  const TrajectoryBatch b = closed_loop_batch(inst, 4, 9);
  const CoefficientSystem sys = assemble_Z(build_phi_blocks(group_trajectories(b, 1, inst.model), inst.model));
  const PolicySequence pol = solve_riccati(inst.model, inst.cost);
  const VectorXd th = inst.cost.theta();
  const VectorXd z = stacked_truth(th, pol, ParameterMaps::standard(2, 1), 1.0);
  const MatrixXd S(sys.S);
  EXPECT_LE((S * z).norm() / (spectral_norm(S) * z.norm()), 1e-8);
  EXPECT_LE(relative_error(sys.gamma_from_theta(th), z.tail(sys.gamma_dim())), 1e-6);
}

TEST(AssembleZ, BlockEliminationMatchesDensePinv) {
  for (int trial = 0; trial < 5; ++trial) {
    Rng rng(100 + trial);
    const int n = 1 + trial % 3;
    const int p = 1 + trial % 2;
    const auto inst = random_instance(rng, n, p, 2 * n + 1);
    const TrajectoryBatch b = closed_loop_batch(inst, n + 3, trial);
    const PhiBlocks pb = build_phi_blocks(group_trajectories(b, 1, inst.model), inst.model);
    const MatrixXd dense = assemble_Z_dense(pb);
    const MatrixXd blocked = assemble_Z(pb).Z;
    // Different row bases are fine; the Gram matrices must agree.
    const MatrixXd g1 = dense.transpose() * dense;
    const MatrixXd g2 = blocked.transpose() * blocked;
    EXPECT_LE((g1 - g2).norm(), 1e-8 * g1.norm()) << "trial " << trial;
  }
}

TEST(AttachConstraint, DefaultPinsFirstEntry) {
  Rng rng(9);
  const auto inst = random_instance(rng, 3, 2, 6);
  const TrajectoryBatch b = closed_loop_batch(inst, 6, 10);
  const CoefficientSystem sys = attach_default_constraint(
      assemble_Z(build_phi_blocks(group_trajectories(b, 1, inst.model), inst.model)));
  ASSERT_TRUE(sys.H && sys.h && sys.Omega);
  EXPECT_EQ(sys.H->rows(), sys.Z.rows() + 1);
  EXPECT_EQ((*sys.h)(0), 1.0);
  EXPECT_TRUE(sys.h->tail(sys.Z.rows()).isZero(0.0));
  EXPECT_EQ(sys.Omega->cols(), sys.theta_dim() + sys.gamma_dim());
  const LeastSquaresSolution ls = solve_constrained(sys);
  EXPECT_NEAR(ls.x(0), 1.0, 1e-10);
}

TEST(AttachConstraint, TruthConsistentRowsAccepted) {
  Rng rng(10);
  const auto inst = random_instance(rng, 3, 2, 6);
  const TrajectoryBatch b = closed_loop_batch(inst, 6, 11);
  const CoefficientSystem base =
      assemble_Z(build_phi_blocks(group_trajectories(b, 1, inst.model), inst.model));
  const VectorXd th = inst.cost.theta();
  const MatrixXd C = rng.normal_matrix(2, th.size());
  const CoefficientSystem sys = attach_constraint(base, C, C * th);
  EXPECT_LE(relative_error(solve_constrained(sys).x, th), 1e-6);
}

TEST(AttachConstraint, InconsistentRowsRejected) {
  Rng rng(11);
  const auto inst = random_instance(rng, 3, 2, 6);
  const TrajectoryBatch b = closed_loop_batch(inst, 6, 12);
  const CoefficientSystem base =
      assemble_Z(build_phi_blocks(group_trajectories(b, 1, inst.model), inst.model));
  MatrixXd C = MatrixXd::Zero(2, base.theta_dim());
  C(0, 0) = 1.0;
  C(1, 1) = 1.0;
  VectorXd c(2);
  c << 1.0, 1000.0;
  EXPECT_EQ(code_of([&] { (void)attach_constraint(base, C, c); }),
            ErrorCode::kInconsistentConstraint);
}

TEST(AttachConstraint, KernelOrthogonalRowIsRankDeficient) {
  Rng rng(12);
  const auto inst = random_instance(rng, 2, 1, 5);
  const TrajectoryBatch b = closed_loop_batch(inst, 5, 13);
  const CoefficientSystem base =
      assemble_Z(build_phi_blocks(group_trajectories(b, 1, inst.model), inst.model));
  // A row orthogonal to θ annihilates the kernel, so H keeps a null direction.
  const VectorXd th = inst.cost.theta();
  VectorXd row = rng.normal_vector(th.size());
  row -= row.dot(th) / th.squaredNorm() * th;
  const ErrorCode code = code_of([&] {
    (void)attach_constraint(base, row.transpose(), VectorXd::Ones(1));
  });
  EXPECT_TRUE(code == ErrorCode::kHRankDeficient || code == ErrorCode::kInconsistentConstraint);
}

TEST(KronTransposeApply, MatchesExplicitKronecker) {
  Rng rng(13);
  const MatrixXd x = rng.normal_matrix(3, 4);
  const MatrixXd map = rng.normal_matrix(3 * 2, 5);
  const MatrixXd ref = kron(x, MatrixXd::Identity(2, 2)).transpose() * map;
  EXPECT_TRUE(kron_transpose_apply(x, 2, map).isApprox(ref, 1e-13));
}

}  // namespace
}  // namespace lqtioc
