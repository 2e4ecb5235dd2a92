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

#include "fixtures.hpp"
#include "lqtioc/error.hpp"
#include "lqtioc/experiments.hpp"
#include "lqtioc/solver.hpp"

namespace lqtioc {
namespace {

using testing::closed_loop_batch;
using testing::e1_row;
using testing::identify;
using testing::random_instance;

TEST(SolveTheta, TrivialSystem) {
  CoefficientSystem sys;
  sys.n = 1;
  sys.p = 1;
  sys.input_dim = 1;
  sys.state_dim = 2;
  sys.Z = MatrixXd::Zero(2, 3);
  sys.Z(0, 1) = 1.0;
  sys.Z(1, 2) = 1.0;
  sys.S = sys.Z.sparseView();
  sys = attach_default_constraint(sys);
  const ThetaEstimate est = solve_theta(sys);
  EXPECT_TRUE(est.theta.isApprox(VectorXd::Unit(3, 0)));
}

TEST(SolveTheta, NoiselessRandomRecovery) {
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng(200 + trial);
    const int n = 2 + trial % 2;
    const int p = 1 + trial % 2;
    const auto inst = random_instance(rng, n, p, 2 * n + 2);
    const TrajectoryBatch b = closed_loop_batch(inst, n + 3, trial);
    const ThetaEstimate est = sign_normalize(identify(b, inst.model));
    const VectorXd truth = normalize_theta(inst.cost.theta(), e1_row(est.theta.size()),
                                           VectorXd::Ones(1));
    EXPECT_LT(relative_error(est.theta, truth), 1e-6) << "trial " << trial;
    EXPECT_LE(est.residual, 1e-8);
  }
}

TEST(SolveTheta, NoiselessVehicleRecovery) {
  ExperimentConfig cfg = ExperimentConfig::vehicle_defaults();
  cfg.run_baseline = false;
  for (int t = 0; t < 5; ++t) {
    const VehicleTrial r = run_vehicle_trial(cfg, t);
    EXPECT_EQ(r.main_status, "ok");
    EXPECT_LT(r.main_rel_error, 1e-6);
  }
}

TEST(Reconstruct, ScalarTarget) {
  const CostSpec c(MatrixXd::Constant(1, 1, 2.0), MatrixXd::Ones(1, 1), VectorXd::Constant(1, 3.0), 2);
  EXPECT_DOUBLE_EQ(c.q()(0), -6.0);
  const CostEstimate r = reconstruct(c.theta(), 1, 1);
  EXPECT_NEAR(r.d_hat(0), 3.0, 1e-14);
}

TEST(Reconstruct, RankDeficientQ) {
  MatrixXd q = MatrixXd::Zero(2, 2);
  q(0, 0) = 1.0;
  VectorXd d(2);
  d << 1, 5;
  const CostSpec c(q, MatrixXd::Ones(1, 1), d, 4);
  EXPECT_TRUE(c.q().isApprox(Eigen::Vector2d(-1, 0)));
  const ThetaEstimate est = make_estimate(c.theta(), 2, 1);
  EXPECT_TRUE(est.d_hat.isApprox(Eigen::Vector2d(1, 0)));
  MatrixXd ker = MatrixXd::Zero(2, 2);
  ker(1, 1) = 1.0;
  EXPECT_TRUE(est.kernel_projector.isApprox(ker));
  EXPECT_EQ(est.q_rank, 1);
  EXPECT_EQ(est.unidentifiable_dim, 1);
  EXPECT_TRUE((est.d_hat + est.kernel_projector * Eigen::Vector2d(0, 5)).isApprox(d));
}

TEST(Reconstruct, ProjectorIdempotentSymmetric) {
  Rng rng(3);
  const auto inst = random_instance(rng, 4, 2, 8, 2);
  const ThetaEstimate est = make_estimate(inst.cost.theta(), 4, 2);
  const MatrixXd& P = est.kernel_projector;
  EXPECT_LE((P * P - P).norm(), 1e-10);
  EXPECT_LE((P - P.transpose()).norm(), 1e-10);
  EXPECT_TRUE(est.d_hat.isApprox(-pinv(est.Q_hat, kWeightRankTol) * est.q_hat, 1e-10));
}

TEST(SignNormalize, FlipsNegativeTrace) {
  MatrixXd r = -3.0 * MatrixXd::Identity(1, 1);
  const CostSpec c(-MatrixXd::Identity(2, 2), r, Eigen::Vector2d(1, 2), 4);
  const ThetaEstimate neg = make_estimate(c.theta(), 2, 1);
  const ThetaEstimate pos = sign_normalize(neg);
  EXPECT_NEAR(pos.R_hat.trace(), 3.0, 1e-14);
  EXPECT_TRUE(pos.alpha_convention.sign_flipped);
  EXPECT_TRUE(pos.d_hat.isApprox(neg.d_hat));
  const ThetaEstimate again = sign_normalize(pos);
  EXPECT_TRUE(again.theta == pos.theta);
  EXPECT_TRUE(again.alpha_convention.sign_flipped);
}

TEST(SignNormalize, ZeroThetaIsDegenerate) {
  try {
    (void)sign_normalize(make_estimate(VectorXd::Zero(6), 2, 1));
    FAIL();
  } catch (const IocError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateEstimate);
  }
}

TEST(GeneralSolution, IdentityAndFullRank) {
  Rng rng(4);
  const auto inst = random_instance(rng, 3, 2, 6);
  const ThetaEstimate est = make_estimate(inst.cost.theta(), 3, 2);
  const CostSpec same = general_solution(est, 1.0, VectorXd::Zero(3), 6);
  EXPECT_TRUE(same.Q().isApprox(est.Q_hat));
  EXPECT_TRUE(same.R().isApprox(est.R_hat));
  EXPECT_TRUE(same.d().isApprox(est.d_hat));
  const CostSpec moved = general_solution(est, 1.0, rng.normal_vector(3), 6);
  EXPECT_TRUE(moved.d().isApprox(est.d_hat, 1e-12));
}

TEST(GeneralSolution, NonPositiveAlphaRejected) {
  const ThetaEstimate est = make_estimate(CostSpec(MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1),
                                                   VectorXd::Zero(1), 2).theta(), 1, 1);
  for (double a : {0.0, -1.0}) {
    try {
      (void)general_solution(est, a, VectorXd::Zero(1), 2);
      FAIL();
    } catch (const IocError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNonPositiveAlpha);
    }
  }
}

TEST(GeneralSolution, PolicyInvariantOnVehicle) {
  Rng rng(5);
  ExperimentConfig cfg;
  const VehicleInstance v = sample_vehicle(cfg, rng);
  const ThetaEstimate est = make_estimate(v.cost.theta(), 4, 2);
  const PolicySequence base = solve_riccati(v.model, general_solution(est, 1.0, VectorXd::Zero(4), 8));
  const PolicySequence twice =
      solve_riccati(v.model, general_solution(est, 2.0, 10.0 * rng.normal_vector(4), 8));
  for (int k = 0; k <= 8; ++k) {
    EXPECT_LE(testing::max_rel_diff(twice.gain(k), base.gain(k)), 1e-10);
    EXPECT_LE(testing::max_rel_diff(twice.offset(k), base.offset(k)), 1e-10);
  }
}

TEST(NormalizeTheta, MatchesConstraint) {
  const VectorXd th = Eigen::Vector3d(2, 4, 6);
  MatrixXd C = MatrixXd::Zero(1, 3);
  C(0, 1) = 1.0;
  const VectorXd n = normalize_theta(th, C, VectorXd::Constant(1, 2.0));
  EXPECT_TRUE(n.isApprox(Eigen::Vector3d(1, 2, 3)));
  EXPECT_DOUBLE_EQ(relative_error(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 3)), 0.0);
}

}  // namespace
}  // namespace lqtioc
