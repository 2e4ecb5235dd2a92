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
#ifndef LQTIOC_LQT_HPP
#define LQTIOC_LQT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lqtioc/linalg.hpp"
#include "lqtioc/random.hpp"

namespace lqtioc {

/**
 * Known linear dynamics x_{k+1} = A x_k + B u_k + w_k.
 *
 * Only dimensions are validated on construction; the structural conditions
 * (invertible A, full-column-rank B, controllability) are reported by
 * check_assumptions().
 */
class SystemModel {
 public:
  SystemModel(MatrixXd a, MatrixXd b);

  [[nodiscard]] const MatrixXd& A() const noexcept { return a_; }
  [[nodiscard]] const MatrixXd& B() const noexcept { return b_; }
  [[nodiscard]] int n() const noexcept { return static_cast<int>(a_.rows()); }
  [[nodiscard]] int p() const noexcept { return static_cast<int>(b_.cols()); }

  /// [B, AB, ..., A^{n-1}B]
  [[nodiscard]] MatrixXd controllability_matrix() const;

 private:
  MatrixXd a_;
  MatrixXd b_;
};

/**
 * Tracking cost  sum_{k=0}^{K} (x_{k+1}-d)ᵀQ(x_{k+1}-d) + u_kᵀRu_k.
 *
 * The linear term q = -Q d is kept alongside d; it is always derived from
 * (Q, d), never set independently. Q and R are symmetrized on entry.
 */
class CostSpec {
 public:
  CostSpec(MatrixXd q_weight, MatrixXd r_weight, VectorXd target, int horizon);

  [[nodiscard]] const MatrixXd& Q() const noexcept { return q_weight_; }
  [[nodiscard]] const MatrixXd& R() const noexcept { return r_weight_; }
  [[nodiscard]] const VectorXd& d() const noexcept { return target_; }
  [[nodiscard]] const VectorXd& q() const noexcept { return linear_; }
  [[nodiscard]] int K() const noexcept { return horizon_; }
  [[nodiscard]] int n() const noexcept { return static_cast<int>(q_weight_.rows()); }
  [[nodiscard]] int p() const noexcept { return static_cast<int>(r_weight_.rows()); }

  [[nodiscard]] CostSpec with_target(VectorXd target) const;
  [[nodiscard]] CostSpec scaled(double alpha) const;

  /// θ = [vech(R); vech(Q); q]
  [[nodiscard]] VectorXd theta() const;

 private:
  MatrixXd q_weight_;
  MatrixXd r_weight_;
  VectorXd target_;
  VectorXd linear_;
  int horizon_;
};

/// Time-varying affine policy u_k = Ψ_k x_k + ψ_k together with its Riccati
/// certificate (P_k, η_k), k = 1..K+1.
class PolicySequence {
 public:
  PolicySequence(std::vector<MatrixXd> gains, std::vector<VectorXd> offsets,
                 std::vector<MatrixXd> value_matrices,
                 std::vector<VectorXd> value_vectors);

  [[nodiscard]] int K() const noexcept { return static_cast<int>(gains_.size()) - 1; }
  [[nodiscard]] const MatrixXd& gain(int k) const;      // Ψ_k, k = 0..K
  [[nodiscard]] const VectorXd& offset(int k) const;    // ψ_k, k = 0..K
  [[nodiscard]] const MatrixXd& P(int k) const;         // k = 1..K+1
  [[nodiscard]] const VectorXd& eta(int k) const;       // k = 1..K+1

  /// Ψ_k x + ψ_k; throws IndexOutOfHorizon for k outside [0, K].
  [[nodiscard]] VectorXd action(int k, const VectorXd& x) const;

 private:
  std::vector<MatrixXd> gains_;
  std::vector<VectorXd> offsets_;
  std::vector<MatrixXd> p_;    // index k-1
  std::vector<VectorXd> eta_;  // index k-1
};

/// One rollout: states x_0..x_{K+1} as columns, inputs u_0..u_K as columns.
struct Trajectory {
  MatrixXd states;
  MatrixXd inputs;
};

struct TrajectoryBatch {
  int n = 0;
  int p = 0;
  int K = 0;
  std::vector<Trajectory> trajectories;
  std::optional<std::uint64_t> seed;

  [[nodiscard]] int M() const noexcept { return static_cast<int>(trajectories.size()); }
  /// Throws DimensionMismatch if any trajectory disagrees with (n, p, K).
  void validate() const;
};

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;  // offending singular value / eigenvalue / norm
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  [[nodiscard]] bool all_pass() const;
  /// False when the named check is missing or failed.
  [[nodiscard]] bool passed(const std::string& name) const;
  [[nodiscard]] const AssumptionCheck* find(const std::string& name) const;
};

/// Diagnostic-only; never throws.
AssumptionReport check_assumptions(const SystemModel& model, const CostSpec& cost);

/// Backward Riccati recursion for the finite-horizon tracking problem.
PolicySequence solve_riccati(const SystemModel& model, const CostSpec& cost);

inline VectorXd policy_action(const PolicySequence& policy, int k, const VectorXd& x) {
  return policy.action(k, x);
}

/// M closed-loop rollouts; trajectory i draws from substream i of `seed`.
TrajectoryBatch simulate(const SystemModel& model, const PolicySequence& policy,
                         const VectorSampler& init_sampler,
                         const VectorSampler& process_noise_sampler, int M,
                         std::uint64_t seed);

/// Per-trajectory tracking cost.
std::vector<double> cost_eval(const TrajectoryBatch& batch, const CostSpec& cost);

}  // namespace lqtioc

#endif  // LQTIOC_LQT_HPP
