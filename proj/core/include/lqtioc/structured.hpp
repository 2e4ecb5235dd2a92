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
#ifndef LQTIOC_STRUCTURED_HPP
#define LQTIOC_STRUCTURED_HPP

// Multi-agent specialization: N agents with n0 states each, state weight
// Q = (L + I_N) ⊗ I_{n0} for an unknown graph Laplacian L, and diagonal input
// weight R = diag(φ). The reduced unknown is θ̄ = [φ; vech(L + I_N); q].

#include <vector>

#include "lqtioc/assembler.hpp"
#include "lqtioc/solver.hpp"

namespace lqtioc {

struct LaplacianSpec {
  int N = 0;
  int n0 = 0;
  MatrixXd L;
  VectorXd phi;
  std::vector<VectorXd> per_agent_targets;

  [[nodiscard]] int n() const { return N * n0; }
  [[nodiscard]] MatrixXd Q() const;
  [[nodiscard]] MatrixXd R() const;
  [[nodiscard]] VectorXd d() const;
  [[nodiscard]] CostSpec cost(int horizon) const;
  /// Symmetric, zero row sums, PSD and positive φ. Throws ConfigError.
  void validate() const;
};

/// F = (H ⊗ I_{n0})(I_N ⊗ vec(I_{n0})) with H the Nn0-commutation matrix, so
/// that vec((L+I) ⊗ I_{n0}) = (I_N ⊗ F) vec(L+I).
struct LiftOperators {
  MatrixXd F;       // N n0² × N
  MatrixXd lifted;  // I_N ⊗ F, n² × N²
};
LiftOperators build_F(int N, int n0);

/// [diag(u_1) ... diag(u_s)] for an input matrix U = [u_1 ... u_s].
MatrixXd structured_input_matrix(const MatrixXd& inputs);

/// p² × p map with vec(diag(φ)) = E φ.
MatrixXd diagonal_embedding(int p);

enum class ValueStructure {
  kLaplacian,  // P_k = M_k ⊗ I_{n0}, value map diag((I_N⊗F)D_N, I_n)
  kFull,       // P_k unrestricted, value map diag(D_n, I_n)
};

/// Maps for θ̄: input_map = diagonal embedding, state_map = diag((I_N⊗F)D_N, I_n).
ParameterMaps laplacian_maps(int N, int n0, int p, ValueStructure values);

/// θ = lift · θ̄, the reconstruction of the full parameter vector.
MatrixXd structured_lift_matrix(int N, int n0, int p);

/// C̄ = [0_{N×p}, (I_N ⊗ 1ᵀ) D_N, 0_{N×n}], acting on θ̄ (c = 1_N).
MatrixXd reduced_laplacian_constraint(int N, int n0, int p);

/// C = [0, (I_N ⊗ 1ᵀ)(I_N ⊗ F)† D_n, 0], acting on the full θ (c = 1_N).
MatrixXd full_laplacian_constraint(int N, int n0, int p);

struct StructuredTheta {
  VectorXd bar_theta;  // [φ; vech(L+I_N); q]
  VectorXd theta;      // full θ
};

/// Lifts θ̄ to θ.
StructuredTheta lift_structured(const VectorXd& bar_theta, int N, int n0, int p);

/// θ̄ for a known Laplacian specification.
VectorXd structured_theta_of(const LaplacianSpec& spec);

enum class ConstraintForm {
  kReduced,  // C̄ on θ̄
  kLifted,   // full-θ constraint composed with the lift
};

struct StructuredOptions {
  ValueStructure values = ValueStructure::kLaplacian;
  ConstraintForm constraint = ConstraintForm::kReduced;
  ConstraintOptions consistency;
};

struct StructuredResult {
  StructuredTheta estimate;
  LaplacianSpec laplacian;      // L̂, φ̂ and per-agent d̂
  ThetaEstimate full_estimate;  // lifted θ with Q̂, R̂, d̂ diagnostics
  CoefficientSystem system;     // reduced system (for Ω-based analysis)
  VectorXd laplacian_eigenvalues;
  double residual = 0.0;
};

/// Runs grouping, structured assembly and the constrained solve for θ̄.
StructuredResult solve_structured(const TrajectoryBatch& batch, const SystemModel& model, int T,
                                  int N, int n0, const StructuredOptions& options = {});

/// Standard (unstructured) estimate constrained by full_laplacian_constraint.
ThetaEstimate solve_unstructured_laplacian(const TrajectoryBatch& batch,
                                           const SystemModel& model, int T, int N, int n0,
                                           const ConstraintOptions& options = {});

struct ProjectionReport {
  double structured_sq = 0.0;    // ‖θ̂ − θ‖²
  double unstructured_sq = 0.0;  // ‖θ̃ − θ‖²
  double gap_sq = 0.0;           // ‖θ̃ − θ̂‖²
  double identity_residual = 0.0;  // ‖θ̃−θ‖² − ‖θ̃−θ̂‖² − ‖θ̂−θ‖²
};

ProjectionReport projection_gain(const VectorXd& theta_tilde, const VectorXd& theta_hat,
                                 const VectorXd& theta_true);

struct Edge {
  int i = 0;
  int j = 0;
  double weight = 0.0;  // −L_ij
};

/// Upper-triangle pairs i < j with weight −L_ij (all pairs, zero included).
std::vector<Edge> edge_list(const MatrixXd& laplacian);

}  // namespace lqtioc

#endif  // LQTIOC_STRUCTURED_HPP
