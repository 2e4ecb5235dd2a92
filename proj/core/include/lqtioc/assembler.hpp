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
#ifndef LQTIOC_ASSEMBLER_HPP
#define LQTIOC_ASSEMBLER_HPP

// Turns observed trajectories into the homogeneous linear system Zθ = 0 whose
// kernel holds the cost parameters θ = [vech(R); vech(Q); q].
//
// Per time step k the optimality conditions read
//   Bᵀ[P_{k+1} η_{k+1}] Y_k + R U_k = 0                  (k = 0..K)
//   Aᵀ[P_{k+1} η_{k+1}] Y_k + [Q−P_k  q−η_k] X_k = 0     (k = 1..K)
// with [P_{K+1} η_{K+1}] = [Q q]. Vectorizing them and eliminating the
// intermediate value parameters γ_k = [vech(P_k); η_k], k = 1..K, leaves a
// system in θ alone.

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "lqtioc/linalg.hpp"
#include "lqtioc/lqt.hpp"

namespace lqtioc {

using SparseMatrixXd = Eigen::SparseMatrix<double>;

/**
 * Linear parameterizations of the unknowns.
 *
 *   vec(R)              = input_map · θ_R
 *   [vec(Q); q]         = state_map · θ_Qq
 *   [vec(P_k); η_k]     = value_map · γ_k
 *
 * The standard choice uses the duplication matrices (D_p, diag(D_n, I_n),
 * diag(D_n, I_n)); the multi-agent path substitutes Laplacian-structured maps.
 */
struct ParameterMaps {
  MatrixXd input_map;
  MatrixXd state_map;
  MatrixXd value_map;

  static ParameterMaps standard(int n, int p);

  [[nodiscard]] int input_dim() const { return static_cast<int>(input_map.cols()); }
  [[nodiscard]] int state_dim() const { return static_cast<int>(state_map.cols()); }
  [[nodiscard]] int value_dim() const { return static_cast<int>(value_map.cols()); }
  [[nodiscard]] int theta_dim() const { return input_dim() + state_dim(); }
};

/// diag(D_n, I_n)
MatrixXd augmented_duplication_matrix(int n);

struct GroupedData {
  int n = 0;
  int p = 0;
  int K = 0;
  int T = 0;  // group count
  int s = 0;  // trajectories per group
  int discarded = 0;
  std::vector<MatrixXd> X;  // (n+1)×s averaged, last row ones, k = 0..K
  std::vector<MatrixXd> U;  // p×s averaged
  std::vector<MatrixXd> Y;  // (n+1)×s, [[A 0 B];[0 1 0]]·[X; U]
  VectorXd x_min_singular;  // σ_min(X_k)
  VectorXd x_max_singular;  // σ_max(X_k)
  // Per-group matrices before averaging, [k][r]; empty unless requested.
  std::vector<std::vector<MatrixXd>> group_X;
  std::vector<std::vector<MatrixXd>> group_U;
};

struct GroupingOptions {
  bool keep_groups = false;
};

/// Splits the batch into T contiguous groups of s = floor(M/T) trajectories
/// (leftovers dropped), averages across groups and forms Y_k.
GroupedData group_trajectories(const TrajectoryBatch& batch, int T, const SystemModel& model,
                               const GroupingOptions& options = {});

/// Per-k blocks of the vectorized optimality conditions.
struct PhiBlock {
  MatrixXd u;         // (U_k ⊗ I_p)ᵀ · input_map          sp × r
  MatrixXd x;         // (X_k ⊗ I_n)ᵀ · value_map          sn × g
  MatrixXd y;         // (Y_k ⊗ I_n)ᵀ · value_map          sn × g
  MatrixXd ay;        // (I_s ⊗ Aᵀ) · y
  MatrixXd by;        // (I_s ⊗ Bᵀ) · y                    sp × g
  MatrixXd x_state;   // (X_k ⊗ I_n)ᵀ · state_map          sn × qq
};

struct PhiBlocks {
  int n = 0;
  int p = 0;
  int K = 0;
  int s = 0;
  ParameterMaps maps;
  std::vector<PhiBlock> blocks;  // k = 0..K
  // Terminal value [P_{K+1} η_{K+1}] = [Q q] expressed through state_map.
  MatrixXd terminal_ay;  // (I_s ⊗ Aᵀ)(Y_K ⊗ I_n)ᵀ · state_map
  MatrixXd terminal_by;  // (I_s ⊗ Bᵀ)(Y_K ⊗ I_n)ᵀ · state_map
};

PhiBlocks build_phi_blocks(const GroupedData& grouped, const SystemModel& model,
                           const ParameterMaps& maps);

inline PhiBlocks build_phi_blocks(const GroupedData& grouped, const SystemModel& model) {
  return build_phi_blocks(grouped, model, ParameterMaps::standard(grouped.n, grouped.p));
}

struct CoefficientSystem {
  int n = 0;
  int p = 0;
  int K = 0;
  int s = 0;
  int input_dim = 0;  // θ_R length
  int state_dim = 0;  // θ_Qq length
  int value_dim = 0;  // per-k γ length

  MatrixXd Z;           // ((K+1)sp + Ksn) × θ
  SparseMatrixXd S;     // same rows × (θ + Kg)
  MatrixXd elimination; // W = (Φ^{Y2})† Φ^X, so γ = −W θ_Qq
  double y2_min_singular = 0.0;  // min over the diagonal R blocks of Φ^{Y2}

  // Present after attach_constraint().
  std::optional<MatrixXd> C;
  std::optional<VectorXd> c;
  std::optional<MatrixXd> H;
  std::optional<VectorXd> h;
  std::optional<SparseMatrixXd> Omega;
  double h_min_singular = 0.0;
  double h_max_singular = 0.0;

  [[nodiscard]] int theta_dim() const { return input_dim + state_dim; }
  [[nodiscard]] int gamma_dim() const { return K * value_dim; }

  /// γ = [γ_1; ...; γ_K] implied by θ through the elimination step.
  [[nodiscard]] VectorXd gamma_from_theta(const VectorXd& theta) const;
};

CoefficientSystem assemble_Z(const PhiBlocks& blocks);

struct ConstraintOptions {
  // Relative LS residual ‖Hθ−h‖/‖h‖ above which the constraint is declared
  // inconsistent with Zθ = 0. Only meaningful on noiseless data; noisy
  // pipelines pass infinity.
  double consistency_tol = 1e-6;
};

/// Adds Cθ = c: H = [C; Z], h = [c; 0], Ω = [[C 0]; S].
CoefficientSystem attach_constraint(CoefficientSystem system, const MatrixXd& C,
                                    const VectorXd& c, const ConstraintOptions& options = {});

/// C = e₁ᵀ, c = 1: pins the first entry of vech(R).
CoefficientSystem attach_default_constraint(CoefficientSystem system,
                                            const ConstraintOptions& options = {});

/// Least-squares solution of Hθ = h by column-pivoted QR.
struct LeastSquaresSolution {
  VectorXd x;
  double residual = 0.0;
};
LeastSquaresSolution solve_constrained(const CoefficientSystem& system);

/// Dense reference for Z using an SVD pseudo-inverse of the assembled Φ^{Y2};
/// quadratic memory, intended for small problems and cross-checks.
MatrixXd assemble_Z_dense(const PhiBlocks& blocks);

/// (Xᵀ ⊗ I_m) · map for an (rows·m) × c map; X is rows×s.
MatrixXd kron_transpose_apply(const MatrixXd& x, int m, const MatrixXd& map);

}  // namespace lqtioc

#endif  // LQTIOC_ASSEMBLER_HPP
