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
#ifndef LQTIOC_LINALG_HPP
#define LQTIOC_LINALG_HPP

#include <Eigen/Dense>

namespace lqtioc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Relative thresholds, all measured against the largest singular value.
inline constexpr double kSingularTol = 1e-10;   // invertibility, rank checks
inline constexpr double kRowRankTol = 1e-8;     // grouped X_k row rank
inline constexpr double kPinvTol = 1e-10;       // pseudo-inverse truncation
inline constexpr double kWeightRankTol = 1e-8;  // rank of an estimated Q

/// Kronecker product a ⊗ b.
MatrixXd kron(const MatrixXd& a, const MatrixXd& b);

/// Column-stacking vectorization.
VectorXd vec(const MatrixXd& a);

/// Stacks the lower-triangular part of a square matrix column by column.
VectorXd vech(const MatrixXd& a);

/// Inverse of vech for a symmetric m×m matrix.
MatrixXd unvech(const VectorXd& v, int m);

/// 0/1 matrix D_m (m² × m(m+1)/2) with D_m·vech(A) == vec(A) for symmetric A.
MatrixXd duplication_matrix(int m);

/// a·b × a·b permutation H with H·vec(M) == vec(Mᵀ) for every a×b matrix M.
MatrixXd commutation_matrix(int a, int b);

/// Block diagonal [a 0; 0 b].
MatrixXd block_diag(const MatrixXd& a, const MatrixXd& b);

inline constexpr int tri(int m) { return m * (m + 1) / 2; }

VectorXd singular_values(const MatrixXd& a);

/// Moore-Penrose pseudo-inverse by SVD; singular values below
/// `rel_tol * sigma_max` are treated as zero.
MatrixXd pinv(const MatrixXd& a, double rel_tol = kPinvTol);

int numerical_rank(const MatrixXd& a, double rel_tol = kSingularTol);

/// Largest singular value. Tall inputs are first reduced by a QR step.
double spectral_norm(const MatrixXd& a);

/// sigma_max / sigma_min of a full-column-rank matrix (infinity when the
/// smallest singular value vanishes).
double condition_number(const MatrixXd& a);

/// Singular values of a tall matrix computed from its R factor.
VectorXd tall_singular_values(const MatrixXd& a);

inline MatrixXd symmetrize(const MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

/// Orthogonal projector onto ker(A) for a symmetric A: I − A†A.
MatrixXd kernel_projector(const MatrixXd& a, double rel_tol = kPinvTol);

}  // namespace lqtioc

#endif  // LQTIOC_LINALG_HPP
