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
#include "lqtioc/assembler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lqtioc/error.hpp"

namespace lqtioc {

namespace {

using Triplet = Eigen::Triplet<double>;

void add_block(std::vector<Triplet>& out, Eigen::Index row, Eigen::Index col,
               const MatrixXd& block) {
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      if (block(i, j) != 0.0) out.emplace_back(row + i, col + j, block(i, j));
    }
  }
}

// (I_s ⊗ Mᵀ) · y where y has s row blocks of height m.rows().
MatrixXd left_apply_blockwise(const MatrixXd& m, const MatrixXd& y, int s) {
  const Eigen::Index in = m.rows();
  const Eigen::Index out = m.cols();
  MatrixXd result(s * out, y.cols());
  for (int j = 0; j < s; ++j) {
    result.middleRows(j * out, out) = m.transpose() * y.middleRows(j * in, in);
  }
  return result;
}

// Result of the block-bidiagonal least-squares elimination.
struct Elimination {
  std::vector<MatrixXd> w;  // w[j-1] = rows of (Φ^{Y2})†Φ^X for γ_j
  double min_singular = 0.0;
  double max_singular = 0.0;
};

// Solves min ‖Φ^{Y2} W − Φ^X‖ where Φ^{Y2} is block upper bidiagonal with
// diagonal blocks −Φ_k^x and superdiagonal blocks Φ_k^{A,y}. Householder QR
// sweeps the block columns; rows that fall below each diagonal block only
// affect the residual and are recompressed to stay bounded.
Elimination eliminate_values(const PhiBlocks& pb) {
  const int horizon = pb.K;
  const int g = pb.maps.value_dim();
  const int qq = pb.maps.state_dim();
  Elimination out;
  if (horizon == 0) return out;

  std::vector<MatrixXd> r_diag(static_cast<std::size_t>(horizon));
  std::vector<MatrixXd> r_super(static_cast<std::size_t>(horizon));
  std::vector<MatrixXd> rhs_top(static_cast<std::size_t>(horizon));

  MatrixXd carry_col(0, g);
  MatrixXd carry_rhs(0, qq);
  for (int j = 1; j <= horizon; ++j) {
    const PhiBlock& blk = pb.blocks[static_cast<std::size_t>(j)];
    const Eigen::Index sn = blk.x.rows();
    const Eigen::Index rows = carry_col.rows() + sn;

    MatrixXd col(rows, g);
    col << carry_col, -blk.x;
    MatrixXd rest = MatrixXd::Zero(rows, g + qq);
    // next column (γ_{j+1}) and right-hand side
    if (j < horizon) rest.bottomLeftCorner(sn, g) = blk.ay;
    rest.topRightCorner(carry_rhs.rows(), qq) = carry_rhs;
    MatrixXd rhs_j = blk.x_state;
    if (j == horizon) rhs_j += pb.terminal_ay;
    rest.bottomRightCorner(sn, qq) = rhs_j;

    Eigen::HouseholderQR<MatrixXd> qr(col);
    rest.applyOnTheLeft(qr.householderQ().transpose());
    r_diag[static_cast<std::size_t>(j - 1)] =
        qr.matrixQR().topRows(g).triangularView<Eigen::Upper>();
    r_super[static_cast<std::size_t>(j - 1)] = rest.topLeftCorner(g, g);
    rhs_top[static_cast<std::size_t>(j - 1)] = rest.topRightCorner(g, qq);

    MatrixXd below = rest.bottomRows(rows - g);
    if (below.rows() > g + qq) {
      Eigen::HouseholderQR<MatrixXd> cqr(below);
      below = cqr.matrixQR().topRows(g + qq).triangularView<Eigen::Upper>();
    }
    carry_col = below.leftCols(g);
    carry_rhs = below.rightCols(qq);
  }

  out.min_singular = std::numeric_limits<double>::infinity();
  for (const auto& r : r_diag) {
    const VectorXd sv = singular_values(r);
    out.max_singular = std::max(out.max_singular, sv(0));
    out.min_singular = std::min(out.min_singular, sv(sv.size() - 1));
  }
  if (!(out.min_singular > kPinvTol * out.max_singular)) {
    std::ostringstream os;
    os << "Phi^{Y2} loses full column rank (sigma_min " << out.min_singular << ", sigma_max "
       << out.max_singular << ")";
    throw IocError(ErrorCode::kY2RankDeficient, os.str());
  }

  out.w.resize(static_cast<std::size_t>(horizon));
  for (int j = horizon; j >= 1; --j) {
    const auto idx = static_cast<std::size_t>(j - 1);
    MatrixXd b = rhs_top[idx];
    if (j < horizon) b -= r_super[idx] * out.w[idx + 1];
    out.w[idx] = r_diag[idx].triangularView<Eigen::Upper>().solve(b);
  }
  return out;
}

SparseMatrixXd assemble_S(const PhiBlocks& pb) {
  const int horizon = pb.K;
  const int s = pb.s;
  const int r = pb.maps.input_dim();
  const int qq = pb.maps.state_dim();
  const int g = pb.maps.value_dim();
  const Eigen::Index top_rows = static_cast<Eigen::Index>(horizon + 1) * s * pb.p;
  const Eigen::Index rows = top_rows + static_cast<Eigen::Index>(horizon) * s * pb.n;
  const Eigen::Index cols = r + qq + static_cast<Eigen::Index>(horizon) * g;
  auto gamma_col = [&](int k) { return static_cast<Eigen::Index>(r + qq + (k - 1) * g); };

  std::vector<Triplet> trip;
  for (int k = 0; k <= horizon; ++k) {
    const PhiBlock& blk = pb.blocks[static_cast<std::size_t>(k)];
    const Eigen::Index row = static_cast<Eigen::Index>(k) * s * pb.p;
    add_block(trip, row, 0, blk.u);
    if (k == horizon) {
      add_block(trip, row, r, pb.terminal_by);
    } else {
      add_block(trip, row, gamma_col(k + 1), blk.by);
    }
  }
  for (int k = 1; k <= horizon; ++k) {
    const PhiBlock& blk = pb.blocks[static_cast<std::size_t>(k)];
    const Eigen::Index row = top_rows + static_cast<Eigen::Index>(k - 1) * s * pb.n;
    MatrixXd xs = blk.x_state;
    if (k == horizon) xs += pb.terminal_ay;
    add_block(trip, row, r, xs);
    add_block(trip, row, gamma_col(k), -blk.x);
    if (k < horizon) add_block(trip, row, gamma_col(k + 1), blk.ay);
  }
  SparseMatrixXd out(rows, cols);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace

MatrixXd augmented_duplication_matrix(int n) {
  return block_diag(duplication_matrix(n), MatrixXd::Identity(n, n));
}

ParameterMaps ParameterMaps::standard(int n, int p) {
  ParameterMaps maps;
  maps.input_map = duplication_matrix(p);
  maps.state_map = augmented_duplication_matrix(n);
  maps.value_map = maps.state_map;
  return maps;
}

MatrixXd kron_transpose_apply(const MatrixXd& x, int m, const MatrixXd& map) {
  const Eigen::Index rows = x.rows();
  const Eigen::Index s = x.cols();
  MatrixXd out = MatrixXd::Zero(s * m, map.cols());
  for (Eigen::Index j = 0; j < s; ++j) {
    auto dst = out.middleRows(j * m, m);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double v = x(i, j);
      if (v != 0.0) dst.noalias() += v * map.middleRows(i * m, m);
    }
  }
  return out;
}

GroupedData group_trajectories(const TrajectoryBatch& batch, int T, const SystemModel& model,
                               const GroupingOptions& options) {
  batch.validate();
  if (batch.n != model.n() || batch.p != model.p()) {
    throw IocError(ErrorCode::kDimensionMismatch, "batch and model dimensions differ");
  }
  if (T < 1) throw IocError(ErrorCode::kConfig, "group count must be positive");
  const int n = batch.n;
  const int p = batch.p;
  const int s = batch.M() / T;
  if (s < n + 1) {
    throw IocError(ErrorCode::kGroupTooSmall,
                   "floor(M/T) = " + std::to_string(s) + " < n+1 = " + std::to_string(n + 1));
  }

  GroupedData g;
  g.n = n;
  g.p = p;
  g.K = batch.K;
  g.T = T;
  g.s = s;
  g.discarded = batch.M() - s * T;
  const auto steps = static_cast<std::size_t>(batch.K + 1);
  g.X.resize(steps);
  g.U.resize(steps);
  g.Y.resize(steps);
  g.x_min_singular.resize(batch.K + 1);
  g.x_max_singular.resize(batch.K + 1);
  if (options.keep_groups) {
    g.group_X.assign(steps, std::vector<MatrixXd>(static_cast<std::size_t>(T)));
    g.group_U.assign(steps, std::vector<MatrixXd>(static_cast<std::size_t>(T)));
  }

  MatrixXd transition = MatrixXd::Zero(n + 1, n + 1 + p);
  transition.topLeftCorner(n, n) = model.A();
  transition.topRightCorner(n, p) = model.B();
  transition(n, n) = 1.0;

  std::vector<int> bad;
  for (int k = 0; k <= batch.K; ++k) {
    MatrixXd xs = MatrixXd::Zero(n, s);
    MatrixXd us = MatrixXd::Zero(p, s);
    for (int r = 0; r < T; ++r) {
      MatrixXd xr(n + 1, s);
      MatrixXd ur(p, s);
      for (int j = 0; j < s; ++j) {
        const Trajectory& t = batch.trajectories[static_cast<std::size_t>(r * s + j)];
        xr.col(j).head(n) = t.states.col(k);
        xr(n, j) = 1.0;
        ur.col(j) = t.inputs.col(k);
      }
      xs += xr.topRows(n);
      us += ur;
      if (options.keep_groups) {
        g.group_X[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] = std::move(xr);
        g.group_U[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] = std::move(ur);
      }
    }
    MatrixXd xk(n + 1, s);
    xk.topRows(n) = xs / static_cast<double>(T);
    xk.row(n).setOnes();
    MatrixXd uk = us / static_cast<double>(T);
    MatrixXd stacked(n + 1 + p, s);
    stacked << xk, uk;
    g.Y[static_cast<std::size_t>(k)] = transition * stacked;

    const VectorXd sv = singular_values(xk);
    g.x_max_singular(k) = sv(0);
    g.x_min_singular(k) = sv(sv.size() - 1);
    if (!(g.x_min_singular(k) > kRowRankTol * g.x_max_singular(k))) bad.push_back(k);
    g.X[static_cast<std::size_t>(k)] = std::move(xk);
    g.U[static_cast<std::size_t>(k)] = std::move(uk);
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "grouped X_k lacks full row rank at k =";
    for (int k : bad) os << ' ' << k;
    throw IocError(ErrorCode::kRankDeficientData, os.str());
  }
  return g;
}

PhiBlocks build_phi_blocks(const GroupedData& grouped, const SystemModel& model,
                           const ParameterMaps& maps) {
  const int n = grouped.n;
  const int p = grouped.p;
  if (model.n() != n || model.p() != p) {
    throw IocError(ErrorCode::kDimensionMismatch, "grouped data and model dimensions differ");
  }
  const Eigen::Index vec_len = static_cast<Eigen::Index>(n) * n + n;
  if (maps.input_map.rows() != static_cast<Eigen::Index>(p) * p ||
      maps.state_map.rows() != vec_len || maps.value_map.rows() != vec_len) {
    throw IocError(ErrorCode::kDimensionMismatch, "parameter map row counts do not match n, p");
  }
  if (static_cast<int>(grouped.X.size()) != grouped.K + 1) {
    throw IocError(ErrorCode::kDimensionMismatch, "grouped data has the wrong number of steps");
  }

  PhiBlocks pb;
  pb.n = n;
  pb.p = p;
  pb.K = grouped.K;
  pb.s = grouped.s;
  pb.maps = maps;
  pb.blocks.resize(static_cast<std::size_t>(grouped.K + 1));
  for (int k = 0; k <= grouped.K; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    PhiBlock& blk = pb.blocks[idx];
    blk.u = kron_transpose_apply(grouped.U[idx], p, maps.input_map);
    blk.x = kron_transpose_apply(grouped.X[idx], n, maps.value_map);
    blk.y = kron_transpose_apply(grouped.Y[idx], n, maps.value_map);
    blk.ay = left_apply_blockwise(model.A(), blk.y, grouped.s);
    blk.by = left_apply_blockwise(model.B(), blk.y, grouped.s);
    blk.x_state = kron_transpose_apply(grouped.X[idx], n, maps.state_map);
  }
  const MatrixXd y_state =
      kron_transpose_apply(grouped.Y[static_cast<std::size_t>(grouped.K)], n, maps.state_map);
  pb.terminal_ay = left_apply_blockwise(model.A(), y_state, grouped.s);
  pb.terminal_by = left_apply_blockwise(model.B(), y_state, grouped.s);
  return pb;
}

VectorXd CoefficientSystem::gamma_from_theta(const VectorXd& theta) const {
  if (theta.size() != theta_dim()) {
    throw IocError(ErrorCode::kDimensionMismatch, "theta length does not match the system");
  }
  return -elimination * theta.tail(state_dim);
}

CoefficientSystem assemble_Z(const PhiBlocks& pb) {
  const int horizon = pb.K;
  const int s = pb.s;
  const int r = pb.maps.input_dim();
  const int qq = pb.maps.state_dim();
  const int g = pb.maps.value_dim();
  if (static_cast<int>(pb.blocks.size()) != horizon + 1) {
    throw IocError(ErrorCode::kDimensionMismatch, "missing Phi blocks");
  }

  const Elimination elim = eliminate_values(pb);

  CoefficientSystem sys;
  sys.n = pb.n;
  sys.p = pb.p;
  sys.K = horizon;
  sys.s = s;
  sys.input_dim = r;
  sys.state_dim = qq;
  sys.value_dim = g;
  sys.y2_min_singular = elim.min_singular;
  sys.elimination.resize(static_cast<Eigen::Index>(horizon) * g, qq);
  for (int j = 1; j <= horizon; ++j) {
    sys.elimination.middleRows(static_cast<Eigen::Index>(j - 1) * g, g) =
        elim.w[static_cast<std::size_t>(j - 1)];
  }

  const Eigen::Index sp = static_cast<Eigen::Index>(s) * pb.p;
  const Eigen::Index sn = static_cast<Eigen::Index>(s) * pb.n;
  const Eigen::Index top_rows = static_cast<Eigen::Index>(horizon + 1) * sp;
  sys.Z = MatrixXd::Zero(top_rows + static_cast<Eigen::Index>(horizon) * sn, r + qq);
  for (int k = 0; k <= horizon; ++k) {
    const PhiBlock& blk = pb.blocks[static_cast<std::size_t>(k)];
    auto rows = sys.Z.middleRows(static_cast<Eigen::Index>(k) * sp, sp);
    rows.leftCols(r) = blk.u;
    if (k == horizon) {
      rows.rightCols(qq) = pb.terminal_by;
    } else {
      rows.rightCols(qq).noalias() = -blk.by * elim.w[static_cast<std::size_t>(k)];
    }
  }
  for (int k = 1; k <= horizon; ++k) {
    const PhiBlock& blk = pb.blocks[static_cast<std::size_t>(k)];
    auto rows = sys.Z.middleRows(top_rows + static_cast<Eigen::Index>(k - 1) * sn, sn);
    MatrixXd block = blk.x_state;
    if (k == horizon) {
      block += pb.terminal_ay;
    } else {
      block.noalias() -= blk.ay * elim.w[static_cast<std::size_t>(k)];
    }
    block.noalias() += blk.x * elim.w[static_cast<std::size_t>(k - 1)];
    rows.rightCols(qq) = block;
  }
  sys.S = assemble_S(pb);
  return sys;
}

MatrixXd assemble_Z_dense(const PhiBlocks& pb) {
  const int horizon = pb.K;
  const int r = pb.maps.input_dim();
  const int qq = pb.maps.state_dim();
  const MatrixXd s_full = MatrixXd(assemble_S(pb));
  const Eigen::Index top_rows = static_cast<Eigen::Index>(horizon + 1) * pb.s * pb.p;
  const Eigen::Index bottom_rows = s_full.rows() - top_rows;
  const Eigen::Index gamma_cols = s_full.cols() - r - qq;

  const MatrixXd phi_u = s_full.topLeftCorner(top_rows, r);
  const MatrixXd phi_y0 = s_full.block(0, r, top_rows, qq);
  const MatrixXd phi_y1 = s_full.topRightCorner(top_rows, gamma_cols);
  const MatrixXd phi_x = s_full.block(top_rows, r, bottom_rows, qq);
  const MatrixXd phi_y2 = s_full.bottomRightCorner(bottom_rows, gamma_cols);
  const MatrixXd y2_pinv = pinv(phi_y2);

  MatrixXd z = MatrixXd::Zero(s_full.rows(), r + qq);
  z.topLeftCorner(top_rows, r) = phi_u;
  z.topRightCorner(top_rows, qq) = phi_y0 - phi_y1 * (y2_pinv * phi_x);
  z.bottomRightCorner(bottom_rows, qq) =
      phi_x - phi_y2 * (y2_pinv * phi_x);
  return z;
}

CoefficientSystem attach_constraint(CoefficientSystem system, const MatrixXd& C,
                                    const VectorXd& c, const ConstraintOptions& options) {
  if (C.rows() < 1 || C.cols() != system.theta_dim() || c.size() != C.rows()) {
    throw IocError(ErrorCode::kDimensionMismatch, "constraint shape does not match theta");
  }
  if (c.norm() == 0.0) throw IocError(ErrorCode::kConfig, "constraint value c must be nonzero");

  MatrixXd H(C.rows() + system.Z.rows(), system.theta_dim());
  H << C, system.Z;
  VectorXd h = VectorXd::Zero(H.rows());
  h.head(c.size()) = c;

  std::vector<Triplet> trip;
  add_block(trip, 0, 0, C);
  for (int k = 0; k < system.S.outerSize(); ++k) {
    for (SparseMatrixXd::InnerIterator it(system.S, k); it; ++it) {
      trip.emplace_back(it.row() + C.rows(), it.col(), it.value());
    }
  }
  SparseMatrixXd omega(C.rows() + system.S.rows(), system.S.cols());
  omega.setFromTriplets(trip.begin(), trip.end());

  const VectorXd sv = tall_singular_values(H);
  system.h_max_singular = sv(0);
  system.h_min_singular = sv(sv.size() - 1);
  system.C = C;
  system.c = c;
  system.H = std::move(H);
  system.h = std::move(h);
  system.Omega = std::move(omega);

  if (!(system.h_min_singular > kSingularTol * system.h_max_singular)) {
    std::ostringstream os;
    os << "H lacks full column rank (sigma_min " << system.h_min_singular << ", sigma_max "
       << system.h_max_singular << ")";
    throw IocError(ErrorCode::kHRankDeficient, os.str());
  }
  if (std::isfinite(options.consistency_tol)) {
    const LeastSquaresSolution sol = solve_constrained(system);
    const double rel = sol.residual / c.norm();
    if (rel > options.consistency_tol) {
      std::ostringstream os;
      os << "constraint inconsistent with Z theta = 0 (relative residual " << rel << ")";
      throw IocError(ErrorCode::kInconsistentConstraint, os.str());
    }
  }
  return system;
}

CoefficientSystem attach_default_constraint(CoefficientSystem system,
                                            const ConstraintOptions& options) {
  MatrixXd C = MatrixXd::Zero(1, system.theta_dim());
  C(0, 0) = 1.0;
  return attach_constraint(std::move(system), C, VectorXd::Ones(1), options);
}

LeastSquaresSolution solve_constrained(const CoefficientSystem& system) {
  if (!system.H || !system.h) {
    throw IocError(ErrorCode::kConfig, "attach a constraint before solving");
  }
  const MatrixXd& H = *system.H;
  const VectorXd& h = *system.h;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(H);
  LeastSquaresSolution out;
  out.x = qr.solve(h);
  out.residual = (H * out.x - h).norm();
  return out;
}

}  // namespace lqtioc
