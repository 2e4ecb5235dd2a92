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
#include "lqtioc/linalg.hpp"

#include <cassert>
#include <limits>

namespace lqtioc {

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

VectorXd vec(const MatrixXd& a) {
  return Eigen::Map<const VectorXd>(a.data(), a.size());
}

VectorXd vech(const MatrixXd& a) {
  assert(a.rows() == a.cols());
  const int m = static_cast<int>(a.rows());
  VectorXd v(tri(m));
  int idx = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i) v(idx++) = a(i, j);
  }
  return v;
}

MatrixXd unvech(const VectorXd& v, int m) {
  assert(v.size() == tri(m));
  MatrixXd a(m, m);
  int idx = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i) {
      a(i, j) = v(idx);
      a(j, i) = v(idx);
      ++idx;
    }
  }
  return a;
}

MatrixXd duplication_matrix(int m) {
  assert(m >= 1);
  MatrixXd d = MatrixXd::Zero(m * m, tri(m));
  int col = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i) {
      d(j * m + i, col) = 1.0;
      d(i * m + j, col) = 1.0;
      ++col;
    }
  }
  return d;
}

MatrixXd commutation_matrix(int a, int b) {
  assert(a >= 1 && b >= 1);
  // vec(M)[i + j*a] = M(i, j) and vec(Mᵀ)[j + i*b] = M(i, j).
  MatrixXd h = MatrixXd::Zero(a * b, a * b);
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) h(j + i * b, i + j * a) = 1.0;
  }
  return h;
}

MatrixXd block_diag(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out = MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

VectorXd singular_values(const MatrixXd& a) {
  if (a.size() == 0) return VectorXd();
  if (a.rows() > 2 * a.cols() && a.cols() > 0) return tall_singular_values(a);
  Eigen::BDCSVD<MatrixXd> svd(a);
  return svd.singularValues();
}

VectorXd tall_singular_values(const MatrixXd& a) {
  Eigen::HouseholderQR<MatrixXd> qr(a);
  const Eigen::Index k = std::min(a.rows(), a.cols());
  MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<MatrixXd> svd(r);
  return svd.singularValues();
}

MatrixXd pinv(const MatrixXd& a, double rel_tol) {
  Eigen::BDCSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return MatrixXd::Zero(a.cols(), a.rows());
  const double cutoff = rel_tol * s(0);
  VectorXd inv = VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int numerical_rank(const MatrixXd& a, double rel_tol) {
  const VectorXd s = singular_values(a);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++rank;
  }
  return rank;
}

double spectral_norm(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  const VectorXd s = a.rows() >= a.cols() ? singular_values(a) : singular_values(a.transpose());
  return s(0);
}

double condition_number(const MatrixXd& a) {
  const VectorXd s = singular_values(a);
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

MatrixXd kernel_projector(const MatrixXd& a, double rel_tol) {
  return MatrixXd::Identity(a.cols(), a.cols()) - pinv(a, rel_tol) * a;
}

}  // namespace lqtioc
