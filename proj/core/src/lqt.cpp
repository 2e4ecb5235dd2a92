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
#include "lqtioc/lqt.hpp"

#include <algorithm>
#include <sstream>

#include "lqtioc/error.hpp"

namespace lqtioc {

namespace {

std::string dims(const MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

SystemModel::SystemModel(MatrixXd a, MatrixXd b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols() || b_.rows() != a_.rows() || b_.cols() == 0) {
    throw IocError(ErrorCode::kDimensionMismatch,
                   "system model needs square A and B with matching rows, got A " +
                       dims(a_) + " and B " + dims(b_));
  }
}

MatrixXd SystemModel::controllability_matrix() const {
  const int nn = n();
  const int pp = p();
  MatrixXd c(nn, nn * pp);
  MatrixXd block = b_;
  for (int i = 0; i < nn; ++i) {
    c.middleCols(i * pp, pp) = block;
    block = a_ * block;
  }
  return c;
}

CostSpec::CostSpec(MatrixXd q_weight, MatrixXd r_weight, VectorXd target, int horizon)
    : q_weight_(std::move(q_weight)),
      r_weight_(std::move(r_weight)),
      target_(std::move(target)),
      horizon_(horizon) {
  if (q_weight_.rows() != q_weight_.cols() || r_weight_.rows() != r_weight_.cols() ||
      target_.size() != q_weight_.rows() || r_weight_.rows() == 0) {
    throw IocError(ErrorCode::kDimensionMismatch,
                   "cost needs square Q (" + dims(q_weight_) + "), square R (" +
                       dims(r_weight_) + ") and d of matching length");
  }
  if (horizon_ < 0) throw IocError(ErrorCode::kConfig, "horizon must be nonnegative");
  q_weight_ = symmetrize(q_weight_);
  r_weight_ = symmetrize(r_weight_);
  linear_ = -q_weight_ * target_;
}

CostSpec CostSpec::with_target(VectorXd target) const {
  return CostSpec(q_weight_, r_weight_, std::move(target), horizon_);
}

CostSpec CostSpec::scaled(double alpha) const {
  return CostSpec(alpha * q_weight_, alpha * r_weight_, target_, horizon_);
}

VectorXd CostSpec::theta() const {
  const int nn = n();
  const int pp = p();
  VectorXd t(tri(pp) + tri(nn) + nn);
  t << vech(r_weight_), vech(q_weight_), linear_;
  return t;
}

PolicySequence::PolicySequence(std::vector<MatrixXd> gains, std::vector<VectorXd> offsets,
                               std::vector<MatrixXd> value_matrices,
                               std::vector<VectorXd> value_vectors)
    : gains_(std::move(gains)),
      offsets_(std::move(offsets)),
      p_(std::move(value_matrices)),
      eta_(std::move(value_vectors)) {
  if (gains_.empty() || gains_.size() != offsets_.size() || p_.size() != gains_.size() ||
      eta_.size() != gains_.size()) {
    throw IocError(ErrorCode::kDimensionMismatch, "inconsistent policy sequence lengths");
  }
}

const MatrixXd& PolicySequence::gain(int k) const {
  if (k < 0 || k > K()) throw IocError(ErrorCode::kIndexOutOfHorizon, "gain index " + std::to_string(k));
  return gains_[static_cast<std::size_t>(k)];
}

const VectorXd& PolicySequence::offset(int k) const {
  if (k < 0 || k > K()) throw IocError(ErrorCode::kIndexOutOfHorizon, "offset index " + std::to_string(k));
  return offsets_[static_cast<std::size_t>(k)];
}

const MatrixXd& PolicySequence::P(int k) const {
  if (k < 1 || k > K() + 1) throw IocError(ErrorCode::kIndexOutOfHorizon, "P index " + std::to_string(k));
  return p_[static_cast<std::size_t>(k - 1)];
}

const VectorXd& PolicySequence::eta(int k) const {
  if (k < 1 || k > K() + 1) throw IocError(ErrorCode::kIndexOutOfHorizon, "eta index " + std::to_string(k));
  return eta_[static_cast<std::size_t>(k - 1)];
}

VectorXd PolicySequence::action(int k, const VectorXd& x) const {
  const MatrixXd& g = gain(k);
  if (x.size() != g.cols()) throw IocError(ErrorCode::kDimensionMismatch, "state length mismatch");
  return g * x + offset(k);
}

void TrajectoryBatch::validate() const {
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& t = trajectories[i];
    if (t.states.rows() != n || t.states.cols() != K + 2 || t.inputs.rows() != p ||
        t.inputs.cols() != K + 1) {
      throw IocError(ErrorCode::kDimensionMismatch,
                     "trajectory " + std::to_string(i) + " has states " + dims(t.states) +
                         " and inputs " + dims(t.inputs));
    }
  }
}

bool AssumptionReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool AssumptionReport::passed(const std::string& name) const {
  const auto* c = find(name);
  return c != nullptr && c->pass;
}

AssumptionReport check_assumptions(const SystemModel& model, const CostSpec& cost) {
  AssumptionReport report;
  auto add = [&](std::string name, bool pass, double value, std::string detail) {
    report.checks.push_back({std::move(name), pass, value, std::move(detail)});
  };

  if (cost.n() != model.n() || cost.p() != model.p()) {
    add("dimensions", false, 0.0, "cost and model dimensions differ");
    return report;
  }
  const int n = model.n();

  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(cost.Q(), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    add("Q_psd", lo >= -kSingularTol * scale, lo, "smallest eigenvalue of Q");
  }
  bool r_pd = false;
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(cost.R(), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    r_pd = hi > 0.0 && lo > kSingularTol * hi;
    add("R_pd", r_pd, lo, "smallest eigenvalue of R");
  }
  {
    const VectorXd s = singular_values(model.A());
    const double smin = s(s.size() - 1);
    add("A_invertible", s(0) > 0.0 && smin > kSingularTol * s(0), smin,
        "smallest singular value of A");
  }
  {
    const VectorXd s = singular_values(model.B());
    const double smin = s(s.size() - 1);
    add("B_full_column_rank", s(0) > 0.0 && smin > kSingularTol * s(0), smin,
        "smallest singular value of B");
  }
  {
    const MatrixXd c = model.controllability_matrix();
    const VectorXd s = singular_values(c);
    const int rank = numerical_rank(c);
    const double sn = s.size() >= n ? s(n - 1) : 0.0;
    add("controllable", rank == n, sn,
        "rank " + std::to_string(rank) + " of " + std::to_string(n) +
            "; value is the n-th singular value of [B AB ...]");
  }
  add("horizon", cost.K() >= 2 * n, static_cast<double>(cost.K()), "requires K >= 2n");

  if (!r_pd) {
    add("cond_ii_pd", false, 0.0, "R not invertible");
    add("cond_ii_noncommuting", false, 0.0, "R not invertible");
    return report;
  }
  const MatrixXd combined =
      symmetrize(model.B() * cost.R().ldlt().solve(model.B().transpose()) + cost.Q());
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(combined, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    add("cond_ii_pd", hi > 0.0 && lo > kSingularTol * hi, lo,
        "smallest eigenvalue of B R^-1 B' + Q");
  }
  {
    const double comm = (combined * model.A() - model.A() * combined).norm();
    const double scale = combined.norm() * model.A().norm();
    add("cond_ii_noncommuting", comm > kSingularTol * scale, comm,
        "Frobenius norm of the commutator with A");
  }
  return report;
}

PolicySequence solve_riccati(const SystemModel& model, const CostSpec& cost) {
  if (cost.n() != model.n() || cost.p() != model.p()) {
    throw IocError(ErrorCode::kDimensionMismatch, "cost and model dimensions differ");
  }
  const MatrixXd& a = model.A();
  const MatrixXd& b = model.B();
  const int horizon = cost.K();
  const auto steps = static_cast<std::size_t>(horizon + 1);

  std::vector<MatrixXd> gains(steps);
  std::vector<VectorXd> offsets(steps);
  std::vector<MatrixXd> p(steps);
  std::vector<VectorXd> eta(steps);

  MatrixXd p_next = cost.Q();
  VectorXd eta_next = cost.q();
  p[steps - 1] = p_next;
  eta[steps - 1] = eta_next;

  for (int k = horizon; k >= 0; --k) {
    const MatrixXd btp = b.transpose() * p_next;
    const MatrixXd inner = symmetrize(cost.R() + btp * b);
    const VectorXd s = singular_values(inner);
    if (!(s(0) > 0.0) || s(s.size() - 1) < kSingularTol * s(0)) {
      throw IocError(ErrorCode::kNonInvertibleInnerMatrix,
                     "R + B'P B is numerically singular at k = " + std::to_string(k));
    }
    const auto lu = inner.fullPivLu();
    const MatrixXd gain = -lu.solve(btp * a);
    const VectorXd offset = -lu.solve(b.transpose() * eta_next);
    gains[static_cast<std::size_t>(k)] = gain;
    offsets[static_cast<std::size_t>(k)] = offset;
    if (k == 0) break;

    const MatrixXd pb = p_next * b;
    const VectorXd eta_k = cost.q() + a.transpose() * (pb * offset + eta_next);
    const MatrixXd p_k = symmetrize(cost.Q() + a.transpose() * (pb * gain + p_next * a));
    p[static_cast<std::size_t>(k - 1)] = p_k;
    eta[static_cast<std::size_t>(k - 1)] = eta_k;
    p_next = p_k;
    eta_next = eta_k;
  }
  return PolicySequence(std::move(gains), std::move(offsets), std::move(p), std::move(eta));
}

TrajectoryBatch simulate(const SystemModel& model, const PolicySequence& policy,
                         const VectorSampler& init_sampler,
                         const VectorSampler& process_noise_sampler, int M,
                         std::uint64_t seed) {
  const int horizon = policy.K();
  TrajectoryBatch batch;
  batch.n = model.n();
  batch.p = model.p();
  batch.K = horizon;
  batch.seed = seed;
  batch.trajectories.resize(static_cast<std::size_t>(std::max(M, 0)));

  const Rng root(seed);
  for (int i = 0; i < M; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    Trajectory t;
    t.states.resize(batch.n, horizon + 2);
    t.inputs.resize(batch.p, horizon + 1);
    t.states.col(0) = init_sampler(rng);
    for (int k = 0; k <= horizon; ++k) {
      const VectorXd x = t.states.col(k);
      const VectorXd u = policy.action(k, x);
      t.inputs.col(k) = u;
      t.states.col(k + 1) = model.A() * x + model.B() * u + process_noise_sampler(rng);
    }
    batch.trajectories[static_cast<std::size_t>(i)] = std::move(t);
  }
  return batch;
}

std::vector<double> cost_eval(const TrajectoryBatch& batch, const CostSpec& cost) {
  batch.validate();
  if (batch.n != cost.n() || batch.p != cost.p() || batch.K != cost.K()) {
    throw IocError(ErrorCode::kDimensionMismatch, "batch and cost dimensions differ");
  }
  std::vector<double> out;
  out.reserve(batch.trajectories.size());
  for (const auto& t : batch.trajectories) {
    double total = 0.0;
    for (int k = 0; k <= batch.K; ++k) {
      const VectorXd e = t.states.col(k + 1) - cost.d();
      const VectorXd u = t.inputs.col(k);
      total += e.dot(cost.Q() * e) + u.dot(cost.R() * u);
    }
    out.push_back(total);
  }
  return out;
}

}  // namespace lqtioc
