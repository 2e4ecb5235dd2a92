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
#include "lqtioc/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "lqtioc/error.hpp"
#include "lqtioc/parallel.hpp"

namespace lqtioc {

namespace {

VectorXd component_std(double scalar, const VectorXd& per_component, int size) {
  if (per_component.size() == 0) return VectorXd::Constant(size, scalar);
  if (per_component.size() != size) {
    throw IocError(ErrorCode::kDimensionMismatch, "per-component noise scale has wrong length");
  }
  return per_component;
}

double draw(Rng& rng, NoiseDistribution dist, double stddev) {
  if (stddev == 0.0) return 0.0;
  if (dist == NoiseDistribution::kUniform) {
    const double half = std::sqrt(3.0) * stddev;
    return rng.uniform(-half, half);
  }
  return rng.normal(0.0, stddev);
}

void fill(MatrixXd& m, const VectorXd& stddev, NoiseDistribution dist, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = draw(rng, dist, stddev(i));
  }
}

}  // namespace

NoisyBatch inject_noise(const TrajectoryBatch& batch, const NoiseSpec& spec) {
  batch.validate();
  const VectorXd sx = component_std(spec.state_std, spec.state_std_per_component, batch.n);
  const VectorXd su = component_std(spec.input_std, spec.input_std_per_component, batch.p);
  if (sx.minCoeff() < 0.0 || (su.size() > 0 && su.minCoeff() < 0.0)) {
    throw IocError(ErrorCode::kConfig, "noise standard deviations must be nonnegative");
  }
  NoisyBatch out;
  out.clean = batch;
  out.delta = batch;
  const Rng root(spec.seed);
  for (int i = 0; i < batch.M(); ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    Trajectory& d = out.delta.trajectories[static_cast<std::size_t>(i)];
    fill(d.states, sx, spec.distribution, rng);
    fill(d.inputs, su, spec.distribution, rng);
  }
  out.noisy = perturb(batch, out.delta, 1.0);
  return out;
}

TrajectoryBatch perturb(const TrajectoryBatch& clean, const TrajectoryBatch& delta, double scale) {
  if (clean.M() != delta.M() || clean.n != delta.n || clean.p != delta.p || clean.K != delta.K) {
    throw IocError(ErrorCode::kDimensionMismatch, "clean and delta batches differ in shape");
  }
  TrajectoryBatch out = clean;
  for (std::size_t i = 0; i < out.trajectories.size(); ++i) {
    out.trajectories[i].states += scale * delta.trajectories[i].states;
    out.trajectories[i].inputs += scale * delta.trajectories[i].inputs;
  }
  return out;
}

MatrixXd omega_dense(const CoefficientSystem& system) {
  if (!system.Omega) {
    throw IocError(ErrorCode::kConfig, "Omega requires an attached constraint");
  }
  return MatrixXd(*system.Omega);
}

double compute_snr(const MatrixXd& omega_clean, const MatrixXd& omega_noisy, int T) {
  if (omega_clean.rows() != omega_noisy.rows() || omega_clean.cols() != omega_noisy.cols()) {
    throw IocError(ErrorCode::kDimensionMismatch, "SNR needs equal-shape matrices");
  }
  if (T < 1) throw IocError(ErrorCode::kConfig, "T must be positive");
  const MatrixXd delta = omega_noisy - omega_clean;
  if (delta.isZero(0.0)) return std::numeric_limits<double>::infinity();
  const double num = spectral_norm(omega_clean);
  const double den = spectral_norm(delta);
  return 10.0 * std::log10(num * num / (static_cast<double>(T) * den * den));
}

double noise_scale_for_snr(double omega_norm, double unit_delta_norm, int T, double target_db) {
  if (!(unit_delta_norm > 0.0)) {
    throw IocError(ErrorCode::kConfig, "unit noise realization is zero");
  }
  return omega_norm /
         (std::sqrt(static_cast<double>(T)) * unit_delta_norm * std::pow(10.0, target_db / 20.0));
}

double omega_condition(const MatrixXd& omega) {
  const VectorXd sv = omega.rows() > 2 * omega.cols() ? tall_singular_values(omega)
                                                      : singular_values(omega);
  const double smax = sv.maxCoeff();
  const double smin = sv.minCoeff();
  if (omega.rows() < omega.cols() || !(smin > kSingularTol * smax)) {
    throw IocError(ErrorCode::kOmegaRankDeficient, "Omega lacks full column rank (sigma_min = " +
                                                       std::to_string(smin) + ")");
  }
  return smax / smin;
}

BoundReport bound_from_condition(double cond_omega, const VectorXd& z_true,
                                 const VectorXd& theta_true, int T, double snr_db) {
  if (T < 1) throw IocError(ErrorCode::kConfig, "T must be positive");
  BoundReport r;
  r.snr_db = snr_db;
  r.cond_omega = cond_omega;
  r.z_norm = z_true.norm();
  r.theta_norm = theta_true.norm();
  r.T = T;
  r.bound = is_zero_noise(snr_db) ? 0.0
                                  : std::pow(static_cast<double>(T), -0.5) * cond_omega *
                                        std::pow(10.0, -0.05 * snr_db) * r.z_norm / r.theta_norm;
  return r;
}

BoundReport theorem2_bound(const MatrixXd& omega_clean, const VectorXd& z_true,
                           const VectorXd& theta_true, int T, double snr_db) {
  if (z_true.size() != omega_clean.cols()) {
    throw IocError(ErrorCode::kDimensionMismatch, "z length must equal the columns of Omega");
  }
  return bound_from_condition(omega_condition(omega_clean), z_true, theta_true, T, snr_db);
}

VectorXd stacked_truth(const VectorXd& theta, const PolicySequence& policy,
                       const ParameterMaps& maps, double scale) {
  const int K = policy.K();
  const int g = maps.value_dim();
  const MatrixXd inv = pinv(maps.value_map);
  VectorXd z(theta.size() + static_cast<Eigen::Index>(K) * g);
  z.head(theta.size()) = theta;
  for (int k = 1; k <= K; ++k) {
    VectorXd value(policy.P(k).size() + policy.eta(k).size());
    value << vec(policy.P(k)), policy.eta(k);
    z.segment(theta.size() + static_cast<Eigen::Index>(k - 1) * g, g) = scale * (inv * value);
  }
  return z;
}

LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw IocError(ErrorCode::kConfig, "log-log fit needs at least two points");
  }
  const auto m = static_cast<Eigen::Index>(x.size());
  MatrixXd a(m, 2);
  VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, 0) = std::log(x[static_cast<std::size_t>(i)]);
    a(i, 1) = 1.0;
    b(i) = std::log(y[static_cast<std::size_t>(i)]);
  }
  const VectorXd coef = a.colPivHouseholderQr().solve(b);
  return {coef(0), coef(1)};
}

SweepResult monte_carlo_sweep(const TrialGenerator& generator, const std::vector<GridPoint>& grid,
                              int trials, int threads) {
  if (trials < 1) throw IocError(ErrorCode::kConfig, "trial count must be positive");
  SweepResult result;
  const int total = static_cast<int>(grid.size()) * trials;
  result.points.resize(static_cast<std::size_t>(total));
  parallel_for(
      total,
      [&](int idx) {
        const GridPoint& gp = grid[static_cast<std::size_t>(idx / trials)];
        const int trial = idx % trials;
        SweepPoint pt;
        try {
          pt = generator(gp.T, gp.snr_db, trial);
        } catch (const std::exception& e) {
          pt.ok = false;
          pt.error = e.what();
        }
        pt.T = gp.T;
        pt.snr_db = gp.snr_db;
        pt.trial = trial;
        result.points[static_cast<std::size_t>(idx)] = std::move(pt);
      },
      threads);

  result.summary = summarize_sweep(result.points, grid, trials);
  return result;
}

std::vector<SweepSummary> summarize_sweep(const std::vector<SweepPoint>& points,
                                          const std::vector<GridPoint>& grid, int trials) {
  std::vector<SweepSummary> out;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    SweepSummary s;
    s.T = grid[gi].T;
    s.snr_db = grid[gi].snr_db;
    double sum = 0.0, sum_sq = 0.0, bound_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      const SweepPoint& pt = points[gi * static_cast<std::size_t>(trials) +
                                          static_cast<std::size_t>(t)];
      if (!pt.ok) {
        ++s.failures;
        continue;
      }
      ++s.trials;
      sum += pt.rel_error;
      sum_sq += pt.rel_error * pt.rel_error;
      bound_sum += pt.bound;
    }
    if (s.trials > 0) {
      s.mean_rel_error = sum / s.trials;
      s.mean_bound = bound_sum / s.trials;
      const double var = sum_sq / s.trials - s.mean_rel_error * s.mean_rel_error;
      s.std_rel_error = std::sqrt(std::max(0.0, var));
    } else {
      s.mean_rel_error = std::numeric_limits<double>::quiet_NaN();
      s.mean_bound = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(s);
  }
  return out;
}

void fit_T_slope(SweepResult& result) {
  std::vector<double> xs, ys;
  for (const auto& s : result.summary) {
    if (s.trials > 0 && s.mean_rel_error > 0.0) {
      xs.push_back(static_cast<double>(s.T));
      ys.push_back(s.mean_rel_error);
    }
  }
  if (xs.size() >= 2) {
    const LineFit fit = loglog_fit(xs, ys);
    result.slope = fit.slope;
    result.intercept = fit.intercept;
  }
}

SweepResult convergence_sweep(const TrialGenerator& generator, const std::vector<int>& T_values,
                              double snr_db, int trials, int threads) {
  std::vector<GridPoint> grid;
  for (int T : T_values) grid.push_back({T, snr_db});
  SweepResult result = monte_carlo_sweep(generator, grid, trials, threads);
  fit_T_slope(result);
  return result;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "T,snr_db,trial,rel_error,bound,cond_omega\n";
  out << std::setprecision(17);
  for (const auto& p : points) {
    out << p.T << ',' << p.snr_db << ',' << p.trial << ',';
    if (p.ok) {
      out << p.rel_error << ',' << p.bound << ',' << p.cond_omega << '\n';
    } else {
      out << "nan,nan,nan\n";
    }
  }
}

}  // namespace lqtioc
