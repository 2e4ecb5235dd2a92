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
#ifndef LQTIOC_ERROR_ANALYSIS_HPP
#define LQTIOC_ERROR_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "lqtioc/assembler.hpp"
#include "lqtioc/lqt.hpp"

namespace lqtioc {

enum class NoiseDistribution { kGaussian, kUniform };

/// Zero-mean additive observation noise, independent across entries, time
/// steps and trajectories. A non-empty per-component vector overrides the
/// scalar standard deviation of the same signal.
struct NoiseSpec {
  double state_std = 0.0;
  double input_std = 0.0;
  VectorXd state_std_per_component;
  VectorXd input_std_per_component;
  NoiseDistribution distribution = NoiseDistribution::kGaussian;
  std::uint64_t seed = 0;
};

/// The noisy batch keeps its clean source and the realized perturbation so
/// ΔΩ can be formed exactly.
struct NoisyBatch {
  TrajectoryBatch clean;
  TrajectoryBatch noisy;
  TrajectoryBatch delta;  // noisy − clean
};

NoisyBatch inject_noise(const TrajectoryBatch& batch, const NoiseSpec& spec);

/// clean + scale · delta, entrywise on states and inputs.
TrajectoryBatch perturb(const TrajectoryBatch& clean, const TrajectoryBatch& delta, double scale);

/// Ω = [[C 0]; S] as a dense matrix (requires an attached constraint).
MatrixXd omega_dense(const CoefficientSystem& system);

/// 10·log10(‖Ω‖² / (T·‖ΔΩ‖²)), spectral norms. ΔΩ = 0 gives +infinity.
double compute_snr(const MatrixXd& omega_clean, const MatrixXd& omega_noisy, int T);

inline bool is_zero_noise(double snr_db) { return snr_db == std::numeric_limits<double>::infinity(); }

/// Scale σ such that ΔΩ = σ·ΔΩ₁ reaches `target_db`; ΔΩ is linear in the noise.
double noise_scale_for_snr(double omega_norm, double unit_delta_norm, int T, double target_db);

struct BoundReport {
  double snr_db = 0.0;
  double cond_omega = 1.0;
  double z_norm = 0.0;
  double theta_norm = 0.0;
  int T = 0;
  // Leading term T^{-1/2}·cond(Ω)·10^{-SNR/20}·‖z‖/‖θ‖ only; the O(1/T)
  // remainder has no known constant and is not included.
  double bound = 0.0;
  double empirical_rel_error = std::numeric_limits<double>::quiet_NaN();
};

/// cond(Ω) from the singular values; throws OmegaRankDeficient when
/// σ_min ≤ kSingularTol·σ_max.
double omega_condition(const MatrixXd& omega);

BoundReport theorem2_bound(const MatrixXd& omega_clean, const VectorXd& z_true,
                           const VectorXd& theta_true, int T, double snr_db);

/// Same bound from a precomputed cond(Ω).
BoundReport bound_from_condition(double cond_omega, const VectorXd& z_true,
                                 const VectorXd& theta_true, int T, double snr_db);

/// True stacked unknown z = [θ; γ_1; ...; γ_K] for the parameterization
/// `maps`, with γ_k = value_map†·[vec(P_k); η_k] scaled by `scale` (the
/// normalization factor applied to θ).
VectorXd stacked_truth(const VectorXd& theta, const PolicySequence& policy,
                       const ParameterMaps& maps, double scale);

struct SweepPoint {
  int T = 0;
  double snr_db = 0.0;
  int trial = 0;
  double rel_error = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  double cond_omega = std::numeric_limits<double>::quiet_NaN();
  bool ok = true;
  std::string error;
};

struct SweepSummary {
  int T = 0;
  double snr_db = 0.0;
  int trials = 0;
  int failures = 0;
  double mean_rel_error = 0.0;
  double std_rel_error = 0.0;
  double mean_bound = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // grid order, then trial index
  std::vector<SweepSummary> summary;
  double slope = std::numeric_limits<double>::quiet_NaN();  // log-log vs T
  double intercept = std::numeric_limits<double>::quiet_NaN();
};

/// Produces one Monte Carlo outcome; must be safe to call concurrently.
using TrialGenerator = std::function<SweepPoint(int T, double snr_db, int trial)>;

struct GridPoint {
  int T = 0;
  double snr_db = 0.0;
};

/// Runs `trials` per grid point in parallel; results are stored by index and
/// summarized in fixed order, so output does not depend on scheduling.
SweepResult monte_carlo_sweep(const TrialGenerator& generator, const std::vector<GridPoint>& grid,
                              int trials, int threads = 0);

/// Per-grid-point statistics over `points` laid out grid-major with
/// `trials` entries each; failed trials are counted, not averaged.
std::vector<SweepSummary> summarize_sweep(const std::vector<SweepPoint>& points,
                                          const std::vector<GridPoint>& grid, int trials);

/// Fills slope/intercept from the summaries (points with a positive mean).
void fit_T_slope(SweepResult& result);

/// T sweep at fixed SNR, with the least-squares slope of log(mean error)
/// against log(T).
SweepResult convergence_sweep(const TrialGenerator& generator, const std::vector<int>& T_values,
                              double snr_db, int trials, int threads = 0);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Header T,snr_db,trial,rel_error,bound,cond_omega; failed trials are written
/// with nan values.
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace lqtioc

#endif  // LQTIOC_ERROR_ANALYSIS_HPP
