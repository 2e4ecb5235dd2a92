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
#ifndef LQTIOC_EXPERIMENTS_HPP
#define LQTIOC_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lqtioc/error_analysis.hpp"
#include "lqtioc/io.hpp"
#include "lqtioc/lqt.hpp"
#include "lqtioc/structured.hpp"

namespace lqtioc {

struct ExperimentConfig {
  std::string name = "vehicle";  // vehicle | formation
  int M = 5;
  int K = 8;
  int T = 1;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 0;

  double dt = 0.2;
  double process_noise_var = 0.1;
  double obs_noise_var = 0.0;  // vehicle observation noise, per entry

  // Vehicle sampling ranges.
  double m1_min = 1.0, m1_max = 2.0;
  double l_min = 2.0, l_max = 4.0;
  double angle_max_deg = 30.0;
  double init_other_max = 1.0;
  bool run_baseline = true;

  // Formation.
  int s = 13;
  double init_max = 2.0;
  // Trajectory j of every group starts from the same initial state (drawn
  // once per dataset), so grouped averages keep full row rank as T grows.
  bool shared_initial_states = true;
  std::vector<double> snr_db = {20, 30, 40, 50, 60, 70};
  std::vector<int> T_sweep = {5, 25, 125, 625};
  double sweep_snr_db = 20.0;
  int sweep_trials = 20;

  static ExperimentConfig vehicle_defaults();
  static ExperimentConfig formation_defaults();

  /// Starts from the defaults of `name` and overrides present keys.
  static ExperimentConfig from_config(const KeyValueConfig& cfg);
  [[nodiscard]] KeyValueConfig to_config() const;
  /// Throws ConfigError on non-positive counts or s·T > M.
  void validate() const;
};

/// Zero-order-hold discretization of the linearized vehicle-on-a-lever model
/// (g = 9.8, m2 = 0.5 l).
SystemModel build_vehicle_model(double m1, double l, double dt);

/// Continuous-time pair (𝒜, ℬ) before discretization.
std::pair<MatrixXd, MatrixXd> vehicle_continuous(double m1, double l);

/// Exact ZOH: exp([[𝒜, ℬ]; [0, 0]]·dt) = [[A, B]; [0, I]].
SystemModel discretize_zoh(const MatrixXd& a_cont, const MatrixXd& b_cont, double dt);

struct VehicleInstance {
  double m1 = 0.0;
  double l = 0.0;
  SystemModel model;
  CostSpec cost;
};

/// m1, l, Q = diag(Q0Q0ᵀ, 0), R = R0R0ᵀ, Q0, R0 ~ U[0,1]^{2×2}; target
/// position ~ U[−1,1], angle ~ U[−30°,30°], zero velocities.
VehicleInstance sample_vehicle(const ExperimentConfig& cfg, Rng& rng);

/// Angle ~ U[−angle_max, angle_max], other components ~ U[−1, 1].
VectorSampler vehicle_initial_sampler(const ExperimentConfig& cfg);

struct VehicleTrial {
  int trial = 0;
  double m1 = 0.0;
  double l = 0.0;
  double main_rel_error = std::numeric_limits<double>::quiet_NaN();
  double pmp_rel_error = std::numeric_limits<double>::quiet_NaN();
  double main_seconds = 0.0;
  double pmp_seconds = 0.0;
  std::string main_status = "ok";
  std::string pmp_status = "ok";
};

struct VehicleResult {
  std::vector<VehicleTrial> trials;
  double main_mean = 0.0;
  double main_std = 0.0;
  double pmp_mean = 0.0;
  double pmp_std = 0.0;
  int main_failures = 0;
  int pmp_failures = 0;
};

VehicleTrial run_vehicle_trial(const ExperimentConfig& cfg, int trial);
VehicleResult run_vehicle_experiment(const ExperimentConfig& cfg);
/// trial,m1,l,main_rel_error,pmp_rel_error,main_seconds,pmp_seconds,main_status,pmp_status
void write_vehicle_csv(std::ostream& out, const VehicleResult& result, bool include_timing = true);

/// The six-agent formation: the fixed Laplacian, targets and φ = 0.15·1.
LaplacianSpec formation_laplacian();
/// A = I, B = dt·I for single-integrator agents.
SystemModel formation_model(const ExperimentConfig& cfg);

/// M clean closed-loop trajectories, x0 ~ U[−init_max, init_max]^n. With
/// shared_initial_states, trajectory i starts from slot (i mod s) of s drawn
/// initial states; process noise is always fresh per trajectory.
TrajectoryBatch formation_data(const ExperimentConfig& cfg, int M, std::uint64_t seed);

struct FormationNoiseless {
  double rel_error = 0.0;         // on θ̄
  double max_target_error = 0.0;  // max_j ‖d̂^j − d^j‖_∞
  StructuredResult result;
};
FormationNoiseless run_formation_noiseless(const ExperimentConfig& cfg, std::uint64_t seed);

/// One formation dataset (fixed T, trial) evaluated at every SNR in `snr_db`:
/// a single clean batch and a single unit-variance noise realization, scaled
/// per SNR so that ΔΩ hits the target exactly.
std::vector<SweepPoint> formation_dataset_points(const ExperimentConfig& cfg, int T, int trial,
                                                 const std::vector<double>& snr_db);

struct FormationResult {
  SweepResult snr_sweep;
  SweepResult T_sweep;
};
FormationResult run_formation_experiment(const ExperimentConfig& cfg);

/// Matched noisy formation dataset for comparing the structured and the
/// unstructured estimates, both in full θ coordinates.
struct ProjectionTrial {
  VectorXd theta_true;
  VectorXd theta_hat;    // structured, lifted
  VectorXd theta_tilde;  // unstructured
  ProjectionReport report;
};
ProjectionTrial formation_projection_trial(const ExperimentConfig& cfg, int trial, double snr_db);

}  // namespace lqtioc

#endif  // LQTIOC_EXPERIMENTS_HPP
