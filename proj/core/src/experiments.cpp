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
#include "lqtioc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>

#include <unsupported/Eigen/MatrixFunctions>

#include "lqtioc/error.hpp"
#include "lqtioc/parallel.hpp"
#include "lqtioc/pmp.hpp"

namespace lqtioc {

namespace {

constexpr double kGravity = 9.8;
constexpr double kInfiniteTol = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void mean_std(const std::vector<double>& xs, double& mean, double& stddev) {
  if (xs.empty()) {
    mean = stddev = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  stddev = std::sqrt(sq / static_cast<double>(xs.size()));
}

MatrixXd e1_constraint(int theta_dim) {
  MatrixXd C = MatrixXd::Zero(1, theta_dim);
  C(0, 0) = 1.0;
  return C;
}

// Dense Ω of the structured formation system built from `batch`.
CoefficientSystem formation_system(const TrajectoryBatch& batch, const SystemModel& model, int T,
                                   const LaplacianSpec& spec) {
  const int p = model.p();
  const GroupedData grouped = group_trajectories(batch, T, model);
  const PhiBlocks blocks =
      build_phi_blocks(grouped, model, laplacian_maps(spec.N, spec.n0, p, ValueStructure::kLaplacian));
  return attach_constraint(assemble_Z(blocks), reduced_laplacian_constraint(spec.N, spec.n0, p),
                           VectorXd::Ones(spec.N), {kInfiniteTol});
}

struct FormationDataset {
  TrajectoryBatch clean;
  TrajectoryBatch unit_noise;
  MatrixXd omega;
  double omega_norm = 0.0;
  double unit_delta_norm = 0.0;
};

FormationDataset make_formation_dataset(const ExperimentConfig& cfg, int T, int trial,
                                        bool with_omega) {
  const SystemModel model = formation_model(cfg);
  const LaplacianSpec spec = formation_laplacian();
  const Rng root = Rng(cfg.seed).split(static_cast<std::uint64_t>(T)).split(
      static_cast<std::uint64_t>(trial));
  FormationDataset ds;
  ds.clean = formation_data(cfg, cfg.s * T, root.split(0).seed());
  NoiseSpec unit;
  unit.state_std = 1.0;
  unit.input_std = 1.0;
  unit.seed = root.split(1).seed();
  ds.unit_noise = inject_noise(ds.clean, unit).delta;
  ds.omega = omega_dense(formation_system(ds.clean, model, T, spec));
  const MatrixXd noisy_omega =
      omega_dense(formation_system(perturb(ds.clean, ds.unit_noise, 1.0), model, T, spec));
  ds.omega_norm = spectral_norm(ds.omega);
  ds.unit_delta_norm = spectral_norm(noisy_omega - ds.omega);
  if (!with_omega) ds.omega.resize(0, 0);
  return ds;
}

}  // namespace

ExperimentConfig ExperimentConfig::vehicle_defaults() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::formation_defaults() {
  ExperimentConfig c;
  c.name = "formation";
  c.M = 1300;
  c.K = 24;
  c.T = 100;
  c.trials = 5;
  c.dt = 0.01;
  c.process_noise_var = 0.1;
  c.s = 13;
  return c;
}

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& kv) {
  const std::string name = kv.get_string("experiment", "vehicle");
  ExperimentConfig c;
  if (name == "vehicle") {
    c = vehicle_defaults();
  } else if (name == "formation") {
    c = formation_defaults();
  } else {
    throw IocError(ErrorCode::kConfig, "unknown experiment '" + name + "'");
  }
  c.M = kv.get_int("M", c.M);
  c.K = kv.get_int("K", c.K);
  c.T = kv.get_int("T", c.T);
  c.trials = kv.get_int("trials", c.trials);
  if (kv.has("seed")) c.seed = kv.get_uint64("seed");
  c.out_dir = kv.get_string("out_dir", c.out_dir);
  c.threads = kv.get_int("threads", c.threads);
  c.dt = kv.get_double("dt", c.dt);
  c.process_noise_var = kv.get_double("process_noise_var", c.process_noise_var);
  c.obs_noise_var = kv.get_double("obs_noise_var", c.obs_noise_var);
  c.m1_min = kv.get_double("m1_min", c.m1_min);
  c.m1_max = kv.get_double("m1_max", c.m1_max);
  c.l_min = kv.get_double("l_min", c.l_min);
  c.l_max = kv.get_double("l_max", c.l_max);
  c.angle_max_deg = kv.get_double("angle_max_deg", c.angle_max_deg);
  c.init_other_max = kv.get_double("init_other_max", c.init_other_max);
  if (kv.has("run_baseline")) c.run_baseline = kv.get_bool("run_baseline");
  c.s = kv.get_int("s", c.s);
  c.init_max = kv.get_double("init_max", c.init_max);
  if (kv.has("shared_initial_states")) c.shared_initial_states = kv.get_bool("shared_initial_states");
  if (kv.has("snr_db")) c.snr_db = to_std(kv.get_vector("snr_db"));
  if (kv.has("T_sweep")) c.T_sweep = kv.get_int_list("T_sweep");
  c.sweep_snr_db = kv.get_double("sweep_snr_db", c.sweep_snr_db);
  c.sweep_trials = kv.get_int("sweep_trials", c.sweep_trials);
  c.validate();
  return c;
}

KeyValueConfig ExperimentConfig::to_config() const {
  KeyValueConfig kv;
  kv.set("experiment", name);
  kv.set("M", M);
  kv.set("K", K);
  kv.set("T", T);
  kv.set("trials", trials);
  kv.set("seed", seed);
  kv.set("out_dir", out_dir);
  kv.set("threads", threads);
  kv.set("dt", dt);
  kv.set("process_noise_var", process_noise_var);
  kv.set("obs_noise_var", obs_noise_var);
  kv.set("m1_min", m1_min);
  kv.set("m1_max", m1_max);
  kv.set("l_min", l_min);
  kv.set("l_max", l_max);
  kv.set("angle_max_deg", angle_max_deg);
  kv.set("init_other_max", init_other_max);
  kv.set("run_baseline", run_baseline);
  kv.set("s", s);
  kv.set("init_max", init_max);
  kv.set("shared_initial_states", shared_initial_states);
  kv.set("snr_db", to_eigen(snr_db));
  kv.set("T_sweep", T_sweep);
  kv.set("sweep_snr_db", sweep_snr_db);
  kv.set("sweep_trials", sweep_trials);
  return kv;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw IocError(ErrorCode::kConfig, msg);
  };
  require(name == "vehicle" || name == "formation", "experiment must be vehicle or formation");
  require(M > 0 && K > 0 && T > 0 && trials > 0, "M, K, T and trials must be positive");
  require(threads >= 0, "threads must be nonnegative");
  require(dt > 0.0, "dt must be positive");
  require(process_noise_var >= 0.0 && obs_noise_var >= 0.0, "noise variances must be >= 0");
  require(out_dir.find_first_of("\n#") == std::string::npos, "out_dir contains '#' or newline");
  if (name == "vehicle") {
    require(m1_min > 0.0 && m1_max >= m1_min, "mass range must be positive and ordered");
    require(l_min > 0.0 && l_max >= l_min, "lever length range must be positive and ordered");
    require(angle_max_deg >= 0.0 && init_other_max >= 0.0, "initial ranges must be >= 0");
  } else {
    require(s > 0, "s must be positive");
    require(s * T <= M, "s*T must not exceed M");
    require(!snr_db.empty(), "snr_db list must be nonempty");
    require(sweep_trials > 0, "sweep_trials must be positive");
    for (int t : T_sweep) require(t > 0, "T_sweep entries must be positive");
    require(init_max >= 0.0, "init_max must be >= 0");
  }
  if (name == "vehicle") require(T <= M, "T must not exceed M");
}

std::pair<MatrixXd, MatrixXd> vehicle_continuous(double m1, double l) {
  if (!(m1 > 0.0) || !(l > 0.0)) {
    throw IocError(ErrorCode::kConfig, "vehicle mass and lever length must be positive");
  }
  const double m2 = 0.5 * l;
  const double inertia = m2 * l * l;
  MatrixXd a = MatrixXd::Zero(4, 4);
  a(0, 2) = 1.0;
  a(1, 3) = 1.0;
  a(2, 1) = -kGravity;
  a(3, 0) = -12.0 * m1 * kGravity / inertia;
  MatrixXd b = MatrixXd::Zero(4, 2);
  b(2, 0) = 1.0 / m1;
  b(3, 1) = 12.0 / inertia;
  return {a, b};
}

SystemModel discretize_zoh(const MatrixXd& a_cont, const MatrixXd& b_cont, double dt) {
  if (!(dt > 0.0)) throw IocError(ErrorCode::kConfig, "sampling period must be positive");
  const Eigen::Index n = a_cont.rows();
  const Eigen::Index p = b_cont.cols();
  MatrixXd aug = MatrixXd::Zero(n + p, n + p);
  aug.topLeftCorner(n, n) = a_cont * dt;
  aug.topRightCorner(n, p) = b_cont * dt;
  const MatrixXd e = aug.exp();
  return SystemModel(e.topLeftCorner(n, n), e.topRightCorner(n, p));
}

SystemModel build_vehicle_model(double m1, double l, double dt) {
  const auto [a, b] = vehicle_continuous(m1, l);
  return discretize_zoh(a, b, dt);
}

VehicleInstance sample_vehicle(const ExperimentConfig& cfg, Rng& rng) {
  const double m1 = rng.uniform(cfg.m1_min, cfg.m1_max);
  const double l = rng.uniform(cfg.l_min, cfg.l_max);
  const MatrixXd q0 = rng.uniform_matrix(2, 2, 0.0, 1.0);
  const MatrixXd r0 = rng.uniform_matrix(2, 2, 0.0, 1.0);
  MatrixXd Q = MatrixXd::Zero(4, 4);
  Q.topLeftCorner(2, 2) = q0 * q0.transpose();
  const double angle = cfg.angle_max_deg * std::numbers::pi / 180.0;
  VectorXd d = VectorXd::Zero(4);
  d(0) = rng.uniform(-1.0, 1.0);
  d(1) = rng.uniform(-angle, angle);
  return VehicleInstance{m1, l, build_vehicle_model(m1, l, cfg.dt),
                         CostSpec(Q, r0 * r0.transpose(), d, cfg.K)};
}

VectorSampler vehicle_initial_sampler(const ExperimentConfig& cfg) {
  const double angle = cfg.angle_max_deg * std::numbers::pi / 180.0;
  const double other = cfg.init_other_max;
  return [angle, other](Rng& rng) {
    VectorXd x(4);
    x(0) = rng.uniform(-other, other);
    x(1) = rng.uniform(-angle, angle);
    x(2) = rng.uniform(-other, other);
    x(3) = rng.uniform(-other, other);
    return x;
  };
}

VehicleTrial run_vehicle_trial(const ExperimentConfig& cfg, int trial) {
  VehicleTrial out;
  out.trial = trial;
  const Rng root = Rng(cfg.seed).split(static_cast<std::uint64_t>(trial));
  Rng sampler = root.split(0);
  const VehicleInstance inst = sample_vehicle(cfg, sampler);
  out.m1 = inst.m1;
  out.l = inst.l;
  const PolicySequence policy = solve_riccati(inst.model, inst.cost);
  TrajectoryBatch data =
      simulate(inst.model, policy, vehicle_initial_sampler(cfg),
               gaussian_sampler(4, cfg.process_noise_var), cfg.M, root.split(1).seed());
  const bool noisy = cfg.obs_noise_var > 0.0;
  if (noisy) {
    NoiseSpec ns;
    ns.state_std = std::sqrt(cfg.obs_noise_var);
    ns.input_std = ns.state_std;
    ns.seed = root.split(2).seed();
    data = inject_noise(data, ns).noisy;
  }
  const int theta_dim = tri(2) + tri(4) + 4;
  const MatrixXd C = e1_constraint(theta_dim);
  const VectorXd c = VectorXd::Ones(1);
  const VectorXd truth = normalize_theta(inst.cost.theta(), C, c);

  try {
    const auto start = std::chrono::steady_clock::now();
    const GroupedData grouped = group_trajectories(data, cfg.T, inst.model);
    CoefficientSystem sys = assemble_Z(build_phi_blocks(grouped, inst.model));
    sys = attach_constraint(std::move(sys), C, c,
                            {noisy ? kInfiniteTol : ConstraintOptions{}.consistency_tol});
    const ThetaEstimate est = solve_theta(sys);
    out.main_seconds = seconds_since(start);
    out.main_rel_error = relative_error(est.theta, truth);
  } catch (const IocError& e) {
    out.main_status = error_name(e.code());
  }
  if (cfg.run_baseline) {
    try {
      const auto start = std::chrono::steady_clock::now();
      const ThetaEstimate est = solve_pmp(data, inst.model, C, c);
      out.pmp_seconds = seconds_since(start);
      out.pmp_rel_error = relative_error(est.theta, truth);
    } catch (const IocError& e) {
      out.pmp_status = error_name(e.code());
    }
  } else {
    out.pmp_status = "skipped";
  }
  return out;
}

VehicleResult run_vehicle_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  VehicleResult res;
  res.trials.resize(static_cast<std::size_t>(cfg.trials));
  parallel_for(
      cfg.trials,
      [&](int t) { res.trials[static_cast<std::size_t>(t)] = run_vehicle_trial(cfg, t); },
      cfg.threads);
  std::vector<double> main, pmp;
  for (const auto& t : res.trials) {
    if (t.main_status == "ok") main.push_back(t.main_rel_error); else ++res.main_failures;
    if (t.pmp_status == "ok") pmp.push_back(t.pmp_rel_error);
    else if (t.pmp_status != "skipped") ++res.pmp_failures;
  }
  mean_std(main, res.main_mean, res.main_std);
  mean_std(pmp, res.pmp_mean, res.pmp_std);
  return res;
}

void write_vehicle_csv(std::ostream& out, const VehicleResult& result, bool include_timing) {
  out << "trial,m1,l,main_rel_error,pmp_rel_error,main_seconds,pmp_seconds,main_status,pmp_status\n";
  for (const auto& t : result.trials) {
    out << t.trial << ',' << format_double(t.m1) << ',' << format_double(t.l) << ','
        << format_double(t.main_rel_error) << ',' << format_double(t.pmp_rel_error) << ','
        << (include_timing ? format_double(t.main_seconds) : std::string("0")) << ','
        << (include_timing ? format_double(t.pmp_seconds) : std::string("0")) << ','
        << t.main_status << ',' << t.pmp_status << '\n';
  }
}

LaplacianSpec formation_laplacian() {
  LaplacianSpec spec;
  spec.N = 6;
  spec.n0 = 2;
  spec.L.resize(6, 6);
  spec.L << 3, -1, -1, 0, 0, -1,
            -1, 3, -1, 0, -1, 0,
            -1, -1, 3, -1, 0, 0,
            0, 0, -1, 1, 0, 0,
            0, -1, 0, 0, 1, 0,
            -1, 0, 0, 0, 0, 1;
  spec.phi = VectorXd::Constant(12, 0.15);
  const double h = std::sqrt(3.0) / 2.0;
  const double pts[6][2] = {{0, 0}, {1, 0}, {1.5, h}, {1, 2 * h}, {0, 2 * h}, {-0.5, h}};
  for (const auto& pt : pts) {
    VectorXd d(2);
    d << pt[0], pt[1];
    spec.per_agent_targets.push_back(d);
  }
  return spec;
}

SystemModel formation_model(const ExperimentConfig& cfg) {
  const int n = 12;
  return SystemModel(MatrixXd::Identity(n, n), cfg.dt * MatrixXd::Identity(n, n));
}

TrajectoryBatch formation_data(const ExperimentConfig& cfg, int M, std::uint64_t seed) {
  const SystemModel model = formation_model(cfg);
  const PolicySequence policy = solve_riccati(model, formation_laplacian().cost(cfg.K));
  const VectorSampler noise = gaussian_sampler(12, cfg.process_noise_var);
  if (!cfg.shared_initial_states) {
    return simulate(model, policy, uniform_sampler(12, -cfg.init_max, cfg.init_max), noise, M,
                    seed);
  }
  const Rng root(seed);
  const int slots = std::min(cfg.s, M);
  const int per_slot = (M + slots - 1) / slots;
  std::vector<TrajectoryBatch> by_slot;
  for (int j = 0; j < slots; ++j) {
    Rng init_rng = root.split(2 * static_cast<std::uint64_t>(j));
    const VectorXd x0 = init_rng.uniform_vector(12, -cfg.init_max, cfg.init_max);
    by_slot.push_back(simulate(model, policy, [x0](Rng&) { return x0; }, noise, per_slot,
                               root.split(2 * static_cast<std::uint64_t>(j) + 1).seed()));
  }
  TrajectoryBatch batch;
  batch.n = 12;
  batch.p = 12;
  batch.K = cfg.K;
  batch.seed = seed;
  for (int i = 0; i < M; ++i) {
    batch.trajectories.push_back(
        by_slot[static_cast<std::size_t>(i % slots)].trajectories[static_cast<std::size_t>(i / slots)]);
  }
  return batch;
}

FormationNoiseless run_formation_noiseless(const ExperimentConfig& cfg, std::uint64_t seed) {
  const LaplacianSpec spec = formation_laplacian();
  const TrajectoryBatch data = formation_data(cfg, cfg.s, seed);
  FormationNoiseless out{0.0, 0.0,
                         solve_structured(data, formation_model(cfg), 1, spec.N, spec.n0)};
  out.rel_error = relative_error(out.result.estimate.bar_theta, structured_theta_of(spec));
  for (int j = 0; j < spec.N; ++j) {
    const VectorXd err = out.result.laplacian.per_agent_targets[static_cast<std::size_t>(j)] -
                         spec.per_agent_targets[static_cast<std::size_t>(j)];
    out.max_target_error = std::max(out.max_target_error, err.cwiseAbs().maxCoeff());
  }
  return out;
}

std::vector<SweepPoint> formation_dataset_points(const ExperimentConfig& cfg, int T, int trial,
                                                 const std::vector<double>& snr_db) {
  const SystemModel model = formation_model(cfg);
  const LaplacianSpec spec = formation_laplacian();
  const FormationDataset ds = make_formation_dataset(cfg, T, trial, true);
  const double cond = omega_condition(ds.omega);
  const VectorXd theta_true = structured_theta_of(spec);
  const PolicySequence policy = solve_riccati(model, spec.cost(cfg.K));
  const VectorXd z_true = stacked_truth(
      theta_true, policy, laplacian_maps(spec.N, spec.n0, 12, ValueStructure::kLaplacian), 1.0);

  StructuredOptions opts;
  opts.consistency.consistency_tol = kInfiniteTol;
  std::vector<SweepPoint> points;
  for (double snr : snr_db) {
    SweepPoint pt;
    pt.T = T;
    pt.snr_db = snr;
    pt.trial = trial;
    pt.cond_omega = cond;
    try {
      const double sigma = noise_scale_for_snr(ds.omega_norm, ds.unit_delta_norm, T, snr);
      const TrajectoryBatch noisy = perturb(ds.clean, ds.unit_noise, sigma);
      const StructuredResult res = solve_structured(noisy, model, T, spec.N, spec.n0, opts);
      pt.rel_error = relative_error(res.estimate.bar_theta, theta_true);
      pt.bound = bound_from_condition(cond, z_true, theta_true, T, snr).bound;
    } catch (const std::exception& e) {
      pt.ok = false;
      pt.error = e.what();
    }
    points.push_back(std::move(pt));
  }
  return points;
}

namespace {

// Fills a grid-major point table for grid = T_values × snr_db.
SweepResult formation_sweep(const ExperimentConfig& cfg, const std::vector<int>& T_values,
                            const std::vector<double>& snr_db, int trials) {
  std::vector<GridPoint> grid;
  for (int T : T_values) {
    for (double snr : snr_db) grid.push_back({T, snr});
  }
  SweepResult res;
  const std::size_t nsnr = snr_db.size();
  res.points.resize(grid.size() * static_cast<std::size_t>(trials));
  const int jobs = static_cast<int>(T_values.size()) * trials;
  parallel_for(
      jobs,
      [&](int job) {
        const int ti = job / trials;
        const int trial = job % trials;
        const int T = T_values[static_cast<std::size_t>(ti)];
        std::vector<SweepPoint> pts;
        try {
          pts = formation_dataset_points(cfg, T, trial, snr_db);
        } catch (const std::exception& e) {
          for (double snr : snr_db) {
            SweepPoint pt;
            pt.T = T;
            pt.snr_db = snr;
            pt.trial = trial;
            pt.ok = false;
            pt.error = e.what();
            pts.push_back(pt);
          }
        }
        for (std::size_t si = 0; si < nsnr; ++si) {
          const std::size_t g = static_cast<std::size_t>(ti) * nsnr + si;
          res.points[g * static_cast<std::size_t>(trials) + static_cast<std::size_t>(trial)] =
              std::move(pts[si]);
        }
      },
      cfg.threads);
  res.summary = summarize_sweep(res.points, grid, trials);
  return res;
}

}  // namespace

FormationResult run_formation_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  FormationResult out;
  out.snr_sweep = formation_sweep(cfg, {cfg.T}, cfg.snr_db, cfg.trials);
  if (!cfg.T_sweep.empty()) {
    out.T_sweep = formation_sweep(cfg, cfg.T_sweep, {cfg.sweep_snr_db}, cfg.sweep_trials);
    fit_T_slope(out.T_sweep);
  }
  return out;
}

ProjectionTrial formation_projection_trial(const ExperimentConfig& cfg, int trial,
                                           double snr_db) {
  const SystemModel model = formation_model(cfg);
  const LaplacianSpec spec = formation_laplacian();
  const FormationDataset ds = make_formation_dataset(cfg, cfg.T, trial, false);
  const double sigma = noise_scale_for_snr(ds.omega_norm, ds.unit_delta_norm, cfg.T, snr_db);
  const TrajectoryBatch noisy = perturb(ds.clean, ds.unit_noise, sigma);

  StructuredOptions opts;
  opts.consistency.consistency_tol = kInfiniteTol;
  ProjectionTrial out;
  out.theta_true = spec.cost(cfg.K).theta();
  out.theta_hat = solve_structured(noisy, model, cfg.T, spec.N, spec.n0, opts).estimate.theta;
  out.theta_tilde =
      solve_unstructured_laplacian(noisy, model, cfg.T, spec.N, spec.n0, {kInfiniteTol}).theta;
  out.report = projection_gain(out.theta_tilde, out.theta_hat, out.theta_true);
  return out;
}

}  // namespace lqtioc
