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
// lqtioc command-line front end.
//
//   lqtioc forward    --problem p.cfg
//   lqtioc simulate   --problem p.cfg -M 20 -o traj.txt
//   lqtioc identify   --problem p.cfg --data traj.txt [--groups T]
//                     [--structured --agents N] [--baseline pmp]
//                     [--constraint c.cfg] [--tol 1e-6]
//   lqtioc experiment vehicle|formation [--config e.cfg]
//   lqtioc check      --problem p.cfg
//
// Exit codes: 0 ok, 2 configuration, 3 rank/identifiability, 4 numeric.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "lqtioc/assembler.hpp"
#include "lqtioc/error.hpp"
#include "lqtioc/experiments.hpp"
#include "lqtioc/io.hpp"
#include "lqtioc/lqt.hpp"
#include "lqtioc/pmp.hpp"
#include "lqtioc/solver.hpp"
#include "lqtioc/structured.hpp"

namespace {

using namespace lqtioc;

struct GlobalOptions {
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string out_dir;
  std::string format = "csv";
};

bool json_format(const GlobalOptions& g) { return g.format == "json"; }

double parse_tol(const std::string& s) {
  if (s == "inf" || s == "none") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !(v > 0.0)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IocError(ErrorCode::kConfig, "bad tolerance '" + s + "'");
  }
}

ProblemFile load_problem(const std::string& path) {
  return problem_from_config(KeyValueConfig::load(path));
}

CostSpec require_cost(const ProblemFile& pf, const std::string& path) {
  if (!pf.cost) {
    throw IocError(ErrorCode::kConfig, path + " has no cost section (Q, R, d, K)");
  }
  return *pf.cost;
}

// Writes to out_dir/name when an output directory is given, else stdout.
void emit(const GlobalOptions& g, const std::string& name, const std::string& text) {
  if (g.out_dir.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(g.out_dir);
  const std::string path = (std::filesystem::path(g.out_dir) / name).string();
  std::ofstream out(path);
  if (!out) throw IocError(ErrorCode::kIo, "cannot write " + path);
  out << text;
  std::cerr << "wrote " << path << '\n';
}

int cmd_forward(const GlobalOptions& g, const std::string& problem) {
  const ProblemFile pf = load_problem(problem);
  const CostSpec cost = require_cost(pf, problem);
  const PolicySequence policy = solve_riccati(SystemModel(pf.A, pf.B), cost);
  if (json_format(g)) {
    emit(g, "policy.json", policy_json(policy) + "\n");
  } else {
    std::ostringstream os;
    write_policy_text(os, policy);
    emit(g, "policy.txt", os.str());
  }
  return 0;
}

struct SimulateArgs {
  std::string problem;
  std::string output;
  int M = 10;
  double process_noise_var = 0.1;
  double init_lo = -1.0;
  double init_hi = 1.0;
};

int cmd_simulate(const GlobalOptions& g, const SimulateArgs& a) {
  const ProblemFile pf = load_problem(a.problem);
  const CostSpec cost = require_cost(pf, a.problem);
  const SystemModel model(pf.A, pf.B);
  if (a.M < 1) throw IocError(ErrorCode::kConfig, "M must be positive");
  const PolicySequence policy = solve_riccati(model, cost);
  const int n = model.n();
  const VectorSampler noise =
      a.process_noise_var > 0.0 ? gaussian_sampler(n, a.process_noise_var) : zero_sampler(n);
  const TrajectoryBatch batch =
      simulate(model, policy, uniform_sampler(n, a.init_lo, a.init_hi), noise, a.M, g.seed);
  if (a.output.empty()) {
    write_trajectories(std::cout, batch);
  } else {
    save_trajectories(a.output, batch);
  }
  return 0;
}

struct IdentifyArgs {
  std::string problem;
  std::string data;
  std::string constraint;
  std::string baseline;
  std::string tol = "1e-6";
  int groups = 1;
  bool structured = false;
  int agents = 0;
};

void load_constraint(const std::string& path, MatrixXd& C, VectorXd& c) {
  const KeyValueConfig cfg = KeyValueConfig::load(path);
  C = cfg.get_matrix("C");
  c = cfg.get_vector("c");
  if (C.rows() != c.size()) {
    throw IocError(ErrorCode::kDimensionMismatch, "constraint C and c disagree in rows");
  }
}

void emit_estimate(const GlobalOptions& g, const ThetaEstimate& est) {
  if (json_format(g)) {
    emit(g, "estimate.json", estimate_json(est) + "\n");
  } else {
    std::ostringstream os;
    write_estimate_text(os, est);
    emit(g, "estimate.txt", os.str());
  }
}

int cmd_identify(const GlobalOptions& g, const IdentifyArgs& a) {
  const ProblemFile pf = load_problem(a.problem);
  const SystemModel model(pf.A, pf.B);
  const TrajectoryBatch batch = load_trajectories(a.data);
  const ConstraintOptions consistency{parse_tol(a.tol)};

  if (a.structured) {
    if (a.agents < 1 || model.n() % a.agents != 0) {
      throw IocError(ErrorCode::kConfig, "--agents must divide the state dimension");
    }
    if (!a.constraint.empty()) {
      throw IocError(ErrorCode::kConfig, "--structured uses the Laplacian row-sum constraint");
    }
    StructuredOptions opts;
    opts.consistency = consistency;
    const StructuredResult res =
        solve_structured(batch, model, a.groups, a.agents, model.n() / a.agents, opts);
    if (json_format(g)) {
      emit(g, "laplacian.json",
           "{\"laplacian\": " + laplacian_json(res.laplacian) +
               ", \"estimate\": " + estimate_json(res.full_estimate) + "}\n");
    } else {
      std::ostringstream os;
      write_laplacian_text(os, res.laplacian);
      write_estimate_text(os, res.full_estimate);
      emit(g, "laplacian.txt", os.str());
    }
    return 0;
  }

  const int dim = tri(model.p()) + tri(model.n()) + model.n();
  MatrixXd C = MatrixXd::Zero(1, dim);
  VectorXd c = VectorXd::Ones(1);
  C(0, 0) = 1.0;
  if (!a.constraint.empty()) load_constraint(a.constraint, C, c);

  ThetaEstimate est;
  if (a.baseline == "pmp") {
    est = solve_pmp(batch, model, C, c);
  } else if (!a.baseline.empty()) {
    throw IocError(ErrorCode::kConfig, "unknown baseline '" + a.baseline + "'");
  } else {
    const GroupedData grouped = group_trajectories(batch, a.groups, model);
    const CoefficientSystem sys =
        attach_constraint(assemble_Z(build_phi_blocks(grouped, model)), C, c, consistency);
    est = solve_theta(sys);
  }
  emit_estimate(g, sign_normalize(est));
  return 0;
}

int cmd_experiment(const GlobalOptions& g, const std::string& which, const std::string& config) {
  KeyValueConfig kv;
  if (!config.empty()) kv = KeyValueConfig::load(config);
  if (kv.has("experiment") && kv.get_string("experiment") != which) {
    throw IocError(ErrorCode::kConfig, config + " describes experiment '" +
                                           kv.get_string("experiment") + "'");
  }
  kv.set("experiment", which);
  ExperimentConfig cfg = ExperimentConfig::from_config(kv);
  if (g.seed_set) cfg.seed = g.seed;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);

  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IocError(ErrorCode::kIo, "cannot write " + p.string());
    return out;
  };

  if (which == "vehicle") {
    const VehicleResult res = run_vehicle_experiment(cfg);
    std::ofstream out = open(dir / "vehicle.csv");
    write_vehicle_csv(out, res);
    std::cout << "trials " << res.trials.size() << "\nmain_mean " << format_double(res.main_mean)
              << "\nmain_std " << format_double(res.main_std) << "\nmain_failures "
              << res.main_failures << '\n';
    if (cfg.run_baseline) {
      std::cout << "pmp_mean " << format_double(res.pmp_mean) << "\npmp_std "
                << format_double(res.pmp_std) << "\npmp_failures " << res.pmp_failures << '\n';
    }
    return 0;
  }
  const FormationResult res = run_formation_experiment(cfg);
  {
    std::ofstream out = open(dir / "formation_snr_sweep.csv");
    write_sweep_csv(out, res.snr_sweep.points);
  }
  if (!cfg.T_sweep.empty()) {
    std::ofstream out = open(dir / "formation_T_sweep.csv");
    write_sweep_csv(out, res.T_sweep.points);
  }
  for (const SweepSummary& s : res.snr_sweep.summary) {
    std::cout << "snr " << s.snr_db << " T " << s.T << " mean " << format_double(s.mean_rel_error)
              << " bound " << format_double(s.mean_bound) << " failures " << s.failures << '\n';
  }
  for (const SweepSummary& s : res.T_sweep.summary) {
    std::cout << "T " << s.T << " snr " << s.snr_db << " mean " << format_double(s.mean_rel_error)
              << " failures " << s.failures << '\n';
  }
  if (!cfg.T_sweep.empty()) std::cout << "slope " << format_double(res.T_sweep.slope) << '\n';
  return 0;
}

int cmd_check(const GlobalOptions& g, const std::string& problem) {
  const ProblemFile pf = load_problem(problem);
  const CostSpec cost = require_cost(pf, problem);
  const AssumptionReport report = check_assumptions(SystemModel(pf.A, pf.B), cost);
  if (json_format(g)) {
    emit(g, "assumptions.json", assumptions_json(report) + "\n");
  } else {
    std::ostringstream os;
    write_assumptions_text(os, report);
    emit(g, "assumptions.txt", os.str());
  }
  return 0;
}

int fail(ErrorCode code, const std::string& what) {
  const int exit_code = static_cast<int>(error_category(code));
  std::cerr << "lqtioc: error " << error_name(code) << " (exit " << exit_code << "): " << what
            << '\n';
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse optimal control for finite-horizon linear-quadratic tracking"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed")->each([&](const std::string&) {
    g.seed_set = true;
  });
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string forward_problem;
  auto* forward = app.add_subcommand("forward", "Solve the Riccati recursion and print the policy");
  forward->add_option("--problem", forward_problem, "Problem file (A, B, Q, R, d, K)")
      ->required();

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate closed-loop trajectories");
  simulate_cmd->add_option("--problem", sim.problem, "Problem file")->required();
  simulate_cmd->add_option("-M", sim.M, "Number of trajectories");
  simulate_cmd->add_option("-o,--output", sim.output, "Trajectory file (stdout when omitted)");
  simulate_cmd->add_option("--process-noise-var", sim.process_noise_var, "Process noise variance");
  simulate_cmd->add_option("--init-lo", sim.init_lo, "Initial state lower bound");
  simulate_cmd->add_option("--init-hi", sim.init_hi, "Initial state upper bound");

  IdentifyArgs id;
  auto* identify = app.add_subcommand("identify", "Estimate (Q, R, d) from trajectories");
  identify->add_option("--problem", id.problem, "Problem file with A and B")->required();
  identify->add_option("--data", id.data, "Trajectory file")->required();
  identify->add_option("--groups", id.groups, "Number of averaging groups T");
  identify->add_flag("--structured", id.structured, "Laplacian-structured multi-agent estimate");
  identify->add_option("--agents", id.agents, "Agent count N for --structured");
  identify->add_option("--baseline", id.baseline, "Baseline estimator")
      ->check(CLI::IsMember({"pmp"}));
  identify->add_option("--constraint", id.constraint, "Key-value file with C and c");
  identify->add_option("--tol", id.tol, "Constraint consistency tolerance (or 'inf')");

  std::string which, config;
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
  experiment->add_option("name", which, "vehicle | formation")
      ->required()
      ->check(CLI::IsMember({"vehicle", "formation"}));
  experiment->add_option("--config", config, "Experiment key-value file");

  std::string check_problem;
  auto* check = app.add_subcommand("check", "Report the structural assumptions");
  check->add_option("--problem", check_problem, "Problem file (A, B, Q, R, d, K)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCategory::kConfig);
  }

  try {
    if (*forward) return cmd_forward(g, forward_problem);
    if (*simulate_cmd) return cmd_simulate(g, sim);
    if (*identify) return cmd_identify(g, id);
    if (*experiment) return cmd_experiment(g, which, config);
    if (*check) return cmd_check(g, check_problem);
  } catch (const IocError& e) {
    return fail(e.code(), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(ErrorCode::kIo, e.what());
  } catch (const std::exception& e) {
    std::cerr << "lqtioc: error NumericFailure (exit 4): " << e.what() << '\n';
    return static_cast<int>(ErrorCategory::kNumeric);
  }
  return 0;
}
