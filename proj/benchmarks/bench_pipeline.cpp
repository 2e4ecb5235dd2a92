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
#include <benchmark/benchmark.h>

#include "lqtioc/assembler.hpp"
#include "lqtioc/experiments.hpp"
#include "lqtioc/lqt.hpp"
#include "lqtioc/pmp.hpp"
#include "lqtioc/solver.hpp"
#include "lqtioc/structured.hpp"

namespace {

using namespace lqtioc;

struct Problem {
  SystemModel model;
  CostSpec cost;
  TrajectoryBatch batch;
};

Problem make_problem(int n, int p, int K, int M) {
  Rng rng(static_cast<std::uint64_t>(n * 1000 + p * 100 + K));
  SystemModel model(MatrixXd::Identity(n, n) + 0.3 * rng.normal_matrix(n, n), rng.normal_matrix(n, p));
  const MatrixXd q0 = rng.normal_matrix(n, n);
  const MatrixXd r0 = rng.normal_matrix(p, p);
  CostSpec cost(q0 * q0.transpose(), r0 * r0.transpose() + MatrixXd::Identity(p, p),
                rng.normal_vector(n), K);
  TrajectoryBatch batch = simulate(model, solve_riccati(model, cost), uniform_sampler(n, -1, 1),
                                   gaussian_sampler(n, 0.1), M, 1);
  return {std::move(model), std::move(cost), std::move(batch)};
}

void BM_Riccati(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Problem pr = make_problem(n, n / 2 + 1, 4 * n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_riccati(pr.model, pr.cost));
}
BENCHMARK(BM_Riccati)->Arg(2)->Arg(4)->Arg(8)->Arg(12);

void BM_AssembleZ(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Problem pr = make_problem(n, 2, 2 * n + 2, n + 2);
  const GroupedData grouped = group_trajectories(pr.batch, 1, pr.model);
  const PhiBlocks blocks = build_phi_blocks(grouped, pr.model);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_Z(blocks));
}
BENCHMARK(BM_AssembleZ)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_AssembleZDense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Problem pr = make_problem(n, 2, 2 * n + 2, n + 2);
  const PhiBlocks blocks = build_phi_blocks(group_trajectories(pr.batch, 1, pr.model), pr.model);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_Z_dense(blocks));
}
BENCHMARK(BM_AssembleZDense)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_IdentifyVehicle(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.run_baseline = false;
  int trial = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_vehicle_trial(cfg, trial++));
}
BENCHMARK(BM_IdentifyVehicle)->Unit(benchmark::kMillisecond);

void BM_PmpVehicle(benchmark::State& state) {
  Rng rng(5);
  const ExperimentConfig cfg;
  const VehicleInstance inst = sample_vehicle(cfg, rng);
  const TrajectoryBatch batch =
      simulate(inst.model, solve_riccati(inst.model, inst.cost), vehicle_initial_sampler(cfg),
               gaussian_sampler(4, 0.1), 5, 3);
  for (auto _ : state) benchmark::DoNotOptimize(solve_pmp(batch, inst.model));
}
BENCHMARK(BM_PmpVehicle)->Unit(benchmark::kMicrosecond);

void BM_StructuredFormation(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  const ExperimentConfig cfg = ExperimentConfig::formation_defaults();
  const TrajectoryBatch data = formation_data(cfg, 13 * T, 7);
  const SystemModel model = formation_model(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(solve_structured(data, model, T, 6, 2));
}
BENCHMARK(BM_StructuredFormation)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
