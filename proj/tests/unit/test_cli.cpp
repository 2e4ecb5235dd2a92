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
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "lqtioc/experiments.hpp"
#include "lqtioc/io.hpp"

namespace lqtioc {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lqtioc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the tool with stdout/stderr captured in files; returns the exit code.
  int run(const std::string& args) {
    const std::string cmd = std::string(LQTIOC_CLI_PATH) + " " + args + " > " +
                            (dir_ / "stdout").string() + " 2> " + (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string slurp(const fs::path& p) const {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::string out() const { return slurp(dir_ / "stdout"); }
  std::string err() const { return slurp(dir_ / "stderr"); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

VectorXd read_theta(const std::string& report) {
  std::istringstream in(report);
  std::string key;
  while (in >> key) {
    if (key == "theta") {
      int size = 0;
      in >> size;
      VectorXd v(size);
      for (int i = 0; i < size; ++i) in >> v(i);
      return v;
    }
  }
  return {};
}

TEST_F(CliTest, SimulateIdentifyRoundTrip) {
  Rng rng(11);
  const auto inst = testing::random_instance(rng, 3, 2, 8);
  problem_to_config(inst.model, inst.cost).save(path("p.cfg"));
  ASSERT_EQ(run("--seed 7 simulate --problem " + path("p.cfg") + " -M 6 -o " + path("traj.txt")), 0)
      << err();
  ASSERT_EQ(run("--out-dir " + path("out") + " identify --problem " + path("p.cfg") + " --data " +
                path("traj.txt")),
            0)
      << err();
  const VectorXd theta = read_theta(slurp(dir_ / "out" / "estimate.txt"));
  const VectorXd truth =
      normalize_theta(inst.cost.theta(), testing::e1_row(theta.size()), VectorXd::Ones(1));
  ASSERT_EQ(theta.size(), truth.size());
  EXPECT_LT(relative_error(theta, truth), 1e-6);

  // Simulation is seed-deterministic.
  ASSERT_EQ(run("--seed 7 simulate --problem " + path("p.cfg") + " -M 6 -o " + path("again.txt")), 0);
  EXPECT_EQ(slurp(path("traj.txt")), slurp(path("again.txt")));
}

TEST_F(CliTest, IdentifyJsonPmpAndConstraintFile) {
  Rng rng(12);
  const auto inst = testing::random_instance(rng, 2, 1, 6);
  problem_to_config(inst.model, inst.cost).save(path("p.cfg"));
  ASSERT_EQ(run("simulate --problem " + path("p.cfg") + " -M 5 -o " + path("t.txt")), 0) << err();
  ASSERT_EQ(run("--format json identify --problem " + path("p.cfg") + " --data " + path("t.txt")), 0);
  EXPECT_NE(out().find("\"theta\""), std::string::npos);
  ASSERT_EQ(run("identify --baseline pmp --problem " + path("p.cfg") + " --data " + path("t.txt")), 0)
      << err();
  EXPECT_EQ(read_theta(out()).size(), 6);

  // Normalize on the second entry of vech(Q) instead of R₁₁.
  const VectorXd th = inst.cost.theta();
  KeyValueConfig c;
  MatrixXd C = MatrixXd::Zero(1, th.size());
  C(0, 2) = 1.0;
  c.set("C", C);
  c.set("c", VectorXd(VectorXd::Constant(1, th(2))));
  c.save(path("c.cfg"));
  ASSERT_EQ(run("identify --problem " + path("p.cfg") + " --data " + path("t.txt") +
                " --constraint " + path("c.cfg")),
            0)
      << err();
  EXPECT_LT(relative_error(read_theta(out()), th), 1e-6);
}

TEST_F(CliTest, ForwardPrintsPolicy) {
  Rng rng(13);
  const auto inst = testing::random_instance(rng, 2, 1, 4);
  problem_to_config(inst.model, inst.cost).save(path("p.cfg"));
  ASSERT_EQ(run("forward --problem " + path("p.cfg")), 0) << err();
  EXPECT_EQ(out().rfind("K 4\n", 0), 0u);
  EXPECT_NE(out().find("gain_0 1 2"), std::string::npos);
  ASSERT_EQ(run("forward --problem " + path("p.cfg") + " --format json"), 0) << err();
  EXPECT_NE(out().find("\"steps\""), std::string::npos);
}

TEST_F(CliTest, CheckFlagsCommutingModel) {
  const MatrixXd I = MatrixXd::Identity(2, 2);
  problem_to_config(SystemModel(I, I), CostSpec(I, I, VectorXd::Zero(2), 4)).save(path("p.cfg"));
  ASSERT_EQ(run("check --problem " + path("p.cfg")), 0) << err();
  EXPECT_NE(out().find("FAIL cond_ii_noncommuting"), std::string::npos);
  EXPECT_NE(out().find("PASS controllable"), std::string::npos);
}

TEST_F(CliTest, ExitCodesByCategory) {
  EXPECT_EQ(run("identify --problem " + path("missing.cfg") + " --data " + path("x.txt")), 2);
  EXPECT_NE(err().find("IoError"), std::string::npos);
  EXPECT_EQ(run("frobnicate"), 2);

  // Commuting (A, B, Q, R) leaves a multi-dimensional solution set.
  const MatrixXd I = MatrixXd::Identity(2, 2);
  problem_to_config(SystemModel(I, I), CostSpec(2.0 * I, I, Eigen::Vector2d(1, -1), 4))
      .save(path("p.cfg"));
  ASSERT_EQ(run("simulate --problem " + path("p.cfg") + " -M 4 -o " + path("t.txt")), 0);
  EXPECT_EQ(run("identify --problem " + path("p.cfg") + " --data " + path("t.txt")), 3);
  EXPECT_NE(err().find("HRankDeficient"), std::string::npos);
  EXPECT_EQ(run("identify --groups 3 --problem " + path("p.cfg") + " --data " + path("t.txt")), 2);
  EXPECT_NE(err().find("GroupTooSmall"), std::string::npos);
}

TEST_F(CliTest, StructuredIdentifyOnFormation) {
  const ExperimentConfig cfg = ExperimentConfig::formation_defaults();
  const LaplacianSpec spec = formation_laplacian();
  problem_to_config(formation_model(cfg), spec.cost(cfg.K)).save(path("f.cfg"));
  ASSERT_EQ(run("--seed 3 simulate --problem " + path("f.cfg") +
                " -M 13 --init-lo -2 --init-hi 2 -o " + path("t.txt")),
            0)
      << err();
  ASSERT_EQ(run("identify --structured --agents 6 --problem " + path("f.cfg") + " --data " +
                path("t.txt")),
            0)
      << err();
  const std::string rep = out();
  EXPECT_NE(rep.find("L_hat 6 6"), std::string::npos);
  EXPECT_NE(rep.find("edges 15"), std::string::npos);
  EXPECT_EQ(run("identify --problem " + path("f.cfg") + " --data " + path("t.txt")), 3);
}

TEST_F(CliTest, ExperimentsWriteCsvs) {
  KeyValueConfig f;
  f.set("experiment", std::string("formation"));
  f.set("M", 65);
  f.set("T", 5);
  f.set("trials", 1);
  f.set("snr_db", VectorXd(Eigen::Vector2d(30, 50)));
  f.set("T_sweep", std::vector<int>{5});
  f.set("sweep_trials", 1);
  f.save(path("f.cfg"));
  ASSERT_EQ(run("--out-dir " + path("fo") + " experiment formation --config " + path("f.cfg")), 0)
      << err();
  const std::string snr = slurp(dir_ / "fo" / "formation_snr_sweep.csv");
  EXPECT_EQ(snr.substr(0, snr.find('\n')), "T,snr_db,trial,rel_error,bound,cond_omega");
  EXPECT_EQ(std::count(snr.begin(), snr.end(), '\n'), 3);
  EXPECT_TRUE(fs::exists(dir_ / "fo" / "formation_T_sweep.csv"));

  KeyValueConfig v;
  v.set("experiment", std::string("vehicle"));
  v.set("trials", 4);
  v.set("obs_noise_var", 1e-4);
  v.save(path("v.cfg"));
  auto stable = [&](const std::string& csv) {
    // Drop the two timing columns.
    std::istringstream in(csv);
    std::string line, outp;
    while (std::getline(in, line)) {
      std::vector<std::string> cols;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cols.push_back(cell);
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i != 5 && i != 6) outp += cols[i] + ",";
      }
      outp += "\n";
    }
    return outp;
  };
  ASSERT_EQ(run("--seed 9 --out-dir " + path("v1") + " experiment vehicle --config " + path("v.cfg")), 0)
      << err();
  ASSERT_EQ(run("--seed 9 --out-dir " + path("v2") + " experiment vehicle --config " + path("v.cfg")), 0);
  const std::string a = slurp(dir_ / "v1" / "vehicle.csv");
  EXPECT_EQ(stable(a), stable(slurp(dir_ / "v2" / "vehicle.csv")));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 5);
  EXPECT_NE(out().find("main_mean"), std::string::npos);

  EXPECT_EQ(run("experiment formation --config " + path("v.cfg") + " --out-dir " + path("x")), 2);
}

}  // namespace
}  // namespace lqtioc
