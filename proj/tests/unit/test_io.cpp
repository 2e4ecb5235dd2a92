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

#include <cmath>
#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "lqtioc/error.hpp"
#include "lqtioc/io.hpp"

namespace lqtioc {
namespace {

ErrorCode parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    (void)read_trajectories(in);
  } catch (const IocError& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed: " << text;
  return ErrorCode::kConfig;
}

TEST(TrajectoryFile, RoundTripIsExact) {
  Rng rng(1);
  const auto inst = testing::random_instance(rng, 3, 2, 5);
  const TrajectoryBatch b = testing::closed_loop_batch(inst, 4, 99);
  std::stringstream ss;
  write_trajectories(ss, b);
  const TrajectoryBatch r = read_trajectories(ss);
  ASSERT_EQ(r.M(), 4);
  EXPECT_EQ(r.n, 3);
  EXPECT_EQ(r.p, 2);
  EXPECT_EQ(r.K, 5);
  ASSERT_TRUE(r.seed.has_value());
  EXPECT_EQ(*r.seed, 99u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_TRUE(r.trajectories[i].states == b.trajectories[i].states);
    EXPECT_TRUE(r.trajectories[i].inputs == b.trajectories[i].inputs);
  }
}

TEST(TrajectoryFile, HeaderLayout) {
  TrajectoryBatch b;
  b.n = 1;
  b.p = 1;
  b.K = 0;
  b.trajectories.push_back({MatrixXd::Ones(1, 2), MatrixXd::Zero(1, 1)});
  std::ostringstream os;
  write_trajectories(os, b);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("# lqtioc trajectories v1\nn 1\np 1\nK 0\nM 1\nseed none\n", 0), 0u);
  EXPECT_NE(s.find("nan"), std::string::npos);
}

TEST(TrajectoryFile, MalformedInputRejected) {
  EXPECT_EQ(parse_error(""), ErrorCode::kIo);
  EXPECT_EQ(parse_error("# not ours\n"), ErrorCode::kIo);
  EXPECT_EQ(parse_error("# lqtioc trajectories v1\nn 1\np 1\nK 0\nM 1\nseed none\n0 0 1 0\n"),
            ErrorCode::kIo);
  EXPECT_EQ(parse_error("# lqtioc trajectories v1\nn 1\np 1\nK 0\nM 1\nseed none\n"
                        "0 0 1 x\n0 1 1 nan\n"),
            ErrorCode::kIo);
}

TEST(TrajectoryFile, SaveLoad) {
  Rng rng(2);
  const auto inst = testing::random_instance(rng, 2, 1, 4);
  const TrajectoryBatch b = testing::closed_loop_batch(inst, 2, 3);
  const auto path = std::filesystem::temp_directory_path() / "lqtioc_io_test.txt";
  save_trajectories(path.string(), b);
  const TrajectoryBatch r = load_trajectories(path.string());
  EXPECT_TRUE(r.trajectories[1].states == b.trajectories[1].states);
  std::filesystem::remove(path);
  EXPECT_THROW((void)load_trajectories("/nonexistent/dir/file.txt"), IocError);
}

TEST(KeyValueConfig, ParseAndTypedGetters) {
  std::istringstream in(
      "# comment\n"
      "name = formation   \n"
      "M = 1300\n"
      "dt=0.01\n"
      "flag = true\n"
      "v = 1 2 3\n"
      "A = 1 0.5; 0 1\n"
      "Ts = 5 25 125\n");
  const KeyValueConfig c = KeyValueConfig::parse(in);
  EXPECT_EQ(c.get_string("name"), "formation");
  EXPECT_EQ(c.get_int("M"), 1300);
  EXPECT_DOUBLE_EQ(c.get_double("dt"), 0.01);
  EXPECT_TRUE(c.get_bool("flag"));
  EXPECT_TRUE(c.get_vector("v").isApprox(Eigen::Vector3d(1, 2, 3)));
  MatrixXd a(2, 2);
  a << 1, 0.5, 0, 1;
  EXPECT_TRUE(c.get_matrix("A") == a);
  EXPECT_EQ(c.get_int_list("Ts"), (std::vector<int>{5, 25, 125}));
  EXPECT_EQ(c.get_int("missing", 7), 7);
  EXPECT_THROW((void)c.get_int("missing"), IocError);
  EXPECT_THROW((void)c.get_int("dt"), IocError);
  EXPECT_THROW((void)c.get_bool("name"), IocError);
}

TEST(KeyValueConfig, WriteParseRoundTrip) {
  Rng rng(3);
  KeyValueConfig c;
  c.set("x", 0.1 + 0.2);
  c.set("m", rng.normal_matrix(3, 2));
  c.set("v", rng.normal_vector(4));
  c.set("n", 42);
  c.set("seed", std::uint64_t{18446744073709551615ULL});
  c.set("b", false);
  c.set("l", std::vector<int>{1, 2});
  std::stringstream ss;
  c.write(ss);
  const KeyValueConfig r = KeyValueConfig::parse(ss);
  EXPECT_TRUE(r == c);
  EXPECT_EQ(r.get_double("x"), 0.1 + 0.2);
  EXPECT_EQ(r.get_uint64("seed"), 18446744073709551615ULL);
  EXPECT_TRUE(r.get_matrix("m") == c.get_matrix("m"));
}

TEST(KeyValueConfig, RaggedMatrixRejected) {
  std::istringstream in("A = 1 2; 3\n");
  const KeyValueConfig c = KeyValueConfig::parse(in);
  EXPECT_THROW((void)c.get_matrix("A"), IocError);
}

TEST(ProblemFile, RoundTrip) {
  Rng rng(4);
  const auto inst = testing::random_instance(rng, 3, 2, 6);
  const KeyValueConfig cfg = problem_to_config(inst.model, inst.cost);
  const ProblemFile pf = problem_from_config(cfg);
  EXPECT_TRUE(pf.A == inst.model.A());
  ASSERT_TRUE(pf.cost.has_value());
  EXPECT_TRUE(pf.cost->theta() == inst.cost.theta());
  EXPECT_EQ(pf.cost->K(), 6);
  const ProblemFile bare = problem_from_config(problem_to_config(inst.model, std::nullopt));
  EXPECT_FALSE(bare.cost.has_value());
}

TEST(Reports, TextAndJson) {
  Rng rng(5);
  const auto inst = testing::random_instance(rng, 2, 1, 4);
  const ThetaEstimate est = make_estimate(inst.cost.theta(), 2, 1, 1e-12);
  std::ostringstream os;
  write_estimate_text(os, est);
  EXPECT_NE(os.str().find("Q_hat 2 2\n"), std::string::npos);
  EXPECT_NE(os.str().find("sign_flipped false"), std::string::npos);
  const std::string j = estimate_json(est);
  EXPECT_NE(j.find("\"d_hat\""), std::string::npos);
  EXPECT_NE(policy_json(solve_riccati(inst.model, inst.cost)).find("\"steps\""), std::string::npos);
  std::ostringstream ps;
  write_policy_text(ps, solve_riccati(inst.model, inst.cost));
  EXPECT_NE(ps.str().find("K 4"), std::string::npos);
  const std::string a = assumptions_json(check_assumptions(inst.model, inst.cost));
  EXPECT_NE(a.find("controllable"), std::string::npos);
}

TEST(FormatDouble, ExactRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

}  // namespace
}  // namespace lqtioc
