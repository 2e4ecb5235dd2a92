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
#ifndef LQTIOC_IO_HPP
#define LQTIOC_IO_HPP

// Plain-text formats.
//
// Trajectory file:
//   # lqtioc trajectories v1
//   n <n>
//   p <p>
//   K <K>
//   M <M>
//   seed <uint64 | none>
//   <i> <k> <x_1..x_n> <u_1..u_p>      one row per (i, k), k = 0..K+1
// The k = K+1 rows carry "nan" for the (nonexistent) input.
//
// Key-value file: "key = value" lines, '#' comments. Matrices are written row
// by row with ';' between rows ("A = 1 0.2; 0 1"), vectors as space-separated
// numbers. Values are printed with 17 significant digits so a write/parse
// cycle is exact.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lqtioc/lqt.hpp"
#include "lqtioc/solver.hpp"
#include "lqtioc/structured.hpp"

namespace lqtioc {

void write_trajectories(std::ostream& out, const TrajectoryBatch& batch);
TrajectoryBatch read_trajectories(std::istream& in);

void save_trajectories(const std::string& path, const TrajectoryBatch& batch);
TrajectoryBatch load_trajectories(const std::string& path);

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::string& path);

  void write(std::ostream& out) const;
  void save(const std::string& path) const;

  [[nodiscard]] bool has(const std::string& key) const;
  [[nodiscard]] std::vector<std::string> keys() const;

  // Getters throw ConfigError on missing keys or malformed values.
  [[nodiscard]] std::string get_string(const std::string& key) const;
  [[nodiscard]] int get_int(const std::string& key) const;
  [[nodiscard]] std::uint64_t get_uint64(const std::string& key) const;
  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] bool get_bool(const std::string& key) const;
  [[nodiscard]] VectorXd get_vector(const std::string& key) const;
  [[nodiscard]] MatrixXd get_matrix(const std::string& key) const;
  [[nodiscard]] std::vector<int> get_int_list(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, int value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, double value);
  void set(const std::string& key, bool value);
  void set(const std::string& key, const VectorXd& value);
  void set(const std::string& key, const MatrixXd& value);
  void set(const std::string& key, const std::vector<int>& value);

  bool operator==(const KeyValueConfig& other) const { return values_ == other.values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::string format_double(double v);

/// Known (A, B), and optionally a cost (Q, R, d, K), stored in a key-value file.
struct ProblemFile {
  MatrixXd A;
  MatrixXd B;
  std::optional<CostSpec> cost;
};
ProblemFile problem_from_config(const KeyValueConfig& cfg);
KeyValueConfig problem_to_config(const SystemModel& model, const std::optional<CostSpec>& cost);

/// Text report: each matrix as "name rows cols" followed by row-major rows.
void write_estimate_text(std::ostream& out, const ThetaEstimate& estimate);
std::string estimate_json(const ThetaEstimate& estimate);

void write_laplacian_text(std::ostream& out, const LaplacianSpec& laplacian);
std::string laplacian_json(const LaplacianSpec& laplacian);

void write_policy_text(std::ostream& out, const PolicySequence& policy);
std::string policy_json(const PolicySequence& policy);

void write_assumptions_text(std::ostream& out, const AssumptionReport& report);
std::string assumptions_json(const AssumptionReport& report);

}  // namespace lqtioc

#endif  // LQTIOC_IO_HPP
