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
#ifndef LQTIOC_RANDOM_HPP
#define LQTIOC_RANDOM_HPP

#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace lqtioc {

/// Seedable generator that can be split into independent, reproducible
/// substreams. Substream `i` of seed `s` is the same no matter how many other
/// substreams were drawn before it, so parallel loops stay deterministic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  [[nodiscard]] Rng split(std::uint64_t stream) const {
    return Rng(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL)));
  }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }

  Eigen::MatrixXd uniform_matrix(Eigen::Index r, Eigen::Index c, double lo,
                                 double hi) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = uniform(lo, hi);
    return m;
  }

  Eigen::VectorXd normal_vector(Eigen::Index n, double stddev = 1.0) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(0.0, stddev);
    return v;
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index r, Eigen::Index c,
                                double stddev = 1.0) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(0.0, stddev);
    return m;
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Draws one vector from a distribution using the supplied stream.
using VectorSampler = std::function<Eigen::VectorXd(Rng&)>;

inline VectorSampler zero_sampler(Eigen::Index n) {
  return [n](Rng&) { return Eigen::VectorXd::Zero(n).eval(); };
}

inline VectorSampler gaussian_sampler(Eigen::Index n, double variance) {
  const double sd = std::sqrt(variance);
  return [n, sd](Rng& rng) { return rng.normal_vector(n, sd); };
}

inline VectorSampler uniform_sampler(Eigen::Index n, double lo, double hi) {
  return [n, lo, hi](Rng& rng) { return rng.uniform_vector(n, lo, hi); };
}

}  // namespace lqtioc

#endif  // LQTIOC_RANDOM_HPP
