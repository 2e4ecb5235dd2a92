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
#ifndef LQTIOC_ERROR_HPP
#define LQTIOC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace lqtioc {

enum class ErrorCode {
  kConfig,
  kIo,
  kDimensionMismatch,
  kIndexOutOfHorizon,
  kNonInvertibleInnerMatrix,
  kGroupTooSmall,
  kRankDeficientData,
  kY2RankDeficient,
  kHRankDeficient,
  kInconsistentConstraint,
  kDegenerateEstimate,
  kNonPositiveAlpha,
  kOmegaRankDeficient,
  kRankDeficientPmp,
};

/// Coarse grouping used for process exit codes.
enum class ErrorCategory { kConfig = 2, kIdentifiability = 3, kNumeric = 4 };

std::string_view error_name(ErrorCode code);
ErrorCategory error_category(ErrorCode code);

class IocError : public std::runtime_error {
 public:
  IocError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lqtioc

#endif  // LQTIOC_ERROR_HPP
