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
#include "lqtioc/error.hpp"

namespace lqtioc {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIndexOutOfHorizon: return "IndexOutOfHorizon";
    case ErrorCode::kNonInvertibleInnerMatrix: return "NonInvertibleInnerMatrix";
    case ErrorCode::kGroupTooSmall: return "GroupTooSmall";
    case ErrorCode::kRankDeficientData: return "RankDeficientData";
    case ErrorCode::kY2RankDeficient: return "Y2RankDeficient";
    case ErrorCode::kHRankDeficient: return "HRankDeficient";
    case ErrorCode::kInconsistentConstraint: return "InconsistentConstraint";
    case ErrorCode::kDegenerateEstimate: return "DegenerateEstimate";
    case ErrorCode::kNonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::kOmegaRankDeficient: return "OmegaRankDeficient";
    case ErrorCode::kRankDeficientPmp: return "RankDeficientPmp";
  }
  return "UnknownError";
}

ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kIo:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kIndexOutOfHorizon:
    case ErrorCode::kGroupTooSmall:
    case ErrorCode::kNonPositiveAlpha:
      return ErrorCategory::kConfig;
    case ErrorCode::kRankDeficientData:
    case ErrorCode::kY2RankDeficient:
    case ErrorCode::kHRankDeficient:
    case ErrorCode::kInconsistentConstraint:
    case ErrorCode::kDegenerateEstimate:
    case ErrorCode::kOmegaRankDeficient:
    case ErrorCode::kRankDeficientPmp:
      return ErrorCategory::kIdentifiability;
    case ErrorCode::kNonInvertibleInnerMatrix:
      return ErrorCategory::kNumeric;
  }
  return ErrorCategory::kNumeric;
}

}  // namespace lqtioc
