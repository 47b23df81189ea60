//
// Copyright 2026 The dpms Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpms/error.h"

namespace dpms {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kConfig:
      return "config";
    case ErrorCode::kData:
      return "data";
    case ErrorCode::kRankDeficient:
      return "rank_deficient";
    case ErrorCode::kDomain:
      return "domain";
    case ErrorCode::kNumericFailure:
      return "numeric_failure";
    case ErrorCode::kSplitInfeasible:
      return "split_infeasible";
    case ErrorCode::kInsufficientSimulations:
      return "insufficient_simulations";
    case ErrorCode::kRepairFailure:
      return "repair_failure";
    case ErrorCode::kEmptyRegion:
      return "empty_region";
    case ErrorCode::kInternal:
      return "internal";
  }
  return "unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kConfig:
    case ErrorCode::kSplitInfeasible:
    case ErrorCode::kInsufficientSimulations:
      return 2;
    case ErrorCode::kData:
    case ErrorCode::kRankDeficient:
    case ErrorCode::kDomain:
      return 3;
    case ErrorCode::kNumericFailure:
    case ErrorCode::kRepairFailure:
    case ErrorCode::kEmptyRegion:
    case ErrorCode::kInternal:
      return 4;
  }
  return 4;
}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dpms
