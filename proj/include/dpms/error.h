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

#ifndef DPMS_ERROR_H_
#define DPMS_ERROR_H_

#include <stdexcept>
#include <string>

namespace dpms {

// Broad failure classes. Each one maps onto a CLI exit code.
enum class ErrorCode {
  kInvalidArgument,
  kConfig,
  kData,
  kRankDeficient,
  kDomain,
  kNumericFailure,
  kSplitInfeasible,
  kInsufficientSimulations,
  kRepairFailure,
  kEmptyRegion,
  kInternal,
};

const char* ErrorCodeName(ErrorCode code);

// Exit codes: 2 config error, 3 data error, 4 numeric failure.
int ExitCodeFor(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Thrown by the rank checks; `index` names the offending column or subset.
class RankError : public Error {
 public:
  RankError(const std::string& message, int index)
      : Error(ErrorCode::kRankDeficient, message), index_(index) {}

  int index() const { return index_; }

 private:
  int index_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace dpms

#endif  // DPMS_ERROR_H_
