// Copyright 2026 The lsmrec Authors
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


#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lsmrec {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kDataFormat,
  kIo,
  kVersionMismatch,
  kCorrupt,
  kNumerical,
  kPoolExhausted,
  kPrecondition,
};

// Stable machine label, used verbatim in API error bodies.
constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kDataFormat: return "data_format";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kCorrupt: return "corrupt_snapshot";
    case ErrorCode::kNumerical: return "numerical_failure";
    case ErrorCode::kPoolExhausted: return "pool_exhausted";
    case ErrorCode::kPrecondition: return "precondition_failed";
  }
  return "internal";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lsmrec
