// Copyright 2026 The lefcert Authors
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

#ifndef LEFCERT_ERROR_H_
#define LEFCERT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace lefcert {

enum class ErrorCode {
  // Shape and value checks on in-memory data.
  kShapeMismatch,
  kLabelOutOfRange,
  kDimMismatch,
  kZeroVector,
  kNormViolation,
  kEmptySet,
  // Configuration.
  kMTooLarge,
  kInvalidParameter,
  kNonpositiveSigma,
  kWrongThreatKind,
  kMetricThreatMismatch,
  kBudgetExceedsK,
  kTableTooSmall,
  kConfigTooLarge,
  kPoolTooSmall,
  kAnchorSamplingFailed,
  // File formats.
  kBadMagic,
  kVersionUnsupported,
  kTruncated,
  kTrailingBytes,
  kIoFailure,
};

std::string_view error_code_name(ErrorCode code);

// True for codes that originate from reading or writing files; the CLI maps
// these to exit status 2.
bool is_io_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lefcert

#endif  // LEFCERT_ERROR_H_
