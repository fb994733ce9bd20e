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

#include "lefcert/error.h"

namespace lefcert {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::kLabelOutOfRange: return "LABEL_OUT_OF_RANGE";
    case ErrorCode::kDimMismatch: return "DIM_MISMATCH";
    case ErrorCode::kZeroVector: return "ZERO_VECTOR";
    case ErrorCode::kNormViolation: return "NORM_VIOLATION";
    case ErrorCode::kEmptySet: return "EMPTY_SET";
    case ErrorCode::kMTooLarge: return "M_TOO_LARGE";
    case ErrorCode::kInvalidParameter: return "INVALID_PARAMETER";
    case ErrorCode::kNonpositiveSigma: return "NONPOSITIVE_SIGMA";
    case ErrorCode::kWrongThreatKind: return "WRONG_THREAT_KIND";
    case ErrorCode::kMetricThreatMismatch: return "METRIC_THREAT_MISMATCH";
    case ErrorCode::kBudgetExceedsK: return "BUDGET_EXCEEDS_K";
    case ErrorCode::kTableTooSmall: return "TABLE_TOO_SMALL";
    case ErrorCode::kConfigTooLarge: return "CONFIG_TOO_LARGE";
    case ErrorCode::kPoolTooSmall: return "POOL_TOO_SMALL";
    case ErrorCode::kAnchorSamplingFailed: return "ANCHOR_SAMPLING_FAILED";
    case ErrorCode::kBadMagic: return "BAD_MAGIC";
    case ErrorCode::kVersionUnsupported: return "VERSION_UNSUPPORTED";
    case ErrorCode::kTruncated: return "TRUNCATED";
    case ErrorCode::kTrailingBytes: return "TRAILING_BYTES";
    case ErrorCode::kIoFailure: return "IO_FAILURE";
  }
  return "UNKNOWN";
}

bool is_io_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic:
    case ErrorCode::kVersionUnsupported:
    case ErrorCode::kTruncated:
    case ErrorCode::kTrailingBytes:
    case ErrorCode::kIoFailure:
    case ErrorCode::kNormViolation:
      return true;
    default:
      return false;
  }
}

}  // namespace lefcert
