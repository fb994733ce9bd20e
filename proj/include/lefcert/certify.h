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

// Sample-wise certification. A prediction y is certified at budget T when
//
//   upper[y][Ty] < min_{c != y} lower[c][T - Ty]   for every 0 <= Ty <= T.
//
// The inequality is strict, so tied scores are never certified.

#ifndef LEFCERT_CERTIFY_H_
#define LEFCERT_CERTIFY_H_

#include <optional>
#include <vector>

#include "lefcert/bounds.h"
#include "lefcert/scoring.h"
#include "lefcert/types.h"

namespace lefcert::certify {

struct FailingSplit {
  // Budget assigned to the predicted class.
  int t_pred = 0;
  // 1-based label of the competing class that closes the gap.
  int label = 0;
};

struct Certificate {
  int predicted = 0;
  bool certified = false;
  std::optional<FailingSplit> failing_split;
  bounds::BoundTable bound_table;
};

// Throws TABLE_TOO_SMALL when the table covers fewer than `budget` columns.
Certificate certify_sample(const scoring::ClassScores& scores,
                           const bounds::BoundTable& table, int budget);

struct QueryResult {
  scoring::ClassScores scores;
  Certificate certificate;
  bool correct = false;
};

// One result per query, computed in parallel across queries.
std::vector<QueryResult> certify_episode(const Episode& e, const CertConfig& cfg);

// Single-threaded reference with identical output.
std::vector<QueryResult> certify_episode_serial(const Episode& e,
                                                const CertConfig& cfg);

QueryResult certify_query(const Episode& e, std::size_t query_index,
                          const CertConfig& cfg,
                          const distance::MetricInfo& metric);

}  // namespace lefcert::certify

#endif  // LEFCERT_CERTIFY_H_
