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

// Collective certification: one budget T is shared across classes. For a
// fixed allocation (T^1..T^C), query i with prediction y breaks iff
//
//   upper[y][T^y] >= min_{c != y} lower[c][T^c].
//
// The attacker picks the allocation with sum <= T that breaks the most
// queries; every other query is certified collectively.

#ifndef LEFCERT_COLLECTIVE_H_
#define LEFCERT_COLLECTIVE_H_

#include <span>
#include <vector>

#include "lefcert/bounds.h"
#include "lefcert/types.h"

namespace lefcert::collective {

inline constexpr double kMaxAllocations = 1e7;

using Allocation = std::vector<int>;

// Number of C-tuples of nonnegative integers with sum <= T: C(T+C, C).
double allocation_count(int num_classes, int budget);

// Every allocation exactly once, lexicographic order. Throws CONFIG_TOO_LARGE
// above kMaxAllocations.
std::vector<Allocation> enumerate_allocations(int num_classes, int budget);

struct QueryBounds {
  int predicted = 0;  // 1-based
  bounds::BoundTable table;
};

bool query_breaks(const QueryBounds& query, const Allocation& allocation);

// Throws TABLE_TOO_SMALL when an allocation entry exceeds a table's budget.
std::vector<bool> query_breaks_under(std::span<const QueryBounds> queries,
                                     const Allocation& allocation);

struct WorstCase {
  int broken = 0;
  Allocation allocation;
  std::vector<bool> per_query_broken;
};

// Maximizes the number of broken queries among those with counted[i] set,
// over all allocations of `budget`. Ties keep the earliest allocation in
// enumeration order. Parallel over allocations.
WorstCase worst_allocation(std::span<const QueryBounds> queries,
                           const std::vector<bool>& counted, int num_classes,
                           int budget);
WorstCase worst_allocation_serial(std::span<const QueryBounds> queries,
                                  const std::vector<bool>& counted,
                                  int num_classes, int budget);

struct CollectiveResult {
  int num_queries = 0;
  // Worst case over all queries.
  int b_max = 0;
  Allocation allocation;
  std::vector<bool> per_query_broken;
  double certified_ratio = 1.0;
  // Worst case restricted to correctly classified queries; the attacker's
  // best effort against certified accuracy.
  int correct = 0;
  int b_max_correct = 0;
  Allocation allocation_correct;
  double certified_accuracy = 0.0;
};

std::vector<QueryBounds> query_bounds(const Episode& e, const CertConfig& cfg,
                                     bool parallel = true);

CollectiveResult collective_certify(const Episode& e, const CertConfig& cfg);
CollectiveResult collective_certify_serial(const Episode& e,
                                           const CertConfig& cfg);

// Same, on precomputed tables (built with budget >= cfg.budget).
CollectiveResult collective_from_bounds(std::span<const QueryBounds> queries,
                                        const std::vector<bool>& correct,
                                        int num_classes, int budget,
                                        bool parallel = true);

}  // namespace lefcert::collective

#endif  // LEFCERT_COLLECTIVE_H_
