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

#include "lefcert/collective.h"

#include <algorithm>
#include <cstdint>
#include <string>

#include "lefcert/error.h"
#include "lefcert/parallel.h"
#include "lefcert/scoring.h"

namespace lefcert::collective {
namespace {

void fill(int c, int remaining, Allocation& current, std::vector<Allocation>& out) {
  if (c == static_cast<int>(current.size())) {
    out.push_back(current);
    return;
  }
  for (int t = 0; t <= remaining; ++t) {
    current[static_cast<std::size_t>(c)] = t;
    fill(c + 1, remaining - t, current, out);
  }
  current[static_cast<std::size_t>(c)] = 0;
}

int count_broken(std::span<const QueryBounds> queries,
                 const std::vector<bool>& counted, const Allocation& a) {
  int n = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (counted[i] && query_breaks(queries[i], a)) ++n;
  }
  return n;
}

WorstCase finish(std::span<const QueryBounds> queries,
                 const std::vector<bool>& counted, Allocation best, int broken) {
  WorstCase w;
  w.broken = broken;
  w.per_query_broken.resize(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    w.per_query_broken[i] = counted[i] && query_breaks(queries[i], best);
  }
  w.allocation = std::move(best);
  return w;
}

void check_inputs(std::span<const QueryBounds> queries,
                  const std::vector<bool>& counted, int budget) {
  if (counted.size() != queries.size()) {
    throw Error(ErrorCode::kShapeMismatch, "counted mask size differs from queries");
  }
  for (const auto& q : queries) {
    if (q.table.budget() < budget) {
      throw Error(ErrorCode::kTableTooSmall,
                  "bound table covers T<=" + std::to_string(q.table.budget()));
    }
  }
}

}  // namespace

double allocation_count(int num_classes, int budget) {
  return bounds::binomial(budget + num_classes, num_classes);
}

std::vector<Allocation> enumerate_allocations(int num_classes, int budget) {
  if (num_classes < 1 || budget < 0) {
    throw Error(ErrorCode::kInvalidParameter, "need C >= 1 and T >= 0");
  }
  if (allocation_count(num_classes, budget) > kMaxAllocations) {
    throw Error(ErrorCode::kConfigTooLarge,
                "C(T+C,C) allocations exceed " + std::to_string(kMaxAllocations));
  }
  std::vector<Allocation> out;
  out.reserve(static_cast<std::size_t>(allocation_count(num_classes, budget)));
  Allocation current(static_cast<std::size_t>(num_classes), 0);
  fill(0, budget, current, out);
  return out;
}

bool query_breaks(const QueryBounds& query, const Allocation& allocation) {
  const auto y = static_cast<std::size_t>(query.predicted - 1);
  const auto& table = query.table;
  const double up = table.upper[y][static_cast<std::size_t>(allocation[y])];
  for (std::size_t c = 0; c < table.upper.size(); ++c) {
    if (c == y) continue;
    if (up >= table.lower[c][static_cast<std::size_t>(allocation[c])]) return true;
  }
  return false;
}

std::vector<bool> query_breaks_under(std::span<const QueryBounds> queries,
                                     const Allocation& allocation) {
  const int need = allocation.empty()
                       ? 0
                       : *std::max_element(allocation.begin(), allocation.end());
  std::vector<bool> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (queries[i].table.budget() < need) {
      throw Error(ErrorCode::kTableTooSmall,
                  "allocation entry " + std::to_string(need) +
                      " exceeds table budget " +
                      std::to_string(queries[i].table.budget()));
    }
    if (allocation.size() != queries[i].table.upper.size()) {
      throw Error(ErrorCode::kShapeMismatch, "allocation needs one entry per class");
    }
    out[i] = query_breaks(queries[i], allocation);
  }
  return out;
}

WorstCase worst_allocation_serial(std::span<const QueryBounds> queries,
                                  const std::vector<bool>& counted,
                                  int num_classes, int budget) {
  check_inputs(queries, counted, budget);
  const auto allocations = enumerate_allocations(num_classes, budget);
  std::size_t best = 0;
  int best_broken = -1;
  for (std::size_t a = 0; a < allocations.size(); ++a) {
    const int b = count_broken(queries, counted, allocations[a]);
    if (b > best_broken) {
      best_broken = b;
      best = a;
    }
  }
  return finish(queries, counted, allocations[best], best_broken);
}

WorstCase worst_allocation(std::span<const QueryBounds> queries,
                           const std::vector<bool>& counted, int num_classes,
                           int budget) {
  check_inputs(queries, counted, budget);
  const auto allocations = enumerate_allocations(num_classes, budget);
  const auto n = static_cast<std::int64_t>(allocations.size());
  std::int64_t best = 0;
  int best_broken = -1;
#pragma omp parallel
  {
    std::int64_t local = 0;
    int local_broken = -1;
#pragma omp for schedule(static)
    for (std::int64_t a = 0; a < n; ++a) {
      const int b = count_broken(queries, counted,
                                 allocations[static_cast<std::size_t>(a)]);
      if (b > local_broken) {
        local_broken = b;
        local = a;
      }
    }
#pragma omp critical(lefcert_worst_allocation)
    {
      if (local_broken > best_broken ||
          (local_broken == best_broken && local < best)) {
        best_broken = local_broken;
        best = local;
      }
    }
  }
  return finish(queries, counted, allocations[static_cast<std::size_t>(best)],
                best_broken);
}

std::vector<QueryBounds> query_bounds(const Episode& e, const CertConfig& cfg,
                                     bool parallel) {
  validate_episode(e);
  cfg.validate(e.shots);
  const auto metric = scoring::episode_metric(e, cfg.metric);
  std::vector<QueryBounds> out(e.queries.size());
  auto one = [&](std::size_t i) {
    const auto bundle = scoring::build_score_bundle(e, i, metric);
    out[i].predicted = scoring::score_bundle(bundle, cfg).predicted;
    out[i].table = bounds::build_bound_table(bundle, cfg);
  };
  if (parallel) {
    parallel_for(out.size(), one);
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) one(i);
  }
  return out;
}

CollectiveResult collective_from_bounds(std::span<const QueryBounds> queries,
                                        const std::vector<bool>& correct,
                                        int num_classes, int budget,
                                        bool parallel) {
  if (queries.empty()) {
    throw Error(ErrorCode::kInvalidParameter, "collective certification needs queries");
  }
  auto solve = parallel ? worst_allocation : worst_allocation_serial;
  const std::vector<bool> all(queries.size(), true);
  WorstCase any = solve(queries, all, num_classes, budget);
  WorstCase hits = solve(queries, correct, num_classes, budget);

  CollectiveResult r;
  r.num_queries = static_cast<int>(queries.size());
  r.b_max = any.broken;
  r.allocation = std::move(any.allocation);
  r.per_query_broken = std::move(any.per_query_broken);
  r.certified_ratio = static_cast<double>(r.num_queries - r.b_max) / r.num_queries;
  r.correct = static_cast<int>(std::count(correct.begin(), correct.end(), true));
  r.b_max_correct = hits.broken;
  r.allocation_correct = std::move(hits.allocation);
  r.certified_accuracy =
      static_cast<double>(r.correct - r.b_max_correct) / r.num_queries;
  return r;
}

namespace {

CollectiveResult run(const Episode& e, const CertConfig& cfg, bool parallel) {
  const auto queries = query_bounds(e, cfg, parallel);
  std::vector<bool> correct(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    correct[i] = queries[i].predicted == e.queries[i].label;
  }
  return collective_from_bounds(queries, correct, e.num_classes, cfg.budget,
                                parallel);
}

}  // namespace

CollectiveResult collective_certify(const Episode& e, const CertConfig& cfg) {
  return run(e, cfg, true);
}

CollectiveResult collective_certify_serial(const Episode& e,
                                           const CertConfig& cfg) {
  return run(e, cfg, false);
}

}  // namespace lefcert::collective
