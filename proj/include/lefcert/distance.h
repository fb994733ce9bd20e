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

#ifndef LEFCERT_DISTANCE_H_
#define LEFCERT_DISTANCE_H_

#include <limits>
#include <span>
#include <vector>

#include "lefcert/types.h"

namespace lefcert::distance {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct MetricInfo {
  Metric kind = Metric::kCosine;
  // Largest value any distance can take; bound arithmetic relies on it.
  double range_max = 2.0;
};

// Cosine distances live in [0, 2]. l2 distances are bounded by 2 only when
// every operand lies in the closed unit ball (unit embeddings, or smoothed
// means of unit embeddings).
MetricInfo metric_info(Metric kind, bool operands_in_unit_ball);

// 1 - a.b / (|a||b|), clamped into [0, 2].
double cosine_distance(const Embedding& a, const Embedding& b);
double l2_distance(const Embedding& a, const Embedding& b);
double distance(Metric kind, const Embedding& a, const Embedding& b);

Embedding normalize(std::span<const double> v);

}  // namespace lefcert::distance

#endif  // LEFCERT_DISTANCE_H_
