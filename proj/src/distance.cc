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

#include "lefcert/distance.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lefcert/error.h"

namespace lefcert::distance {
namespace {

void require_same_dim(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimMismatch,
                "operands have dims " + std::to_string(a.dim()) + " and " +
                    std::to_string(b.dim()));
  }
}

}  // namespace

MetricInfo metric_info(Metric kind, bool operands_in_unit_ball) {
  if (kind == Metric::kCosine) return {kind, 2.0};
  return {kind, operands_in_unit_ball ? 2.0 : kInfinity};
}

double cosine_distance(const Embedding& a, const Embedding& b) {
  require_same_dim(a, b);
  const auto x = a.values();
  const auto y = b.values();
  double dot = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (xx == 0.0 || yy == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cosine distance of a zero vector");
  }
  const double d = 1.0 - dot / (std::sqrt(xx) * std::sqrt(yy));
  return std::clamp(d, 0.0, 2.0);
}

double l2_distance(const Embedding& a, const Embedding& b) {
  require_same_dim(a, b);
  const auto x = a.values();
  const auto y = b.values();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double distance(Metric kind, const Embedding& a, const Embedding& b) {
  return kind == Metric::kCosine ? cosine_distance(a, b) : l2_distance(a, b);
}

Embedding normalize(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  if (s == 0.0 || !std::isfinite(s)) {
    throw Error(ErrorCode::kZeroVector, "cannot normalize a zero vector");
  }
  const double inv = 1.0 / std::sqrt(s);
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x *= inv;
  return Embedding(std::move(out), true);
}

}  // namespace lefcert::distance
