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

#include "lefcert/smoothing.h"

#include <cmath>

#include "lefcert/bounds.h"
#include "lefcert/error.h"

namespace lefcert::smoothing {

Embedding smoothed_embedding(const NoisySampleSet& s) {
  if (s.samples.empty()) throw Error(ErrorCode::kEmptySet, "no noise samples");
  const std::size_t dim = s.samples.front().dim();
  std::vector<double> mean(dim, 0.0);
  for (const Embedding& x : s.samples) {
    if (x.dim() != dim) {
      throw Error(ErrorCode::kDimMismatch, "noise samples differ in dimension");
    }
    if (std::abs(x.norm() - 1.0) > kWireNormTolerance) {
      throw Error(ErrorCode::kNormViolation, "noise sample is not unit-norm");
    }
    const auto v = x.values();
    for (std::size_t j = 0; j < dim; ++j) mean[j] += v[j];
  }
  const double inv = 1.0 / static_cast<double>(s.samples.size());
  for (double& m : mean) m *= inv;
  return Embedding(std::move(mean), false);
}

DualConstraintParams dual_constraint_params(const ThreatModel& t) {
  if (t.kind != ThreatKind::kL2Ball) {
    throw Error(ErrorCode::kWrongThreatKind,
                "dual-constraint parameters need the l2ball threat model");
  }
  t.validate();
  return {bounds::lipschitz_constant(t.sigma) * t.radius,
          bounds::hoeffding_deviation(t.noise_samples, t.confidence_alpha, 2.0)};
}

}  // namespace lefcert::smoothing
