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

// Aggregation of encoder outputs on Gaussian-perturbed inputs. The encoder
// itself runs upstream; each sample set arrives already encoded.
//
// The smoothed mean is not re-normalized: the Lipschitz constant holds for
// the mean of unit vectors, which lies inside the unit ball, and would no
// longer hold after projection back onto the sphere.

#ifndef LEFCERT_SMOOTHING_H_
#define LEFCERT_SMOOTHING_H_

#include <vector>

#include "lefcert/types.h"

namespace lefcert::smoothing {

struct NoisySampleSet {
  std::vector<Embedding> samples;
  double sigma = 0.0;
  bool denoised = false;
};

// Coordinate-wise mean; the result has normalized() == false. Throws
// EMPTY_SET, NORM_VIOLATION (non-unit sample) or DIM_MISMATCH.
Embedding smoothed_embedding(const NoisySampleSet& s);

struct DualConstraintParams {
  // Embedding-space displacement bound L * r.
  double delta = 0.0;
  // Hoeffding deviation with range width 2.
  double hoeffding_t = 0.0;
};

// Throws WRONG_THREAT_KIND unless t is an l2-ball model.
DualConstraintParams dual_constraint_params(const ThreatModel& t);

}  // namespace lefcert::smoothing

#endif  // LEFCERT_SMOOTHING_H_
