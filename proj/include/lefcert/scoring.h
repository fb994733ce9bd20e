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

// Hybrid trimmed-mean classification score. For class c with ascending
// query-to-support distances p and support-to-text distances q:
//
//   R^c = sum_{i=M+1}^{K-M} p_i
//       + lambda / (K - 2M) * (sum_{i=M+1}^{K-M} q_i) * d(f_test, t_c)
//
// and the prediction is the class with the smallest R^c. With lambda = 0
// this is the plain trimmed-prototype (FCert) score.

#ifndef LEFCERT_SCORING_H_
#define LEFCERT_SCORING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "lefcert/distance.h"
#include "lefcert/types.h"

namespace lefcert::scoring {

struct ClassScores {
  // R^c per class, indexed by 0-based class position.
  std::vector<double> scores;
  // 1-based label of the minimum score; ties go to the lowest label.
  int predicted = 0;
  // Blending coefficient lambda / (K-2M) * trimmed q-sum per class. Reported
  // for inspection only.
  std::vector<double> alpha;
};

// Metric range for an episode: l2 is bounded by 2 when every embedding lies
// in the closed unit ball.
distance::MetricInfo episode_metric(const Episode& e, Metric kind);

ScoreBundle build_score_bundle(const Episode& e, std::size_t query_index,
                               const distance::MetricInfo& metric);

// Sum of sorted[M .. K-M-1] (0-based). Throws M_TOO_LARGE unless
// 0 <= M <= floor((K-1)/2).
double trimmed_sum(std::span<const double> sorted, int trim);

// lambda / (K - 2M).
double text_coefficient(const CertConfig& cfg, int shots);

double class_score(const ScoreBundle& b, int c, const CertConfig& cfg);

// 1-based argmin with lowest-label tie-break.
int argmin_label(std::span<const double> scores);

ClassScores score_bundle(const ScoreBundle& b, const CertConfig& cfg);
ClassScores predict(const Episode& e, std::size_t query_index,
                    const CertConfig& cfg);

}  // namespace lefcert::scoring

#endif  // LEFCERT_SCORING_H_
