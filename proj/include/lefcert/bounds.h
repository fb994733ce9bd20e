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

// Worst-case envelopes of the class score R^c when Tc support samples of
// class c are poisoned.
//
// Unbounded attacker (closed form, ascending p, q; 1-based indices):
//
//   Tc <= M:            upper window [M+1+Tc, K-M+Tc], lower window
//                       [M+1-Tc, K-M-Tc], identical for p and q.
//   M < Tc <= K-M-1:    upper = window [M+1+Tc, K] plus (Tc-M) copies of
//                       range_max; lower = window [1, K-M-Tc]. The upper
//                       bound is +inf when the metric has no finite range.
//   Tc > K-M-1:         upper = +inf, lower = 0.
//
// l2-ball attacker: every poisoned sample moves each of its distances by at
// most delta = L * r, and the bound is an exhaustive search over which Tc
// samples move. The result is intersected with the closed form.

#ifndef LEFCERT_BOUNDS_H_
#define LEFCERT_BOUNDS_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lefcert/types.h"

namespace lefcert::bounds {

// Refuse traversals with more index sets than this.
inline constexpr double kMaxTraversalSets = 1e6;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct BoundTable {
  // upper[c][t] and lower[c][t] for t = 0..budget.
  std::vector<std::vector<double>> upper;
  std::vector<std::vector<double>> lower;

  int num_classes() const { return static_cast<int>(upper.size()); }
  int budget() const {
    return upper.empty() ? -1 : static_cast<int>(upper.front().size()) - 1;
  }
};

// Binomial coefficient as a double (exact below 2^53).
double binomial(int n, int k);

Interval closed_form_bounds(std::span<const double> p_sorted,
                            std::span<const double> q_sorted, double d_text,
                            double range_max, const CertConfig& cfg, int tc);
Interval closed_form_bounds(const ScoreBundle& b, int c, const CertConfig& cfg,
                            int tc);

// Exhaustive search over the C(K, Tc) index sets, shifting the selected p and
// q entries by +delta (upper) or -delta clamped at 0 (lower). Inputs are in
// shot order. Throws BUDGET_EXCEEDS_K or CONFIG_TOO_LARGE.
Interval traversal_extremes(std::span<const double> p_raw,
                            std::span<const double> q_raw, double d_text,
                            const CertConfig& cfg, int tc, double delta);

// traversal_extremes intersected with closed_form_bounds.
Interval traversal_bounds(std::span<const double> p_raw,
                          std::span<const double> q_raw, double d_text,
                          double range_max, const CertConfig& cfg, int tc,
                          double delta);

// sqrt(2 / (pi sigma^2)). Throws NONPOSITIVE_SIGMA.
double lipschitz_constant(double sigma);

// range_width * sqrt(ln(2/alpha) / (2n)). Throws INVALID_PARAMETER.
double hoeffding_deviation(int n, double alpha_conf, double range_width);

// Returns (lowered, raised): every distance moved by -t / +t and clamped into
// [0, range_max].
std::pair<ScoreBundle, ScoreBundle> inflate_bundle_hoeffding(
    const ScoreBundle& b, double t);

BoundTable build_bound_table(const ScoreBundle& b, const CertConfig& cfg);
BoundTable build_bound_table(const Episode& e, std::size_t query_index,
                             const CertConfig& cfg);

// Checks the structural invariants of a table against the clean scores:
// lower <= score <= upper, upper nondecreasing and lower nonincreasing in Tc,
// and (when `collapses_at_zero`) upper[c][0] == lower[c][0] == score[c].
// Returns one message per violation.
std::vector<std::string> table_violations(const BoundTable& table,
                                          std::span<const double> scores,
                                          bool collapses_at_zero);

}  // namespace lefcert::bounds

#endif  // LEFCERT_BOUNDS_H_
