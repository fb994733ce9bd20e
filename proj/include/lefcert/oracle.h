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

// Brute-force adversary at the distance level, used to check every bound the
// engine computes.
//
// The attacker poisons Tc support samples of one class. A poisoned sample
// gets new query-to-support and support-to-text distances:
//
//   replacement attacks   arbitrary values from a grid over [0, range_max]
//   shift attacks         the old values moved by grid offsets in
//                         [-delta, +delta], clamped into [0, range_max]
//
// Two index models are enumerated. In the paired model the same Tc samples
// carry the new p and q values. The independent model lets p and q pick
// their Tc positions separately; it contains every paired attack, and the
// closed-form bounds are tight against it.
//
// The score evaluation here is written independently of src/scoring.cc.

#ifndef LEFCERT_ORACLE_H_
#define LEFCERT_ORACLE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lefcert/types.h"

namespace lefcert::oracle {

// Upper limit on score evaluations per extremal_scores call.
inline constexpr double kMaxEnumeration = 1e7;
inline constexpr int kDefaultGridSteps = 21;

enum class IndexModel { kPaired, kIndependent };

struct AttackAction {
  std::vector<int> p_indices;  // 0-based shot positions
  std::vector<double> p_values;
  std::vector<int> q_indices;
  std::vector<double> q_values;
};

struct Extremes {
  double min_score = 0.0;
  double max_score = 0.0;
  AttackAction argmin;
  AttackAction argmax;
};

// `steps` evenly spaced points from 0 to range_max, both endpoints exact.
std::vector<double> value_grid(double range_max, int steps);
// `steps` evenly spaced offsets from -delta to +delta.
std::vector<double> shift_grid(double delta, int steps);

// Number of trimmed sums evaluated by extremal_scores.
double replacement_enumeration_size(int shots, int tc, int grid_steps);
double shift_enumeration_size(int shots, int tc, int grid_steps);

// Exact extremes of the class score over all replacement attacks on
// `grid_steps` grid values. Inputs are in shot order. Throws
// CONFIG_TOO_LARGE above kMaxEnumeration or when range_max is infinite.
Extremes extremal_scores(std::span<const double> p_raw,
                         std::span<const double> q_raw, double d_text,
                         double range_max, const CertConfig& cfg, int tc,
                         int grid_steps, IndexModel model);

// Exact extremes over shift attacks with the paired index model.
Extremes extremal_shift_scores(std::span<const double> p_raw,
                               std::span<const double> q_raw, double d_text,
                               double range_max, const CertConfig& cfg, int tc,
                               double delta, int grid_steps);

// Score after replacing the Tc largest entries of p and of q with 0.
double canonical_min_score(std::span<const double> p_raw,
                           std::span<const double> q_raw, double d_text,
                           const CertConfig& cfg, int tc);

// Trimmed score of shot-order distances: sort, drop M from each end, sum.
double reference_score(std::vector<double> p, std::vector<double> q,
                       double d_text, const CertConfig& cfg);

struct Finding {
  std::uint64_t trial = 0;
  int query = 0;  // 0-based query position
  int label = 0;  // 1-based class
  int tc = 0;
  std::string kind;
  double value = 0.0;
  double bound = 0.0;
  AttackAction action;
};

struct Report {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  int grid_steps = kDefaultGridSteps;

  std::uint64_t instances = 0;
  std::uint64_t cosine_instances = 0;
  std::uint64_t l2_instances = 0;
  std::uint64_t l2ball_instances = 0;
  std::uint64_t cells = 0;
  std::uint64_t l2ball_cells = 0;
  std::uint64_t tightness_cells = 0;
  std::uint64_t tightness_instances = 0;
  std::uint64_t canonical_min_cells = 0;
  std::uint64_t certified_queries = 0;
  // Largest oracle-to-bound gap on Tc <= M cells, relative to its tolerance.
  double max_tightness_ratio = 0.0;

  std::vector<Finding> soundness_violations;
  std::vector<Finding> tightness_failures;
  std::vector<Finding> canonical_min_mismatches;
  std::vector<Finding> flips;

  bool clean() const {
    return soundness_violations.empty() && tightness_failures.empty() &&
           canonical_min_mismatches.empty() && flips.empty();
  }
};

// Checks every query, class and Tc <= cfg.budget of one episode: oracle
// extremes must lie inside the engine's bounds, tight for Tc <= M against
// the independent model (unbounded threat only), equal at the minimum to the
// canonical attack that zeroes the Tc largest distances, and no certified
// prediction may flip.
Report check_episode(const Episode& e, const CertConfig& cfg, int grid_steps,
                     std::uint64_t trial = 0);

struct CheckOptions {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  int grid_steps = kDefaultGridSteps;
};

// Random small instances (C <= 3, K <= 7, M <= 2, T <= K-M-1, both metrics;
// some l2 trials add an l2-ball pass). Trial i is generated from
// derive_seed(seed, i). Parallel over trials; output is independent of the
// thread count.
Report oracle_check(const CheckOptions& opts);
Report oracle_check_serial(const CheckOptions& opts);

}  // namespace lefcert::oracle

#endif  // LEFCERT_ORACLE_H_
