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

#include "lefcert/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lefcert/bounds.h"
#include "lefcert/certify.h"
#include "lefcert/error.h"
#include "lefcert/harness.h"
#include "lefcert/parallel.h"
#include "lefcert/rng.h"
#include "lefcert/scoring.h"

namespace lefcert::oracle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Per-cell evaluation budget inside check_episode; larger cells fall back to
// coarser grids, which keep both endpoints.
constexpr double kCellBudget = 2e4;

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

bool advance_subset(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    auto& v = idx[static_cast<std::size_t>(i)];
    if (v < n - k + i) {
      ++v;
      for (int j = i + 1; j < k; ++j) {
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
      return true;
    }
  }
  return false;
}

// Nondecreasing tuples over [0, n): multisets of grid points.
bool advance_multiset(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    auto& v = idx[static_cast<std::size_t>(i)];
    if (v < n - 1) {
      ++v;
      for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = v;
      return true;
    }
  }
  return false;
}

// All tuples over [0, n).
bool advance_tuple(std::vector<int>& idx, int n) {
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
    auto& v = idx[static_cast<std::size_t>(i)];
    if (++v < n) return true;
    v = 0;
  }
  return false;
}

double trimmed(std::vector<double>& values, int trim) {
  std::sort(values.begin(), values.end());
  double s = 0.0;
  const int k = static_cast<int>(values.size());
  for (int i = trim; i < k - trim; ++i) s += values[static_cast<std::size_t>(i)];
  return s;
}

struct Side {
  double min = kInf;
  double max = -kInf;
  std::vector<double> min_values;
  std::vector<double> max_values;
};

struct SubsetExtremes {
  std::vector<int> subset;
  Side p;
  Side q;
};

enum class AttackKind { kReplace, kShift };

// For every Tc-subset, the extremes of the trimmed p-sum and q-sum over all
// admissible new values for the subset.
std::vector<SubsetExtremes> enumerate(std::span<const double> p_raw,
                                      std::span<const double> q_raw, int trim,
                                      int tc, const std::vector<double>& grid,
                                      AttackKind kind, double range_max) {
  const int k = static_cast<int>(p_raw.size());
  const int g = static_cast<int>(grid.size());
  std::vector<SubsetExtremes> out;
  std::vector<int> subset(static_cast<std::size_t>(tc));
  for (int i = 0; i < tc; ++i) subset[static_cast<std::size_t>(i)] = i;
  std::vector<double> buf;
  std::vector<double> values(static_cast<std::size_t>(tc));
  do {
    SubsetExtremes se;
    se.subset = subset;
    for (int side = 0; side < 2; ++side) {
      const auto& raw = side == 0 ? p_raw : q_raw;
      Side& ext = side == 0 ? se.p : se.q;
      std::vector<double> rest;
      for (int i = 0, s = 0; i < k; ++i) {
        if (s < tc && subset[static_cast<std::size_t>(s)] == i) {
          ++s;
          continue;
        }
        rest.push_back(raw[static_cast<std::size_t>(i)]);
      }
      std::vector<int> pick(static_cast<std::size_t>(tc), 0);
      do {
        for (int j = 0; j < tc; ++j) {
          const double gv = grid[static_cast<std::size_t>(pick[static_cast<std::size_t>(j)])];
          if (kind == AttackKind::kReplace) {
            values[static_cast<std::size_t>(j)] = gv;
          } else {
            const double base =
                raw[static_cast<std::size_t>(subset[static_cast<std::size_t>(j)])];
            values[static_cast<std::size_t>(j)] = std::clamp(base + gv, 0.0, range_max);
          }
        }
        buf = rest;
        buf.insert(buf.end(), values.begin(), values.end());
        const double s = trimmed(buf, trim);
        if (s < ext.min) {
          ext.min = s;
          ext.min_values = values;
        }
        if (s > ext.max) {
          ext.max = s;
          ext.max_values = values;
        }
      } while (kind == AttackKind::kReplace ? advance_multiset(pick, g)
                                            : advance_tuple(pick, g));
    }
    out.push_back(std::move(se));
  } while (advance_subset(subset, k));
  return out;
}

Extremes combine(const std::vector<SubsetExtremes>& subsets, double coef,
                 double d_text, IndexModel model) {
  const double w = coef * d_text;
  Extremes ex;
  if (model == IndexModel::kPaired) {
    ex.min_score = kInf;
    ex.max_score = -kInf;
    for (const auto& s : subsets) {
      const double lo = s.p.min + w * s.q.min;
      const double hi = s.p.max + w * s.q.max;
      if (lo < ex.min_score) {
        ex.min_score = lo;
        ex.argmin = {s.subset, s.p.min_values, s.subset, s.q.min_values};
      }
      if (hi > ex.max_score) {
        ex.max_score = hi;
        ex.argmax = {s.subset, s.p.max_values, s.subset, s.q.max_values};
      }
    }
    return ex;
  }
  const SubsetExtremes* pmin = &subsets.front();
  const SubsetExtremes* pmax = pmin;
  const SubsetExtremes* qmin = pmin;
  const SubsetExtremes* qmax = pmin;
  for (const auto& s : subsets) {
    if (s.p.min < pmin->p.min) pmin = &s;
    if (s.p.max > pmax->p.max) pmax = &s;
    if (s.q.min < qmin->q.min) qmin = &s;
    if (s.q.max > qmax->q.max) qmax = &s;
  }
  ex.min_score = pmin->p.min + w * qmin->q.min;
  ex.max_score = pmax->p.max + w * qmax->q.max;
  ex.argmin = {pmin->subset, pmin->p.min_values, qmin->subset, qmin->q.min_values};
  ex.argmax = {pmax->subset, pmax->p.max_values, qmax->subset, qmax->q.max_values};
  return ex;
}

void check_shape(std::span<const double> p_raw, std::span<const double> q_raw,
                 const CertConfig& cfg, int tc) {
  const int k = static_cast<int>(p_raw.size());
  if (q_raw.size() != p_raw.size() || k < 1) {
    throw Error(ErrorCode::kShapeMismatch, "p and q must be nonempty and equal length");
  }
  if (cfg.trim < 0 || cfg.trim > max_trim(k)) {
    throw Error(ErrorCode::kMTooLarge, "trim invalid for K=" + std::to_string(k));
  }
  if (tc < 0 || tc > k) {
    throw Error(ErrorCode::kBudgetExceedsK, "Tc must lie in [0, K]");
  }
}

double coefficient(const CertConfig& cfg, int k) {
  return cfg.lambda / static_cast<double>(k - 2 * cfg.trim);
}

// Largest candidate grid whose enumeration fits the per-cell budget.
template <typename SizeFn>
int fit_grid(int requested, std::initializer_list<int> fallbacks, SizeFn size) {
  if (size(requested) <= kCellBudget) return requested;
  int last = requested;
  for (int g : fallbacks) {
    if (g >= requested) continue;
    last = g;
    if (size(g) <= kCellBudget) return g;
  }
  return last;
}

Finding finding(std::uint64_t trial, int query, int c, int tc, std::string kind,
                double value, double bound, AttackAction action) {
  return {trial, query, c + 1, tc, std::move(kind), value, bound, std::move(action)};
}

void merge(Report& into, Report&& from) {
  into.instances += from.instances;
  into.cosine_instances += from.cosine_instances;
  into.l2_instances += from.l2_instances;
  into.l2ball_instances += from.l2ball_instances;
  into.cells += from.cells;
  into.l2ball_cells += from.l2ball_cells;
  into.tightness_cells += from.tightness_cells;
  into.tightness_instances += from.tightness_instances;
  into.canonical_min_cells += from.canonical_min_cells;
  into.certified_queries += from.certified_queries;
  into.max_tightness_ratio = std::max(into.max_tightness_ratio, from.max_tightness_ratio);
  auto append = [](std::vector<Finding>& a, std::vector<Finding>& b) {
    a.insert(a.end(), std::make_move_iterator(b.begin()),
             std::make_move_iterator(b.end()));
  };
  append(into.soundness_violations, from.soundness_violations);
  append(into.tightness_failures, from.tightness_failures);
  append(into.canonical_min_mismatches, from.canonical_min_mismatches);
  append(into.flips, from.flips);
}

Report run_trial(std::uint64_t trial, std::uint64_t seed, int grid_steps) {
  Rng rng(derive_seed(seed, trial));
  const int classes = rng.uniform_int(2, 3);
  const int shots = rng.uniform_int(1, 7);
  const int trim = rng.uniform_int(0, std::min(2, max_trim(shots)));
  const int budget = rng.uniform_int(0, shots - trim - 1);
  const Metric metric = rng.uniform() < 0.5 ? Metric::kCosine : Metric::kL2;
  const double r = rng.uniform();
  const double lambda = r < 0.2 ? 0.0 : r < 0.6 ? rng.uniform(0.0, 2.0)
                                                 : rng.uniform(0.0, 30.0);

  harness::SyntheticPoolSpec spec;
  spec.num_classes = classes;
  spec.per_class = shots + 1;
  spec.dim = rng.uniform_int(2, 6);
  spec.intra_spread = rng.uniform(0.02, 0.6);
  spec.inter_gap = rng.uniform(0.0, 1.0);
  spec.text_offset = rng.uniform(0.0, 0.6);
  spec.seed = rng.next_u64();
  const auto pool = harness::generate_synthetic_pool(spec);
  const Episode e = harness::sample_episode(pool, classes, shots, 1, rng.next_u64());

  CertConfig cfg;
  cfg.lambda = lambda;
  cfg.trim = trim;
  cfg.metric = metric;
  cfg.budget = budget;
  Report rep = check_episode(e, cfg, grid_steps, trial);
  rep.instances = 1;
  (metric == Metric::kCosine ? rep.cosine_instances : rep.l2_instances) = 1;

  if (metric == Metric::kL2 && rng.uniform() < 0.5) {
    const double sigmas[] = {0.5, 1.0, 2.0};
    CertConfig ball = cfg;
    ball.threat = ThreatModel::l2_ball(rng.uniform(0.0, 0.3),
                                       sigmas[rng.below(3)],
                                       rng.uniform() < 0.5 ? 100 : 1000, 0.01);
    ball.threat.hoeffding = rng.uniform() < 0.5;
    Report more = check_episode(e, ball, grid_steps, trial);
    more.l2ball_instances = 1;
    merge(rep, std::move(more));
  }
  return rep;
}

}  // namespace

std::vector<double> value_grid(double range_max, int steps) {
  if (steps < 2 || !std::isfinite(range_max) || !(range_max > 0.0)) {
    throw Error(ErrorCode::kConfigTooLarge,
                "value grid needs >= 2 steps over a finite range");
  }
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    g[static_cast<std::size_t>(i)] = range_max * i / (steps - 1);
  }
  g.back() = range_max;
  return g;
}

std::vector<double> shift_grid(double delta, int steps) {
  if (steps < 2 || !(delta >= 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "shift grid needs >= 2 steps");
  }
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    g[static_cast<std::size_t>(i)] = -delta + 2.0 * delta * i / (steps - 1);
  }
  g.front() = -delta;
  g.back() = delta;
  if (steps % 2 == 1) g[static_cast<std::size_t>(steps / 2)] = 0.0;
  return g;
}

double replacement_enumeration_size(int shots, int tc, int grid_steps) {
  return 2.0 * choose(shots, tc) * choose(grid_steps + tc - 1, tc);
}

double shift_enumeration_size(int shots, int tc, int grid_steps) {
  return 2.0 * choose(shots, tc) * std::pow(static_cast<double>(grid_steps), tc);
}

Extremes extremal_scores(std::span<const double> p_raw,
                         std::span<const double> q_raw, double d_text,
                         double range_max, const CertConfig& cfg, int tc,
                         int grid_steps, IndexModel model) {
  check_shape(p_raw, q_raw, cfg, tc);
  const int k = static_cast<int>(p_raw.size());
  if (replacement_enumeration_size(k, tc, grid_steps) > kMaxEnumeration) {
    throw Error(ErrorCode::kConfigTooLarge, "oracle enumeration too large");
  }
  const auto grid = value_grid(range_max, grid_steps);
  const auto subsets =
      enumerate(p_raw, q_raw, cfg.trim, tc, grid, AttackKind::kReplace, range_max);
  return combine(subsets, coefficient(cfg, k), d_text, model);
}

Extremes extremal_shift_scores(std::span<const double> p_raw,
                               std::span<const double> q_raw, double d_text,
                               double range_max, const CertConfig& cfg, int tc,
                               double delta, int grid_steps) {
  check_shape(p_raw, q_raw, cfg, tc);
  const int k = static_cast<int>(p_raw.size());
  if (shift_enumeration_size(k, tc, grid_steps) > kMaxEnumeration) {
    throw Error(ErrorCode::kConfigTooLarge, "oracle enumeration too large");
  }
  const auto grid = shift_grid(delta, grid_steps);
  const auto subsets =
      enumerate(p_raw, q_raw, cfg.trim, tc, grid, AttackKind::kShift, range_max);
  return combine(subsets, coefficient(cfg, k), d_text, IndexModel::kPaired);
}

double reference_score(std::vector<double> p, std::vector<double> q,
                       double d_text, const CertConfig& cfg) {
  const int k = static_cast<int>(p.size());
  return trimmed(p, cfg.trim) + coefficient(cfg, k) * trimmed(q, cfg.trim) * d_text;
}

double canonical_min_score(std::span<const double> p_raw,
                           std::span<const double> q_raw, double d_text,
                           const CertConfig& cfg, int tc) {
  check_shape(p_raw, q_raw, cfg, tc);
  std::vector<double> p(p_raw.begin(), p_raw.end());
  std::vector<double> q(q_raw.begin(), q_raw.end());
  std::sort(p.begin(), p.end());
  std::sort(q.begin(), q.end());
  std::fill(p.end() - tc, p.end(), 0.0);
  std::fill(q.end() - tc, q.end(), 0.0);
  return reference_score(std::move(p), std::move(q), d_text, cfg);
}

Report check_episode(const Episode& e, const CertConfig& cfg, int grid_steps,
                     std::uint64_t trial) {
  validate_episode(e);
  cfg.validate(e.shots);
  const auto metric = scoring::episode_metric(e, cfg.metric);
  const int k = e.shots;
  const int m = cfg.trim;
  const bool ball = cfg.threat.kind == ThreatKind::kL2Ball;
  const double delta =
      ball ? bounds::lipschitz_constant(cfg.threat.sigma) * cfg.threat.radius : 0.0;

  Report rep;
  rep.grid_steps = grid_steps;
  bool tight_instance = false;
  for (std::size_t qi = 0; qi < e.queries.size(); ++qi) {
    const int query = static_cast<int>(qi);
    const auto b = scoring::build_score_bundle(e, qi, metric);
    const auto scores = scoring::score_bundle(b, cfg);
    const auto table = bounds::build_bound_table(b, cfg);
    const auto cert = certify::certify_sample(scores, table, cfg.budget);

    // Oracle extremes per class and Tc, kept for the flip check.
    std::vector<std::vector<double>> lo(static_cast<std::size_t>(e.num_classes)),
        hi(static_cast<std::size_t>(e.num_classes));
    for (int c = 0; c < e.num_classes; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      const auto& p_raw = b.p_raw[ci];
      const auto& q_raw = b.q_raw[ci];
      const double d = b.d_text[ci];
      for (int tc = 0; tc <= cfg.budget; ++tc) {
        const double upper = table.upper[ci][static_cast<std::size_t>(tc)];
        const double lower = table.lower[ci][static_cast<std::size_t>(tc)];
        Extremes ex;
        double step = 0.0;
        if (ball) {
          const int eff = std::min(tc, k);
          const int g = fit_grid(5, {3, 2}, [&](int s) {
            return shift_enumeration_size(k, eff, s);
          });
          ex = extremal_shift_scores(p_raw, q_raw, d, b.range_max, cfg, eff, delta, g);
          ++rep.l2ball_cells;
        } else {
          const int g = fit_grid(grid_steps, {11, 6, 3, 2}, [&](int s) {
            return replacement_enumeration_size(k, tc, s);
          });
          step = b.range_max / (g - 1);
          // One enumeration serves both index models.
          const auto subsets = enumerate(p_raw, q_raw, m, tc,
                                         value_grid(b.range_max, g),
                                         AttackKind::kReplace, b.range_max);
          const double coef = coefficient(cfg, k);
          ex = combine(subsets, coef, d, IndexModel::kIndependent);
          const Extremes paired = combine(subsets, coef, d, IndexModel::kPaired);
          if (paired.max_score > ex.max_score || paired.min_score < ex.min_score) {
            rep.soundness_violations.push_back(finding(
                trial, query, c, tc, "paired_outside_independent",
                paired.max_score, ex.max_score, paired.argmax));
          }
          ++rep.cells;
        }

        const double tol_u = 1e-9 * (1.0 + std::abs(ex.max_score));
        const double tol_l = 1e-9 * (1.0 + std::abs(ex.min_score));
        if (ex.max_score > upper + tol_u) {
          rep.soundness_violations.push_back(finding(
              trial, query, c, tc, "above_upper", ex.max_score, upper, ex.argmax));
        }
        if (ex.min_score < lower - tol_l) {
          rep.soundness_violations.push_back(finding(
              trial, query, c, tc, "below_lower", ex.min_score, lower, ex.argmin));
        }

        if (!ball) {
          if (tc <= m) {
            const double wnd = static_cast<double>(k - 2 * m);
            const double tol =
                step * wnd * (1.0 + cfg.lambda * d / wnd) + 1e-9;
            const double gap = std::max(upper - ex.max_score, ex.min_score - lower);
            rep.max_tightness_ratio = std::max(rep.max_tightness_ratio, gap / tol);
            ++rep.tightness_cells;
            if (m > 0 && tc > 0) tight_instance = true;
            if (gap > tol) {
              rep.tightness_failures.push_back(
                  finding(trial, query, c, tc, "loose", gap, tol, ex.argmax));
            }
          }
          const double canon = canonical_min_score(p_raw, q_raw, d, cfg, tc);
          ++rep.canonical_min_cells;
          if (std::abs(canon - ex.min_score) > 1e-12 * (1.0 + std::abs(canon))) {
            rep.canonical_min_mismatches.push_back(finding(
                trial, query, c, tc, "canonical_min", ex.min_score, canon, ex.argmin));
          }
        }
        lo[ci].push_back(ex.min_score);
        hi[ci].push_back(ex.max_score);
      }
    }

    if (!cert.certified) continue;
    ++rep.certified_queries;
    const int y = cert.predicted - 1;
    for (int t_pred = 0; t_pred <= cfg.budget; ++t_pred) {
      const double attacked_pred =
          hi[static_cast<std::size_t>(y)][static_cast<std::size_t>(t_pred)];
      for (int c = 0; c < e.num_classes; ++c) {
        if (c == y) continue;
        for (int tc = 0; tc <= cfg.budget - t_pred; ++tc) {
          const double attacked =
              lo[static_cast<std::size_t>(c)][static_cast<std::size_t>(tc)];
          if (attacked < attacked_pred || (attacked == attacked_pred && c < y)) {
            rep.flips.push_back(finding(trial, query, c, tc, "certified_flip",
                                        attacked, attacked_pred, {}));
          }
        }
      }
    }
  }
  if (!ball && tight_instance) rep.tightness_instances = 1;
  return rep;
}

Report oracle_check(const CheckOptions& opts) {
  std::vector<Report> parts(static_cast<std::size_t>(opts.trials));
  parallel_for(parts.size(), [&](std::size_t i) {
    parts[i] = run_trial(i, opts.seed, opts.grid_steps);
  });
  Report rep;
  rep.trials = opts.trials;
  rep.seed = opts.seed;
  rep.grid_steps = opts.grid_steps;
  for (auto& p : parts) merge(rep, std::move(p));
  return rep;
}

Report oracle_check_serial(const CheckOptions& opts) {
  Report rep;
  rep.trials = opts.trials;
  rep.seed = opts.seed;
  rep.grid_steps = opts.grid_steps;
  for (std::uint64_t i = 0; i < opts.trials; ++i) {
    merge(rep, run_trial(i, opts.seed, opts.grid_steps));
  }
  return rep;
}

}  // namespace lefcert::oracle
