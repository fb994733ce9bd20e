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

#include "lefcert/bounds.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lefcert/distance.h"
#include "lefcert/error.h"
#include "lefcert/scoring.h"

namespace lefcert::bounds {
namespace {

using distance::kInfinity;

// Sum of sorted[first .. last) (0-based, half open).
double window(std::span<const double> sorted, int first, int last) {
  double s = 0.0;
  for (int i = first; i < last; ++i) s += sorted[static_cast<std::size_t>(i)];
  return s;
}

double combine(double feature, double text, double coef, double d_text) {
  if (std::isinf(feature) || std::isinf(text)) return kInfinity;
  return feature + coef * text * d_text;
}

// Trimmed sum of `values` after sorting; `values` is scratch.
double sorted_trim(std::vector<double>& values, int trim) {
  std::sort(values.begin(), values.end());
  return window(values, trim, static_cast<int>(values.size()) - trim);
}

// Advances `idx` (strictly increasing, values < n) to the next k-subset in
// lexicographic order. Returns false after the last subset.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) {
    idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

}  // namespace

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

Interval closed_form_bounds(std::span<const double> p_sorted,
                            std::span<const double> q_sorted, double d_text,
                            double range_max, const CertConfig& cfg, int tc) {
  const int k = static_cast<int>(p_sorted.size());
  const int m = cfg.trim;
  if (tc < 0) throw Error(ErrorCode::kInvalidParameter, "negative Tc");
  if (m < 0 || m > max_trim(k)) {
    throw Error(ErrorCode::kMTooLarge, "trim invalid for K=" + std::to_string(k));
  }
  const double coef = cfg.lambda / static_cast<double>(k - 2 * m);
  if (tc > k - m - 1) return {0.0, kInfinity};
  if (tc <= m) {
    return {combine(window(p_sorted, m - tc, k - m - tc),
                    window(q_sorted, m - tc, k - m - tc), coef, d_text),
            combine(window(p_sorted, m + tc, k - m + tc),
                    window(q_sorted, m + tc, k - m + tc), coef, d_text)};
  }
  const double lower = combine(window(p_sorted, 0, k - m - tc),
                               window(q_sorted, 0, k - m - tc), coef, d_text);
  if (!std::isfinite(range_max)) return {lower, kInfinity};
  const double pad = range_max * (tc - m);
  const double upper = combine(window(p_sorted, m + tc, k) + pad,
                               window(q_sorted, m + tc, k) + pad, coef, d_text);
  return {lower, upper};
}

Interval closed_form_bounds(const ScoreBundle& b, int c, const CertConfig& cfg,
                            int tc) {
  const auto ci = static_cast<std::size_t>(c);
  return closed_form_bounds(b.p[ci], b.q[ci], b.d_text[ci], b.range_max, cfg, tc);
}

Interval traversal_extremes(std::span<const double> p_raw,
                            std::span<const double> q_raw, double d_text,
                            const CertConfig& cfg, int tc, double delta) {
  const int k = static_cast<int>(p_raw.size());
  if (tc < 0) throw Error(ErrorCode::kInvalidParameter, "negative Tc");
  if (tc > k) {
    throw Error(ErrorCode::kBudgetExceedsK,
                "Tc=" + std::to_string(tc) + " exceeds K=" + std::to_string(k));
  }
  if (binomial(k, tc) > kMaxTraversalSets) {
    throw Error(ErrorCode::kConfigTooLarge,
                "C(" + std::to_string(k) + "," + std::to_string(tc) +
                    ") index sets exceed the traversal limit");
  }
  if (q_raw.size() != p_raw.size()) {
    throw Error(ErrorCode::kShapeMismatch, "p and q lengths differ");
  }
  const int m = cfg.trim;
  if (m < 0 || m > max_trim(k)) {
    throw Error(ErrorCode::kMTooLarge, "trim invalid for K=" + std::to_string(k));
  }
  const double coef = cfg.lambda / static_cast<double>(k - 2 * m);

  std::vector<int> idx(static_cast<std::size_t>(tc));
  for (int i = 0; i < tc; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::vector<double> p(p_raw.begin(), p_raw.end());
  std::vector<double> q(q_raw.begin(), q_raw.end());

  Interval out{kInfinity, -kInfinity};
  do {
    p.assign(p_raw.begin(), p_raw.end());
    q.assign(q_raw.begin(), q_raw.end());
    for (int i : idx) {
      p[static_cast<std::size_t>(i)] += delta;
      q[static_cast<std::size_t>(i)] += delta;
    }
    const double raised = combine(sorted_trim(p, m), sorted_trim(q, m), coef, d_text);
    out.upper = std::max(out.upper, raised);

    p.assign(p_raw.begin(), p_raw.end());
    q.assign(q_raw.begin(), q_raw.end());
    for (int i : idx) {
      auto& pi = p[static_cast<std::size_t>(i)];
      auto& qi = q[static_cast<std::size_t>(i)];
      pi = std::max(0.0, pi - delta);
      qi = std::max(0.0, qi - delta);
    }
    const double lowered = combine(sorted_trim(p, m), sorted_trim(q, m), coef, d_text);
    out.lower = std::min(out.lower, lowered);
  } while (next_combination(idx, k));
  return out;
}

Interval traversal_bounds(std::span<const double> p_raw,
                          std::span<const double> q_raw, double d_text,
                          double range_max, const CertConfig& cfg, int tc,
                          double delta) {
  const Interval walk = traversal_extremes(p_raw, q_raw, d_text, cfg, tc, delta);
  std::vector<double> p(p_raw.begin(), p_raw.end());
  std::vector<double> q(q_raw.begin(), q_raw.end());
  std::sort(p.begin(), p.end());
  std::sort(q.begin(), q.end());
  const Interval box = closed_form_bounds(p, q, d_text, range_max, cfg, tc);
  return {std::max(walk.lower, box.lower), std::min(walk.upper, box.upper)};
}

double lipschitz_constant(double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kNonpositiveSigma, "sigma must be positive");
  }
  return std::sqrt(2.0 / (std::numbers::pi * sigma * sigma));
}

double hoeffding_deviation(int n, double alpha_conf, double range_width) {
  if (n < 1 || !(alpha_conf > 0.0 && alpha_conf < 1.0) || !(range_width > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "hoeffding needs n >= 1, alpha in (0,1), positive range");
  }
  return range_width * std::sqrt(std::log(2.0 / alpha_conf) / (2.0 * n));
}

std::pair<ScoreBundle, ScoreBundle> inflate_bundle_hoeffding(
    const ScoreBundle& b, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::kInvalidParameter, "t must be >= 0");
  ScoreBundle lo = b;
  ScoreBundle hi = b;
  const double top = b.range_max;
  auto shift = [](std::vector<std::vector<double>>& rows, double by, double top) {
    for (auto& row : rows) {
      for (double& x : row) x = std::clamp(x + by, 0.0, top);
    }
  };
  for (auto* rows : {&lo.p, &lo.q, &lo.p_raw, &lo.q_raw}) shift(*rows, -t, top);
  for (auto* rows : {&hi.p, &hi.q, &hi.p_raw, &hi.q_raw}) shift(*rows, t, top);
  for (double& x : lo.d_text) x = std::clamp(x - t, 0.0, top);
  for (double& x : hi.d_text) x = std::clamp(x + t, 0.0, top);
  return {std::move(lo), std::move(hi)};
}

BoundTable build_bound_table(const ScoreBundle& b, const CertConfig& cfg) {
  const int classes = b.num_classes();
  const int k = b.shots();
  cfg.validate(k);
  BoundTable table;
  table.upper.assign(static_cast<std::size_t>(classes),
                     std::vector<double>(static_cast<std::size_t>(cfg.budget) + 1));
  table.lower = table.upper;

  if (cfg.threat.kind == ThreatKind::kUnbounded) {
    for (int c = 0; c < classes; ++c) {
      for (int tc = 0; tc <= cfg.budget; ++tc) {
        const Interval iv = closed_form_bounds(b, c, cfg, tc);
        table.upper[static_cast<std::size_t>(c)][static_cast<std::size_t>(tc)] = iv.upper;
        table.lower[static_cast<std::size_t>(c)][static_cast<std::size_t>(tc)] = iv.lower;
      }
    }
    return table;
  }

  const double delta =
      lipschitz_constant(cfg.threat.sigma) * cfg.threat.radius;
  const double t = cfg.threat.hoeffding
                       ? hoeffding_deviation(cfg.threat.noise_samples,
                                             cfg.threat.confidence_alpha, 2.0)
                       : 0.0;
  const auto [lo, hi] = inflate_bundle_hoeffding(b, t);
  for (int c = 0; c < classes; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    for (int tc = 0; tc <= cfg.budget; ++tc) {
      // A class cannot lose more than its K samples.
      const int eff = std::min(tc, k);
      const Interval up = traversal_bounds(hi.p_raw[ci], hi.q_raw[ci],
                                           hi.d_text[ci], hi.range_max, cfg, eff, delta);
      const Interval down = traversal_bounds(lo.p_raw[ci], lo.q_raw[ci],
                                             lo.d_text[ci], lo.range_max, cfg, eff, delta);
      table.upper[ci][static_cast<std::size_t>(tc)] = up.upper;
      table.lower[ci][static_cast<std::size_t>(tc)] = down.lower;
    }
  }
  return table;
}

BoundTable build_bound_table(const Episode& e, std::size_t query_index,
                             const CertConfig& cfg) {
  const auto b = scoring::build_score_bundle(
      e, query_index, scoring::episode_metric(e, cfg.metric));
  return build_bound_table(b, cfg);
}

std::vector<std::string> table_violations(const BoundTable& table,
                                          std::span<const double> scores,
                                          bool collapses_at_zero) {
  std::vector<std::string> out;
  auto report = [&out](int c, int t, const std::string& what) {
    std::ostringstream os;
    os << "class " << c + 1 << " Tc=" << t << ": " << what;
    out.push_back(os.str());
  };
  for (int c = 0; c < table.num_classes(); ++c) {
    const auto& up = table.upper[static_cast<std::size_t>(c)];
    const auto& lo = table.lower[static_cast<std::size_t>(c)];
    const double r = scores[static_cast<std::size_t>(c)];
    for (int t = 0; t <= table.budget(); ++t) {
      const auto ti = static_cast<std::size_t>(t);
      if (!(lo[ti] <= r)) report(c, t, "lower exceeds score");
      if (!(r <= up[ti])) report(c, t, "upper below score");
      if (t > 0 && up[ti] < up[ti - 1]) report(c, t, "upper decreased");
      if (t > 0 && lo[ti] > lo[ti - 1]) report(c, t, "lower increased");
    }
    if (collapses_at_zero && (up[0] != r || lo[0] != r)) {
      report(c, 0, "bounds do not collapse to the score");
    }
  }
  return out;
}

}  // namespace lefcert::bounds
