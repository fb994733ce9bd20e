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

#include "lefcert/scoring.h"

#include <algorithm>
#include <string>

#include "lefcert/error.h"

namespace lefcert::scoring {

distance::MetricInfo episode_metric(const Episode& e, Metric kind) {
  bool in_ball = true;
  auto check = [&in_ball](const Embedding& x) {
    if (x.norm() > 1.0 + kWireNormTolerance) in_ball = false;
  };
  for (const auto& shots : e.support) std::for_each(shots.begin(), shots.end(), check);
  std::for_each(e.text.begin(), e.text.end(), check);
  for (const auto& q : e.queries) check(q.embedding);
  return distance::metric_info(kind, in_ball);
}

ScoreBundle build_score_bundle(const Episode& e, std::size_t query_index,
                               const distance::MetricInfo& metric) {
  if (query_index >= e.queries.size()) {
    throw Error(ErrorCode::kInvalidParameter,
                "query index " + std::to_string(query_index) + " out of range");
  }
  const Embedding& f_test = e.queries[query_index].embedding;
  const auto classes = static_cast<std::size_t>(e.num_classes);
  ScoreBundle b;
  b.range_max = metric.range_max;
  b.p_raw.resize(classes);
  b.q_raw.resize(classes);
  b.d_text.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    for (const Embedding& f : e.support[c]) {
      b.p_raw[c].push_back(distance::distance(metric.kind, f_test, f));
      b.q_raw[c].push_back(distance::distance(metric.kind, f, e.text[c]));
    }
    b.d_text[c] = distance::distance(metric.kind, f_test, e.text[c]);
  }
  b.p = b.p_raw;
  b.q = b.q_raw;
  for (auto& v : b.p) std::sort(v.begin(), v.end());
  for (auto& v : b.q) std::sort(v.begin(), v.end());
  return b;
}

double trimmed_sum(std::span<const double> sorted, int trim) {
  const int k = static_cast<int>(sorted.size());
  if (k < 1 || trim < 0 || trim > max_trim(k)) {
    throw Error(ErrorCode::kMTooLarge, "trim " + std::to_string(trim) +
                                           " invalid for K=" + std::to_string(k));
  }
  double s = 0.0;
  for (int i = trim; i < k - trim; ++i) s += sorted[static_cast<std::size_t>(i)];
  return s;
}

double text_coefficient(const CertConfig& cfg, int shots) {
  return cfg.lambda / static_cast<double>(shots - 2 * cfg.trim);
}

double class_score(const ScoreBundle& b, int c, const CertConfig& cfg) {
  const auto ci = static_cast<std::size_t>(c);
  const double feature = trimmed_sum(b.p[ci], cfg.trim);
  const double text = trimmed_sum(b.q[ci], cfg.trim);
  return feature + text_coefficient(cfg, b.shots()) * text * b.d_text[ci];
}

int argmin_label(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] < scores[best]) best = c;
  }
  return static_cast<int>(best) + 1;
}

ClassScores score_bundle(const ScoreBundle& b, const CertConfig& cfg) {
  ClassScores out;
  const int classes = b.num_classes();
  const double coef = text_coefficient(cfg, b.shots());
  out.scores.resize(static_cast<std::size_t>(classes));
  out.alpha.resize(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    out.scores[ci] = class_score(b, c, cfg);
    out.alpha[ci] = coef * trimmed_sum(b.q[ci], cfg.trim);
  }
  out.predicted = argmin_label(out.scores);
  return out;
}

ClassScores predict(const Episode& e, std::size_t query_index,
                    const CertConfig& cfg) {
  const auto bundle =
      build_score_bundle(e, query_index, episode_metric(e, cfg.metric));
  return score_bundle(bundle, cfg);
}

}  // namespace lefcert::scoring
