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

#include "lefcert/certify.h"

#include <string>

#include "lefcert/error.h"
#include "lefcert/parallel.h"

namespace lefcert::certify {

Certificate certify_sample(const scoring::ClassScores& scores,
                           const bounds::BoundTable& table, int budget) {
  if (budget < 0) throw Error(ErrorCode::kInvalidParameter, "negative budget");
  if (table.budget() < budget) {
    throw Error(ErrorCode::kTableTooSmall,
                "table covers T<=" + std::to_string(table.budget()) +
                    ", certification asked for T=" + std::to_string(budget));
  }
  Certificate cert;
  cert.predicted = scores.predicted;
  cert.bound_table = table;
  const auto y = static_cast<std::size_t>(scores.predicted - 1);
  for (int t_pred = 0; t_pred <= budget; ++t_pred) {
    const double up = table.upper[y][static_cast<std::size_t>(t_pred)];
    const auto rest = static_cast<std::size_t>(budget - t_pred);
    for (std::size_t c = 0; c < table.upper.size(); ++c) {
      if (c == y) continue;
      if (!(up < table.lower[c][rest])) {
        cert.failing_split = FailingSplit{t_pred, static_cast<int>(c) + 1};
        return cert;
      }
    }
  }
  cert.certified = true;
  return cert;
}

QueryResult certify_query(const Episode& e, std::size_t query_index,
                          const CertConfig& cfg,
                          const distance::MetricInfo& metric) {
  const auto bundle = scoring::build_score_bundle(e, query_index, metric);
  QueryResult out;
  out.scores = scoring::score_bundle(bundle, cfg);
  out.certificate =
      certify_sample(out.scores, bounds::build_bound_table(bundle, cfg), cfg.budget);
  out.correct = out.scores.predicted == e.queries[query_index].label;
  return out;
}

std::vector<QueryResult> certify_episode(const Episode& e, const CertConfig& cfg) {
  validate_episode(e);
  cfg.validate(e.shots);
  const auto metric = scoring::episode_metric(e, cfg.metric);
  std::vector<QueryResult> out(e.queries.size());
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = certify_query(e, i, cfg, metric);
  });
  return out;
}

std::vector<QueryResult> certify_episode_serial(const Episode& e,
                                                const CertConfig& cfg) {
  validate_episode(e);
  cfg.validate(e.shots);
  const auto metric = scoring::episode_metric(e, cfg.metric);
  std::vector<QueryResult> out;
  out.reserve(e.queries.size());
  for (std::size_t i = 0; i < e.queries.size(); ++i) {
    out.push_back(certify_query(e, i, cfg, metric));
  }
  return out;
}

}  // namespace lefcert::certify
