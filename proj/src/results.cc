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

#include "lefcert/results.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "lefcert/io.h"

namespace lefcert::results {
namespace {

Json allocation_json(const collective::Allocation& a) {
  Json out = Json::array();
  for (int v : a) out.push_back(v);
  return out;
}

Json findings_json(const std::vector<oracle::Finding>& fs) {
  Json out = Json::array();
  for (const auto& f : fs) {
    Json action;
    action["p_indices"] = f.action.p_indices;
    Json pv = Json::array();
    for (double v : f.action.p_values) pv.push_back(number(v));
    action["p_values"] = pv;
    action["q_indices"] = f.action.q_indices;
    Json qv = Json::array();
    for (double v : f.action.q_values) qv.push_back(number(v));
    action["q_values"] = qv;
    Json j;
    j["trial"] = f.trial;
    j["query"] = f.query;
    j["class"] = f.label;
    j["tc"] = f.tc;
    j["kind"] = f.kind;
    j["value"] = number(f.value);
    j["bound"] = number(f.bound);
    j["action"] = action;
    out.push_back(j);
  }
  return out;
}

// Shortest decimal that reads back to the same double.
std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

Json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json config_json(const CertConfig& cfg) {
  Json j;
  j["metric"] = std::string(metric_name(cfg.metric));
  j["lambda"] = cfg.lambda;
  j["m"] = cfg.trim;
  j["t"] = cfg.budget;
  Json t;
  t["kind"] = std::string(threat_name(cfg.threat.kind));
  if (cfg.threat.kind == ThreatKind::kL2Ball) {
    t["r"] = cfg.threat.radius;
    t["sigma"] = cfg.threat.sigma;
    t["n"] = cfg.threat.noise_samples;
    t["alpha"] = cfg.threat.confidence_alpha;
    t["hoeffding"] = cfg.threat.hoeffding;
  }
  j["threat"] = t;
  return j;
}

Json bound_table_json(const bounds::BoundTable& t) {
  Json upper = Json::array();
  Json lower = Json::array();
  for (std::size_t c = 0; c < t.upper.size(); ++c) {
    Json u = Json::array();
    Json l = Json::array();
    for (double v : t.upper[c]) u.push_back(number(v));
    for (double v : t.lower[c]) l.push_back(number(v));
    upper.push_back(u);
    lower.push_back(l);
  }
  Json j;
  j["upper"] = upper;
  j["lower"] = lower;
  return j;
}

Json certificate_json(const certify::Certificate& c) {
  Json j;
  j["predicted"] = c.predicted;
  j["certified"] = c.certified;
  if (c.failing_split) {
    Json f;
    f["t_pred"] = c.failing_split->t_pred;
    f["class"] = c.failing_split->label;
    j["failing_split"] = f;
  }
  return j;
}

Json run_metrics_json(const harness::RunMetrics& m, bool timing) {
  Json j;
  j["protocol"] = m.protocol;
  j["episodes"] = m.episodes;
  j["seed"] = m.seed;
  j["queries"] = m.queries;
  j["correct"] = m.correct;
  j["clean_accuracy"] = m.clean_accuracy;
  Json acc;
  Json counts;
  for (std::size_t t = 0; t < m.certified_accuracy.size(); ++t) {
    acc[std::to_string(t)] = m.certified_accuracy[t];
    counts[std::to_string(t)] = m.certified_correct[t];
  }
  j["certified_accuracy"] = acc;
  j["certified_correct"] = counts;
  if (timing) j["runtime_seconds"] = m.runtime_seconds;
  return j;
}

Json collective_json(const collective::CollectiveResult& r) {
  Json j;
  j["num_queries"] = r.num_queries;
  j["b_max"] = r.b_max;
  j["worst_allocation"] = allocation_json(r.allocation);
  j["certified_ratio"] = r.certified_ratio;
  j["correct"] = r.correct;
  j["b_max_correct"] = r.b_max_correct;
  j["worst_allocation_correct"] = allocation_json(r.allocation_correct);
  j["certified_accuracy"] = r.certified_accuracy;
  Json broken = Json::array();
  for (bool b : r.per_query_broken) broken.push_back(b);
  j["per_query_broken"] = broken;
  return j;
}

Json oracle_report_json(const oracle::Report& r) {
  Json j;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["grid_steps"] = r.grid_steps;
  j["clean"] = r.clean();
  Json counts;
  counts["instances"] = r.instances;
  counts["cosine_instances"] = r.cosine_instances;
  counts["l2_instances"] = r.l2_instances;
  counts["l2ball_instances"] = r.l2ball_instances;
  counts["cells"] = r.cells;
  counts["l2ball_cells"] = r.l2ball_cells;
  counts["tightness_cells"] = r.tightness_cells;
  counts["tightness_instances"] = r.tightness_instances;
  counts["canonical_min_cells"] = r.canonical_min_cells;
  counts["certified_queries"] = r.certified_queries;
  j["counts"] = counts;
  j["max_tightness_ratio"] = r.max_tightness_ratio;
  j["soundness_violations"] = findings_json(r.soundness_violations);
  j["tightness_failures"] = findings_json(r.tightness_failures);
  j["canonical_min_mismatches"] = findings_json(r.canonical_min_mismatches);
  j["flips"] = findings_json(r.flips);
  return j;
}

Json sweep_json(std::span<const harness::SweepRow> rows, bool timing) {
  Json out = Json::array();
  for (const auto& row : rows) {
    Json j;
    j["protocol"] = row.protocol;
    j["T"] = row.budget;
    j["M"] = row.trim;
    j["lambda"] = row.lambda;
    j["metric"] = std::string(metric_name(row.metric));
    j["clean_acc"] = row.clean_accuracy;
    j["cert_acc"] = row.certified_accuracy;
    if (timing) j["runtime_s"] = row.runtime_seconds;
    j["seed"] = row.seed;
    out.push_back(j);
  }
  return out;
}

std::string sweep_csv(std::span<const harness::SweepRow> rows, bool timing) {
  std::string out = "protocol,T,M,lambda,metric,clean_acc,cert_acc,runtime_s,seed\n";
  for (const auto& row : rows) {
    out += row.protocol + "," + std::to_string(row.budget) + "," +
           std::to_string(row.trim) + "," + csv_number(row.lambda) + "," +
           std::string(metric_name(row.metric)) + "," +
           csv_number(row.clean_accuracy) + "," +
           csv_number(row.certified_accuracy) + "," +
           (timing ? csv_number(row.runtime_seconds) : std::string()) + "," +
           std::to_string(row.seed) + "\n";
  }
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_results(const Json& j, const std::string& path) {
  io::write_file_atomic(path, dump(j));
}

}  // namespace lefcert::results
