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

// Shared data model: embeddings, few-shot episodes, certification configs and
// the per-query distance statistics every score and bound is computed from.
//
// Class labels carried by these types (Query::label, ClassScores::predicted,
// ...) are 1-based. Function parameters named `c` or `class_index` are
// 0-based positions into per-class vectors.

#ifndef LEFCERT_TYPES_H_
#define LEFCERT_TYPES_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lefcert {

// Unit-norm tolerance for embeddings built in memory.
inline constexpr double kUnitNormTolerance = 1e-6;
// Looser tolerance for rows decoded from binary32 files.
inline constexpr double kWireNormTolerance = 1e-5;

enum class Metric { kCosine, kL2 };
enum class ThreatKind { kUnbounded, kL2Ball };

std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view name);
std::string_view threat_name(ThreatKind k);

class Embedding {
 public:
  Embedding() = default;

  // When `normalized` is set the l2 norm is checked against `tolerance`; a
  // violation throws NORM_VIOLATION. Values are never rescaled here.
  Embedding(std::vector<double> values, bool normalized,
            double tolerance = kUnitNormTolerance);

  std::span<const double> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  bool normalized() const { return normalized_; }
  double norm() const;

  bool operator==(const Embedding&) const = default;

 private:
  std::vector<double> values_;
  bool normalized_ = false;
};

struct Query {
  Embedding embedding;
  // 1-based ground-truth class; 0 marks an unlabeled query.
  int label = 0;
};

struct Episode {
  int num_classes = 0;
  int shots = 0;
  // support[c][i] is shot i of class c.
  std::vector<std::vector<Embedding>> support;
  std::vector<Embedding> text;
  std::vector<Query> queries;
  std::vector<std::string> label_names;
};

// Throws SHAPE_MISMATCH, LABEL_OUT_OF_RANGE or DIM_MISMATCH.
void validate_episode(const Episode& e);

struct ThreatModel {
  ThreatKind kind = ThreatKind::kUnbounded;
  // Input-space l2 radius r.
  double radius = 0.0;
  // Smoothing noise scale.
  double sigma = 0.0;
  // Monte-Carlo sample count behind each smoothed embedding.
  int noise_samples = 0;
  // Failure probability of the Hoeffding interval.
  double confidence_alpha = 0.0;
  // Inflate distances by the Hoeffding deviation. Disable only for ablation.
  bool hoeffding = true;

  static ThreatModel unbounded() { return {}; }
  static ThreatModel l2_ball(double radius, double sigma, int noise_samples,
                             double confidence_alpha);

  void validate() const;
};

struct CertConfig {
  double lambda = 0.0;
  // Number of smallest and largest distances trimmed per class (M).
  int trim = 0;
  Metric metric = Metric::kCosine;
  ThreatModel threat;
  // Total poisoning budget T.
  int budget = 0;

  // Checks every field; `shots` is K of the episode the config is used with.
  void validate(int shots) const;
};

// Largest admissible trim for K shots.
constexpr int max_trim(int shots) { return shots >= 1 ? (shots - 1) / 2 : 0; }

// Sufficient statistics of one query against one episode.
struct ScoreBundle {
  // Query-to-support distances per class, ascending.
  std::vector<std::vector<double>> p;
  // Support-to-text distances per class, ascending.
  std::vector<std::vector<double>> q;
  // The same distances in shot order; p_raw[c][i] and q_raw[c][i] belong to
  // the same support sample.
  std::vector<std::vector<double>> p_raw;
  std::vector<std::vector<double>> q_raw;
  // Query-to-text distance per class.
  std::vector<double> d_text;
  double range_max = 2.0;

  int num_classes() const { return static_cast<int>(p.size()); }
  int shots() const { return p.empty() ? 0 : static_cast<int>(p.front().size()); }
};

}  // namespace lefcert

#endif  // LEFCERT_TYPES_H_
