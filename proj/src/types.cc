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

#include "lefcert/types.h"

#include <cmath>
#include <numeric>

#include "lefcert/error.h"

namespace lefcert {

std::string_view metric_name(Metric m) {
  return m == Metric::kCosine ? "cosine" : "l2";
}

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::kCosine;
  if (name == "l2") return Metric::kL2;
  throw Error(ErrorCode::kInvalidParameter,
              "unknown metric '" + std::string(name) + "'");
}

std::string_view threat_name(ThreatKind k) {
  return k == ThreatKind::kUnbounded ? "unbounded" : "l2ball";
}

Embedding::Embedding(std::vector<double> values, bool normalized,
                     double tolerance)
    : values_(std::move(values)), normalized_(normalized) {
  if (normalized_) {
    const double n = norm();
    if (!(std::abs(n - 1.0) <= tolerance)) {
      throw Error(ErrorCode::kNormViolation,
                  "embedding flagged normalized has norm " + std::to_string(n));
    }
  }
}

double Embedding::norm() const {
  return std::sqrt(std::inner_product(values_.begin(), values_.end(),
                                      values_.begin(), 0.0));
}

void validate_episode(const Episode& e) {
  if (e.num_classes < 1 || e.shots < 1) {
    throw Error(ErrorCode::kShapeMismatch, "episode needs C >= 1 and K >= 1");
  }
  const auto classes = static_cast<std::size_t>(e.num_classes);
  if (e.support.size() != classes || e.text.size() != classes) {
    throw Error(ErrorCode::kShapeMismatch,
                "support/text must have one entry per class");
  }
  if (!e.label_names.empty() && e.label_names.size() != classes) {
    throw Error(ErrorCode::kShapeMismatch, "label_names must have C entries");
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (e.support[c].size() != static_cast<std::size_t>(e.shots)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "class " + std::to_string(c + 1) + " has " +
                      std::to_string(e.support[c].size()) + " shots, expected " +
                      std::to_string(e.shots));
    }
  }
  const std::size_t dim = e.support[0][0].dim();
  if (dim == 0) throw Error(ErrorCode::kDimMismatch, "zero-dimensional embedding");
  auto check_dim = [dim](const Embedding& x, const char* what) {
    if (x.dim() != dim) {
      throw Error(ErrorCode::kDimMismatch,
                  std::string(what) + " has dim " + std::to_string(x.dim()) +
                      ", expected " + std::to_string(dim));
    }
  };
  for (const auto& shots : e.support) {
    for (const auto& x : shots) check_dim(x, "support embedding");
  }
  for (const auto& t : e.text) check_dim(t, "text embedding");
  for (const auto& q : e.queries) {
    check_dim(q.embedding, "query embedding");
    if (q.label < 0 || q.label > e.num_classes) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "query label " + std::to_string(q.label) + " outside [1," +
                      std::to_string(e.num_classes) + "]");
    }
  }
}

ThreatModel ThreatModel::l2_ball(double radius, double sigma,
                                 int noise_samples, double confidence_alpha) {
  ThreatModel t;
  t.kind = ThreatKind::kL2Ball;
  t.radius = radius;
  t.sigma = sigma;
  t.noise_samples = noise_samples;
  t.confidence_alpha = confidence_alpha;
  return t;
}

void ThreatModel::validate() const {
  if (kind == ThreatKind::kUnbounded) return;
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kInvalidParameter, "l2ball radius must be >= 0");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kNonpositiveSigma, "l2ball sigma must be > 0");
  }
  if (noise_samples < 1) {
    throw Error(ErrorCode::kInvalidParameter, "l2ball needs n >= 1 noise samples");
  }
  if (!(confidence_alpha > 0.0 && confidence_alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "l2ball alpha must be in (0,1)");
  }
}

void CertConfig::validate(int shots) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidParameter, "lambda must be finite and >= 0");
  }
  if (trim < 0) throw Error(ErrorCode::kInvalidParameter, "M must be >= 0");
  if (trim > max_trim(shots)) {
    throw Error(ErrorCode::kMTooLarge,
                "M=" + std::to_string(trim) + " exceeds floor((K-1)/2)=" +
                    std::to_string(max_trim(shots)) + " for K=" +
                    std::to_string(shots));
  }
  if (budget < 0) throw Error(ErrorCode::kInvalidParameter, "T must be >= 0");
  threat.validate();
  if (threat.kind == ThreatKind::kL2Ball && metric != Metric::kL2) {
    throw Error(ErrorCode::kMetricThreatMismatch,
                "the l2ball threat model requires the l2 metric");
  }
}

}  // namespace lefcert
