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

// Episode sampling, synthetic embedding pools and evaluation protocols.
//
// All randomness derives from one root seed through derive_seed(); episode i
// of a run uses derive_seed(seed, i), so results do not depend on how
// episodes are scheduled across threads.

#ifndef LEFCERT_HARNESS_H_
#define LEFCERT_HARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lefcert/types.h"

namespace lefcert::harness {

struct PoolClass {
  std::string name;
  std::vector<Embedding> members;
  Embedding text;
};

struct EmbeddingPool {
  std::vector<PoolClass> classes;
};

struct SyntheticPoolSpec {
  int num_classes = 5;
  int per_class = 20;
  int dim = 16;
  double intra_spread = 0.1;
  double inter_gap = 0.8;
  double text_offset = 0.1;
  std::uint64_t seed = 0;
};

inline constexpr int kMaxAnchorRejections = 10000;

// Per class: a random unit anchor, members normalize(anchor + N(0, spread^2)),
// text normalize(anchor + N(0, offset^2)). Anchors are resampled until every
// pair is at least inter_gap apart in l2. Throws ANCHOR_SAMPLING_FAILED.
EmbeddingPool generate_synthetic_pool(const SyntheticPoolSpec& spec);

// C random classes, K support shots and `queries_per_class` disjoint queries
// per class. Throws POOL_TOO_SMALL.
Episode sample_episode(const EmbeddingPool& pool, int num_classes, int shots,
                       int queries_per_class, std::uint64_t seed);

struct ProtocolOptions {
  int num_classes = 5;
  int shots = 10;
  int episodes = 10;
  int queries_per_class = 1;
  // Certified accuracy is reported for every T in [0, max_budget].
  int max_budget = 0;
  std::uint64_t seed = 0;
};

struct RunMetrics {
  std::string protocol;
  double clean_accuracy = 0.0;
  // certified_accuracy[T] for T = 0..max_budget.
  std::vector<double> certified_accuracy;
  double runtime_seconds = 0.0;
  int episodes = 0;
  std::uint64_t seed = 0;
  // Pooled counts behind the ratios.
  int queries = 0;
  int correct = 0;
  std::vector<int> certified_correct;
};

// Sample-wise certification, pooled over all queries of all episodes.
// `cfg.budget` is ignored; bounds are built up to opts.max_budget.
RunMetrics run_default_protocol(const EmbeddingPool& pool, const CertConfig& cfg,
                                const ProtocolOptions& opts);
RunMetrics run_default_protocol_serial(const EmbeddingPool& pool,
                                       const CertConfig& cfg,
                                       const ProtocolOptions& opts);

// Collective certification per episode under a shared budget.
RunMetrics run_collective_protocol(const EmbeddingPool& pool,
                                   const CertConfig& cfg,
                                   const ProtocolOptions& opts);

enum class Protocol { kDefault, kCollective };

struct SweepRow {
  std::string protocol;
  int budget = 0;
  int trim = 0;
  double lambda = 0.0;
  Metric metric = Metric::kCosine;
  double clean_accuracy = 0.0;
  double certified_accuracy = 0.0;
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;
};

// Cartesian product over trims and lambdas; one row per (M, lambda, T).
std::vector<SweepRow> sweep(const EmbeddingPool& pool, const CertConfig& base,
                            const ProtocolOptions& opts,
                            const std::vector<int>& trims,
                            const std::vector<double>& lambdas,
                            Protocol protocol);

namespace presets {

// All presets trim M = floor((K-1)/2) and start at budget 0.

// Cosine distance, lambda = 25.
CertConfig image(int shots);
// Cosine distance, lambda = 0.7.
CertConfig graph(int shots);
// l2 distance, lambda = 0.4, l2 ball r = 0.1, sigma = 1.0, n = 1000,
// alpha = 0.01.
CertConfig smoothed(int shots);

}  // namespace presets

}  // namespace lefcert::harness

#endif  // LEFCERT_HARNESS_H_
