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

#include "lefcert/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "lefcert/certify.h"
#include "lefcert/collective.h"
#include "lefcert/distance.h"
#include "lefcert/error.h"
#include "lefcert/parallel.h"
#include "lefcert/rng.h"

namespace lefcert::harness {
namespace {

std::vector<double> jitter(std::span<const double> center, double scale, Rng& rng) {
  std::vector<double> v(center.begin(), center.end());
  if (scale > 0.0) {
    for (double& x : v) x += scale * rng.normal();
  }
  return v;
}

// Per-episode tallies; summed in episode order after the parallel loop.
struct Tally {
  int queries = 0;
  int correct = 0;
  std::vector<int> certified_correct;
};

Tally default_episode(const EmbeddingPool& pool, const CertConfig& cfg,
                      const ProtocolOptions& opts, std::size_t episode) {
  const Episode e =
      sample_episode(pool, opts.num_classes, opts.shots, opts.queries_per_class,
                     derive_seed(opts.seed, episode));
  CertConfig run = cfg;
  run.budget = opts.max_budget;
  const auto results = certify::certify_episode_serial(e, run);
  Tally t;
  t.certified_correct.assign(static_cast<std::size_t>(opts.max_budget) + 1, 0);
  for (const auto& r : results) {
    ++t.queries;
    if (!r.correct) continue;
    ++t.correct;
    for (int budget = 0; budget <= opts.max_budget; ++budget) {
      const auto cert =
          certify::certify_sample(r.scores, r.certificate.bound_table, budget);
      if (cert.certified) ++t.certified_correct[static_cast<std::size_t>(budget)];
    }
  }
  return t;
}

Tally collective_episode(const EmbeddingPool& pool, const CertConfig& cfg,
                         const ProtocolOptions& opts, std::size_t episode) {
  const Episode e =
      sample_episode(pool, opts.num_classes, opts.shots, opts.queries_per_class,
                     derive_seed(opts.seed, episode));
  CertConfig run = cfg;
  run.budget = opts.max_budget;
  const auto queries = collective::query_bounds(e, run, false);
  std::vector<bool> correct(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    correct[i] = queries[i].predicted == e.queries[i].label;
  }
  Tally t;
  t.queries = static_cast<int>(queries.size());
  t.correct = static_cast<int>(std::count(correct.begin(), correct.end(), true));
  for (int budget = 0; budget <= opts.max_budget; ++budget) {
    const auto r = collective::collective_from_bounds(queries, correct,
                                                      e.num_classes, budget, false);
    t.certified_correct.push_back(r.correct - r.b_max_correct);
  }
  return t;
}

RunMetrics reduce(const std::vector<Tally>& tallies, const ProtocolOptions& opts,
                  std::string protocol) {
  RunMetrics m;
  m.protocol = std::move(protocol);
  m.episodes = opts.episodes;
  m.seed = opts.seed;
  m.certified_correct.assign(static_cast<std::size_t>(opts.max_budget) + 1, 0);
  for (const Tally& t : tallies) {
    m.queries += t.queries;
    m.correct += t.correct;
    for (std::size_t b = 0; b < m.certified_correct.size(); ++b) {
      m.certified_correct[b] += t.certified_correct[b];
    }
  }
  const double n = m.queries > 0 ? static_cast<double>(m.queries) : 1.0;
  m.clean_accuracy = m.correct / n;
  for (int c : m.certified_correct) m.certified_accuracy.push_back(c / n);
  return m;
}

void check_options(const ProtocolOptions& opts) {
  if (opts.episodes < 1 || opts.queries_per_class < 1 || opts.max_budget < 0) {
    throw Error(ErrorCode::kInvalidParameter,
                "protocol needs episodes >= 1, queries >= 1, T >= 0");
  }
}

template <typename EpisodeFn>
RunMetrics run_protocol(const EmbeddingPool& pool, const CertConfig& cfg,
                        const ProtocolOptions& opts, std::string name,
                        bool parallel, EpisodeFn fn) {
  check_options(opts);
  cfg.validate(opts.shots);
  const auto start = std::chrono::steady_clock::now();
  std::vector<Tally> tallies(static_cast<std::size_t>(opts.episodes));
  auto one = [&](std::size_t i) { tallies[i] = fn(pool, cfg, opts, i); };
  if (parallel) {
    parallel_for(tallies.size(), one);
  } else {
    for (std::size_t i = 0; i < tallies.size(); ++i) one(i);
  }
  RunMetrics m = reduce(tallies, opts, std::move(name));
  m.runtime_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return m;
}

}  // namespace

EmbeddingPool generate_synthetic_pool(const SyntheticPoolSpec& spec) {
  if (spec.num_classes < 1 || spec.per_class < 1 || spec.dim < 1 ||
      spec.intra_spread < 0.0 || spec.inter_gap < 0.0 || spec.text_offset < 0.0) {
    throw Error(ErrorCode::kInvalidParameter, "synthetic pool parameters out of range");
  }
  Rng rng(spec.seed);
  const auto dim = static_cast<std::size_t>(spec.dim);
  std::vector<Embedding> anchors;
  int rejections = 0;
  while (static_cast<int>(anchors.size()) < spec.num_classes) {
    std::vector<double> raw(dim);
    for (double& x : raw) x = rng.normal();
    Embedding candidate = distance::normalize(raw);
    bool ok = true;
    for (const auto& a : anchors) {
      if (distance::l2_distance(a, candidate) < spec.inter_gap) {
        ok = false;
        break;
      }
    }
    if (ok) {
      anchors.push_back(std::move(candidate));
    } else if (++rejections >= kMaxAnchorRejections) {
      throw Error(ErrorCode::kAnchorSamplingFailed,
                  "could not place " + std::to_string(spec.num_classes) +
                      " anchors at pairwise distance " +
                      std::to_string(spec.inter_gap));
    }
  }

  EmbeddingPool pool;
  for (int c = 0; c < spec.num_classes; ++c) {
    const auto& anchor = anchors[static_cast<std::size_t>(c)];
    PoolClass pc;
    pc.name = "class_" + std::to_string(c + 1);
    for (int i = 0; i < spec.per_class; ++i) {
      pc.members.push_back(
          distance::normalize(jitter(anchor.values(), spec.intra_spread, rng)));
    }
    pc.text = distance::normalize(jitter(anchor.values(), spec.text_offset, rng));
    pool.classes.push_back(std::move(pc));
  }
  return pool;
}

Episode sample_episode(const EmbeddingPool& pool, int num_classes, int shots,
                       int queries_per_class, std::uint64_t seed) {
  if (num_classes < 1 || shots < 1 || queries_per_class < 0) {
    throw Error(ErrorCode::kInvalidParameter, "episode shape out of range");
  }
  if (static_cast<int>(pool.classes.size()) < num_classes) {
    throw Error(ErrorCode::kPoolTooSmall,
                "pool has " + std::to_string(pool.classes.size()) +
                    " classes, episode needs " + std::to_string(num_classes));
  }
  Rng rng(seed);
  std::vector<std::size_t> order(pool.classes.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  Episode e;
  e.num_classes = num_classes;
  e.shots = shots;
  const auto need = static_cast<std::size_t>(shots + queries_per_class);
  for (int c = 0; c < num_classes; ++c) {
    const PoolClass& pc = pool.classes[order[static_cast<std::size_t>(c)]];
    if (pc.members.size() < need) {
      throw Error(ErrorCode::kPoolTooSmall,
                  "class " + pc.name + " has " + std::to_string(pc.members.size()) +
                      " members, episode needs " + std::to_string(need));
    }
    std::vector<std::size_t> idx(pc.members.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    std::vector<Embedding> support;
    for (int i = 0; i < shots; ++i) {
      support.push_back(pc.members[idx[static_cast<std::size_t>(i)]]);
    }
    e.support.push_back(std::move(support));
    e.text.push_back(pc.text);
    e.label_names.push_back(pc.name);
    for (int j = 0; j < queries_per_class; ++j) {
      e.queries.push_back(
          {pc.members[idx[static_cast<std::size_t>(shots + j)]], c + 1});
    }
  }
  return e;
}

RunMetrics run_default_protocol(const EmbeddingPool& pool, const CertConfig& cfg,
                                const ProtocolOptions& opts) {
  return run_protocol(pool, cfg, opts, "default", true, default_episode);
}

RunMetrics run_default_protocol_serial(const EmbeddingPool& pool,
                                       const CertConfig& cfg,
                                       const ProtocolOptions& opts) {
  return run_protocol(pool, cfg, opts, "default", false, default_episode);
}

RunMetrics run_collective_protocol(const EmbeddingPool& pool,
                                   const CertConfig& cfg,
                                   const ProtocolOptions& opts) {
  return run_protocol(pool, cfg, opts, "collective", true, collective_episode);
}

std::vector<SweepRow> sweep(const EmbeddingPool& pool, const CertConfig& base,
                            const ProtocolOptions& opts,
                            const std::vector<int>& trims,
                            const std::vector<double>& lambdas,
                            Protocol protocol) {
  std::vector<SweepRow> rows;
  for (int trim : trims) {
    for (double lambda : lambdas) {
      CertConfig cfg = base;
      cfg.trim = trim;
      cfg.lambda = lambda;
      const RunMetrics m = protocol == Protocol::kDefault
                               ? run_default_protocol(pool, cfg, opts)
                               : run_collective_protocol(pool, cfg, opts);
      for (int t = 0; t <= opts.max_budget; ++t) {
        rows.push_back({m.protocol, t, trim, lambda, cfg.metric, m.clean_accuracy,
                        m.certified_accuracy[static_cast<std::size_t>(t)],
                        m.runtime_seconds, opts.seed});
      }
    }
  }
  return rows;
}

namespace presets {

CertConfig image(int shots) {
  CertConfig c;
  c.metric = Metric::kCosine;
  c.lambda = 25.0;
  c.trim = max_trim(shots);
  return c;
}

CertConfig graph(int shots) {
  CertConfig c = image(shots);
  c.lambda = 0.7;
  return c;
}

CertConfig smoothed(int shots) {
  CertConfig c;
  c.metric = Metric::kL2;
  c.lambda = 0.4;
  c.trim = max_trim(shots);
  c.threat = ThreatModel::l2_ball(0.1, 1.0, 1000, 0.01);
  return c;
}

}  // namespace presets

}  // namespace lefcert::harness
