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

#include <gtest/gtest.h>

#include <set>

#include "lefcert/distance.h"
#include "test_util.h"

namespace lefcert::harness {
namespace {

using testing::config;
using testing::error_of;

SyntheticPoolSpec spec(int classes, int per_class, std::uint64_t seed) {
  SyntheticPoolSpec s;
  s.num_classes = classes;
  s.per_class = per_class;
  s.seed = seed;
  return s;
}

TEST(SyntheticPoolTest, ZeroSpreadPutsMembersOnTheAnchor) {
  SyntheticPoolSpec s = spec(3, 4, 1);
  s.intra_spread = 0.0;
  s.text_offset = 0.0;
  const auto pool = generate_synthetic_pool(s);
  for (const auto& c : pool.classes) {
    for (const auto& m : c.members) {
      EXPECT_EQ(m, c.members.front());
      EXPECT_NEAR(distance::cosine_distance(m, c.text), 0.0, 1e-12);
    }
  }
}

TEST(SyntheticPoolTest, LargeGapGivesNearlyAntipodalAnchors) {
  SyntheticPoolSpec s = spec(2, 1, 2);
  s.intra_spread = 0.0;
  s.inter_gap = 1.95;
  s.dim = 3;
  const auto pool = generate_synthetic_pool(s);
  EXPECT_GE(distance::l2_distance(pool.classes[0].members[0], pool.classes[1].members[0]), 1.95);
}

TEST(SyntheticPoolTest, ImpossibleGapFails) {
  SyntheticPoolSpec s = spec(10, 1, 3);
  s.dim = 2;
  s.inter_gap = 1.9;
  EXPECT_EQ(error_of([&] { generate_synthetic_pool(s); }), ErrorCode::kAnchorSamplingFailed);
}

TEST(SyntheticPoolTest, DeterministicUnderSeed) {
  const auto a = generate_synthetic_pool(spec(3, 5, 9));
  const auto b = generate_synthetic_pool(spec(3, 5, 9));
  ASSERT_EQ(a.classes.size(), b.classes.size());
  for (std::size_t c = 0; c < a.classes.size(); ++c) {
    EXPECT_EQ(a.classes[c].members, b.classes[c].members);
    EXPECT_EQ(a.classes[c].text, b.classes[c].text);
    EXPECT_EQ(a.classes[c].name, "class_" + std::to_string(c + 1));
  }
}

TEST(SampleEpisodeTest, DeterministicDisjointAndShaped) {
  const auto pool = generate_synthetic_pool(spec(6, 20, 4));
  const Episode a = sample_episode(pool, 4, 5, 3, 11);
  const Episode b = sample_episode(pool, 4, 5, 3, 11);
  EXPECT_EQ(a.label_names, b.label_names);
  EXPECT_EQ(a.support, b.support);
  ASSERT_EQ(a.queries.size(), 12u);
  for (std::size_t i = 0; i < a.queries.size(); ++i) {
    EXPECT_EQ(a.queries[i].embedding, b.queries[i].embedding);
    const int label = a.queries[i].label;
    for (const auto& s : a.support[static_cast<std::size_t>(label - 1)]) {
      EXPECT_NE(s, a.queries[i].embedding);
    }
  }
  EXPECT_NO_THROW(validate_episode(a));
  const Episode c = sample_episode(pool, 4, 5, 3, 12);
  EXPECT_NE(a.support, c.support);
}

TEST(SampleEpisodeTest, ProtocolShapes) {
  const auto pool = generate_synthetic_pool(spec(5, 110, 5));
  EXPECT_EQ(sample_episode(pool, 5, 10, 1, 0).queries.size(), 5u);
  EXPECT_EQ(sample_episode(pool, 5, 10, 100, 0).queries.size(), 500u);
  EXPECT_EQ(error_of([&] { sample_episode(pool, 5, 10, 101, 0); }), ErrorCode::kPoolTooSmall);
  EXPECT_EQ(error_of([&] { sample_episode(pool, 6, 1, 1, 0); }), ErrorCode::kPoolTooSmall);
}

ProtocolOptions options(int t, std::uint64_t seed, int qpc = 1) {
  ProtocolOptions o;
  o.max_budget = t;
  o.seed = seed;
  o.queries_per_class = qpc;
  return o;
}

TEST(DefaultProtocolTest, SeparatedPoolIsCleanAndCertified) {
  const auto pool = generate_synthetic_pool(spec(5, 20, 6));
  const auto m = run_default_protocol(pool, presets::image(10), options(2, 1));
  EXPECT_EQ(m.clean_accuracy, 1.0);
  EXPECT_EQ(m.certified_accuracy[0], 1.0);
  EXPECT_EQ(m.certified_accuracy[2], 1.0);
  EXPECT_EQ(m.queries, 50);
}

TEST(DefaultProtocolTest, NothingCertifiedBeyondRegime) {
  const auto pool = generate_synthetic_pool(spec(5, 20, 7));
  const auto m = run_default_protocol(pool, presets::image(10), options(6, 1));
  EXPECT_EQ(m.certified_accuracy[6], 0.0);
}

TEST(DefaultProtocolTest, CollapsedClassesTieToTheFirstLabel) {
  EmbeddingPool pool;
  const Embedding point = distance::normalize(std::vector<double>{1, 2, 3});
  for (int c = 0; c < 4; ++c) {
    pool.classes.push_back({"c" + std::to_string(c), std::vector<Embedding>(12, point), point});
  }
  ProtocolOptions o = options(0, 3, 2);
  o.num_classes = 4;
  o.shots = 5;
  o.episodes = 8;
  const auto m = run_default_protocol(pool, config(1.0, 2, 0), o);
  EXPECT_DOUBLE_EQ(m.clean_accuracy, 0.25);
  EXPECT_EQ(m.certified_accuracy[0], 0.0);
}

TEST(DefaultProtocolTest, MetricsAreMonotoneAndDeterministic) {
  SyntheticPoolSpec s = spec(5, 20, 8);
  s.intra_spread = 0.35;
  s.inter_gap = 0.3;
  const auto pool = generate_synthetic_pool(s);
  const auto cfg = presets::graph(7);
  ProtocolOptions o = options(5, 2, 3);
  o.shots = 7;
  const auto a = run_default_protocol(pool, cfg, o);
  const auto b = run_default_protocol_serial(pool, cfg, o);
  EXPECT_EQ(a.certified_accuracy, b.certified_accuracy);
  EXPECT_EQ(a.clean_accuracy, b.clean_accuracy);
  EXPECT_LE(a.certified_accuracy[0], a.clean_accuracy);
  for (std::size_t t = 1; t < a.certified_accuracy.size(); ++t) {
    EXPECT_LE(a.certified_accuracy[t], a.certified_accuracy[t - 1]);
  }
}

TEST(CollectiveProtocolTest, DominatesSampleWise) {
  SyntheticPoolSpec s = spec(5, 40, 9);
  s.intra_spread = 0.3;
  s.inter_gap = 0.4;
  const auto pool = generate_synthetic_pool(s);
  const auto cfg = presets::image(10);
  const ProtocolOptions o = options(4, 5, 20);
  const auto collective = run_collective_protocol(pool, cfg, o);
  const auto sample = run_default_protocol(pool, cfg, o);
  EXPECT_EQ(collective.clean_accuracy, sample.clean_accuracy);
  EXPECT_EQ(collective.certified_accuracy[0], sample.certified_accuracy[0]);
  for (int t = 0; t <= 4; ++t) {
    EXPECT_GE(collective.certified_accuracy[static_cast<std::size_t>(t)],
              sample.certified_accuracy[static_cast<std::size_t>(t)]);
  }
}

TEST(SweepTest, GridShapeAndZeroLambdaColumn) {
  SyntheticPoolSpec s = spec(5, 20, 10);
  s.intra_spread = 0.3;
  s.inter_gap = 0.4;
  const auto pool = generate_synthetic_pool(s);
  const ProtocolOptions o = options(3, 4);
  const auto rows = sweep(pool, presets::image(10), o, {2, 4}, {0.0, 25.0}, Protocol::kDefault);
  ASSERT_EQ(rows.size(), 2u * 2u * 4u);
  CertConfig fcert = presets::image(10);
  fcert.lambda = 0.0;
  fcert.trim = 4;
  const auto direct = run_default_protocol(pool, fcert, o);
  std::set<int> trims;
  for (const auto& r : rows) {
    trims.insert(r.trim);
    EXPECT_LE(r.trim, max_trim(10));
    if (r.trim == 4 && r.lambda == 0.0) {
      EXPECT_EQ(r.certified_accuracy, direct.certified_accuracy[static_cast<std::size_t>(r.budget)]);
    }
  }
  EXPECT_EQ(trims, (std::set<int>{2, 4}));
  EXPECT_EQ(error_of([&] { sweep(pool, presets::image(10), o, {5}, {0.0}, Protocol::kDefault); }),
            ErrorCode::kMTooLarge);
}

TEST(SweepTest, TextAlignedWithAnchorsHelpsCleanAccuracyOnAverage) {
  double plain = 0.0;
  double blended = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SyntheticPoolSpec s = spec(5, 30, 20 + seed);
    s.intra_spread = 0.35;
    s.inter_gap = 0.3;
    s.text_offset = 0.0;
    const auto pool = generate_synthetic_pool(s);
    ProtocolOptions o = options(0, seed, 5);
    const auto rows = sweep(pool, presets::image(10), o, {4}, {0.0, 0.7, 5.0, 25.0},
                            Protocol::kDefault);
    plain += rows.front().clean_accuracy;
    blended += rows.back().clean_accuracy;
  }
  EXPECT_GT(blended, plain);
}

TEST(PresetsTest, Values) {
  EXPECT_EQ(presets::image(10).lambda, 25.0);
  EXPECT_EQ(presets::image(10).trim, 4);
  EXPECT_EQ(presets::graph(10).lambda, 0.7);
  const auto s = presets::smoothed(10);
  EXPECT_EQ(s.metric, Metric::kL2);
  EXPECT_EQ(s.lambda, 0.4);
  EXPECT_EQ(s.threat.radius, 0.1);
  EXPECT_EQ(s.threat.sigma, 1.0);
  EXPECT_EQ(s.threat.noise_samples, 1000);
  EXPECT_NO_THROW(s.validate(10));
}

}  // namespace
}  // namespace lefcert::harness
