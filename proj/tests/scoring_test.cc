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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "fcert_reference.h"
#include "lefcert/distance.h"
#include "lefcert/rng.h"
#include "test_util.h"

namespace lefcert::scoring {
namespace {

using testing::config;
using testing::error_of;
using testing::make_bundle;

TEST(TrimmedSumTest, Examples) {
  const std::vector<double> s{0.1, 0.2, 0.3, 0.4, 0.5};
  EXPECT_NEAR(trimmed_sum(s, 1), 0.9, 1e-15);
  EXPECT_NEAR(trimmed_sum(s, 0), 1.5, 1e-15);
  const std::vector<double> constant(5, 0.7);
  for (int m = 0; m <= 2; ++m) EXPECT_NEAR(trimmed_sum(constant, m), (5 - 2 * m) * 0.7, 1e-15);
}

TEST(TrimmedSumTest, RejectsOversizedTrim) {
  const std::vector<double> s{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(error_of([&] { trimmed_sum(s, 2); }), ErrorCode::kMTooLarge);
  EXPECT_EQ(error_of([&] { trimmed_sum(s, -1); }), ErrorCode::kMTooLarge);
}

TEST(TrimmedSumTest, MatchesSortDropSum) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = rng.uniform_int(1, 12);
    const int m = rng.uniform_int(0, max_trim(k));
    std::vector<double> s(static_cast<std::size_t>(k));
    for (double& x : s) x = rng.uniform(0, 2);
    std::vector<double> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> kept(sorted.begin() + m, sorted.end() - m);
    EXPECT_NEAR(trimmed_sum(sorted, m), std::accumulate(kept.begin(), kept.end(), 0.0), 1e-12);
  }
}

TEST(ClassScoreTest, HybridExample) {
  const auto b = make_bundle({{0.1, 0.2, 0.3}}, {{0.0, 0.5, 1.0}}, {0.4});
  EXPECT_NEAR(class_score(b, 0, config(1.0, 1, 0)), 0.4, 1e-15);
  EXPECT_NEAR(class_score(b, 0, config(0.0, 1, 0)), 0.2, 1e-15);
}

TEST(ClassScoreTest, TextTermVanishesWithZeroTextDistance) {
  const auto b = make_bundle({{0.1, 0.2, 0.3}}, {{0.0, 0.5, 1.0}}, {0.0});
  EXPECT_NEAR(class_score(b, 0, config(30.0, 1, 0)), 0.2, 1e-15);
}

TEST(ArgminTest, StrictAndTied) {
  EXPECT_EQ(argmin_label(std::vector<double>{0.4, 0.9}), 1);
  EXPECT_EQ(argmin_label(std::vector<double>{0.9, 0.4}), 2);
  EXPECT_EQ(argmin_label(std::vector<double>{0.5, 0.5}), 1);
}

Embedding unit(std::vector<double> v) { return Embedding(std::move(v), true); }

TEST(BuildScoreBundleTest, SortsPerClassAndKeepsShotOrder) {
  Episode e;
  e.num_classes = 1;
  e.shots = 3;
  // Cosine distances 0.3, 0.1, 0.2 from the query (1, 0).
  auto at = [](double d) { return unit({1 - d, std::sqrt(1 - (1 - d) * (1 - d))}); };
  e.support = {{at(0.3), at(0.1), at(0.2)}};
  e.text = {unit({1, 0})};
  e.queries = {{unit({1, 0}), 1}};
  const auto b = build_score_bundle(e, 0, episode_metric(e, Metric::kCosine));
  ASSERT_EQ(b.p[0].size(), 3u);
  EXPECT_NEAR(b.p[0][0], 0.1, 1e-12);
  EXPECT_NEAR(b.p[0][1], 0.2, 1e-12);
  EXPECT_NEAR(b.p[0][2], 0.3, 1e-12);
  EXPECT_NEAR(b.p_raw[0][0], 0.3, 1e-12);
  EXPECT_NEAR(b.q_raw[0][0], b.p_raw[0][0], 1e-12);
  EXPECT_DOUBLE_EQ(b.d_text[0], 0.0);
  EXPECT_EQ(b.range_max, 2.0);
}

TEST(BuildScoreBundleTest, SingleShotAndCoincidentPoints) {
  Episode e;
  e.num_classes = 1;
  e.shots = 1;
  e.support = {{unit({0, 1})}};
  e.text = {unit({0, 1})};
  e.queries = {{unit({0, 1}), 1}};
  const auto b = build_score_bundle(e, 0, episode_metric(e, Metric::kCosine));
  EXPECT_EQ(b.p[0], b.p_raw[0]);
  EXPECT_EQ(b.p[0][0], 0.0);
  EXPECT_EQ(b.q[0][0], 0.0);
  EXPECT_EQ(b.d_text[0], 0.0);
}

TEST(EpisodeMetricTest, L2RangeDependsOnUnitBall) {
  Episode e = testing::random_episode(1, 2, 3, 1);
  EXPECT_EQ(episode_metric(e, Metric::kL2).range_max, 2.0);
  e.queries[0].embedding = Embedding({3.0, 0, 0, 0, 0, 0, 0, 0}, false);
  EXPECT_TRUE(std::isinf(episode_metric(e, Metric::kL2).range_max));
}

TEST(PredictTest, QueryAtClassCentroidIsAssignedToThatClass) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Episode e = testing::random_episode(seed, 4, 5, 1, 16, 0.05, 1.0);
    std::vector<double> centroid(16, 0.0);
    for (const auto& x : e.support[1]) {
      for (std::size_t j = 0; j < 16; ++j) centroid[j] += x.values()[j];
    }
    e.queries = {{distance::normalize(centroid), 2}};
    EXPECT_EQ(predict(e, 0, config(1.0, 2, 0)).predicted, 2);
  }
}

TEST(ScorePropertyTest, ShotPermutationLeavesScoresUnchanged) {
  Rng rng(8);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Episode e = testing::random_episode(seed, 3, 6, 2);
    const CertConfig cfg = config(rng.uniform(0, 30), rng.uniform_int(0, 2), 0);
    const auto before = predict(e, 1, cfg);
    for (auto& shots : e.support) rng.shuffle(shots);
    const auto after = predict(e, 1, cfg);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(before.scores[c], after.scores[c], 1e-12);
    EXPECT_EQ(before.predicted, after.predicted);
  }
}

TEST(ScorePropertyTest, MonotoneInEveryDistance) {
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = rng.uniform_int(1, 7);
    const int m = rng.uniform_int(0, max_trim(k));
    std::vector<double> p(static_cast<std::size_t>(k)), q(p.size());
    for (double& x : p) x = rng.uniform(0, 2);
    for (double& x : q) x = rng.uniform(0, 2);
    const double d = rng.uniform(0, 2);
    const CertConfig cfg = config(rng.uniform(0, 5), m, 0);
    const double base = class_score(make_bundle({p}, {q}, {d}), 0, cfg);
    const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(k)));
    const double step = rng.uniform(0, 0.5);
    auto p2 = p;
    p2[i] += step;
    auto q2 = q;
    q2[i] += step;
    EXPECT_GE(class_score(make_bundle({p2}, {q}, {d}), 0, cfg), base - 1e-12);
    EXPECT_GE(class_score(make_bundle({p}, {q2}, {d}), 0, cfg), base - 1e-12);
    EXPECT_GE(class_score(make_bundle({p}, {q}, {d + step}), 0, cfg), base - 1e-12);
    EXPECT_GE(base, 0.0);
  }
}

TEST(ScorePropertyTest, ZeroLambdaAgreesWithTrimmedPrototypeReference) {
  Rng rng(10);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int k = rng.uniform_int(1, 8);
    const Metric metric = rng.uniform() < 0.5 ? Metric::kCosine : Metric::kL2;
    const Episode e = testing::random_episode(seed, 3, k, 2, 6, 0.5, 0.3);
    const CertConfig cfg = config(0.0, rng.uniform_int(0, max_trim(k)), 0, metric);
    for (std::size_t qi = 0; qi < e.queries.size(); ++qi) {
      const auto ref = testing::fcert::certify(e, qi, cfg.trim, 0, metric, 2.0);
      EXPECT_EQ(predict(e, qi, cfg).predicted, ref.predicted);
    }
  }
}

TEST(ScoreBundleTest, ReportsAlphaDiagnostic) {
  const auto b = make_bundle({{0.1, 0.2, 0.3}, {0.5, 0.5, 0.5}}, {{0.0, 0.5, 1.0}, {0, 0, 0}},
                             {0.4, 0.1});
  const auto s = score_bundle(b, config(2.0, 1, 0));
  EXPECT_NEAR(s.alpha[0], 2.0 * 0.5, 1e-15);
  EXPECT_EQ(s.alpha[1], 0.0);
  // R^1 = 0.2 + 1.0 * 0.4 = 0.6 against R^2 = 0.5: the text term decides.
  EXPECT_NEAR(s.scores[0], 0.6, 1e-15);
  EXPECT_EQ(s.predicted, 2);
}

}  // namespace
}  // namespace lefcert::scoring
