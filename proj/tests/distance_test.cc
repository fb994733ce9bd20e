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

#include "lefcert/distance.h"

#include <gtest/gtest.h>

#include <cmath>

#include "lefcert/rng.h"
#include "test_util.h"

namespace lefcert::distance {
namespace {

using testing::error_of;

Embedding unit(std::vector<double> v) { return Embedding(std::move(v), true); }

Embedding random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal();
  return normalize(v);
}

TEST(CosineDistanceTest, CanonicalAngles) {
  EXPECT_DOUBLE_EQ(cosine_distance(unit({1, 0}), unit({1, 0})), 0.0);
  EXPECT_DOUBLE_EQ(cosine_distance(unit({1, 0}), unit({-1, 0})), 2.0);
  EXPECT_DOUBLE_EQ(cosine_distance(unit({1, 0}), unit({0, 1})), 1.0);
}

TEST(CosineDistanceTest, Errors) {
  const Embedding zero({0.0, 0.0}, false);
  EXPECT_EQ(error_of([&] { cosine_distance(zero, unit({1, 0})); }), ErrorCode::kZeroVector);
  EXPECT_EQ(error_of([] { cosine_distance(unit({1, 0}), unit({1, 0, 0})); }),
            ErrorCode::kDimMismatch);
}

TEST(CosineDistanceTest, ClampedForNearlyParallelVectors) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Embedding a = random_unit(rng, 16);
    const double d = cosine_distance(a, a);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1e-12);
  }
}

TEST(L2DistanceTest, CanonicalAngles) {
  EXPECT_DOUBLE_EQ(l2_distance(unit({1, 0}), unit({1, 0})), 0.0);
  EXPECT_NEAR(l2_distance(unit({1, 0}), unit({0, 1})), 1.41421356, 1e-8);
  EXPECT_DOUBLE_EQ(l2_distance(unit({1, 0}), unit({-1, 0})), 2.0);
  EXPECT_EQ(error_of([] { l2_distance(unit({1, 0}), unit({1, 0, 0})); }),
            ErrorCode::kDimMismatch);
}

TEST(NormalizeTest, Examples) {
  const Embedding e = normalize(std::vector<double>{3, 4});
  EXPECT_TRUE(e.normalized());
  EXPECT_DOUBLE_EQ(e.values()[0], 0.6);
  EXPECT_DOUBLE_EQ(e.values()[1], 0.8);
  EXPECT_EQ(normalize(std::vector<double>{1, 0, 0}), unit({1, 0, 0}));
  EXPECT_EQ(error_of([] { normalize(std::vector<double>{0, 0}); }), ErrorCode::kZeroVector);
}

TEST(MetricInfoTest, Ranges) {
  EXPECT_EQ(metric_info(Metric::kCosine, false).range_max, 2.0);
  EXPECT_EQ(metric_info(Metric::kL2, true).range_max, 2.0);
  EXPECT_TRUE(std::isinf(metric_info(Metric::kL2, false).range_max));
}

TEST(DistancePropertyTest, SymmetryRangeAndIdentity) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t dim = 2 + rng.below(14);
    const Embedding a = random_unit(rng, dim);
    const Embedding b = random_unit(rng, dim);
    const double cos = cosine_distance(a, b);
    const double l2 = l2_distance(a, b);
    EXPECT_EQ(cos, cosine_distance(b, a));
    EXPECT_EQ(l2, l2_distance(b, a));
    EXPECT_GE(cos, 0.0);
    EXPECT_LE(cos, 2.0);
    EXPECT_GE(l2, 0.0);
    EXPECT_LE(l2, 2.0);
    EXPECT_NEAR(l2 * l2, 2.0 * cos, 1e-9);
    EXPECT_EQ(distance(Metric::kCosine, a, b), cos);
    EXPECT_EQ(distance(Metric::kL2, a, b), l2);
  }
}

}  // namespace
}  // namespace lefcert::distance
