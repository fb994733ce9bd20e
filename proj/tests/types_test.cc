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

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.h"

namespace lefcert {
namespace {

using testing::error_of;

Embedding unit(std::vector<double> v) { return Embedding(std::move(v), true); }

Episode small_episode() {
  Episode e;
  e.num_classes = 2;
  e.shots = 3;
  for (int c = 0; c < 2; ++c) {
    std::vector<Embedding> shots;
    for (int i = 0; i < 3; ++i) shots.push_back(unit({c == 0 ? 1.0 : 0.0, c == 0 ? 0.0 : 1.0, 0, 0}));
    e.support.push_back(shots);
    e.text.push_back(unit({0, 0, 1, 0}));
  }
  e.queries.push_back({unit({1, 0, 0, 0}), 1});
  e.queries.push_back({unit({0, 1, 0, 0}), 2});
  e.label_names = {"a", "b"};
  return e;
}

TEST(EmbeddingTest, NormalizedFlagChecksNorm) {
  EXPECT_NO_THROW(unit({0.6, 0.8}));
  EXPECT_EQ(error_of([] { unit({0.6, 0.81}); }), ErrorCode::kNormViolation);
  EXPECT_NO_THROW(Embedding({3.0, 4.0}, false));
  EXPECT_DOUBLE_EQ(Embedding({3.0, 4.0}, false).norm(), 5.0);
}

TEST(EmbeddingTest, NanNeverPassesTheNormCheck) {
  EXPECT_EQ(error_of([] { unit({std::nan(""), 0.0}); }), ErrorCode::kNormViolation);
}

TEST(ValidateEpisodeTest, AcceptsWellFormedEpisode) {
  EXPECT_NO_THROW(validate_episode(small_episode()));
}

TEST(ValidateEpisodeTest, RejectsLabelBeyondClassCount) {
  Episode e = small_episode();
  e.queries[0].label = 3;
  EXPECT_EQ(error_of([&] { validate_episode(e); }), ErrorCode::kLabelOutOfRange);
}

TEST(ValidateEpisodeTest, RejectsRaggedSupport) {
  Episode e = small_episode();
  e.support[0].pop_back();
  EXPECT_EQ(error_of([&] { validate_episode(e); }), ErrorCode::kShapeMismatch);
}

TEST(ValidateEpisodeTest, RejectsDimensionMismatch) {
  Episode e = small_episode();
  e.text[1] = unit({1, 0, 0});
  EXPECT_EQ(error_of([&] { validate_episode(e); }), ErrorCode::kDimMismatch);
}

TEST(ValidateEpisodeTest, UnlabeledQueryIsAccepted) {
  Episode e = small_episode();
  e.queries[0].label = 0;
  EXPECT_NO_THROW(validate_episode(e));
}

TEST(ValidateEpisodeTest, AcceptsEveryGeneratedEpisode) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_NO_THROW(validate_episode(testing::random_episode(seed, 3, 4, 2)));
  }
}

TEST(CertConfigTest, TrimLimit) {
  EXPECT_EQ(max_trim(10), 4);
  EXPECT_EQ(max_trim(5), 2);
  EXPECT_EQ(max_trim(1), 0);
  CertConfig c = testing::config(1.0, 4, 0);
  EXPECT_NO_THROW(c.validate(10));
  c.trim = 5;
  EXPECT_EQ(error_of([&] { c.validate(10); }), ErrorCode::kMTooLarge);
}

TEST(CertConfigTest, RejectsNegativeValues) {
  EXPECT_EQ(error_of([] { testing::config(-1.0, 0, 0).validate(3); }),
            ErrorCode::kInvalidParameter);
  EXPECT_EQ(error_of([] { testing::config(1.0, 0, -1).validate(3); }),
            ErrorCode::kInvalidParameter);
}

TEST(CertConfigTest, BallThreatNeedsL2) {
  CertConfig c = testing::config(0.4, 1, 1, Metric::kCosine);
  c.threat = ThreatModel::l2_ball(0.1, 1.0, 1000, 0.01);
  EXPECT_EQ(error_of([&] { c.validate(5); }), ErrorCode::kMetricThreatMismatch);
  c.metric = Metric::kL2;
  EXPECT_NO_THROW(c.validate(5));
}

TEST(ThreatModelTest, ValidatesBallParameters) {
  EXPECT_EQ(error_of([] { ThreatModel::l2_ball(0.1, 0.0, 10, 0.1).validate(); }),
            ErrorCode::kNonpositiveSigma);
  EXPECT_EQ(error_of([] { ThreatModel::l2_ball(0.1, 1.0, 0, 0.1).validate(); }),
            ErrorCode::kInvalidParameter);
  EXPECT_EQ(error_of([] { ThreatModel::l2_ball(0.1, 1.0, 10, 1.0).validate(); }),
            ErrorCode::kInvalidParameter);
  EXPECT_EQ(error_of([] { ThreatModel::l2_ball(-0.1, 1.0, 10, 0.5).validate(); }),
            ErrorCode::kInvalidParameter);
  EXPECT_NO_THROW(ThreatModel::l2_ball(0.0, 1.0, 10, 0.5).validate());
}

TEST(MetricTest, NamesRoundTrip) {
  EXPECT_EQ(parse_metric(metric_name(Metric::kCosine)), Metric::kCosine);
  EXPECT_EQ(parse_metric(metric_name(Metric::kL2)), Metric::kL2);
  EXPECT_EQ(error_of([] { parse_metric("manhattan"); }), ErrorCode::kInvalidParameter);
}

TEST(ErrorTest, MessageStartsWithCodeName) {
  const Error e(ErrorCode::kMTooLarge, "M=5, K=10");
  EXPECT_EQ(std::string(e.what()), "M_TOO_LARGE: M=5, K=10");
  EXPECT_TRUE(is_io_error(ErrorCode::kBadMagic));
  EXPECT_FALSE(is_io_error(ErrorCode::kMTooLarge));
}

}  // namespace
}  // namespace lefcert
