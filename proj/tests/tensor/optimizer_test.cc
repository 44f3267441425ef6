/* Copyright 2026 The HetGNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "hetgnn/optimizer.h"

#include <gtest/gtest.h>

#include <cmath>

namespace hetgnn {
namespace {

TEST(AdamTest, FirstStepMovesByLearningRate) {
  ParameterStore params(0, DType::kFloat64);
  params.Create("w", {1}, Initializer::kZeros, true);
  AdamState state;
  AdamStep(params, {{"w", DenseTensor({1}, std::vector<double>{1.0})}}, state, 0.1);
  EXPECT_NEAR(params.Get("w").flat(0), -0.1, 1e-8);
}

TEST(AdamTest, ZeroGradientLeavesValue) {
  ParameterStore params(0, DType::kFloat64);
  params.Create("w", {2}, Initializer::kOnes, true);
  AdamState state;
  AdamStep(params, {{"w", DenseTensor::Zeros({2}, DType::kFloat64)}}, state, 0.1);
  EXPECT_EQ(params.Get("w").ToDoubles(), (std::vector<double>{1, 1}));
}

TEST(AdamTest, MissingGradientIsSkippedAndReported) {
  ParameterStore params(0, DType::kFloat32);
  params.Create("a", {1}, Initializer::kOnes, true);
  params.Create("b", {1}, Initializer::kOnes, true);
  AdamState state;
  auto skipped = AdamStep(params, {{"a", DenseTensor({1}, std::vector<float>{1.0f})}}, state, 0.1);
  ASSERT_EQ(skipped.size(), 1u);
  EXPECT_EQ(skipped[0], "b");
  EXPECT_EQ(params.Get("b").flat(0), 1.0);
  EXPECT_NE(params.Get("a").flat(0), 1.0);
}

TEST(AdamTest, MinimizesQuadratic) {
  ParameterStore params(0, DType::kFloat64);
  params.Create("w", {1}, Initializer::kZeros, true);
  AdamState state;
  for (int i = 0; i < 2000; ++i) {
    const double w = params.Get("w").flat(0);
    AdamStep(params, {{"w", DenseTensor({1}, std::vector<double>{2 * (w - 3)})}}, state, 0.05);
  }
  EXPECT_NEAR(params.Get("w").flat(0), 3.0, 1e-3);
}

TEST(CosineDecayTest, Endpoints) {
  EXPECT_DOUBLE_EQ(CosineDecayLearningRate(0, 100, 0.01), 0.01);
  EXPECT_NEAR(CosineDecayLearningRate(50, 100, 0.01), 0.005, 1e-15);
  EXPECT_NEAR(CosineDecayLearningRate(100, 100, 0.01), 0.0, 1e-15);
  EXPECT_NEAR(CosineDecayLearningRate(200, 100, 0.01), 0.0, 1e-15);
}

TEST(CosineDecayTest, Floor) {
  EXPECT_NEAR(CosineDecayLearningRate(100, 100, 1.0, 0.1), 0.1, 1e-15);
}

TEST(CosineDecayTest, MonotoneNonIncreasing) {
  double prev = 1.0;
  for (int s = 0; s <= 100; ++s) {
    const double lr = CosineDecayLearningRate(s, 100, 1.0);
    EXPECT_LE(lr, prev + 1e-15);
    prev = lr;
  }
}

TEST(ParameterStoreTest, InitDependsOnlyOnSeedAndName) {
  ParameterStore a(5), b(5), c(6);
  a.Create("x", {3, 4}, Initializer::kGlorotUniform, true);
  b.Create("other", {2}, Initializer::kGlorotUniform, true);
  b.Create("x", {3, 4}, Initializer::kGlorotUniform, true);
  c.Create("x", {3, 4}, Initializer::kGlorotUniform, true);
  EXPECT_TRUE(a.Get("x").BitwiseEqual(b.Get("x")));
  EXPECT_FALSE(a.Get("x").BitwiseEqual(c.Get("x")));
  const double limit = std::sqrt(6.0 / 7.0);
  for (double v : a.Get("x").ToDoubles()) EXPECT_LE(std::abs(v), limit);
}

TEST(ParameterStoreTest, DuplicateNameRejected) {
  ParameterStore p;
  p.Create("x", {1}, Initializer::kZeros, false);
  EXPECT_THROW(p.Create("x", {1}, Initializer::kZeros, false), InvalidArgument);
  EXPECT_THROW(p.Set("x", DenseTensor::Zeros({2}, DType::kFloat32)), DimensionError);
}

}  // namespace
}  // namespace hetgnn
