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
#include "hetgnn/autodiff.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hetgnn/ops.h"
#include "testing/gradient_check.h"
#include "testing/random.h"

namespace hetgnn {
namespace {

using ::hetgnn::testing::CheckGradients;
using ::hetgnn::testing::RandomIndices;
using ::hetgnn::testing::RandomTensor;
using Inputs = std::map<std::string, Tensor>;

constexpr double kTolerance = 1e-4;

DenseTensor D(Shape shape, std::vector<double> v) { return DenseTensor(std::move(shape), std::move(v)); }

TEST(TapeTest, SquareGradient) {
  Tape tape;
  Tensor w = tape.Watch("w", D({1}, {3}));
  auto grads = tape.Backward(Sum(Multiply(w, w)));
  EXPECT_DOUBLE_EQ(grads.at("w").flat(0), 6.0);
}

TEST(TapeTest, DotProductGradients) {
  Tape tape;
  Tensor x = tape.Watch("x", D({1, 2}, {1, 2}));
  Tensor w = tape.Watch("w", D({2, 1}, {3, 4}));
  auto grads = tape.Backward(Sum(Linear(x, w)));
  EXPECT_EQ(grads.at("w").ToDoubles(), (std::vector<double>{1, 2}));
  EXPECT_EQ(grads.at("x").ToDoubles(), (std::vector<double>{3, 4}));
}

TEST(TapeTest, ReluAtZeroHasZeroGradient) {
  Tape tape;
  Tensor x = tape.Watch("x", D({1}, {0}));
  EXPECT_EQ(tape.Backward(Sum(Relu(x))).at("x").flat(0), 0.0);
}

TEST(TapeTest, SharedWeightsAccumulate) {
  Tape tape;
  Tensor a = tape.Watch("w", D({1}, {2}));
  Tensor b = tape.Watch("w", D({1}, {2}));
  // d/dw (w + w) = 2 because both watches are the same node.
  EXPECT_DOUBLE_EQ(tape.Backward(Sum(Add(a, b))).at("w").flat(0), 2.0);
}

TEST(TapeTest, UnreachedLeafHasNoGradient) {
  Tape tape;
  Tensor a = tape.Watch("a", D({1}, {2}));
  tape.Watch("unused", D({1}, {5}));
  auto grads = tape.Backward(Sum(a));
  EXPECT_EQ(grads.count("unused"), 0u);
  EXPECT_EQ(grads.count("a"), 1u);
}

TEST(TapeTest, ConstantsAreNotRecorded) {
  Tensor x = Add(Tensor(D({1}, {1})), Tensor(D({1}, {2})));
  EXPECT_FALSE(x.recorded());
  EXPECT_EQ(x.value().flat(0), 3.0);
}

TEST(GradientCheckTest, LinearWithBias) {
  std::mt19937_64 gen(1);
  auto r = CheckGradients(
      [](const Inputs& in) {
        return SumSquares(Linear(in.at("x"), in.at("w"), in.at("b")));
      },
      {{"x", RandomTensor(gen, {4, 3}, DType::kFloat64)},
       {"w", RandomTensor(gen, {3, 2}, DType::kFloat64)},
       {"b", RandomTensor(gen, {2}, DType::kFloat64)}});
  EXPECT_LT(r.max_relative_error, kTolerance) << r.worst_input;
}

TEST(GradientCheckTest, Activations) {
  std::mt19937_64 gen(2);
  for (auto kind : {ActivationKind::kRelu, ActivationKind::kLeakyRelu, ActivationKind::kSigmoid,
                    ActivationKind::kIdentity}) {
    auto r = CheckGradients(
        [kind](const Inputs& in) { return SumSquares(Activate(in.at("x"), {kind, 0.2})); },
        {{"x", RandomTensor(gen, {5, 3}, DType::kFloat64)}});
    EXPECT_LT(r.max_relative_error, kTolerance);
  }
  auto r = CheckGradients(
      [](const Inputs& in) {
        return SumSquares(Activate(in.at("x"), {ActivationKind::kLog1p}));
      },
      {{"x", RandomTensor(gen, {5, 3}, DType::kFloat64, 0.1, 3.0)}});
  EXPECT_LT(r.max_relative_error, kTolerance);
}

TEST(GradientCheckTest, SegmentReductions) {
  std::mt19937_64 gen(3);
  auto ids = RandomIndices(gen, 12, 4);
  for (auto type : {ReduceType::kSum, ReduceType::kMean, ReduceType::kMax, ReduceType::kMin}) {
    auto r = CheckGradients(
        [&](const Inputs& in) {
          return SumSquares(SegmentReduce(in.at("x"), ids, 5, type));
        },
        {{"x", RandomTensor(gen, {12, 2}, DType::kFloat64)}});
    EXPECT_LT(r.max_relative_error, kTolerance) << ReduceTypeName(type);
  }
}

TEST(GradientCheckTest, SegmentSoftmaxAndGather) {
  std::mt19937_64 gen(4);
  auto ids = RandomIndices(gen, 10, 3);
  auto gather = RandomIndices(gen, 7, 10);
  auto r = CheckGradients(
      [&](const Inputs& in) {
        Tensor s = SegmentSoftmax(in.at("x"), ids, 3);
        return SumSquares(Multiply(GatherRows(s, gather), GatherRows(in.at("y"), gather)));
      },
      {{"x", RandomTensor(gen, {10, 2}, DType::kFloat64)},
       {"y", RandomTensor(gen, {10, 2}, DType::kFloat64)}});
  EXPECT_LT(r.max_relative_error, kTolerance) << r.worst_input;
}

TEST(GradientCheckTest, LayerNormAndConcat) {
  std::mt19937_64 gen(5);
  auto r = CheckGradients(
      [](const Inputs& in) {
        std::vector<Tensor> parts{in.at("a"), in.at("b")};
        Tensor x = ConcatLast(parts);
        Tensor y = LayerNorm(x, in.at("gamma"), in.at("beta"));
        return Sum(Multiply(y, in.at("c")));
      },
      {{"a", RandomTensor(gen, {3, 2}, DType::kFloat64)},
       {"b", RandomTensor(gen, {3, 3}, DType::kFloat64)},
       {"gamma", RandomTensor(gen, {5}, DType::kFloat64)},
       {"beta", RandomTensor(gen, {5}, DType::kFloat64)},
       {"c", RandomTensor(gen, {3, 5}, DType::kFloat64)}});
  EXPECT_LT(r.max_relative_error, kTolerance) << r.worst_input;
}

TEST(GradientCheckTest, HeadOpsAndScaling) {
  std::mt19937_64 gen(6);
  std::vector<double> factors{0.5, 2.0, -1.0, 3.0};
  auto r = CheckGradients(
      [&](const Inputs& in) {
        Tensor logits = HeadDot(in.at("x"), in.at("k"));      // [4, 2]
        Tensor scaled = ScaleHeads(in.at("x"), logits);       // [4, 6]
        std::vector<Tensor> terms{ScaleRows(scaled, factors), Scale(in.at("x"), 0.3)};
        return SumSquares(AddN(terms));
      },
      {{"x", RandomTensor(gen, {4, 6}, DType::kFloat64)},
       {"k", RandomTensor(gen, {3, 2}, DType::kFloat64)}});
  EXPECT_LT(r.max_relative_error, kTolerance) << r.worst_input;
}

TEST(GradientCheckTest, CrossEntropies) {
  std::mt19937_64 gen(7);
  std::vector<int64_t> labels{0, 2, 1, 2};
  std::vector<double> weights{1, 1, 0, 1};
  auto r = CheckGradients(
      [&](const Inputs& in) { return SoftmaxCrossEntropy(in.at("z"), labels, weights); },
      {{"z", RandomTensor(gen, {4, 3}, DType::kFloat64)}});
  EXPECT_LT(r.max_relative_error, kTolerance);
  std::vector<int64_t> binary{0, 1, 1, 0};
  r = CheckGradients(
      [&](const Inputs& in) { return SigmoidCrossEntropy(in.at("z"), binary, weights); },
      {{"z", RandomTensor(gen, {4, 1}, DType::kFloat64)}});
  EXPECT_LT(r.max_relative_error, kTolerance);
}

TEST(GradientCheckTest, DropoutWithFixedMask) {
  std::mt19937_64 gen(8);
  auto r = CheckGradients(
      [](const Inputs& in) {
        RngStream rng(3, "dropout");
        return SumSquares(Dropout(in.at("x"), 0.4, true, rng));
      },
      {{"x", RandomTensor(gen, {6, 4}, DType::kFloat64)}});
  EXPECT_LT(r.max_relative_error, kTolerance);
}

}  // namespace
}  // namespace hetgnn
