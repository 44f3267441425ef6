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
#include "hetgnn/ops.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "testing/random.h"

namespace hetgnn {
namespace {

using ::hetgnn::testing::RandomIndices;
using ::hetgnn::testing::RandomTensor;

DenseTensor F32(Shape shape, std::vector<float> v) { return DenseTensor(std::move(shape), std::move(v)); }

void ExpectValues(const Tensor& t, const Shape& shape, const std::vector<double>& expected,
                  double tol = 0.0) {
  ASSERT_EQ(t.shape(), shape);
  const auto got = t.value().ToDoubles();
  ASSERT_EQ(got.size(), expected.size());
  for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], tol) << "at " << i;
}

TEST(LinearTest, IdentityWeights) {
  ExpectValues(Linear(F32({1, 2}, {1, 2}), F32({2, 2}, {1, 0, 0, 1})), {1, 2}, {1, 2});
}

TEST(LinearTest, ZeroWeightsWithBias) {
  ExpectValues(Linear(F32({1, 2}, {1, 2}), F32({2, 2}, {0, 0, 0, 0}), Tensor(F32({2}, {3, 4}))),
               {1, 2}, {3, 4});
}

TEST(LinearTest, HandMultiply) {
  ExpectValues(Linear(F32({2, 2}, {1, 2, 3, 4}), F32({2, 1}, {1, 1}), Tensor(F32({1}, {0}))),
               {2, 1}, {3, 7});
}

TEST(LinearTest, ShapeMismatchNamesBothShapes) {
  try {
    Linear(F32({1, 3}, {1, 2, 3}), F32({2, 2}, {1, 0, 0, 1}));
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("[1, 3]"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("[2, 2]"), std::string::npos);
  }
}

TEST(ActivationTest, Relu) {
  ExpectValues(Relu(F32({3}, {-1, 0, 2})), {3}, {0, 0, 2});
}

TEST(ActivationTest, LeakyRelu) {
  ExpectValues(Activate(F32({2}, {-1, 2}), {ActivationKind::kLeakyRelu, 0.2}), {2}, {-0.2, 2},
               1e-7);
}

TEST(ActivationTest, Log1pOfZero) {
  ExpectValues(Activate(F32({1}, {0}), {ActivationKind::kLog1p}), {1}, {0});
}

TEST(ActivationTest, ParseNames) {
  EXPECT_EQ(Activation::Parse("relu").kind, ActivationKind::kRelu);
  EXPECT_EQ(Activation::Parse("leaky_relu").alpha, 0.2);
  EXPECT_THROW(Activation::Parse("swishy"), InvalidArgument);
}

TEST(ConcatTest, Examples) {
  std::vector<Tensor> a{F32({1, 1}, {1}), F32({1, 1}, {2})};
  ExpectValues(ConcatLast(a), {1, 2}, {1, 2});
  std::vector<Tensor> b{F32({1, 2}, {1, 2}), F32({1, 1}, {3})};
  ExpectValues(ConcatLast(b), {1, 3}, {1, 2, 3});
  std::vector<Tensor> c{F32({2, 1}, {1, 2}), F32({2, 1}, {3, 4})};
  ExpectValues(ConcatLast(c), {2, 2}, {1, 3, 2, 4});
}

TEST(ConcatTest, RowMismatch) {
  std::vector<Tensor> parts{F32({1, 1}, {1}), F32({2, 1}, {2, 3})};
  EXPECT_THROW(ConcatLast(parts), DimensionError);
}

TEST(SegmentReduceTest, Sum) {
  std::vector<int64_t> ids{0, 0, 1};
  ExpectValues(SegmentReduce(F32({3, 1}, {1, 2, 3}), ids, 2, ReduceType::kSum), {2, 1}, {3, 3});
}

TEST(SegmentReduceTest, MeanWithEmptySegment) {
  std::vector<int64_t> ids{0, 0, 1};
  ExpectValues(SegmentReduce(F32({3, 1}, {1, 2, 3}), ids, 3, ReduceType::kMean), {3, 1},
               {1.5, 3, 0});
}

TEST(SegmentReduceTest, MaxSingleton) {
  std::vector<int64_t> ids{0};
  ExpectValues(SegmentReduce(F32({1, 1}, {5}), ids, 1, ReduceType::kMax), {1, 1}, {5});
}

TEST(SegmentReduceTest, EmptySegmentsAreZeroForMaxAndMin) {
  std::vector<int64_t> ids{1};
  ExpectValues(SegmentReduce(F32({1, 1}, {-4}), ids, 2, ReduceType::kMax), {2, 1}, {0, -4});
  ExpectValues(SegmentReduce(F32({1, 1}, {4}), ids, 2, ReduceType::kMin), {2, 1}, {0, 4});
}

TEST(SegmentReduceTest, OutOfRangeId) {
  std::vector<int64_t> ids{0, 2};
  EXPECT_THROW(SegmentReduce(F32({2, 1}, {1, 2}), ids, 2, ReduceType::kSum), InvalidArgument);
}

TEST(SegmentReduceTest, MaxGradientGoesToLowestIndexOfTie) {
  Tape tape;
  Tensor x = tape.Watch("x", DenseTensor({3, 1}, std::vector<double>{2, 2, 1}));
  std::vector<int64_t> ids{0, 0, 0};
  auto grads = tape.Backward(Sum(SegmentReduce(x, ids, 1, ReduceType::kMax)));
  EXPECT_EQ(grads.at("x").ToDoubles(), (std::vector<double>{1, 0, 0}));
}

TEST(SegmentReduceTest, SumIsPermutationInvariant) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int64_t m = 1 + static_cast<int64_t>(gen() % 20);
    const int64_t n = 1 + static_cast<int64_t>(gen() % 6);
    DenseTensor values = RandomTensor(gen, {m, 3});
    auto ids = RandomIndices(gen, static_cast<size_t>(m), n);
    std::vector<int64_t> perm(static_cast<size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<int64_t> permuted_ids(static_cast<size_t>(m));
    for (int64_t i = 0; i < m; ++i) permuted_ids[i] = ids[perm[i]];
    Tensor permuted = GatherRows(values, perm);
    const auto a = SegmentReduce(values, ids, n, ReduceType::kSum).value().ToDoubles();
    const auto b = SegmentReduce(permuted, permuted_ids, n, ReduceType::kSum).value().ToDoubles();
    for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(SegmentSoftmaxTest, Examples) {
  std::vector<int64_t> two{0, 0};
  ExpectValues(SegmentSoftmax(F32({2, 1}, {0, 0}), two, 1), {2, 1}, {0.5, 0.5}, 1e-7);
  std::vector<int64_t> one{0};
  ExpectValues(SegmentSoftmax(F32({1, 1}, {1}), one, 1), {1, 1}, {1.0}, 1e-7);
  ExpectValues(SegmentSoftmax(DenseTensor({2, 1}, std::vector<double>{std::log(2.0), 0}), two, 1),
               {2, 1}, {2.0 / 3.0, 1.0 / 3.0}, 1e-12);
}

TEST(SegmentSoftmaxTest, RowsAreNonNegativeAndSumToOne) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int64_t m = 1 + static_cast<int64_t>(gen() % 25);
    const int64_t n = 1 + static_cast<int64_t>(gen() % 5);
    auto ids = RandomIndices(gen, static_cast<size_t>(m), n);
    DenseTensor logits = RandomTensor(gen, {m, 2}, DType::kFloat64, -30, 30);
    const auto y = SegmentSoftmax(logits, ids, n).value().ToDoubles();
    std::vector<double> sums(static_cast<size_t>(n * 2), 0.0);
    std::vector<int> counts(static_cast<size_t>(n), 0);
    for (int64_t i = 0; i < m; ++i) {
      ++counts[ids[i]];
      for (int j = 0; j < 2; ++j) {
        EXPECT_GE(y[i * 2 + j], 0.0);
        sums[ids[i] * 2 + j] += y[i * 2 + j];
      }
    }
    for (int64_t s = 0; s < n; ++s) {
      if (counts[s] == 0) continue;
      EXPECT_NEAR(sums[s * 2], 1.0, 1e-12);
      EXPECT_NEAR(sums[s * 2 + 1], 1.0, 1e-12);
    }
  }
}

TEST(GatherRowsTest, Examples) {
  std::vector<int64_t> idx{1, 0, 1};
  ExpectValues(GatherRows(F32({2, 1}, {1, 2}), idx), {3, 1}, {2, 1, 2});
  ExpectValues(GatherRows(F32({1, 1}, {7}), std::vector<int64_t>{}), {0, 1}, {});
  ExpectValues(GatherRows(F32({2, 1}, {1, 2}), std::vector<int64_t>{0}), {1, 1}, {1});
}

TEST(GatherRowsTest, OutOfRange) {
  EXPECT_THROW(GatherRows(F32({2, 1}, {1, 2}), std::vector<int64_t>{2}), InvalidArgument);
}

// gather followed by segment-sum with the same index array is multiplication
// by the 0/1 incidence matrix B (m x n, B[i, idx[i]] = 1): B^T B x.
TEST(GatherRowsTest, GatherThenSumMatchesIncidenceMatrix) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int64_t n = 1 + static_cast<int64_t>(gen() % 16);
    const int64_t m = static_cast<int64_t>(gen() % 30);
    const int64_t d = 2;
    DenseTensor x = RandomTensor(gen, {n, d});
    auto idx = RandomIndices(gen, static_cast<size_t>(m), n);
    std::vector<double> b(static_cast<size_t>(m * n), 0.0);
    for (int64_t i = 0; i < m; ++i) b[i * n + idx[i]] = 1.0;
    std::vector<double> expected(static_cast<size_t>(n * d), 0.0);
    const auto xv = x.ToDoubles();
    for (int64_t r = 0; r < n; ++r) {
      for (int64_t c = 0; c < n; ++c) {
        double btb = 0.0;
        for (int64_t i = 0; i < m; ++i) btb += b[i * n + r] * b[i * n + c];
        for (int64_t j = 0; j < d; ++j) expected[r * d + j] += btb * xv[c * d + j];
      }
    }
    const auto got = SegmentReduce(GatherRows(x, idx), idx, n, ReduceType::kSum).value().ToDoubles();
    for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
  }
}

TEST(LayerNormTest, ZeroVarianceRow) {
  ExpectValues(LayerNorm(F32({1, 2}, {1, 1}), F32({2}, {1, 1}), F32({2}, {0, 0})), {1, 2},
               {0, 0});
}

TEST(LayerNormTest, MeanOneVarianceOne) {
  const double s = 1.0 / std::sqrt(1.0 + 1e-5);
  ExpectValues(LayerNorm(F32({1, 2}, {0, 2}), F32({2}, {1, 1}), F32({2}, {0, 0})), {1, 2},
               {-s, s}, 1e-6);
}

TEST(LayerNormTest, ConstantRowMapsToBeta) {
  ExpectValues(LayerNorm(F32({1, 2}, {3, 3}), F32({2}, {1, 1}), F32({2}, {5, 5})), {1, 2},
               {5, 5});
}

TEST(DropoutTest, ZeroRateIsIdentity) {
  RngStream rng(1, "d");
  DenseTensor x = F32({2, 2}, {1, 2, 3, 4});
  EXPECT_TRUE(Dropout(x, 0.0, true, rng).value().BitwiseEqual(x));
}

TEST(DropoutTest, InferenceIsIdentity) {
  RngStream rng(1, "d");
  DenseTensor x = F32({2, 2}, {1, 2, 3, 4});
  EXPECT_TRUE(Dropout(x, 0.5, false, rng).value().BitwiseEqual(x));
}

TEST(DropoutTest, MonteCarloMeanPreserved) {
  RngStream rng(42, "dropout");
  DenseTensor ones = DenseTensor::Filled({100000, 1}, 1.0, DType::kFloat32);
  const auto y = Dropout(ones, 0.5, true, rng).value().ToDoubles();
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  EXPECT_NEAR(mean, 1.0, 0.01);
  for (double v : y) EXPECT_TRUE(v == 0.0 || v == 2.0);
}

TEST(DropoutTest, RateOneRejected) {
  RngStream rng(1, "d");
  EXPECT_THROW(Dropout(F32({1}, {1}), 1.0, true, rng), InvalidArgument);
}

TEST(CrossEntropyTest, UniformLogitsGiveLogC) {
  for (int c : {2, 3, 7}) {
    std::vector<int64_t> labels{0, static_cast<int64_t>(c - 1)};
    std::vector<double> weights{1, 1};
    Tensor loss = SoftmaxCrossEntropy(DenseTensor::Zeros({2, c}, DType::kFloat64), labels, weights);
    EXPECT_NEAR(loss.value().flat(0), std::log(static_cast<double>(c)), 1e-12);
  }
}

TEST(CrossEntropyTest, AllMaskedGivesZero) {
  std::vector<int64_t> labels{0, 1};
  std::vector<double> weights{0, 0};
  EXPECT_EQ(SoftmaxCrossEntropy(DenseTensor::Zeros({2, 2}, DType::kFloat64), labels, weights)
                .value()
                .flat(0),
            0.0);
}

TEST(CrossEntropyTest, LabelOutOfRange) {
  std::vector<int64_t> labels{2};
  std::vector<double> weights{1};
  EXPECT_THROW(SoftmaxCrossEntropy(DenseTensor::Zeros({1, 2}, DType::kFloat64), labels, weights),
               InvalidArgument);
}

}  // namespace
}  // namespace hetgnn
