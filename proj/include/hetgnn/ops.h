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
#ifndef HETGNN_OPS_H_
#define HETGNN_OPS_H_

#include <optional>
#include <span>
#include <string_view>

#include "hetgnn/autodiff.h"
#include "hetgnn/rng.h"

namespace hetgnn {

// Differentiable ops. Each one records itself on the tape of its recorded
// inputs (if any) and otherwise just computes a value.

enum class ReduceType { kSum, kMean, kMax, kMin };

ReduceType ParseReduceType(std::string_view name);
const char* ReduceTypeName(ReduceType type);

enum class ActivationKind { kIdentity, kRelu, kLeakyRelu, kSigmoid, kLog1p };

struct Activation {
  ActivationKind kind = ActivationKind::kIdentity;
  double alpha = 0.2;  // leaky_relu slope for negative inputs

  static Activation Parse(std::string_view name);
  std::string Name() const;
};

// y = x W (+ b) for x [n, d_in], W [d_in, d_out], b [d_out].
Tensor Linear(const Tensor& x, const Tensor& weights,
              const std::optional<Tensor>& bias = std::nullopt);

Tensor Activate(const Tensor& x, Activation activation);
inline Tensor Relu(const Tensor& x) { return Activate(x, {ActivationKind::kRelu}); }

// Column-wise concatenation of rank-2 tensors with equal row counts.
Tensor ConcatLast(std::span<const Tensor> parts);

// Reduces rows of `values` ([m, ...]) into `num_segments` rows. Empty
// segments produce 0 for every reduce type; mean divides by max(count, 1).
// Max/min route their gradient to the lowest-index extremal row.
Tensor SegmentReduce(const Tensor& values, std::span<const int64_t> segment_ids,
                     int64_t num_segments, ReduceType reduce_type);

// Softmax over the rows of each segment, independently per column.
Tensor SegmentSoftmax(const Tensor& logits, std::span<const int64_t> segment_ids,
                      int64_t num_segments);

// out[i] = values[indices[i]]; the gradient scatter-adds back.
Tensor GatherRows(const Tensor& values, std::span<const int64_t> indices);

// Per-row normalization of x [n, d] with learned gain and offset [d].
Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double epsilon = 1e-5);

// Inverted dropout. Identity when !training or rate == 0.
Tensor Dropout(const Tensor& x, double rate, bool training, RngStream& rng);

Tensor Add(const Tensor& a, const Tensor& b);
Tensor AddN(std::span<const Tensor> terms);
Tensor Multiply(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& x, double factor);
// Multiplies row i of x by the constant factors[i].
Tensor ScaleRows(const Tensor& x, std::span<const double> factors);

// Scalar [1] reductions.
Tensor Sum(const Tensor& x);
Tensor SumSquares(const Tensor& x);

// Multi-head helpers over [m, heads * channels] layouts.
// HeadDot: out[i, h] = sum_c x[i, h*C + c] * kernel[c, h], kernel [C, heads].
Tensor HeadDot(const Tensor& x, const Tensor& kernel);
// ScaleHeads: out[i, h*C + c] = values[i, h*C + c] * coefficients[i, h].
Tensor ScaleHeads(const Tensor& values, const Tensor& coefficients);

// Weighted mean of per-row softmax cross-entropy; 0 when all weights are 0.
Tensor SoftmaxCrossEntropy(const Tensor& logits, std::span<const int64_t> labels,
                           std::span<const double> weights);
// Weighted mean of per-row sigmoid cross-entropy for logits [n, 1].
Tensor SigmoidCrossEntropy(const Tensor& logits, std::span<const int64_t> labels,
                           std::span<const double> weights);

}  // namespace hetgnn

#endif  // HETGNN_OPS_H_
