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
#ifndef HETGNN_AUTODIFF_H_
#define HETGNN_AUTODIFF_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetgnn/tensor.h"

namespace hetgnn {

namespace internal {
struct TapeState;
}  // namespace internal

// A DenseTensor value plus, optionally, the tape node that produced it.
// Unrecorded tensors behave as constants: ops on them compute values only.
class Tensor {
 public:
  Tensor() = default;
  Tensor(DenseTensor value) : value_(std::move(value)) {}  // NOLINT

  const DenseTensor& value() const { return value_; }
  const Shape& shape() const { return value_.shape(); }
  DType dtype() const { return value_.dtype(); }
  int64_t dim(int axis) const { return value_.dim(axis); }
  int rank() const { return value_.rank(); }
  bool recorded() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  DenseTensor value_;
  std::shared_ptr<internal::TapeState> tape_;
  int64_t node_ = -1;
};

// Returns one gradient per op input, in input order; std::nullopt marks an
// input that receives no gradient (e.g. an index operand).
using BackwardFn =
    std::function<std::vector<std::optional<DenseTensor>>(const DenseTensor&)>;

// Append-only record of differentiable operations. Nodes are appended as ops
// execute, so every node's inputs precede it and reverse iteration is a
// valid reverse topological order. A tape is confined to one thread.
class Tape {
 public:
  Tape();

  // Leaf for a named trainable value. Watching the same name twice returns
  // the same node, which is how reused layers share weights.
  Tensor Watch(const std::string& name, const DenseTensor& value);

  // Appends an op node when any input is recorded; otherwise returns `value`
  // as an unrecorded constant. All recorded inputs must share one tape.
  static Tensor Record(DenseTensor value, std::span<const Tensor> inputs,
                       BackwardFn backward);

  // Gradients of the scalar `loss` with respect to every watched leaf that
  // it reaches, keyed by watch name.
  std::map<std::string, DenseTensor> Backward(const Tensor& loss) const;

  int64_t num_nodes() const;

 private:
  std::shared_ptr<internal::TapeState> state_;
};

}  // namespace hetgnn

#endif  // HETGNN_AUTODIFF_H_
