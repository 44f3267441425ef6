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

#include "hetgnn/kernels.h"

namespace hetgnn {
namespace internal {

struct TapeNode {
  std::vector<int64_t> inputs;  // -1 for unrecorded inputs
  BackwardFn backward;          // empty for leaves
  std::string name;             // non-empty for watched leaves
};

struct TapeState {
  std::vector<TapeNode> nodes;
  std::map<std::string, int64_t> watched;  // name -> leaf node
};

}  // namespace internal

Tape::Tape() : state_(std::make_shared<internal::TapeState>()) {}

int64_t Tape::num_nodes() const {
  return static_cast<int64_t>(state_->nodes.size());
}

Tensor Tape::Watch(const std::string& name, const DenseTensor& value) {
  Tensor t(value);
  t.tape_ = state_;
  if (auto it = state_->watched.find(name); it != state_->watched.end()) {
    t.node_ = it->second;
    return t;
  }
  t.node_ = static_cast<int64_t>(state_->nodes.size());
  state_->nodes.push_back({{}, nullptr, name});
  state_->watched.emplace(name, t.node_);
  return t;
}

Tensor Tape::Record(DenseTensor value, std::span<const Tensor> inputs,
                    BackwardFn backward) {
  std::shared_ptr<internal::TapeState> tape;
  for (const Tensor& in : inputs) {
    if (!in.tape_) continue;
    if (tape && tape != in.tape_) {
      throw InvalidArgument("op inputs were recorded on different tapes");
    }
    tape = in.tape_;
  }
  Tensor out(std::move(value));
  if (!tape) return out;
  internal::TapeNode node;
  node.inputs.reserve(inputs.size());
  for (const Tensor& in : inputs) node.inputs.push_back(in.tape_ ? in.node_ : -1);
  node.backward = std::move(backward);
  out.tape_ = tape;
  out.node_ = static_cast<int64_t>(tape->nodes.size());
  tape->nodes.push_back(std::move(node));
  return out;
}

std::map<std::string, DenseTensor> Tape::Backward(const Tensor& loss) const {
  if (loss.tape_ != state_) {
    throw InvalidArgument("loss was not computed on this tape");
  }
  if (loss.value().size() != 1) {
    throw DimensionError("loss must be a scalar, got shape " +
                         ShapeString(loss.shape()));
  }
  const auto& nodes = state_->nodes;
  std::vector<std::optional<DenseTensor>> grads(loss.node_ + 1);
  grads[loss.node_] = DenseTensor::Filled(loss.shape(), 1.0, loss.dtype());
  std::map<std::string, DenseTensor> result;
  for (int64_t i = loss.node_; i >= 0; --i) {
    if (!grads[i]) continue;
    const internal::TapeNode& node = nodes[i];
    if (!node.backward) {
      if (!node.name.empty()) result.emplace(node.name, *grads[i]);
      continue;
    }
    std::vector<std::optional<DenseTensor>> input_grads = node.backward(*grads[i]);
    for (size_t k = 0; k < node.inputs.size(); ++k) {
      const int64_t src = node.inputs[k];
      if (src < 0 || k >= input_grads.size() || !input_grads[k]) continue;
      auto& slot = grads[src];
      slot = slot ? kernels::Add(*slot, *input_grads[k]) : std::move(*input_grads[k]);
    }
    grads[i].reset();
  }
  return result;
}

}  // namespace hetgnn
