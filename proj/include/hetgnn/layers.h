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
#ifndef HETGNN_LAYERS_H_
#define HETGNN_LAYERS_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetgnn/exchange.h"
#include "hetgnn/graph_tensor.h"
#include "hetgnn/ops.h"
#include "hetgnn/parameters.h"
#include "hetgnn/rng.h"

namespace hetgnn {

// Per-call state shared by all layers of one forward pass.
class RunContext {
 public:
  // `tape` may be null for forward-only passes.
  RunContext(const ParameterStore* params, Tape* tape, bool training, uint64_t seed = 0,
             int64_t step = 0)
      : params_(params), tape_(tape), training_(training), seed_(seed), step_(step) {}

  // The named parameter, watched on the tape when there is one.
  Tensor Param(const std::string& name) const;
  // A fresh stream for a stochastic site. Repeated calls with the same site
  // within one pass get distinct streams.
  RngStream NextStream(const std::string& site);

  bool training() const { return training_; }
  DType dtype() const { return params_->dtype(); }
  const ParameterStore& params() const { return *params_; }

 private:
  const ParameterStore* params_;
  Tape* tape_;
  bool training_;
  uint64_t seed_;
  int64_t step_;
  std::map<std::string, uint64_t> invocations_;
};

// Dense layer parameters: kernel [in, out] and optional bias [out].
class DenseParams {
 public:
  DenseParams() = default;
  DenseParams(ParameterStore& params, const std::string& name, int64_t in, int64_t out,
              bool use_bias = true);
  Tensor Apply(const Tensor& x, const RunContext& ctx) const;
  const std::string& kernel_name() const { return kernel_; }
  const std::string& bias_name() const { return bias_; }
  int64_t in() const { return in_; }
  int64_t out() const { return out_; }

 private:
  std::string kernel_;
  std::string bias_;  // empty when there is no bias
  int64_t in_ = 0;
  int64_t out_ = 0;
};

// Computes one pooled message per receiver from an edge set (receiver tag
// SOURCE or TARGET) or, for CONTEXT receivers, from a node or edge set.
class Conv {
 public:
  virtual ~Conv() = default;
  virtual Tensor Call(const GraphTensor& graph, const std::string& set, RunContext& ctx) const = 0;
  virtual EndpointTag receiver_tag() const = 0;
  virtual int64_t output_dim() const = 0;
};

// Combines a set's previous state with its pooled inputs.
class NextState {
 public:
  virtual ~NextState() = default;
  // `inputs` holds one pooled tensor per edge set, sorted by edge set name.
  virtual Tensor Call(const Tensor& previous,
                      const std::vector<std::pair<std::string, Tensor>>& inputs,
                      const std::optional<Tensor>& context, RunContext& ctx) const = 0;
  virtual int64_t output_dim() const = 0;
};

// messages = relu(W [h_sender, h_receiver (, h_edge)] + b), dropped out and
// pooled to the receiver.
class VanillaMpnnConv : public Conv {
 public:
  struct Options {
    int64_t sender_dim = 0;
    int64_t receiver_dim = 0;
    int64_t edge_dim = 0;  // 0: no edge input
    int64_t message_dim = 0;
    EndpointTag receiver_tag = EndpointTag::kTarget;
    ReduceType reduce_type = ReduceType::kSum;
    double dropout = 0.0;
  };
  VanillaMpnnConv(ParameterStore& params, const std::string& name, Options options);
  Tensor Call(const GraphTensor& graph, const std::string& edge_set, RunContext& ctx) const override;
  EndpointTag receiver_tag() const override { return options_.receiver_tag; }
  int64_t output_dim() const override { return options_.message_dim; }
  const DenseParams& message_fn() const { return message_fn_; }

 private:
  std::string name_;
  Options options_;
  DenseParams message_fn_;
};

// sigma(sum over N(v) and v itself of W h_u / sqrt(d_u d_v)), d = in-degree
// + 1. The self-loop is added analytically. Needs a homogeneous edge set.
class GcnConv : public Conv {
 public:
  struct Options {
    int64_t input_dim = 0;
    int64_t units = 0;
    EndpointTag receiver_tag = EndpointTag::kTarget;
    Activation activation{ActivationKind::kRelu};
    bool use_bias = false;
  };
  GcnConv(ParameterStore& params, const std::string& name, Options options);
  Tensor Call(const GraphTensor& graph, const std::string& edge_set, RunContext& ctx) const override;
  EndpointTag receiver_tag() const override { return options_.receiver_tag; }
  int64_t output_dim() const override { return options_.units; }
  const DenseParams& dense() const { return dense_; }

 private:
  Options options_;
  DenseParams dense_;
};

// reduce over N(v) of W h_u. With mean this is the GraphSAGE mean
// aggregator and the per-edge-set term of R-GCN.
class PooledDenseConv : public Conv {
 public:
  struct Options {
    int64_t sender_dim = 0;
    int64_t units = 0;
    EndpointTag receiver_tag = EndpointTag::kTarget;
    ReduceType reduce_type = ReduceType::kMean;
    bool use_bias = false;
  };
  PooledDenseConv(ParameterStore& params, const std::string& name, Options options);
  Tensor Call(const GraphTensor& graph, const std::string& edge_set, RunContext& ctx) const override;
  EndpointTag receiver_tag() const override { return options_.receiver_tag; }
  int64_t output_dim() const override { return options_.units; }
  const DenseParams& dense() const { return dense_; }

 private:
  Options options_;
  DenseParams dense_;
};

// Multi-head GATv2 attention from senders (neighbor nodes and/or edges, or
// all nodes/edges of a component for CONTEXT receivers) onto receivers.
class Gatv2Conv : public Conv {
 public:
  struct Options {
    int64_t receiver_dim = 0;
    int64_t sender_node_dim = 0;  // 0 disables the sender node input
    int64_t sender_edge_dim = 0;  // 0 disables the sender edge input
    int64_t num_heads = 1;
    int64_t per_head_channels = 0;
    EndpointTag receiver_tag = EndpointTag::kTarget;
    double edge_dropout = 0.0;
    Activation attention_activation{ActivationKind::kLeakyRelu, 0.2};
    Activation activation{ActivationKind::kRelu};
  };
  Gatv2Conv(ParameterStore& params, const std::string& name, Options options);
  // For SOURCE/TARGET receivers `set` is an edge set. For CONTEXT it is a
  // node set (node senders) or an edge set (edge senders).
  Tensor Call(const GraphTensor& graph, const std::string& set, RunContext& ctx) const override;
  // Attention coefficients [m, num_heads] before dropout.
  Tensor Coefficients(const GraphTensor& graph, const std::string& set, RunContext& ctx) const;
  EndpointTag receiver_tag() const override { return options_.receiver_tag; }
  int64_t output_dim() const override { return options_.num_heads * options_.per_head_channels; }

  const DenseParams& query() const { return query_; }
  const DenseParams& sender_node() const { return sender_node_; }
  const DenseParams& sender_edge() const { return sender_edge_; }
  const std::string& attention_kernel() const { return attention_kernel_; }

 private:
  struct Parts;
  Parts Compute(const GraphTensor& graph, const std::string& set, RunContext& ctx) const;

  std::string name_;
  Options options_;
  DenseParams query_;
  DenseParams sender_node_;
  DenseParams sender_edge_;
  std::string attention_kernel_;  // [per_head_channels, num_heads]
};

// Pools the stored edge hidden states to the receiver (second step of the
// two-step message path) or, for CONTEXT, pools a set's hidden states.
class EdgePoolConv : public Conv {
 public:
  EdgePoolConv(int64_t dim, EndpointTag receiver_tag, ReduceType reduce_type)
      : dim_(dim), receiver_tag_(receiver_tag), reduce_type_(reduce_type) {}
  Tensor Call(const GraphTensor& graph, const std::string& set, RunContext& ctx) const override;
  EndpointTag receiver_tag() const override { return receiver_tag_; }
  int64_t output_dim() const override { return dim_; }

 private:
  int64_t dim_;
  EndpointTag receiver_tag_;
  ReduceType reduce_type_;
};

// act(W [h_prev, pooled..., context]) followed by dropout and optional layer
// normalization.
class NextStateFromConcat : public NextState {
 public:
  struct Options {
    int64_t input_dim = 0;  // sum of all concatenated widths
    int64_t units = 0;
    Activation activation{ActivationKind::kRelu};
    double dropout = 0.0;
    bool layer_norm = false;
  };
  NextStateFromConcat(ParameterStore& params, const std::string& name, Options options);
  Tensor Call(const Tensor& previous, const std::vector<std::pair<std::string, Tensor>>& inputs,
              const std::optional<Tensor>& context, RunContext& ctx) const override;
  int64_t output_dim() const override { return options_.units; }

 private:
  std::string name_;
  Options options_;
  DenseParams dense_;
  std::string gamma_;
  std::string beta_;
};

// act(sum_j pooled_j + W_V h_prev); the R-GCN / GraphSAGE state update.
class ResidualSumNextState : public NextState {
 public:
  struct Options {
    int64_t state_dim = 0;
    int64_t units = 0;
    Activation activation{ActivationKind::kRelu};
  };
  ResidualSumNextState(ParameterStore& params, const std::string& name, Options options);
  Tensor Call(const Tensor& previous, const std::vector<std::pair<std::string, Tensor>>& inputs,
              const std::optional<Tensor>& context, RunContext& ctx) const override;
  int64_t output_dim() const override { return options_.units; }
  const DenseParams& self_dense() const { return self_; }

 private:
  Options options_;
  DenseParams self_;
};

// Returns its only pooled input unchanged (the GCN state update).
class PassThroughNextState : public NextState {
 public:
  explicit PassThroughNextState(int64_t dim) : dim_(dim) {}
  Tensor Call(const Tensor& previous, const std::vector<std::pair<std::string, Tensor>>& inputs,
              const std::optional<Tensor>& context, RunContext& ctx) const override;
  int64_t output_dim() const override { return dim_; }

 private:
  int64_t dim_;
};

// Keeps the previous state.
class KeepNextState : public NextState {
 public:
  explicit KeepNextState(int64_t dim) : dim_(dim) {}
  Tensor Call(const Tensor& previous, const std::vector<std::pair<std::string, Tensor>>& inputs,
              const std::optional<Tensor>& context, RunContext& ctx) const override;
  int64_t output_dim() const override { return dim_; }

 private:
  int64_t dim_;
};

// m_(u,v) = act(W [h_u, h_v (, m_prev)] + b): the first step of the two-step
// message path, stored as the edge set's hidden state.
class NextEdgeState {
 public:
  struct Options {
    int64_t source_dim = 0;
    int64_t target_dim = 0;
    int64_t edge_dim = 0;  // 0: no recurrence on the previous edge state
    int64_t units = 0;
    Activation activation{ActivationKind::kRelu};
  };
  NextEdgeState(ParameterStore& params, const std::string& name, Options options);
  Tensor Call(const GraphTensor& graph, const std::string& edge_set, RunContext& ctx) const;
  int64_t output_dim() const { return options_.units; }

 private:
  Options options_;
  DenseParams dense_;
};

struct NodeSetUpdate {
  std::map<std::string, std::shared_ptr<const Conv>> convs;  // keyed by edge set
  std::shared_ptr<const NextState> next_state;
  bool use_context = false;  // feed the context hidden state to next_state
};

struct ContextUpdate {
  std::map<std::string, std::shared_ptr<const Conv>> convs;  // keyed by node or edge set
  std::shared_ptr<const NextState> next_state;
};

// One round of message passing. Edge updates run first; node updates then
// all read the states from before this round (plus the new edge states);
// the context update runs last on the updated node states.
class GraphUpdate {
 public:
  std::map<std::string, std::shared_ptr<const NextEdgeState>> edge_sets;
  std::map<std::string, NodeSetUpdate> node_sets;
  std::optional<ContextUpdate> context;

  GraphTensor Call(const GraphTensor& graph, RunContext& ctx) const;
};

// hidden_state at local index 0 of `node_set` in every component. Where
// `component_mask` is false, an empty component reads row 0 instead of
// failing (the value is ignored downstream).
Tensor ReadoutRoot(const GraphTensor& graph, const std::string& node_set,
                   const std::vector<bool>& component_mask = {});

}  // namespace hetgnn

#endif  // HETGNN_LAYERS_H_
