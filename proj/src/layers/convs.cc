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
#include <cmath>
#include <vector>

#include "hetgnn/layers.h"

namespace hetgnn {
namespace {

// Inputs read from the graph are constants; bring them to the parameter
// dtype. Recorded tensors must already match.
Tensor InDType(const Tensor& t, DType dtype) {
  if (t.dtype() == dtype) return t;
  if (t.recorded()) {
    throw InvalidArgument(std::string("recorded tensor has dtype ") + DTypeName(t.dtype()) +
                          ", layers run in " + DTypeName(dtype));
  }
  return Tensor(t.value().Cast(dtype));
}

Tensor NodeState(const GraphTensor& graph, const std::string& set, DType dtype) {
  if (!graph.node_set(set).features.count(kHiddenState)) {
    throw InvalidArgument("node set " + set + " has no " + kHiddenState);
  }
  return InDType(NodeValues(graph, set, std::string(kHiddenState)), dtype);
}

Tensor EdgeState(const GraphTensor& graph, const std::string& set, DType dtype) {
  if (!graph.edge_set(set).features.count(kHiddenState)) {
    throw InvalidArgument("edge set " + set + " has no " + kHiddenState);
  }
  return InDType(EdgeValues(graph, set, std::string(kHiddenState)), dtype);
}

Tensor ContextState(const GraphTensor& graph, DType dtype) {
  if (!graph.context().count(kHiddenState)) {
    throw InvalidArgument(std::string("context has no ") + kHiddenState);
  }
  return InDType(ContextValues(graph, std::string(kHiddenState)), dtype);
}

void RequireEdgeReceiver(EndpointTag tag, const char* layer) {
  if (tag == EndpointTag::kContext) {
    throw InvalidArgument(std::string(layer) + " needs a SOURCE or TARGET receiver");
  }
}

void RequireWidth(const Tensor& t, int64_t width, const std::string& what) {
  const int64_t got = t.rank() >= 2 ? t.dim(1) : 1;
  if (t.rank() > 2 || got != width) {
    throw DimensionError(what + " has shape " + ShapeString(t.shape()) + ", expected width " +
                         std::to_string(width));
  }
}

int64_t ReceiverCount(const GraphTensor& graph, const std::string& edge_set, EndpointTag tag) {
  return graph.node_set(EndpointSet(graph, edge_set, tag)).total_size();
}

}  // namespace

Tensor RunContext::Param(const std::string& name) const {
  const DenseTensor& value = params_->Get(name);
  if (tape_ == nullptr) return Tensor(value);
  return tape_->Watch(name, value);
}

RngStream RunContext::NextStream(const std::string& site) {
  const uint64_t call = invocations_[site]++;
  return RngStream(seed_, site, static_cast<uint64_t>(step_), call);
}

DenseParams::DenseParams(ParameterStore& params, const std::string& name, int64_t in,
                         int64_t out, bool use_bias)
    : in_(in), out_(out) {
  if (in < 0 || out <= 0) {
    throw InvalidArgument("dense layer " + name + " needs positive width, got " +
                          std::to_string(in) + "->" + std::to_string(out));
  }
  kernel_ = params.Create(name + "/kernel", {in, out}, Initializer::kGlorotUniform, true);
  if (use_bias) bias_ = params.Create(name + "/bias", {out}, Initializer::kZeros, false);
}

Tensor DenseParams::Apply(const Tensor& x, const RunContext& ctx) const {
  if (kernel_.empty()) throw InvalidArgument("dense layer used before construction");
  RequireWidth(x, in_, "input to " + kernel_);
  std::optional<Tensor> bias;
  if (!bias_.empty()) bias = ctx.Param(bias_);
  return Linear(x, ctx.Param(kernel_), bias);
}

// ---------------------------------------------------------------- MPNN

VanillaMpnnConv::VanillaMpnnConv(ParameterStore& params, const std::string& name,
                                 Options options)
    : name_(name), options_(options) {
  RequireEdgeReceiver(options.receiver_tag, "VanillaMpnnConv");
  message_fn_ = DenseParams(params, name + "/message",
                            options.sender_dim + options.receiver_dim + options.edge_dim,
                            options.message_dim);
}

Tensor VanillaMpnnConv::Call(const GraphTensor& graph, const std::string& edge_set,
                             RunContext& ctx) const {
  const EndpointTag rtag = options_.receiver_tag;
  const EndpointTag stag = ReverseTag(rtag);
  const std::string& sender_set = EndpointSet(graph, edge_set, stag);
  const std::string& receiver_set = EndpointSet(graph, edge_set, rtag);
  std::vector<Tensor> parts;
  parts.push_back(GatherRows(NodeState(graph, sender_set, ctx.dtype()),
                             EndpointIndices(graph, edge_set, stag)));
  parts.push_back(GatherRows(NodeState(graph, receiver_set, ctx.dtype()),
                             EndpointIndices(graph, edge_set, rtag)));
  if (options_.edge_dim > 0) parts.push_back(EdgeState(graph, edge_set, ctx.dtype()));
  Tensor messages = Relu(message_fn_.Apply(ConcatLast(parts), ctx));
  if (options_.dropout > 0 && ctx.training()) {
    RngStream rng = ctx.NextStream(name_ + "/dropout");
    messages = Dropout(messages, options_.dropout, true, rng);
  }
  return SegmentReduce(messages, EndpointIndices(graph, edge_set, rtag),
                       ReceiverCount(graph, edge_set, rtag), options_.reduce_type);
}

// ---------------------------------------------------------------- GCN

GcnConv::GcnConv(ParameterStore& params, const std::string& name, Options options)
    : options_(options) {
  RequireEdgeReceiver(options.receiver_tag, "GcnConv");
  dense_ = DenseParams(params, name, options.input_dim, options.units, options.use_bias);
}

Tensor GcnConv::Call(const GraphTensor& graph, const std::string& edge_set,
                     RunContext& ctx) const {
  const Adjacency& adj = graph.edge_set(edge_set).adjacency;
  if (adj.source_set() != adj.target_set()) {
    throw InvalidArgument("GCN needs a homogeneous edge set; " + edge_set + " connects " +
                          adj.source_set() + " to " + adj.target_set());
  }
  const EndpointTag rtag = options_.receiver_tag;
  std::span<const int64_t> receivers = EndpointIndices(graph, edge_set, rtag);
  std::span<const int64_t> senders = EndpointIndices(graph, edge_set, ReverseTag(rtag));
  const int64_t n = graph.node_set(adj.source_set()).total_size();

  std::vector<double> degree(n, 1.0);  // the implicit self-loop
  for (int64_t v : receivers) degree[v] += 1.0;
  std::vector<double> edge_coef(receivers.size());
  for (size_t e = 0; e < receivers.size(); ++e) {
    edge_coef[e] = 1.0 / std::sqrt(degree[senders[e]] * degree[receivers[e]]);
  }
  std::vector<double> self_coef(n);
  for (int64_t v = 0; v < n; ++v) self_coef[v] = 1.0 / degree[v];

  Tensor transformed = dense_.Apply(NodeState(graph, adj.source_set(), ctx.dtype()), ctx);
  Tensor messages = ScaleRows(GatherRows(transformed, senders), edge_coef);
  Tensor pooled = SegmentReduce(messages, receivers, n, ReduceType::kSum);
  return Activate(Add(pooled, ScaleRows(transformed, self_coef)), options_.activation);
}

// ---------------------------------------------------------------- SAGE / R-GCN

PooledDenseConv::PooledDenseConv(ParameterStore& params, const std::string& name,
                                 Options options)
    : options_(options) {
  RequireEdgeReceiver(options.receiver_tag, "PooledDenseConv");
  dense_ = DenseParams(params, name, options.sender_dim, options.units, options.use_bias);
}

Tensor PooledDenseConv::Call(const GraphTensor& graph, const std::string& edge_set,
                             RunContext& ctx) const {
  const EndpointTag rtag = options_.receiver_tag;
  const EndpointTag stag = ReverseTag(rtag);
  Tensor sender = NodeState(graph, EndpointSet(graph, edge_set, stag), ctx.dtype());
  Tensor transformed = dense_.Apply(sender, ctx);
  return SegmentReduce(GatherRows(transformed, EndpointIndices(graph, edge_set, stag)),
                       EndpointIndices(graph, edge_set, rtag),
                       ReceiverCount(graph, edge_set, rtag), options_.reduce_type);
}

// ---------------------------------------------------------------- GATv2

struct Gatv2Conv::Parts {
  Tensor values;                      // [m, H*C] per sender
  Tensor logits;                      // [m, H]
  std::vector<int64_t> receiver_ids;  // per sender
  int64_t num_receivers = 0;
};

Gatv2Conv::Gatv2Conv(ParameterStore& params, const std::string& name, Options options)
    : name_(name), options_(options) {
  if (options.sender_node_dim <= 0 && options.sender_edge_dim <= 0) {
    throw InvalidArgument("GATv2 conv " + name + " needs a sender node or sender edge input");
  }
  if (options.num_heads <= 0 || options.per_head_channels <= 0) {
    throw InvalidArgument("GATv2 conv " + name + " needs positive heads and channels");
  }
  const int64_t width = options.num_heads * options.per_head_channels;
  query_ = DenseParams(params, name + "/query", options.receiver_dim, width);
  if (options.sender_node_dim > 0) {
    sender_node_ = DenseParams(params, name + "/value_node", options.sender_node_dim, width);
  }
  if (options.sender_edge_dim > 0) {
    // The node transform already carries a bias.
    sender_edge_ = DenseParams(params, name + "/value_edge", options.sender_edge_dim, width,
                               options.sender_node_dim <= 0);
  }
  attention_kernel_ = params.Create(name + "/attention_logits",
                                    {options.per_head_channels, options.num_heads},
                                    Initializer::kGlorotUniform, true);
}

Gatv2Conv::Parts Gatv2Conv::Compute(const GraphTensor& graph, const std::string& set,
                                    RunContext& ctx) const {
  const DType dtype = ctx.dtype();
  const EndpointTag rtag = options_.receiver_tag;
  Parts parts;
  Tensor receiver_state;
  std::vector<Tensor> value_terms;
  if (rtag == EndpointTag::kContext) {
    const SetRef ref = ResolveSet(graph, set);
    receiver_state = ContextState(graph, dtype);
    parts.receiver_ids = SetComponentIds(graph, ref);
    parts.num_receivers = graph.num_components();
    if (ref.kind == SetKind::kNodeSet) {
      if (sender_node_.out() == 0) {
        throw InvalidArgument("GATv2 conv " + name_ + " has no sender node input for " + set);
      }
      value_terms.push_back(sender_node_.Apply(NodeState(graph, set, dtype), ctx));
    } else {
      if (sender_edge_.out() == 0) {
        throw InvalidArgument("GATv2 conv " + name_ + " has no sender edge input for " + set);
      }
      value_terms.push_back(sender_edge_.Apply(EdgeState(graph, set, dtype), ctx));
    }
  } else {
    const EndpointTag stag = ReverseTag(rtag);
    receiver_state = NodeState(graph, EndpointSet(graph, set, rtag), dtype);
    std::span<const int64_t> ids = EndpointIndices(graph, set, rtag);
    parts.receiver_ids.assign(ids.begin(), ids.end());
    parts.num_receivers = ReceiverCount(graph, set, rtag);
    if (sender_node_.out() > 0) {
      Tensor h = NodeState(graph, EndpointSet(graph, set, stag), dtype);
      value_terms.push_back(
          GatherRows(sender_node_.Apply(h, ctx), EndpointIndices(graph, set, stag)));
    }
    if (sender_edge_.out() > 0) {
      value_terms.push_back(sender_edge_.Apply(EdgeState(graph, set, dtype), ctx));
    }
  }
  parts.values = AddN(value_terms);
  Tensor query = GatherRows(query_.Apply(receiver_state, ctx), parts.receiver_ids);
  Tensor features = Activate(Add(query, parts.values), options_.attention_activation);
  parts.logits = HeadDot(features, ctx.Param(attention_kernel_));
  return parts;
}

Tensor Gatv2Conv::Coefficients(const GraphTensor& graph, const std::string& set,
                               RunContext& ctx) const {
  Parts parts = Compute(graph, set, ctx);
  return SegmentSoftmax(parts.logits, parts.receiver_ids, parts.num_receivers);
}

Tensor Gatv2Conv::Call(const GraphTensor& graph, const std::string& set, RunContext& ctx) const {
  Parts parts = Compute(graph, set, ctx);
  Tensor coef = SegmentSoftmax(parts.logits, parts.receiver_ids, parts.num_receivers);
  if (options_.edge_dropout > 0 && ctx.training()) {
    RngStream rng = ctx.NextStream(name_ + "/edge_dropout");
    coef = Dropout(coef, options_.edge_dropout, true, rng);
  }
  Tensor pooled = SegmentReduce(ScaleHeads(parts.values, coef), parts.receiver_ids,
                                parts.num_receivers, ReduceType::kSum);
  return Activate(pooled, options_.activation);
}

// ---------------------------------------------------------------- EdgePool

Tensor EdgePoolConv::Call(const GraphTensor& graph, const std::string& set,
                          RunContext& ctx) const {
  if (receiver_tag_ == EndpointTag::kContext) {
    const SetRef ref = ResolveSet(graph, set);
    Tensor values = ref.kind == SetKind::kNodeSet ? NodeState(graph, set, ctx.dtype())
                                                  : EdgeState(graph, set, ctx.dtype());
    RequireWidth(values, dim_, "pooled states of " + set);
    return PoolToContext(graph, ref, reduce_type_, values);
  }
  Tensor values = EdgeState(graph, set, ctx.dtype());
  RequireWidth(values, dim_, "edge states of " + set);
  return PoolEdgesToNode(graph, set, receiver_tag_, reduce_type_, values);
}

}  // namespace hetgnn
