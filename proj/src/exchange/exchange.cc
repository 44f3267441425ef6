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
#include "hetgnn/exchange.h"

namespace hetgnn {
namespace {

Tensor Resolve(const FeatureMap& features, const ValueOrName& v, const std::string& owner) {
  if (const Tensor* t = std::get_if<Tensor>(&v)) return *t;
  const std::string& name = std::get<std::string>(v);
  auto it = features.find(name);
  if (it == features.end()) throw InvalidArgument("no feature '" + name + "' on " + owner);
  if (it->second.ragged()) throw InvalidArgument("feature " + owner + "." + name + " is ragged");
  return it->second.tensor();
}

void RequireLeading(const Tensor& t, int64_t n, const std::string& what) {
  if (t.rank() < 1 || t.dim(0) != n) {
    throw DimensionError(what + ": values " + ShapeString(t.shape()) + " need leading dim " +
                         std::to_string(n));
  }
}

}  // namespace

const char* EndpointTagName(EndpointTag tag) {
  switch (tag) {
    case EndpointTag::kSource:
      return "source";
    case EndpointTag::kTarget:
      return "target";
    case EndpointTag::kContext:
      return "context";
  }
  return "?";
}

EndpointTag ParseEndpointTag(std::string_view name) {
  if (name == "source" || name == "SOURCE") return EndpointTag::kSource;
  if (name == "target" || name == "TARGET") return EndpointTag::kTarget;
  if (name == "context" || name == "CONTEXT") return EndpointTag::kContext;
  throw InvalidArgument("unknown endpoint tag '" + std::string(name) + "'");
}

EndpointTag ReverseTag(EndpointTag tag) {
  if (tag == EndpointTag::kSource) return EndpointTag::kTarget;
  if (tag == EndpointTag::kTarget) return EndpointTag::kSource;
  throw InvalidArgument("context tag has no reverse");
}

const std::string& EndpointSet(const GraphTensor& graph, const std::string& edge_set,
                               EndpointTag tag) {
  const Adjacency& adj = graph.edge_set(edge_set).adjacency;
  if (tag == EndpointTag::kSource) return adj.source_set();
  if (tag == EndpointTag::kTarget) return adj.target_set();
  throw InvalidArgument("edge set endpoint must be source or target");
}

std::span<const int64_t> EndpointIndices(const GraphTensor& graph, const std::string& edge_set,
                                         EndpointTag tag) {
  const Adjacency& adj = graph.edge_set(edge_set).adjacency;
  if (tag == EndpointTag::kSource) return adj.source();
  if (tag == EndpointTag::kTarget) return adj.target();
  throw InvalidArgument("edge set endpoint must be source or target");
}

Tensor NodeValues(const GraphTensor& graph, const std::string& node_set, const ValueOrName& v) {
  const NodeSet& set = graph.node_set(node_set);
  Tensor t = Resolve(set.features, v, node_set);
  RequireLeading(t, set.total_size(), "node set " + node_set);
  return t;
}

Tensor EdgeValues(const GraphTensor& graph, const std::string& edge_set, const ValueOrName& v) {
  const EdgeSet& set = graph.edge_set(edge_set);
  Tensor t = Resolve(set.features, v, edge_set);
  RequireLeading(t, set.total_size(), "edge set " + edge_set);
  return t;
}

Tensor ContextValues(const GraphTensor& graph, const ValueOrName& v) {
  Tensor t = Resolve(graph.context(), v, "context");
  RequireLeading(t, graph.num_components(), "context");
  return t;
}

Tensor BroadcastNodeToEdges(const GraphTensor& graph, const std::string& edge_set,
                            EndpointTag tag, const ValueOrName& values) {
  Tensor v = NodeValues(graph, EndpointSet(graph, edge_set, tag), values);
  return GatherRows(v, EndpointIndices(graph, edge_set, tag));
}

Tensor PoolEdgesToNode(const GraphTensor& graph, const std::string& edge_set, EndpointTag tag,
                       ReduceType reduce_type, const ValueOrName& values) {
  Tensor v = EdgeValues(graph, edge_set, values);
  const int64_t n = graph.node_set(EndpointSet(graph, edge_set, tag)).total_size();
  return SegmentReduce(v, EndpointIndices(graph, edge_set, tag), n, reduce_type);
}

SetRef ResolveSet(const GraphTensor& graph, const std::string& name) {
  if (graph.node_sets().count(name)) return {SetKind::kNodeSet, name};
  if (graph.edge_sets().count(name)) return {SetKind::kEdgeSet, name};
  throw InvalidArgument("graph has no node or edge set '" + name + "'");
}

std::vector<int64_t> SetComponentIds(const GraphTensor& graph, const SetRef& set) {
  if (set.kind == SetKind::kNodeSet) return ComponentIds(graph.node_set(set.name).sizes);
  return ComponentIds(graph.edge_set(set.name).sizes);
}

Tensor BroadcastContext(const GraphTensor& graph, const SetRef& set, const ValueOrName& values) {
  Tensor v = ContextValues(graph, values);
  return GatherRows(v, SetComponentIds(graph, set));
}

Tensor PoolToContext(const GraphTensor& graph, const SetRef& set, ReduceType reduce_type,
                     const ValueOrName& values) {
  Tensor v = set.kind == SetKind::kNodeSet ? NodeValues(graph, set.name, values)
                                           : EdgeValues(graph, set.name, values);
  return SegmentReduce(v, SetComponentIds(graph, set), graph.num_components(), reduce_type);
}

Tensor EdgeSoftmax(const GraphTensor& graph, const std::string& edge_set, EndpointTag receiver_tag,
                   const Tensor& logits) {
  const EdgeSet& set = graph.edge_set(edge_set);
  RequireLeading(logits, set.total_size(), "edge softmax over " + edge_set);
  if (receiver_tag == EndpointTag::kContext) {
    return SegmentSoftmax(logits, ComponentIds(set.sizes), graph.num_components());
  }
  const int64_t n = graph.node_set(EndpointSet(graph, edge_set, receiver_tag)).total_size();
  return SegmentSoftmax(logits, EndpointIndices(graph, edge_set, receiver_tag), n);
}

}  // namespace hetgnn
