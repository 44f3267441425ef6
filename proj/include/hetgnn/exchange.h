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
#ifndef HETGNN_EXCHANGE_H_
#define HETGNN_EXCHANGE_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hetgnn/graph_tensor.h"
#include "hetgnn/ops.h"

namespace hetgnn {

enum class EndpointTag { kSource, kTarget, kContext };

const char* EndpointTagName(EndpointTag tag);
EndpointTag ParseEndpointTag(std::string_view name);
// SOURCE <-> TARGET.
EndpointTag ReverseTag(EndpointTag tag);

// Either an explicit value tensor or the name of a float feature stored on
// the relevant set of the graph.
using ValueOrName = std::variant<Tensor, std::string>;

// Node set at the `tag` end of `edge_set` (tag must be SOURCE or TARGET).
const std::string& EndpointSet(const GraphTensor& graph, const std::string& edge_set,
                               EndpointTag tag);
std::span<const int64_t> EndpointIndices(const GraphTensor& graph, const std::string& edge_set,
                                         EndpointTag tag);

// Float feature lookup helpers.
Tensor NodeValues(const GraphTensor& graph, const std::string& node_set, const ValueOrName& v);
Tensor EdgeValues(const GraphTensor& graph, const std::string& edge_set, const ValueOrName& v);
Tensor ContextValues(const GraphTensor& graph, const ValueOrName& v);

// out[e] = values[endpoint[e]].
Tensor BroadcastNodeToEdges(const GraphTensor& graph, const std::string& edge_set,
                            EndpointTag tag, const ValueOrName& values);

// Reduces edge values onto the tagged endpoint; receivers without edges get 0.
Tensor PoolEdgesToNode(const GraphTensor& graph, const std::string& edge_set, EndpointTag tag,
                       ReduceType reduce_type, const ValueOrName& values);

// Context exchange with a node set or edge set; `set` names either (node
// sets take precedence when both exist). Broadcast repeats each
// component's row over its items; pool reduces items by component.
enum class SetKind { kNodeSet, kEdgeSet };
struct SetRef {
  SetKind kind;
  std::string name;
};
SetRef ResolveSet(const GraphTensor& graph, const std::string& name);

Tensor BroadcastContext(const GraphTensor& graph, const SetRef& set, const ValueOrName& values);
Tensor PoolToContext(const GraphTensor& graph, const SetRef& set, ReduceType reduce_type,
                     const ValueOrName& values);

inline Tensor BroadcastContextToNodes(const GraphTensor& graph, const std::string& node_set,
                                      const ValueOrName& values) {
  return BroadcastContext(graph, {SetKind::kNodeSet, node_set}, values);
}
inline Tensor PoolNodesToContext(const GraphTensor& graph, const std::string& node_set,
                                 ReduceType reduce_type, const ValueOrName& values) {
  return PoolToContext(graph, {SetKind::kNodeSet, node_set}, reduce_type, values);
}
inline Tensor BroadcastContextToEdges(const GraphTensor& graph, const std::string& edge_set,
                                      const ValueOrName& values) {
  return BroadcastContext(graph, {SetKind::kEdgeSet, edge_set}, values);
}
inline Tensor PoolEdgesToContext(const GraphTensor& graph, const std::string& edge_set,
                                 ReduceType reduce_type, const ValueOrName& values) {
  return PoolToContext(graph, {SetKind::kEdgeSet, edge_set}, reduce_type, values);
}

// Softmax over the edges sharing a receiver. With kContext the receiver of
// an edge is its component.
Tensor EdgeSoftmax(const GraphTensor& graph, const std::string& edge_set, EndpointTag receiver_tag,
                   const Tensor& logits);

// Item -> component index for a node or edge set.
std::vector<int64_t> SetComponentIds(const GraphTensor& graph, const SetRef& set);

}  // namespace hetgnn

#endif  // HETGNN_EXCHANGE_H_
