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
#include <vector>

#include "hetgnn/layers.h"

namespace hetgnn {
namespace {

Tensor HiddenOf(const FeatureMap& features, const std::string& owner, DType dtype) {
  auto it = features.find(kHiddenState);
  if (it == features.end()) throw InvalidArgument(owner + " has no " + kHiddenState);
  const Tensor& t = it->second.tensor();
  if (t.dtype() == dtype || t.recorded()) return t;
  return Tensor(t.value().Cast(dtype));
}

void RequireRows(const Tensor& t, int64_t rows, int64_t width, const std::string& what) {
  if (t.rank() != 2 || t.dim(0) != rows || t.dim(1) != width) {
    throw DimensionError(what + " has shape " + ShapeString(t.shape()) + ", expected [" +
                         std::to_string(rows) + ", " + std::to_string(width) + "]");
  }
}

}  // namespace

// ---------------------------------------------------------------- next states

NextStateFromConcat::NextStateFromConcat(ParameterStore& params, const std::string& name,
                                         Options options)
    : name_(name), options_(options) {
  dense_ = DenseParams(params, name + "/dense", options.input_dim, options.units);
  if (options.layer_norm) {
    gamma_ = params.Create(name + "/layer_norm/gamma", {options.units}, Initializer::kOnes, false);
    beta_ = params.Create(name + "/layer_norm/beta", {options.units}, Initializer::kZeros, false);
  }
}

Tensor NextStateFromConcat::Call(const Tensor& previous,
                                 const std::vector<std::pair<std::string, Tensor>>& inputs,
                                 const std::optional<Tensor>& context, RunContext& ctx) const {
  std::vector<Tensor> parts{previous};
  for (const auto& [name, t] : inputs) parts.push_back(t);
  if (context) parts.push_back(*context);
  Tensor y = Activate(dense_.Apply(ConcatLast(parts), ctx), options_.activation);
  if (options_.dropout > 0 && ctx.training()) {
    RngStream rng = ctx.NextStream(name_ + "/dropout");
    y = Dropout(y, options_.dropout, true, rng);
  }
  if (options_.layer_norm) y = LayerNorm(y, ctx.Param(gamma_), ctx.Param(beta_));
  return y;
}

ResidualSumNextState::ResidualSumNextState(ParameterStore& params, const std::string& name,
                                           Options options)
    : options_(options) {
  self_ = DenseParams(params, name + "/self", options.state_dim, options.units, false);
}

Tensor ResidualSumNextState::Call(const Tensor& previous,
                                  const std::vector<std::pair<std::string, Tensor>>& inputs,
                                  const std::optional<Tensor>& context, RunContext& ctx) const {
  if (context) throw InvalidArgument("ResidualSumNextState takes no context input");
  std::vector<Tensor> terms;
  for (const auto& [name, t] : inputs) {
    RequireRows(t, previous.dim(0), options_.units, "pooled input from " + name);
    terms.push_back(t);
  }
  terms.push_back(self_.Apply(previous, ctx));
  return Activate(AddN(terms), options_.activation);
}

Tensor PassThroughNextState::Call(const Tensor& previous,
                                  const std::vector<std::pair<std::string, Tensor>>& inputs,
                                  const std::optional<Tensor>& context, RunContext&) const {
  if (inputs.size() != 1 || context) {
    throw InvalidArgument("PassThroughNextState needs exactly one pooled input, got " +
                          std::to_string(inputs.size()));
  }
  RequireRows(inputs[0].second, previous.dim(0), dim_, "pooled input");
  return inputs[0].second;
}

Tensor KeepNextState::Call(const Tensor& previous,
                           const std::vector<std::pair<std::string, Tensor>>&,
                           const std::optional<Tensor>&, RunContext&) const {
  return previous;
}

// ---------------------------------------------------------------- edge states

NextEdgeState::NextEdgeState(ParameterStore& params, const std::string& name, Options options)
    : options_(options) {
  dense_ = DenseParams(params, name,
                       options.source_dim + options.target_dim + options.edge_dim, options.units);
}

Tensor NextEdgeState::Call(const GraphTensor& graph, const std::string& edge_set,
                           RunContext& ctx) const {
  const EdgeSet& set = graph.edge_set(edge_set);
  const Adjacency& adj = set.adjacency;
  std::vector<Tensor> parts;
  parts.push_back(GatherRows(
      HiddenOf(graph.node_set(adj.source_set()).features, adj.source_set(), ctx.dtype()),
      adj.source()));
  parts.push_back(GatherRows(
      HiddenOf(graph.node_set(adj.target_set()).features, adj.target_set(), ctx.dtype()),
      adj.target()));
  if (options_.edge_dim > 0) parts.push_back(HiddenOf(set.features, edge_set, ctx.dtype()));
  return Activate(dense_.Apply(ConcatLast(parts), ctx), options_.activation);
}

// ---------------------------------------------------------------- GraphUpdate

GraphTensor GraphUpdate::Call(const GraphTensor& graph, RunContext& ctx) const {
  const DType dtype = ctx.dtype();
  GraphTensor current = graph;

  if (!edge_sets.empty()) {
    std::map<std::string, FeatureMap> edge_updates;
    for (const auto& [name, layer] : edge_sets) {
      Tensor state = layer->Call(graph, name, ctx);
      RequireRows(state, graph.edge_set(name).total_size(), layer->output_dim(),
                  "new state of edge set " + name);
      edge_updates[name][kHiddenState] = Feature(state);
    }
    current = current.ReplaceFeatures({}, {}, edge_updates);
  }

  std::map<std::string, FeatureMap> node_updates;
  for (const auto& [node_set, update] : node_sets) {
    if (!update.next_state) throw InvalidArgument("node set " + node_set + " has no next state");
    std::vector<std::pair<std::string, Tensor>> inputs;
    for (const auto& [edge_set, conv] : update.convs) {
      if (conv->receiver_tag() == EndpointTag::kContext ||
          EndpointSet(current, edge_set, conv->receiver_tag()) != node_set) {
        throw InvalidArgument("receiver mismatch: conv on " + edge_set + " with receiver " +
                              EndpointTagName(conv->receiver_tag()) + " does not update " +
                              node_set);
      }
      inputs.emplace_back(edge_set, conv->Call(current, edge_set, ctx));
    }
    const NodeSet& set = current.node_set(node_set);
    Tensor previous = HiddenOf(set.features, node_set, dtype);
    std::optional<Tensor> context;
    if (update.use_context) {
      context = GatherRows(HiddenOf(current.context(), "context", dtype),
                           ComponentIds(set.sizes));
    }
    Tensor state = update.next_state->Call(previous, inputs, context, ctx);
    RequireRows(state, set.total_size(), update.next_state->output_dim(),
                "new state of node set " + node_set);
    node_updates[node_set][kHiddenState] = Feature(state);
  }
  if (!node_updates.empty()) current = current.ReplaceFeatures({}, node_updates, {});

  if (context) {
    if (!context->next_state) throw InvalidArgument("context update has no next state");
    std::vector<std::pair<std::string, Tensor>> inputs;
    for (const auto& [set, conv] : context->convs) {
      if (conv->receiver_tag() != EndpointTag::kContext) {
        throw InvalidArgument("receiver mismatch: conv on " + set + " does not target the context");
      }
      inputs.emplace_back(set, conv->Call(current, set, ctx));
    }
    Tensor previous = HiddenOf(current.context(), "context", dtype);
    Tensor state = context->next_state->Call(previous, inputs, std::nullopt, ctx);
    RequireRows(state, current.num_components(), context->next_state->output_dim(),
                "new context state");
    current = current.ReplaceContextFeatures({{kHiddenState, Feature(state)}});
  }
  return current;
}

Tensor ReadoutRoot(const GraphTensor& graph, const std::string& node_set,
                   const std::vector<bool>& component_mask) {
  const NodeSet& set = graph.node_set(node_set);
  auto it = set.features.find(kHiddenState);
  if (it == set.features.end()) throw InvalidArgument("node set " + node_set + " has no " + kHiddenState);
  if (!component_mask.empty() &&
      static_cast<int64_t>(component_mask.size()) != graph.num_components()) {
    throw DimensionError("component mask has " + std::to_string(component_mask.size()) +
                         " entries for " + std::to_string(graph.num_components()) +
                         " components");
  }
  const std::vector<int64_t> offsets = Offsets(set.sizes);
  std::vector<int64_t> roots(graph.num_components());
  for (int64_t c = 0; c < graph.num_components(); ++c) {
    if (set.sizes[c] > 0) {
      roots[c] = offsets[c];
    } else if (!component_mask.empty() && !component_mask[c] && set.total_size() > 0) {
      roots[c] = 0;
    } else {
      throw InvalidArgument("node set " + node_set + " is empty in component " +
                            std::to_string(c));
    }
  }
  return GatherRows(it->second.tensor(), roots);
}

}  // namespace hetgnn
