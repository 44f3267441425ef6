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
#include <optional>

#include "hetgnn/graph_tensor.h"

namespace hetgnn {
namespace {

int64_t Target(const std::map<std::string, int64_t>& targets, const std::string& name,
               int64_t current) {
  auto it = targets.find(name);
  return it == targets.end() ? current : it->second;
}

// Reason the graph does not fit, if any.
std::optional<std::string> FitProblem(const GraphTensor& graph, const SizeConstraints& c) {
  bool needs_padding = false;
  for (const auto& [name, unused] : c.total_nodes) {
    if (!graph.node_sets().count(name)) return "size constraint for unknown node set " + name;
  }
  for (const auto& [name, unused] : c.total_edges) {
    if (!graph.edge_sets().count(name)) return "size constraint for unknown edge set " + name;
  }
  for (const auto& [name, set] : graph.node_sets()) {
    const int64_t have = set.total_size();
    const int64_t want = Target(c.total_nodes, name, have);
    if (have > want) {
      return "node set " + name + " has " + std::to_string(have) + " nodes, budget " +
             std::to_string(want);
    }
    needs_padding |= want > have;
  }
  for (const auto& [name, set] : graph.edge_sets()) {
    const int64_t have = set.total_size();
    const int64_t want = Target(c.total_edges, name, have);
    if (have > want) {
      return "edge set " + name + " has " + std::to_string(have) + " edges, budget " +
             std::to_string(want);
    }
    if (want > have) {
      needs_padding = true;
      for (const std::string& endpoint :
           {set.adjacency.source_set(), set.adjacency.target_set()}) {
        const int64_t n = graph.node_set(endpoint).total_size();
        if (Target(c.total_nodes, endpoint, n) <= n) {
          return "padding edges of " + name + " need at least one padding node in " + endpoint;
        }
      }
    }
  }
  if (graph.num_components() > c.total_components) {
    return "graph has " + std::to_string(graph.num_components()) + " components, budget " +
           std::to_string(c.total_components);
  }
  if (needs_padding && c.total_components < graph.num_components() + 1) {
    return "padding needs a spare component beyond the " +
           std::to_string(graph.num_components()) + " real ones";
  }
  return std::nullopt;
}

}  // namespace

bool FitsSizeConstraints(const GraphTensor& graph, const SizeConstraints& constraints) {
  return !FitProblem(graph, constraints).has_value();
}

PaddedGraph PadToTotalSizes(const GraphTensor& graph, const SizeConstraints& constraints) {
  if (auto problem = FitProblem(graph, constraints)) throw FitError(*problem);
  const int64_t real = graph.num_components();
  const int64_t extra = constraints.total_components - real;
  PaddedGraph out;
  out.component_mask.assign(static_cast<size_t>(real), true);
  out.component_mask.resize(static_cast<size_t>(constraints.total_components), false);
  if (extra == 0) {
    out.graph = graph;
    return out;
  }

  auto pad_features = [](const FeatureMap& features, int64_t n) {
    FeatureMap padded;
    for (const auto& [name, f] : features) {
      std::vector<Feature> parts{f, Feature::Filler(f, n)};
      padded.emplace(name, Feature::Concat(parts));
    }
    return padded;
  };
  auto pad_sizes = [extra](std::vector<int64_t> sizes, int64_t n) {
    sizes.push_back(n);
    sizes.insert(sizes.end(), static_cast<size_t>(extra - 1), 0);
    return sizes;
  };

  std::map<std::string, NodeSet> nodes;
  for (const auto& [name, set] : graph.node_sets()) {
    const int64_t pad = Target(constraints.total_nodes, name, set.total_size()) - set.total_size();
    nodes.emplace(name, NodeSet{pad_sizes(set.sizes, pad), pad_features(set.features, pad)});
  }
  std::map<std::string, EdgeSet> edges;
  for (const auto& [name, set] : graph.edge_sets()) {
    const int64_t pad = Target(constraints.total_edges, name, set.total_size()) - set.total_size();
    const Adjacency& adj = set.adjacency;
    std::vector<int64_t> src(adj.source().begin(), adj.source().end());
    std::vector<int64_t> tgt(adj.target().begin(), adj.target().end());
    // The first padding node of each endpoint set sits right after the real nodes.
    src.insert(src.end(), static_cast<size_t>(pad), graph.node_set(adj.source_set()).total_size());
    tgt.insert(tgt.end(), static_cast<size_t>(pad), graph.node_set(adj.target_set()).total_size());
    edges.emplace(name, EdgeSet{pad_sizes(set.sizes, pad),
                                Adjacency(adj.source_set(), std::move(src), adj.target_set(),
                                          std::move(tgt)),
                                pad_features(set.features, pad)});
  }
  out.graph = GraphTensor::FromPieces(pad_features(graph.context(), extra), std::move(nodes),
                                      std::move(edges));
  return out;
}

}  // namespace hetgnn
