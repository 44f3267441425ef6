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
#include <filesystem>
#include <utility>

#include "hetgnn/sampler.h"

namespace hetgnn {
namespace {

Csr BuildCsr(int64_t rows, const std::vector<int64_t>& row_of, const std::vector<int64_t>& far) {
  Csr csr;
  csr.offsets.assign(rows + 1, 0);
  for (int64_t r : row_of) ++csr.offsets[r + 1];
  for (int64_t r = 0; r < rows; ++r) csr.offsets[r + 1] += csr.offsets[r];
  csr.edges.resize(row_of.size());
  csr.neighbors.resize(row_of.size());
  std::vector<int64_t> next(csr.offsets.begin(), csr.offsets.end() - 1);
  for (size_t e = 0; e < row_of.size(); ++e) {
    const int64_t slot = next[row_of[e]]++;
    csr.edges[slot] = static_cast<int64_t>(e);
    csr.neighbors[slot] = far[e];
  }
  return csr;
}

}  // namespace

GraphStore GraphStore::Build(const GraphSchema& schema, std::map<std::string, NodeTable> nodes,
                             std::map<std::string, EdgeTable> edges) {
  GraphStore store;
  store.schema_ = std::make_shared<const GraphSchema>(schema);
  for (const auto& [name, spec] : schema.node_sets) {
    auto it = nodes.find(name);
    if (it == nodes.end()) throw ValidationError("no table for node set " + name);
    Nodes& n = store.nodes_[name];
    n.ids = std::move(it->second.ids);
    n.features = std::move(it->second.features);
    n.index.reserve(n.ids.size());
    for (size_t i = 0; i < n.ids.size(); ++i) {
      if (!n.index.emplace(n.ids[i], static_cast<int64_t>(i)).second) {
        throw ValidationError("duplicate node id \"" + n.ids[i] + "\" in node set " + name);
      }
    }
  }
  for (const auto& [name, spec] : schema.edge_sets) {
    auto it = edges.find(name);
    if (it == edges.end()) throw ValidationError("no table for edge set " + name);
    EdgeTable& table = it->second;
    if (table.source_ids.size() != table.target_ids.size()) {
      throw ValidationError("edge set " + name + " has unequal endpoint columns");
    }
    Edges& e = store.edges_[name];
    auto resolve = [&](const std::string& set, const std::string& id, const char* end) {
      const Nodes& n = store.nodes_.at(set);
      auto found = n.index.find(id);
      if (found == n.index.end()) {
        throw ValidationError("edge set " + name + ": unknown " + end + " id \"" + id +
                              "\" in node set " + set);
      }
      return found->second;
    };
    for (size_t k = 0; k < table.source_ids.size(); ++k) {
      e.source.push_back(resolve(spec.source, table.source_ids[k], "source"));
      e.target.push_back(resolve(spec.target, table.target_ids[k], "target"));
    }
    e.features = std::move(table.features);
    e.forward = BuildCsr(static_cast<int64_t>(store.nodes_.at(spec.source).ids.size()), e.source,
                         e.target);
    e.reverse = BuildCsr(static_cast<int64_t>(store.nodes_.at(spec.target).ids.size()), e.target,
                         e.source);
  }

  // Features are checked against the schema through a one-component view.
  std::map<std::string, NodeSet> node_sets;
  for (const auto& [name, n] : store.nodes_) {
    node_sets[name] = NodeSet{{static_cast<int64_t>(n.ids.size())}, n.features};
  }
  std::map<std::string, EdgeSet> edge_sets;
  for (const auto& [name, e] : store.edges_) {
    const EdgeSetSpec& spec = schema.edge_set(name);
    edge_sets[name] = EdgeSet{{static_cast<int64_t>(e.source.size())},
                              Adjacency(spec.source, e.source, spec.target, e.target), e.features};
  }
  GraphSchema sets_only = schema;
  sets_only.context.clear();
  GraphTensor view = GraphTensor::FromPiecesUnchecked({}, node_sets, edge_sets);
  std::vector<std::string> violations = ValidateGraph(sets_only, view);
  if (!violations.empty()) throw ValidationError("graph store: " + violations.front());
  return store;
}

GraphStore GraphStore::Load(const GraphSchema& schema, const std::string& base_dir) {
  namespace fs = std::filesystem;
  auto path_of = [&](const std::string& set, const SetMetadata& metadata) {
    if (!metadata.filename) throw ValidationError("set " + set + " has no metadata filename");
    fs::path p(*metadata.filename);
    return (p.is_absolute() ? p : fs::path(base_dir) / p).string();
  };
  std::map<std::string, NodeTable> nodes;
  for (const auto& [name, spec] : schema.node_sets) {
    nodes[name] = ReadNodeTable(path_of(name, spec.metadata), spec);
  }
  std::map<std::string, EdgeTable> edges;
  for (const auto& [name, spec] : schema.edge_sets) {
    edges[name] = ReadEdgeTable(path_of(name, spec.metadata), spec);
  }
  return Build(schema, std::move(nodes), std::move(edges));
}

const GraphStore::Nodes& GraphStore::nodes(const std::string& name) const {
  auto it = nodes_.find(name);
  if (it == nodes_.end()) throw InvalidArgument("graph store has no node set " + name);
  return it->second;
}

const GraphStore::Edges& GraphStore::edges(const std::string& name) const {
  auto it = edges_.find(name);
  if (it == edges_.end()) throw InvalidArgument("graph store has no edge set " + name);
  return it->second;
}

int64_t GraphStore::num_nodes(const std::string& node_set) const {
  return static_cast<int64_t>(nodes(node_set).ids.size());
}

int64_t GraphStore::num_edges(const std::string& edge_set) const {
  return static_cast<int64_t>(edges(edge_set).source.size());
}

std::optional<int64_t> GraphStore::FindNode(const std::string& node_set,
                                            const std::string& id) const {
  const Nodes& n = nodes(node_set);
  auto it = n.index.find(id);
  if (it == n.index.end()) return std::nullopt;
  return it->second;
}

const std::string& GraphStore::NodeId(const std::string& node_set, int64_t index) const {
  return nodes(node_set).ids.at(index);
}

const FeatureMap& GraphStore::node_features(const std::string& node_set) const {
  return nodes(node_set).features;
}

const FeatureMap& GraphStore::edge_features(const std::string& edge_set) const {
  return edges(edge_set).features;
}

std::span<const int64_t> GraphStore::edge_sources(const std::string& edge_set) const {
  return edges(edge_set).source;
}

std::span<const int64_t> GraphStore::edge_targets(const std::string& edge_set) const {
  return edges(edge_set).target;
}

const Csr& GraphStore::forward(const std::string& edge_set) const { return edges(edge_set).forward; }

const Csr& GraphStore::reverse(const std::string& edge_set) const { return edges(edge_set).reverse; }

}  // namespace hetgnn
