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
#include <algorithm>
#include <exception>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "hetgnn/rng.h"
#include "hetgnn/sampler.h"

namespace hetgnn {
namespace {

// Ordered set of node indices.
class NodeList {
 public:
  bool Add(int64_t node) {
    if (!seen_.insert(node).second) return false;
    items_.push_back(node);
    return true;
  }
  const std::vector<int64_t>& items() const { return items_; }

 private:
  std::vector<int64_t> items_;
  std::unordered_set<int64_t> seen_;
};

struct PairHash {
  size_t operator()(const std::pair<int64_t, int64_t>& p) const {
    return std::hash<int64_t>()(p.first) * 0x9e3779b97f4a7c15ULL ^ std::hash<int64_t>()(p.second);
  }
};

struct EdgeRows {
  std::vector<int64_t> rows;
  std::unordered_set<std::pair<int64_t, int64_t>, PairHash> seen;
};

FeatureMap GatherAll(const FeatureMap& features, const std::vector<int64_t>& rows) {
  FeatureMap out;
  for (const auto& [name, f] : features) out.emplace(name, f.Gather(rows));
  return out;
}

}  // namespace

std::vector<SampledEdge> SampleEdges(const GraphStore& store, int64_t node,
                                     const std::string& edge_set, SampleDirection direction,
                                     int64_t sample_size, uint64_t seed,
                                     const std::string& op_name, int64_t sample_id) {
  const Csr& csr =
      direction == SampleDirection::kForward ? store.forward(edge_set) : store.reverse(edge_set);
  const int64_t begin = csr.offsets[node];
  const int64_t degree = csr.degree(node);
  std::vector<SampledEdge> out;
  if (degree <= sample_size) {
    for (int64_t k = begin; k < begin + degree; ++k) out.push_back({csr.edges[k], csr.neighbors[k]});
    return out;
  }
  // Partial Fisher-Yates over positions 0..degree-1; the map holds only
  // displaced entries.
  RngStream rng(seed, op_name, static_cast<uint64_t>(sample_id), static_cast<uint64_t>(node));
  std::unordered_map<int64_t, int64_t> swapped;
  auto at = [&](int64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<int64_t> picked;
  picked.reserve(sample_size);
  for (int64_t i = 0; i < sample_size; ++i) {
    const int64_t j = i + static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(degree - i)));
    const int64_t vi = at(i), vj = at(j);
    swapped[j] = vi;
    picked.push_back(vj);
  }
  std::sort(picked.begin(), picked.end());
  for (int64_t p : picked) out.push_back({csr.edges[begin + p], csr.neighbors[begin + p]});
  return out;
}

GraphTensor SampleSubgraph(const GraphStore& store, const SamplingSpec& spec, const SeedNode& seed,
                           int64_t sample_id, uint64_t global_seed) {
  const GraphSchema& schema = store.schema();
  if (!schema.context.empty()) {
    throw InvalidArgument("sampling does not support schemas with context features");
  }
  if (seed.node_set != spec.seed_op.node_set_name) {
    throw ValidationError("seed node set " + seed.node_set + " does not match the seed op's " +
                          spec.seed_op.node_set_name);
  }
  const std::optional<int64_t> root = store.FindNode(seed.node_set, seed.id);
  if (!root) {
    throw ValidationError("unknown seed id \"" + seed.id + "\" in node set " + seed.node_set);
  }

  std::map<std::string, NodeList> nodes;
  std::map<std::string, EdgeRows> edges;
  nodes[seed.node_set].Add(*root);

  std::unordered_map<std::string, NodeList> outputs;
  outputs[spec.seed_op.op_name].Add(*root);
  for (const SamplingOp& op : spec.sampling_ops) {
    NodeList frontier;
    for (const std::string& in : op.input_op_names) {
      auto it = outputs.find(in);
      if (it == outputs.end()) {
        throw ValidationError("sampling op \"" + op.op_name + "\" runs before its input \"" + in +
                              "\"");
      }
      for (int64_t n : it->second.items()) frontier.Add(n);
    }
    const std::string far_set = OpNodeSet(schema, op);
    std::span<const int64_t> sources = store.edge_sources(op.edge_set_name);
    std::span<const int64_t> targets = store.edge_targets(op.edge_set_name);
    NodeList& produced = outputs[op.op_name];
    EdgeRows& rows = edges[op.edge_set_name];
    NodeList& far_nodes = nodes[far_set];
    for (int64_t node : frontier.items()) {
      for (const SampledEdge& e : SampleEdges(store, node, op.edge_set_name, op.direction,
                                              op.sample_size, global_seed, op.op_name,
                                              sample_id)) {
        produced.Add(e.far);
        far_nodes.Add(e.far);
        if (rows.seen.emplace(sources[e.edge], targets[e.edge]).second) rows.rows.push_back(e.edge);
      }
    }
  }

  std::map<std::string, NodeSet> node_sets;
  std::map<std::string, std::unordered_map<int64_t, int64_t>> local;
  for (const auto& [name, spec_unused] : schema.node_sets) {
    const std::vector<int64_t>& items = nodes[name].items();
    auto& index = local[name];
    for (size_t i = 0; i < items.size(); ++i) index[items[i]] = static_cast<int64_t>(i);
    node_sets[name] =
        NodeSet{{static_cast<int64_t>(items.size())}, GatherAll(store.node_features(name), items)};
  }
  std::map<std::string, EdgeSet> edge_sets;
  for (const auto& [name, e] : schema.edge_sets) {
    const std::vector<int64_t>& rows = edges[name].rows;
    std::span<const int64_t> sources = store.edge_sources(name);
    std::span<const int64_t> targets = store.edge_targets(name);
    std::vector<int64_t> src, tgt;
    for (int64_t r : rows) {
      src.push_back(local[e.source].at(sources[r]));
      tgt.push_back(local[e.target].at(targets[r]));
    }
    edge_sets[name] = EdgeSet{{static_cast<int64_t>(rows.size())},
                              Adjacency(e.source, std::move(src), e.target, std::move(tgt)),
                              GatherAll(store.edge_features(name), rows)};
  }
  return GraphTensor::FromPieces({}, std::move(node_sets), std::move(edge_sets));
}

void SampleSubgraphs(const GraphStore& store, const SamplingSpec& spec,
                     const std::vector<SeedNode>& seeds, const SamplerOptions& options,
                     const std::function<void(int64_t, GraphTensor)>& sink) {
  if (options.num_shards < 1) throw InvalidArgument("num_shards must be at least 1");
  if (options.chunk_size < 1) throw InvalidArgument("chunk_size must be at least 1");
  const SamplingSpec checked = CheckSamplingSpec(store.schema(), spec);
  const int64_t n = static_cast<int64_t>(seeds.size());
  const int shards = options.num_shards;
  for (int64_t begin = 0; begin < n; begin += options.chunk_size) {
    const int64_t end = std::min(n, begin + options.chunk_size);
    std::vector<GraphTensor> graphs(end - begin);
    std::vector<std::exception_ptr> errors(end - begin);
    auto work = [&](int shard) {
      for (int64_t i = begin; i < end; ++i) {
        if (i % shards != shard) continue;
        try {
          graphs[i - begin] = SampleSubgraph(store, checked, seeds[i], i, options.seed);
        } catch (...) {
          errors[i - begin] = std::current_exception();
        }
      }
    };
    if (shards == 1) {
      work(0);
    } else {
      std::vector<std::jthread> workers;
      for (int s = 0; s < shards; ++s) workers.emplace_back(work, s);
    }
    for (int64_t i = begin; i < end; ++i) {
      if (errors[i - begin]) std::rethrow_exception(errors[i - begin]);
      sink(i, std::move(graphs[i - begin]));
    }
  }
}

std::vector<GraphTensor> SampleSubgraphs(const GraphStore& store, const SamplingSpec& spec,
                                         const std::vector<SeedNode>& seeds,
                                         const SamplerOptions& options) {
  std::vector<GraphTensor> out(seeds.size());
  SampleSubgraphs(store, spec, seeds, options,
                  [&](int64_t i, GraphTensor g) { out[i] = std::move(g); });
  return out;
}

}  // namespace hetgnn
