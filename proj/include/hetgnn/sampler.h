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
#ifndef HETGNN_SAMPLER_H_
#define HETGNN_SAMPLER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hetgnn/graph_tensor.h"
#include "hetgnn/schema.h"

namespace hetgnn {

// Column holding node ids in node tables, and the endpoint columns of edge
// tables.
inline constexpr char kNodeIdColumn[] = "#id";
inline constexpr char kSourceIdColumn[] = "source_id";
inline constexpr char kTargetIdColumn[] = "target_id";

struct NodeTable {
  std::vector<std::string> ids;
  FeatureMap features;  // one item per id
};

struct EdgeTable {
  std::vector<std::string> source_ids;
  std::vector<std::string> target_ids;
  FeatureMap features;  // one item per edge
};

// Reads a node or edge table from CSV (header row) or NDJSON (.ndjson,
// .jsonl), typed by the set's feature specs. CSV cells holding several
// values (vectors, ragged rows) separate them with ';'. A node table's
// "#id" column is also a feature when the spec declares it.
NodeTable ReadNodeTable(const std::string& path, const NodeSetSpec& spec);
EdgeTable ReadEdgeTable(const std::string& path, const EdgeSetSpec& spec);

// Compressed sparse rows: the edges of row r are edges[offsets[r] ..
// offsets[r + 1]), and neighbors[k] is the far endpoint of edges[k].
struct Csr {
  std::vector<int64_t> offsets;
  std::vector<int64_t> edges;
  std::vector<int64_t> neighbors;
  int64_t degree(int64_t row) const { return offsets[row + 1] - offsets[row]; }
};

// Immutable in-memory graph. Node indices follow table order; forward CSR
// rows are sources, reverse CSR rows are targets.
class GraphStore {
 public:
  // Throws ValidationError for duplicate node ids, dangling endpoint ids and
  // features that do not match the schema.
  static GraphStore Build(const GraphSchema& schema, std::map<std::string, NodeTable> nodes,
                          std::map<std::string, EdgeTable> edges);
  // Loads every set from its metadata filename, relative to `base_dir`.
  static GraphStore Load(const GraphSchema& schema, const std::string& base_dir);

  const GraphSchema& schema() const { return *schema_; }
  int64_t num_nodes(const std::string& node_set) const;
  int64_t num_edges(const std::string& edge_set) const;
  std::optional<int64_t> FindNode(const std::string& node_set, const std::string& id) const;
  const std::string& NodeId(const std::string& node_set, int64_t index) const;
  const FeatureMap& node_features(const std::string& node_set) const;
  const FeatureMap& edge_features(const std::string& edge_set) const;
  std::span<const int64_t> edge_sources(const std::string& edge_set) const;
  std::span<const int64_t> edge_targets(const std::string& edge_set) const;
  const Csr& forward(const std::string& edge_set) const;
  const Csr& reverse(const std::string& edge_set) const;

 private:
  struct Nodes {
    std::vector<std::string> ids;
    std::unordered_map<std::string, int64_t> index;
    FeatureMap features;
  };
  struct Edges {
    std::vector<int64_t> source;
    std::vector<int64_t> target;
    FeatureMap features;
    Csr forward;
    Csr reverse;
  };
  const Nodes& nodes(const std::string& name) const;
  const Edges& edges(const std::string& name) const;

  std::shared_ptr<const GraphSchema> schema_;
  std::map<std::string, Nodes> nodes_;
  std::map<std::string, Edges> edges_;
};

enum class SampleDirection { kForward, kReverse };
const char* SampleDirectionName(SampleDirection direction);
enum class SamplingStrategy { kRandomUniform };

struct SeedOp {
  std::string op_name;
  std::string node_set_name;
};

struct SamplingOp {
  std::string op_name;
  std::vector<std::string> input_op_names;
  std::string edge_set_name;
  SampleDirection direction = SampleDirection::kForward;
  int64_t sample_size = 0;
  SamplingStrategy strategy = SamplingStrategy::kRandomUniform;
};

struct SamplingSpec {
  SeedOp seed_op;
  std::vector<SamplingOp> sampling_ops;  // topologically ordered
};

// Checks names, references and endpoint sets, and returns the spec with its
// ops in execution order. Throws ValidationError (naming "cycle" when the
// ops cannot be ordered).
SamplingSpec CheckSamplingSpec(const GraphSchema& schema, SamplingSpec spec);
// Node set produced by an op.
std::string OpNodeSet(const GraphSchema& schema, const SamplingOp& op);

SamplingSpec ParseSamplingSpec(std::string_view text);
std::string SerializeSamplingSpec(const SamplingSpec& spec);

// Fluent construction of sampling specs. Ops are named "A->B" after the
// node set they expand from, or "(X|Y)->B" after the ops they join.
class SamplingSpecBuilder {
 public:
  class Op {
   public:
    // Samples up to `sample_size` edges of `edge_set` from every node this
    // op produces.
    Op Sample(int64_t sample_size, const std::string& edge_set,
              SampleDirection direction = SampleDirection::kForward) const;
    // This op followed by `others`; they must produce the same node set.
    Op Join(const std::vector<Op>& others) const;
    SamplingSpec Build() const;
    const std::string& node_set() const { return node_set_; }
    const std::vector<std::string>& op_names() const { return names_; }

   private:
    friend class SamplingSpecBuilder;
    struct State;
    Op(std::shared_ptr<State> state, std::vector<std::string> names, std::string node_set)
        : state_(std::move(state)), names_(std::move(names)), node_set_(std::move(node_set)) {}
    std::shared_ptr<State> state_;
    std::vector<std::string> names_;
    std::string node_set_;
  };

  SamplingSpecBuilder(GraphSchema schema,
                      SamplingStrategy strategy = SamplingStrategy::kRandomUniform);
  Op Seed(const std::string& node_set) const;

 private:
  std::shared_ptr<const GraphSchema> schema_;
  SamplingStrategy strategy_;
};

struct SampledEdge {
  int64_t edge = 0;  // edge row in the store
  int64_t far = 0;   // endpoint reached by the expansion
};

// Samples up to `sample_size` edges of `node` (all of them when the degree
// is at most `sample_size`), uniformly without replacement. The stream is
// addressed by (seed, op_name, sample_id, node).
std::vector<SampledEdge> SampleEdges(const GraphStore& store, int64_t node,
                                     const std::string& edge_set, SampleDirection direction,
                                     int64_t sample_size, uint64_t seed,
                                     const std::string& op_name, int64_t sample_id);

struct SeedNode {
  std::string node_set;
  std::string id;
};

struct SamplerOptions {
  uint64_t seed = 0;
  int num_shards = 1;
  // Seeds sampled per round of shard work before results are emitted.
  int64_t chunk_size = 4096;
};

// One rooted, single-component subgraph for `seed` (sample id
// `sample_id`): the seed at local index 0 of its node set, every other
// node and edge in first-visit order, parallel edges collapsed, and all
// schema features attached.
GraphTensor SampleSubgraph(const GraphStore& store, const SamplingSpec& spec, const SeedNode& seed,
                           int64_t sample_id, uint64_t global_seed);

// Samples every seed; seed i gets sample id i. Seeds are dealt round-robin
// to `num_shards` worker threads, and `sink` receives results in seed
// order, so output does not depend on the shard count.
void SampleSubgraphs(const GraphStore& store, const SamplingSpec& spec,
                     const std::vector<SeedNode>& seeds, const SamplerOptions& options,
                     const std::function<void(int64_t, GraphTensor)>& sink);
std::vector<GraphTensor> SampleSubgraphs(const GraphStore& store, const SamplingSpec& spec,
                                         const std::vector<SeedNode>& seeds,
                                         const SamplerOptions& options);

}  // namespace hetgnn

#endif  // HETGNN_SAMPLER_H_
