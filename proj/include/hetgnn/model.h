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
#ifndef HETGNN_MODEL_H_
#define HETGNN_MODEL_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetgnn/layers.h"
#include "hetgnn/schema.h"

namespace hetgnn {

// One step of a feature pipeline.
struct FeatureStep {
  enum class Kind { kHashBucket, kEmbed, kDense, kLog1p, kRaggedMeanToDense, kMakeEmpty };
  Kind kind = Kind::kDense;
  int64_t buckets = 0;  // hash_bucket
  int64_t vocab = 0;    // embed
  int64_t dim = 0;      // embed, make_empty
  int64_t units = 0;    // dense
  Activation activation;
};

// Transforms one input feature. `feature` may be empty when the first step
// is make_empty.
struct FeaturePipeline {
  std::string feature;
  std::vector<FeatureStep> steps;
};

// The outputs of a set's pipelines are concatenated into its hidden_state.
using SetPipelines = std::vector<FeaturePipeline>;

struct FeatureMapConfig {
  std::map<std::string, SetPipelines> node_sets;
  std::map<std::string, SetPipelines> edge_sets;
  std::optional<SetPipelines> context;
};

// Builds the initial hidden states. Other features are kept.
class MapFeatures {
 public:
  MapFeatures() = default;
  MapFeatures(ParameterStore& params, const std::string& name, const GraphSchema& schema,
              FeatureMapConfig config);
  GraphTensor Call(const GraphTensor& graph, RunContext& ctx) const;

  const std::map<std::string, int64_t>& node_dims() const { return node_dims_; }
  const std::map<std::string, int64_t>& edge_dims() const { return edge_dims_; }
  std::optional<int64_t> context_dim() const { return context_dim_; }

 private:
  struct Compiled {
    FeaturePipeline pipeline;
    // Per step; unused entries stay default/empty.
    std::vector<DenseParams> dense;
    std::vector<std::string> tables;
  };
  Tensor RunSet(const FeatureMap& features, int64_t num_items, const std::vector<Compiled>& set,
                RunContext& ctx) const;

  std::map<std::string, std::vector<Compiled>> node_sets_;
  std::map<std::string, std::vector<Compiled>> edge_sets_;
  std::optional<std::vector<Compiled>> context_;
  std::map<std::string, int64_t> node_dims_;
  std::map<std::string, int64_t> edge_dims_;
  std::optional<int64_t> context_dim_;
};

// One entry of the model's layer stack, applied `rounds` times.
struct LayerConfig {
  std::string type;  // vanilla_mpnn, gcn, sage, rgcn, gatv2
  int64_t rounds = 1;
  bool share_weights = false;
  std::map<std::string, std::vector<std::string>> node_sets;  // node set -> edge sets
  EndpointTag receiver_tag = EndpointTag::kTarget;
  int64_t units = 0;
  int64_t message_dim = 0;
  int64_t num_heads = 1;
  int64_t per_head_channels = 0;
  double dropout = 0.0;
  double edge_dropout = 0.0;
  bool layer_norm = false;
  ReduceType reduce_type = ReduceType::kSum;
  Activation activation{ActivationKind::kRelu};
};

struct ModelConfig {
  FeatureMapConfig feature_maps;
  std::vector<LayerConfig> layers;
};

// JSON form:
// {"feature_maps": {"node_sets": {"paper": [{"feature": "feat",
//    "steps": [{"op": "dense", "units": 32}]}]}, "edge_sets": {}, "context": [...]},
//  "layers": [{"type": "vanilla_mpnn", "rounds": 2, "units": 32, "message_dim": 32,
//    "receiver_tag": "target", "node_sets": {"paper": ["cites"]}}]}
ModelConfig ParseModelConfig(std::string_view text);
std::string SerializeModelConfig(const ModelConfig& config);

// Feature mapping followed by the configured graph updates.
class Model {
 public:
  Model(const ModelConfig& config, const GraphSchema& schema, ParameterStore& params);
  GraphTensor Call(const GraphTensor& graph, RunContext& ctx) const;

  const ModelConfig& config() const { return config_; }
  const std::vector<GraphUpdate>& updates() const { return updates_; }
  // hidden_state width of each node set after the last update.
  const std::map<std::string, int64_t>& node_dims() const { return node_dims_; }

 private:
  ModelConfig config_;
  MapFeatures map_features_;
  std::vector<GraphUpdate> updates_;
  std::map<std::string, int64_t> node_dims_;
};

}  // namespace hetgnn

#endif  // HETGNN_MODEL_H_
