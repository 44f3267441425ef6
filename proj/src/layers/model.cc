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
#include "hetgnn/model.h"

#include <memory>
#include <set>

#include "common/json_util.h"

namespace hetgnn {
namespace {

using json = nlohmann::json;
using Kind = FeatureStep::Kind;

[[noreturn]] void Bad(const std::string& where, const std::string& why) {
  throw InvalidArgument("model config " + where + ": " + why);
}

void CheckKeys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) Bad(where, "must be an object");
  for (const auto& [key, unused] : obj.items()) {
    if (!allowed.count(key)) Bad(where, "unknown key \"" + key + "\"");
  }
}

template <typename T>
T Get(const json& obj, const std::string& key, const std::string& where, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    Bad(where, "bad value for \"" + key + "\"");
  }
}

const std::map<std::string, Kind>& StepKinds() {
  static const std::map<std::string, Kind> kinds = {
      {"hash_bucket", Kind::kHashBucket},
      {"embed", Kind::kEmbed},
      {"dense", Kind::kDense},
      {"log1p", Kind::kLog1p},
      {"ragged_mean_to_dense", Kind::kRaggedMeanToDense},
      {"make_empty", Kind::kMakeEmpty},
  };
  return kinds;
}

SetPipelines ParsePipelines(const json& arr, const std::string& where) {
  if (!arr.is_array()) Bad(where, "must be a list of pipelines");
  SetPipelines out;
  for (const json& p : arr) {
    CheckKeys(p, where, {"feature", "steps"});
    FeaturePipeline pipeline;
    pipeline.feature = Get<std::string>(p, "feature", where, "");
    const std::string pwhere = where + "." + pipeline.feature;
    auto steps = p.find("steps");
    if (steps != p.end()) {
      if (!steps->is_array()) Bad(pwhere, "steps must be a list");
      for (const json& s : *steps) {
        CheckKeys(s, pwhere, {"op", "buckets", "vocab", "dim", "units", "activation"});
        const std::string op = Get<std::string>(s, "op", pwhere, "");
        auto kind = StepKinds().find(op);
        if (kind == StepKinds().end()) Bad(pwhere, "unknown step \"" + op + "\"");
        FeatureStep step;
        step.kind = kind->second;
        step.buckets = Get<int64_t>(s, "buckets", pwhere, 0);
        step.vocab = Get<int64_t>(s, "vocab", pwhere, 0);
        step.dim = Get<int64_t>(s, "dim", pwhere, 0);
        step.units = Get<int64_t>(s, "units", pwhere, 0);
        step.activation = Activation::Parse(Get<std::string>(s, "activation", pwhere, "identity"));
        pipeline.steps.push_back(step);
      }
    }
    out.push_back(std::move(pipeline));
  }
  return out;
}

json PipelinesToJson(const SetPipelines& pipelines) {
  json arr = json::array();
  for (const FeaturePipeline& p : pipelines) {
    json steps = json::array();
    for (const FeatureStep& s : p.steps) {
      json j;
      for (const auto& [name, kind] : StepKinds()) {
        if (kind == s.kind) j["op"] = name;
      }
      switch (s.kind) {
        case Kind::kHashBucket:
          j["buckets"] = s.buckets;
          break;
        case Kind::kEmbed:
          j["vocab"] = s.vocab;
          j["dim"] = s.dim;
          break;
        case Kind::kDense:
          j["units"] = s.units;
          j["activation"] = s.activation.Name();
          break;
        case Kind::kMakeEmpty:
          j["dim"] = s.dim;
          break;
        default:
          break;
      }
      steps.push_back(j);
    }
    json jp;
    if (!p.feature.empty()) jp["feature"] = p.feature;
    jp["steps"] = steps;
    arr.push_back(jp);
  }
  return arr;
}

const std::set<std::string>& LayerTypes() {
  static const std::set<std::string> types = {"vanilla_mpnn", "gcn", "sage", "rgcn", "gatv2"};
  return types;
}

}  // namespace

ModelConfig ParseModelConfig(std::string_view text) {
  json doc = internal::ParseJson(text, "model config");
  CheckKeys(doc, "root", {"feature_maps", "layers"});
  ModelConfig config;
  if (auto fm = doc.find("feature_maps"); fm != doc.end()) {
    CheckKeys(*fm, "feature_maps", {"node_sets", "edge_sets", "context"});
    for (const char* kind : {"node_sets", "edge_sets"}) {
      auto sets = fm->find(kind);
      if (sets == fm->end()) continue;
      if (!sets->is_object()) Bad(kind, "must map set names to pipelines");
      auto& dst = std::string(kind) == "node_sets" ? config.feature_maps.node_sets
                                                   : config.feature_maps.edge_sets;
      for (const auto& [name, pipelines] : sets->items()) {
        dst[name] = ParsePipelines(pipelines, name);
      }
    }
    if (auto ctx = fm->find("context"); ctx != fm->end()) {
      config.feature_maps.context = ParsePipelines(*ctx, "context");
    }
  }
  if (auto layers = doc.find("layers"); layers != doc.end()) {
    if (!layers->is_array()) Bad("layers", "must be a list");
    for (size_t i = 0; i < layers->size(); ++i) {
      const json& l = (*layers)[i];
      const std::string where = "layers[" + std::to_string(i) + "]";
      CheckKeys(l, where,
                {"type", "rounds", "share_weights", "node_sets", "receiver_tag", "units",
                 "message_dim", "num_heads", "per_head_channels", "dropout", "edge_dropout",
                 "layer_norm", "reduce", "activation"});
      LayerConfig c;
      c.type = Get<std::string>(l, "type", where, "");
      if (!LayerTypes().count(c.type)) Bad(where, "unknown layer type \"" + c.type + "\"");
      c.rounds = Get<int64_t>(l, "rounds", where, 1);
      c.share_weights = Get<bool>(l, "share_weights", where, false);
      c.receiver_tag = ParseEndpointTag(Get<std::string>(l, "receiver_tag", where, "target"));
      c.units = Get<int64_t>(l, "units", where, 0);
      c.message_dim = Get<int64_t>(l, "message_dim", where, c.units);
      c.num_heads = Get<int64_t>(l, "num_heads", where, 1);
      c.per_head_channels = Get<int64_t>(l, "per_head_channels", where, 0);
      c.dropout = Get<double>(l, "dropout", where, 0.0);
      c.edge_dropout = Get<double>(l, "edge_dropout", where, 0.0);
      c.layer_norm = Get<bool>(l, "layer_norm", where, false);
      c.reduce_type = ParseReduceType(
          Get<std::string>(l, "reduce", where, c.type == "sage" || c.type == "rgcn" ? "mean" : "sum"));
      c.activation = Activation::Parse(Get<std::string>(l, "activation", where, "relu"));
      auto sets = l.find("node_sets");
      if (sets == l.end() || !sets->is_object() || sets->empty()) {
        Bad(where, "node_sets must map node sets to edge set lists");
      }
      for (const auto& [name, edges] : sets->items()) {
        try {
          c.node_sets[name] = edges.get<std::vector<std::string>>();
        } catch (const json::exception&) {
          Bad(where, "edge sets of " + name + " must be a list of names");
        }
      }
      if (c.rounds < 1) Bad(where, "rounds must be at least 1");
      if (c.units <= 0) Bad(where, "units must be positive");
      config.layers.push_back(std::move(c));
    }
  }
  return config;
}

std::string SerializeModelConfig(const ModelConfig& config) {
  json fm;
  fm["node_sets"] = json::object();
  for (const auto& [name, p] : config.feature_maps.node_sets) fm["node_sets"][name] = PipelinesToJson(p);
  fm["edge_sets"] = json::object();
  for (const auto& [name, p] : config.feature_maps.edge_sets) fm["edge_sets"][name] = PipelinesToJson(p);
  if (config.feature_maps.context) fm["context"] = PipelinesToJson(*config.feature_maps.context);
  json layers = json::array();
  for (const LayerConfig& c : config.layers) {
    json l;
    l["type"] = c.type;
    l["rounds"] = c.rounds;
    l["share_weights"] = c.share_weights;
    l["node_sets"] = c.node_sets;
    l["receiver_tag"] = EndpointTagName(c.receiver_tag);
    l["units"] = c.units;
    l["message_dim"] = c.message_dim;
    l["num_heads"] = c.num_heads;
    l["per_head_channels"] = c.per_head_channels;
    l["dropout"] = c.dropout;
    l["edge_dropout"] = c.edge_dropout;
    l["layer_norm"] = c.layer_norm;
    l["reduce"] = ReduceTypeName(c.reduce_type);
    l["activation"] = c.activation.Name();
    layers.push_back(l);
  }
  json doc;
  doc["feature_maps"] = fm;
  doc["layers"] = layers;
  return doc.dump();
}

Model::Model(const ModelConfig& config, const GraphSchema& schema, ParameterStore& params)
    : config_(config),
      map_features_(params, "features", schema, config.feature_maps),
      node_dims_(map_features_.node_dims()) {
  for (size_t i = 0; i < config.layers.size(); ++i) {
    const LayerConfig& c = config.layers[i];
    const std::string where = "layers[" + std::to_string(i) + "]";
    if (c.receiver_tag == EndpointTag::kContext) Bad(where, "node updates need a node receiver");
    std::optional<GraphUpdate> shared;
    for (int64_t round = 0; round < c.rounds; ++round) {
      if (shared) {
        for (const auto& [set, unused] : c.node_sets) {
          if (node_dims_[set] != c.units) {
            Bad(where, "shared weights need units equal to the state width of " + set);
          }
        }
        updates_.push_back(*shared);
        continue;
      }
      const std::string prefix = "layer" + std::to_string(i) +
                                 (c.share_weights ? "" : "/round" + std::to_string(round));
      GraphUpdate update;
      std::map<std::string, int64_t> new_dims;
      for (const auto& [node_set, edge_sets] : c.node_sets) {
        if (!node_dims_.count(node_set)) Bad(where, "node set " + node_set + " has no hidden state");
        const int64_t self_dim = node_dims_[node_set];
        NodeSetUpdate nu;
        int64_t pooled_width = 0;
        for (const std::string& edge_set : edge_sets) {
          const EdgeSetSpec& spec = schema.edge_set(edge_set);
          const bool to_source = c.receiver_tag == EndpointTag::kSource;
          const std::string& receiver = to_source ? spec.source : spec.target;
          const std::string& sender = to_source ? spec.target : spec.source;
          if (receiver != node_set) {
            Bad(where, "receiver mismatch: " + edge_set + " delivers to " + receiver + ", not " +
                           node_set);
          }
          if (!node_dims_.count(sender)) Bad(where, "node set " + sender + " has no hidden state");
          const int64_t sender_dim = node_dims_[sender];
          const std::string name = prefix + "/" + node_set + "/" + edge_set;
          std::shared_ptr<const Conv> conv;
          if (c.type == "vanilla_mpnn") {
            conv = std::make_shared<VanillaMpnnConv>(
                params, name,
                VanillaMpnnConv::Options{sender_dim, self_dim, 0, c.message_dim, c.receiver_tag,
                                         c.reduce_type, c.dropout});
          } else if (c.type == "gcn") {
            if (edge_sets.size() != 1 || spec.source != spec.target) {
              Bad(where, "gcn updates a node set from exactly one homogeneous edge set");
            }
            conv = std::make_shared<GcnConv>(
                params, name,
                GcnConv::Options{self_dim, c.units, c.receiver_tag, c.activation, false});
          } else if (c.type == "sage" || c.type == "rgcn") {
            conv = std::make_shared<PooledDenseConv>(
                params, name,
                PooledDenseConv::Options{sender_dim, c.units, c.receiver_tag, c.reduce_type, false});
          } else {
            Gatv2Conv::Options o;
            o.receiver_dim = self_dim;
            o.sender_node_dim = sender_dim;
            o.num_heads = c.num_heads;
            o.per_head_channels = c.per_head_channels;
            o.receiver_tag = c.receiver_tag;
            o.edge_dropout = c.edge_dropout;
            conv = std::make_shared<Gatv2Conv>(params, name, o);
          }
          pooled_width += conv->output_dim();
          nu.convs[edge_set] = conv;
        }
        const std::string ns_name = prefix + "/" + node_set + "/next_state";
        if (c.type == "gcn") {
          nu.next_state = std::make_shared<PassThroughNextState>(c.units);
        } else if (c.type == "sage" || c.type == "rgcn") {
          nu.next_state = std::make_shared<ResidualSumNextState>(
              params, ns_name, ResidualSumNextState::Options{self_dim, c.units, c.activation});
        } else {
          nu.next_state = std::make_shared<NextStateFromConcat>(
              params, ns_name,
              NextStateFromConcat::Options{self_dim + pooled_width, c.units, c.activation,
                                           c.dropout, c.layer_norm});
        }
        update.node_sets[node_set] = std::move(nu);
        new_dims[node_set] = c.units;
      }
      for (const auto& [set, dim] : new_dims) node_dims_[set] = dim;
      if (c.share_weights) shared = update;
      updates_.push_back(std::move(update));
    }
  }
}

GraphTensor Model::Call(const GraphTensor& graph, RunContext& ctx) const {
  GraphTensor g = map_features_.Call(graph, ctx);
  for (const GraphUpdate& update : updates_) g = update.Call(g, ctx);
  return g;
}

}  // namespace hetgnn
