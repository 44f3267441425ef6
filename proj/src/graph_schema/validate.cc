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
#include "hetgnn/graph_tensor.h"

namespace hetgnn {
namespace {

void CheckFeatures(const FeatureSpecs& specs, const FeatureMap& features,
                   const std::string& owner, std::vector<std::string>& out) {
  for (const auto& [name, spec] : specs) {
    const std::string where = owner + "." + name;
    auto it = features.find(name);
    if (it == features.end()) {
      out.push_back("missing feature " + where);
      continue;
    }
    const Feature& f = it->second;
    if (f.dtype() != spec.dtype) {
      out.push_back("dtype mismatch " + where + ": expected " + FeatureDTypeName(spec.dtype) +
                    ", got " + FeatureDTypeName(f.dtype()));
      continue;
    }
    if (f.item_shape() != spec.shape) {
      out.push_back("shape mismatch " + where + ": expected " + ShapeString(spec.shape) +
                    ", got " + ShapeString(f.item_shape()));
    }
  }
  for (const auto& [name, unused] : features) {
    if (!specs.count(name)) out.push_back("unknown feature " + owner + "." + name);
  }
}

}  // namespace

std::vector<std::string> ValidateGraph(const GraphSchema& schema, const GraphTensor& graph) {
  std::vector<std::string> out;
  for (const auto& [name, spec] : schema.node_sets) {
    auto it = graph.node_sets().find(name);
    if (it == graph.node_sets().end()) {
      out.push_back("missing node set " + name);
      continue;
    }
    CheckFeatures(spec.features, it->second.features, name, out);
  }
  for (const auto& [name, unused] : graph.node_sets()) {
    if (!schema.node_sets.count(name)) out.push_back("unknown node set " + name);
  }
  for (const auto& [name, spec] : schema.edge_sets) {
    auto it = graph.edge_sets().find(name);
    if (it == graph.edge_sets().end()) {
      out.push_back("missing edge set " + name);
      continue;
    }
    const Adjacency& adj = it->second.adjacency;
    if (adj.source_set() != spec.source || adj.target_set() != spec.target) {
      out.push_back("endpoint mismatch " + name + ": expected " + spec.source + " -> " +
                    spec.target + ", got " + adj.source_set() + " -> " + adj.target_set());
    }
    CheckFeatures(spec.features, it->second.features, name, out);
  }
  for (const auto& [name, unused] : graph.edge_sets()) {
    if (!schema.edge_sets.count(name)) out.push_back("unknown edge set " + name);
  }
  CheckFeatures(schema.context, graph.context(), "context", out);
  for (std::string& v : graph.StructuralViolations()) out.push_back(std::move(v));
  return out;
}

}  // namespace hetgnn
