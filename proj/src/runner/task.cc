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

#include "common/json_util.h"
#include "hetgnn/ops.h"
#include "hetgnn/runner.h"

namespace hetgnn {
namespace {

using json = nlohmann::json;

FeatureMap Without(const FeatureMap& features, const std::string& name) {
  FeatureMap out = features;
  out.erase(name);
  return out;
}

const Feature& IntLabel(const FeatureMap& features, const std::string& name,
                        const std::string& where) {
  auto it = features.find(name);
  if (it == features.end()) throw ValidationError("missing label feature " + where + "." + name);
  const Feature& f = it->second;
  if (f.dtype() != FeatureDType::kInt64 || f.ragged() || !f.item_shape().empty()) {
    throw ValidationError("label feature " + where + "." + name + " must be a scalar int64");
  }
  return f;
}

}  // namespace

TaskConfig ParseTaskConfig(std::string_view text) {
  json doc = internal::ParseJson(text, "task");
  if (!doc.is_object()) throw ValidationError("task config must be a JSON object");
  TaskConfig config;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "type") {
        const std::string t = value.get<std::string>();
        if (t == "root_multiclass") {
          config.kind = TaskKind::kRootMulticlass;
        } else if (t == "root_binary") {
          config.kind = TaskKind::kRootBinary;
        } else {
          throw ValidationError("unknown task type \"" + t + "\"");
        }
      } else if (key == "node_set") {
        config.node_set = value.get<std::string>();
      } else if (key == "num_classes") {
        config.num_classes = value.get<int64_t>();
      } else if (key == "label_feature") {
        config.label_feature = value.get<std::string>();
      } else if (key == "label_source") {
        const std::string s = value.get<std::string>();
        if (s == "context") {
          config.label_source = LabelSource::kContext;
        } else if (s == "node") {
          config.label_source = LabelSource::kRootNode;
        } else {
          throw ValidationError("unknown label_source \"" + s + "\"");
        }
      } else {
        throw ValidationError("unknown task key \"" + key + "\"");
      }
    }
  } catch (const json::type_error& e) {
    throw ValidationError(std::string("task config: ") + e.what());
  }
  if (config.node_set.empty()) throw ValidationError("task needs a node_set");
  if (config.kind == TaskKind::kRootMulticlass && config.num_classes < 2) {
    throw ValidationError("num_classes must be at least 2");
  }
  return config;
}

std::string SerializeTaskConfig(const TaskConfig& config) {
  json doc = {
      {"type", config.kind == TaskKind::kRootMulticlass ? "root_multiclass" : "root_binary"},
      {"node_set", config.node_set},
      {"label_feature", config.label_feature},
      {"label_source", config.label_source == LabelSource::kContext ? "context" : "node"}};
  if (config.kind == TaskKind::kRootMulticlass) doc["num_classes"] = config.num_classes;
  return doc.dump();
}

Task::Task(ParameterStore& params, TaskConfig config, int64_t input_dim)
    : config_(std::move(config)) {
  if (config_.kind == TaskKind::kRootMulticlass && config_.num_classes < 2) {
    throw InvalidArgument("num_classes must be at least 2");
  }
  head_ = DenseParams(params, "task/logits", input_dim, num_outputs());
}

int64_t Task::num_outputs() const {
  return config_.kind == TaskKind::kRootMulticlass ? config_.num_classes : 1;
}

LabeledBatch Task::ExtractLabels(const GraphTensor& graph, std::vector<bool> mask) const {
  const int64_t n = graph.num_components();
  if (mask.empty()) mask.assign(n, true);
  if (static_cast<int64_t>(mask.size()) != n) {
    throw InvalidArgument("component mask has " + std::to_string(mask.size()) +
                          " entries for " + std::to_string(n) + " components");
  }
  LabeledBatch out;
  out.component_mask = mask;
  out.labels.assign(n, 0);
  if (config_.label_source == LabelSource::kContext) {
    const Feature& f = IntLabel(graph.context(), config_.label_feature, "context");
    for (int64_t c = 0; c < n; ++c) out.labels[c] = mask[c] ? f.ints()[c] : 0;
    out.graph = graph.WithFeatures(Without(graph.context(), config_.label_feature), {}, {});
  } else {
    const NodeSet& set = graph.node_set(config_.node_set);
    const Feature& f = IntLabel(set.features, config_.label_feature, config_.node_set);
    const std::vector<int64_t> offsets = Offsets(set.sizes);
    for (int64_t c = 0; c < n; ++c) {
      if (!mask[c]) continue;
      if (set.sizes[c] == 0) {
        throw ValidationError("component " + std::to_string(c) + " has no " + config_.node_set +
                              " root node");
      }
      out.labels[c] = f.ints()[offsets[c]];
    }
    out.graph = graph.WithFeatures(
        std::nullopt, {{config_.node_set, Without(set.features, config_.label_feature)}}, {});
  }
  return out;
}

Tensor Task::Logits(const GraphTensor& model_output, const std::vector<bool>& mask,
                    RunContext& ctx) const {
  return head_.Apply(ReadoutRoot(model_output, config_.node_set, mask), ctx);
}

TaskOutput Task::Loss(const Tensor& logits, const std::vector<int64_t>& labels,
                      const std::vector<bool>& mask) const {
  const int64_t n = logits.dim(0);
  if (static_cast<int64_t>(labels.size()) != n || static_cast<int64_t>(mask.size()) != n) {
    throw InvalidArgument("labels and mask must have one entry per component");
  }
  const int64_t classes = config_.kind == TaskKind::kRootMulticlass ? config_.num_classes : 2;
  std::vector<int64_t> safe(n, 0);
  std::vector<double> weights(n, 0.0);
  TaskOutput out;
  for (int64_t c = 0; c < n; ++c) {
    if (!mask[c]) continue;
    if (labels[c] < 0 || labels[c] >= classes) {
      throw ValidationError("label " + std::to_string(labels[c]) + " of component " +
                            std::to_string(c) + " outside [0, " + std::to_string(classes) + ")");
    }
    safe[c] = labels[c];
    weights[c] = 1.0;
    ++out.examples;
  }
  out.loss = config_.kind == TaskKind::kRootMulticlass
                 ? SoftmaxCrossEntropy(logits, safe, weights)
                 : SigmoidCrossEntropy(logits, safe, weights);
  const std::vector<int64_t> predicted = Predict(logits.value());
  for (int64_t c = 0; c < n; ++c) {
    if (mask[c] && predicted[c] == labels[c]) ++out.correct;
  }
  return out;
}

std::vector<int64_t> Task::Predict(const DenseTensor& logits) const {
  const int64_t n = logits.dim(0), k = logits.dim(1);
  const std::vector<double> v = logits.ToDoubles();
  std::vector<int64_t> out(n);
  for (int64_t i = 0; i < n; ++i) {
    const double* row = v.data() + i * k;
    out[i] = config_.kind == TaskKind::kRootBinary
                 ? (row[0] > 0 ? 1 : 0)
                 : static_cast<int64_t>(std::max_element(row, row + k) - row);
  }
  return out;
}

Network::Network(const GraphSchema& schema, const ModelConfig& model, const TaskConfig& task,
                 ParameterStore& params)
    : model_(model, schema, params) {
  auto it = model_.node_dims().find(task.node_set);
  if (it == model_.node_dims().end()) {
    throw ValidationError("task node set " + task.node_set + " has no hidden state");
  }
  task_ = Task(params, task, it->second);
}

Tensor Network::Logits(const LabeledBatch& batch, RunContext& ctx) const {
  return task_.Logits(model_.Call(batch.graph, ctx), batch.component_mask, ctx);
}

}  // namespace hetgnn
