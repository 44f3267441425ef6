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
#ifndef HETGNN_RUNNER_H_
#define HETGNN_RUNNER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetgnn/graph_tensor.h"
#include "hetgnn/layers.h"
#include "hetgnn/model.h"
#include "hetgnn/optimizer.h"
#include "hetgnn/parameters.h"
#include "hetgnn/schema.h"

namespace hetgnn {

// ---------------------------------------------------------------- tasks

enum class TaskKind { kRootMulticlass, kRootBinary };
enum class LabelSource { kContext, kRootNode };

struct TaskConfig {
  TaskKind kind = TaskKind::kRootMulticlass;
  std::string node_set;  // root node set
  int64_t num_classes = 2;
  std::string label_feature = "label";
  LabelSource label_source = LabelSource::kContext;
};

// {"type": "root_multiclass" | "root_binary", "node_set": "paper",
//  "num_classes": 2, "label_feature": "label", "label_source": "context" | "node"}
TaskConfig ParseTaskConfig(std::string_view text);
std::string SerializeTaskConfig(const TaskConfig& config);

struct LabeledBatch {
  GraphTensor graph;               // label feature removed
  std::vector<int64_t> labels;     // one per component
  std::vector<bool> component_mask;
};

struct TaskOutput {
  Tensor loss;  // scalar [1]
  int64_t examples = 0;
  int64_t correct = 0;
};

// Classification of each component by its root node's final hidden state.
class Task {
 public:
  Task() = default;
  Task(ParameterStore& params, TaskConfig config, int64_t input_dim);

  // Reads the labels and drops the label feature. Padding components get
  // label 0; `mask` defaults to all true.
  LabeledBatch ExtractLabels(const GraphTensor& graph, std::vector<bool> mask = {}) const;
  // [num_components, num_classes] logits (one column for binary tasks).
  Tensor Logits(const GraphTensor& model_output, const std::vector<bool>& mask,
                RunContext& ctx) const;
  // Mean cross-entropy over mask-true components; 0 when there are none.
  // Throws ValidationError for labels outside the class range.
  TaskOutput Loss(const Tensor& logits, const std::vector<int64_t>& labels,
                  const std::vector<bool>& mask) const;
  std::vector<int64_t> Predict(const DenseTensor& logits) const;

  const TaskConfig& config() const { return config_; }
  int64_t num_outputs() const;

 private:
  TaskConfig config_;
  DenseParams head_;
};

// Model followed by a task head, sharing one parameter store.
class Network {
 public:
  Network(const GraphSchema& schema, const ModelConfig& model, const TaskConfig& task,
          ParameterStore& params);
  Tensor Logits(const LabeledBatch& batch, RunContext& ctx) const;
  const Model& model() const { return model_; }
  const Task& task() const { return task_; }

 private:
  Model model_;
  Task task_;
};

// ---------------------------------------------------------------- training

struct Metrics {
  int64_t examples = 0;
  std::optional<double> loss;      // absent without examples
  std::optional<double> accuracy;  // absent without examples
};

struct PaddingConfig {
  // Derive totals from the largest graph: batch_size components of the
  // largest sizes plus one padding component.
  bool automatic = false;
  SizeConstraints constraints;
};

struct TrainerConfig {
  int64_t batch_size = 32;
  int64_t epochs = 1;
  int64_t steps_per_epoch = 0;  // 0 selects num_train / batch_size
  double learning_rate = 1e-3;
  double l2 = 0.0;
  uint64_t seed = 0;
  std::optional<PaddingConfig> padding;
  int64_t queue_capacity = 4;
};

struct StepRecord {
  int64_t step = 0;
  double learning_rate = 0;
  double loss = 0;
  std::optional<double> accuracy;
};

struct EpochRecord {
  int64_t epoch = 0;
  Metrics validation;
};

struct ModelArtifact {
  GraphSchema schema;
  ModelConfig model;
  TaskConfig task;
  ParameterStore params;
  int64_t final_step = 0;
  std::map<std::string, double> metrics;
};

struct TrainingResult {
  ModelArtifact artifact;
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;
};

// Trains on in-memory single-component graphs. Deterministic for a fixed
// config. Throws Error naming the step on a non-finite loss.
TrainingResult RunTraining(const GraphSchema& schema, const ModelConfig& model,
                           const TaskConfig& task, const TrainerConfig& trainer,
                           const std::vector<GraphTensor>& train,
                           const std::vector<GraphTensor>& valid = {},
                           const std::function<void(const StepRecord&)>& on_step = {});

// Forward-only pass with dropout disabled. Throws FingerprintMismatch when
// `schema` differs from the artifact's.
Metrics Evaluate(const ModelArtifact& artifact, const GraphSchema& schema,
                 const std::vector<GraphTensor>& graphs, int64_t batch_size = 32);

// Per-example logits, one row per graph, computed in merged batches.
std::vector<std::vector<double>> PredictLogits(const ModelArtifact& artifact,
                                               const std::vector<GraphTensor>& graphs,
                                               int64_t batch_size = 32);

// Appends padding so a batch meets `config` for up to `batch_size` graphs.
SizeConstraints ResolvePadding(const PaddingConfig& config, int64_t batch_size,
                               const std::vector<GraphTensor>& graphs);

// ---------------------------------------------------------------- artifacts

// Single file: magic, u64 header length, header JSON, raw little-endian
// parameter blocks, u64 FNV-1a checksum of everything before it.
void ExportModel(const ModelArtifact& artifact, const std::string& path);
// Throws CorruptDataError on a bad checksum or layout and ValidationError
// when stored shapes disagree with the configuration.
ModelArtifact LoadModel(const std::string& path);
// Rebuilds the parameter set of a configuration (fresh initial values).
ParameterStore InitParameters(const GraphSchema& schema, const ModelConfig& model,
                              const TaskConfig& task, uint64_t seed,
                              DType dtype = DType::kFloat32);

// Writes one NDJSON row per record of `records` (a file list or pattern):
// {"record_index", "predicted_class" | "probability", "logits"}, after a
// "#" header line. Decode errors are rethrown with the record index.
int64_t Infer(const ModelArtifact& artifact, const std::string& records,
              const std::string& output_path, int64_t batch_size = 32);

// ---------------------------------------------------------------- config file

// {"schema": path, "train_records": paths, "valid_records": paths,
//  "model": path or object, "task": object, "batch_size", "epochs",
//  "steps_per_epoch", "lr", "l2", "seed", "padding": "auto" | object}
// Relative paths resolve against `base_dir`.
struct TrainingJob {
  std::string schema_path;
  std::string train_records;
  std::string valid_records;
  ModelConfig model;
  TaskConfig task;
  TrainerConfig trainer;
};
TrainingJob ParseTrainingJob(std::string_view text, const std::string& base_dir);

// ---------------------------------------------------------------- synthetic data

// Two-block stochastic block model over "user" nodes (block sizes differ)
// plus "item" nodes, with a user -> item edge set. Class = block of the
// root user, stored as the int64 root node feature "label". Users carry a
// constant "bias" feature, items a random "popularity".
struct CommunityOptions {
  int64_t num_users = 200;
  double block0_fraction = 0.6;
  int64_t num_items = 40;
  double p_intra = 0.9;
  double p_inter = 0.1;
  double p_item = 0.1;
  uint64_t seed = 1;
};

struct CommunityData {
  GraphSchema schema;
  uint64_t seed = 0;
  int64_t num_items = 0;
  std::vector<std::string> user_ids;
  std::vector<int64_t> blocks;
  std::vector<std::pair<std::string, std::string>> knows;  // user -> user
  std::vector<std::pair<std::string, std::string>> likes;  // user -> item
};

CommunityData MakeCommunityData(const CommunityOptions& options);
// One rooted 1-hop subgraph per user (all neighbours kept).
std::vector<GraphTensor> CommunityGraphs(const CommunityData& data,
                                         const std::vector<int64_t>& roots);
// Writes schema.json, users.csv, items.csv, knows.csv, likes.csv and
// spec.json (the 1-hop program) into `dir`.
void WriteCommunityFiles(const CommunityData& data, const std::string& dir);
// The default model for the community task.
ModelConfig CommunityModelConfig(int64_t message_dim = 32, int64_t rounds = 2);

}  // namespace hetgnn

#endif  // HETGNN_RUNNER_H_
