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
#include <cmath>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "hetgnn/logging.h"
#include "hetgnn/ops.h"
#include "hetgnn/rng.h"
#include "hetgnn/runner.h"

namespace hetgnn {
namespace {

// Blocking single-producer single-consumer queue.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(size_t capacity) : capacity_(capacity) {}

  // False once the consumer has cancelled.
  bool Push(T item) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return cancelled_ || items_.size() < capacity_; });
    if (cancelled_) return false;
    items_.push_back(std::move(item));
    not_empty_.notify_one();
    return true;
  }
  // nullopt after Close() once drained.
  std::optional<T> Pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }
  void Close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
  }
  void Cancel() {
    std::lock_guard lock(mu_);
    cancelled_ = true;
    not_full_.notify_all();
  }

 private:
  size_t capacity_;
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<T> items_;
  bool closed_ = false;
  bool cancelled_ = false;
};

std::vector<int64_t> Shuffled(int64_t n, uint64_t seed, int64_t epoch) {
  std::vector<int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RngStream rng(seed, "epoch_shuffle", static_cast<uint64_t>(epoch));
  for (int64_t i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.UniformInt(static_cast<uint64_t>(i + 1))]);
  }
  return perm;
}

GraphTensor Merge(const std::vector<GraphTensor>& graphs, std::span<const int64_t> items) {
  std::vector<GraphTensor> parts;
  parts.reserve(items.size());
  for (int64_t i : items) parts.push_back(graphs[i]);
  return MergeBatch(parts);
}

void CheckGraphs(const GraphSchema& schema, const std::vector<GraphTensor>& graphs,
                 const char* what) {
  for (size_t i = 0; i < graphs.size(); ++i) {
    std::vector<std::string> violations = ValidateGraph(schema, graphs[i]);
    if (!violations.empty()) {
      throw ValidationError(std::string(what) + " graph " + std::to_string(i) + ": " +
                            violations.front());
    }
  }
}

bool HasLabel(const GraphTensor& graph, const TaskConfig& task) {
  if (task.label_source == LabelSource::kContext) {
    return graph.context().count(task.label_feature) > 0;
  }
  auto it = graph.node_sets().find(task.node_set);
  return it != graph.node_sets().end() && it->second.features.count(task.label_feature) > 0;
}

struct Accumulator {
  int64_t examples = 0;
  int64_t correct = 0;
  double loss_sum = 0;

  void Add(const TaskOutput& out) {
    examples += out.examples;
    correct += out.correct;
    loss_sum += out.loss.value().ToDoubles()[0] * static_cast<double>(out.examples);
  }
  Metrics Result() const {
    Metrics m;
    m.examples = examples;
    if (examples > 0) {
      m.loss = loss_sum / static_cast<double>(examples);
      m.accuracy = static_cast<double>(correct) / static_cast<double>(examples);
    }
    return m;
  }
};

Metrics EvaluateWith(const Network& net, const ParameterStore& params,
                     const std::vector<GraphTensor>& graphs, int64_t batch_size) {
  if (batch_size < 1) throw InvalidArgument("batch_size must be positive");
  Accumulator acc;
  std::vector<int64_t> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t begin = 0; begin < graphs.size(); begin += batch_size) {
    const size_t end = std::min(graphs.size(), begin + static_cast<size_t>(batch_size));
    LabeledBatch batch = net.task().ExtractLabels(
        Merge(graphs, std::span<const int64_t>(order).subspan(begin, end - begin)));
    RunContext ctx(&params, nullptr, false);
    acc.Add(net.task().Loss(net.Logits(batch, ctx), batch.labels, batch.component_mask));
  }
  return acc.Result();
}

}  // namespace

SizeConstraints ResolvePadding(const PaddingConfig& config, int64_t batch_size,
                               const std::vector<GraphTensor>& graphs) {
  if (!config.automatic) return config.constraints;
  SizeConstraints out;
  int64_t components = 0;
  for (const GraphTensor& g : graphs) {
    components = std::max(components, g.num_components());
    for (const auto& [name, set] : g.node_sets()) {
      out.total_nodes[name] = std::max(out.total_nodes[name], set.total_size());
    }
    for (const auto& [name, set] : g.edge_sets()) {
      out.total_edges[name] = std::max(out.total_edges[name], set.total_size());
    }
  }
  out.total_components = batch_size * components + 1;
  // One spare node per set gives padding edges somewhere to attach.
  for (auto& [name, total] : out.total_nodes) total = total * batch_size + 1;
  for (auto& [name, total] : out.total_edges) total *= batch_size;
  return out;
}

TrainingResult RunTraining(const GraphSchema& schema, const ModelConfig& model,
                           const TaskConfig& task, const TrainerConfig& trainer,
                           const std::vector<GraphTensor>& train,
                           const std::vector<GraphTensor>& valid,
                           const std::function<void(const StepRecord&)>& on_step) {
  if (trainer.batch_size < 1) throw InvalidArgument("batch_size must be positive");
  if (trainer.epochs < 1) throw InvalidArgument("epochs must be positive");
  if (trainer.queue_capacity < 1) throw InvalidArgument("queue_capacity must be positive");
  if (train.empty()) throw InvalidArgument("no training examples");
  const int64_t n = static_cast<int64_t>(train.size());
  const int64_t steps_per_epoch =
      trainer.steps_per_epoch > 0 ? trainer.steps_per_epoch : std::max<int64_t>(1, n / trainer.batch_size);
  if ((steps_per_epoch - 1) * trainer.batch_size >= n) {
    throw InvalidArgument("steps_per_epoch " + std::to_string(steps_per_epoch) +
                          " with batch_size " + std::to_string(trainer.batch_size) +
                          " exceeds " + std::to_string(n) + " training examples");
  }
  const int64_t total_steps = steps_per_epoch * trainer.epochs;
  CheckGraphs(schema, train, "training");
  CheckGraphs(schema, valid, "validation");

  TrainingResult result;
  ModelArtifact& artifact = result.artifact;
  artifact.schema = schema;
  artifact.model = model;
  artifact.task = task;
  artifact.params = ParameterStore(trainer.seed);
  ParameterStore& params = artifact.params;
  const Network net(schema, model, task, params);
  std::vector<std::string> regularized;
  for (const std::string& name : params.Names()) {
    if (params.IsRegularized(name)) regularized.push_back(name);
  }
  std::optional<SizeConstraints> padding;
  if (trainer.padding) padding = ResolvePadding(*trainer.padding, trainer.batch_size, train);

  BoundedQueue<LabeledBatch> queue(static_cast<size_t>(trainer.queue_capacity));
  std::exception_ptr producer_error;
  std::jthread producer([&] {
    try {
      std::vector<int64_t> perm;
      for (int64_t step = 0; step < total_steps; ++step) {
        const int64_t k = step % steps_per_epoch;
        if (k == 0) perm = Shuffled(n, trainer.seed, step / steps_per_epoch);
        const int64_t begin = k * trainer.batch_size;
        const int64_t count = std::min(trainer.batch_size, n - begin);
        GraphTensor merged = Merge(train, std::span<const int64_t>(perm).subspan(begin, count));
        std::vector<bool> mask(merged.num_components(), true);
        if (padding) {
          PaddedGraph padded = PadToTotalSizes(merged, *padding);
          merged = std::move(padded.graph);
          mask = std::move(padded.component_mask);
        }
        if (!queue.Push(net.task().ExtractLabels(merged, std::move(mask)))) return;
      }
    } catch (...) {
      producer_error = std::current_exception();
    }
    queue.Close();
  });
  struct CancelOnExit {
    BoundedQueue<LabeledBatch>& q;
    ~CancelOnExit() { q.Cancel(); }
  } cancel_on_exit{queue};

  AdamState adam;
  for (int64_t step = 0; step < total_steps; ++step) {
    std::optional<LabeledBatch> batch = queue.Pop();
    if (!batch) break;
    Tape tape;
    RunContext ctx(&params, &tape, true, trainer.seed, step);
    TaskOutput out = net.task().Loss(net.Logits(*batch, ctx), batch->labels,
                                     batch->component_mask);
    Tensor loss = out.loss;
    if (trainer.l2 > 0 && !regularized.empty()) {
      std::vector<Tensor> squares;
      for (const std::string& name : regularized) squares.push_back(SumSquares(ctx.Param(name)));
      loss = Add(loss, Scale(AddN(squares), trainer.l2));
    }
    const double value = loss.value().ToDoubles()[0];
    if (!std::isfinite(value)) {
      throw Error("non-finite loss at step " + std::to_string(step));
    }
    const double lr = CosineDecayLearningRate(step, total_steps, trainer.learning_rate);
    AdamStep(params, tape.Backward(loss), adam, lr);

    StepRecord record{step, lr, value, std::nullopt};
    if (out.examples > 0) {
      record.accuracy = static_cast<double>(out.correct) / static_cast<double>(out.examples);
    }
    result.steps.push_back(record);
    if (on_step) on_step(record);

    if ((step + 1) % steps_per_epoch == 0 && !valid.empty()) {
      EpochRecord epoch{(step + 1) / steps_per_epoch - 1,
                        EvaluateWith(net, params, valid, trainer.batch_size)};
      if (epoch.validation.accuracy) {
        LogInfo("epoch " + std::to_string(epoch.epoch) + " validation accuracy " +
                std::to_string(*epoch.validation.accuracy));
      }
      result.epochs.push_back(epoch);
    }
  }
  if (producer_error) std::rethrow_exception(producer_error);

  artifact.final_step = static_cast<int64_t>(result.steps.size());
  if (!result.steps.empty()) artifact.metrics["train_loss"] = result.steps.back().loss;
  if (!result.epochs.empty()) {
    const Metrics& last = result.epochs.back().validation;
    if (last.loss) artifact.metrics["valid_loss"] = *last.loss;
    if (last.accuracy) artifact.metrics["valid_accuracy"] = *last.accuracy;
  }
  return result;
}

Metrics Evaluate(const ModelArtifact& artifact, const GraphSchema& schema,
                 const std::vector<GraphTensor>& graphs, int64_t batch_size) {
  if (SchemaFingerprint(schema) != SchemaFingerprint(artifact.schema)) {
    throw FingerprintMismatch("dataset schema does not match the model's schema");
  }
  CheckGraphs(schema, graphs, "evaluation");
  ParameterStore scratch(0, artifact.params.dtype());
  const Network net(artifact.schema, artifact.model, artifact.task, scratch);
  return EvaluateWith(net, artifact.params, graphs, batch_size);
}

std::vector<std::vector<double>> PredictLogits(const ModelArtifact& artifact,
                                               const std::vector<GraphTensor>& graphs,
                                               int64_t batch_size) {
  if (batch_size < 1) throw InvalidArgument("batch_size must be positive");
  ParameterStore scratch(0, artifact.params.dtype());
  const Network net(artifact.schema, artifact.model, artifact.task, scratch);
  const int64_t k = net.task().num_outputs();
  std::vector<std::vector<double>> out;
  std::vector<int64_t> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t begin = 0; begin < graphs.size(); begin += batch_size) {
    const size_t end = std::min(graphs.size(), begin + static_cast<size_t>(batch_size));
    GraphTensor merged = Merge(graphs, std::span<const int64_t>(order).subspan(begin, end - begin));
    // Labels are optional at prediction time but never reach the model.
    LabeledBatch batch =
        HasLabel(merged, artifact.task)
            ? net.task().ExtractLabels(merged)
            : LabeledBatch{merged, std::vector<int64_t>(merged.num_components(), 0),
                           std::vector<bool>(merged.num_components(), true)};
    RunContext ctx(&artifact.params, nullptr, false);
    const std::vector<double> logits = net.Logits(batch, ctx).value().ToDoubles();
    for (int64_t c = 0; c < merged.num_components(); ++c) {
      out.emplace_back(logits.begin() + c * k, logits.begin() + (c + 1) * k);
    }
  }
  return out;
}

}  // namespace hetgnn
