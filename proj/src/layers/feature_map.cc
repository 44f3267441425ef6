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
#include <vector>

#include "hetgnn/hash.h"
#include "hetgnn/model.h"

namespace hetgnn {
namespace {

using Kind = FeatureStep::Kind;

// What a pipeline value looks like between steps.
struct ValueType {
  enum Base { kFloat, kInt, kString };
  Base base = kFloat;
  bool ragged = false;
  int64_t width = 1;
};

const char* StepName(Kind kind) {
  switch (kind) {
    case Kind::kHashBucket:
      return "hash_bucket";
    case Kind::kEmbed:
      return "embed";
    case Kind::kDense:
      return "dense";
    case Kind::kLog1p:
      return "log1p";
    case Kind::kRaggedMeanToDense:
      return "ragged_mean_to_dense";
    case Kind::kMakeEmpty:
      return "make_empty";
  }
  return "?";
}

ValueType TypeOf(const FeatureSpec& spec) {
  ValueType t;
  t.base = spec.dtype == FeatureDType::kString ? ValueType::kString
           : spec.dtype == FeatureDType::kInt64 ? ValueType::kInt
                                                : ValueType::kFloat;
  t.ragged = spec.ragged();
  for (size_t i = t.ragged ? 1 : 0; i < spec.shape.size(); ++i) t.width *= spec.shape[i];
  return t;
}

// Runtime value of a pipeline.
struct Value {
  std::optional<Feature> raw;
  std::optional<std::vector<int64_t>> ids;
  std::optional<Tensor> dense;
};

Tensor RawToDense(const Feature& f, int64_t rows, DType dtype) {
  const Shape& flat = f.flat_shape();
  const int64_t n = flat.empty() ? 0 : flat[0];
  if (rows != n) {
    throw DimensionError("feature has " + std::to_string(n) + " rows, expected " +
                         std::to_string(rows));
  }
  int64_t width = 1;
  for (size_t i = 1; i < flat.size(); ++i) width *= flat[i];
  Shape shape{rows, width};
  if (f.dtype() == FeatureDType::kInt64) {
    std::vector<double> v(f.ints().begin(), f.ints().end());
    return Tensor(DenseTensor::FromDoubles(shape, v, dtype));
  }
  if (f.dtype() == FeatureDType::kString) throw InvalidArgument("string feature used as numbers");
  const Tensor& t = f.tensor();
  DenseTensor value = t.value().Reshaped(shape);
  if (value.dtype() != dtype) value = value.Cast(dtype);
  return Tensor(value);
}

Tensor AsDense(const Value& v, int64_t rows, DType dtype) {
  if (v.dense) return *v.dense;
  if (v.ids) {
    std::vector<double> d(v.ids->begin(), v.ids->end());
    return Tensor(DenseTensor::FromDoubles({rows, 1}, d, dtype));
  }
  return RawToDense(*v.raw, rows, dtype);
}

std::vector<int64_t> AsIds(const Value& v) {
  if (v.ids) return *v.ids;
  return std::vector<int64_t>(v.raw->ints().begin(), v.raw->ints().end());
}

}  // namespace

MapFeatures::MapFeatures(ParameterStore& params, const std::string& name,
                         const GraphSchema& schema, FeatureMapConfig config) {
  auto compile = [&](const std::string& owner, const FeatureSpecs& specs,
                     const SetPipelines& pipelines, std::vector<Compiled>& out) -> int64_t {
    int64_t total = 0;
    for (size_t i = 0; i < pipelines.size(); ++i) {
      const FeaturePipeline& p = pipelines[i];
      const std::string where = owner + "." + (p.feature.empty() ? "<none>" : p.feature);
      ValueType type;
      bool have_input = !p.feature.empty();
      if (have_input) {
        auto it = specs.find(p.feature);
        if (it == specs.end()) throw InvalidArgument("unknown feature " + owner + "." + p.feature);
        type = TypeOf(it->second);
      } else if (p.steps.empty() || p.steps[0].kind != Kind::kMakeEmpty) {
        throw InvalidArgument("pipeline on " + owner + " names no feature");
      }
      Compiled c;
      c.pipeline = p;
      c.dense.resize(p.steps.size());
      c.tables.resize(p.steps.size());
      for (size_t j = 0; j < p.steps.size(); ++j) {
        const FeatureStep& step = p.steps[j];
        const std::string pname = name + "/" + owner + "/" + std::to_string(i) + "_" +
                                  (p.feature.empty() ? "empty" : p.feature) + "/" +
                                  std::to_string(j) + "_" + StepName(step.kind);
        auto fail = [&](const std::string& why) {
          throw InvalidArgument(std::string(StepName(step.kind)) + " on " + where + ": " + why);
        };
        if (step.kind != Kind::kMakeEmpty && type.ragged && step.kind != Kind::kRaggedMeanToDense) {
          fail("input is ragged");
        }
        switch (step.kind) {
          case Kind::kHashBucket:
            if (type.base == ValueType::kFloat || type.width != 1) fail("needs a scalar id or string");
            if (step.buckets <= 0) fail("buckets must be positive");
            type = {ValueType::kInt, false, 1};
            break;
          case Kind::kEmbed:
            if (type.base != ValueType::kInt || type.width != 1) fail("needs scalar int ids");
            if (step.vocab <= 0 || step.dim <= 0) fail("vocab and dim must be positive");
            c.tables[j] = params.Create(pname + "/embeddings", {step.vocab, step.dim},
                                        Initializer::kEmbeddingUniform, true);
            type = {ValueType::kFloat, false, step.dim};
            break;
          case Kind::kDense:
            if (type.base == ValueType::kString) fail("needs numbers");
            c.dense[j] = DenseParams(params, pname, type.width, step.units);
            type = {ValueType::kFloat, false, step.units};
            break;
          case Kind::kLog1p:
            if (type.base == ValueType::kString) fail("needs numbers");
            type.base = ValueType::kFloat;
            break;
          case Kind::kRaggedMeanToDense:
            if (!type.ragged || type.base == ValueType::kString) fail("needs a ragged numeric input");
            type = {ValueType::kFloat, false, type.width};
            break;
          case Kind::kMakeEmpty:
            if (step.dim < 0) fail("dim must be non-negative");
            type = {ValueType::kFloat, false, step.dim};
            have_input = true;
            break;
        }
      }
      if (type.ragged) {
        throw InvalidArgument("ragged feature " + where + " reaches " + kHiddenState);
      }
      if (type.base == ValueType::kString) {
        throw InvalidArgument("string feature " + where + " reaches " + kHiddenState);
      }
      total += type.width;
      out.push_back(std::move(c));
    }
    return total;
  };

  for (const auto& [set, pipelines] : config.node_sets) {
    node_dims_[set] = compile(set, schema.node_set(set).features, pipelines, node_sets_[set]);
  }
  for (const auto& [set, pipelines] : config.edge_sets) {
    edge_dims_[set] = compile(set, schema.edge_set(set).features, pipelines, edge_sets_[set]);
  }
  if (config.context) {
    context_.emplace();
    context_dim_ = compile("context", schema.context, *config.context, *context_);
  }
}

Tensor MapFeatures::RunSet(const FeatureMap& features, int64_t num_items,
                           const std::vector<Compiled>& set, RunContext& ctx) const {
  const DType dtype = ctx.dtype();
  std::vector<Tensor> outputs;
  for (const Compiled& c : set) {
    Value v;
    if (!c.pipeline.feature.empty()) {
      auto it = features.find(c.pipeline.feature);
      if (it == features.end()) throw InvalidArgument("graph lacks feature " + c.pipeline.feature);
      v.raw = it->second;
    }
    for (size_t j = 0; j < c.pipeline.steps.size(); ++j) {
      const FeatureStep& step = c.pipeline.steps[j];
      switch (step.kind) {
        case Kind::kHashBucket: {
          std::vector<int64_t> ids;
          const uint64_t b = static_cast<uint64_t>(step.buckets);
          if (v.raw && v.raw->dtype() == FeatureDType::kString) {
            for (const std::string& s : v.raw->strings()) {
              ids.push_back(static_cast<int64_t>(Fnv1a64(s) % b));
            }
          } else {
            for (int64_t x : AsIds(v)) ids.push_back(((x % step.buckets) + step.buckets) % step.buckets);
          }
          v = Value{};
          v.ids = std::move(ids);
          break;
        }
        case Kind::kEmbed: {
          std::vector<int64_t> ids = AsIds(v);
          for (int64_t id : ids) {
            if (id < 0 || id >= step.vocab) {
              throw InvalidArgument("id " + std::to_string(id) + " outside embedding vocab " +
                                    std::to_string(step.vocab));
            }
          }
          v = Value{};
          v.dense = GatherRows(ctx.Param(c.tables[j]), ids);
          break;
        }
        case Kind::kDense: {
          Tensor x = AsDense(v, num_items, dtype);
          v = Value{};
          v.dense = Activate(c.dense[j].Apply(x, ctx), step.activation);
          break;
        }
        case Kind::kLog1p: {
          Tensor x = AsDense(v, num_items, dtype);
          v = Value{};
          v.dense = Activate(x, {ActivationKind::kLog1p});
          break;
        }
        case Kind::kRaggedMeanToDense: {
          const Feature& f = *v.raw;
          std::span<const int64_t> lengths = f.row_lengths();
          std::vector<int64_t> segments;
          for (size_t r = 0; r < lengths.size(); ++r) segments.insert(segments.end(), lengths[r], r);
          Feature flat = f.flat_values();
          Tensor x = RawToDense(flat, static_cast<int64_t>(segments.size()), dtype);
          v = Value{};
          v.dense = SegmentReduce(x, segments, num_items, ReduceType::kMean);
          break;
        }
        case Kind::kMakeEmpty:
          v = Value{};
          v.dense = Tensor(DenseTensor::Zeros({num_items, step.dim}, dtype));
          break;
      }
    }
    outputs.push_back(AsDense(v, num_items, dtype));
  }
  if (outputs.empty()) return Tensor(DenseTensor::Zeros({num_items, 0}, dtype));
  if (outputs.size() == 1) return outputs[0];
  return ConcatLast(outputs);
}

GraphTensor MapFeatures::Call(const GraphTensor& graph, RunContext& ctx) const {
  FeatureMap context;
  std::map<std::string, FeatureMap> nodes;
  std::map<std::string, FeatureMap> edges;
  for (const auto& [name, set] : node_sets_) {
    const NodeSet& ns = graph.node_set(name);
    nodes[name][kHiddenState] = Feature(RunSet(ns.features, ns.total_size(), set, ctx));
  }
  for (const auto& [name, set] : edge_sets_) {
    const EdgeSet& es = graph.edge_set(name);
    edges[name][kHiddenState] = Feature(RunSet(es.features, es.total_size(), set, ctx));
  }
  if (context_) {
    context[kHiddenState] = Feature(RunSet(graph.context(), graph.num_components(), *context_, ctx));
  }
  return graph.ReplaceFeatures(context, nodes, edges);
}

}  // namespace hetgnn
