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
#include <map>
#include <set>

#include "common/json_util.h"
#include "hetgnn/sampler.h"

namespace hetgnn {
namespace {

using json = nlohmann::json;

constexpr char kRandomUniform[] = "RANDOM_UNIFORM";

const EdgeSetSpec& EdgeSetOf(const GraphSchema& schema, const SamplingOp& op) {
  auto it = schema.edge_sets.find(op.edge_set_name);
  if (it == schema.edge_sets.end()) {
    throw ValidationError("sampling op \"" + op.op_name + "\": unknown edge set \"" +
                          op.edge_set_name + "\"");
  }
  return it->second;
}

std::string OriginSet(const GraphSchema& schema, const SamplingOp& op) {
  const EdgeSetSpec& e = EdgeSetOf(schema, op);
  return op.direction == SampleDirection::kForward ? e.source : e.target;
}

// Kahn's algorithm over op indices. `before(a, b)` breaks ties among ready
// ops.
template <typename Less>
std::vector<SamplingOp> TopologicalOrder(const std::string& seed_name,
                                         const std::vector<SamplingOp>& ops, Less before) {
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < ops.size(); ++i) index[ops[i].op_name] = i;
  std::vector<int> pending(ops.size(), 0);
  std::vector<std::vector<size_t>> consumers(ops.size());
  for (size_t i = 0; i < ops.size(); ++i) {
    for (const std::string& in : ops[i].input_op_names) {
      if (in == seed_name) continue;
      ++pending[i];
      consumers[index.at(in)].push_back(i);
    }
  }
  auto cmp = [&](size_t a, size_t b) { return before(b, a); };
  std::vector<size_t> ready;
  for (size_t i = 0; i < ops.size(); ++i) {
    if (pending[i] == 0) ready.push_back(i);
  }
  std::vector<SamplingOp> out;
  std::make_heap(ready.begin(), ready.end(), cmp);
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), cmp);
    size_t i = ready.back();
    ready.pop_back();
    out.push_back(ops[i]);
    for (size_t c : consumers[i]) {
      if (--pending[c] == 0) {
        ready.push_back(c);
        std::push_heap(ready.begin(), ready.end(), cmp);
      }
    }
  }
  if (out.size() != ops.size()) {
    for (size_t i = 0; i < ops.size(); ++i) {
      if (pending[i] > 0) {
        throw ValidationError("sampling ops form a cycle through \"" + ops[i].op_name + "\"");
      }
    }
  }
  return out;
}

const json& Field(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ValidationError(where + ": missing \"" + key + "\"");
  }
  return *it;
}

std::string StringField(const json& object, const char* key, const std::string& where) {
  const json& v = Field(object, key, where);
  if (!v.is_string()) throw ValidationError(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

void CheckKeys(const json& object, std::initializer_list<const char*> keys,
               const std::string& where) {
  for (const auto& [key, unused] : object.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      throw ValidationError(where + ": unknown key \"" + key + "\"");
    }
  }
}

}  // namespace

const char* SampleDirectionName(SampleDirection direction) {
  return direction == SampleDirection::kForward ? "forward" : "reverse";
}

std::string OpNodeSet(const GraphSchema& schema, const SamplingOp& op) {
  const EdgeSetSpec& e = EdgeSetOf(schema, op);
  return op.direction == SampleDirection::kForward ? e.target : e.source;
}

SamplingSpec CheckSamplingSpec(const GraphSchema& schema, SamplingSpec spec) {
  const SeedOp& seed = spec.seed_op;
  if (seed.op_name.empty()) throw ValidationError("seed op has no name");
  if (!schema.node_sets.count(seed.node_set_name)) {
    throw ValidationError("seed op \"" + seed.op_name + "\": unknown node set \"" +
                          seed.node_set_name + "\"");
  }
  std::map<std::string, std::string> produces = {{seed.op_name, seed.node_set_name}};
  for (const SamplingOp& op : spec.sampling_ops) {
    if (op.op_name.empty()) throw ValidationError("sampling op has no name");
    if (!produces.emplace(op.op_name, OpNodeSet(schema, op)).second) {
      throw ValidationError("duplicate op name \"" + op.op_name + "\"");
    }
    if (op.sample_size <= 0) {
      throw ValidationError("sampling op \"" + op.op_name + "\": sample_size must be positive");
    }
  }
  for (const SamplingOp& op : spec.sampling_ops) {
    if (op.input_op_names.empty()) {
      throw ValidationError("sampling op \"" + op.op_name + "\" has no inputs");
    }
    const std::string origin = OriginSet(schema, op);
    for (const std::string& in : op.input_op_names) {
      auto it = produces.find(in);
      if (it == produces.end()) {
        throw ValidationError("sampling op \"" + op.op_name + "\": unknown input op \"" + in +
                              "\"");
      }
      if (it->second != origin) {
        throw ValidationError("sampling op \"" + op.op_name + "\": endpoint mismatch, input \"" +
                              in + "\" produces " + it->second + " but edge set " +
                              op.edge_set_name + " (" + SampleDirectionName(op.direction) +
                              ") starts at " + origin);
      }
    }
  }
  spec.sampling_ops = TopologicalOrder(seed.op_name, spec.sampling_ops,
                                       [](size_t a, size_t b) { return a < b; });
  return spec;
}

SamplingSpec ParseSamplingSpec(std::string_view text) {
  json doc = internal::ParseJson(text, "sampling spec");
  if (!doc.is_object()) throw ValidationError("sampling spec must be a JSON object");
  CheckKeys(doc, {"seed_op", "sampling_ops"}, "sampling spec");
  SamplingSpec spec;
  const json& seed = Field(doc, "seed_op", "sampling spec");
  if (!seed.is_object()) throw ValidationError("\"seed_op\" must be an object");
  CheckKeys(seed, {"op_name", "node_set_name"}, "seed_op");
  spec.seed_op = {StringField(seed, "op_name", "seed_op"),
                  StringField(seed, "node_set_name", "seed_op")};
  if (auto it = doc.find("sampling_ops"); it != doc.end()) {
    if (!it->is_array()) throw ValidationError("\"sampling_ops\" must be a list");
    for (const json& v : *it) {
      if (!v.is_object()) throw ValidationError("sampling op must be an object");
      SamplingOp op;
      op.op_name = StringField(v, "op_name", "sampling op");
      const std::string where = "sampling op \"" + op.op_name + "\"";
      CheckKeys(v,
                {"op_name", "input_op_names", "edge_set_name", "sample_size", "strategy",
                 "direction"},
                where);
      const json& inputs = Field(v, "input_op_names", where);
      if (!inputs.is_array()) throw ValidationError(where + ": \"input_op_names\" must be a list");
      for (const json& in : inputs) {
        if (!in.is_string()) throw ValidationError(where + ": input op names must be strings");
        op.input_op_names.push_back(in.get<std::string>());
      }
      op.edge_set_name = StringField(v, "edge_set_name", where);
      const json& size = Field(v, "sample_size", where);
      if (!size.is_number_integer()) {
        throw ValidationError(where + ": \"sample_size\" must be an integer");
      }
      op.sample_size = size.get<int64_t>();
      if (v.contains("strategy") && StringField(v, "strategy", where) != kRandomUniform) {
        throw ValidationError(where + ": unsupported strategy \"" +
                              v["strategy"].get<std::string>() + "\"");
      }
      if (v.contains("direction")) {
        const std::string d = StringField(v, "direction", where);
        if (d == "forward") {
          op.direction = SampleDirection::kForward;
        } else if (d == "reverse") {
          op.direction = SampleDirection::kReverse;
        } else {
          throw ValidationError(where + ": unknown direction \"" + d + "\"");
        }
      }
      spec.sampling_ops.push_back(std::move(op));
    }
  }
  return spec;
}

std::string SerializeSamplingSpec(const SamplingSpec& spec) {
  json doc;
  doc["seed_op"] = {{"op_name", spec.seed_op.op_name},
                    {"node_set_name", spec.seed_op.node_set_name}};
  doc["sampling_ops"] = json::array();
  for (const SamplingOp& op : spec.sampling_ops) {
    doc["sampling_ops"].push_back({{"op_name", op.op_name},
                                   {"input_op_names", op.input_op_names},
                                   {"edge_set_name", op.edge_set_name},
                                   {"direction", SampleDirectionName(op.direction)},
                                   {"sample_size", op.sample_size},
                                   {"strategy", kRandomUniform}});
  }
  return doc.dump(2) + "\n";
}

struct SamplingSpecBuilder::Op::State {
  std::shared_ptr<const GraphSchema> schema;
  SamplingStrategy strategy;
  SeedOp seed;
  std::vector<SamplingOp> ops;
  std::set<std::string> names;
};

SamplingSpecBuilder::SamplingSpecBuilder(GraphSchema schema, SamplingStrategy strategy)
    : schema_(std::make_shared<const GraphSchema>(std::move(schema))), strategy_(strategy) {}

SamplingSpecBuilder::Op SamplingSpecBuilder::Seed(const std::string& node_set) const {
  if (!schema_->node_sets.count(node_set)) {
    throw ValidationError("seed: unknown node set \"" + node_set + "\"");
  }
  auto state = std::make_shared<Op::State>();
  state->schema = schema_;
  state->strategy = strategy_;
  state->seed = {"SEED->" + node_set, node_set};
  state->names.insert(state->seed.op_name);
  return Op(state, {state->seed.op_name}, node_set);
}

SamplingSpecBuilder::Op SamplingSpecBuilder::Op::Sample(int64_t sample_size,
                                                        const std::string& edge_set,
                                                        SampleDirection direction) const {
  SamplingOp op;
  op.input_op_names = names_;
  op.edge_set_name = edge_set;
  op.direction = direction;
  op.sample_size = sample_size;
  op.strategy = state_->strategy;
  const GraphSchema& schema = *state_->schema;
  const std::string origin = OriginSet(schema, op);
  if (origin != node_set_) {
    throw ValidationError("sample over " + edge_set + " (" + SampleDirectionName(direction) +
                          "): endpoint mismatch, expected " + origin + " nodes, got " + node_set_);
  }
  if (sample_size <= 0) throw ValidationError("sample over " + edge_set + ": sample_size must be positive");
  const std::string target = OpNodeSet(schema, op);
  std::string base;
  if (names_.size() == 1) {
    base = node_set_ + "->" + target;
  } else {
    base = "(";
    for (size_t i = 0; i < names_.size(); ++i) base += (i ? "|" : "") + names_[i];
    base += ")->" + target;
  }
  op.op_name = base;
  for (int k = 2; state_->names.count(op.op_name); ++k) op.op_name = base + "." + std::to_string(k);
  state_->names.insert(op.op_name);
  state_->ops.push_back(op);
  return Op(state_, {op.op_name}, target);
}

SamplingSpecBuilder::Op SamplingSpecBuilder::Op::Join(const std::vector<Op>& others) const {
  std::vector<std::string> names = names_;
  for (const Op& o : others) {
    if (o.state_ != state_) throw ValidationError("join: ops come from different builders");
    if (o.node_set_ != node_set_) {
      throw ValidationError("join: endpoint mismatch, " + node_set_ + " vs " + o.node_set_);
    }
    for (const std::string& n : o.names_) {
      if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }
  }
  return Op(state_, std::move(names), node_set_);
}

SamplingSpec SamplingSpecBuilder::Op::Build() const {
  SamplingSpec spec;
  spec.seed_op = state_->seed;
  spec.sampling_ops = TopologicalOrder(
      spec.seed_op.op_name, state_->ops,
      [&](size_t a, size_t b) { return state_->ops[a].op_name < state_->ops[b].op_name; });
  return CheckSamplingSpec(*state_->schema, std::move(spec));
}

}  // namespace hetgnn
