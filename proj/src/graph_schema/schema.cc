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
#include "hetgnn/schema.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "common/json_util.h"
#include "hetgnn/hash.h"
#include "json.hpp"

namespace hetgnn {

using json = nlohmann::json;

const char* FeatureDTypeName(FeatureDType dtype) {
  switch (dtype) {
    case FeatureDType::kFloat32:
      return "float32";
    case FeatureDType::kFloat64:
      return "float64";
    case FeatureDType::kInt64:
      return "int64";
    case FeatureDType::kString:
      return "string";
  }
  return "?";
}

std::optional<FeatureDType> ParseFeatureDType(std::string_view name) {
  if (name == "float32") return FeatureDType::kFloat32;
  if (name == "int64") return FeatureDType::kInt64;
  if (name == "string") return FeatureDType::kString;
  return std::nullopt;
}

const NodeSetSpec& GraphSchema::node_set(const std::string& name) const {
  auto it = node_sets.find(name);
  if (it == node_sets.end()) throw InvalidArgument("schema has no node set '" + name + "'");
  return it->second;
}

const EdgeSetSpec& GraphSchema::edge_set(const std::string& name) const {
  auto it = edge_sets.find(name);
  if (it == edge_sets.end()) throw InvalidArgument("schema has no edge set '" + name + "'");
  return it->second;
}

namespace {

void CheckFeatures(const FeatureSpecs& features, const std::string& owner) {
  for (const auto& [name, spec] : features) {
    if (name.empty()) throw ValidationError(owner + ": empty feature name");
    const std::string where = owner + "." + name;
    if (spec.dtype == FeatureDType::kFloat64) {
      throw ValidationError(where + ": dtype float64 is not a schema dtype");
    }
    for (size_t i = 0; i < spec.shape.size(); ++i) {
      const int64_t d = spec.shape[i];
      if (d == kRaggedDim && i != 0) {
        throw ValidationError(where + ": only the first feature dimension may be ragged");
      }
      if (d < kRaggedDim) throw ValidationError(where + ": negative extent " + std::to_string(d));
    }
    if (spec.dtype == FeatureDType::kString && spec.shape.size() > 1) {
      throw ValidationError(where + ": string features must be scalar or rank 1");
    }
  }
}

json FeaturesToJson(const FeatureSpecs& features) {
  json out = json::object();
  for (const auto& [name, spec] : features) {
    out[name] = {{"dtype", FeatureDTypeName(spec.dtype)}, {"shape", spec.shape}};
  }
  return out;
}

json MetadataToJson(const SetMetadata& metadata) {
  json out = json::object();
  if (metadata.filename) out["filename"] = *metadata.filename;
  if (metadata.cardinality) out["cardinality"] = *metadata.cardinality;
  return out;
}

[[noreturn]] void Invalid(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

const json& Field(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) Invalid(where, std::string("missing \"") + key + "\"");
  return *it;
}

FeatureSpecs FeaturesFromJson(const json& parent, const std::string& where) {
  FeatureSpecs out;
  auto it = parent.find("features");
  if (it == parent.end()) return out;
  if (!it->is_object()) Invalid(where, "\"features\" must be an object");
  for (const auto& [name, value] : it->items()) {
    const std::string fwhere = where + "." + name;
    if (!value.is_object()) Invalid(fwhere, "feature must be an object");
    const json& dtype = Field(value, "dtype", fwhere);
    if (!dtype.is_string()) Invalid(fwhere, "\"dtype\" must be a string");
    auto parsed = ParseFeatureDType(dtype.get<std::string>());
    if (!parsed) Invalid(fwhere, "unknown dtype \"" + dtype.get<std::string>() + "\"");
    FeatureSpec spec{*parsed, {}};
    if (auto s = value.find("shape"); s != value.end()) {
      if (!s->is_array()) Invalid(fwhere, "\"shape\" must be a list of integers");
      for (const json& d : *s) {
        if (!d.is_number_integer()) Invalid(fwhere, "\"shape\" must be a list of integers");
        spec.shape.push_back(d.get<int64_t>());
      }
    }
    out.emplace(name, std::move(spec));
  }
  return out;
}

SetMetadata MetadataFromJson(const json& parent, const std::string& where) {
  SetMetadata out;
  auto it = parent.find("metadata");
  if (it == parent.end()) return out;
  if (!it->is_object()) Invalid(where, "\"metadata\" must be an object");
  if (auto f = it->find("filename"); f != it->end()) {
    if (!f->is_string()) Invalid(where, "metadata filename must be a string");
    out.filename = f->get<std::string>();
  }
  if (auto c = it->find("cardinality"); c != it->end()) {
    if (!c->is_number_integer()) Invalid(where, "metadata cardinality must be an integer");
    out.cardinality = c->get<int64_t>();
  }
  return out;
}

}  // namespace

void CheckSchema(const GraphSchema& schema) {
  if (schema.node_sets.empty()) throw ValidationError("no node sets");
  for (const auto& [name, spec] : schema.node_sets) {
    if (name.empty()) throw ValidationError("empty node set name");
    CheckFeatures(spec.features, name);
  }
  for (const auto& [name, spec] : schema.edge_sets) {
    if (name.empty()) throw ValidationError("empty edge set name");
    if (!schema.node_sets.count(spec.source)) {
      throw ValidationError("edge set " + name + ": unknown source node set \"" + spec.source +
                            "\"");
    }
    if (!schema.node_sets.count(spec.target)) {
      throw ValidationError("edge set " + name + ": unknown target node set \"" + spec.target +
                            "\"");
    }
    CheckFeatures(spec.features, name);
  }
  CheckFeatures(schema.context, "context");
}

GraphSchema ParseSchema(std::string_view text) {
  json doc = internal::ParseJson(text, "schema");
  if (doc.is_null()) throw ValidationError("no node sets");
  if (!doc.is_object()) throw ValidationError("schema document must be a JSON object");
  for (const auto& [key, unused] : doc.items()) {
    if (key != "node_sets" && key != "edge_sets" && key != "context") {
      throw ValidationError("unknown top-level key \"" + key + "\"");
    }
  }

  GraphSchema schema;
  if (auto it = doc.find("node_sets"); it != doc.end()) {
    if (!it->is_object()) throw ValidationError("\"node_sets\" must be an object");
    for (const auto& [name, value] : it->items()) {
      if (!value.is_object()) Invalid(name, "node set must be an object");
      schema.node_sets[name] = {FeaturesFromJson(value, name), MetadataFromJson(value, name)};
    }
  }
  if (auto it = doc.find("edge_sets"); it != doc.end()) {
    if (!it->is_object()) throw ValidationError("\"edge_sets\" must be an object");
    for (const auto& [name, value] : it->items()) {
      if (!value.is_object()) Invalid(name, "edge set must be an object");
      const json& source = Field(value, "source", name);
      const json& target = Field(value, "target", name);
      if (!source.is_string() || !target.is_string()) {
        Invalid(name, "\"source\" and \"target\" must be node set names");
      }
      schema.edge_sets[name] = {source.get<std::string>(), target.get<std::string>(),
                                FeaturesFromJson(value, name), MetadataFromJson(value, name)};
    }
  }
  if (auto it = doc.find("context"); it != doc.end()) {
    if (!it->is_object()) throw ValidationError("\"context\" must be an object");
    schema.context = FeaturesFromJson(*it, "context");
  }
  CheckSchema(schema);
  return schema;
}

GraphSchema ReadSchemaFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open schema file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseSchema(buffer.str());
}

std::string SerializeSchema(const GraphSchema& schema) {
  json doc = json::object();
  doc["node_sets"] = json::object();
  for (const auto& [name, spec] : schema.node_sets) {
    json set = {{"features", FeaturesToJson(spec.features)}};
    json meta = MetadataToJson(spec.metadata);
    if (!meta.empty()) set["metadata"] = meta;
    doc["node_sets"][name] = set;
  }
  doc["edge_sets"] = json::object();
  for (const auto& [name, spec] : schema.edge_sets) {
    json set = {{"source", spec.source},
                {"target", spec.target},
                {"features", FeaturesToJson(spec.features)}};
    json meta = MetadataToJson(spec.metadata);
    if (!meta.empty()) set["metadata"] = meta;
    doc["edge_sets"][name] = set;
  }
  doc["context"] = {{"features", FeaturesToJson(schema.context)}};
  return doc.dump();
}

uint64_t SchemaFingerprint(const GraphSchema& schema) {
  return Fnv1a64(SerializeSchema(schema));
}

std::vector<std::string> ExpandShardPattern(const std::string& pattern) {
  const auto at = pattern.rfind('@');
  if (at == std::string::npos) return {pattern};
  const std::string count_text = pattern.substr(at + 1);
  if (count_text.empty() ||
      count_text.find_first_not_of("0123456789") != std::string::npos) {
    return {pattern};
  }
  const int64_t count = std::stoll(count_text);
  if (count <= 0) throw InvalidArgument("shard count must be positive in " + pattern);
  const std::string base = pattern.substr(0, at);
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(count));
  char suffix[48];
  for (int64_t i = 0; i < count; ++i) {
    std::snprintf(suffix, sizeof(suffix), "-%05lld-of-%05lld", static_cast<long long>(i),
                  static_cast<long long>(count));
    out.push_back(base + suffix);
  }
  return out;
}

}  // namespace hetgnn
