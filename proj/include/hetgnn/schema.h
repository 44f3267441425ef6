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
#ifndef HETGNN_SCHEMA_H_
#define HETGNN_SCHEMA_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "hetgnn/tensor.h"

namespace hetgnn {

// Element types a feature can hold. Schemas only declare float32, int64 and
// string; float64 exists for in-memory gradient checking.
enum class FeatureDType { kFloat32, kFloat64, kInt64, kString };

const char* FeatureDTypeName(FeatureDType dtype);
std::optional<FeatureDType> ParseFeatureDType(std::string_view name);

// Extent marking a dimension whose length varies per item.
inline constexpr int64_t kRaggedDim = -1;

// Per-item shape and type of one feature. Leading item dimension excluded.
struct FeatureSpec {
  FeatureDType dtype = FeatureDType::kFloat32;
  Shape shape;

  bool ragged() const { return !shape.empty() && shape[0] == kRaggedDim; }
  bool operator==(const FeatureSpec&) const = default;
};

using FeatureSpecs = std::map<std::string, FeatureSpec>;

// Informational only; never read by validation.
struct SetMetadata {
  std::optional<std::string> filename;
  std::optional<int64_t> cardinality;
  bool operator==(const SetMetadata&) const = default;
};

struct NodeSetSpec {
  FeatureSpecs features;
  SetMetadata metadata;
  bool operator==(const NodeSetSpec&) const = default;
};

struct EdgeSetSpec {
  std::string source;
  std::string target;
  FeatureSpecs features;
  SetMetadata metadata;
  bool operator==(const EdgeSetSpec&) const = default;
};

struct GraphSchema {
  std::map<std::string, NodeSetSpec> node_sets;
  std::map<std::string, EdgeSetSpec> edge_sets;
  FeatureSpecs context;

  const NodeSetSpec& node_set(const std::string& name) const;
  const EdgeSetSpec& edge_set(const std::string& name) const;
  bool operator==(const GraphSchema&) const = default;
};

// Parses and validates a JSON schema document. Throws ParseError for
// malformed JSON and ValidationError for well-formed but invalid schemas.
GraphSchema ParseSchema(std::string_view text);
GraphSchema ReadSchemaFile(const std::string& path);

// Checks the structural rules; throws ValidationError naming the culprit.
void CheckSchema(const GraphSchema& schema);

// Compact JSON with sorted keys. Parse(Serialize(s)) == s.
std::string SerializeSchema(const GraphSchema& schema);

// FNV-1a 64 of SerializeSchema(schema).
uint64_t SchemaFingerprint(const GraphSchema& schema);

// Expands "name@K" into shard K's file names; other patterns pass through.
std::vector<std::string> ExpandShardPattern(const std::string& pattern);

}  // namespace hetgnn

#endif  // HETGNN_SCHEMA_H_
