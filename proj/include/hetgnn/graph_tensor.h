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
#ifndef HETGNN_GRAPH_TENSOR_H_
#define HETGNN_GRAPH_TENSOR_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hetgnn/autodiff.h"
#include "hetgnn/schema.h"

namespace hetgnn {

struct IntArray {
  Shape shape;
  std::vector<int64_t> values;
};

struct StringArray {
  Shape shape;
  std::vector<std::string> values;
};

// One feature of a node set, edge set or context: a float tensor, an int64
// array or a string array with leading item dimension. A ragged feature
// stores its items' variable-length rows back to back in a flat feature
// plus one row length per item. Copies share storage.
class Feature {
 public:
  Feature();
  Feature(Tensor values);       // NOLINT
  Feature(DenseTensor values);  // NOLINT
  Feature(IntArray values);     // NOLINT
  Feature(StringArray values);  // NOLINT

  static Feature Ints(Shape shape, std::vector<int64_t> values);
  static Feature Strings(Shape shape, std::vector<std::string> values);
  // `flat` holds sum(row_lengths) leading rows.
  static Feature Ragged(const Feature& flat, std::vector<int64_t> row_lengths);

  FeatureDType dtype() const;
  bool ragged() const;
  int64_t num_items() const;
  // Per-item shape; ragged features report kRaggedDim first.
  Shape item_shape() const;
  // Shape of the stored (flat) values.
  const Shape& flat_shape() const;

  const Tensor& tensor() const;
  std::span<const int64_t> ints() const;
  std::span<const std::string> strings() const;
  std::span<const int64_t> row_lengths() const;
  // The flat values of a ragged feature as a non-ragged feature.
  Feature flat_values() const;

  // Items [begin, end).
  Feature Rows(int64_t begin, int64_t end) const;
  // The listed items, in order (repeats allowed). Float values lose any tape
  // recording.
  Feature Gather(std::span<const int64_t> items) const;
  // Concatenation along the item dimension. Float values lose any tape
  // recording.
  static Feature Concat(std::span<const Feature> parts);
  // `num_items` items of zeros (empty strings, zero-length ragged rows)
  // shaped and typed like `like`.
  static Feature Filler(const Feature& like, int64_t num_items);

  // Same kind, shape, row lengths and bit patterns.
  bool Equals(const Feature& other) const;

 private:
  struct Impl {
    std::variant<Tensor, IntArray, StringArray> values;
    std::optional<std::vector<int64_t>> row_lengths;
  };
  explicit Feature(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

using FeatureMap = std::map<std::string, Feature>;

// Reserved feature name for the hidden states that layers read and write.
inline constexpr char kHiddenState[] = "hidden_state";

struct NodeSet {
  std::vector<int64_t> sizes;  // items per component
  FeatureMap features;

  int64_t total_size() const;
};

class Adjacency {
 public:
  Adjacency() = default;
  Adjacency(std::string source_set, std::vector<int64_t> source, std::string target_set,
            std::vector<int64_t> target);

  const std::string& source_set() const { return source_set_; }
  const std::string& target_set() const { return target_set_; }
  std::span<const int64_t> source() const;
  std::span<const int64_t> target() const;
  int64_t size() const { return source_ ? static_cast<int64_t>(source_->size()) : 0; }

 private:
  std::string source_set_;
  std::string target_set_;
  std::shared_ptr<const std::vector<int64_t>> source_;
  std::shared_ptr<const std::vector<int64_t>> target_;
};

struct EdgeSet {
  std::vector<int64_t> sizes;  // edges per component
  Adjacency adjacency;
  FeatureMap features;

  int64_t total_size() const;
};

// Item index -> component index for per-component sizes.
std::vector<int64_t> ComponentIds(std::span<const int64_t> sizes);
// Exclusive prefix sums of `sizes` (length sizes.size() + 1).
std::vector<int64_t> Offsets(std::span<const int64_t> sizes);

// Immutable heterogeneous graph with one or more components. Every
// operation returns a new GraphTensor that shares unchanged storage.
class GraphTensor {
 public:
  GraphTensor() = default;

  // Validates the pieces (item counts, index ranges, component boundaries)
  // and throws ValidationError on the first violation. Context features
  // carry num_components leading rows.
  static GraphTensor FromPieces(FeatureMap context, std::map<std::string, NodeSet> node_sets,
                                std::map<std::string, EdgeSet> edge_sets);
  // Same assembly without validation, for inspecting malformed data.
  static GraphTensor FromPiecesUnchecked(FeatureMap context,
                                         std::map<std::string, NodeSet> node_sets,
                                         std::map<std::string, EdgeSet> edge_sets);

  int64_t num_components() const { return num_components_; }
  const FeatureMap& context() const { return context_; }
  const std::map<std::string, NodeSet>& node_sets() const { return node_sets_; }
  const std::map<std::string, EdgeSet>& edge_sets() const { return edge_sets_; }
  const NodeSet& node_set(const std::string& name) const;
  const EdgeSet& edge_set(const std::string& name) const;

  // Adds or replaces the named features; everything else is shared.
  GraphTensor ReplaceFeatures(const FeatureMap& context,
                              const std::map<std::string, FeatureMap>& node_sets,
                              const std::map<std::string, FeatureMap>& edge_sets) const;
  GraphTensor ReplaceNodeFeatures(const std::string& set, const FeatureMap& features) const;
  GraphTensor ReplaceEdgeFeatures(const std::string& set, const FeatureMap& features) const;
  GraphTensor ReplaceContextFeatures(const FeatureMap& features) const;
  // Replaces the complete feature maps of the listed sets.
  GraphTensor WithFeatures(const std::optional<FeatureMap>& context,
                           const std::map<std::string, FeatureMap>& node_sets,
                           const std::map<std::string, FeatureMap>& edge_sets) const;

  // Component `c` as a single-component graph with local indices.
  GraphTensor Component(int64_t c) const;

  // Every structural violation (item counts, indices, component crossing).
  std::vector<std::string> StructuralViolations() const;

 private:
  friend GraphTensor MergeBatch(std::span<const GraphTensor> graphs);
  int64_t num_components_ = 0;
  FeatureMap context_;
  std::map<std::string, NodeSet> node_sets_;
  std::map<std::string, EdgeSet> edge_sets_;
};

// Each input becomes a run of components in the result, in order. Inputs
// must agree on set names, feature names, dtypes and item shapes.
GraphTensor MergeBatch(std::span<const GraphTensor> graphs);

// Field-for-field equality including bit-identical float values.
bool GraphsEqual(const GraphTensor& a, const GraphTensor& b);

struct SizeConstraints {
  int64_t total_components = 0;
  std::map<std::string, int64_t> total_nodes;  // missing sets keep their size
  std::map<std::string, int64_t> total_edges;
};

struct PaddedGraph {
  GraphTensor graph;
  std::vector<bool> component_mask;  // true for real components
};

// Whether PadToTotalSizes would succeed.
bool FitsSizeConstraints(const GraphTensor& graph, const SizeConstraints& constraints);

// Appends padding components so every total matches the constraints. All
// padding nodes and edges land in the first padding component; padding
// edges connect the first padding nodes of their endpoint sets. Throws
// FitError when the graph does not fit.
PaddedGraph PadToTotalSizes(const GraphTensor& graph, const SizeConstraints& constraints);

// Violations of `graph` against `schema`; empty when it conforms.
std::vector<std::string> ValidateGraph(const GraphSchema& schema, const GraphTensor& graph);

}  // namespace hetgnn

#endif  // HETGNN_GRAPH_TENSOR_H_
