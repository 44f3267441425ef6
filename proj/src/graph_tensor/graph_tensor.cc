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

#include <functional>
#include <numeric>
#include <set>

namespace hetgnn {
namespace {

std::string Str(int64_t v) { return std::to_string(v); }

template <typename Map>
const typename Map::mapped_type& Lookup(const Map& map, const std::string& name,
                                        const char* kind) {
  auto it = map.find(name);
  if (it == map.end()) throw InvalidArgument(std::string("graph has no ") + kind + " '" + name + "'");
  return it->second;
}

void FeatureViolations(const FeatureMap& features, int64_t expected_items,
                       const std::string& owner, std::vector<std::string>& out) {
  for (const auto& [name, feature] : features) {
    if (feature.num_items() != expected_items) {
      out.push_back("size mismatch " + owner + "." + name + ": " + Str(feature.num_items()) +
                    " items, expected " + Str(expected_items));
    }
  }
}

FeatureMap Overlay(FeatureMap base, const FeatureMap& overrides) {
  for (const auto& [name, feature] : overrides) base.insert_or_assign(name, feature);
  return base;
}

}  // namespace

int64_t NodeSet::total_size() const {
  return std::accumulate(sizes.begin(), sizes.end(), int64_t{0});
}

int64_t EdgeSet::total_size() const {
  return std::accumulate(sizes.begin(), sizes.end(), int64_t{0});
}

Adjacency::Adjacency(std::string source_set, std::vector<int64_t> source, std::string target_set,
                     std::vector<int64_t> target)
    : source_set_(std::move(source_set)),
      target_set_(std::move(target_set)),
      source_(std::make_shared<const std::vector<int64_t>>(std::move(source))),
      target_(std::make_shared<const std::vector<int64_t>>(std::move(target))) {
  if (source_->size() != target_->size()) {
    throw DimensionError("adjacency has " + Str(static_cast<int64_t>(source_->size())) +
                         " sources but " + Str(static_cast<int64_t>(target_->size())) +
                         " targets");
  }
}

std::span<const int64_t> Adjacency::source() const {
  if (!source_) return {};
  return *source_;
}

std::span<const int64_t> Adjacency::target() const {
  if (!target_) return {};
  return *target_;
}

std::vector<int64_t> ComponentIds(std::span<const int64_t> sizes) {
  std::vector<int64_t> out;
  for (size_t c = 0; c < sizes.size(); ++c) out.insert(out.end(), sizes[c], static_cast<int64_t>(c));
  return out;
}

std::vector<int64_t> Offsets(std::span<const int64_t> sizes) {
  std::vector<int64_t> out(sizes.size() + 1, 0);
  for (size_t i = 0; i < sizes.size(); ++i) out[i + 1] = out[i] + sizes[i];
  return out;
}

GraphTensor GraphTensor::FromPiecesUnchecked(FeatureMap context,
                                             std::map<std::string, NodeSet> node_sets,
                                             std::map<std::string, EdgeSet> edge_sets) {
  GraphTensor g;
  if (!node_sets.empty()) {
    g.num_components_ = static_cast<int64_t>(node_sets.begin()->second.sizes.size());
  } else if (!edge_sets.empty()) {
    g.num_components_ = static_cast<int64_t>(edge_sets.begin()->second.sizes.size());
  } else if (!context.empty()) {
    g.num_components_ = context.begin()->second.num_items();
  } else {
    g.num_components_ = 1;
  }
  g.context_ = std::move(context);
  g.node_sets_ = std::move(node_sets);
  g.edge_sets_ = std::move(edge_sets);
  return g;
}

GraphTensor GraphTensor::FromPieces(FeatureMap context, std::map<std::string, NodeSet> node_sets,
                                    std::map<std::string, EdgeSet> edge_sets) {
  GraphTensor g = FromPiecesUnchecked(std::move(context), std::move(node_sets),
                                      std::move(edge_sets));
  auto violations = g.StructuralViolations();
  if (!violations.empty()) throw ValidationError(violations.front());
  return g;
}

std::vector<std::string> GraphTensor::StructuralViolations() const {
  std::vector<std::string> out;
  const int64_t nc = num_components_;
  FeatureViolations(context_, nc, "context", out);
  for (const auto& [name, set] : node_sets_) {
    if (static_cast<int64_t>(set.sizes.size()) != nc) {
      out.push_back("component count mismatch " + name + ": " +
                    Str(static_cast<int64_t>(set.sizes.size())) + " sizes, expected " + Str(nc));
      continue;
    }
    for (int64_t s : set.sizes) {
      if (s < 0) out.push_back("negative size in " + name);
    }
    FeatureViolations(set.features, set.total_size(), name, out);
  }
  for (const auto& [name, set] : edge_sets_) {
    if (static_cast<int64_t>(set.sizes.size()) != nc) {
      out.push_back("component count mismatch " + name + ": " +
                    Str(static_cast<int64_t>(set.sizes.size())) + " sizes, expected " + Str(nc));
      continue;
    }
    FeatureViolations(set.features, set.total_size(), name, out);
    const Adjacency& adj = set.adjacency;
    if (adj.size() != set.total_size()) {
      out.push_back("size mismatch " + name + ": " + Str(adj.size()) + " adjacency entries, expected " +
                    Str(set.total_size()));
      continue;
    }
    auto src_it = node_sets_.find(adj.source_set());
    auto tgt_it = node_sets_.find(adj.target_set());
    if (src_it == node_sets_.end() || tgt_it == node_sets_.end()) {
      out.push_back("edge set " + name + " references unknown node set " +
                    (src_it == node_sets_.end() ? adj.source_set() : adj.target_set()));
      continue;
    }
    if (static_cast<int64_t>(src_it->second.sizes.size()) != nc ||
        static_cast<int64_t>(tgt_it->second.sizes.size()) != nc) {
      continue;  // reported above
    }
    const auto src_off = Offsets(src_it->second.sizes);
    const auto tgt_off = Offsets(tgt_it->second.sizes);
    const auto edge_off = Offsets(set.sizes);
    bool reported = false;
    for (int64_t c = 0; c < nc && !reported; ++c) {
      for (int64_t e = edge_off[c]; e < edge_off[c + 1]; ++e) {
        const int64_t s = adj.source()[e];
        const int64_t t = adj.target()[e];
        if (s < 0 || s >= src_off[nc] || t < 0 || t >= tgt_off[nc]) {
          out.push_back("index out of range in " + name + ": edge " + Str(e) + " (" + Str(s) +
                        " -> " + Str(t) + ") with " + Str(src_off[nc]) + " " + adj.source_set() +
                        " and " + Str(tgt_off[nc]) + " " + adj.target_set());
          reported = true;
          break;
        }
        if (s < src_off[c] || s >= src_off[c + 1] || t < tgt_off[c] || t >= tgt_off[c + 1]) {
          out.push_back("edge crosses component boundary in " + name + ": edge " + Str(e) +
                        " of component " + Str(c));
          reported = true;
          break;
        }
      }
    }
  }
  return out;
}

const NodeSet& GraphTensor::node_set(const std::string& name) const {
  return Lookup(node_sets_, name, "node set");
}

const EdgeSet& GraphTensor::edge_set(const std::string& name) const {
  return Lookup(edge_sets_, name, "edge set");
}

GraphTensor GraphTensor::ReplaceFeatures(const FeatureMap& context,
                                         const std::map<std::string, FeatureMap>& node_sets,
                                         const std::map<std::string, FeatureMap>& edge_sets) const {
  GraphTensor g = *this;
  for (const auto& [name, feature] : context) {
    if (feature.num_items() != num_components_) {
      throw DimensionError("context feature " + name + " has " + Str(feature.num_items()) +
                           " rows, expected " + Str(num_components_));
    }
  }
  g.context_ = Overlay(g.context_, context);
  for (const auto& [set_name, features] : node_sets) {
    auto it = g.node_sets_.find(set_name);
    if (it == g.node_sets_.end()) throw InvalidArgument("graph has no node set '" + set_name + "'");
    const int64_t n = it->second.total_size();
    for (const auto& [name, feature] : features) {
      if (feature.num_items() != n) {
        throw DimensionError("feature " + set_name + "." + name + " has " +
                             Str(feature.num_items()) + " items, expected " + Str(n));
      }
    }
    it->second.features = Overlay(it->second.features, features);
  }
  for (const auto& [set_name, features] : edge_sets) {
    auto it = g.edge_sets_.find(set_name);
    if (it == g.edge_sets_.end()) throw InvalidArgument("graph has no edge set '" + set_name + "'");
    const int64_t n = it->second.total_size();
    for (const auto& [name, feature] : features) {
      if (feature.num_items() != n) {
        throw DimensionError("feature " + set_name + "." + name + " has " +
                             Str(feature.num_items()) + " items, expected " + Str(n));
      }
    }
    it->second.features = Overlay(it->second.features, features);
  }
  return g;
}

GraphTensor GraphTensor::ReplaceNodeFeatures(const std::string& set,
                                             const FeatureMap& features) const {
  return ReplaceFeatures({}, {{set, features}}, {});
}

GraphTensor GraphTensor::ReplaceEdgeFeatures(const std::string& set,
                                             const FeatureMap& features) const {
  return ReplaceFeatures({}, {}, {{set, features}});
}

GraphTensor GraphTensor::ReplaceContextFeatures(const FeatureMap& features) const {
  return ReplaceFeatures(features, {}, {});
}

GraphTensor GraphTensor::WithFeatures(const std::optional<FeatureMap>& context,
                                      const std::map<std::string, FeatureMap>& node_sets,
                                      const std::map<std::string, FeatureMap>& edge_sets) const {
  GraphTensor g = *this;
  if (context) g.context_.clear();
  for (const auto& [name, unused] : node_sets) {
    Lookup(g.node_sets_, name, "node set");
    g.node_sets_[name].features.clear();
  }
  for (const auto& [name, unused] : edge_sets) {
    Lookup(g.edge_sets_, name, "edge set");
    g.edge_sets_[name].features.clear();
  }
  return g.ReplaceFeatures(context.value_or(FeatureMap{}), node_sets, edge_sets);
}

GraphTensor GraphTensor::Component(int64_t c) const {
  if (c < 0 || c >= num_components_) {
    throw InvalidArgument("component " + Str(c) + " outside " + Str(num_components_));
  }
  FeatureMap context;
  for (const auto& [name, f] : context_) context.emplace(name, f.Rows(c, c + 1));
  std::map<std::string, NodeSet> nodes;
  std::map<std::string, int64_t> node_begin;
  for (const auto& [name, set] : node_sets_) {
    const auto off = Offsets(set.sizes);
    NodeSet out{{set.sizes[c]}, {}};
    for (const auto& [fname, f] : set.features) out.features.emplace(fname, f.Rows(off[c], off[c + 1]));
    node_begin[name] = off[c];
    nodes.emplace(name, std::move(out));
  }
  std::map<std::string, EdgeSet> edges;
  for (const auto& [name, set] : edge_sets_) {
    const auto off = Offsets(set.sizes);
    const Adjacency& adj = set.adjacency;
    std::vector<int64_t> src, tgt;
    src.reserve(static_cast<size_t>(set.sizes[c]));
    tgt.reserve(static_cast<size_t>(set.sizes[c]));
    for (int64_t e = off[c]; e < off[c + 1]; ++e) {
      src.push_back(adj.source()[e] - node_begin[adj.source_set()]);
      tgt.push_back(adj.target()[e] - node_begin[adj.target_set()]);
    }
    EdgeSet out{{set.sizes[c]}, Adjacency(adj.source_set(), std::move(src), adj.target_set(), std::move(tgt)), {}};
    for (const auto& [fname, f] : set.features) out.features.emplace(fname, f.Rows(off[c], off[c + 1]));
    edges.emplace(name, std::move(out));
  }
  return FromPiecesUnchecked(std::move(context), std::move(nodes), std::move(edges));
}

namespace {

template <typename Map>
std::set<std::string> Keys(const Map& map) {
  std::set<std::string> out;
  for (const auto& [k, unused] : map) out.insert(k);
  return out;
}

void CheckCompatible(const FeatureMap& a, const FeatureMap& b, const std::string& owner) {
  if (Keys(a) != Keys(b)) throw InvalidArgument("merge: feature names differ in " + owner);
  for (const auto& [name, f] : a) {
    const Feature& g = b.at(name);
    if (f.dtype() != g.dtype() || f.item_shape() != g.item_shape()) {
      throw InvalidArgument("merge: feature " + owner + "." + name + " differs in dtype or shape");
    }
  }
}

FeatureMap ConcatFeatures(std::span<const GraphTensor> graphs,
                          const std::function<const FeatureMap&(const GraphTensor&)>& get) {
  FeatureMap out;
  for (const auto& [name, unused] : get(graphs[0])) {
    std::vector<Feature> parts;
    parts.reserve(graphs.size());
    for (const GraphTensor& g : graphs) parts.push_back(get(g).at(name));
    out.emplace(name, Feature::Concat(parts));
  }
  return out;
}

}  // namespace

GraphTensor MergeBatch(std::span<const GraphTensor> graphs) {
  if (graphs.empty()) throw InvalidArgument("merge: no graphs");
  const GraphTensor& first = graphs[0];
  for (const GraphTensor& g : graphs) {
    if (Keys(g.node_sets()) != Keys(first.node_sets()) ||
        Keys(g.edge_sets()) != Keys(first.edge_sets())) {
      throw InvalidArgument("merge: graphs have different node or edge sets");
    }
    CheckCompatible(first.context(), g.context(), "context");
    for (const auto& [name, set] : first.node_sets()) {
      CheckCompatible(set.features, g.node_set(name).features, name);
    }
    for (const auto& [name, set] : first.edge_sets()) {
      const EdgeSet& other = g.edge_set(name);
      if (other.adjacency.source_set() != set.adjacency.source_set() ||
          other.adjacency.target_set() != set.adjacency.target_set()) {
        throw InvalidArgument("merge: endpoints of edge set " + name + " differ");
      }
      CheckCompatible(set.features, other.features, name);
    }
  }

  FeatureMap context = ConcatFeatures(graphs, [](const GraphTensor& g) -> const FeatureMap& {
    return g.context();
  });
  std::map<std::string, NodeSet> nodes;
  for (const auto& [name, unused] : first.node_sets()) {
    NodeSet out;
    for (const GraphTensor& g : graphs) {
      const auto& s = g.node_set(name).sizes;
      out.sizes.insert(out.sizes.end(), s.begin(), s.end());
    }
    const std::string key = name;
    out.features = ConcatFeatures(graphs, [&key](const GraphTensor& g) -> const FeatureMap& {
      return g.node_set(key).features;
    });
    nodes.emplace(name, std::move(out));
  }
  std::map<std::string, EdgeSet> edges;
  for (const auto& [name, set] : first.edge_sets()) {
    std::vector<int64_t> sizes, src, tgt;
    std::map<std::string, int64_t> node_offset;
    for (const GraphTensor& g : graphs) {
      const EdgeSet& e = g.edge_set(name);
      sizes.insert(sizes.end(), e.sizes.begin(), e.sizes.end());
      const int64_t so = node_offset[set.adjacency.source_set()];
      const int64_t to = node_offset[set.adjacency.target_set()];
      for (int64_t s : e.adjacency.source()) src.push_back(s + so);
      for (int64_t t : e.adjacency.target()) tgt.push_back(t + to);
      for (const auto& [nname, nset] : g.node_sets()) node_offset[nname] += nset.total_size();
    }
    const std::string key = name;
    EdgeSet out{std::move(sizes),
                Adjacency(set.adjacency.source_set(), std::move(src), set.adjacency.target_set(),
                          std::move(tgt)),
                ConcatFeatures(graphs, [&key](const GraphTensor& g) -> const FeatureMap& {
                  return g.edge_set(key).features;
                })};
    edges.emplace(name, std::move(out));
  }
  GraphTensor merged =
      GraphTensor::FromPiecesUnchecked(std::move(context), std::move(nodes), std::move(edges));
  merged.num_components_ = 0;
  for (const GraphTensor& g : graphs) merged.num_components_ += g.num_components();
  return merged;
}

namespace {

bool FeatureMapsEqual(const FeatureMap& a, const FeatureMap& b) {
  if (Keys(a) != Keys(b)) return false;
  for (const auto& [name, f] : a) {
    if (!f.Equals(b.at(name))) return false;
  }
  return true;
}

}  // namespace

bool GraphsEqual(const GraphTensor& a, const GraphTensor& b) {
  if (a.num_components() != b.num_components()) return false;
  if (!FeatureMapsEqual(a.context(), b.context())) return false;
  if (Keys(a.node_sets()) != Keys(b.node_sets()) || Keys(a.edge_sets()) != Keys(b.edge_sets())) {
    return false;
  }
  for (const auto& [name, set] : a.node_sets()) {
    const NodeSet& other = b.node_set(name);
    if (set.sizes != other.sizes || !FeatureMapsEqual(set.features, other.features)) return false;
  }
  for (const auto& [name, set] : a.edge_sets()) {
    const EdgeSet& other = b.edge_set(name);
    if (set.sizes != other.sizes || !FeatureMapsEqual(set.features, other.features)) return false;
    const Adjacency& x = set.adjacency;
    const Adjacency& y = other.adjacency;
    if (x.source_set() != y.source_set() || x.target_set() != y.target_set() ||
        !std::equal(x.source().begin(), x.source().end(), y.source().begin(), y.source().end()) ||
        !std::equal(x.target().begin(), x.target().end(), y.target().begin(), y.target().end())) {
      return false;
    }
  }
  return true;
}

}  // namespace hetgnn
