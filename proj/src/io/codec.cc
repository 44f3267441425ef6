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
#include <bit>
#include <cstring>

#include "hetgnn/io.h"
#include "json.hpp"

namespace hetgnn {

static_assert(std::endian::native == std::endian::little,
              "record encoding assumes a little-endian host");

namespace {

using json = nlohmann::json;

constexpr char kRootConvention[] = "local_index_0";

class BlobWriter {
 public:
  json Append(const void* data, size_t bytes) {
    json ref = {{"offset", blob_.size()}, {"length", bytes}};
    blob_.append(static_cast<const char*>(data), bytes);
    return ref;
  }
  json AppendInts(std::span<const int64_t> v) { return Append(v.data(), v.size_bytes()); }
  json AppendStrings(std::span<const std::string> v) {
    const size_t start = blob_.size();
    for (const std::string& s : v) {
      const uint32_t n = static_cast<uint32_t>(s.size());
      blob_.append(reinterpret_cast<const char*>(&n), sizeof(n));
      blob_.append(s);
    }
    return {{"offset", start}, {"length", blob_.size() - start}};
  }
  const std::string& blob() const { return blob_; }

 private:
  std::string blob_;
};

json EncodeFeature(const Feature& f, BlobWriter& blob) {
  json out = {{"dtype", FeatureDTypeName(f.dtype())}, {"shape", f.flat_shape()}};
  if (f.ragged()) out["row_lengths"] = blob.AppendInts(f.row_lengths());
  switch (f.dtype()) {
    case FeatureDType::kFloat32: {
      auto d = f.tensor().value().data<float>();
      out["values"] = blob.Append(d.data(), d.size_bytes());
      break;
    }
    case FeatureDType::kFloat64: {
      auto d = f.tensor().value().data<double>();
      out["values"] = blob.Append(d.data(), d.size_bytes());
      break;
    }
    case FeatureDType::kInt64:
      out["values"] = blob.AppendInts(f.ints());
      break;
    case FeatureDType::kString:
      out["values"] = blob.AppendStrings(f.strings());
      break;
  }
  return out;
}

json EncodeFeatures(const FeatureMap& features, BlobWriter& blob) {
  json out = json::object();
  for (const auto& [name, f] : features) out[name] = EncodeFeature(f, blob);
  return out;
}

void PutU64(std::string& out, uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

[[noreturn]] void Corrupt(const std::string& what) {
  throw CorruptDataError("corrupt graph record: " + what);
}

class BlobReader {
 public:
  explicit BlobReader(std::string_view blob) : blob_(blob) {}

  std::string_view Slice(const json& ref) const {
    if (!ref.is_object() || !ref.contains("offset") || !ref.contains("length")) {
      Corrupt("bad array reference");
    }
    const uint64_t offset = ref["offset"].get<uint64_t>();
    const uint64_t length = ref["length"].get<uint64_t>();
    if (offset > blob_.size() || length > blob_.size() - offset) {
      Corrupt("array reference outside the data blob");
    }
    return blob_.substr(offset, length);
  }

  template <typename T>
  std::vector<T> Numbers(const json& ref, int64_t expected_count) const {
    std::string_view bytes = Slice(ref);
    if (expected_count < 0 || bytes.size() != static_cast<uint64_t>(expected_count) * sizeof(T)) {
      Corrupt("array length does not match its shape");
    }
    std::vector<T> out(static_cast<size_t>(expected_count));
    if (!bytes.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
  }

  std::vector<std::string> Strings(const json& ref, int64_t expected_count) const {
    std::string_view bytes = Slice(ref);
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(std::max<int64_t>(expected_count, 0)));
    size_t pos = 0;
    while (pos < bytes.size()) {
      if (bytes.size() - pos < 4) Corrupt("truncated string length");
      uint32_t n;
      std::memcpy(&n, bytes.data() + pos, 4);
      pos += 4;
      if (bytes.size() - pos < n) Corrupt("truncated string");
      out.emplace_back(bytes.substr(pos, n));
      pos += n;
    }
    if (static_cast<int64_t>(out.size()) != expected_count) {
      Corrupt("string count does not match its shape");
    }
    return out;
  }

 private:
  std::string_view blob_;
};

Shape ReadShape(const json& j) {
  if (!j.is_array() || j.empty()) Corrupt("bad feature shape");
  Shape s;
  for (const json& d : j) {
    if (!d.is_number_integer() || d.get<int64_t>() < 0) Corrupt("bad feature shape");
    s.push_back(d.get<int64_t>());
  }
  return s;
}

Feature DecodeFeature(const json& j, const BlobReader& blob) {
  if (!j.is_object()) Corrupt("bad feature entry");
  const Shape shape = ReadShape(j.at("shape"));
  const int64_t count = NumElements(shape);
  const std::string dtype = j.at("dtype").get<std::string>();
  Feature flat;
  if (dtype == "float32") {
    flat = Feature(DenseTensor(shape, blob.Numbers<float>(j.at("values"), count)));
  } else if (dtype == "float64") {
    flat = Feature(DenseTensor(shape, blob.Numbers<double>(j.at("values"), count)));
  } else if (dtype == "int64") {
    flat = Feature::Ints(shape, blob.Numbers<int64_t>(j.at("values"), count));
  } else if (dtype == "string") {
    flat = Feature::Strings(shape, blob.Strings(j.at("values"), count));
  } else {
    Corrupt("unknown dtype " + dtype);
  }
  if (!j.contains("row_lengths")) return flat;
  const json& ref = j.at("row_lengths");
  const int64_t n = static_cast<int64_t>(blob.Slice(ref).size() / sizeof(int64_t));
  return Feature::Ragged(flat, blob.Numbers<int64_t>(ref, n));
}

FeatureMap DecodeFeatures(const json& j, const BlobReader& blob) {
  if (!j.is_object()) Corrupt("bad feature map");
  FeatureMap out;
  for (const auto& [name, value] : j.items()) out.emplace(name, DecodeFeature(value, blob));
  return out;
}

}  // namespace

std::string EncodeGraph(const GraphTensor& graph, uint64_t schema_fingerprint) {
  if (graph.num_components() != 1) {
    throw InvalidArgument("only single-component graphs can be encoded, got " +
                          std::to_string(graph.num_components()) + " components");
  }
  BlobWriter blob;
  json header = json::object();
  header["root_index_convention"] = kRootConvention;
  header["context"] = EncodeFeatures(graph.context(), blob);
  header["node_sets"] = json::object();
  for (const auto& [name, set] : graph.node_sets()) {
    header["node_sets"][name] = {{"size", set.total_size()},
                                 {"features", EncodeFeatures(set.features, blob)}};
  }
  header["edge_sets"] = json::object();
  for (const auto& [name, set] : graph.edge_sets()) {
    const Adjacency& adj = set.adjacency;
    json entry = {{"size", set.total_size()},
                  {"source", adj.source_set()},
                  {"target", adj.target_set()}};
    entry["source_indices"] = blob.AppendInts(adj.source());
    entry["target_indices"] = blob.AppendInts(adj.target());
    entry["features"] = EncodeFeatures(set.features, blob);
    header["edge_sets"][name] = entry;
  }
  const std::string header_text = header.dump();
  std::string out;
  out.reserve(16 + header_text.size() + blob.blob().size());
  PutU64(out, schema_fingerprint);
  PutU64(out, header_text.size());
  out += header_text;
  out += blob.blob();
  return out;
}

DecodedRecord DecodeGraphUnchecked(std::string_view payload) {
  if (payload.size() < 16) Corrupt("payload shorter than its fixed header");
  DecodedRecord out;
  uint64_t header_len;
  std::memcpy(&out.schema_fingerprint, payload.data(), 8);
  std::memcpy(&header_len, payload.data() + 8, 8);
  if (header_len > payload.size() - 16) Corrupt("header length exceeds payload");
  json header;
  try {
    header = json::parse(payload.substr(16, header_len));
    BlobReader blob(payload.substr(16 + header_len));
    FeatureMap context = DecodeFeatures(header.at("context"), blob);
    std::map<std::string, NodeSet> nodes;
    for (const auto& [name, j] : header.at("node_sets").items()) {
      nodes.emplace(name, NodeSet{{j.at("size").get<int64_t>()},
                                  DecodeFeatures(j.at("features"), blob)});
    }
    std::map<std::string, EdgeSet> edges;
    for (const auto& [name, j] : header.at("edge_sets").items()) {
      const int64_t size = j.at("size").get<int64_t>();
      edges.emplace(name,
                    EdgeSet{{size},
                            Adjacency(j.at("source").get<std::string>(),
                                      blob.Numbers<int64_t>(j.at("source_indices"), size),
                                      j.at("target").get<std::string>(),
                                      blob.Numbers<int64_t>(j.at("target_indices"), size)),
                            DecodeFeatures(j.at("features"), blob)});
    }
    out.graph = GraphTensor::FromPieces(std::move(context), std::move(nodes), std::move(edges));
  } catch (const json::exception& e) {
    Corrupt(std::string("bad header: ") + e.what());
  } catch (const ValidationError& e) {
    Corrupt(e.what());
  } catch (const InvalidArgument& e) {
    Corrupt(e.what());
  }
  return out;
}

GraphTensor DecodeGraph(std::string_view payload, const GraphSchema& schema) {
  DecodedRecord record = DecodeGraphUnchecked(payload);
  const uint64_t expected = SchemaFingerprint(schema);
  if (record.schema_fingerprint != expected) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "record fingerprint %016llx, schema fingerprint %016llx",
                  static_cast<unsigned long long>(record.schema_fingerprint),
                  static_cast<unsigned long long>(expected));
    throw FingerprintMismatch(buf);
  }
  auto violations = ValidateGraph(schema, record.graph);
  if (!violations.empty()) {
    throw ValidationError("record does not match schema: " + violations.front());
  }
  return record.graph;
}

}  // namespace hetgnn
