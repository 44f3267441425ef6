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
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "common/json_util.h"
#include "hetgnn/hash.h"
#include "hetgnn/io.h"
#include "hetgnn/runner.h"

namespace hetgnn {
namespace {

static_assert(std::endian::native == std::endian::little, "artifacts are little-endian");

using json = nlohmann::json;

constexpr char kMagic[8] = {'H', 'G', 'N', 'N', 'M', 'D', 'L', '1'};
constexpr int kVersion = 1;

void AppendU64(std::string& out, uint64_t v) {
  char bytes[8];
  std::memcpy(bytes, &v, 8);
  out.append(bytes, 8);
}

uint64_t ReadU64(std::string_view bytes, size_t at) {
  uint64_t v;
  std::memcpy(&v, bytes.data() + at, 8);
  return v;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ParameterStore InitParameters(const GraphSchema& schema, const ModelConfig& model,
                              const TaskConfig& task, uint64_t seed, DType dtype) {
  ParameterStore params(seed, dtype);
  Network(schema, model, task, params);
  return params;
}

void ExportModel(const ModelArtifact& artifact, const std::string& path) {
  const ParameterStore& params = artifact.params;
  json header;
  header["format"] = "hetgnn-model";
  header["version"] = kVersion;
  header["schema"] = json::parse(SerializeSchema(artifact.schema));
  header["schema_fingerprint"] = SchemaFingerprint(artifact.schema);
  header["model"] = json::parse(SerializeModelConfig(artifact.model));
  header["task"] = json::parse(SerializeTaskConfig(artifact.task));
  header["param_seed"] = params.seed();
  header["dtype"] = DTypeName(params.dtype());
  header["training"] = {{"final_step", artifact.final_step}, {"metrics", artifact.metrics}};
  std::string blob;
  json list = json::array();
  for (const std::string& name : params.Names()) {
    const DenseTensor& value = params.Get(name);
    const size_t offset = blob.size();
    DispatchDType(value.dtype(), [&]<typename T>() {
      std::span<const T> data = value.data<T>();
      blob.append(reinterpret_cast<const char*>(data.data()), data.size_bytes());
    });
    list.push_back({{"name", name},
                    {"shape", value.shape()},
                    {"offset", offset},
                    {"bytes", blob.size() - offset}});
  }
  header["parameters"] = list;
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  AppendU64(out, header_text.size());
  out += header_text;
  out += blob;
  AppendU64(out, Fnv1a64(out));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path);
}

ModelArtifact LoadModel(const std::string& path) {
  const std::string bytes = ReadFile(path);
  auto corrupt = [&](const std::string& what) {
    return CorruptDataError("model file " + path + ": " + what);
  };
  if (bytes.size() < sizeof(kMagic) + 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic))) {
    throw corrupt("not a model artifact");
  }
  const size_t body = bytes.size() - 8;
  if (Fnv1a64(std::string_view(bytes).substr(0, body)) != ReadU64(bytes, body)) {
    throw corrupt("checksum mismatch");
  }
  const uint64_t header_length = ReadU64(bytes, sizeof(kMagic));
  const size_t header_at = sizeof(kMagic) + 8;
  if (header_length > body - header_at) throw corrupt("header length out of range");
  const std::string_view blob =
      std::string_view(bytes).substr(header_at + header_length, body - header_at - header_length);

  ModelArtifact artifact;
  try {
    json header = json::parse(bytes.substr(header_at, header_length));
    if (header.at("format") != "hetgnn-model" || header.at("version") != kVersion) {
      throw corrupt("unsupported format");
    }
    artifact.schema = ParseSchema(header.at("schema").dump());
    if (header.at("schema_fingerprint").get<uint64_t>() != SchemaFingerprint(artifact.schema)) {
      throw corrupt("schema fingerprint does not match the stored schema");
    }
    artifact.model = ParseModelConfig(header.at("model").dump());
    artifact.task = ParseTaskConfig(header.at("task").dump());
    const std::string dtype_name = header.at("dtype").get<std::string>();
    DType dtype;
    if (dtype_name == DTypeName(DType::kFloat32)) {
      dtype = DType::kFloat32;
    } else if (dtype_name == DTypeName(DType::kFloat64)) {
      dtype = DType::kFloat64;
    } else {
      throw corrupt("unknown dtype " + dtype_name);
    }
    artifact.params = InitParameters(artifact.schema, artifact.model, artifact.task,
                                     header.at("param_seed").get<uint64_t>(), dtype);
    artifact.final_step = header.at("training").at("final_step").get<int64_t>();
    artifact.metrics =
        header.at("training").at("metrics").get<std::map<std::string, double>>();

    std::set<std::string> expected;
    for (const std::string& name : artifact.params.Names()) expected.insert(name);
    for (const json& entry : header.at("parameters")) {
      const std::string name = entry.at("name").get<std::string>();
      const Shape shape = entry.at("shape").get<Shape>();
      const size_t offset = entry.at("offset").get<size_t>();
      const size_t length = entry.at("bytes").get<size_t>();
      if (!expected.erase(name)) {
        throw ValidationError("model file " + path + ": parameter " + name +
                              " is not part of the configured model");
      }
      const Shape& want = artifact.params.Get(name).shape();
      if (shape != want) {
        throw ValidationError("model file " + path + ": parameter " + name + " has shape " +
                              ShapeString(shape) + ", configuration expects " + ShapeString(want));
      }
      if (offset > blob.size() || length > blob.size() - offset) {
        throw corrupt("parameter " + name + " outside the data section");
      }
      DispatchDType(dtype, [&]<typename T>() {
        const size_t count = static_cast<size_t>(NumElements(shape));
        if (length != count * sizeof(T)) throw corrupt("parameter " + name + " has wrong size");
        std::vector<T> values(count);
        std::memcpy(values.data(), blob.data() + offset, length);
        artifact.params.Set(name, DenseTensor(shape, std::move(values)));
      });
    }
    if (!expected.empty()) {
      throw ValidationError("model file " + path + ": missing parameter " + *expected.begin());
    }
  } catch (const json::exception& e) {
    throw corrupt(std::string("bad header: ") + e.what());
  }
  return artifact;
}

int64_t Infer(const ModelArtifact& artifact, const std::string& records,
              const std::string& output_path, int64_t batch_size) {
  if (batch_size < 1) throw InvalidArgument("batch_size must be positive");
  std::ofstream out(output_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + output_path);
  const TaskConfig& task = artifact.task;
  const bool binary = task.kind == TaskKind::kRootBinary;
  out << "# hetgnn predictions task=" << (binary ? "root_binary" : "root_multiclass")
      << " root=" << task.node_set << "[0] fields=record_index,"
      << (binary ? "probability" : "predicted_class") << ",logits\n";

  int64_t index = 0;
  std::vector<GraphTensor> pending;
  auto flush = [&] {
    const std::vector<std::vector<double>> logits = PredictLogits(artifact, pending, batch_size);
    for (const std::vector<double>& row : logits) {
      json line;
      line["record_index"] = index - static_cast<int64_t>(pending.size()) +
                             static_cast<int64_t>(&row - logits.data());
      if (binary) {
        line["probability"] = 1.0 / (1.0 + std::exp(-row[0]));
      } else {
        line["predicted_class"] = std::max_element(row.begin(), row.end()) - row.begin();
      }
      line["logits"] = row;
      out << line.dump() << "\n";
    }
    pending.clear();
  };
  for (const std::string& file : ExpandPaths(records)) {
    RecordReader reader(file);
    while (auto payload = reader.Next()) {
      try {
        pending.push_back(DecodeGraph(*payload, artifact.schema));
      } catch (const FingerprintMismatch& e) {
        throw FingerprintMismatch("record " + std::to_string(index) + ": " + e.what());
      } catch (const ValidationError& e) {
        throw ValidationError("record " + std::to_string(index) + ": " + e.what());
      } catch (const CorruptDataError& e) {
        throw CorruptDataError("record " + std::to_string(index) + ": " + e.what());
      }
      ++index;
      if (static_cast<int64_t>(pending.size()) == batch_size) flush();
    }
  }
  if (!pending.empty()) flush();
  if (!out) throw IoError("write failed for " + output_path);
  return index;
}

}  // namespace hetgnn
