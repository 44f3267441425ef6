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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "hetgnn/errors.h"
#include "hetgnn/io.h"
#include "hetgnn/runner.h"
#include "hetgnn/sampler.h"
#include "hetgnn/schema.h"

namespace py = pybind11;

namespace hetgnn {
namespace {

template <typename T>
py::array_t<T> ToArray(std::span<const T> values, const Shape& shape) {
  std::vector<py::ssize_t> dims(shape.begin(), shape.end());
  py::array_t<T> out(dims);
  if (!values.empty()) std::memcpy(out.mutable_data(), values.data(), values.size() * sizeof(T));
  return out;
}

// Dense values as a numpy array; strings as a flat list. Ragged features
// return their flat values (see row_lengths).
py::object FeatureValues(const Feature& f) {
  switch (f.dtype()) {
    case FeatureDType::kFloat32:
      return ToArray(f.tensor().value().data<float>(), f.flat_shape());
    case FeatureDType::kFloat64:
      return ToArray(f.tensor().value().data<double>(), f.flat_shape());
    case FeatureDType::kInt64:
      return ToArray(f.ints(), f.flat_shape());
    case FeatureDType::kString:
      return py::cast(std::vector<std::string>(f.strings().begin(), f.strings().end()));
  }
  throw Error("unknown feature dtype");
}

const FeatureMap& SetFeatures(const GraphTensor& g, const std::string& set) {
  if (set.empty()) return g.context();
  if (g.node_sets().contains(set)) return g.node_sets().at(set).features;
  if (g.edge_sets().contains(set)) return g.edge_sets().at(set).features;
  throw InvalidArgument("no node or edge set " + set);
}

const Feature& FindFeature(const GraphTensor& g, const std::string& set, const std::string& name) {
  const FeatureMap& features = SetFeatures(g, set);
  auto it = features.find(name);
  if (it == features.end()) throw InvalidArgument("no feature " + name + " on set \"" + set + "\"");
  return it->second;
}

std::vector<GraphTensor> SampleFromStore(const GraphSchema& schema, const std::string& base_dir,
                                         const std::string& spec_json,
                                         const std::vector<std::string>& seed_ids, uint64_t seed,
                                         int shards) {
  const GraphStore store = GraphStore::Load(schema, base_dir);
  const SamplingSpec spec = CheckSamplingSpec(schema, ParseSamplingSpec(spec_json));
  std::vector<SeedNode> seeds;
  for (const std::string& id : seed_ids) seeds.push_back({spec.seed_op.node_set_name, id});
  SamplerOptions options;
  options.seed = seed;
  options.num_shards = shards;
  py::gil_scoped_release release;
  return SampleSubgraphs(store, spec, seeds, options);
}

}  // namespace
}  // namespace hetgnn

PYBIND11_MODULE(_hetgnn, m) {
  using namespace hetgnn;  // NOLINT
  m.doc() = "Heterogeneous graph tensors, sampling and training.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<CorruptDataError>(m, "CorruptDataError", error.ptr());
  py::register_exception<FingerprintMismatch>(m, "FingerprintMismatch", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());

  py::class_<GraphSchema>(m, "GraphSchema")
      .def_static("parse", &ParseSchema, py::arg("text"))
      .def_static("read", &ReadSchemaFile, py::arg("path"))
      .def_property_readonly("node_sets",
                             [](const GraphSchema& s) {
                               std::vector<std::string> names;
                               for (const auto& [name, spec] : s.node_sets) names.push_back(name);
                               return names;
                             })
      .def_property_readonly("edge_sets",
                             [](const GraphSchema& s) {
                               std::map<std::string, std::pair<std::string, std::string>> out;
                               for (const auto& [name, spec] : s.edge_sets) {
                                 out[name] = {spec.source, spec.target};
                               }
                               return out;
                             })
      .def("fingerprint", &SchemaFingerprint)
      .def("to_json", &SerializeSchema)
      .def("__eq__", [](const GraphSchema& a, const GraphSchema& b) { return a == b; });

  py::class_<GraphTensor>(m, "GraphTensor")
      .def_property_readonly("num_components", &GraphTensor::num_components)
      .def("node_set_sizes",
           [](const GraphTensor& g) {
             std::map<std::string, int64_t> out;
             for (const auto& [name, set] : g.node_sets()) out[name] = set.total_size();
             return out;
           })
      .def("edge_set_sizes",
           [](const GraphTensor& g) {
             std::map<std::string, int64_t> out;
             for (const auto& [name, set] : g.edge_sets()) out[name] = set.total_size();
             return out;
           })
      .def("adjacency",
           [](const GraphTensor& g, const std::string& edge_set) {
             const Adjacency& adj = g.edge_set(edge_set).adjacency;
             const Shape shape{adj.size()};
             return py::make_tuple(ToArray(adj.source(), shape), ToArray(adj.target(), shape));
           },
           py::arg("edge_set"))
      .def("feature_names",
           [](const GraphTensor& g, const std::string& set) {
             std::vector<std::string> names;
             for (const auto& [name, f] : SetFeatures(g, set)) names.push_back(name);
             return names;
           },
           py::arg("set") = "")
      .def("feature",
           [](const GraphTensor& g, const std::string& set, const std::string& name) {
             return FeatureValues(FindFeature(g, set, name));
           },
           py::arg("set"), py::arg("name"),
           "Values of a feature; set \"\" is the context.")
      .def("row_lengths",
           [](const GraphTensor& g, const std::string& set, const std::string& name) {
             const Feature& f = FindFeature(g, set, name);
             if (!f.ragged()) throw InvalidArgument("feature " + name + " is not ragged");
             return ToArray(f.row_lengths(), Shape{static_cast<int64_t>(f.row_lengths().size())});
           },
           py::arg("set"), py::arg("name"))
      .def("__eq__", [](const GraphTensor& a, const GraphTensor& b) { return GraphsEqual(a, b); });

  m.def("read_graphs", &ReadGraphs, py::arg("paths"), py::arg("schema"),
        "Reads every record of the files matched by `paths`.");
  m.def(
      "write_graphs",
      [](const std::string& path, const GraphSchema& schema, const std::vector<GraphTensor>& gs) {
        WriteGraphs(path, schema, gs);
      },
      py::arg("path"), py::arg("schema"), py::arg("graphs"));
  m.def(
      "encode_graph",
      [](const GraphTensor& g, const GraphSchema& schema) {
        return py::bytes(EncodeGraph(g, SchemaFingerprint(schema)));
      },
      py::arg("graph"), py::arg("schema"));
  m.def(
      "decode_graph",
      [](py::bytes payload, const GraphSchema& schema) {
        return DecodeGraph(std::string(payload), schema);
      },
      py::arg("payload"), py::arg("schema"));
  m.def(
      "validate_graph",
      [](const GraphSchema& schema, const GraphTensor& g) { return ValidateGraph(schema, g); },
      py::arg("schema"), py::arg("graph"), "Violation messages; empty when the graph conforms.");
  m.def("merge_batch",
        [](const std::vector<GraphTensor>& gs) { return MergeBatch(gs); }, py::arg("graphs"));

  m.def(
      "check_sampling_spec",
      [](const GraphSchema& schema, const std::string& text) {
        return SerializeSamplingSpec(CheckSamplingSpec(schema, ParseSamplingSpec(text)));
      },
      py::arg("schema"), py::arg("spec_json"), "Checks a spec; returns it in canonical form.");
  m.def("sample", &SampleFromStore, py::arg("schema"), py::arg("base_dir"), py::arg("spec_json"),
        py::arg("seeds"), py::arg("seed") = 0, py::arg("shards") = 1,
        "Loads the tables named in the schema (relative to base_dir) and samples one rooted "
        "subgraph per seed id.");

  m.def(
      "write_community_files",
      [](const std::string& dir, int64_t num_users, int64_t num_items, uint64_t seed) {
        CommunityOptions options;
        options.num_users = num_users;
        options.num_items = num_items;
        options.seed = seed;
        WriteCommunityFiles(MakeCommunityData(options), dir);
      },
      py::arg("dir"), py::arg("num_users") = 200, py::arg("num_items") = 40, py::arg("seed") = 1,
      "Writes a two-community user/item dataset (schema, tables, spec, seeds).");
  m.def(
      "community_model_config",
      [](int64_t message_dim, int64_t rounds) {
        return SerializeModelConfig(CommunityModelConfig(message_dim, rounds));
      },
      py::arg("message_dim") = 32, py::arg("rounds") = 2);

  py::class_<ModelArtifact>(m, "Model")
      .def_static("load", &LoadModel, py::arg("path"))
      .def("save", &ExportModel, py::arg("path"))
      .def_property_readonly("schema", [](const ModelArtifact& a) { return a.schema; })
      .def_property_readonly("final_step", [](const ModelArtifact& a) { return a.final_step; })
      .def_property_readonly("parameter_names",
                             [](const ModelArtifact& a) { return a.params.Names(); })
      .def("parameter",
           [](const ModelArtifact& a, const std::string& name) {
             const DenseTensor& t = a.params.Get(name);
             return t.dtype() == DType::kFloat32 ? py::object(ToArray(t.data<float>(), t.shape()))
                                                 : py::object(ToArray(t.data<double>(), t.shape()));
           },
           py::arg("name"))
      .def(
          "evaluate",
          [](const ModelArtifact& a, const std::vector<GraphTensor>& graphs, int64_t batch_size) {
            Metrics metrics;
            {
              py::gil_scoped_release release;
              metrics = Evaluate(a, a.schema, graphs, batch_size);
            }
            py::dict out;
            out["examples"] = metrics.examples;
            if (metrics.loss) out["loss"] = *metrics.loss;
            if (metrics.accuracy) out["accuracy"] = *metrics.accuracy;
            return out;
          },
          py::arg("graphs"), py::arg("batch_size") = 32)
      .def(
          "predict_logits",
          [](const ModelArtifact& a, const std::vector<GraphTensor>& graphs, int64_t batch_size) {
            std::vector<std::vector<double>> rows;
            {
              py::gil_scoped_release release;
              rows = PredictLogits(a, graphs, batch_size);
            }
            const int64_t cols = rows.empty() ? 0 : static_cast<int64_t>(rows[0].size());
            py::array_t<double> out({static_cast<py::ssize_t>(rows.size()),
                                     static_cast<py::ssize_t>(cols)});
            auto view = out.mutable_unchecked<2>();
            for (size_t i = 0; i < rows.size(); ++i) {
              for (int64_t k = 0; k < cols; ++k) view(i, k) = rows[i][k];
            }
            return out;
          },
          py::arg("graphs"), py::arg("batch_size") = 32);

  m.def(
      "train",
      [](const std::string& config_path) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw IoError("cannot open " + config_path);
        const std::string text((std::istreambuf_iterator<char>(in)), {});
        const TrainingJob job = ParseTrainingJob(
            text, std::filesystem::path(config_path).parent_path().string());
        const GraphSchema schema = ReadSchemaFile(job.schema_path);
        py::gil_scoped_release release;
        const std::vector<GraphTensor> train = ReadGraphs(job.train_records, schema);
        std::vector<GraphTensor> valid;
        if (!job.valid_records.empty()) valid = ReadGraphs(job.valid_records, schema);
        return RunTraining(schema, job.model, job.task, job.trainer, train, valid).artifact;
      },
      py::arg("config_path"), "Runs a training job file and returns the trained model.");
}
