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

// hetgnn: schema checks, record inspection, subgraph sampling, training,
// evaluation and inference from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hetgnn/errors.h"
#include "hetgnn/io.h"
#include "hetgnn/logging.h"
#include "hetgnn/runner.h"
#include "hetgnn/sampler.h"
#include "hetgnn/schema.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace hetgnn {
namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

// Flag-value problems detected after CLI11 parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string JoinNames(const FeatureMap& features) {
  std::string out;
  for (const auto& [name, feature] : features) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return "[" + out + "]";
}

// "set=path" pairs.
std::map<std::string, std::string> ParseAssignments(const std::vector<std::string>& items,
                                                    const char* flag) {
  std::map<std::string, std::string> out;
  for (const std::string& item : items) {
    const size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw UsageError(std::string(flag) + " expects SET=PATH, got \"" + item + "\"");
    }
    if (!out.emplace(item.substr(0, eq), item.substr(eq + 1)).second) {
      throw UsageError(std::string(flag) + " repeats set " + item.substr(0, eq));
    }
  }
  return out;
}

std::string ResolvePath(const std::string& base_dir, const std::string& path) {
  fs::path p(path);
  return (p.is_absolute() ? p : fs::path(base_dir) / p).string();
}

std::vector<std::string> ReadSeedIds(const std::string& path) {
  std::istringstream in(ReadText(path));
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    ids.push_back(line);
  }
  return ids;
}

// ---------------------------------------------------------------- commands

struct SchemaValidateArgs {
  std::string schema;
};

int SchemaValidate(const SchemaValidateArgs& args) {
  const GraphSchema schema = ReadSchemaFile(args.schema);
  std::cout << schema.node_sets.size() << " node sets, " << schema.edge_sets.size()
            << " edge sets\n";
  return 0;
}

struct InspectArgs {
  std::string in;
  std::string schema;
  int64_t limit = 1;
};

int RecordsInspect(const InspectArgs& args) {
  if (args.limit < 0) throw UsageError("--limit must be non-negative");
  std::optional<GraphSchema> schema;
  if (!args.schema.empty()) schema = ReadSchemaFile(args.schema);
  int64_t index = 0;
  for (const std::string& file : ExpandPaths(args.in)) {
    RecordReader reader(file);
    while (index < args.limit) {
      std::optional<std::string> payload = reader.Next();
      if (!payload) break;
      DecodedRecord record = DecodeGraphUnchecked(*payload);
      if (schema) record.graph = DecodeGraph(*payload, *schema);
      const GraphTensor& g = record.graph;
      std::cout << "record " << index << ": " << g.num_components() << " component(s), "
                << "schema fingerprint " << std::hex << record.schema_fingerprint << std::dec
                << "\n";
      std::cout << "  context: features " << JoinNames(g.context()) << "\n";
      for (const auto& [name, set] : g.node_sets()) {
        std::cout << "  node set " << name << ": " << set.total_size() << " nodes, features "
                  << JoinNames(set.features) << "\n";
      }
      for (const auto& [name, set] : g.edge_sets()) {
        std::cout << "  edge set " << name << " (" << set.adjacency.source_set() << " -> "
                  << set.adjacency.target_set() << "): " << set.total_size()
                  << " edges, features " << JoinNames(set.features) << "\n";
      }
      ++index;
    }
    if (index >= args.limit) break;
  }
  LogInfo("inspected " + std::to_string(index) + " record(s)");
  return 0;
}

struct SampleArgs {
  std::string schema;
  std::vector<std::string> nodes;
  std::vector<std::string> edges;
  std::string spec;
  std::string seeds;
  std::string out;
  uint64_t seed = 0;
  int shards = 1;
};

int Sample(const SampleArgs& args) {
  if (args.shards < 1) throw UsageError("--shards must be at least 1");
  const GraphSchema schema = ReadSchemaFile(args.schema);
  const std::string base_dir = fs::path(args.schema).parent_path().string();
  const auto node_paths = ParseAssignments(args.nodes, "--nodes");
  const auto edge_paths = ParseAssignments(args.edges, "--edges");
  for (const auto& [set, path] : node_paths) {
    if (!schema.node_sets.contains(set)) throw UsageError("--nodes: unknown node set " + set);
  }
  for (const auto& [set, path] : edge_paths) {
    if (!schema.edge_sets.contains(set)) throw UsageError("--edges: unknown edge set " + set);
  }
  auto table_path = [&](const std::map<std::string, std::string>& given, const std::string& set,
                        const SetMetadata& metadata) {
    if (auto it = given.find(set); it != given.end()) return it->second;
    if (!metadata.filename) {
      throw ValidationError("set " + set + " has no table: pass it or give a metadata filename");
    }
    return ResolvePath(base_dir, *metadata.filename);
  };

  std::map<std::string, NodeTable> nodes;
  for (const auto& [name, spec] : schema.node_sets) {
    nodes.emplace(name, ReadNodeTable(table_path(node_paths, name, spec.metadata), spec));
  }
  std::map<std::string, EdgeTable> edges;
  for (const auto& [name, spec] : schema.edge_sets) {
    edges.emplace(name, ReadEdgeTable(table_path(edge_paths, name, spec.metadata), spec));
  }
  const GraphStore store = GraphStore::Build(schema, std::move(nodes), std::move(edges));
  const SamplingSpec spec = CheckSamplingSpec(schema, ParseSamplingSpec(ReadText(args.spec)));

  std::vector<SeedNode> seeds;
  for (std::string& id : ReadSeedIds(args.seeds)) {
    seeds.push_back({spec.seed_op.node_set_name, std::move(id)});
  }
  LogInfo("sampling " + std::to_string(seeds.size()) + " seed(s) on " +
          std::to_string(args.shards) + " shard(s)");

  const uint64_t fingerprint = SchemaFingerprint(schema);
  RecordWriter writer(args.out);
  SamplerOptions options;
  options.seed = args.seed;
  options.num_shards = args.shards;
  SampleSubgraphs(store, spec, seeds, options, [&](int64_t, GraphTensor graph) {
    writer.Write(EncodeGraph(graph, fingerprint));
  });
  writer.Close();
  LogInfo("wrote " + std::to_string(writer.num_records()) + " record(s) to " + args.out);
  return 0;
}

struct TrainArgs {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
};

std::string FormatMetrics(const Metrics& m) {
  std::ostringstream out;
  out << "examples=" << m.examples;
  if (m.loss) out << " loss=" << *m.loss;
  if (m.accuracy) out << " accuracy=" << *m.accuracy;
  return out.str();
}

int Train(const TrainArgs& args) {
  TrainingJob job = ParseTrainingJob(ReadText(args.config),
                                     fs::path(args.config).parent_path().string());
  if (args.seed) job.trainer.seed = *args.seed;
  const GraphSchema schema = ReadSchemaFile(job.schema_path);
  const std::vector<GraphTensor> train = ReadGraphs(job.train_records, schema);
  std::vector<GraphTensor> valid;
  if (!job.valid_records.empty()) valid = ReadGraphs(job.valid_records, schema);
  LogInfo("training on " + std::to_string(train.size()) + " example(s), validating on " +
          std::to_string(valid.size()));

  const TrainingResult result =
      RunTraining(schema, job.model, job.task, job.trainer, train, valid,
                  [](const StepRecord& step) {
                    if (step.step % 50 != 0) return;
                    std::ostringstream line;
                    line << "step " << step.step << " lr=" << step.learning_rate
                         << " loss=" << step.loss;
                    LogInfo(line.str());
                  });
  ExportModel(result.artifact, args.out);
  LogInfo("wrote model to " + args.out + " after " +
          std::to_string(result.artifact.final_step) + " step(s)");
  return 0;
}

struct EvaluateArgs {
  std::string model;
  std::string records;
  std::string out;
  int64_t batch_size = 32;
};

int EvaluateCommand(const EvaluateArgs& args) {
  if (args.batch_size < 1) throw UsageError("--batch-size must be positive");
  const ModelArtifact artifact = LoadModel(args.model);
  const std::vector<GraphTensor> graphs = ReadGraphs(args.records, artifact.schema);
  const Metrics metrics = Evaluate(artifact, artifact.schema, graphs, args.batch_size);
  std::cout << FormatMetrics(metrics) << "\n";
  if (!args.out.empty()) {
    nlohmann::ordered_json j;
    j["examples"] = metrics.examples;
    if (metrics.loss) j["loss"] = *metrics.loss;
    if (metrics.accuracy) j["accuracy"] = *metrics.accuracy;
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw IoError("cannot write " + args.out);
    out << j.dump(2) << "\n";
  }
  return 0;
}

struct InferArgs {
  std::string model;
  std::string records;
  std::string out;
  int64_t batch_size = 32;
};

int InferCommand(const InferArgs& args) {
  if (args.batch_size < 1) throw UsageError("--batch-size must be positive");
  const ModelArtifact artifact = LoadModel(args.model);
  const int64_t n = Infer(artifact, args.records, args.out, args.batch_size);
  LogInfo("wrote " + std::to_string(n) + " prediction(s) to " + args.out);
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Heterogeneous graph learning: schemas, records, sampling and training."};
  app.name("hetgnn");
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  SchemaValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("schema-validate", "Check a graph schema");
  validate_cmd->add_option("--schema", validate.schema, "Schema JSON")->required();

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("records-inspect", "Summarize graph records");
  inspect_cmd->add_option("--in", inspect.in, "Record file(s): comma list of paths or name@K")
      ->required();
  inspect_cmd->add_option("--limit", inspect.limit, "Records to print")->capture_default_str();
  inspect_cmd->add_option("--schema", inspect.schema, "Decode and check against this schema");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Sample rooted subgraphs into a record file");
  sample_cmd->add_option("--schema", sample.schema, "Schema JSON")->required();
  sample_cmd->add_option("--nodes", sample.nodes,
                         "SET=PATH node table; defaults to the schema's filename");
  sample_cmd->add_option("--edges", sample.edges,
                         "SET=PATH edge table; defaults to the schema's filename");
  sample_cmd->add_option("--spec", sample.spec, "Sampling spec JSON")->required();
  sample_cmd->add_option("--seeds", sample.seeds, "Seed ids, one per line")->required();
  sample_cmd->add_option("--out", sample.out, "Output record file")->required();
  sample_cmd->add_option("--seed", sample.seed, "Random seed")->capture_default_str();
  sample_cmd->add_option("--shards", sample.shards, "Worker threads")->capture_default_str();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a job config");
  train_cmd->add_option("--config", train.config, "Training job JSON")->required();
  train_cmd->add_option("--out", train.out, "Output model file")->required();
  train_cmd->add_option("--seed", train.seed, "Override the job's seed");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compute loss and accuracy");
  evaluate_cmd->add_option("--model", evaluate.model, "Model file")->required();
  evaluate_cmd->add_option("--records", evaluate.records, "Labeled record file(s)")->required();
  evaluate_cmd->add_option("--out", evaluate.out, "Write metrics JSON here");
  evaluate_cmd->add_option("--batch-size", evaluate.batch_size)->capture_default_str();

  InferArgs infer;
  auto* infer_cmd = app.add_subcommand("infer", "Write per-record predictions");
  infer_cmd->add_option("--model", infer.model, "Model file")->required();
  infer_cmd->add_option("--records", infer.records, "Record file(s)")->required();
  infer_cmd->add_option("--out", infer.out, "Output predictions (NDJSON)")->required();
  infer_cmd->add_option("--batch-size", infer.batch_size)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "hetgnn: " << e.what() << "\n";
    CLI::App* failed = &app;
    for (CLI::App* sub : app.get_subcommands()) failed = sub;
    std::cerr << failed->help();
    return kUsageError;
  }
  if (quiet) SetLogLevel(LogLevel::kWarning);

  try {
    if (*validate_cmd) return SchemaValidate(validate);
    if (*inspect_cmd) return RecordsInspect(inspect);
    if (*sample_cmd) return Sample(sample);
    if (*train_cmd) return Train(train);
    if (*evaluate_cmd) return EvaluateCommand(evaluate);
    if (*infer_cmd) return InferCommand(infer);
  } catch (const UsageError& e) {
    std::cerr << "hetgnn: " << e.what() << "\n";
    return kUsageError;
  } catch (const InvalidArgument& e) {
    std::cerr << "hetgnn: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "hetgnn: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

}  // namespace
}  // namespace hetgnn

int main(int argc, char** argv) { return hetgnn::Main(argc, argv); }
