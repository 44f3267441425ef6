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

// Runs the acceptance checks and prints one PASS/FAIL line per criterion.
// Exit status is 0 only if every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hetgnn/exchange.h"
#include "hetgnn/io.h"
#include "hetgnn/layers.h"
#include "hetgnn/logging.h"
#include "hetgnn/runner.h"
#include "hetgnn/sampler.h"
#include "testing/community.h"
#include "testing/dense_oracle.h"
#include "testing/gradient_suite.h"
#include "testing/layer_check.h"
#include "testing/random_graph.h"
#include "testing/random_hetero.h"
#include "testing/sampler_oracle.h"

namespace hetgnn {
namespace {

using testing::Dense;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed condition; keeps the first few messages.
  void Require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass || failures < 3) detail << " [" << what << "]";
    pass = false;
    ++failures;
  }
  int failures = 0;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------- 1

void ExchangeOracles(Outcome& out) {
  const auto start = Clock::now();
  std::mt19937_64 gen(1001);
  double worst_exact = 0, worst_mean = 0, worst_softmax = 0;
  int graphs = 0;
  for (int trial = 0; trial < 200; ++trial, ++graphs) {
    const GraphTensor g = testing::RandomHeteroGraph(gen);
    auto pool_checks = [&](const Dense& b, const Dense& y, auto pooled) {
      for (ReduceType type : {ReduceType::kSum, ReduceType::kMax, ReduceType::kMin}) {
        worst_exact = std::max(worst_exact,
                               testing::MaxAbsDiff(Dense(pooled(type).value()),
                                                   testing::DensePool(b, y, type)));
      }
      worst_mean = std::max(worst_mean, testing::MaxAbsDiff(Dense(pooled(ReduceType::kMean).value()),
                                                            testing::DensePool(b, y, ReduceType::kMean)));
    };
    const Dense ctx(g.context().at(kHiddenState).tensor().value());
    for (const auto& [name, set] : g.node_sets()) {
      const Dense x(set.features.at(kHiddenState).tensor().value());
      const Dense b = testing::Incidence(
          SetComponentIds(g, {SetKind::kNodeSet, name}), g.num_components());
      worst_exact = std::max(worst_exact,
                             testing::MaxAbsDiff(Dense(BroadcastContextToNodes(g, name, kHiddenState).value()),
                                                 testing::MatMul(b, ctx)));
      pool_checks(b, x, [&](ReduceType t) { return PoolNodesToContext(g, name, t, kHiddenState); });
    }
    for (const auto& [name, set] : g.edge_sets()) {
      const Tensor& y_tensor = set.features.at(kHiddenState).tensor();
      const Dense y(y_tensor.value());
      const Dense bc = testing::Incidence(
          SetComponentIds(g, {SetKind::kEdgeSet, name}), g.num_components());
      worst_exact = std::max(worst_exact,
                             testing::MaxAbsDiff(Dense(BroadcastContextToEdges(g, name, kHiddenState).value()),
                                                 testing::MatMul(bc, ctx)));
      pool_checks(bc, y, [&](ReduceType t) { return PoolEdgesToContext(g, name, t, kHiddenState); });
      worst_softmax = std::max(
          worst_softmax, testing::MaxAbsDiff(Dense(EdgeSoftmax(g, name, EndpointTag::kContext, y_tensor).value()),
                                             testing::DenseSoftmax(bc, y)));
      for (EndpointTag tag : {EndpointTag::kSource, EndpointTag::kTarget}) {
        const std::string& node_set = EndpointSet(g, name, tag);
        const Dense x(g.node_set(node_set).features.at(kHiddenState).tensor().value());
        const Dense b =
            testing::Incidence(EndpointIndices(g, name, tag), g.node_set(node_set).total_size());
        worst_exact = std::max(worst_exact,
                               testing::MaxAbsDiff(Dense(BroadcastNodeToEdges(g, name, tag, kHiddenState).value()),
                                                   testing::MatMul(b, x)));
        pool_checks(b, y, [&](ReduceType t) { return PoolEdgesToNode(g, name, tag, t, kHiddenState); });
        worst_softmax = std::max(
            worst_softmax,
            testing::MaxAbsDiff(Dense(EdgeSoftmax(g, name, tag, y_tensor).value()),
                                testing::DenseSoftmax(b, y)));
      }
    }
  }
  const double seconds = Seconds(start);
  out.Require(worst_exact == 0.0, "broadcast/sum/max/min differ by " + Fmt(worst_exact));
  out.Require(worst_mean <= 1e-6, "mean differs by " + Fmt(worst_mean));
  out.Require(worst_softmax <= 1e-6, "softmax differs by " + Fmt(worst_softmax));
  out.Require(seconds < 10.0, "took " + Fmt(seconds) + " s");
  out.detail << " graphs=" << graphs << " exact_max_diff=" << Fmt(worst_exact)
             << " mean_max_diff=" << Fmt(worst_mean) << " softmax_max_diff=" << Fmt(worst_softmax)
             << " time=" << Fmt(seconds) << "s";
}

// ---------------------------------------------------------------- 2

void GcnOracle(Outcome& out) {
  std::mt19937_64 gen(1002);
  testing::HeteroOptions o;
  o.homogeneous = true;
  o.dtype = DType::kFloat32;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const GraphTensor g = testing::RandomHeteroGraph(gen, o);
    ParameterStore params(trial, DType::kFloat32);
    GcnConv conv(params, "gcn", {3, 4, EndpointTag::kTarget});
    RunContext ctx(&params, nullptr, false);
    const Dense got = testing::ToDense(conv.Call(g, "e", ctx));
    const Dense want =
        testing::GcnOracle(g, testing::ParamDense(params, conv.dense().kernel_name()), true);
    worst = std::max(worst, testing::MaxAbsDiff(got, want));
  }
  out.Require(worst <= 1e-5, "max diff " + Fmt(worst));
  out.detail << " graphs=100 dtype=float32 max_diff=" << Fmt(worst);
}

// ---------------------------------------------------------------- 3

void GradientSuite(Outcome& out) {
  const auto start = Clock::now();
  const auto results = testing::RunGradientSuite(20, 1003, testing::GradientCases());
  const double seconds = Seconds(start);
  double worst = 0;
  std::string worst_case;
  for (const auto& r : results) {
    out.Require(r.instances >= 20, r.name + " ran " + std::to_string(r.instances));
    out.Require(r.max_relative_error <= 1e-4,
                r.name + " relative error " + Fmt(r.max_relative_error));
    if (r.max_relative_error >= worst) {
      worst = r.max_relative_error;
      worst_case = r.name;
    }
  }
  std::set<std::string> names;
  for (const auto& r : results) names.insert(r.name);
  for (const char* required : {"vanilla_mpnn", "gcn", "rgcn_next_state", "sage", "gatv2",
                               "layer_norm", "task_multiclass", "task_binary"}) {
    out.Require(names.count(required) == 1, std::string("missing case ") + required);
  }
  out.Require(seconds < 60.0, "took " + Fmt(seconds) + " s");
  out.detail << " cases=" << results.size() << " instances_each=20 worst=" << Fmt(worst) << " ("
             << worst_case << ") time=" << Fmt(seconds) << "s";
}

// ---------------------------------------------------------------- 4

std::pair<double, std::map<std::string, DenseTensor>> LossAndGrads(const Network& net,
                                                                   const ParameterStore& params,
                                                                   const LabeledBatch& batch) {
  Tape tape;
  RunContext ctx(&params, &tape, false);
  TaskOutput result =
      net.task().Loss(net.Logits(batch, ctx), batch.labels, batch.component_mask);
  return {result.loss.value().ToDoubles()[0], tape.Backward(result.loss)};
}

void Neutrality(Outcome& out) {
  const testing::CommunitySplits& d = testing::Splits();
  ModelArtifact artifact;
  artifact.schema = d.schema;
  artifact.model = CommunityModelConfig();
  artifact.task = testing::CommunityTask();
  artifact.params = InitParameters(d.schema, artifact.model, artifact.task, 4);
  const std::vector<GraphTensor> graphs(d.valid.begin(), d.valid.begin() + 24);
  const auto one = PredictLogits(artifact, graphs, 1);
  double logit_diff = 0;
  for (int64_t bs : {int64_t{4}, static_cast<int64_t>(graphs.size())}) {
    const auto many = PredictLogits(artifact, graphs, bs);
    out.Require(many.size() == one.size(), "row count differs at batch size " + std::to_string(bs));
    for (size_t i = 0; i < one.size() && i < many.size(); ++i) {
      for (size_t k = 0; k < one[i].size(); ++k) {
        logit_diff = std::max(logit_diff, std::abs(one[i][k] - many[i][k]));
      }
    }
  }
  out.Require(logit_diff <= 1e-5, "logits differ by " + Fmt(logit_diff));

  // Padding in float64 so the comparison measures semantics, not roundoff.
  ParameterStore params(11, DType::kFloat64);
  Network net(d.schema, CommunityModelConfig(), testing::CommunityTask(), params);
  double loss_diff = 0, grad_diff = 0;
  for (int start = 0; start + 6 <= 30; start += 6) {
    const std::vector<GraphTensor> parts(d.train.begin() + start, d.train.begin() + start + 6);
    const GraphTensor merged = MergeBatch(parts);
    const PaddedGraph padded =
        PadToTotalSizes(merged, ResolvePadding(PaddingConfig{true, {}}, 6, parts));
    out.Require(padded.graph.num_components() > merged.num_components(), "no padding added");
    const auto [loss, grads] = LossAndGrads(net, params, net.task().ExtractLabels(merged));
    const auto [ploss, pgrads] = LossAndGrads(
        net, params, net.task().ExtractLabels(padded.graph, padded.component_mask));
    loss_diff = std::max(loss_diff, std::abs(loss - ploss));
    out.Require(grads.size() == pgrads.size(), "gradient sets differ");
    for (const auto& [name, g] : grads) {
      const std::vector<double> a = g.ToDoubles(), b = pgrads.at(name).ToDoubles();
      for (size_t i = 0; i < a.size(); ++i) grad_diff = std::max(grad_diff, std::abs(a[i] - b[i]));
    }
  }
  out.Require(loss_diff <= 1e-6, "padded loss differs by " + Fmt(loss_diff));
  out.Require(grad_diff <= 1e-6, "padded gradients differ by " + Fmt(grad_diff));
  out.detail << " batch_sizes={1,4," << graphs.size() << "} logit_max_diff=" << Fmt(logit_diff)
             << " padding_loss_diff=" << Fmt(loss_diff) << " padding_grad_diff=" << Fmt(grad_diff);
}

// ---------------------------------------------------------------- 5

void Sampler(Outcome& out) {
  std::mt19937_64 gen(1005);
  int matched = 0, max_nodes = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const testing::RandomStore rs = testing::MakeRandomStore(gen, 120, 80);
    const SamplingSpec spec = testing::RandomStoreProgram(rs.schema);
    const int nodes = static_cast<int>(rs.store.num_nodes("p") + rs.store.num_nodes("q"));
    max_nodes = std::max(max_nodes, nodes);
    const std::string seed = "p" + std::to_string(gen() % rs.store.num_nodes("p"));
    const GraphTensor g = SampleSubgraph(rs.store, spec, {"p", seed}, trial, 3);
    const auto ids = testing::LocalIds(g);
    const bool ok = ids.at("p")[0] == seed &&
                    testing::ToIds(rs.schema, g, ids) == testing::BfsOracle(rs.store, spec, seed);
    matched += ok;
  }
  out.Require(matched == 50, std::to_string(50 - matched) + " samples differ from BFS");
  out.Require(max_nodes <= 200, "store with " + std::to_string(max_nodes) + " nodes");

  const GraphStore star = testing::Star(10);
  constexpr int kTrials = 10000;
  double worst_freq = 0;
  for (int64_t size : {1, 3, 7}) {
    std::vector<int> counts(10, 0);
    for (int t = 0; t < kTrials; ++t) {
      for (const SampledEdge& e :
           SampleEdges(star, 0, "e", SampleDirection::kForward, size, 42, "op", t)) {
        ++counts[e.edge];
      }
    }
    for (int c : counts) {
      worst_freq = std::max(worst_freq, std::abs(c / double(kTrials) - size / 10.0));
    }
  }
  out.Require(worst_freq <= 0.02, "selection frequency off by " + Fmt(worst_freq));

  const testing::RandomStore rs = testing::MakeRandomStore(gen, 120, 80);
  SamplingSpecBuilder builder(rs.schema);
  auto seed = builder.Seed("p");
  seed.Sample(2, "pp").Join({seed}).Sample(2, "pq").Sample(3, "qp");
  const SamplingSpec spec = seed.Build();
  std::vector<SeedNode> seeds;
  for (int i = 0; i < 300; ++i) {
    seeds.push_back({"p", "p" + std::to_string(gen() % rs.store.num_nodes("p"))});
  }
  const uint64_t fp = SchemaFingerprint(rs.schema);
  std::string reference;
  bool invariant = true;
  for (int shards : {1, 4, 8}) {
    SamplerOptions options;
    options.seed = 99;
    options.num_shards = shards;
    options.chunk_size = 64;
    std::string bytes;
    SampleSubgraphs(rs.store, spec, seeds, options,
                    [&](int64_t, GraphTensor g) { bytes += EncodeGraph(g, fp); });
    if (shards == 1) {
      reference = bytes;
    } else {
      invariant = invariant && bytes == reference;
    }
  }
  out.Require(invariant, "output depends on the shard count");
  out.detail << " bfs_matches=" << matched << "/50 max_store_nodes=" << max_nodes
             << " uniform_max_dev=" << Fmt(worst_freq) << " shards{1,4,8}_identical="
             << (invariant ? "yes" : "no");
}

// ---------------------------------------------------------------- 6

void EndToEnd(Outcome& out) {
  const auto start = Clock::now();
  CommunityData train_data = MakeCommunityData({});
  const double oracle = testing::LogisticOnDegreeAccuracy(train_data);
  out.Require(oracle >= 0.95, "degree oracle accuracy " + Fmt(oracle));
  const testing::CommunitySplits& d = testing::Splits();
  const ModelConfig model = CommunityModelConfig(32, 2);
  const TrainerConfig trainer = testing::CommunityTrainer();
  const TrainingResult a =
      RunTraining(d.schema, model, testing::CommunityTask(), trainer, d.train, d.valid);
  const double seconds = Seconds(start);
  const Metrics train = Evaluate(a.artifact, d.schema, d.train);
  const Metrics valid = Evaluate(a.artifact, d.schema, d.valid);
  out.Require(a.steps.size() <= 200, std::to_string(a.steps.size()) + " steps");
  out.Require(*train.accuracy >= 0.95, "train accuracy " + Fmt(*train.accuracy));
  out.Require(*valid.accuracy >= 0.90, "held-out accuracy " + Fmt(*valid.accuracy));
  out.Require(seconds < 120.0, "took " + Fmt(seconds) + " s");

  const TrainingResult b =
      RunTraining(d.schema, model, testing::CommunityTask(), trainer, d.train, d.valid);
  bool same = a.steps.size() == b.steps.size();
  for (size_t i = 0; same && i < a.steps.size(); ++i) same = a.steps[i].loss == b.steps[i].loss;
  for (const std::string& name : a.artifact.params.Names()) {
    same = same && a.artifact.params.Get(name).BitwiseEqual(b.artifact.params.Get(name));
  }
  out.Require(same, "second run differs");
  out.detail << " oracle=" << Fmt(oracle) << " steps=" << a.steps.size()
             << " train_acc=" << Fmt(*train.accuracy) << " heldout_acc=" << Fmt(*valid.accuracy)
             << " deterministic=" << (same ? "yes" : "no") << " time=" << Fmt(seconds) << "s";
}

// ---------------------------------------------------------------- 7

void Serialization(Outcome& out) {
  const GraphSchema schema = ParseSchema(testing::kRandomSchemaJson);
  const uint64_t fp = SchemaFingerprint(schema);
  std::mt19937_64 gen(1007);
  int exact = 0;
  for (int i = 0; i < 1000; ++i) {
    const GraphTensor g = testing::RandomGraph(gen);
    const std::string bytes = EncodeGraph(g, fp);
    const GraphTensor back = DecodeGraph(bytes, schema);
    exact += GraphsEqual(g, back) && EncodeGraph(back, fp) == bytes;
  }
  out.Require(exact == 1000, std::to_string(1000 - exact) + " graphs changed");

  const testing::CommunitySplits& d = testing::Splits();
  const std::vector<GraphTensor> few(d.train.begin(), d.train.begin() + 16);
  TrainerConfig t;
  t.batch_size = 4;
  t.epochs = 2;
  t.learning_rate = 0.01;
  const ModelArtifact artifact =
      RunTraining(d.schema, CommunityModelConfig(), testing::CommunityTask(), t, few).artifact;
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "hetgnn_acceptance_artifact";
  std::filesystem::create_directories(dir);
  ExportModel(artifact, (dir / "a.hgm").string());
  const ModelArtifact loaded = LoadModel((dir / "a.hgm").string());
  bool bitwise = loaded.params.Names() == artifact.params.Names();
  for (const std::string& name : artifact.params.Names()) {
    bitwise = bitwise && loaded.params.Get(name).BitwiseEqual(artifact.params.Get(name));
  }
  ExportModel(loaded, (dir / "b.hgm").string());
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const bool same_file = read(dir / "a.hgm") == read(dir / "b.hgm");
  std::filesystem::remove_all(dir);
  out.Require(bitwise, "loaded parameters differ");
  out.Require(same_file, "re-exported artifact differs");
  out.detail << " graphs_exact=" << exact << "/1000 params=" << artifact.params.Names().size()
             << " params_bitwise=" << (bitwise ? "yes" : "no");
}

// ---------------------------------------------------------------- 8

void CaseStudySpec(Outcome& out) {
  const SamplingSpec spec = testing::MagProgram();
  const auto expected = testing::MagReferenceOps();
  out.Require(spec.seed_op.op_name == "SEED->paper", "seed op " + spec.seed_op.op_name);
  out.Require(spec.sampling_ops.size() == expected.size(), "op count");
  for (size_t i = 0; i < expected.size() && i < spec.sampling_ops.size(); ++i) {
    const SamplingOp& op = spec.sampling_ops[i];
    out.Require(op.op_name == expected[i].name, "op " + std::to_string(i) + " named " + op.op_name);
    out.Require(op.input_op_names == expected[i].inputs, "inputs of " + op.op_name);
    out.Require(op.edge_set_name == expected[i].edge_set, "edge set of " + op.op_name);
    out.Require(op.sample_size == expected[i].size, "sample size of " + op.op_name);
  }
  // "written" is the reverse of "writes".
  out.Require(spec.sampling_ops.size() > 1 &&
                  spec.sampling_ops[1].direction == SampleDirection::kReverse,
              "author op direction");
  const SamplingSpec reparsed = ParseSamplingSpec(SerializeSamplingSpec(spec));
  out.Require(SerializeSamplingSpec(reparsed) == SerializeSamplingSpec(spec), "JSON round trip");
  out.detail << " ops=" << spec.sampling_ops.size();
}

struct Criterion {
  const char* name;
  std::function<void(Outcome&)> run;
};

int Main() {
  SetLogLevel(LogLevel::kWarning);
  const std::vector<Criterion> criteria = {
      {"1 exchange-op oracle equivalence", ExchangeOracles},
      {"2 GCN dense oracle", GcnOracle},
      {"3 gradient suite", GradientSuite},
      {"4 batching/padding neutrality", Neutrality},
      {"5 sampler exactness", Sampler},
      {"6 end-to-end training", EndToEnd},
      {"7 serialization", Serialization},
      {"8 case-study sampling spec", CaseStudySpec},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.Require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %s:%s\n", out.pass ? "PASS" : "FAIL", c.name, out.detail.str().c_str());
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace hetgnn

int main() { return hetgnn::Main(); }
