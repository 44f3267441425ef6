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

#ifndef HETGNN_TESTS_TESTING_SAMPLER_ORACLE_H_
#define HETGNN_TESTS_TESTING_SAMPLER_ORACLE_H_

#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hetgnn/sampler.h"
#include "hetgnn/schema.h"

namespace hetgnn::testing {

inline constexpr char kMagSchema[] = R"({
  "node_sets": {"paper": {}, "author": {}, "institution": {}, "field_of_study": {}},
  "edge_sets": {
    "cites": {"source": "paper", "target": "paper"},
    "writes": {"source": "author", "target": "paper"},
    "affiliated_with": {"source": "author", "target": "institution"},
    "has_topic": {"source": "paper", "target": "field_of_study"}
  }
})";

inline SamplingSpec MagProgram() {
  SamplingSpecBuilder builder(ParseSchema(kMagSchema));
  auto seed_paper = builder.Seed("paper");
  auto cited_papers = seed_paper.Sample(32, "cites");
  auto authors = cited_papers.Join({seed_paper}).Sample(8, "writes", SampleDirection::kReverse);
  auto author_papers = authors.Sample(16, "writes");
  authors.Sample(16, "affiliated_with");
  author_papers.Join({seed_paper, cited_papers}).Sample(16, "has_topic");
  return seed_paper.Build();
}

// Op names, inputs, edge sets and sizes of the reference spec for the
// program above.
struct MagOp {
  std::string name;
  std::vector<std::string> inputs;
  std::string edge_set;
  int64_t size;
};

inline std::vector<MagOp> MagReferenceOps() {
  return {
      {"paper->paper", {"SEED->paper"}, "cites", 32},
      {"(paper->paper|SEED->paper)->author", {"paper->paper", "SEED->paper"}, "writes", 8},
      {"author->institution", {"(paper->paper|SEED->paper)->author"}, "affiliated_with", 16},
      {"author->paper", {"(paper->paper|SEED->paper)->author"}, "writes", 16},
      {"(author->paper|SEED->paper|paper->paper)->field_of_study",
       {"author->paper", "SEED->paper", "paper->paper"},
       "has_topic",
       16},
  };
}

inline GraphStore Star(int leaves) {
  GraphSchema schema =
      ParseSchema(R"({"node_sets": {"v": {}}, "edge_sets": {"e": {"source": "v", "target": "v"}}})");
  NodeTable nodes;
  EdgeTable edges;
  nodes.ids.push_back("hub");
  for (int i = 0; i < leaves; ++i) {
    nodes.ids.push_back("leaf" + std::to_string(i));
    edges.source_ids.push_back("hub");
    edges.target_ids.push_back(nodes.ids.back());
  }
  return GraphStore::Build(schema, {{"v", nodes}}, {{"e", edges}});
}

// Random heterogeneous store: two node sets, three edge sets.
struct RandomStore {
  GraphSchema schema;
  GraphStore store;
};

// Up to `max_p` "p" nodes and `max_q` "q" nodes; edge counts scale with
// the node counts.
inline RandomStore MakeRandomStore(std::mt19937_64& gen, int max_p = 16, int max_q = 10) {
  GraphSchema schema = ParseSchema(R"({
    "node_sets": {"p": {"features": {"f": {"dtype": "float32", "shape": [1]}}},
                  "q": {"features": {"t": {"dtype": "string", "shape": []}}}},
    "edge_sets": {"pp": {"source": "p", "target": "p"},
                  "pq": {"source": "p", "target": "q",
                         "features": {"w": {"dtype": "int64", "shape": []}}},
                  "qp": {"source": "q", "target": "p"}}
  })");
  const int np = 2 + static_cast<int>(gen() % (max_p - 1));
  const int nq = 1 + static_cast<int>(gen() % max_q);
  const int edge_scale = (np + nq) * 3 / 2;
  NodeTable p, q;
  std::vector<float> f;
  std::vector<std::string> t;
  for (int i = 0; i < np; ++i) {
    p.ids.push_back("p" + std::to_string(i));
    f.push_back(static_cast<float>(i));
  }
  for (int i = 0; i < nq; ++i) {
    q.ids.push_back("q" + std::to_string(i));
    t.push_back("t" + std::to_string(i));
  }
  p.features["f"] = Feature(DenseTensor({np, 1}, f));
  q.features["t"] = Feature::Strings({nq}, t);
  auto random_edges = [&](const NodeTable& a, const NodeTable& b, int count) {
    EdgeTable e;
    for (int k = 0; k < count; ++k) {
      e.source_ids.push_back(a.ids[gen() % a.ids.size()]);
      e.target_ids.push_back(b.ids[gen() % b.ids.size()]);
    }
    return e;
  };
  EdgeTable pp = random_edges(p, p, static_cast<int>(gen() % (edge_scale + 1)));
  EdgeTable pq = random_edges(p, q, static_cast<int>(gen() % (edge_scale + 1)));
  std::vector<int64_t> w;
  for (size_t k = 0; k < pq.source_ids.size(); ++k) w.push_back(static_cast<int64_t>(k));
  pq.features["w"] = Feature::Ints({static_cast<int64_t>(w.size())}, w);
  EdgeTable qp = random_edges(q, p, static_cast<int>(gen() % (edge_scale + 1)));
  GraphStore store = GraphStore::Build(schema, {{"p", p}, {"q", q}},
                                       {{"pp", pp}, {"pq", pq}, {"qp", qp}});
  return {schema, std::move(store)};
}

inline SamplingSpec RandomStoreProgram(const GraphSchema& schema) {
  SamplingSpecBuilder builder(schema);
  auto seed = builder.Seed("p");
  auto hop1 = seed.Sample(1000, "pp");
  auto qs = hop1.Join({seed}).Sample(1000, "pq");
  qs.Sample(1000, "qp");
  seed.Sample(1000, "qp", SampleDirection::kReverse);
  return seed.Build();
}

// Edge (source id, target id) sets keyed by edge set, plus node id sets.
struct IdGraph {
  std::map<std::string, std::set<std::string>> nodes;
  std::map<std::string, std::set<std::pair<std::string, std::string>>> edges;
  bool operator==(const IdGraph&) const = default;
};

// Breadth-first oracle executing the spec with unlimited sample sizes
// directly on the edge lists.
inline IdGraph BfsOracle(const GraphStore& store, const SamplingSpec& spec,
                         const std::string& seed) {
  const GraphSchema& schema = store.schema();
  IdGraph out;
  std::map<std::string, std::set<int64_t>> produced;
  const std::string& seed_set = spec.seed_op.node_set_name;
  produced[spec.seed_op.op_name] = {*store.FindNode(seed_set, seed)};
  out.nodes[seed_set].insert(seed);
  for (const SamplingOp& op : spec.sampling_ops) {
    std::set<int64_t> frontier;
    for (const std::string& in : op.input_op_names) {
      frontier.insert(produced[in].begin(), produced[in].end());
    }
    const EdgeSetSpec& es = schema.edge_set(op.edge_set_name);
    auto src = store.edge_sources(op.edge_set_name);
    auto tgt = store.edge_targets(op.edge_set_name);
    const bool fwd = op.direction == SampleDirection::kForward;
    for (size_t k = 0; k < src.size(); ++k) {
      const int64_t near = fwd ? src[k] : tgt[k];
      const int64_t far = fwd ? tgt[k] : src[k];
      if (!frontier.count(near)) continue;
      produced[op.op_name].insert(far);
      out.nodes[fwd ? es.target : es.source].insert(
          store.NodeId(fwd ? es.target : es.source, far));
      out.edges[op.edge_set_name].insert(
          {store.NodeId(es.source, src[k]), store.NodeId(es.target, tgt[k])});
    }
  }
  return out;
}

inline IdGraph ToIds(const GraphSchema& schema, const GraphTensor& g,
              const std::map<std::string, std::vector<std::string>>& local_ids) {
  IdGraph out;
  for (const auto& [name, ids] : local_ids) {
    if (!ids.empty()) out.nodes[name].insert(ids.begin(), ids.end());
  }
  for (const auto& [name, es] : g.edge_sets()) {
    const EdgeSetSpec& spec = schema.edge_set(name);
    for (int64_t k = 0; k < es.total_size(); ++k) {
      out.edges[name].insert({local_ids.at(spec.source)[es.adjacency.source()[k]],
                              local_ids.at(spec.target)[es.adjacency.target()[k]]});
    }
  }
  return out;
}

// Recovers store ids from the gathered features ("f" = index for p, "t" =
// "t<index>" for q).
inline std::map<std::string, std::vector<std::string>> LocalIds(const GraphTensor& g) {
  std::map<std::string, std::vector<std::string>> ids;
  for (double v : g.node_set("p").features.at("f").tensor().value().ToDoubles()) {
    ids["p"].push_back("p" + std::to_string(static_cast<int>(v)));
  }
  ids["q"];
  for (const std::string& s : g.node_set("q").features.at("t").strings()) {
    ids["q"].push_back("q" + s.substr(1));
  }
  return ids;
}

}  // namespace hetgnn::testing

#endif  // HETGNN_TESTS_TESTING_SAMPLER_ORACLE_H_
