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
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hetgnn/rng.h"
#include "hetgnn/runner.h"
#include "hetgnn/sampler.h"

namespace hetgnn {
namespace {

constexpr char kCommunitySchema[] = R"({
  "node_sets": {
    "user": {"features": {"label": {"dtype": "int64", "shape": []},
                          "bias": {"dtype": "float32", "shape": [1]}},
             "metadata": {"filename": "users.csv"}},
    "item": {"features": {"popularity": {"dtype": "float32", "shape": [1]}},
             "metadata": {"filename": "items.csv"}}
  },
  "edge_sets": {
    "knows": {"source": "user", "target": "user", "metadata": {"filename": "knows.csv"}},
    "likes": {"source": "user", "target": "item", "metadata": {"filename": "likes.csv"}}
  }
})";

// Uninformative per-node values, a pure function of (seed, set, index).
float NodeValue(uint64_t seed, const char* set, int64_t index) {
  RngStream rng(seed, set, static_cast<uint64_t>(index));
  return static_cast<float>(rng.NextDouble());
}

std::string Format(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

GraphStore BuildStore(const CommunityData& data) {
  NodeTable users, items;
  users.ids = data.user_ids;
  const int64_t nu = static_cast<int64_t>(users.ids.size());
  users.features["label"] = Feature::Ints({nu}, data.blocks);
  users.features["bias"] = Feature(DenseTensor::Filled({nu, 1}, 1.0, DType::kFloat32));
  std::vector<float> popularity;
  for (int64_t i = 0; i < data.num_items; ++i) {
    items.ids.push_back("i" + std::to_string(i));
    popularity.push_back(NodeValue(data.seed, "popularity", i));
  }
  items.features["popularity"] = Feature(DenseTensor({data.num_items, 1}, popularity));
  EdgeTable knows, likes;
  for (const auto& [s, t] : data.knows) {
    knows.source_ids.push_back(s);
    knows.target_ids.push_back(t);
  }
  for (const auto& [s, t] : data.likes) {
    likes.source_ids.push_back(s);
    likes.target_ids.push_back(t);
  }
  return GraphStore::Build(data.schema, {{"user", users}, {"item", items}},
                           {{"knows", knows}, {"likes", likes}});
}

SamplingSpec OneHopSpec(const GraphSchema& schema, int64_t sample_size) {
  auto seed = SamplingSpecBuilder(schema).Seed("user");
  seed.Sample(sample_size, "knows");
  seed.Sample(sample_size, "likes");
  return seed.Build();
}

}  // namespace

CommunityData MakeCommunityData(const CommunityOptions& options) {
  if (options.num_users < 2 || options.num_items < 1) {
    throw InvalidArgument("community data needs at least 2 users and 1 item");
  }
  CommunityData data;
  data.schema = ParseSchema(kCommunitySchema);
  data.seed = options.seed;
  data.num_items = options.num_items;
  const int64_t block0 =
      static_cast<int64_t>(std::llround(options.block0_fraction * options.num_users));
  for (int64_t i = 0; i < options.num_users; ++i) {
    data.user_ids.push_back("u" + std::to_string(i));
    data.blocks.push_back(i < block0 ? 0 : 1);
  }
  RngStream rng(options.seed, "community_edges");
  for (int64_t i = 0; i < options.num_users; ++i) {
    for (int64_t j = i + 1; j < options.num_users; ++j) {
      const double p = data.blocks[i] == data.blocks[j] ? options.p_intra : options.p_inter;
      if (rng.NextDouble() < p) {
        data.knows.emplace_back(data.user_ids[i], data.user_ids[j]);
        data.knows.emplace_back(data.user_ids[j], data.user_ids[i]);
      }
    }
  }
  for (int64_t i = 0; i < options.num_users; ++i) {
    for (int64_t k = 0; k < options.num_items; ++k) {
      if (rng.NextDouble() < options.p_item) {
        data.likes.emplace_back(data.user_ids[i], "i" + std::to_string(k));
      }
    }
  }
  return data;
}

std::vector<GraphTensor> CommunityGraphs(const CommunityData& data,
                                         const std::vector<int64_t>& roots) {
  GraphStore store = BuildStore(data);
  SamplingSpec spec =
      OneHopSpec(data.schema, static_cast<int64_t>(data.user_ids.size()) + data.num_items);
  std::vector<SeedNode> seeds;
  for (int64_t r : roots) seeds.push_back({"user", data.user_ids.at(r)});
  return SampleSubgraphs(store, spec, seeds, SamplerOptions{});
}

void WriteCommunityFiles(const CommunityData& data, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (fs::path(dir) / name).string());
    return out;
  };
  open("schema.json") << SerializeSchema(data.schema) << "\n";
  {
    std::ofstream out = open("users.csv");
    out << "#id,label,bias\n";
    for (size_t i = 0; i < data.user_ids.size(); ++i) {
      out << data.user_ids[i] << "," << data.blocks[i] << ",1\n";
    }
  }
  {
    std::ofstream out = open("items.csv");
    out << "#id,popularity\n";
    for (int64_t i = 0; i < data.num_items; ++i) {
      out << "i" << i << "," << Format(NodeValue(data.seed, "popularity", i)) << "\n";
    }
  }
  for (const auto& [name, edges] :
       {std::pair{"knows.csv", &data.knows}, std::pair{"likes.csv", &data.likes}}) {
    std::ofstream out = open(name);
    out << "source_id,target_id\n";
    for (const auto& [s, t] : *edges) out << s << "," << t << "\n";
  }
  open("spec.json") << SerializeSamplingSpec(OneHopSpec(
      data.schema, static_cast<int64_t>(data.user_ids.size()) + data.num_items));
  {
    std::ofstream out = open("seeds.txt");
    for (const std::string& id : data.user_ids) out << id << "\n";
  }
}

ModelConfig CommunityModelConfig(int64_t message_dim, int64_t rounds) {
  const std::string dim = std::to_string(message_dim);
  return ParseModelConfig(R"({
    "feature_maps": {"node_sets": {
      "user": [{"feature": "bias", "steps": [{"op": "dense", "units": 8, "activation": "relu"}]}],
      "item": [{"feature": "popularity", "steps": [{"op": "dense", "units": 8, "activation": "relu"}]}]
    }},
    "layers": [{"type": "vanilla_mpnn", "rounds": )" + std::to_string(rounds) +
                          R"(, "units": )" + dim + R"(, "message_dim": )" + dim + R"(,
                "receiver_tag": "source", "node_sets": {"user": ["knows", "likes"]}}]
  })");
}

}  // namespace hetgnn
