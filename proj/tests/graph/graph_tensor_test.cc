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

#include <gtest/gtest.h>

#include <random>

#include "testing/example_graph.h"
#include "testing/random_graph.h"

namespace hetgnn {
namespace {

using ::hetgnn::testing::ExampleContext;
using ::hetgnn::testing::ExampleEdgeSets;
using ::hetgnn::testing::ExampleGraph;
using ::hetgnn::testing::ExampleNodeSets;
using ::hetgnn::testing::RandomGraph;

std::vector<int64_t> Vec(std::span<const int64_t> s) { return {s.begin(), s.end()}; }

// One node with a self-loop; `value` tags its feature.
GraphTensor SelfLoop(float value) {
  return GraphTensor::FromPieces(
      {}, {{"n", NodeSet{{1}, {{"f", Feature(DenseTensor({1, 1}, std::vector<float>{value}))}}}}},
      {{"e", EdgeSet{{1}, Adjacency("n", {0}, "n", {0}), {}}}});
}

GraphTensor Chain(int64_t nodes, std::vector<int64_t> src, std::vector<int64_t> tgt) {
  const int64_t m = static_cast<int64_t>(src.size());
  return GraphTensor::FromPieces(
      {}, {{"n", NodeSet{{nodes}, {}}}},
      {{"e", EdgeSet{{m}, Adjacency("n", std::move(src), "n", std::move(tgt)), {}}}});
}

TEST(FromPiecesTest, ExampleGraph) {
  GraphTensor g = ExampleGraph();
  EXPECT_EQ(g.num_components(), 1);
  EXPECT_EQ(g.node_set("items").total_size(), 6);
  EXPECT_EQ(g.node_set("users").total_size(), 4);
  EXPECT_EQ(Vec(g.node_set("users").features.at("age").ints()), (std::vector<int64_t>{24, 32, 27, 38}));
  EXPECT_EQ(Vec(g.edge_set("purchased").adjacency.source()),
            (std::vector<int64_t>{0, 1, 2, 3, 4, 5, 5}));
  EXPECT_EQ(g.node_set("items").features.at("price").item_shape(), (Shape{kRaggedDim}));
  EXPECT_EQ(g.context().at("scores").flat_shape(), (Shape{1, 4}));
}

TEST(FromPiecesTest, EmptyEdgeSet) {
  GraphTensor g = GraphTensor::FromPieces(
      {}, {{"n", NodeSet{{2}, {}}}}, {{"e", EdgeSet{{0}, Adjacency("n", {}, "n", {}), {}}}});
  EXPECT_EQ(g.edge_set("e").total_size(), 0);
}

TEST(FromPiecesTest, IndexOutOfRange) {
  EXPECT_THROW(GraphTensor::FromPieces(ExampleContext(), ExampleNodeSets(),
                                       ExampleEdgeSets({1, 1, 0, 0, 2, 3, 9})),
               ValidationError);
}

TEST(FromPiecesTest, FeatureSizeMismatch) {
  auto nodes = ExampleNodeSets();
  nodes["users"].features["age"] = Feature::Ints({3}, {1, 2, 3});
  EXPECT_THROW(GraphTensor::FromPieces({}, nodes, ExampleEdgeSets()), ValidationError);
}

TEST(FromPiecesTest, CrossComponentEdge) {
  EXPECT_THROW(GraphTensor::FromPieces(
                   {}, {{"n", NodeSet{{1, 1}, {}}}},
                   {{"e", EdgeSet{{1, 0}, Adjacency("n", {0}, "n", {1}), {}}}}),
               ValidationError);
}

TEST(MergeBatchTest, TwoSelfLoops) {
  std::vector<GraphTensor> gs{SelfLoop(1), SelfLoop(2)};
  GraphTensor m = MergeBatch(gs);
  EXPECT_EQ(m.num_components(), 2);
  EXPECT_EQ(m.node_set("n").sizes, (std::vector<int64_t>{1, 1}));
  EXPECT_EQ(Vec(m.edge_set("e").adjacency.source()), (std::vector<int64_t>{0, 1}));
  EXPECT_EQ(Vec(m.edge_set("e").adjacency.target()), (std::vector<int64_t>{0, 1}));
}

TEST(MergeBatchTest, SingleGraphIsIdentity) {
  std::vector<GraphTensor> gs{ExampleGraph()};
  EXPECT_TRUE(GraphsEqual(MergeBatch(gs), gs[0]));
}

TEST(MergeBatchTest, OffsetsByPriorNodeCount) {
  std::vector<GraphTensor> gs{Chain(3, {0}, {1}), Chain(2, {1}, {0})};
  GraphTensor m = MergeBatch(gs);
  EXPECT_EQ(Vec(m.edge_set("e").adjacency.source()), (std::vector<int64_t>{0, 4}));
  EXPECT_EQ(Vec(m.edge_set("e").adjacency.target()), (std::vector<int64_t>{1, 3}));
}

TEST(MergeBatchTest, IncompatibleGraphsRejected) {
  std::vector<GraphTensor> gs{SelfLoop(1), Chain(2, {0}, {1})};
  EXPECT_THROW(MergeBatch(gs), InvalidArgument);
}

TEST(MergeBatchTest, AssociativeAndSlicesReproduceInputs) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 30; ++trial) {
    GraphTensor a = RandomGraph(gen), b = RandomGraph(gen), c = RandomGraph(gen);
    std::vector<GraphTensor> ab{a, b};
    std::vector<GraphTensor> ab_c{MergeBatch(ab), c};
    std::vector<GraphTensor> abc{a, b, c};
    GraphTensor left = MergeBatch(ab_c);
    GraphTensor flat = MergeBatch(abc);
    ASSERT_TRUE(GraphsEqual(left, flat));
    ASSERT_TRUE(flat.StructuralViolations().empty());
    ASSERT_EQ(flat.num_components(), 3);
    EXPECT_TRUE(GraphsEqual(flat.Component(0), a));
    EXPECT_TRUE(GraphsEqual(flat.Component(1), b));
    EXPECT_TRUE(GraphsEqual(flat.Component(2), c));
  }
}

TEST(MergeBatchTest, InputsUnchanged) {
  std::mt19937_64 gen(23);
  GraphTensor a = RandomGraph(gen), b = RandomGraph(gen);
  GraphTensor a_copy = a.Component(0), b_copy = b.Component(0);
  std::vector<GraphTensor> gs{a, b};
  MergeBatch(gs);
  PadToTotalSizes(a, {2, {{"a", 20}, {"b", 20}}, {{"ab", 30}, {"bb", 30}}});
  a.ReplaceNodeFeatures("b", {{"id", Feature::Ints({a.node_set("b").total_size()},
                                                   std::vector<int64_t>(a.node_set("b").total_size(), 7))}});
  EXPECT_TRUE(GraphsEqual(a, a_copy));
  EXPECT_TRUE(GraphsEqual(b, b_copy));
}

TEST(ReplaceFeaturesTest, LatestPrice) {
  GraphTensor g = ExampleGraph();
  const Feature& price = g.node_set("items").features.at("price");
  // First element of every ragged row.
  std::vector<float> latest;
  int64_t offset = 0;
  auto flat = price.flat_values().tensor().value().data<float>();
  for (int64_t n : price.row_lengths()) {
    latest.push_back(flat[offset]);
    offset += n;
  }
  GraphTensor h = g.ReplaceNodeFeatures(
      "items", {{"latest_price", Feature(DenseTensor({6, 1}, std::move(latest)))}});
  const Feature& lp = h.node_set("items").features.at("latest_price");
  EXPECT_EQ(lp.flat_shape(), (Shape{6, 1}));
  const std::vector<float> expected{22.34f, 27.99f, 89.99f, 24.99f, 350.00f, 45.13f};
  auto got = lp.tensor().value().data<float>();
  EXPECT_TRUE(std::equal(got.begin(), got.end(), expected.begin()));
  EXPECT_EQ(h.node_set("items").features.size(), 3u);
  EXPECT_EQ(g.node_set("items").features.size(), 2u);
}

TEST(ReplaceFeaturesTest, IdenticalTensorKeepsGraph) {
  GraphTensor g = ExampleGraph();
  GraphTensor h = g.ReplaceNodeFeatures("users", {{"age", g.node_set("users").features.at("age")}});
  EXPECT_TRUE(GraphsEqual(g, h));
}

TEST(ReplaceFeaturesTest, WrongLength) {
  GraphTensor g = ExampleGraph();
  EXPECT_THROW(g.ReplaceNodeFeatures("items", {{"x", Feature::Ints({5}, {1, 2, 3, 4, 5})}}),
               DimensionError);
}

TEST(PadTest, PadsUsersIntoSecondComponent) {
  GraphTensor g = ExampleGraph();
  PaddedGraph p = PadToTotalSizes(g, {2, {{"users", 6}}, {}});
  EXPECT_EQ(p.component_mask, (std::vector<bool>{true, false}));
  EXPECT_EQ(p.graph.node_set("users").sizes, (std::vector<int64_t>{4, 2}));
  EXPECT_EQ(p.graph.node_set("items").sizes, (std::vector<int64_t>{6, 0}));
  EXPECT_EQ(Vec(p.graph.node_set("users").features.at("age").ints()),
            (std::vector<int64_t>{24, 32, 27, 38, 0, 0}));
  EXPECT_EQ(p.graph.node_set("users").features.at("name").strings()[5], "");
  EXPECT_EQ(p.graph.context().at("scores").flat_shape(), (Shape{2, 4}));
}

TEST(PadTest, ExactTargetsUnchanged) {
  GraphTensor g = ExampleGraph();
  PaddedGraph p = PadToTotalSizes(g, {1, {{"users", 4}, {"items", 6}}, {{"purchased", 7}}});
  EXPECT_EQ(p.component_mask, std::vector<bool>{true});
  EXPECT_TRUE(GraphsEqual(p.graph, g));
}

TEST(PadTest, TooLargeIsFitError) {
  GraphTensor g = ExampleGraph();
  EXPECT_THROW(PadToTotalSizes(g, {2, {{"users", 3}}, {}}), FitError);
  EXPECT_THROW(PadToTotalSizes(g, {1, {{"users", 5}}, {}}), FitError);
  EXPECT_FALSE(FitsSizeConstraints(g, {2, {{"users", 3}}, {}}));
  EXPECT_TRUE(FitsSizeConstraints(g, {2, {{"users", 5}}, {}}));
}

TEST(PadTest, PaddingEdgesStayInPaddingComponent) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<GraphTensor> parts{RandomGraph(gen), RandomGraph(gen)};
    GraphTensor g = MergeBatch(parts);
    SizeConstraints c{4,
                      {{"a", g.node_set("a").total_size() + 1 + static_cast<int64_t>(gen() % 3)},
                       {"b", g.node_set("b").total_size() + 1}},
                      {{"ab", g.edge_set("ab").total_size() + static_cast<int64_t>(gen() % 4)},
                       {"bb", g.edge_set("bb").total_size() + 2}}};
    PaddedGraph p = PadToTotalSizes(g, c);
    ASSERT_TRUE(p.graph.StructuralViolations().empty());
    EXPECT_EQ(p.graph.num_components(), 4);
    EXPECT_TRUE(GraphsEqual(p.graph.Component(0), parts[0]));
    EXPECT_TRUE(GraphsEqual(p.graph.Component(1), parts[1]));
    for (const auto& [name, set] : p.graph.edge_sets()) {
      const int64_t real = g.edge_set(name).total_size();
      EXPECT_EQ(set.total_size(), c.total_edges.at(name));
      for (int64_t e = real; e < set.total_size(); ++e) {
        EXPECT_GE(set.adjacency.source()[e], g.node_set(set.adjacency.source_set()).total_size());
        EXPECT_GE(set.adjacency.target()[e], g.node_set(set.adjacency.target_set()).total_size());
      }
    }
  }
}

TEST(PadTest, RaggedPaddingHasEmptyRows) {
  GraphTensor g = ExampleGraph();
  PaddedGraph p = PadToTotalSizes(g, {3, {{"items", 8}}, {}});
  const Feature& price = p.graph.node_set("items").features.at("price");
  EXPECT_EQ(Vec(price.row_lengths()), (std::vector<int64_t>{3, 2, 1, 2, 1, 3, 0, 0}));
  EXPECT_EQ(p.graph.node_set("items").sizes, (std::vector<int64_t>{6, 2, 0}));
}

}  // namespace
}  // namespace hetgnn
