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
#include "hetgnn/io.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "testing/example_graph.h"
#include "testing/random_graph.h"
#include "testing/temp_dir.h"

namespace hetgnn {
namespace {

using ::hetgnn::testing::ExampleGraph;
using ::hetgnn::testing::ExampleSchema;
using ::hetgnn::testing::RandomGraph;
using ::hetgnn::testing::ReadFileBytes;
using ::hetgnn::testing::TempDir;
using ::hetgnn::testing::WriteFileBytes;

GraphSchema RandomSchema() { return ParseSchema(::hetgnn::testing::kRandomSchemaJson); }

// Single node carrying its position in a stream.
GraphTensor Tagged(int64_t tag) {
  return GraphTensor::FromPieces({{"label", Feature::Ints({1}, {tag})}},
                                 {{"n", NodeSet{{1}, {}}}}, {});
}

GraphSchema TaggedSchema() {
  return ParseSchema(
      R"({"node_sets":{"n":{}},"context":{"features":{"label":{"dtype":"int64","shape":[]}}}})");
}

std::vector<int64_t> Labels(const GraphTensor& g) {
  auto v = g.context().at("label").ints();
  return {v.begin(), v.end()};
}

TEST(CodecTest, ExampleRoundTrip) {
  GraphSchema schema = ExampleSchema();
  const std::string bytes = EncodeGraph(ExampleGraph(), SchemaFingerprint(schema));
  GraphTensor g = DecodeGraph(bytes, schema);
  auto age = g.node_set("users").features.at("age").ints();
  EXPECT_EQ(std::vector<int64_t>(age.begin(), age.end()), (std::vector<int64_t>{24, 32, 27, 38}));
  EXPECT_TRUE(GraphsEqual(g, ExampleGraph()));
  EXPECT_EQ(EncodeGraph(g, SchemaFingerprint(schema)), bytes);
}

TEST(CodecTest, InsertionOrderDoesNotMatter) {
  FeatureMap a, b;
  a.emplace("x", Feature::Ints({1}, {1}));
  a.emplace("y", Feature::Ints({1}, {2}));
  b.emplace("y", Feature::Ints({1}, {2}));
  b.emplace("x", Feature::Ints({1}, {1}));
  GraphTensor ga = GraphTensor::FromPieces({}, {{"n", NodeSet{{1}, a}}}, {});
  GraphTensor gb = GraphTensor::FromPieces({}, {{"n", NodeSet{{1}, b}}}, {});
  EXPECT_EQ(EncodeGraph(ga, 1), EncodeGraph(gb, 1));
}

TEST(CodecTest, MultiComponentRejected) {
  std::vector<GraphTensor> gs{ExampleGraph(), ExampleGraph()};
  EXPECT_THROW(EncodeGraph(MergeBatch(gs), 0), InvalidArgument);
}

TEST(CodecTest, FlippedFingerprintByte) {
  GraphSchema schema = ExampleSchema();
  std::string bytes = EncodeGraph(ExampleGraph(), SchemaFingerprint(schema));
  bytes[3] ^= 0x40;
  EXPECT_THROW(DecodeGraph(bytes, schema), FingerprintMismatch);
}

TEST(CodecTest, TruncatedPayloadIsCorrupt) {
  GraphSchema schema = ExampleSchema();
  const std::string bytes = EncodeGraph(ExampleGraph(), SchemaFingerprint(schema));
  for (size_t cut : {size_t{0}, size_t{7}, size_t{15}, size_t{40}, bytes.size() - 1}) {
    EXPECT_THROW(DecodeGraph(std::string_view(bytes).substr(0, cut), schema), CorruptDataError)
        << cut;
  }
}

TEST(CodecTest, RandomGraphsRoundTripBitExactly) {
  GraphSchema schema = RandomSchema();
  const uint64_t fp = SchemaFingerprint(schema);
  std::mt19937_64 gen(99);
  for (int i = 0; i < 200; ++i) {
    GraphTensor g = RandomGraph(gen);
    const std::string bytes = EncodeGraph(g, fp);
    GraphTensor back = DecodeGraph(bytes, schema);
    ASSERT_TRUE(GraphsEqual(g, back));
    ASSERT_EQ(EncodeGraph(back, fp), bytes);
  }
}

TEST(CodecTest, SchemaViolationReported) {
  GraphSchema schema = RandomSchema();
  EXPECT_THROW(DecodeGraph(EncodeGraph(ExampleGraph(), SchemaFingerprint(schema)), schema),
               ValidationError);
}

TEST(RecordFileTest, TruncatedTailNamesFileAndOffset) {
  TempDir dir;
  GraphSchema schema = ExampleSchema();
  const std::string path = dir.File("g.gtr");
  std::vector<GraphTensor> gs{ExampleGraph(), ExampleGraph()};
  WriteGraphs(path, schema, gs);
  std::string bytes = ReadFileBytes(path);
  const size_t record = bytes.size() / 2;
  WriteFileBytes(path, bytes.substr(0, bytes.size() - 5));
  try {
    ReadGraphs(path, schema);
    FAIL();
  } catch (const CorruptDataError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find(path), std::string::npos);
    EXPECT_NE(what.find("offset " + std::to_string(record)), std::string::npos) << what;
  }
}

TEST(RecordFileTest, ShardPattern) {
  TempDir dir;
  GraphSchema schema = TaggedSchema();
  const std::string pattern = dir.File("part.gtr@2");
  auto files = ExpandShardPattern(pattern);
  std::vector<GraphTensor> a{Tagged(0), Tagged(1)}, b{Tagged(2)};
  WriteGraphs(files[0], schema, a);
  WriteGraphs(files[1], schema, b);
  auto all = ReadGraphs(pattern, schema);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(Labels(all[2]), std::vector<int64_t>{2});
}

class DatasetTest : public ::testing::Test {
 protected:
  void Write(int64_t n) {
    std::vector<GraphTensor> gs;
    for (int64_t i = 0; i < n; ++i) gs.push_back(Tagged(i));
    WriteGraphs(path_, TaggedSchema(), gs);
  }
  std::vector<std::vector<int64_t>> ReadAll(DatasetOptions options, int64_t* max_buffered = nullptr) {
    DatasetReader reader({path_}, TaggedSchema(), options);
    std::vector<std::vector<int64_t>> out;
    while (auto g = reader.Next()) out.push_back(Labels(*g));
    if (max_buffered) *max_buffered = reader.max_buffered();
    return out;
  }
  TempDir dir_;
  std::string path_ = dir_.File("data.gtr");
};

TEST_F(DatasetTest, FiveRecordsInBatchesOfTwo) {
  Write(5);
  auto batches = ReadAll({2, std::nullopt, 0});
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0], (std::vector<int64_t>{0, 1}));
  EXPECT_EQ(batches[1], (std::vector<int64_t>{2, 3}));
  EXPECT_EQ(batches[2], (std::vector<int64_t>{4}));
}

TEST_F(DatasetTest, BatchIsMergedGraph) {
  Write(2);
  DatasetReader reader({path_}, TaggedSchema(), {2, std::nullopt, 0});
  auto g = reader.Next();
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(g->num_components(), 2);
  EXPECT_EQ(g->node_set("n").sizes, (std::vector<int64_t>{1, 1}));
}

TEST_F(DatasetTest, ShuffleIsSeededPermutation) {
  Write(50);
  auto a = ReadAll({4, 7, 0});
  auto b = ReadAll({4, 7, 0});
  auto c = ReadAll({4, 8, 0});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  std::vector<int64_t> flat;
  for (const auto& batch : a) flat.insert(flat.end(), batch.begin(), batch.end());
  std::vector<int64_t> sorted = flat;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int64_t> expected(50);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(sorted, expected);
  EXPECT_NE(flat, expected);
}

TEST_F(DatasetTest, BufferStaysBounded) {
  Write(200);
  int64_t max_buffered = 0;
  ReadAll({3, 1, 0}, &max_buffered);
  EXPECT_EQ(max_buffered, 30);
  ReadAll({3, 1, 12}, &max_buffered);
  EXPECT_EQ(max_buffered, 12);
}

TEST_F(DatasetTest, MissingFile) {
  EXPECT_THROW(DatasetReader({dir_.File("nope.gtr")}, TaggedSchema(), {}), IoError);
}

}  // namespace
}  // namespace hetgnn
