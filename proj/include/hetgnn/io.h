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
#ifndef HETGNN_IO_H_
#define HETGNN_IO_H_

#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetgnn/graph_tensor.h"
#include "hetgnn/rng.h"
#include "hetgnn/schema.h"

namespace hetgnn {

// Payload of one graph record:
//   u64 schema fingerprint | u64 header length | header JSON | data blob
// All integers little-endian. The header lists every array with its byte
// offset and length inside the blob; keys are sorted, so equal graphs encode
// to equal bytes.
std::string EncodeGraph(const GraphTensor& graph, uint64_t schema_fingerprint);

struct DecodedRecord {
  uint64_t schema_fingerprint = 0;
  GraphTensor graph;
};

// Decodes without consulting a schema. Throws CorruptDataError.
DecodedRecord DecodeGraphUnchecked(std::string_view payload);

// Decodes and checks the fingerprint (FingerprintMismatch) and the schema
// (ValidationError listing the first violation).
GraphTensor DecodeGraph(std::string_view payload, const GraphSchema& schema);

// Appends length-prefixed records (u64 little-endian length, then payload).
class RecordWriter {
 public:
  explicit RecordWriter(const std::string& path);
  void Write(std::string_view payload);
  void Close();
  int64_t num_records() const { return num_records_; }

 private:
  std::string path_;
  std::ofstream out_;
  int64_t num_records_ = 0;
};

// Sequential reader over one record file.
class RecordReader {
 public:
  explicit RecordReader(const std::string& path);
  // Next payload, or nullopt at a clean end of file. A truncated record
  // throws CorruptDataError naming the file and byte offset.
  std::optional<std::string> Next();
  // Byte offset of the record returned by the latest Next().
  int64_t record_offset() const { return record_offset_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  int64_t offset_ = 0;
  int64_t record_offset_ = 0;
};

// Writes `graphs` (single-component each) to `path`.
void WriteGraphs(const std::string& path, const GraphSchema& schema,
                 std::span<const GraphTensor> graphs);
// Reads every record of every file named by `pattern` (see ExpandShardPattern).
std::vector<GraphTensor> ReadGraphs(const std::string& pattern, const GraphSchema& schema);

// Expands a comma-separated list of files or shard patterns.
std::vector<std::string> ExpandPaths(const std::string& paths);

struct DatasetOptions {
  int64_t batch_size = 1;
  std::optional<uint64_t> shuffle_seed;
  // 0 selects 10 * batch_size.
  int64_t shuffle_buffer_size = 0;
};

// Streams merged batches of decoded graphs. With a shuffle seed, records
// pass through a bounded buffer from which a seeded random element is
// emitted each time it is full. The final batch may be smaller.
class DatasetReader {
 public:
  DatasetReader(std::vector<std::string> files, GraphSchema schema, DatasetOptions options);

  std::optional<GraphTensor> Next();
  // Largest number of decoded records held at once so far.
  int64_t max_buffered() const { return max_buffered_; }

 private:
  std::optional<GraphTensor> NextRecord();
  std::optional<GraphTensor> ReadOne();

  std::vector<std::string> files_;
  GraphSchema schema_;
  uint64_t fingerprint_;
  DatasetOptions options_;
  size_t file_index_ = 0;
  std::optional<RecordReader> reader_;
  std::vector<GraphTensor> buffer_;
  std::optional<RngStream> rng_;
  int64_t max_buffered_ = 0;
  bool exhausted_ = false;
};

}  // namespace hetgnn

#endif  // HETGNN_IO_H_
