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
#include <cstring>
#include <filesystem>
#include <sstream>

#include "hetgnn/io.h"

namespace hetgnn {

RecordWriter::RecordWriter(const std::string& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
}

void RecordWriter::Write(std::string_view payload) {
  const uint64_t n = payload.size();
  char prefix[8];
  std::memcpy(prefix, &n, 8);
  out_.write(prefix, 8);
  out_.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out_) throw IoError("write failed on " + path_);
  ++num_records_;
}

void RecordWriter::Close() {
  out_.close();
  if (out_.fail()) throw IoError("close failed on " + path_);
}

RecordReader::RecordReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open " + path);
}

std::optional<std::string> RecordReader::Next() {
  char prefix[8];
  in_.read(prefix, 8);
  const std::streamsize got = in_.gcount();
  if (got == 0) return std::nullopt;
  record_offset_ = offset_;
  if (got != 8) {
    throw CorruptDataError(path_ + " at offset " + std::to_string(offset_) +
                           ": truncated record length");
  }
  uint64_t n;
  std::memcpy(&n, prefix, 8);
  // Guard against absurd lengths before allocating.
  const auto here = in_.tellg();
  in_.seekg(0, std::ios::end);
  const auto end = in_.tellg();
  in_.seekg(here);
  if (n > static_cast<uint64_t>(end - here)) {
    throw CorruptDataError(path_ + " at offset " + std::to_string(offset_) +
                           ": record length " + std::to_string(n) + " exceeds remaining " +
                           std::to_string(static_cast<int64_t>(end - here)) + " bytes");
  }
  std::string payload(n, '\0');
  in_.read(payload.data(), static_cast<std::streamsize>(n));
  offset_ += 8 + static_cast<int64_t>(n);
  return payload;
}

void WriteGraphs(const std::string& path, const GraphSchema& schema,
                 std::span<const GraphTensor> graphs) {
  const uint64_t fingerprint = SchemaFingerprint(schema);
  RecordWriter writer(path);
  for (const GraphTensor& g : graphs) writer.Write(EncodeGraph(g, fingerprint));
  writer.Close();
}

std::vector<std::string> ExpandPaths(const std::string& paths) {
  std::vector<std::string> out;
  std::stringstream ss(paths);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    for (std::string& p : ExpandShardPattern(item)) out.push_back(std::move(p));
  }
  return out;
}

std::vector<GraphTensor> ReadGraphs(const std::string& pattern, const GraphSchema& schema) {
  std::vector<GraphTensor> out;
  for (const std::string& file : ExpandPaths(pattern)) {
    RecordReader reader(file);
    int64_t index = 0;
    while (auto payload = reader.Next()) {
      try {
        out.push_back(DecodeGraph(*payload, schema));
      } catch (const Error& e) {
        throw CorruptDataError(file + " record " + std::to_string(index) + " at offset " +
                               std::to_string(reader.record_offset()) + ": " + e.what());
      }
      ++index;
    }
  }
  return out;
}

DatasetReader::DatasetReader(std::vector<std::string> files, GraphSchema schema,
                             DatasetOptions options)
    : files_(std::move(files)),
      schema_(std::move(schema)),
      fingerprint_(SchemaFingerprint(schema_)),
      options_(options) {
  if (options_.batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (options_.shuffle_buffer_size <= 0) options_.shuffle_buffer_size = 10 * options_.batch_size;
  if (options_.shuffle_seed) rng_.emplace(*options_.shuffle_seed, "shuffle");
  for (const std::string& f : files_) {
    if (!std::filesystem::exists(f)) throw IoError("cannot open " + f);
  }
}

std::optional<GraphTensor> DatasetReader::ReadOne() {
  while (file_index_ < files_.size()) {
    if (!reader_) reader_.emplace(files_[file_index_]);
    std::optional<std::string> payload = reader_->Next();
    if (!payload) {
      reader_.reset();
      ++file_index_;
      continue;
    }
    try {
      return DecodeGraph(*payload, schema_);
    } catch (const Error& e) {
      throw CorruptDataError(reader_->path() + " at offset " +
                             std::to_string(reader_->record_offset()) + ": " + e.what());
    }
  }
  return std::nullopt;
}

std::optional<GraphTensor> DatasetReader::NextRecord() {
  if (!rng_) {
    auto g = ReadOne();
    if (g) max_buffered_ = std::max<int64_t>(max_buffered_, 1);
    return g;
  }
  while (!exhausted_ && static_cast<int64_t>(buffer_.size()) < options_.shuffle_buffer_size) {
    auto g = ReadOne();
    if (!g) {
      exhausted_ = true;
      break;
    }
    buffer_.push_back(std::move(*g));
    max_buffered_ = std::max<int64_t>(max_buffered_, static_cast<int64_t>(buffer_.size()));
  }
  if (buffer_.empty()) return std::nullopt;
  const size_t pick = static_cast<size_t>(rng_->UniformInt(buffer_.size()));
  GraphTensor out = std::move(buffer_[pick]);
  buffer_[pick] = std::move(buffer_.back());
  buffer_.pop_back();
  return out;
}

std::optional<GraphTensor> DatasetReader::Next() {
  std::vector<GraphTensor> batch;
  while (static_cast<int64_t>(batch.size()) < options_.batch_size) {
    auto g = NextRecord();
    if (!g) break;
    batch.push_back(std::move(*g));
  }
  if (batch.empty()) return std::nullopt;
  return MergeBatch(batch);
}

}  // namespace hetgnn
