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
#include <charconv>
#include <fstream>
#include <set>

#include "common/json_util.h"
#include "hetgnn/sampler.h"

namespace hetgnn {
namespace {

using json = nlohmann::json;

bool EndsWith(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool IsNdjson(const std::string& path) {
  return EndsWith(path, ".ndjson") || EndsWith(path, ".jsonl");
}

// Accumulates one feature column item by item.
class ColumnBuilder {
 public:
  ColumnBuilder(std::string name, FeatureSpec spec) : name_(std::move(name)), spec_(std::move(spec)) {
    inner_ = 1;
    for (size_t i = spec_.ragged() ? 1 : 0; i < spec_.shape.size(); ++i) inner_ *= spec_.shape[i];
  }

  // Adds one item given as strings (CSV cells split on ';').
  void AddTokens(const std::vector<std::string>& tokens, int line) {
    CheckCount(static_cast<int64_t>(tokens.size()), line);
    for (const std::string& t : tokens) {
      switch (spec_.dtype) {
        case FeatureDType::kString:
          strings_.push_back(t);
          break;
        case FeatureDType::kInt64: {
          int64_t v = 0;
          auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
          if (ec != std::errc() || end != t.data() + t.size()) Fail("bad int64 \"" + t + "\"", line);
          ints_.push_back(v);
          break;
        }
        default: {
          double v = 0;
          auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
          if (ec != std::errc() || end != t.data() + t.size()) Fail("bad number \"" + t + "\"", line);
          floats_.push_back(v);
          break;
        }
      }
    }
  }

  void AddJson(const json& value, int line) {
    std::vector<const json*> flat;
    Flatten(value, flat);
    CheckCount(static_cast<int64_t>(flat.size()), line);
    for (const json* v : flat) {
      switch (spec_.dtype) {
        case FeatureDType::kString:
          if (!v->is_string()) Fail("expected a string", line);
          strings_.push_back(v->get<std::string>());
          break;
        case FeatureDType::kInt64:
          if (!v->is_number_integer()) Fail("expected an integer", line);
          ints_.push_back(v->get<int64_t>());
          break;
        default:
          if (!v->is_number()) Fail("expected a number", line);
          floats_.push_back(v->get<double>());
          break;
      }
    }
  }

  Feature Finish(int64_t num_items) const {
    Shape shape;
    if (spec_.ragged()) {
      shape.push_back(static_cast<int64_t>(Size()) / std::max<int64_t>(inner_, 1));
      if (inner_ == 0) shape[0] = 0;
      shape.insert(shape.end(), spec_.shape.begin() + 1, spec_.shape.end());
    } else {
      shape.push_back(num_items);
      shape.insert(shape.end(), spec_.shape.begin(), spec_.shape.end());
    }
    Feature flat;
    switch (spec_.dtype) {
      case FeatureDType::kString:
        flat = Feature::Strings(shape, strings_);
        break;
      case FeatureDType::kInt64:
        flat = Feature::Ints(shape, ints_);
        break;
      case FeatureDType::kFloat64:
        flat = Feature(DenseTensor::FromDoubles(shape, floats_, DType::kFloat64));
        break;
      case FeatureDType::kFloat32:
        flat = Feature(DenseTensor::FromDoubles(shape, floats_, DType::kFloat32));
        break;
    }
    return spec_.ragged() ? Feature::Ragged(flat, row_lengths_) : flat;
  }

  const std::string& name() const { return name_; }

 private:
  size_t Size() const { return strings_.size() + ints_.size() + floats_.size(); }

  static void Flatten(const json& v, std::vector<const json*>& out) {
    if (v.is_array()) {
      for (const json& x : v) Flatten(x, out);
    } else {
      out.push_back(&v);
    }
  }

  void CheckCount(int64_t count, int line) {
    if (spec_.ragged()) {
      if (inner_ == 0 ? count != 0 : count % inner_ != 0) {
        Fail(std::to_string(count) + " values do not fill rows of " + std::to_string(inner_), line);
      }
      row_lengths_.push_back(inner_ == 0 ? 0 : count / inner_);
    } else if (count != inner_) {
      Fail("expected " + std::to_string(inner_) + " values, got " + std::to_string(count), line);
    }
  }

  [[noreturn]] void Fail(const std::string& why, int line) const {
    throw ParseError("feature " + name_ + ": " + why, line, 1);
  }

  std::string name_;
  FeatureSpec spec_;
  int64_t inner_ = 1;
  std::vector<std::string> strings_;
  std::vector<int64_t> ints_;
  std::vector<double> floats_;
  std::vector<int64_t> row_lengths_;
};

// Splits one CSV line; double quotes protect commas and "" escapes a quote.
std::vector<std::string> SplitCsv(const std::string& line, int line_no) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote", line_no, static_cast<int>(line.size()));
  return cells;
}

std::vector<std::string> SplitValues(const std::string& cell, bool is_string_scalar) {
  if (is_string_scalar) return {cell};
  std::vector<std::string> out;
  if (cell.empty()) return out;
  size_t start = 0;
  while (true) {
    size_t end = cell.find(';', start);
    out.push_back(cell.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

// Rows of a table as (key columns, feature builders).
struct TableData {
  std::map<std::string, std::vector<std::string>> keys;
  std::vector<ColumnBuilder> columns;
  int64_t rows = 0;
};

TableData ReadTable(const std::string& path, const std::vector<std::string>& key_columns,
                    const FeatureSpecs& specs) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  TableData data;
  for (const std::string& k : key_columns) data.keys[k];
  for (const auto& [name, spec] : specs) data.columns.emplace_back(name, spec);

  std::string line;
  int line_no = 0;
  if (IsNdjson(path)) {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json row = internal::ParseJson(line, path + " line " + std::to_string(line_no));
      if (!row.is_object()) throw ParseError(path + ": rows must be JSON objects", line_no, 1);
      for (auto& [key, values] : data.keys) {
        auto it = row.find(key);
        if (it == row.end()) throw ParseError(path + ": missing \"" + key + "\"", line_no, 1);
        values.push_back(it->is_string() ? it->get<std::string>() : it->dump());
      }
      for (ColumnBuilder& col : data.columns) {
        auto it = row.find(col.name());
        if (it == row.end()) {
          throw ParseError(path + ": missing feature \"" + col.name() + "\"", line_no, 1);
        }
        col.AddJson(*it, line_no);
      }
      ++data.rows;
    }
    return data;
  }

  if (!std::getline(in, line)) throw ParseError(path + ": missing header row", 1, 1);
  line_no = 1;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = SplitCsv(line, line_no);
  std::map<std::string, size_t> position;
  for (size_t i = 0; i < header.size(); ++i) position[header[i]] = i;
  auto column_of = [&](const std::string& name) {
    auto it = position.find(name);
    if (it == position.end()) throw ParseError(path + ": no column \"" + name + "\"", 1, 1);
    return it->second;
  };
  std::vector<size_t> key_pos, col_pos;
  for (const auto& [key, unused] : data.keys) key_pos.push_back(column_of(key));
  for (const ColumnBuilder& col : data.columns) col_pos.push_back(column_of(col.name()));

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = SplitCsv(line, line_no);
    if (cells.size() != header.size()) {
      throw ParseError(path + ": expected " + std::to_string(header.size()) + " cells, got " +
                           std::to_string(cells.size()),
                       line_no, 1);
    }
    size_t k = 0;
    for (auto& [key, values] : data.keys) values.push_back(cells[key_pos[k++]]);
    for (size_t c = 0; c < data.columns.size(); ++c) {
      const FeatureSpec& spec = specs.at(data.columns[c].name());
      const bool string_scalar = spec.dtype == FeatureDType::kString && spec.shape.empty();
      data.columns[c].AddTokens(SplitValues(cells[col_pos[c]], string_scalar), line_no);
    }
    ++data.rows;
  }
  return data;
}

}  // namespace

NodeTable ReadNodeTable(const std::string& path, const NodeSetSpec& spec) {
  TableData data = ReadTable(path, {kNodeIdColumn}, spec.features);
  NodeTable table;
  table.ids = std::move(data.keys[kNodeIdColumn]);
  for (const ColumnBuilder& col : data.columns) table.features[col.name()] = col.Finish(data.rows);
  return table;
}

EdgeTable ReadEdgeTable(const std::string& path, const EdgeSetSpec& spec) {
  TableData data = ReadTable(path, {kSourceIdColumn, kTargetIdColumn}, spec.features);
  EdgeTable table;
  table.source_ids = std::move(data.keys[kSourceIdColumn]);
  table.target_ids = std::move(data.keys[kTargetIdColumn]);
  for (const ColumnBuilder& col : data.columns) table.features[col.name()] = col.Finish(data.rows);
  return table;
}

}  // namespace hetgnn
