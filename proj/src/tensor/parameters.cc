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
#include "hetgnn/parameters.h"

#include <cmath>

#include "hetgnn/rng.h"

namespace hetgnn {

ParameterStore::ParameterStore(uint64_t seed, DType dtype) : seed_(seed), dtype_(dtype) {}

const std::string& ParameterStore::Create(const std::string& name, const Shape& shape,
                                          Initializer init, bool regularized) {
  if (entries_.count(name) != 0) {
    throw InvalidArgument("duplicate parameter name '" + name + "'");
  }
  const int64_t n = NumElements(shape);
  std::vector<double> values(static_cast<size_t>(n), 0.0);
  RngStream rng(seed_, "init/" + name);
  switch (init) {
    case Initializer::kGlorotUniform: {
      const int64_t fan_in = shape.size() >= 2 ? shape[shape.size() - 2] : shape[0];
      const int64_t fan_out = shape.back();
      const double limit = std::sqrt(6.0 / static_cast<double>(std::max<int64_t>(fan_in + fan_out, 1)));
      for (double& v : values) v = rng.Uniform(-limit, limit);
      break;
    }
    case Initializer::kEmbeddingUniform:
      for (double& v : values) v = rng.Uniform(-0.05, 0.05);
      break;
    case Initializer::kOnes:
      std::fill(values.begin(), values.end(), 1.0);
      break;
    case Initializer::kZeros:
      break;
  }
  auto [it, inserted] =
      entries_.emplace(name, Entry{DenseTensor::FromDoubles(shape, values, dtype_), regularized});
  return it->first;
}

bool ParameterStore::Contains(const std::string& name) const {
  return entries_.count(name) != 0;
}

const DenseTensor& ParameterStore::Get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw InvalidArgument("unknown parameter '" + name + "'");
  return it->second.value;
}

void ParameterStore::Set(const std::string& name, DenseTensor value) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw InvalidArgument("unknown parameter '" + name + "'");
  if (it->second.value.shape() != value.shape()) {
    throw DimensionError("parameter '" + name + "' has shape " +
                         ShapeString(it->second.value.shape()) + ", got " +
                         ShapeString(value.shape()));
  }
  it->second.value = value.Cast(dtype_);
}

bool ParameterStore::IsRegularized(const std::string& name) const {
  auto it = entries_.find(name);
  return it != entries_.end() && it->second.regularized;
}

std::vector<std::string> ParameterStore::Names() const {
  std::vector<std::string> names;
  names.reserve(entries_.size());
  for (const auto& [name, entry] : entries_) names.push_back(name);
  return names;
}

int64_t ParameterStore::NumScalars() const {
  int64_t n = 0;
  for (const auto& [name, entry] : entries_) n += entry.value.size();
  return n;
}

void ParameterStore::CastTo(DType dtype) {
  dtype_ = dtype;
  for (auto& [name, entry] : entries_) entry.value = entry.value.Cast(dtype);
}

}  // namespace hetgnn
