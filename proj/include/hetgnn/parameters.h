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
#ifndef HETGNN_PARAMETERS_H_
#define HETGNN_PARAMETERS_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hetgnn/tensor.h"

namespace hetgnn {

enum class Initializer {
  kGlorotUniform,     // U(-l, l), l = sqrt(6 / (fan_in + fan_out))
  kEmbeddingUniform,  // U(-0.05, 0.05)
  kZeros,
  kOnes,
};

// Named trainable tensors. Initial values depend only on (seed, name), so
// creation order never changes a model's starting point.
class ParameterStore {
 public:
  explicit ParameterStore(uint64_t seed = 0, DType dtype = DType::kFloat32);

  // Creates a parameter; names must be unique. `regularized` marks weights
  // that receive the L2 penalty (biases and norm offsets do not).
  const std::string& Create(const std::string& name, const Shape& shape,
                            Initializer init, bool regularized);

  bool Contains(const std::string& name) const;
  const DenseTensor& Get(const std::string& name) const;
  // Replaces a value; the shape must match.
  void Set(const std::string& name, DenseTensor value);
  bool IsRegularized(const std::string& name) const;

  std::vector<std::string> Names() const;
  int64_t NumScalars() const;
  DType dtype() const { return dtype_; }
  uint64_t seed() const { return seed_; }

  // Converts every value (e.g. to float64 for gradient checks).
  void CastTo(DType dtype);

 private:
  struct Entry {
    DenseTensor value;
    bool regularized = false;
  };
  uint64_t seed_;
  DType dtype_;
  std::map<std::string, Entry> entries_;
};

}  // namespace hetgnn

#endif  // HETGNN_PARAMETERS_H_
