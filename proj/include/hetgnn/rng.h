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
#ifndef HETGNN_RNG_H_
#define HETGNN_RNG_H_

#include <array>
#include <cstdint>
#include <string_view>

namespace hetgnn {

// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11). Stateless:
// the same (counter, key) always maps to the same 128 output bits, which is
// what makes per-site streams reproducible under any thread schedule.
class Philox4x32 {
 public:
  using Counter = std::array<uint32_t, 4>;
  using Key = std::array<uint32_t, 2>;

  static Counter Generate(Counter counter, Key key);
};

// A random stream addressed by (seed, site label, a, b). Two streams with
// the same address produce identical sequences; any differing component
// yields an independent stream.
class RngStream {
 public:
  RngStream(uint64_t seed, std::string_view site, uint64_t a = 0,
            uint64_t b = 0);

  uint64_t NextU64();
  uint32_t NextU32();
  // Uniform double in [0, 1) with 53 random bits.
  double NextDouble();
  // Uniform integer in [0, bound). Unbiased (Lemire's rejection method).
  uint64_t UniformInt(uint64_t bound);
  // Uniform double in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * NextDouble(); }

 private:
  void Refill();

  Philox4x32::Key key_;
  uint64_t block_ = 0;
  uint64_t index_b_;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

}  // namespace hetgnn

#endif  // HETGNN_RNG_H_
