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
#ifndef HETGNN_HASH_H_
#define HETGNN_HASH_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace hetgnn {

inline constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

// 64-bit FNV-1a. `state` lets callers hash discontiguous buffers.
constexpr uint64_t Fnv1a64(std::string_view bytes,
                           uint64_t state = kFnvOffsetBasis) {
  for (char c : bytes) {
    state ^= static_cast<uint8_t>(c);
    state *= kFnvPrime;
  }
  return state;
}

inline uint64_t Fnv1a64(std::span<const uint8_t> bytes,
                        uint64_t state = kFnvOffsetBasis) {
  for (uint8_t b : bytes) {
    state ^= b;
    state *= kFnvPrime;
  }
  return state;
}

// Finalizer from splitmix64; a cheap bijective 64-bit mixer.
constexpr uint64_t Mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace hetgnn

#endif  // HETGNN_HASH_H_
