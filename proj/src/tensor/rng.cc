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
#include "hetgnn/rng.h"

#include "hetgnn/hash.h"

namespace hetgnn {
namespace {

constexpr uint32_t kMultiplier0 = 0xD2511F53;
constexpr uint32_t kMultiplier1 = 0xCD9E8D57;
constexpr uint32_t kWeyl0 = 0x9E3779B9;
constexpr uint32_t kWeyl1 = 0xBB67AE85;

inline void MulHiLo(uint32_t a, uint32_t b, uint32_t* hi, uint32_t* lo) {
  const uint64_t product = static_cast<uint64_t>(a) * b;
  *hi = static_cast<uint32_t>(product >> 32);
  *lo = static_cast<uint32_t>(product);
}

}  // namespace

Philox4x32::Counter Philox4x32::Generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kMultiplier0, ctr[0], &hi0, &lo0);
    MulHiLo(kMultiplier1, ctr[2], &hi1, &lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream::RngStream(uint64_t seed, std::string_view site, uint64_t a,
                     uint64_t b)
    : index_b_(b) {
  const uint64_t k = Mix64(Mix64(seed ^ Fnv1a64(site)) ^ Mix64(a + 1));
  key_ = {static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32)};
}

void RngStream::Refill() {
  buffer_ = Philox4x32::Generate(
      {static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32),
       static_cast<uint32_t>(index_b_), static_cast<uint32_t>(index_b_ >> 32)},
      key_);
  ++block_;
  used_ = 0;
}

uint32_t RngStream::NextU32() {
  if (used_ == 4) Refill();
  return buffer_[used_++];
}

uint64_t RngStream::NextU64() {
  const uint64_t hi = NextU32();
  return (hi << 32) | NextU32();
}

double RngStream::NextDouble() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

uint64_t RngStream::UniformInt(uint64_t bound) {
  if (bound <= 1) return 0;
  // Lemire, "Fast Random Integer Generation in an Interval" (2019).
  unsigned __int128 m = static_cast<unsigned __int128>(NextU64()) * bound;
  uint64_t low = static_cast<uint64_t>(m);
  if (low < bound) {
    const uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(NextU64()) * bound;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

}  // namespace hetgnn
