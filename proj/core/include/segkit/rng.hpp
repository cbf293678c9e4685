// Copyright 2026 The segkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2,
// 3", SC'11) and a seeded stream over it. Every random decision in segkit is
// drawn from an RngStream so that results are identical on every platform.
//
// Stream layout: key = (seed low 32, seed high 32); counter = (block low 32,
// block high 32, stream low 32, stream high 32). Each block yields four
// 32-bit words, consumed in order.

#include <array>
#include <cstdint>

namespace segkit {

namespace philox {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Ten-round Philox4x32 bijection.
Counter philox4x32_10(Counter counter, Key key);

}  // namespace philox

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  /// Number of 32-bit words consumed so far.
  std::uint64_t position() const { return block_ * 4 - static_cast<std::uint64_t>(4 - lane_); }

  std::uint32_t next_u32();
  std::uint64_t next_u64();  // (first word << 32) | second word

  /// Uniform double in [0, 1) with 53 random bits: ((a >> 5) * 2^26 + (b >> 6)) / 2^53.
  double uniform01();
  /// lo + (hi - lo) * uniform01().
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n) by rejection on next_u64(). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform integer in [lo, hi], both inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// uniform01() < p.
  bool bernoulli(double p);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;  // index of the next block to generate
  std::array<std::uint32_t, 4> buffer_{};
  int lane_ = 4;  // next word in buffer_; 4 = empty
};

}  // namespace segkit
