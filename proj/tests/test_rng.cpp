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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "segkit/rng.hpp"

namespace segkit {
namespace {

// Known-answer vectors of the Random123 distribution (kat_vectors,
// philox4x32 with 10 rounds).
TEST(Philox, KnownAnswerZero) {
  const auto out = philox::philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (philox::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = philox::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (philox::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                         {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (philox::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngStream, WordsFollowCounterLayout) {
  const std::uint64_t seed = 0x0123456789abcdefull;
  const std::uint64_t stream = 0xfedcba9876543210ull;
  RngStream rng(seed, stream);
  for (std::uint32_t block = 0; block < 3; ++block) {
    const auto expect = philox::philox4x32_10(
        {block, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    for (int lane = 0; lane < 4; ++lane) EXPECT_EQ(rng.next_u32(), expect[lane]);
  }
  EXPECT_EQ(rng.position(), 12u);
}

TEST(RngStream, Uniform01MatchesFormula) {
  RngStream a(5, 9), b(5, 9);
  for (int i = 0; i < 1000; ++i) {
    const std::uint32_t x = b.next_u32();
    const std::uint32_t y = b.next_u32();
    const double expect = (static_cast<double>(x >> 5) * 67108864.0 + static_cast<double>(y >> 6)) /
                          9007199254740992.0;
    const double got = a.uniform01();
    ASSERT_EQ(got, expect);
    ASSERT_GE(got, 0.0);
    ASSERT_LT(got, 1.0);
  }
}

TEST(RngStream, Next64IsHighThenLow) {
  RngStream a(1, 2), b(1, 2);
  const std::uint64_t hi = b.next_u32();
  const std::uint64_t lo = b.next_u32();
  EXPECT_EQ(a.next_u64(), (hi << 32) | lo);
}

TEST(RngStream, BelowStaysInRangeAndCoversIt) {
  RngStream rng(11, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(RngStream(0, 0).below(1), 0u);
}

TEST(RngStream, UniformIntIsInclusive) {
  RngStream rng(3, 3);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.uniform_int(-2, 2);
    ASSERT_GE(v, -2);
    ASSERT_LE(v, 2);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(RngStream, BernoulliEdges) {
  RngStream rng(4, 4);
  for (int i = 0; i < 100; ++i) {
    EXPECT_FALSE(rng.bernoulli(0.0));
    EXPECT_TRUE(rng.bernoulli(1.0));
  }
}

TEST(RngStream, StreamsAndSeedsDiffer) {
  RngStream a(1, 0), b(1, 1), c(2, 0);
  const auto x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
  EXPECT_NE(x, y);
  EXPECT_NE(x, z);
}

TEST(RngStream, UniformMeanIsCentred) {
  RngStream rng(99, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.uniform(-1.0, 3.0);
  // Standard error of the mean is 4 / sqrt(12 n) ~ 0.0037.
  EXPECT_NEAR(sum / n, 1.0, 0.02);
}

}  // namespace
}  // namespace segkit
