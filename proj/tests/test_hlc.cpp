// Copyright 2026 The causalkv Authors
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

#include <doctest.h>

#include "causalkv/hlc.hpp"

using namespace causalkv;

namespace {
HlcTimestamp ts(std::uint64_t l, std::uint32_t c) { return HlcTimestamp{l, c}; }
}  // namespace

TEST_CASE("tick_local follows the send/local-event rules") {
  CHECK(hlc_tick_local(ts(10, 3), 12) == ts(12, 0));
  CHECK(hlc_tick_local(ts(10, 3), 9) == ts(10, 4));  // physical clock regressed
  CHECK(hlc_tick_local(ts(0, 0), 0) == ts(0, 1));
}

TEST_CASE("tick_recv folds a message timestamp with the four-way case split") {
  CHECK(hlc_tick_recv(ts(10, 2), ts(10, 7), 9) == ts(10, 8));
  CHECK(hlc_tick_recv(ts(10, 2), ts(15, 4), 9) == ts(15, 5));
  CHECK(hlc_tick_recv(ts(10, 2), ts(3, 0), 20) == ts(20, 0));
}

TEST_CASE("tick_put strictly dominates the dependency timestamp") {
  CHECK(hlc_tick_put(ts(10, 1), ts(11, 3), 10) == ts(11, 4));
  CHECK(hlc_tick_put(ts(10, 1), ts(5, 9), 12) == ts(12, 0));
  CHECK(hlc_tick_put(ts(10, 1), ts(10, 1), 10) == ts(10, 2));
}

TEST_CASE("tick_put postconditions hold on random inputs") {
  Rng rng(42);
  for (int i = 0; i < 20000; ++i) {
    HlcTimestamp cur = ts(rng.below(1000), static_cast<std::uint32_t>(rng.below(50)));
    HlcTimestamp dt = ts(rng.below(1000), static_cast<std::uint32_t>(rng.below(50)));
    Ticks pt = static_cast<Ticks>(rng.below(1000));
    HlcTimestamp r = hlc_tick_put(cur, dt, pt);
    CHECK(r > dt);
    CHECK(r > cur);
    CHECK(r.l >= static_cast<std::uint64_t>(pt));
  }
}

TEST_CASE("tick_local and tick_recv never regress") {
  Rng rng(43);
  for (int i = 0; i < 20000; ++i) {
    HlcTimestamp cur = ts(rng.below(1000), static_cast<std::uint32_t>(rng.below(50)));
    HlcTimestamp msg = ts(rng.below(1000), static_cast<std::uint32_t>(rng.below(50)));
    Ticks pt = static_cast<Ticks>(rng.below(1000));
    CHECK(hlc_tick_local(cur, pt) > cur);
    HlcTimestamp r = hlc_tick_recv(cur, msg, pt);
    CHECK(r > cur);
    CHECK(r > msg);
    CHECK(r.l >= static_cast<std::uint64_t>(pt));
  }
}

TEST_CASE("comparison is lexicographic and total") {
  CHECK(hlc_compare(ts(5, 2), ts(5, 3)) < 0);
  CHECK(hlc_compare(ts(6, 0), ts(5, 9)) > 0);
  CHECK(hlc_compare(ts(4, 4), ts(4, 4)) == 0);
}

TEST_CASE("packed encoding") {
  CHECK(hlc_encode(ts(0, 0)) == 0);
  CHECK(hlc_encode(ts(1, 0)) == 65536);
  CHECK(hlc_decode(hlc_encode(ts(7, 3))) == ts(7, 3));

  SUBCASE("out of range") {
    CHECK_THROWS_AS(hlc_encode(ts(1ULL << 48, 0)), FatalError);
    HlcTimestamp bad{1, 0};
    bad.c = 0x10000;
    CHECK_THROWS_AS(hlc_encode(bad), FatalError);
  }

  SUBCASE("big-endian byte form round-trips") {
    auto b = hlc_to_bytes(ts(1, 2));
    CHECK(b[7] == 2);
    CHECK(b[5] == 1);
    CHECK(hlc_from_bytes(b) == ts(1, 2));
  }
}

TEST_CASE("encoding order matches timestamp order") {
  Rng rng(44);
  for (int i = 0; i < 100000; ++i) {
    HlcTimestamp a = ts(rng.below(1 << 20), static_cast<std::uint32_t>(rng.below(1 << 16)));
    HlcTimestamp b = ts(rng.below(1 << 20), static_cast<std::uint32_t>(rng.below(1 << 16)));
    int cmp = hlc_compare(a, b);
    std::uint64_t ea = hlc_encode(a), eb = hlc_encode(b);
    if (cmp < 0) CHECK(ea < eb);
    if (cmp == 0) CHECK(ea == eb);
    if (cmp > 0) CHECK(ea > eb);
  }
}

TEST_CASE("counter overflow is fatal") {
  HlcTimestamp cur{5, kHlcMaxC};
  CHECK_THROWS_AS(hlc_tick_local(cur, 5), FatalError);
}
