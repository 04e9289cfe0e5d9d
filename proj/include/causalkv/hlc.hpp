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

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

#include "causalkv/common.hpp"

namespace causalkv {

// Physical time in simulated milliseconds (1 tick == 1 ms).
using Ticks = std::int64_t;

// Hybrid logical clock value. `l` tracks the highest physical reading (in
// ticks) observed so far; `c` is a bounded counter that breaks ties between
// events sharing the same `l`. Ordering is lexicographic on <l, c>.
//
// Update rules are pure functions: the owner keeps the current value and
// replaces it with the result. Physical clocks may regress; `l` never does.
struct HlcTimestamp {
  std::uint64_t l = 0;
  std::uint32_t c = 0;

  friend constexpr auto operator<=>(const HlcTimestamp&, const HlcTimestamp&) = default;

  std::string str() const { return "<" + std::to_string(l) + "," + std::to_string(c) + ">"; }
};

// Bit budget of the packed 64-bit representation: 48 bits of milliseconds,
// 16 bits of counter. Exceeding either is a configuration error, not a
// runtime condition the protocol can reach in a sane setup.
inline constexpr std::uint64_t kHlcMaxL = (1ULL << 48) - 1;
inline constexpr std::uint32_t kHlcMaxC = 0xFFFF;

namespace detail {
inline std::uint32_t checked_c(std::uint64_t c) {
  if (c > kHlcMaxC) throw FatalError("hlc counter overflow: c exceeds 16-bit bound");
  return static_cast<std::uint32_t>(c);
}
inline std::uint64_t checked_pt(Ticks pt) {
  if (pt < 0) throw FatalError("hlc update with negative physical reading");
  return static_cast<std::uint64_t>(pt);
}
}  // namespace detail

// Local/send event: l <- max(l, pt); c increments when l stands still.
inline HlcTimestamp hlc_tick_local(const HlcTimestamp& current, Ticks pt) {
  std::uint64_t p = detail::checked_pt(pt);
  HlcTimestamp r;
  r.l = current.l > p ? current.l : p;
  r.c = (r.l == current.l) ? detail::checked_c(std::uint64_t{current.c} + 1) : 0;
  return r;
}

// Receive event: fold the message timestamp in. Four-way case split on which
// of {current, message} the new l coincides with.
inline HlcTimestamp hlc_tick_recv(const HlcTimestamp& current, const HlcTimestamp& msg,
                                  Ticks pt) {
  std::uint64_t p = detail::checked_pt(pt);
  HlcTimestamp r;
  r.l = current.l;
  if (msg.l > r.l) r.l = msg.l;
  if (p > r.l) r.l = p;
  if (r.l == current.l && r.l == msg.l) {
    std::uint64_t base = current.c > msg.c ? current.c : msg.c;
    r.c = detail::checked_c(base + 1);
  } else if (r.l == current.l) {
    r.c = detail::checked_c(std::uint64_t{current.c} + 1);
  } else if (r.l == msg.l) {
    r.c = detail::checked_c(std::uint64_t{msg.c} + 1);
  } else {
    r.c = 0;
  }
  return r;
}

// Write-timestamp update: like recv but guarantees the result strictly
// dominates the dependency timestamp `dt`, so a write never has to wait for
// any clock to catch up.
inline HlcTimestamp hlc_tick_put(const HlcTimestamp& current, const HlcTimestamp& dt,
                                 Ticks pt) {
  std::uint64_t p = detail::checked_pt(pt);
  HlcTimestamp r;
  r.l = current.l;
  if (p > r.l) r.l = p;
  if (dt.l > r.l) r.l = dt.l;
  if (r.l == current.l && r.l == dt.l) {
    std::uint64_t base = current.c > dt.c ? current.c : dt.c;
    r.c = detail::checked_c(base + 1);
  } else if (r.l == current.l) {
    r.c = detail::checked_c(std::uint64_t{current.c} + 1);
  } else if (r.l == dt.l) {
    r.c = detail::checked_c(std::uint64_t{dt.c} + 1);
  } else {
    r.c = 0;
  }
  return r;
}

inline int hlc_compare(const HlcTimestamp& a, const HlcTimestamp& b) {
  if (a.l != b.l) return a.l < b.l ? -1 : 1;
  if (a.c != b.c) return a.c < b.c ? -1 : 1;
  return 0;
}

inline HlcTimestamp hlc_max(const HlcTimestamp& a, const HlcTimestamp& b) {
  return a < b ? b : a;
}

inline HlcTimestamp hlc_min(const HlcTimestamp& a, const HlcTimestamp& b) {
  return a < b ? a : b;
}

// Packed representation: (l << 16) | c. Integer order of encodings equals
// the timestamp order, which is what makes it usable directly in traces.
inline std::uint64_t hlc_encode(const HlcTimestamp& t) {
  if (t.l > kHlcMaxL) throw FatalError("hlc encode: l exceeds 48-bit bound");
  if (t.c > kHlcMaxC) throw FatalError("hlc encode: c exceeds 16-bit bound");
  return (t.l << 16) | t.c;
}

inline HlcTimestamp hlc_decode(std::uint64_t enc) {
  return HlcTimestamp{enc >> 16, static_cast<std::uint32_t>(enc & 0xFFFF)};
}

// Normative byte form: the packed word, big-endian.
inline std::array<std::uint8_t, 8> hlc_to_bytes(const HlcTimestamp& t) {
  std::uint64_t e = hlc_encode(t);
  std::array<std::uint8_t, 8> out{};
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(e >> (56 - 8 * i));
  return out;
}

inline HlcTimestamp hlc_from_bytes(const std::array<std::uint8_t, 8>& b) {
  std::uint64_t e = 0;
  for (int i = 0; i < 8; ++i) e = (e << 8) | b[i];
  return hlc_decode(e);
}

}  // namespace causalkv
