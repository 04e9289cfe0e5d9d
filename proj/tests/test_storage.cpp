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

#include "causalkv/storage.hpp"

using namespace causalkv;

namespace {

HlcTimestamp ts(std::uint64_t l, std::uint32_t c = 0) { return HlcTimestamp{l, c}; }

Version ver(HlcTimestamp ut, ReplicaId sr, DependencySet ds = {}) {
  return Version{"k", "v" + ut.str(), ut, sr, std::move(ds)};
}

DependencySet one(ReplicaId r, HlcTimestamp h) { return DependencySet::single(r, h); }

// Brute-force reference for the two read paths: apply the predicate to every
// version and take the last-writer-wins maximum.
const Version* brute_visible(const std::vector<Version>& all, ReplicaId local,
                             const StableVector& dsv) {
  const Version* best = nullptr;
  for (const Version& v : all) {
    if (!visible_under(v, local, dsv)) continue;
    if (best == nullptr || v.id() > best->id()) best = &v;
  }
  return best;
}

const Version* brute_snapshot(const std::vector<Version>& all, const StableVector& sv) {
  const Version* best = nullptr;
  for (const Version& v : all) {
    if (!visible_in_snapshot(v, sv)) continue;
    if (best == nullptr || v.id() > best->id()) best = &v;
  }
  return best;
}

}  // namespace

TEST_CASE("insert keeps descending <ut, sr> order and replaces duplicates") {
  VersionStore s;
  s.insert(ver(ts(5), 1));
  CHECK(s.chain("k")->versions().size() == 1);

  s.insert(ver(ts(5), 0));
  CHECK(s.chain("k")->versions().front().sr == 1);  // sr breaks the tie

  s.insert(ver(ts(5), 1));
  CHECK(s.chain("k")->versions().size() == 2);  // re-insert replaces

  s.insert(ver(ts(9), 0));
  const auto& vs = s.chain("k")->versions();
  CHECK(vs.front().ut == ts(9));
  for (std::size_t i = 1; i < vs.size(); ++i) CHECK(vs[i - 1].id() > vs[i].id());
}

TEST_CASE("read_visible filters then takes the lww max") {
  VersionStore s;
  s.insert(ver(ts(9), 0));                       // local
  s.insert(ver(ts(10), 1, one(1, ts(7))));       // remote, blocked below
  StableVector dsv(std::vector<HlcTimestamp>{ts(0), ts(6)});

  const Version* got = s.read_visible("k", 0, dsv);
  REQUIRE(got != nullptr);
  CHECK(got->ut == ts(9));

  CHECK(s.read_visible("missing", 0, dsv) == nullptr);

  VersionStore s2;
  s2.insert(ver(ts(3), 1));  // single remote version, empty ds
  CHECK(s2.read_visible("k", 0, dsv) != nullptr);
}

TEST_CASE("read_snapshot gives local versions no exemption") {
  VersionStore s;
  s.insert(ver(ts(5, 1), 0));
  StableVector sv(std::vector<HlcTimestamp>{ts(5), ts(9)});
  CHECK(s.read_snapshot("k", sv) == nullptr);  // own ut above the snapshot

  s.insert(ver(ts(5), 0, one(1, ts(9))));
  const Version* got = s.read_snapshot("k", sv);  // exact boundary is inclusive
  REQUIRE(got != nullptr);
  CHECK(got->ut == ts(5));

  CHECK(s.read_snapshot("missing", sv) == nullptr);
}

TEST_CASE("read paths agree with the brute-force oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 10000; ++trial) {
    VersionStore s;
    std::vector<Version> all;
    int n = static_cast<int>(rng.below(9));
    for (int i = 0; i < n; ++i) {
      DependencySet::Map m;
      for (ReplicaId r = 0; r < 3; ++r)
        if (rng.coin()) m.emplace(r, ts(rng.below(8), static_cast<std::uint32_t>(rng.below(3))));
      Version v = ver(ts(rng.below(8), static_cast<std::uint32_t>(rng.below(3))),
                      static_cast<ReplicaId>(rng.below(3)), DependencySet(std::move(m)));
      s.insert(v);
      // Mirror replace-on-duplicate.
      bool replaced = false;
      for (auto& e : all)
        if (e.id() == v.id()) {
          e = v;
          replaced = true;
        }
      if (!replaced) all.push_back(v);
    }
    std::vector<HlcTimestamp> w;
    for (int i = 0; i < 3; ++i)
      w.push_back(ts(rng.below(8), static_cast<std::uint32_t>(rng.below(3))));
    StableVector vec(std::move(w));
    ReplicaId local = static_cast<ReplicaId>(rng.below(3));

    const Version* a = s.read_visible("k", local, vec);
    const Version* b = brute_visible(all, local, vec);
    CHECK((a == nullptr) == (b == nullptr));
    if (a && b) CHECK(a->id() == b->id());

    const Version* c = s.read_snapshot("k", vec);
    const Version* d = brute_snapshot(all, vec);
    CHECK((c == nullptr) == (d == nullptr));
    if (c && d) CHECK(c->id() == d->id());
  }
}

TEST_CASE("read_visible is monotone in the stable vector") {
  Rng rng(12);
  for (int trial = 0; trial < 4000; ++trial) {
    VersionStore s;
    int n = 1 + static_cast<int>(rng.below(8));
    for (int i = 0; i < n; ++i) {
      DependencySet::Map m;
      for (ReplicaId r = 0; r < 3; ++r)
        if (rng.coin()) m.emplace(r, ts(rng.below(8)));
      s.insert(ver(ts(rng.below(8), static_cast<std::uint32_t>(rng.below(3))),
                   static_cast<ReplicaId>(rng.below(3)), DependencySet(std::move(m))));
    }
    std::vector<HlcTimestamp> lo_v, hi_v;
    for (int i = 0; i < 3; ++i) {
      HlcTimestamp a = ts(rng.below(8)), b = ts(rng.below(8));
      lo_v.push_back(hlc_min(a, b));
      hi_v.push_back(hlc_max(a, b));
    }
    StableVector lo(std::move(lo_v)), hi(std::move(hi_v));
    const Version* vlo = s.read_visible("k", 0, lo);
    const Version* vhi = s.read_visible("k", 0, hi);
    if (vlo != nullptr) {
      REQUIRE(vhi != nullptr);
      CHECK(!(vhi->id() < vlo->id()));
    }
  }
}

TEST_CASE("dump is canonical json keyed by key") {
  VersionStore s;
  s.insert(ver(ts(2), 0));
  s.insert(ver(ts(1), 1));
  nlohmann::json d = s.dump();
  REQUIRE(d.contains("k"));
  CHECK(d["k"].size() == 2);
  CHECK(d["k"][0]["ut"].get<std::uint64_t>() == hlc_encode(ts(2)));
}
