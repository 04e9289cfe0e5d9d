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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causalkv/common.hpp"
#include "causalkv/hlc.hpp"

namespace causalkv {

// Replica (data center) index in [0, M). -1 is reserved for the checker's
// virtual initial version.
using ReplicaId = std::int32_t;
// Partition index in [0, N).
using PartitionId = std::int32_t;

using Key = std::string;
using Value = std::string;

// Stable key placement, identical at every replica.
inline PartitionId partition_for_key(const Key& k, int partitions) {
  ckv_check(partitions >= 1, "partition count must be >= 1");
  return static_cast<PartitionId>(fnv1a64(k) % static_cast<std::uint64_t>(partitions));
}

// Partial map replica -> HLC timestamp: for each data center, the highest
// timestamp among depended-on versions written there. At most one entry per
// replica by construction.
class DependencySet {
 public:
  using Map = std::map<ReplicaId, HlcTimestamp>;

  DependencySet() = default;
  explicit DependencySet(Map entries) : entries_(std::move(entries)) {}

  static DependencySet single(ReplicaId r, HlcTimestamp t) {
    Map m;
    m.emplace(r, t);
    return DependencySet(std::move(m));
  }

  const Map& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  std::optional<HlcTimestamp> at(ReplicaId r) const {
    auto it = entries_.find(r);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  // Entry-wise max fold; missing entries adopt the other side's value.
  void fold(const DependencySet& other) {
    for (const auto& [r, h] : other.entries_) {
      auto [it, inserted] = entries_.emplace(r, h);
      if (!inserted && h > it->second) it->second = h;
    }
  }

  friend bool operator==(const DependencySet&, const DependencySet&) = default;

 private:
  Map entries_;
};

inline DependencySet max_ds(const DependencySet& a, const DependencySet& b) {
  DependencySet r = a;
  r.fold(b);
  return r;
}

// Length-M vector of HLC timestamps. Entries only ever move forward at a
// given owner; the fold helpers below are the only mutation paths the
// protocol uses.
class StableVector {
 public:
  StableVector() = default;
  explicit StableVector(std::size_t m) : v_(m) {}
  explicit StableVector(std::vector<HlcTimestamp> v) : v_(std::move(v)) {}

  std::size_t size() const { return v_.size(); }
  const HlcTimestamp& operator[](std::size_t i) const { return v_[i]; }

  void set(std::size_t i, HlcTimestamp t) { v_[i] = t; }

  void raise(std::size_t i, HlcTimestamp t) {
    if (t > v_[i]) v_[i] = t;
  }

  const std::vector<HlcTimestamp>& entries() const { return v_; }

  friend bool operator==(const StableVector&, const StableVector&) = default;

 private:
  std::vector<HlcTimestamp> v_;
};

inline StableVector sv_max(const StableVector& a, const StableVector& b) {
  ckv_check(a.size() == b.size(), "stable vector length mismatch");
  StableVector r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.raise(i, b[i]);
  return r;
}

inline StableVector sv_min(const StableVector& a, const StableVector& b) {
  ckv_check(a.size() == b.size(), "stable vector length mismatch");
  StableVector r = a;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (b[i] < r[i]) r.set(i, b[i]);
  return r;
}

// Raises only the entries named in `ds`.
inline StableVector sv_max_ds(const StableVector& a, const DependencySet& ds) {
  StableVector r = a;
  for (const auto& [rep, h] : ds.entries()) {
    ckv_check(rep >= 0 && static_cast<std::size_t>(rep) < r.size(),
              "dependency set names a replica outside the vector");
    r.raise(static_cast<std::size_t>(rep), h);
  }
  return r;
}

// Identity of a stored version: update time plus source replica,
// ordered lexicographically. This is the last-writer-wins order.
struct VersionId {
  HlcTimestamp ut;
  ReplicaId sr = 0;

  friend constexpr auto operator<=>(const VersionId&, const VersionId&) = default;

  std::string str() const { return ut.str() + "@" + std::to_string(sr); }
};

// The checker models a never-written key as this virtual version; every real
// version dominates it.
inline constexpr ReplicaId kInitialReplica = -1;
inline VersionId initial_version_id() { return VersionId{HlcTimestamp{0, 0}, kInitialReplica}; }

// A stored item: the unit of replication and conflict resolution.
struct Version {
  Key k;
  Value v;
  HlcTimestamp ut;
  ReplicaId sr = 0;
  DependencySet ds;

  VersionId id() const { return VersionId{ut, sr}; }
};

inline const Version& lww_winner(const Version& a, const Version& b) {
  ckv_check(a.k == b.k, "lww_winner called on versions of different keys");
  return b.id() > a.id() ? b : a;
}

// GET visibility: local versions are always visible; remote ones need every
// dependency to be covered by the data center stable vector.
inline bool visible_under(const Version& d, ReplicaId local, const StableVector& dsv) {
  if (d.sr == local) return true;
  for (const auto& [rep, h] : d.ds.entries()) {
    ckv_check(rep >= 0 && static_cast<std::size_t>(rep) < dsv.size(),
              "dependency set names a replica outside the vector");
    if (h > dsv[static_cast<std::size_t>(rep)]) return false;
  }
  return true;
}

// Snapshot visibility: like visible_under but the version's own <sr, ut> is
// folded into the checked set, so local versions get no exemption.
inline bool visible_in_snapshot(const Version& d, const StableVector& sv) {
  ckv_check(d.sr >= 0 && static_cast<std::size_t>(d.sr) < sv.size(),
            "version source replica outside the vector");
  if (d.ut > sv[static_cast<std::size_t>(d.sr)]) return false;
  for (const auto& [rep, h] : d.ds.entries()) {
    ckv_check(rep >= 0 && static_cast<std::size_t>(rep) < sv.size(),
              "dependency set names a replica outside the vector");
    if (h > sv[static_cast<std::size_t>(rep)]) return false;
  }
  return true;
}

}  // namespace causalkv
