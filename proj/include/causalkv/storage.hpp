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

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "causalkv/core.hpp"

namespace causalkv {

// All versions of one key, kept in descending <ut, sr> order so the first
// version passing a visibility predicate is the answer. Versions are never
// garbage collected; runs are small and the checker wants full history.
class VersionChain {
 public:
  // Keeps the ordering invariant; re-inserting an existing <ut, sr> replaces it.
  void insert(Version v);

  const std::vector<Version>& versions() const { return versions_; }
  bool empty() const { return versions_.empty(); }

  const Version* first_matching(const std::function<bool(const Version&)>& pred) const;

 private:
  std::vector<Version> versions_;
};

// Per-partition multi-version store.
class VersionStore {
 public:
  void insert(Version v);

  // Newest version visible under the data center stable vector; local
  // versions are exempt from the dependency check.
  const Version* read_visible(const Key& k, ReplicaId local, const StableVector& dsv) const;

  // Newest version inside the snapshot vector; no local exemption.
  const Version* read_snapshot(const Key& k, const StableVector& sv) const;

  // Newest version passing an arbitrary predicate. The baseline protocol
  // plugs its scalar-watermark rules in here.
  const Version* read_filtered(const Key& k, const std::function<bool(const Version&)>& pred) const;

  const VersionChain* chain(const Key& k) const;
  std::size_t key_count() const { return chains_.size(); }

  nlohmann::json dump() const;

 private:
  std::map<Key, VersionChain> chains_;
};

}  // namespace causalkv
