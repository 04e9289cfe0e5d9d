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

#include "causalkv/storage.hpp"

#include <algorithm>

#include "causalkv/json_codec.hpp"

namespace causalkv {

void VersionChain::insert(Version v) {
  // Descending <ut, sr>: find the first element not greater than v.
  auto it = std::lower_bound(versions_.begin(), versions_.end(), v,
                             [](const Version& a, const Version& b) { return a.id() > b.id(); });
  if (it != versions_.end() && it->id() == v.id()) {
    *it = std::move(v);
    return;
  }
  versions_.insert(it, std::move(v));
}

const Version* VersionChain::first_matching(
    const std::function<bool(const Version&)>& pred) const {
  for (const Version& v : versions_) {
    if (pred(v)) return &v;
  }
  return nullptr;
}

void VersionStore::insert(Version v) {
  chains_[v.k].insert(std::move(v));
}

const VersionChain* VersionStore::chain(const Key& k) const {
  auto it = chains_.find(k);
  return it == chains_.end() ? nullptr : &it->second;
}

const Version* VersionStore::read_visible(const Key& k, ReplicaId local,
                                          const StableVector& dsv) const {
  const VersionChain* ch = chain(k);
  if (!ch) return nullptr;
  return ch->first_matching([&](const Version& v) { return visible_under(v, local, dsv); });
}

const Version* VersionStore::read_snapshot(const Key& k, const StableVector& sv) const {
  const VersionChain* ch = chain(k);
  if (!ch) return nullptr;
  return ch->first_matching([&](const Version& v) { return visible_in_snapshot(v, sv); });
}

const Version* VersionStore::read_filtered(
    const Key& k, const std::function<bool(const Version&)>& pred) const {
  const VersionChain* ch = chain(k);
  if (!ch) return nullptr;
  return ch->first_matching(pred);
}

nlohmann::json VersionStore::dump() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, ch] : chains_) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Version& v : ch.versions()) arr.push_back(v);
    j[key] = std::move(arr);
  }
  return j;
}

}  // namespace causalkv
