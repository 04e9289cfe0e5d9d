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

#include <json.hpp>

#include "causalkv/core.hpp"

// Canonical JSON forms used in trace files: timestamps as the packed 64-bit
// integer, dependency sets as arrays of [replica, packed] pairs sorted by
// replica id.

namespace causalkv {

inline void to_json(nlohmann::json& j, const HlcTimestamp& t) { j = hlc_encode(t); }
inline void from_json(const nlohmann::json& j, HlcTimestamp& t) {
  t = hlc_decode(j.get<std::uint64_t>());
}

inline void to_json(nlohmann::json& j, const DependencySet& ds) {
  j = nlohmann::json::array();
  for (const auto& [r, h] : ds.entries()) j.push_back({r, hlc_encode(h)});
}
inline void from_json(const nlohmann::json& j, DependencySet& ds) {
  DependencySet::Map m;
  for (const auto& e : j) m.emplace(e.at(0).get<ReplicaId>(), hlc_decode(e.at(1).get<std::uint64_t>()));
  ds = DependencySet(std::move(m));
}

inline void to_json(nlohmann::json& j, const StableVector& sv) {
  j = nlohmann::json::array();
  for (const auto& t : sv.entries()) j.push_back(hlc_encode(t));
}
inline void from_json(const nlohmann::json& j, StableVector& sv) {
  std::vector<HlcTimestamp> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(hlc_decode(e.get<std::uint64_t>()));
  sv = StableVector(std::move(v));
}

inline void to_json(nlohmann::json& j, const VersionId& id) {
  j = nlohmann::json{{"ut", hlc_encode(id.ut)}, {"sr", id.sr}};
}
inline void from_json(const nlohmann::json& j, VersionId& id) {
  id.ut = hlc_decode(j.at("ut").get<std::uint64_t>());
  id.sr = j.at("sr").get<ReplicaId>();
}

inline void to_json(nlohmann::json& j, const Version& v) {
  j = nlohmann::json{{"k", v.k}, {"v", v.v}, {"ut", hlc_encode(v.ut)}, {"sr", v.sr}, {"ds", v.ds}};
}
inline void from_json(const nlohmann::json& j, Version& v) {
  v.k = j.at("k").get<std::string>();
  v.v = j.at("v").get<std::string>();
  v.ut = hlc_decode(j.at("ut").get<std::uint64_t>());
  v.sr = j.at("sr").get<ReplicaId>();
  v.ds = j.at("ds").get<DependencySet>();
}

}  // namespace causalkv
