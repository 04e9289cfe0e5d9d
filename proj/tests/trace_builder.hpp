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

// Test-only helper: builds synthetic traces in the exact schema the simulator
// emits, so checker behavior can be pinned on hand-written histories.

#include <map>
#include <optional>
#include <vector>

#include "causalkv/checker.hpp"
#include "causalkv/json_codec.hpp"
#include "causalkv/sim.hpp"

namespace causalkv::test {

struct TraceBuilder {
  sim::Trace trace;
  std::uint64_t seq = 0;
  std::uint64_t msg_seq = 0;
  Micros now = 0;
  std::map<int, int> next_idx;

  TraceBuilder& config(int replicas, int partitions,
                       std::vector<sim::CutSpec> cuts = {},
                       const char* protocol = "causalkv") {
    sim::SimConfig cfg;
    cfg.replicas = replicas;
    cfg.partitions = partitions;
    cfg.cuts = std::move(cuts);
    emit("state-assert", "sim",
         {{"what", "run-config"}, {"protocol", protocol}, {"config", cfg.to_json()}});
    return *this;
  }

  void emit(const char* kind, const std::string& actor, nlohmann::json payload) {
    sim::TraceEvent e;
    e.seq = seq++;
    e.t = now += 100;
    e.kind = kind;
    e.actor = actor;
    e.payload = std::move(payload);
    trace.push_back(std::move(e));
  }

  nlohmann::json op_common(int client, const char* kind) {
    int idx = next_idx[client]++;
    return nlohmann::json{
        {"client", client}, {"idx", idx}, {"kind", kind}, {"ref", std::to_string(client) + ":" + std::to_string(idx)}};
  }

  void finish_op(int client, ReplicaId home, nlohmann::json start, nlohmann::json extra) {
    emit("op-start", "c" + std::to_string(client), start);
    nlohmann::json end = start;
    end["home"] = home;
    end["lat_us"] = 100;
    end["srv_t"] = now;
    end["srv_seq"] = seq;  // globally increasing stands in for handler order
    for (auto& [k, v] : extra.items()) end[k] = std::move(v);
    emit("op-end", "c" + std::to_string(client), std::move(end));
  }

  // Returns the written version's id.
  VersionId put(int client, ReplicaId home, const Key& k, HlcTimestamp ut, ReplicaId sr,
                DependencySet ds = {}) {
    nlohmann::json start = op_common(client, "put");
    start["key"] = k;
    finish_op(client, home, std::move(start),
              {{"ut", hlc_encode(ut)}, {"sr", sr}, {"ds", ds}, {"waited_us", 0}});
    return VersionId{ut, sr};
  }

  void get(int client, ReplicaId home, const Key& k, std::optional<VersionId> ret) {
    nlohmann::json start = op_common(client, "get");
    start["key"] = k;
    nlohmann::json rj = ret ? nlohmann::json(*ret) : nlohmann::json(nullptr);
    finish_op(client, home, std::move(start), {{"ret", std::move(rj)}});
  }

  void rotx(int client, ReplicaId home, const std::vector<Key>& keys,
            const std::map<Key, std::optional<VersionId>>& ret) {
    nlohmann::json start = op_common(client, "rotx");
    start["keys"] = keys;
    nlohmann::json rj = nlohmann::json::object();
    for (const auto& [k, v] : ret) rj[k] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    finish_op(client, home, std::move(start), {{"ret", std::move(rj)}, {"waited_us", 0}});
  }

  // Replicate of (k, ut) from p(src, n) to p(dst, n); optionally delivered.
  void replicate(ReplicaId src, ReplicaId dst, PartitionId n, const Key& k, HlcTimestamp ut,
                 bool deliver = true) {
    std::uint64_t ms = msg_seq++;
    std::string from = "s" + std::to_string(src) + "." + std::to_string(n);
    std::string to = "s" + std::to_string(dst) + "." + std::to_string(n);
    emit("msg-send", from,
         {{"ms", ms}, {"type", "Replicate"}, {"to", to}, {"k", k}, {"ut", hlc_encode(ut)}, {"sr", src}});
    if (deliver) {
      emit("msg-recv", to,
           {{"ms", ms}, {"type", "Replicate"}, {"from", from}, {"k", k}, {"ut", hlc_encode(ut)}, {"sr", src}});
    }
  }

  void dsv_event(ReplicaId m, PartitionId n, const std::vector<std::uint64_t>& v) {
    emit("state-assert", "s" + std::to_string(m) + "." + std::to_string(n),
         {{"what", "dsv"}, {"v", v}});
  }

  void store_dump(ReplicaId m, PartitionId n, const std::vector<Version>& versions) {
    nlohmann::json store = nlohmann::json::object();
    for (const Version& v : versions) {
      if (!store.contains(v.k)) store[v.k] = nlohmann::json::array();
      store[v.k].push_back(v);
    }
    emit("state-assert", "s" + std::to_string(m) + "." + std::to_string(n),
         {{"what", "store-dump"}, {"store", std::move(store)}});
  }
};

}  // namespace causalkv::test
