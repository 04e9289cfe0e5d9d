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

#include <map>
#include <vector>

#include "causalkv/sim.hpp"
#include "causalkv/storage.hpp"

namespace causalkv {

// Partition state machine p(m, n): a deterministic function
// (state, input, now) -> (state, outbound messages). No handler ever waits on
// a timer or clock condition; in particular a write is timestamped and
// acknowledged inside the handler that received it.
class Partition : public sim::Node {
 public:
  Partition(ReplicaId m, PartitionId n, int replicas);

  void on_message(const Envelope& env, sim::Context& ctx) override;
  void on_timer(sim::TimerKind kind, std::int64_t round, sim::Context& ctx) override;

  sim::NodeStats node_stats() const override { return stats_; }
  nlohmann::json store_dump() const override { return store_.dump(); }

  // Exposed for state-machine tests.
  const StableVector& vv() const { return vv_; }
  const StableVector& dsv() const { return dsv_; }
  const VersionStore& store() const { return store_; }

 private:
  void handle_get(const GetReq& req, const Address& from, sim::Context& ctx);
  void handle_put(const PutReq& req, const Address& from, sim::Context& ctx);
  void handle_replicate(const Replicate& msg, const Address& from, sim::Context& ctx);
  void handle_heartbeat(const Heartbeat& msg, const Address& from, sim::Context& ctx);
  void handle_rotx(const Rotx& req, const Address& from, sim::Context& ctx);
  void handle_slice(const SliceReq& req, const Address& from, sim::Context& ctx);
  void handle_slice_reply(const SliceReply& rep, sim::Context& ctx);
  void handle_dsv_share(const DsvShare& msg, sim::Context& ctx);
  void handle_dsv_install(const DsvInstall& msg, sim::Context& ctx);

  void tick_for_put(const HlcTimestamp& dt, sim::Context& ctx);
  void note_clock(const HlcTimestamp& t, sim::Context& ctx);
  void set_dsv(StableVector next, sim::Context& ctx);
  ServedAt served_at(sim::Context& ctx) const;

  struct PendingRotx {
    Address client;
    OpRef op;
    std::size_t remaining = 0;
    std::map<Key, SliceValue> results;
    DependencySet ds;
    Micros arrived = 0;
  };

  struct RoundAcc {
    StableVector min_vv;
    int count = 0;
  };

  ReplicaId m_;
  PartitionId n_;
  StableVector vv_;
  StableVector dsv_;
  VersionStore store_;
  Micros last_replicate_sent_ = 0;
  bool replicated_since_epoch_ = false;
  std::map<OpRef, PendingRotx> pending_rotx_;
  std::map<std::int64_t, RoundAcc> rounds_;  // coordinator only
  sim::NodeStats stats_;
};

}  // namespace causalkv
