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

#include <deque>
#include <map>

#include "causalkv/client.hpp"
#include "causalkv/sim.hpp"
#include "causalkv/storage.hpp"

namespace causalkv::gr {

// Baseline partition: physical-clock version timestamps (strictly increasing
// per server via a sequence breaker), a scalar global stable time, writes
// that wait out clock skew, and read-only transactions that park until the
// stable time catches up with the client's dependency timestamp.
class GrPartition : public sim::Node {
 public:
  GrPartition(ReplicaId m, PartitionId n, int replicas);

  void on_message(const Envelope& env, sim::Context& ctx) override;
  void on_timer(sim::TimerKind kind, std::int64_t round, sim::Context& ctx) override;
  void on_wakeup(std::uint64_t token, sim::Context& ctx) override;

  sim::NodeStats node_stats() const override { return stats_; }
  nlohmann::json store_dump() const override { return store_.dump(); }

  const StableVector& vv() const { return vv_; }
  const HlcTimestamp& gst() const { return gst_; }

 private:
  void handle_put(const GrPutReq& req, const Address& from, sim::Context& ctx);
  void complete_put(const GrPutReq& req, const Address& from, Micros waited, sim::Context& ctx);
  void handle_get(const GrGetReq& req, const Address& from, sim::Context& ctx);
  void handle_rotx(const GrRotx& req, const Address& from, sim::Context& ctx);
  void launch_rotx(const GrRotx& req, const Address& from, Micros arrived, sim::Context& ctx);
  void handle_slice(const GrSliceReq& req, const Address& from, sim::Context& ctx);
  void handle_slice_reply(const GrSliceReply& rep, sim::Context& ctx);
  void raise_gst(HlcTimestamp candidate, sim::Context& ctx);

  // Strictly increasing per-server timestamp: physical tick plus a sequence
  // breaker, collapsed to a scalar by the packed encoding.
  HlcTimestamp bump_clock(Ticks pc);

  struct ParkedPut {
    GrPutReq req;
    Address from;
    Micros arrived = 0;
  };
  struct ParkedRotx {
    GrRotx req;
    Address from;
    Micros arrived = 0;
  };
  struct PendingRotx {
    Address client;
    OpRef op;
    std::size_t remaining = 0;
    std::map<Key, SliceValue> results;
    Micros waited = 0;
  };

  ReplicaId m_;
  PartitionId n_;
  HlcTimestamp clock_;
  StableVector vv_;
  HlcTimestamp gst_;
  VersionStore store_;
  Micros last_replicate_sent_ = 0;
  bool replicated_since_epoch_ = false;
  std::map<std::uint64_t, ParkedPut> parked_puts_;
  std::uint64_t next_token_ = 0;
  std::deque<ParkedRotx> parked_rotx_;
  std::map<OpRef, PendingRotx> pending_rotx_;
  std::map<std::int64_t, std::pair<HlcTimestamp, int>> rounds_;  // coordinator only
  sim::NodeStats stats_;
};

// Baseline client session: one scalar dependency timestamp plus the latest
// stable time seen.
class GrClient : public ClientNodeBase {
 public:
  GrClient(int id, ReplicaId home, std::unique_ptr<sim::ClientDriver> driver);

  void on_message(const Envelope& env, sim::Context& ctx) override;

  const HlcTimestamp& dt() const { return dt_; }
  const HlcTimestamp& gst() const { return gst_; }

 protected:
  void issue(const sim::ClientOp& op, OpRef ref, sim::Context& ctx) override;

 private:
  HlcTimestamp dt_;
  HlcTimestamp gst_;
};

}  // namespace causalkv::gr
