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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "causalkv/sim.hpp"

// Offline trace verifier. It rebuilds the happens-before relation from the
// operation history and checks, for reads O = R = {get, rotx} with get
// immediately visible and last-writer-wins conflict resolution:
//   - a client's own writes stay visible to it,
//   - once read, a version never disappears from the client's view,
//   - reading a version makes everything it depends on visible,
//   - local writes are immediately visible to local gets,
// plus snapshot consistency of every read-only transaction, convergence of
// connected replicas at quiescence, and a set of mechanical audits (FIFO
// delivery, stable-watermark monotonicity and safety).

namespace causalkv::checker {

using sim::Trace;

enum class OpKind { Get, Put, Rotx };

struct ReadObs {
  Key key;
  VersionId returned;   // virtual initial version if absent
  bool absent = false;
};

struct OpRecord {
  int client = 0;
  int index = 0;
  OpKind kind = OpKind::Get;
  ReplicaId home = 0;
  std::uint64_t start_seq = 0;
  std::uint64_t end_seq = 0;
  Micros started = 0;
  Micros ended = 0;
  Micros srv_t = 0;
  std::uint64_t srv_seq = 0;
  Micros waited = 0;  // server-side deferral, zero unless the protocol parked
  // put
  Key key;
  VersionId written{};
  DependencySet ds;
  // reads (get: one entry; rotx: one per key)
  std::vector<ReadObs> reads;
  std::vector<Key> keys;  // rotx key set
};

struct MsgRecord {
  std::uint64_t msg_seq = 0;
  std::string type;
  std::string src;
  std::string dst;
  std::uint64_t send_seq = 0;
  bool received = false;
  std::uint64_t recv_seq = 0;
  Micros recv_t = 0;
  // Replicate payloads
  VersionId ver{};
  Key key;
};

struct WatermarkEvent {
  std::string actor;  // partition
  std::uint64_t seq = 0;
  std::vector<std::uint64_t> dsv;  // packed entries (size M), or
  std::uint64_t gst = 0;           // packed scalar
  bool is_gst = false;
};

struct ParsedTrace {
  int replicas = 1;
  int partitions = 1;
  std::string protocol;
  std::vector<sim::CutSpec> cuts;
  std::vector<OpRecord> ops;             // ordered by end_seq
  std::vector<MsgRecord> messages;       // ordered by msg_seq
  std::vector<WatermarkEvent> marks;     // ordered by seq
  std::map<std::string, nlohmann::json> stores;  // actor -> final dump
  int deferred_puts = 0;
  int parked_rotx = 0;
};

ParsedTrace parse_trace(const Trace& trace);

// Write events (versions) and read events with session order, reads-from,
// and transitive closure. v1 dep v2 iff write(v2) ->* write(v1).
class DependencyGraph {
 public:
  explicit DependencyGraph(const ParsedTrace& t);

  // Node numbering: one node per op, in ParsedTrace::ops order.
  std::size_t node_count() const { return n_; }
  bool happens_before(std::size_t a, std::size_t b) const;

  // dep relation between written versions, by op node of the writes.
  bool dep(std::size_t write_a, std::size_t write_b) const;  // a dep b

  const std::vector<std::size_t>& writes_of(const Key& k) const;
  // Version identity is <key, ut, sr>: timestamps may collide across
  // partitions, never within one key's chain.
  std::optional<std::size_t> writer_of(const Key& k, const VersionId& id) const;

 private:
  void close();
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> reach_;  // reach_[a] bitset: b with a -> b
  std::map<Key, std::vector<std::size_t>> writes_by_key_;
  std::map<std::tuple<Key, std::uint64_t, ReplicaId>, std::size_t> writer_;
  const ParsedTrace* t_ = nullptr;
};

struct Violation {
  std::string check;
  std::string detail;
  int client = 0;
  int op_index = 0;
  Key key;
  VersionId expected{};
  VersionId returned{};

  nlohmann::json to_json() const;
};

struct Verdict {
  bool pass = false;
  std::vector<Violation> causal_violations;
  std::vector<Violation> rotx_violations;
  std::vector<Violation> convergence_violations;
  std::vector<Violation> audit_violations;  // fifo, watermark monotonicity/safety, C1
  std::uint32_t max_c = 0;
  int deferred_puts = 0;
  int parked_rotx = 0;

  nlohmann::json to_json() const;
};

// Individual passes, exposed for targeted tests.
std::vector<Violation> check_causal_pp(const ParsedTrace& t, const DependencyGraph& g);
std::vector<Violation> check_rotx_snapshots(const ParsedTrace& t, const DependencyGraph& g);
std::vector<Violation> check_convergence(const ParsedTrace& t, const DependencyGraph& g);
std::vector<Violation> audit_fifo(const ParsedTrace& t);
std::vector<Violation> audit_watermarks(const ParsedTrace& t);  // monotone + safety vs deliveries
std::vector<Violation> audit_timestamp_order(const ParsedTrace& t, const DependencyGraph& g);

Verdict check_trace(const Trace& trace);

// Definition-expansion oracle for the happens-before relation: an O(n^3)
// fixpoint over the three clauses, independent of DependencyGraph. Used to
// cross-check the graph on small traces.
std::vector<std::vector<bool>> happens_before_oracle(const ParsedTrace& t);

}  // namespace causalkv::checker
