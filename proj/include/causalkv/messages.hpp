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
#include <variant>
#include <vector>

#include <json.hpp>

#include "causalkv/core.hpp"

namespace causalkv {

using Micros = std::int64_t;

// Simulated actor address: a partition server s<m>.<n> or a client c<id>.
struct Address {
  enum class Kind : std::uint8_t { Server, Client };
  Kind kind = Kind::Server;
  std::int32_t a = 0;  // server: replica. client: client id.
  std::int32_t b = 0;  // server: partition.

  static Address server(ReplicaId m, PartitionId n) { return {Kind::Server, m, n}; }
  static Address client(int id) { return {Kind::Client, id, 0}; }

  bool is_server() const { return kind == Kind::Server; }
  ReplicaId replica() const { return a; }
  PartitionId partition() const { return b; }
  int client_id() const { return a; }

  friend constexpr auto operator<=>(const Address&, const Address&) = default;

  std::string str() const {
    if (kind == Kind::Server) return "s" + std::to_string(a) + "." + std::to_string(b);
    return "c" + std::to_string(a);
  }
};

// Identifies one client-visible operation: (client id, per-client index).
// Doubles as the transaction id for read-only transactions.
struct OpRef {
  std::int32_t client = 0;
  std::int32_t index = 0;
  friend constexpr auto operator<=>(const OpRef&, const OpRef&) = default;
  std::string str() const { return std::to_string(client) + ":" + std::to_string(index); }
};

// Server-side handling metadata echoed in replies. Not protocol state: the
// checker uses it to anchor reads/writes to the instant the server acted.
struct ServedAt {
  Micros t = 0;
  std::uint64_t seq = 0;
};

struct GetReq {
  OpRef op;
  Key k;
  StableVector dsv;
};
struct GetReply {
  OpRef op;
  std::optional<Value> value;
  DependencySet ds;
  StableVector dsv;
  std::optional<VersionId> vid;  // trace metadata
  ServedAt served;
};
struct PutReq {
  OpRef op;
  Key k;
  Value v;
  DependencySet ds;
};
struct PutReply {
  OpRef op;
  HlcTimestamp ut;
  ReplicaId sr = 0;
  ServedAt served;
};
struct Replicate {
  Version ver;
};
struct Heartbeat {
  HlcTimestamp hlc;
};
struct Rotx {
  OpRef op;
  std::vector<Key> keys;
  StableVector dsv;
  DependencySet ds;
};
struct SliceValue {
  std::optional<Value> value;
  std::optional<VersionId> vid;
};
struct RotxReply {
  OpRef op;
  std::map<Key, SliceValue> results;
  StableVector dsv;
  DependencySet ds;
  ServedAt served;
};
struct SliceReq {
  OpRef txn;
  Key k;
  StableVector sv;
};
struct SliceReply {
  OpRef txn;
  Key k;
  std::optional<Value> value;
  DependencySet ds;
  std::optional<VersionId> vid;
};
struct DsvShare {
  std::int64_t round = 0;
  StableVector vv;
};
struct DsvInstall {
  std::int64_t round = 0;
  StableVector min_vv;
};

// Baseline protocol messages. Timestamps reuse HlcTimestamp as a
// (physical-tick, sequence-breaker) pair whose packed encoding is the
// strictly increasing scalar the baseline needs.
struct GrPutReq {
  OpRef op;
  Key k;
  Value v;
  HlcTimestamp dt;
};
struct GrPutReply {
  OpRef op;
  HlcTimestamp ut;
  ReplicaId sr = 0;
  ServedAt served;
  Micros waited = 0;
};
struct GrGetReq {
  OpRef op;
  Key k;
  HlcTimestamp gst;
};
struct GrGetReply {
  OpRef op;
  std::optional<Value> value;
  HlcTimestamp gst;
  std::optional<VersionId> vid;
  ServedAt served;
};
struct GrReplicate {
  Version ver;
};
struct GrHeartbeat {
  HlcTimestamp ts;
};
struct GrGstShare {
  std::int64_t round = 0;
  HlcTimestamp local_min;
};
struct GrGstInstall {
  std::int64_t round = 0;
  HlcTimestamp gst;
};
struct GrRotx {
  OpRef op;
  std::vector<Key> keys;
  HlcTimestamp dt;
  HlcTimestamp gst;
};
struct GrRotxReply {
  OpRef op;
  std::map<Key, SliceValue> results;
  HlcTimestamp gst;
  ServedAt served;
  Micros waited = 0;
};
struct GrSliceReq {
  OpRef txn;
  Key k;
  HlcTimestamp snapshot;
};
struct GrSliceReply {
  OpRef txn;
  Key k;
  std::optional<Value> value;
  std::optional<VersionId> vid;
};

using Message =
    std::variant<GetReq, GetReply, PutReq, PutReply, Replicate, Heartbeat, Rotx, RotxReply,
                 SliceReq, SliceReply, DsvShare, DsvInstall, GrPutReq, GrPutReply, GrGetReq,
                 GrGetReply, GrReplicate, GrHeartbeat, GrGstShare, GrGstInstall, GrRotx,
                 GrRotxReply, GrSliceReq, GrSliceReply>;

// Every message travels in an envelope carrying sender, destination, and
// send-time metadata for the trace.
struct Envelope {
  std::uint64_t msg_seq = 0;
  Address src;
  Address dst;
  Micros send_t = 0;
  Message payload;
};

const char* message_type_name(const Message& m);

// Periodic background traffic (heartbeats, stabilization rounds) that should
// not count as workload activity when deciding quiescence.
bool message_is_periodic(const Message& m);

// Compact per-message summary for msg-send / msg-recv trace events: type tag
// plus the fields the checker consumes.
nlohmann::json message_trace_summary(const Message& m);

}  // namespace causalkv
