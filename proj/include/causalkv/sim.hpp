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
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "causalkv/messages.hpp"

namespace causalkv::sim {

using causalkv::Address;
using causalkv::Envelope;
using causalkv::Message;
using causalkv::Micros;

inline constexpr Micros kMicrosPerTick = 1000;  // 1 tick = 1 ms of simulated time

inline Micros ms_to_us(double ms) { return static_cast<Micros>(ms * 1000.0 + 0.5); }

enum class Protocol { CausalKv, GentleRain };
const char* protocol_name(Protocol p);

struct LinkSpec {
  double one_way_ms = 40.0;
  double jitter_ms = 0.0;  // uniform extra in [0, jitter_ms]
};

// Inter-replica network cut: messages on the wire or sent while the cut is
// active are held and delivered at the cut's end, in FIFO order.
struct CutSpec {
  ReplicaId a = 0;
  ReplicaId b = 0;
  double from_ms = 0;
  double to_ms = 0;
};

// Extra delay applied to every message sent by one partition server.
struct SlowSpec {
  ReplicaId replica = 0;
  PartitionId partition = 0;
  double send_delay_ms = 0;
};

struct SimConfig {
  int replicas = 1;
  int partitions = 1;
  std::vector<std::vector<double>> skew_ms;  // [replica][partition]; empty = all zero
  std::map<std::pair<int, int>, LinkSpec> links;  // keyed by unordered replica pair
  LinkSpec default_link{40.0, 0.0};
  double intra_dc_ms = 0.5;
  double theta_ms = 5.0;   // stabilization round period
  double delta_ms = 10.0;  // heartbeat period
  std::uint64_t seed = 1;
  std::vector<CutSpec> cuts;
  std::vector<SlowSpec> slow;

  void validate() const;
  double skew_of(ReplicaId m, PartitionId n) const;
  const LinkSpec& link(ReplicaId a, ReplicaId b) const;
  double max_one_way_ms() const;
  double skew_spread_ms() const;

  nlohmann::json to_json() const;
  static SimConfig from_json(const nlohmann::json& j);
};

// One record per client-visible operation or internal message. Replaying a
// run with the same seed produces a byte-identical sequence.
struct TraceEvent {
  std::uint64_t seq = 0;
  Micros t = 0;
  std::string kind;  // op-start | op-end | msg-send | msg-recv | timer | put-deferred | state-assert
  std::string actor;
  nlohmann::json payload;

  nlohmann::json to_json() const;
  static TraceEvent from_json(const nlohmann::json& j);
};

using Trace = std::vector<TraceEvent>;

std::string trace_to_jsonl(const Trace& t);
Trace trace_from_jsonl(const std::string& text);

enum class TimerKind { Heartbeat, StableRound };

struct NodeStats {
  std::uint32_t max_c = 0;
  Ticks max_l_minus_pt = 0;
  int puts_deferred = 0;
  Micros put_wait_total = 0;
  int rotx_parked = 0;
  Micros rotx_wait_total = 0;

  void merge(const NodeStats& o);
};

class Engine;

// Handed to a node for the duration of one callback.
class Context {
 public:
  Context(Engine& e, Address self) : eng_(e), self_(self) {}

  Micros now() const;
  Ticks pc_ticks() const;  // caller's skewed physical clock, in ms ticks, clamped at 0
  int replicas() const;
  int partitions() const;
  Micros theta_us() const;
  Micros delta_us() const;
  PartitionId partition_of(const Key& k) const;
  // Earliest simulated time at which the caller's physical clock reads at
  // least `tick`. Never before now.
  Micros when_pc_reaches(Ticks tick) const;

  void send(const Address& dst, Message msg);
  void trace(const char* kind, nlohmann::json payload);
  void schedule_wakeup(Micros at, std::uint64_t token);
  std::uint64_t next_event_seq() const;  // seq the next emitted trace event will get

  Rng& rng();
  void op_started();
  void op_ended();
  void client_done();

  const Address& self() const { return self_; }

 private:
  Engine& eng_;
  Address self_;
};

class Node {
 public:
  virtual ~Node() = default;
  virtual void on_message(const Envelope& env, Context& ctx) = 0;
  virtual void on_timer(TimerKind kind, std::int64_t round, Context& ctx);
  virtual void on_wakeup(std::uint64_t token, Context& ctx);
  virtual void on_begin(Context& ctx);
  virtual NodeStats node_stats() const { return {}; }
  virtual nlohmann::json store_dump() const { return nullptr; }
};

// Workload-facing surface: a driver scripts one client's operations, deciding
// the next step from the previous outcome.
struct OpGet {
  Key k;
};
struct OpPut {
  Key k;
  Value v;
};
struct OpRotx {
  std::vector<Key> keys;
};
using ClientOp = std::variant<OpGet, OpPut, OpRotx>;

struct OpOutcome {
  ClientOp op;
  OpRef ref;
  Micros started = 0;
  Micros ended = 0;
  std::optional<Value> value;          // get
  std::optional<VersionId> vid;        // get (returned) / put (written)
  std::map<Key, SliceValue> results;   // rotx
};

class ClientDriver {
 public:
  virtual ~ClientDriver() = default;
  struct Next {
    Micros delay = 0;
    ClientOp op;
  };
  virtual std::optional<Next> start(Rng& rng) = 0;
  virtual std::optional<Next> next(const OpOutcome& prev, Rng& rng) = 0;
};

class Workload {
 public:
  virtual ~Workload() = default;
  virtual int client_count() const = 0;
  virtual ReplicaId home(int client) const = 0;
  virtual std::unique_ptr<ClientDriver> driver(int client) = 0;
  // A client may be chained to start only after another finishes (-1: none).
  virtual int chain_after(int client) const;
};

struct RunStats {
  NodeStats nodes;
  std::uint64_t messages_sent = 0;
  Micros end_time = 0;
};

struct RunResult {
  Trace trace;
  RunStats stats;
  nlohmann::json final_stores;  // actor string -> store dump
};

// Deterministic discrete-event loop. Events are processed in (time, seq)
// order; seq is assigned at scheduling time, which also breaks ties.
class Engine {
 public:
  Engine(SimConfig cfg, Protocol proto);

  // Servers must be added in row-major order: (0,0), (0,1), ..., (M-1,N-1).
  void add_server(std::unique_ptr<Node> node);
  void add_client(std::unique_ptr<Node> node, ReplicaId home, int chain_after = -1);

  RunResult run();

  const SimConfig& config() const { return cfg_; }
  Protocol protocol() const { return proto_; }
  const Trace& trace_so_far() const { return trace_; }

 private:
  friend class Context;

  struct Ev {
    Micros t = 0;
    std::uint64_t seq = 0;
    int type = 0;  // 0 deliver, 1 timer, 2 wakeup, 3 client begin
    Envelope env;
    Address addr;
    TimerKind timer = TimerKind::Heartbeat;
    std::int64_t round = 0;
    std::uint64_t token = 0;
  };
  struct EvCmp {
    bool operator()(const Ev& a, const Ev& b) const {
      if (a.t != b.t) return a.t > b.t;
      return a.seq > b.seq;
    }
  };

  void push(Ev ev);
  void dispatch(const Ev& ev);
  void emit(const char* kind, const std::string& actor, nlohmann::json payload);
  void send_from(const Address& src, const Address& dst, Message msg);
  Micros arrival_time(const Address& src, const Address& dst, Micros eff_send);
  Micros skew_us(const Address& a) const;
  Micros send_delay_us(const Address& a) const;
  Node* node_at(const Address& a);
  bool keep_timers(Micros next_fire) const;

  SimConfig cfg_;
  Protocol proto_;
  std::priority_queue<Ev, std::vector<Ev>, EvCmp> q_;
  std::vector<std::unique_ptr<Node>> servers_;
  std::vector<std::unique_ptr<Node>> clients_;
  std::vector<ReplicaId> client_home_;
  std::vector<int> client_chain_;
  std::vector<Rng> client_rng_;
  std::map<std::pair<Address, Address>, Micros> fifo_last_;
  std::map<std::pair<int, int>, Rng> link_rng_;
  Trace trace_;
  Micros now_ = 0;
  std::uint64_t next_seq_ = 0;       // event queue sequencing
  std::uint64_t next_trace_seq_ = 0;
  std::uint64_t next_msg_seq_ = 0;
  std::uint64_t msgs_sent_ = 0;
  Micros last_activity_ = 0;
  Micros drain_margin_ = 0;
  int pending_ops_ = 0;
  Address cur_actor_;
};

// Builds the protocol nodes for `proto`, wires the workload's clients, runs
// to quiescence, and returns the trace plus final state.
RunResult run_simulation(const SimConfig& cfg, Protocol proto, Workload& workload);

}  // namespace causalkv::sim
