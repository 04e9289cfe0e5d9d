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

#include <memory>
#include <optional>

#include "causalkv/sim.hpp"

namespace causalkv {

// Sticky client session: the home replica is fixed for the session lifetime,
// and the dependency state only ever moves forward.
struct ClientSession {
  int id = 0;
  ReplicaId home = 0;
  DependencySet ds;
  StableVector dsv;

  ClientSession() = default;
  ClientSession(int id_, ReplicaId home_, int replicas)
      : id(id_), home(home_), dsv(static_cast<std::size_t>(replicas)) {}

  void require_home(ReplicaId target) const {
    if (target != home) throw FatalError("sticky client contacted a non-home replica");
  }

  void fold_dsv(const StableVector& v) { dsv = sv_max(dsv, v); }
  void fold_ds(const DependencySet& d) { ds = max_ds(ds, d); }
};

// Driver plumbing shared by both protocol clients: op numbering, trace
// events, think-time scheduling, and handing outcomes back to the workload.
class ClientNodeBase : public sim::Node {
 public:
  ClientNodeBase(int id, ReplicaId home, std::unique_ptr<sim::ClientDriver> driver);

  void on_begin(sim::Context& ctx) override;
  void on_wakeup(std::uint64_t token, sim::Context& ctx) override;

 protected:
  virtual void issue(const sim::ClientOp& op, OpRef ref, sim::Context& ctx) = 0;

  // Called by the protocol subclass when the reply for the in-flight op has
  // been folded into session state. `extras` lands in the op-end payload.
  void complete(sim::OpOutcome outcome, nlohmann::json extras, sim::Context& ctx);

  const sim::ClientOp* inflight() const { return inflight_ ? &*inflight_ : nullptr; }
  OpRef inflight_ref() const { return ref_; }
  Micros inflight_started() const { return started_; }

  int id_;
  ReplicaId home_;

 private:
  void proceed(std::optional<sim::ClientDriver::Next> nx, sim::Context& ctx);
  void start_op(sim::ClientOp op, sim::Context& ctx);

  std::unique_ptr<sim::ClientDriver> driver_;
  std::optional<sim::ClientOp> inflight_;
  std::optional<sim::ClientOp> staged_;
  OpRef ref_{};
  Micros started_ = 0;
  int next_index_ = 0;
};

// Client half of the primary protocol.
class Client : public ClientNodeBase {
 public:
  Client(int id, ReplicaId home, int replicas, std::unique_ptr<sim::ClientDriver> driver);

  void on_message(const Envelope& env, sim::Context& ctx) override;

  const ClientSession& session() const { return session_; }

 protected:
  void issue(const sim::ClientOp& op, OpRef ref, sim::Context& ctx) override;

 private:
  ClientSession session_;
  DependencySet sent_put_ds_;  // ds attached to the in-flight write, echoed in the trace
};

nlohmann::json client_op_payload(const sim::ClientOp& op);
const char* client_op_kind(const sim::ClientOp& op);

}  // namespace causalkv
