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

#include "causalkv/server.hpp"

#include <algorithm>

#include "causalkv/json_codec.hpp"

namespace causalkv {

Partition::Partition(ReplicaId m, PartitionId n, int replicas)
    : m_(m), n_(n), vv_(static_cast<std::size_t>(replicas)),
      dsv_(static_cast<std::size_t>(replicas)) {}

ServedAt Partition::served_at(sim::Context& ctx) const {
  return ServedAt{ctx.now(), ctx.next_event_seq()};
}

void Partition::note_clock(const HlcTimestamp& t, sim::Context& ctx) {
  stats_.max_c = std::max(stats_.max_c, t.c);
  Ticks pt = ctx.pc_ticks();
  Ticks drift = static_cast<Ticks>(t.l) - pt;
  if (drift > stats_.max_l_minus_pt) stats_.max_l_minus_pt = drift;
}

void Partition::set_dsv(StableVector next, sim::Context& ctx) {
  if (next == dsv_) return;
  for (std::size_t i = 0; i < dsv_.size(); ++i)
    ckv_check(!(next[i] < dsv_[i]), "dsv entry would decrease");
  dsv_ = std::move(next);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& t : dsv_.entries()) entries.push_back(hlc_encode(t));
  ctx.trace("state-assert", {{"what", "dsv"}, {"v", std::move(entries)}});
}

void Partition::on_message(const Envelope& env, sim::Context& ctx) {
  std::visit(
      [&](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, GetReq>) {
          handle_get(msg, env.src, ctx);
        } else if constexpr (std::is_same_v<T, PutReq>) {
          handle_put(msg, env.src, ctx);
        } else if constexpr (std::is_same_v<T, Replicate>) {
          handle_replicate(msg, env.src, ctx);
        } else if constexpr (std::is_same_v<T, Heartbeat>) {
          handle_heartbeat(msg, env.src, ctx);
        } else if constexpr (std::is_same_v<T, Rotx>) {
          handle_rotx(msg, env.src, ctx);
        } else if constexpr (std::is_same_v<T, SliceReq>) {
          handle_slice(msg, env.src, ctx);
        } else if constexpr (std::is_same_v<T, SliceReply>) {
          handle_slice_reply(msg, ctx);
        } else if constexpr (std::is_same_v<T, DsvShare>) {
          handle_dsv_share(msg, ctx);
        } else if constexpr (std::is_same_v<T, DsvInstall>) {
          handle_dsv_install(msg, ctx);
        } else {
          throw FatalError("partition received a message of the wrong protocol");
        }
      },
      env.payload);
}

void Partition::handle_get(const GetReq& req, const Address& from, sim::Context& ctx) {
  ckv_check(ctx.partition_of(req.k) == n_, "GetReq routed to a partition not hosting the key");
  set_dsv(sv_max(dsv_, req.dsv), ctx);

  GetReply rep;
  rep.op = req.op;
  // Local versions are always served. A remote version must sit fully inside
  // the stable vector, its own timestamp included: serving it hands its
  // <sr, ut> to the client as a dependency entry, and everything that entry
  // later raises (DSV at writes, snapshot vectors) treats it as a delivery
  // watermark. Gating only on d.ds would let a freshly delivered version
  // with a thin dependency set certify siblings still on the wire.
  const Version* d = store_.read_filtered(req.k, [&](const Version& v) {
    return v.sr == m_ || visible_in_snapshot(v, dsv_);
  });
  if (d != nullptr) {
    rep.value = d->v;
    rep.ds = max_ds(d->ds, DependencySet::single(d->sr, d->ut));
    rep.vid = d->id();
  }
  rep.dsv = dsv_;
  rep.served = served_at(ctx);
  ctx.send(from, std::move(rep));
}

void Partition::tick_for_put(const HlcTimestamp& dt, sim::Context& ctx) {
  vv_.set(static_cast<std::size_t>(m_), hlc_tick_put(vv_[static_cast<std::size_t>(m_)], dt,
                                                     ctx.pc_ticks()));
  note_clock(vv_[static_cast<std::size_t>(m_)], ctx);
}

void Partition::handle_put(const PutReq& req, const Address& from, sim::Context& ctx) {
  ckv_check(ctx.partition_of(req.k) == n_, "PutReq routed to a partition not hosting the key");
  set_dsv(sv_max_ds(dsv_, req.ds), ctx);

  // The dependency timestamp: every value the client depends on, plus what
  // this data center already considers stable for itself.
  HlcTimestamp dt = dsv_[static_cast<std::size_t>(m_)];
  for (const auto& [r, h] : req.ds.entries()) dt = hlc_max(dt, h);
  tick_for_put(dt, ctx);

  Version d;
  d.k = req.k;
  d.v = req.v;
  d.ut = vv_[static_cast<std::size_t>(m_)];
  d.sr = m_;
  d.ds = req.ds;
  store_.insert(d);

  // Reply in the same handler invocation: the write adds zero wait no matter
  // how the clocks are skewed.
  PutReply rep;
  rep.op = req.op;
  rep.ut = d.ut;
  rep.sr = m_;
  rep.served = served_at(ctx);
  ctx.send(from, std::move(rep));

  for (int k = 0; k < ctx.replicas(); ++k) {
    if (k == m_) continue;
    ctx.send(Address::server(k, n_), Replicate{d});
  }
  if (ctx.replicas() > 1) {
    last_replicate_sent_ = ctx.now();
    replicated_since_epoch_ = true;
  }
}

void Partition::handle_replicate(const Replicate& msg, const Address& from, sim::Context& ctx) {
  (void)ctx;
  ReplicaId k = from.replica();
  ckv_check(from.is_server() && k != m_ && from.partition() == n_,
            "Replicate must come from the peer partition of another replica");
  ckv_check(msg.ver.ut > vv_[static_cast<std::size_t>(k)],
            "Replicate delivered out of FIFO order");
  store_.insert(msg.ver);
  vv_.set(static_cast<std::size_t>(k), msg.ver.ut);
}

void Partition::handle_heartbeat(const Heartbeat& msg, const Address& from, sim::Context& ctx) {
  (void)ctx;
  ReplicaId k = from.replica();
  ckv_check(from.is_server() && k != m_ && from.partition() == n_,
            "Heartbeat must come from the peer partition of another replica");
  ckv_check(msg.hlc > vv_[static_cast<std::size_t>(k)],
            "Heartbeat delivered out of FIFO order");
  vv_.set(static_cast<std::size_t>(k), msg.hlc);
}

void Partition::on_timer(sim::TimerKind kind, std::int64_t round, sim::Context& ctx) {
  if (kind == sim::TimerKind::Heartbeat) {
    bool idle =
        !replicated_since_epoch_ || ctx.now() - last_replicate_sent_ >= ctx.delta_us();
    if (!idle) return;
    vv_.set(static_cast<std::size_t>(m_),
            hlc_tick_local(vv_[static_cast<std::size_t>(m_)], ctx.pc_ticks()));
    note_clock(vv_[static_cast<std::size_t>(m_)], ctx);
    for (int k = 0; k < ctx.replicas(); ++k) {
      if (k == m_) continue;
      ctx.send(Address::server(k, n_), Heartbeat{vv_[static_cast<std::size_t>(m_)]});
    }
    return;
  }
  if (kind == sim::TimerKind::StableRound) {
    ctx.send(Address::server(m_, 0), DsvShare{round, vv_});
  }
}

void Partition::handle_dsv_share(const DsvShare& msg, sim::Context& ctx) {
  ckv_check(n_ == 0, "DsvShare sent to a non-coordinator partition");
  RoundAcc& acc = rounds_[msg.round];
  if (acc.count == 0) {
    acc.min_vv = msg.vv;
  } else {
    acc.min_vv = sv_min(acc.min_vv, msg.vv);
  }
  ++acc.count;
  if (acc.count == ctx.partitions()) {
    StableVector mv = acc.min_vv;
    std::int64_t round = msg.round;
    rounds_.erase(round);
    for (int j = 0; j < ctx.partitions(); ++j) {
      ctx.send(Address::server(m_, j), DsvInstall{round, mv});
    }
  }
}

void Partition::handle_dsv_install(const DsvInstall& msg, sim::Context& ctx) {
  set_dsv(sv_max(dsv_, msg.min_vv), ctx);
}

void Partition::handle_rotx(const Rotx& req, const Address& from, sim::Context& ctx) {
  ckv_check(!req.keys.empty(), "Rotx with an empty key set");
  bool hosts_one = false;
  for (const auto& k : req.keys) hosts_one = hosts_one || ctx.partition_of(k) == n_;
  ckv_check(hosts_one, "Rotx coordinator must host at least one requested key");

  StableVector next = sv_max(dsv_, req.dsv);
  next = sv_max_ds(next, req.ds);
  set_dsv(std::move(next), ctx);

  // Freeze the snapshot vector once; the reply reports whatever the DSV is at
  // reply time.
  StableVector sv = dsv_;

  PendingRotx pend;
  pend.client = from;
  pend.op = req.op;
  pend.remaining = req.keys.size();
  pend.ds = req.ds;
  pend.arrived = ctx.now();
  ckv_check(pending_rotx_.emplace(req.op, std::move(pend)).second,
            "duplicate transaction id at coordinator");

  for (const auto& k : req.keys) {
    ctx.send(Address::server(m_, ctx.partition_of(k)), SliceReq{req.op, k, sv});
  }
}

void Partition::handle_slice(const SliceReq& req, const Address& from, sim::Context& ctx) {
  ckv_check(ctx.partition_of(req.k) == n_, "SliceReq routed to a partition not hosting the key");
  // Raising our own entry pins the snapshot: a later local write can no
  // longer be timestamped inside it.
  if (req.sv[static_cast<std::size_t>(m_)] > dsv_[static_cast<std::size_t>(m_)]) {
    StableVector next = dsv_;
    next.set(static_cast<std::size_t>(m_), req.sv[static_cast<std::size_t>(m_)]);
    set_dsv(std::move(next), ctx);
  }

  SliceReply rep;
  rep.txn = req.txn;
  rep.k = req.k;
  const Version* d = store_.read_snapshot(req.k, req.sv);
  if (d != nullptr) {
    rep.value = d->v;
    rep.ds = max_ds(d->ds, DependencySet::single(d->sr, d->ut));
    rep.vid = d->id();
  }
  ctx.send(from, std::move(rep));
}

void Partition::handle_slice_reply(const SliceReply& rep, sim::Context& ctx) {
  auto it = pending_rotx_.find(rep.txn);
  ckv_check(it != pending_rotx_.end(), "SliceReply for an unknown transaction");
  PendingRotx& pend = it->second;
  pend.results[rep.k] = SliceValue{rep.value, rep.vid};
  pend.ds = max_ds(pend.ds, rep.ds);
  ckv_check(pend.remaining > 0, "SliceReply arithmetic underflow");
  if (--pend.remaining == 0) {
    RotxReply out;
    out.op = pend.op;
    out.results = std::move(pend.results);
    out.dsv = dsv_;
    out.ds = std::move(pend.ds);
    out.served = served_at(ctx);
    Address client = pend.client;
    pending_rotx_.erase(it);
    ctx.send(client, std::move(out));
  }
}

}  // namespace causalkv
