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

#include "causalkv/gentlerain.hpp"

#include <algorithm>

#include "causalkv/json_codec.hpp"

namespace causalkv::gr {

GrPartition::GrPartition(ReplicaId m, PartitionId n, int replicas)
    : m_(m), n_(n), vv_(static_cast<std::size_t>(replicas)) {}

HlcTimestamp GrPartition::bump_clock(Ticks pc) {
  std::uint64_t p = static_cast<std::uint64_t>(pc);
  if (p > clock_.l) {
    clock_.l = p;
    clock_.c = 0;
  } else {
    ckv_check(clock_.c < kHlcMaxC, "per-server sequence breaker overflow");
    clock_.c += 1;
  }
  stats_.max_c = std::max(stats_.max_c, clock_.c);
  return clock_;
}

void GrPartition::on_message(const Envelope& env, sim::Context& ctx) {
  std::visit(
      [&](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, GrPutReq>) {
          handle_put(msg, env.src, ctx);
        } else if constexpr (std::is_same_v<T, GrGetReq>) {
          handle_get(msg, env.src, ctx);
        } else if constexpr (std::is_same_v<T, GrReplicate>) {
          ReplicaId k = env.src.replica();
          ckv_check(env.src.is_server() && k != m_ && env.src.partition() == n_,
                    "GrReplicate must come from the peer partition of another replica");
          ckv_check(msg.ver.ut > vv_[static_cast<std::size_t>(k)],
                    "GrReplicate delivered out of FIFO order");
          store_.insert(msg.ver);
          vv_.set(static_cast<std::size_t>(k), msg.ver.ut);
        } else if constexpr (std::is_same_v<T, GrHeartbeat>) {
          ReplicaId k = env.src.replica();
          ckv_check(env.src.is_server() && k != m_ && env.src.partition() == n_,
                    "GrHeartbeat must come from the peer partition of another replica");
          ckv_check(msg.ts > vv_[static_cast<std::size_t>(k)],
                    "GrHeartbeat delivered out of FIFO order");
          vv_.set(static_cast<std::size_t>(k), msg.ts);
        } else if constexpr (std::is_same_v<T, GrGstShare>) {
          ckv_check(n_ == 0, "GrGstShare sent to a non-coordinator partition");
          auto& [mn, count] = rounds_[msg.round];
          if (count == 0) {
            mn = msg.local_min;
          } else {
            mn = hlc_min(mn, msg.local_min);
          }
          if (++count == ctx.partitions()) {
            HlcTimestamp g = mn;
            std::int64_t round = msg.round;
            rounds_.erase(round);
            for (int j = 0; j < ctx.partitions(); ++j) {
              ctx.send(Address::server(m_, j), GrGstInstall{round, g});
            }
          }
        } else if constexpr (std::is_same_v<T, GrGstInstall>) {
          raise_gst(msg.gst, ctx);
        } else if constexpr (std::is_same_v<T, GrRotx>) {
          handle_rotx(msg, env.src, ctx);
        } else if constexpr (std::is_same_v<T, GrSliceReq>) {
          handle_slice(msg, env.src, ctx);
        } else if constexpr (std::is_same_v<T, GrSliceReply>) {
          handle_slice_reply(msg, ctx);
        } else {
          throw FatalError("baseline partition received a message of the wrong protocol");
        }
      },
      env.payload);
}

void GrPartition::handle_put(const GrPutReq& req, const Address& from, sim::Context& ctx) {
  ckv_check(ctx.partition_of(req.k) == n_, "GrPutReq routed to a partition not hosting the key");
  // dt == <0,0> is the fresh-session sentinel: nothing read or written yet,
  // so there is no timestamp to dominate.
  if (req.dt == HlcTimestamp{} || ctx.pc_ticks() > static_cast<Ticks>(req.dt.l)) {
    complete_put(req, from, 0, ctx);
    return;
  }
  // The new version's timestamp must exceed every timestamp the client has
  // seen; with a lagging clock that means sitting the skew out.
  Micros wake = ctx.when_pc_reaches(static_cast<Ticks>(req.dt.l) + 1);
  Micros wait = wake - ctx.now();
  ++stats_.puts_deferred;
  stats_.put_wait_total += wait;
  ctx.trace("put-deferred",
            {{"op", "put"}, {"ref", req.op.str()}, {"wait_us", wait}, {"dt", hlc_encode(req.dt)}});
  std::uint64_t token = next_token_++;
  parked_puts_.emplace(token, ParkedPut{req, from, ctx.now()});
  ctx.schedule_wakeup(wake, token);
}

void GrPartition::on_wakeup(std::uint64_t token, sim::Context& ctx) {
  auto it = parked_puts_.find(token);
  ckv_check(it != parked_puts_.end(), "wakeup for an unknown parked write");
  ParkedPut parked = std::move(it->second);
  parked_puts_.erase(it);
  ckv_check(ctx.pc_ticks() > static_cast<Ticks>(parked.req.dt.l),
            "parked write woke before its clock condition held");
  complete_put(parked.req, parked.from, ctx.now() - parked.arrived, ctx);
}

void GrPartition::complete_put(const GrPutReq& req, const Address& from, Micros waited,
                               sim::Context& ctx) {
  HlcTimestamp ut = bump_clock(ctx.pc_ticks());
  ckv_check(ut > req.dt, "assigned timestamp does not dominate the dependency");
  vv_.set(static_cast<std::size_t>(m_), clock_);

  Version d;
  d.k = req.k;
  d.v = req.v;
  d.ut = ut;
  d.sr = m_;
  store_.insert(d);

  GrPutReply rep;
  rep.op = req.op;
  rep.ut = ut;
  rep.sr = m_;
  rep.served = ServedAt{ctx.now(), ctx.next_event_seq()};
  rep.waited = waited;
  ctx.send(from, std::move(rep));

  for (int k = 0; k < ctx.replicas(); ++k) {
    if (k == m_) continue;
    ctx.send(Address::server(k, n_), GrReplicate{d});
  }
  if (ctx.replicas() > 1) {
    last_replicate_sent_ = ctx.now();
    replicated_since_epoch_ = true;
  }
}

void GrPartition::handle_get(const GrGetReq& req, const Address& from, sim::Context& ctx) {
  ckv_check(ctx.partition_of(req.k) == n_, "GrGetReq routed to a partition not hosting the key");
  raise_gst(req.gst, ctx);

  GrGetReply rep;
  rep.op = req.op;
  const Version* d = store_.read_filtered(
      req.k, [&](const Version& v) { return v.sr == m_ || v.ut <= gst_; });
  if (d != nullptr) {
    rep.value = d->v;
    rep.vid = d->id();
  }
  rep.gst = gst_;
  rep.served = ServedAt{ctx.now(), ctx.next_event_seq()};
  ctx.send(from, std::move(rep));
}

void GrPartition::raise_gst(HlcTimestamp candidate, sim::Context& ctx) {
  if (!(candidate > gst_)) return;
  gst_ = candidate;
  ctx.trace("state-assert", {{"what", "gst"}, {"v", hlc_encode(gst_)}});
  // Stable time moved: any transaction parked on it may now proceed, in
  // arrival order.
  std::deque<ParkedRotx> still_parked;
  std::deque<ParkedRotx> ready;
  for (auto& p : parked_rotx_) {
    (p.req.dt <= gst_ ? ready : still_parked).push_back(std::move(p));
  }
  parked_rotx_ = std::move(still_parked);
  for (auto& p : ready) launch_rotx(p.req, p.from, p.arrived, ctx);
}

void GrPartition::handle_rotx(const GrRotx& req, const Address& from, sim::Context& ctx) {
  ckv_check(!req.keys.empty(), "GrRotx with an empty key set");
  bool hosts_one = false;
  for (const auto& k : req.keys) hosts_one = hosts_one || ctx.partition_of(k) == n_;
  ckv_check(hosts_one, "GrRotx coordinator must host at least one requested key");
  raise_gst(req.gst, ctx);

  if (gst_ >= req.dt) {
    launch_rotx(req, from, ctx.now(), ctx);
    return;
  }
  ++stats_.rotx_parked;
  ctx.trace("put-deferred",
            {{"op", "rotx"}, {"ref", req.op.str()}, {"dt", hlc_encode(req.dt)}});
  parked_rotx_.push_back(ParkedRotx{req, from, ctx.now()});
}

void GrPartition::launch_rotx(const GrRotx& req, const Address& from, Micros arrived,
                              sim::Context& ctx) {
  Micros waited = ctx.now() - arrived;
  stats_.rotx_wait_total += waited;
  PendingRotx pend;
  pend.client = from;
  pend.op = req.op;
  pend.remaining = req.keys.size();
  pend.waited = waited;
  ckv_check(pending_rotx_.emplace(req.op, std::move(pend)).second,
            "duplicate transaction id at coordinator");
  HlcTimestamp snapshot = gst_;
  for (const auto& k : req.keys) {
    ctx.send(Address::server(m_, ctx.partition_of(k)), GrSliceReq{req.op, k, snapshot});
  }
}

void GrPartition::handle_slice(const GrSliceReq& req, const Address& from, sim::Context& ctx) {
  ckv_check(ctx.partition_of(req.k) == n_,
            "GrSliceReq routed to a partition not hosting the key");
  GrSliceReply rep;
  rep.txn = req.txn;
  rep.k = req.k;
  // Snapshot read: no local exemption, only versions at or below the
  // snapshot time.
  const Version* d =
      store_.read_filtered(req.k, [&](const Version& v) { return v.ut <= req.snapshot; });
  if (d != nullptr) {
    rep.value = d->v;
    rep.vid = d->id();
  }
  ctx.send(from, std::move(rep));
}

void GrPartition::handle_slice_reply(const GrSliceReply& rep, sim::Context& ctx) {
  auto it = pending_rotx_.find(rep.txn);
  ckv_check(it != pending_rotx_.end(), "GrSliceReply for an unknown transaction");
  PendingRotx& pend = it->second;
  pend.results[rep.k] = SliceValue{rep.value, rep.vid};
  ckv_check(pend.remaining > 0, "GrSliceReply arithmetic underflow");
  if (--pend.remaining == 0) {
    GrRotxReply out;
    out.op = pend.op;
    out.results = std::move(pend.results);
    out.gst = gst_;
    out.served = ServedAt{ctx.now(), ctx.next_event_seq()};
    out.waited = pend.waited;
    Address client = pend.client;
    pending_rotx_.erase(it);
    ctx.send(client, std::move(out));
  }
}

void GrPartition::on_timer(sim::TimerKind kind, std::int64_t round, sim::Context& ctx) {
  if (kind == sim::TimerKind::Heartbeat) {
    bool idle =
        !replicated_since_epoch_ || ctx.now() - last_replicate_sent_ >= ctx.delta_us();
    if (!idle) return;
    bump_clock(ctx.pc_ticks());
    vv_.set(static_cast<std::size_t>(m_), clock_);
    for (int k = 0; k < ctx.replicas(); ++k) {
      if (k == m_) continue;
      ctx.send(Address::server(k, n_), GrHeartbeat{clock_});
    }
    return;
  }
  if (kind == sim::TimerKind::StableRound) {
    HlcTimestamp local_min = vv_[0];
    for (std::size_t i = 1; i < vv_.size(); ++i) local_min = hlc_min(local_min, vv_[i]);
    ctx.send(Address::server(m_, 0), GrGstShare{round, local_min});
  }
}

GrClient::GrClient(int id, ReplicaId home, std::unique_ptr<sim::ClientDriver> driver)
    : ClientNodeBase(id, home, std::move(driver)) {}

void GrClient::issue(const sim::ClientOp& op, OpRef ref, sim::Context& ctx) {
  if (const auto* g = std::get_if<sim::OpGet>(&op)) {
    ctx.send(Address::server(home_, ctx.partition_of(g->k)), GrGetReq{ref, g->k, gst_});
  } else if (const auto* p = std::get_if<sim::OpPut>(&op)) {
    ctx.send(Address::server(home_, ctx.partition_of(p->k)), GrPutReq{ref, p->k, p->v, dt_});
  } else {
    const auto& rx = std::get<sim::OpRotx>(op);
    ckv_check(!rx.keys.empty(), "rotx requires a non-empty key set");
    std::vector<Key> keys = rx.keys;
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    PartitionId coord = ctx.partition_of(keys[0]);
    for (const auto& k : keys) coord = std::min(coord, ctx.partition_of(k));
    ctx.send(Address::server(home_, coord), GrRotx{ref, std::move(keys), dt_, gst_});
  }
}

void GrClient::on_message(const Envelope& env, sim::Context& ctx) {
  if (const auto* rep = std::get_if<GrGetReply>(&env.payload)) {
    ckv_check(rep->op == inflight_ref(), "reply does not match the in-flight operation");
    gst_ = hlc_max(gst_, rep->gst);
    if (rep->vid) dt_ = hlc_max(dt_, rep->vid->ut);
    sim::OpOutcome out;
    out.value = rep->value;
    out.vid = rep->vid;
    nlohmann::json extras{{"srv_t", rep->served.t}, {"srv_seq", rep->served.seq}};
    extras["ret"] = rep->vid ? nlohmann::json(*rep->vid) : nlohmann::json(nullptr);
    extras["value"] = rep->value ? nlohmann::json(*rep->value) : nlohmann::json(nullptr);
    complete(std::move(out), std::move(extras), ctx);
  } else if (const auto* rep2 = std::get_if<GrPutReply>(&env.payload)) {
    ckv_check(rep2->op == inflight_ref(), "reply does not match the in-flight operation");
    dt_ = hlc_max(dt_, rep2->ut);
    sim::OpOutcome out;
    out.vid = VersionId{rep2->ut, rep2->sr};
    nlohmann::json extras{{"ut", hlc_encode(rep2->ut)},
                          {"sr", rep2->sr},
                          {"ds", DependencySet{}},
                          {"srv_t", rep2->served.t},
                          {"srv_seq", rep2->served.seq},
                          {"waited_us", rep2->waited}};
    complete(std::move(out), std::move(extras), ctx);
  } else if (const auto* rep3 = std::get_if<GrRotxReply>(&env.payload)) {
    ckv_check(rep3->op == inflight_ref(), "reply does not match the in-flight operation");
    gst_ = hlc_max(gst_, rep3->gst);
    sim::OpOutcome out;
    out.results = rep3->results;
    nlohmann::json ret = nlohmann::json::object();
    nlohmann::json vals = nlohmann::json::object();
    for (const auto& [k, sv] : rep3->results) {
      if (sv.vid) dt_ = hlc_max(dt_, sv.vid->ut);
      ret[k] = sv.vid ? nlohmann::json(*sv.vid) : nlohmann::json(nullptr);
      vals[k] = sv.value ? nlohmann::json(*sv.value) : nlohmann::json(nullptr);
    }
    nlohmann::json extras{{"ret", std::move(ret)},
                          {"values", std::move(vals)},
                          {"srv_t", rep3->served.t},
                          {"srv_seq", rep3->served.seq},
                          {"waited_us", rep3->waited}};
    complete(std::move(out), std::move(extras), ctx);
  } else {
    throw FatalError("client received a message of the wrong protocol");
  }
}

}  // namespace causalkv::gr
