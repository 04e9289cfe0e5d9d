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

#include "causalkv/client.hpp"

#include <algorithm>

#include "causalkv/json_codec.hpp"

namespace causalkv {

const char* client_op_kind(const sim::ClientOp& op) {
  if (std::holds_alternative<sim::OpGet>(op)) return "get";
  if (std::holds_alternative<sim::OpPut>(op)) return "put";
  return "rotx";
}

nlohmann::json client_op_payload(const sim::ClientOp& op) {
  nlohmann::json j;
  j["kind"] = client_op_kind(op);
  if (const auto* g = std::get_if<sim::OpGet>(&op)) {
    j["key"] = g->k;
  } else if (const auto* p = std::get_if<sim::OpPut>(&op)) {
    j["key"] = p->k;
  } else {
    j["keys"] = std::get<sim::OpRotx>(op).keys;
  }
  return j;
}

ClientNodeBase::ClientNodeBase(int id, ReplicaId home,
                               std::unique_ptr<sim::ClientDriver> driver)
    : id_(id), home_(home), driver_(std::move(driver)) {}

void ClientNodeBase::on_begin(sim::Context& ctx) { proceed(driver_->start(ctx.rng()), ctx); }

void ClientNodeBase::proceed(std::optional<sim::ClientDriver::Next> nx, sim::Context& ctx) {
  if (!nx) {
    ctx.client_done();
    return;
  }
  if (nx->delay <= 0) {
    start_op(std::move(nx->op), ctx);
    return;
  }
  staged_ = std::move(nx->op);
  ctx.schedule_wakeup(ctx.now() + nx->delay, 0);
}

void ClientNodeBase::on_wakeup(std::uint64_t token, sim::Context& ctx) {
  ckv_check(token == 0 && staged_.has_value(), "client woke with no staged operation");
  sim::ClientOp op = std::move(*staged_);
  staged_.reset();
  start_op(std::move(op), ctx);
}

void ClientNodeBase::start_op(sim::ClientOp op, sim::Context& ctx) {
  ckv_check(!inflight_.has_value(), "client issued an operation while one is in flight");
  ref_ = OpRef{id_, next_index_++};
  started_ = ctx.now();
  inflight_ = op;

  nlohmann::json p = client_op_payload(op);
  p["ref"] = ref_.str();
  p["client"] = id_;
  p["idx"] = ref_.index;
  ctx.trace("op-start", std::move(p));
  ctx.op_started();
  issue(*inflight_, ref_, ctx);
}

void ClientNodeBase::complete(sim::OpOutcome outcome, nlohmann::json extras, sim::Context& ctx) {
  ckv_check(inflight_.has_value(), "completion with no operation in flight");
  outcome.op = *inflight_;
  outcome.ref = ref_;
  outcome.started = started_;
  outcome.ended = ctx.now();
  inflight_.reset();

  nlohmann::json p = client_op_payload(outcome.op);
  p["ref"] = outcome.ref.str();
  p["client"] = id_;
  p["idx"] = outcome.ref.index;
  p["home"] = home_;
  p["lat_us"] = outcome.ended - outcome.started;
  for (auto& [k, v] : extras.items()) p[k] = std::move(v);
  ctx.trace("op-end", std::move(p));
  ctx.op_ended();

  proceed(driver_->next(outcome, ctx.rng()), ctx);
}

Client::Client(int id, ReplicaId home, int replicas,
                             std::unique_ptr<sim::ClientDriver> driver)
    : ClientNodeBase(id, home, std::move(driver)), session_(id, home, replicas) {}

void Client::issue(const sim::ClientOp& op, OpRef ref, sim::Context& ctx) {
  session_.require_home(home_);
  if (const auto* g = std::get_if<sim::OpGet>(&op)) {
    ctx.send(Address::server(home_, ctx.partition_of(g->k)), GetReq{ref, g->k, session_.dsv});
  } else if (const auto* p = std::get_if<sim::OpPut>(&op)) {
    sent_put_ds_ = session_.ds;
    ctx.send(Address::server(home_, ctx.partition_of(p->k)),
             PutReq{ref, p->k, p->v, session_.ds});
  } else {
    const auto& rx = std::get<sim::OpRotx>(op);
    ckv_check(!rx.keys.empty(), "rotx requires a non-empty key set");
    std::vector<Key> keys = rx.keys;
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    PartitionId coord = ctx.partition_of(keys[0]);
    for (const auto& k : keys) coord = std::min(coord, ctx.partition_of(k));
    ctx.send(Address::server(home_, coord), Rotx{ref, std::move(keys), session_.dsv, session_.ds});
  }
}

void Client::on_message(const Envelope& env, sim::Context& ctx) {
  if (const auto* rep = std::get_if<GetReply>(&env.payload)) {
    ckv_check(rep->op == inflight_ref(), "reply does not match the in-flight operation");
    session_.fold_dsv(rep->dsv);
    session_.fold_ds(rep->ds);
    sim::OpOutcome out;
    out.value = rep->value;
    out.vid = rep->vid;
    nlohmann::json extras{{"srv_t", rep->served.t}, {"srv_seq", rep->served.seq}};
    extras["ret"] = rep->vid ? nlohmann::json(*rep->vid) : nlohmann::json(nullptr);
    extras["value"] = rep->value ? nlohmann::json(*rep->value) : nlohmann::json(nullptr);
    complete(std::move(out), std::move(extras), ctx);
  } else if (const auto* rep2 = std::get_if<PutReply>(&env.payload)) {
    ckv_check(rep2->op == inflight_ref(), "reply does not match the in-flight operation");
    session_.fold_ds(DependencySet::single(rep2->sr, rep2->ut));
    sim::OpOutcome out;
    out.vid = VersionId{rep2->ut, rep2->sr};
    nlohmann::json extras{{"ut", hlc_encode(rep2->ut)},
                          {"sr", rep2->sr},
                          {"ds", sent_put_ds_},
                          {"srv_t", rep2->served.t},
                          {"srv_seq", rep2->served.seq},
                          {"waited_us", 0}};
    complete(std::move(out), std::move(extras), ctx);
  } else if (const auto* rep3 = std::get_if<RotxReply>(&env.payload)) {
    ckv_check(rep3->op == inflight_ref(), "reply does not match the in-flight operation");
    session_.fold_dsv(rep3->dsv);
    session_.fold_ds(rep3->ds);
    sim::OpOutcome out;
    out.results = rep3->results;
    nlohmann::json ret = nlohmann::json::object();
    nlohmann::json vals = nlohmann::json::object();
    for (const auto& [k, sv] : rep3->results) {
      ret[k] = sv.vid ? nlohmann::json(*sv.vid) : nlohmann::json(nullptr);
      vals[k] = sv.value ? nlohmann::json(*sv.value) : nlohmann::json(nullptr);
    }
    nlohmann::json extras{{"ret", std::move(ret)},
                          {"values", std::move(vals)},
                          {"srv_t", rep3->served.t},
                          {"srv_seq", rep3->served.seq},
                          {"waited_us", 0}};
    complete(std::move(out), std::move(extras), ctx);
  } else {
    throw FatalError("client received a message of the wrong protocol");
  }
}

}  // namespace causalkv
