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

#include "causalkv/sim.hpp"

#include <algorithm>
#include <sstream>

#include "causalkv/json_codec.hpp"

namespace causalkv::sim {

const char* protocol_name(Protocol p) {
  return p == Protocol::CausalKv ? "causalkv" : "gentlerain";
}

void SimConfig::validate() const {
  ckv_check(replicas >= 1, "config: replicas must be >= 1");
  ckv_check(partitions >= 1, "config: partitions must be >= 1");
  ckv_check(intra_dc_ms >= 0, "config: intra_dc_ms must be >= 0");
  ckv_check(theta_ms > 0 && delta_ms > 0, "config: theta/delta must be > 0");
  if (!skew_ms.empty()) {
    ckv_check(skew_ms.size() == static_cast<std::size_t>(replicas),
              "config: skew_ms must have one row per replica");
    for (const auto& row : skew_ms)
      ckv_check(row.size() == static_cast<std::size_t>(partitions),
                "config: skew_ms row must have one entry per partition");
  }
  for (const auto& [pair, spec] : links) {
    ckv_check(pair.first >= 0 && pair.second < replicas && pair.first < pair.second,
              "config: link pair out of range");
    ckv_check(spec.one_way_ms >= 0 && spec.jitter_ms >= 0, "config: link latencies must be >= 0");
  }
  ckv_check(default_link.one_way_ms >= 0 && default_link.jitter_ms >= 0,
            "config: default link latency must be >= 0");
  for (const auto& c : cuts) {
    ckv_check(c.a != c.b, "config: cuts only exist between data centers");
    ckv_check(c.a >= 0 && c.a < replicas && c.b >= 0 && c.b < replicas,
              "config: cut replica out of range");
    ckv_check(c.from_ms >= 0 && c.to_ms > c.from_ms, "config: cut window malformed");
  }
  for (const auto& s : slow) {
    ckv_check(s.replica >= 0 && s.replica < replicas && s.partition >= 0 &&
                  s.partition < partitions,
              "config: slow partition out of range");
    ckv_check(s.send_delay_ms >= 0, "config: send delay must be >= 0");
  }
}

double SimConfig::skew_of(ReplicaId m, PartitionId n) const {
  if (skew_ms.empty()) return 0.0;
  return skew_ms[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
}

const LinkSpec& SimConfig::link(ReplicaId a, ReplicaId b) const {
  auto key = std::make_pair(static_cast<int>(std::min(a, b)), static_cast<int>(std::max(a, b)));
  auto it = links.find(key);
  return it == links.end() ? default_link : it->second;
}

double SimConfig::max_one_way_ms() const {
  double mx = std::max(intra_dc_ms, default_link.one_way_ms + default_link.jitter_ms);
  for (const auto& [pair, spec] : links) mx = std::max(mx, spec.one_way_ms + spec.jitter_ms);
  for (const auto& s : slow) mx = std::max(mx, s.send_delay_ms + intra_dc_ms);
  return mx;
}

double SimConfig::skew_spread_ms() const {
  if (skew_ms.empty()) return 0.0;
  double lo = 0.0, hi = 0.0;
  for (const auto& row : skew_ms)
    for (double s : row) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  return hi - lo;
}

nlohmann::json SimConfig::to_json() const {
  nlohmann::json j;
  j["replicas"] = replicas;
  j["partitions"] = partitions;
  j["skew_ms"] = skew_ms;
  nlohmann::json ls = nlohmann::json::array();
  for (const auto& [pair, spec] : links)
    ls.push_back({{"a", pair.first},
                  {"b", pair.second},
                  {"one_way_ms", spec.one_way_ms},
                  {"jitter_ms", spec.jitter_ms}});
  j["links"] = std::move(ls);
  j["default_link"] = {{"one_way_ms", default_link.one_way_ms},
                       {"jitter_ms", default_link.jitter_ms}};
  j["intra_dc_ms"] = intra_dc_ms;
  j["theta_ms"] = theta_ms;
  j["delta_ms"] = delta_ms;
  j["seed"] = seed;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : cuts)
    cs.push_back({{"a", c.a}, {"b", c.b}, {"from_ms", c.from_ms}, {"to_ms", c.to_ms}});
  j["cuts"] = std::move(cs);
  nlohmann::json ss = nlohmann::json::array();
  for (const auto& s : slow)
    ss.push_back({{"replica", s.replica},
                  {"partition", s.partition},
                  {"send_delay_ms", s.send_delay_ms}});
  j["slow"] = std::move(ss);
  return j;
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
  SimConfig c;
  c.replicas = j.value("replicas", 1);
  c.partitions = j.value("partitions", 1);
  if (j.contains("skew_ms")) c.skew_ms = j.at("skew_ms").get<std::vector<std::vector<double>>>();
  if (j.contains("links")) {
    for (const auto& l : j.at("links")) {
      int a = l.at("a").get<int>(), b = l.at("b").get<int>();
      LinkSpec spec{l.value("one_way_ms", 40.0), l.value("jitter_ms", 0.0)};
      c.links[{std::min(a, b), std::max(a, b)}] = spec;
    }
  }
  if (j.contains("default_link")) {
    c.default_link.one_way_ms = j.at("default_link").value("one_way_ms", 40.0);
    c.default_link.jitter_ms = j.at("default_link").value("jitter_ms", 0.0);
  }
  c.intra_dc_ms = j.value("intra_dc_ms", 0.5);
  c.theta_ms = j.value("theta_ms", 5.0);
  c.delta_ms = j.value("delta_ms", 10.0);
  c.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("cuts")) {
    for (const auto& e : j.at("cuts"))
      c.cuts.push_back({e.at("a").get<ReplicaId>(), e.at("b").get<ReplicaId>(),
                        e.at("from_ms").get<double>(), e.at("to_ms").get<double>()});
  }
  if (j.contains("slow")) {
    for (const auto& e : j.at("slow"))
      c.slow.push_back({e.at("replica").get<ReplicaId>(), e.at("partition").get<PartitionId>(),
                        e.at("send_delay_ms").get<double>()});
  }
  c.validate();
  return c;
}

nlohmann::json TraceEvent::to_json() const {
  return nlohmann::json{
      {"seq", seq}, {"t", t}, {"kind", kind}, {"actor", actor}, {"payload", payload}};
}

TraceEvent TraceEvent::from_json(const nlohmann::json& j) {
  TraceEvent e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.t = j.at("t").get<Micros>();
  e.kind = j.at("kind").get<std::string>();
  e.actor = j.at("actor").get<std::string>();
  e.payload = j.value("payload", nlohmann::json());
  return e;
}

std::string trace_to_jsonl(const Trace& t) {
  std::string out;
  for (const auto& e : t) {
    out += e.to_json().dump();
    out += '\n';
  }
  return out;
}

Trace trace_from_jsonl(const std::string& text) {
  Trace t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.push_back(TraceEvent::from_json(nlohmann::json::parse(line)));
  }
  return t;
}

void NodeStats::merge(const NodeStats& o) {
  max_c = std::max(max_c, o.max_c);
  max_l_minus_pt = std::max(max_l_minus_pt, o.max_l_minus_pt);
  puts_deferred += o.puts_deferred;
  put_wait_total += o.put_wait_total;
  rotx_parked += o.rotx_parked;
  rotx_wait_total += o.rotx_wait_total;
}

void Node::on_timer(TimerKind, std::int64_t, Context&) {
  throw FatalError("node received a timer it does not handle");
}
void Node::on_wakeup(std::uint64_t, Context&) {
  throw FatalError("node received a wakeup it never scheduled");
}
void Node::on_begin(Context&) {}

int Workload::chain_after(int) const { return -1; }

// ---- Context ----------------------------------------------------------------

Micros Context::now() const { return eng_.now_; }

Ticks Context::pc_ticks() const {
  Micros pc = eng_.now_ + eng_.skew_us(self_);
  if (pc < 0) pc = 0;
  return pc / kMicrosPerTick;
}

int Context::replicas() const { return eng_.cfg_.replicas; }
int Context::partitions() const { return eng_.cfg_.partitions; }
Micros Context::theta_us() const { return ms_to_us(eng_.cfg_.theta_ms); }
Micros Context::delta_us() const { return ms_to_us(eng_.cfg_.delta_ms); }

PartitionId Context::partition_of(const Key& k) const {
  return partition_for_key(k, eng_.cfg_.partitions);
}

Micros Context::when_pc_reaches(Ticks tick) const {
  Micros t = tick * kMicrosPerTick - eng_.skew_us(self_);
  return std::max(t, eng_.now_);
}

void Context::send(const Address& dst, Message msg) { eng_.send_from(self_, dst, std::move(msg)); }

void Context::trace(const char* kind, nlohmann::json payload) {
  eng_.emit(kind, self_.str(), std::move(payload));
}

void Context::schedule_wakeup(Micros at, std::uint64_t token) {
  ckv_check(at >= eng_.now_, "wakeup scheduled in the past");
  Engine::Ev ev;
  ev.t = at;
  ev.type = 2;
  ev.addr = self_;
  ev.token = token;
  eng_.push(std::move(ev));
}

std::uint64_t Context::next_event_seq() const { return eng_.next_trace_seq_; }

Rng& Context::rng() {
  ckv_check(!self_.is_server(), "per-actor rng is only provided to clients");
  return eng_.client_rng_[static_cast<std::size_t>(self_.client_id())];
}

void Context::op_started() {
  ++eng_.pending_ops_;
  eng_.last_activity_ = eng_.now_;
}

void Context::op_ended() {
  --eng_.pending_ops_;
  eng_.last_activity_ = eng_.now_;
}

void Context::client_done() {
  int id = self_.client_id();
  for (std::size_t j = 0; j < eng_.client_chain_.size(); ++j) {
    if (eng_.client_chain_[j] == id) {
      Engine::Ev ev;
      ev.t = eng_.now_;
      ev.type = 3;
      ev.addr = Address::client(static_cast<int>(j));
      eng_.push(std::move(ev));
    }
  }
}

// ---- Engine -----------------------------------------------------------------

Engine::Engine(SimConfig cfg, Protocol proto) : cfg_(std::move(cfg)), proto_(proto) {
  cfg_.validate();
  drain_margin_ = 2 * (ms_to_us(cfg_.theta_ms) + ms_to_us(cfg_.delta_ms)) +
                  3 * ms_to_us(cfg_.max_one_way_ms()) + 2 * kMicrosPerTick;
}

void Engine::add_server(std::unique_ptr<Node> node) { servers_.push_back(std::move(node)); }

void Engine::add_client(std::unique_ptr<Node> node, ReplicaId home, int chain_after) {
  int id = static_cast<int>(clients_.size());
  clients_.push_back(std::move(node));
  client_home_.push_back(home);
  client_chain_.push_back(chain_after);
  client_rng_.push_back(substream(cfg_.seed, 0x0C11E27, static_cast<std::uint64_t>(id)));
}

void Engine::push(Ev ev) {
  ckv_check(ev.t >= 0, "event scheduled at negative time");
  ev.seq = next_seq_++;
  q_.push(std::move(ev));
}

Micros Engine::skew_us(const Address& a) const {
  if (!a.is_server()) return 0;
  return ms_to_us(cfg_.skew_of(a.replica(), a.partition()));
}

Micros Engine::send_delay_us(const Address& a) const {
  if (!a.is_server()) return 0;
  for (const auto& s : cfg_.slow) {
    if (s.replica == a.replica() && s.partition == a.partition()) return ms_to_us(s.send_delay_ms);
  }
  return 0;
}

Node* Engine::node_at(const Address& a) {
  if (a.is_server()) {
    std::size_t idx = static_cast<std::size_t>(a.replica()) *
                          static_cast<std::size_t>(cfg_.partitions) +
                      static_cast<std::size_t>(a.partition());
    ckv_check(idx < servers_.size(), "message addressed to unknown server");
    return servers_[idx].get();
  }
  std::size_t idx = static_cast<std::size_t>(a.client_id());
  ckv_check(idx < clients_.size(), "message addressed to unknown client");
  return clients_[idx].get();
}

Micros Engine::arrival_time(const Address& src, const Address& dst, Micros eff_send) {
  Micros lat = 0;
  bool inter = src.is_server() && dst.is_server() && src.replica() != dst.replica();
  if (src == dst) {
    lat = 0;  // self-addressed: local call, still traced
  } else if (!inter) {
    lat = ms_to_us(cfg_.intra_dc_ms);
  } else {
    const LinkSpec& spec = cfg_.link(src.replica(), dst.replica());
    lat = ms_to_us(spec.one_way_ms);
    if (spec.jitter_ms > 0) {
      auto key = std::make_pair(static_cast<int>(src.replica()), static_cast<int>(dst.replica()));
      auto it = link_rng_.find(key);
      if (it == link_rng_.end()) {
        it = link_rng_
                 .emplace(key, substream(cfg_.seed, 0x11A4,
                                         static_cast<std::uint64_t>(key.first),
                                         static_cast<std::uint64_t>(key.second)))
                 .first;
      }
      lat += static_cast<Micros>(it->second.real() * spec.jitter_ms * 1000.0);
    }
  }
  Micros arr = eff_send + lat;
  if (inter) {
    // A message on the wire during a cut is held until the link heals.
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& c : cfg_.cuts) {
        if ((c.a == src.replica() && c.b == dst.replica()) ||
            (c.b == src.replica() && c.a == dst.replica())) {
          Micros f = ms_to_us(c.from_ms), t = ms_to_us(c.to_ms);
          if (eff_send < t && arr >= f && arr < t) {
            arr = t;
            changed = true;
          }
        }
      }
    }
  }
  // FIFO per ordered pair: never schedule ahead of an earlier send.
  auto key = std::make_pair(src, dst);
  auto it = fifo_last_.find(key);
  if (it != fifo_last_.end() && it->second > arr) arr = it->second;
  fifo_last_[key] = arr;
  return arr;
}

void Engine::send_from(const Address& src, const Address& dst, Message msg) {
  Envelope env;
  env.msg_seq = next_msg_seq_++;
  env.src = src;
  env.dst = dst;
  env.send_t = now_;
  env.payload = std::move(msg);

  nlohmann::json p = message_trace_summary(env.payload);
  p["ms"] = env.msg_seq;
  p["to"] = dst.str();
  emit("msg-send", src.str(), std::move(p));
  ++msgs_sent_;

  Micros eff = now_ + (src == dst ? 0 : send_delay_us(src));  // self-sends are local calls
  Ev ev;
  ev.t = arrival_time(src, dst, eff);
  ev.type = 0;
  ev.env = std::move(env);
  push(std::move(ev));
}

void Engine::emit(const char* kind, const std::string& actor, nlohmann::json payload) {
  TraceEvent e;
  e.seq = next_trace_seq_++;
  e.t = now_;
  e.kind = kind;
  e.actor = actor;
  e.payload = std::move(payload);
  trace_.push_back(std::move(e));
}

bool Engine::keep_timers(Micros next_fire) const {
  return pending_ops_ > 0 || next_fire <= last_activity_ + drain_margin_;
}

void Engine::dispatch(const Ev& ev) {
  switch (ev.type) {
    case 0: {  // deliver
      const Address& dst = ev.env.dst;
      Node* n = node_at(dst);
      Context ctx(*this, dst);
      nlohmann::json p = message_trace_summary(ev.env.payload);
      p["ms"] = ev.env.msg_seq;
      p["from"] = ev.env.src.str();
      cur_actor_ = dst;
      emit("msg-recv", dst.str(), std::move(p));
      if (!message_is_periodic(ev.env.payload)) last_activity_ = now_;
      n->on_message(ev.env, ctx);
      break;
    }
    case 1: {  // timer
      Node* n = node_at(ev.addr);
      Context ctx(*this, ev.addr);
      cur_actor_ = ev.addr;
      emit("timer", ev.addr.str(),
           {{"kind", ev.timer == TimerKind::Heartbeat ? "heartbeat" : "stable-round"},
            {"round", ev.round}});
      n->on_timer(ev.timer, ev.round, ctx);
      Micros period =
          ev.timer == TimerKind::Heartbeat ? ms_to_us(cfg_.delta_ms) : ms_to_us(cfg_.theta_ms);
      if (keep_timers(ev.t + period)) {
        Ev nxt;
        nxt.t = ev.t + period;
        nxt.type = 1;
        nxt.addr = ev.addr;
        nxt.timer = ev.timer;
        nxt.round = ev.round + 1;
        push(std::move(nxt));
      }
      break;
    }
    case 2: {  // wakeup
      Node* n = node_at(ev.addr);
      Context ctx(*this, ev.addr);
      cur_actor_ = ev.addr;
      n->on_wakeup(ev.token, ctx);
      break;
    }
    case 3: {  // client begin
      Node* n = node_at(ev.addr);
      Context ctx(*this, ev.addr);
      cur_actor_ = ev.addr;
      n->on_begin(ctx);
      break;
    }
    default:
      throw FatalError("unknown event type");
  }
}

RunResult Engine::run() {
  ckv_check(servers_.size() ==
                static_cast<std::size_t>(cfg_.replicas) * static_cast<std::size_t>(cfg_.partitions),
            "engine: wrong number of servers for the configured grid");

  emit("state-assert", "sim",
       {{"what", "run-config"},
        {"protocol", protocol_name(proto_)},
        {"config", cfg_.to_json()}});

  for (int m = 0; m < cfg_.replicas; ++m) {
    for (int n = 0; n < cfg_.partitions; ++n) {
      Ev hb;
      hb.t = ms_to_us(cfg_.delta_ms);
      hb.type = 1;
      hb.addr = Address::server(m, n);
      hb.timer = TimerKind::Heartbeat;
      hb.round = 1;
      push(std::move(hb));
      Ev sr;
      sr.t = ms_to_us(cfg_.theta_ms);
      sr.type = 1;
      sr.addr = Address::server(m, n);
      sr.timer = TimerKind::StableRound;
      sr.round = 1;
      push(std::move(sr));
    }
  }
  for (std::size_t i = 0; i < clients_.size(); ++i) {
    if (client_chain_[i] >= 0) continue;
    Ev ev;
    ev.t = static_cast<Micros>(i) * 100;  // slight stagger
    ev.type = 3;
    ev.addr = Address::client(static_cast<int>(i));
    push(std::move(ev));
  }

  while (!q_.empty()) {
    Ev ev = q_.top();
    q_.pop();
    ckv_check(ev.t >= now_, "event queue went backwards");
    now_ = ev.t;
    dispatch(ev);
  }
  ckv_check(pending_ops_ == 0, "run ended with operations still pending");

  RunResult res;
  res.final_stores = nlohmann::json::object();
  for (int m = 0; m < cfg_.replicas; ++m) {
    for (int n = 0; n < cfg_.partitions; ++n) {
      Address a = Address::server(m, n);
      Node* node = node_at(a);
      nlohmann::json dump = node->store_dump();
      emit("state-assert", a.str(), {{"what", "store-dump"}, {"store", dump}});
      res.final_stores[a.str()] = std::move(dump);
      res.stats.nodes.merge(node->node_stats());
    }
  }
  res.stats.messages_sent = msgs_sent_;
  res.stats.end_time = now_;
  res.trace = std::move(trace_);
  return res;
}

}  // namespace causalkv::sim
