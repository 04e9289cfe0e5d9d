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

#include "causalkv/checker.hpp"

#include <algorithm>

#include "causalkv/json_codec.hpp"

namespace causalkv::checker {

namespace {

OpKind kind_from_string(const std::string& s) {
  if (s == "get") return OpKind::Get;
  if (s == "put") return OpKind::Put;
  if (s == "rotx") return OpKind::Rotx;
  throw FatalError("trace: unknown op kind");
}

VersionId vid_from_payload(const nlohmann::json& j) {
  if (j.is_null()) return initial_version_id();
  return j.get<VersionId>();
}

ReplicaId replica_of_actor(const std::string& actor) {
  // "s<m>.<n>"
  ckv_check(actor.size() >= 4 && actor[0] == 's', "trace: expected a server actor");
  return static_cast<ReplicaId>(std::stoi(actor.substr(1, actor.find('.') - 1)));
}

}  // namespace

ParsedTrace parse_trace(const Trace& trace) {
  ParsedTrace t;
  std::map<std::pair<int, int>, std::uint64_t> start_seqs;
  std::map<std::uint64_t, std::size_t> msg_index;

  for (const auto& e : trace) {
    if (e.kind == "op-start") {
      start_seqs[{e.payload.at("client").get<int>(), e.payload.at("idx").get<int>()}] = e.seq;
    } else if (e.kind == "op-end") {
      OpRecord op;
      op.client = e.payload.at("client").get<int>();
      op.index = e.payload.at("idx").get<int>();
      op.kind = kind_from_string(e.payload.at("kind").get<std::string>());
      op.home = e.payload.at("home").get<ReplicaId>();
      op.end_seq = e.seq;
      op.ended = e.t;
      auto sit = start_seqs.find({op.client, op.index});
      ckv_check(sit != start_seqs.end(), "trace: op-end without op-start");
      op.start_seq = sit->second;
      op.started = e.t - e.payload.at("lat_us").get<Micros>();
      op.srv_t = e.payload.value("srv_t", Micros{0});
      op.srv_seq = e.payload.value("srv_seq", std::uint64_t{0});
      op.waited = e.payload.value("waited_us", Micros{0});
      if (op.kind == OpKind::Put) {
        op.key = e.payload.at("key").get<std::string>();
        op.written.ut = hlc_decode(e.payload.at("ut").get<std::uint64_t>());
        op.written.sr = e.payload.at("sr").get<ReplicaId>();
        op.ds = e.payload.at("ds").get<DependencySet>();
      } else if (op.kind == OpKind::Get) {
        op.key = e.payload.at("key").get<std::string>();
        ReadObs obs;
        obs.key = op.key;
        obs.returned = vid_from_payload(e.payload.at("ret"));
        obs.absent = e.payload.at("ret").is_null();
        op.reads.push_back(std::move(obs));
      } else {
        op.keys = e.payload.at("keys").get<std::vector<Key>>();
        for (const auto& [k, r] : e.payload.at("ret").items()) {
          ReadObs obs;
          obs.key = k;
          obs.returned = vid_from_payload(r);
          obs.absent = r.is_null();
          op.reads.push_back(std::move(obs));
        }
      }
      t.ops.push_back(std::move(op));
    } else if (e.kind == "msg-send") {
      MsgRecord m;
      m.msg_seq = e.payload.at("ms").get<std::uint64_t>();
      m.type = e.payload.at("type").get<std::string>();
      m.src = e.actor;
      m.dst = e.payload.at("to").get<std::string>();
      m.send_seq = e.seq;
      if (m.type == "Replicate" || m.type == "GrReplicate") {
        m.ver.ut = hlc_decode(e.payload.at("ut").get<std::uint64_t>());
        m.ver.sr = e.payload.at("sr").get<ReplicaId>();
        m.key = e.payload.at("k").get<std::string>();
      }
      msg_index[m.msg_seq] = t.messages.size();
      t.messages.push_back(std::move(m));
    } else if (e.kind == "msg-recv") {
      auto it = msg_index.find(e.payload.at("ms").get<std::uint64_t>());
      ckv_check(it != msg_index.end(), "trace: msg-recv without msg-send");
      MsgRecord& m = t.messages[it->second];
      ckv_check(!m.received, "trace: message delivered twice");
      m.received = true;
      m.recv_seq = e.seq;
      m.recv_t = e.t;
    } else if (e.kind == "state-assert") {
      const std::string what = e.payload.at("what").get<std::string>();
      if (what == "run-config") {
        const auto& cfg = e.payload.at("config");
        t.replicas = cfg.at("replicas").get<int>();
        t.partitions = cfg.at("partitions").get<int>();
        t.protocol = e.payload.at("protocol").get<std::string>();
        for (const auto& c : cfg.at("cuts"))
          t.cuts.push_back({c.at("a").get<ReplicaId>(), c.at("b").get<ReplicaId>(),
                            c.at("from_ms").get<double>(), c.at("to_ms").get<double>()});
      } else if (what == "dsv") {
        WatermarkEvent w;
        w.actor = e.actor;
        w.seq = e.seq;
        w.dsv = e.payload.at("v").get<std::vector<std::uint64_t>>();
        t.marks.push_back(std::move(w));
      } else if (what == "gst") {
        WatermarkEvent w;
        w.actor = e.actor;
        w.seq = e.seq;
        w.gst = e.payload.at("v").get<std::uint64_t>();
        w.is_gst = true;
        t.marks.push_back(std::move(w));
      } else if (what == "store-dump") {
        t.stores[e.actor] = e.payload.at("store");
      }
    } else if (e.kind == "put-deferred") {
      if (e.payload.at("op").get<std::string>() == "put") {
        ++t.deferred_puts;
      } else {
        ++t.parked_rotx;
      }
    }
  }

  std::sort(t.ops.begin(), t.ops.end(),
            [](const OpRecord& a, const OpRecord& b) { return a.end_seq < b.end_seq; });
  return t;
}

// ---- DependencyGraph --------------------------------------------------------

DependencyGraph::DependencyGraph(const ParsedTrace& t) : t_(&t) {
  n_ = t.ops.size();
  words_ = (n_ + 63) / 64;
  reach_.assign(n_ * words_, 0);

  for (std::size_t i = 0; i < n_; ++i) {
    const OpRecord& op = t.ops[i];
    if (op.kind == OpKind::Put) {
      writes_by_key_[op.key].push_back(i);
      writer_[{op.key, hlc_encode(op.written.ut), op.written.sr}] = i;
    }
  }

  auto add_edge = [&](std::size_t a, std::size_t b) {
    reach_[a * words_ + b / 64] |= (1ULL << (b % 64));
  };

  std::map<int, std::size_t> last_of_client;
  for (std::size_t i = 0; i < n_; ++i) {
    const OpRecord& op = t.ops[i];
    // Session order: one edge per consecutive pair; closure supplies the rest.
    auto it = last_of_client.find(op.client);
    if (it != last_of_client.end()) add_edge(it->second, i);
    last_of_client[op.client] = i;
    // Reads-from.
    for (const ReadObs& obs : op.reads) {
      if (obs.absent) continue;
      auto w = writer_of(obs.key, obs.returned);
      if (w && *w != i) add_edge(*w, i);
    }
  }
  close();
}

void DependencyGraph::close() {
  for (std::size_t k = 0; k < n_; ++k) {
    const std::uint64_t* rk = &reach_[k * words_];
    for (std::size_t i = 0; i < n_; ++i) {
      if (reach_[i * words_ + k / 64] & (1ULL << (k % 64))) {
        std::uint64_t* ri = &reach_[i * words_];
        for (std::size_t w = 0; w < words_; ++w) ri[w] |= rk[w];
      }
    }
  }
}

bool DependencyGraph::happens_before(std::size_t a, std::size_t b) const {
  return (reach_[a * words_ + b / 64] >> (b % 64)) & 1ULL;
}

bool DependencyGraph::dep(std::size_t write_a, std::size_t write_b) const {
  return happens_before(write_b, write_a);
}

const std::vector<std::size_t>& DependencyGraph::writes_of(const Key& k) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = writes_by_key_.find(k);
  return it == writes_by_key_.end() ? kEmpty : it->second;
}

std::optional<std::size_t> DependencyGraph::writer_of(const Key& k, const VersionId& id) const {
  auto it = writer_.find({k, hlc_encode(id.ut), id.sr});
  if (it == writer_.end()) return std::nullopt;
  return it->second;
}

// ---- checks -----------------------------------------------------------------

nlohmann::json Violation::to_json() const {
  return nlohmann::json{{"check", check},     {"detail", detail},
                        {"client", client},   {"op_index", op_index},
                        {"key", key},         {"expected", expected},
                        {"returned", returned}};
}

namespace {

// visible+ for last-writer-wins: the returned version equals the required one
// or beats it in the <ut, sr> order.
bool lww_visible(const VersionId& required, const VersionId& returned) {
  return returned == required || returned > required;
}

void require_visible(const ParsedTrace& t, std::size_t reader, const ReadObs& obs,
                     std::size_t required_writer, const char* check, const char* detail,
                     std::vector<Violation>& out) {
  const OpRecord& r = t.ops[reader];
  const OpRecord& w = t.ops[required_writer];
  if (lww_visible(w.written, obs.returned)) return;
  Violation v;
  v.check = check;
  v.detail = detail;
  v.client = r.client;
  v.op_index = r.index;
  v.key = obs.key;
  v.expected = w.written;
  v.returned = obs.returned;
  out.push_back(std::move(v));
}

}  // namespace

std::vector<Violation> check_causal_pp(const ParsedTrace& t, const DependencyGraph& g) {
  std::vector<Violation> out;

  std::map<int, std::vector<std::size_t>> by_client;
  for (std::size_t i = 0; i < t.ops.size(); ++i) by_client[t.ops[i].client].push_back(i);
  for (auto& [c, ops] : by_client) {
    (void)c;
    std::sort(ops.begin(), ops.end(),
              [&](std::size_t a, std::size_t b) { return t.ops[a].index < t.ops[b].index; });
  }

  for (const auto& [client, ops] : by_client) {
    (void)client;
    for (std::size_t pos = 0; pos < ops.size(); ++pos) {
      const OpRecord& reader = t.ops[ops[pos]];
      if (reader.kind == OpKind::Put) continue;
      for (const ReadObs& obs : reader.reads) {
        for (std::size_t q = 0; q < pos; ++q) {
          const OpRecord& prev = t.ops[ops[q]];
          if (prev.kind == OpKind::Put) {
            // (1) the client's own earlier writes of this key.
            if (prev.key == obs.key) {
              require_visible(t, ops[pos], obs, ops[q], "causal++", "own write not visible",
                              out);
            }
            continue;
          }
          for (const ReadObs& prev_obs : prev.reads) {
            if (prev_obs.absent) continue;
            // (2) versions of this key the client already read stay visible.
            if (prev_obs.key == obs.key) {
              auto w = g.writer_of(prev_obs.key, prev_obs.returned);
              if (w) {
                require_visible(t, ops[pos], obs, *w, "causal++",
                                "read version went backwards", out);
              }
            }
            // (3) dependencies of anything the client has read.
            auto v1 = g.writer_of(prev_obs.key, prev_obs.returned);
            if (!v1) continue;
            for (std::size_t v2 : g.writes_of(obs.key)) {
              if (v2 == *v1) continue;
              if (g.dep(*v1, v2)) {
                require_visible(t, ops[pos], obs, v2, "causal++",
                                "dependency of a read version not visible", out);
              }
            }
          }
        }
      }
    }
  }

  // (4) local writes are immediately visible to local gets.
  for (std::size_t i = 0; i < t.ops.size(); ++i) {
    const OpRecord& reader = t.ops[i];
    if (reader.kind != OpKind::Get) continue;
    const ReadObs& obs = reader.reads.at(0);
    for (std::size_t w : g.writes_of(obs.key)) {
      const OpRecord& put = t.ops[w];
      if (put.written.sr != reader.home) continue;
      if (put.srv_seq < reader.srv_seq) {
        require_visible(t, i, obs, w, "causal++", "local write not immediately visible", out);
      }
    }
  }

  return out;
}

std::vector<Violation> check_rotx_snapshots(const ParsedTrace& t, const DependencyGraph& g) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < t.ops.size(); ++i) {
    const OpRecord& op = t.ops[i];
    if (op.kind != OpKind::Rotx) continue;
    for (const ReadObs& obs1 : op.reads) {
      if (obs1.absent) continue;
      auto v1 = g.writer_of(obs1.key, obs1.returned);
      if (!v1) continue;
      for (const ReadObs& obs2 : op.reads) {
        for (std::size_t v2 : g.writes_of(obs2.key)) {
          if (v2 == *v1) continue;
          if (!g.dep(*v1, v2)) continue;
          require_visible(t, i, obs2, v2, "rotx-snapshot",
                          "transaction read a version while missing its dependency", out);
        }
      }
    }
  }
  return out;
}

std::vector<Violation> check_convergence(const ParsedTrace& t, const DependencyGraph& g) {
  (void)g;
  std::vector<Violation> out;

  auto connected = [&](ReplicaId a, ReplicaId b) {
    if (a == b) return true;
    for (const auto& c : t.cuts) {
      if ((c.a == a && c.b == b) || (c.a == b && c.b == a)) return false;
    }
    return true;
  };

  struct StoredVer {
    VersionId id;
    DependencySet ds;
  };
  std::map<ReplicaId, std::map<Key, std::vector<StoredVer>>> stores;
  for (const auto& [actor, dump] : t.stores) {
    ReplicaId rep = replica_of_actor(actor);
    for (const auto& [key, chain] : dump.items()) {
      for (const auto& vj : chain) {
        StoredVer sv;
        sv.id = VersionId{hlc_decode(vj.at("ut").get<std::uint64_t>()),
                          vj.at("sr").get<ReplicaId>()};
        sv.ds = vj.at("ds").get<DependencySet>();
        stores[rep][key].push_back(std::move(sv));
      }
    }
  }

  // Winners are compared over versions whose origin (and every dependency's
  // origin) stayed connected to both replicas; the rest are exempt by the
  // connectivity precondition.
  for (ReplicaId i = 0; i < t.replicas; ++i) {
    for (ReplicaId j = i + 1; j < t.replicas; ++j) {
      if (!connected(i, j)) continue;
      auto eligible = [&](const StoredVer& v) {
        if (!connected(v.id.sr, i) || !connected(v.id.sr, j)) return false;
        for (const auto& [rep, h] : v.ds.entries()) {
          (void)h;
          if (!connected(rep, i) || !connected(rep, j)) return false;
        }
        return true;
      };
      auto winner = [&](ReplicaId rep, const Key& key) -> std::optional<VersionId> {
        auto rit = stores.find(rep);
        if (rit == stores.end()) return std::nullopt;
        auto kit = rit->second.find(key);
        if (kit == rit->second.end()) return std::nullopt;
        std::optional<VersionId> best;
        for (const StoredVer& v : kit->second) {
          if (!eligible(v)) continue;
          if (!best || v.id > *best) best = v.id;
        }
        return best;
      };
      std::set<Key> keys;
      if (auto it = stores.find(i); it != stores.end())
        for (const auto& [k, vs] : it->second) {
          (void)vs;
          keys.insert(k);
        }
      if (auto it = stores.find(j); it != stores.end())
        for (const auto& [k, vs] : it->second) {
          (void)vs;
          keys.insert(k);
        }
      for (const Key& key : keys) {
        auto wi = winner(i, key);
        auto wj = winner(j, key);
        if (wi == wj) continue;
        Violation v;
        v.check = "convergence";
        v.detail = "replicas " + std::to_string(i) + " and " + std::to_string(j) +
                   " expose different winners";
        v.key = key;
        v.expected = wi.value_or(initial_version_id());
        v.returned = wj.value_or(initial_version_id());
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

std::vector<Violation> audit_fifo(const ParsedTrace& t) {
  std::vector<Violation> out;
  std::map<std::pair<std::string, std::string>, std::uint64_t> last_recv_msg;
  std::vector<const MsgRecord*> received;
  for (const auto& m : t.messages)
    if (m.received) received.push_back(&m);
  std::sort(received.begin(), received.end(),
            [](const MsgRecord* a, const MsgRecord* b) { return a->recv_seq < b->recv_seq; });
  for (const MsgRecord* m : received) {
    auto key = std::make_pair(m->src, m->dst);
    auto it = last_recv_msg.find(key);
    if (it != last_recv_msg.end() && m->msg_seq < it->second) {
      Violation v;
      v.check = "fifo";
      v.detail = "channel " + m->src + "->" + m->dst + " delivered message " +
                 std::to_string(m->msg_seq) + " after " + std::to_string(it->second);
      out.push_back(std::move(v));
    }
    if (it == last_recv_msg.end() || m->msg_seq > it->second) last_recv_msg[key] = m->msg_seq;
  }
  return out;
}

std::vector<Violation> audit_watermarks(const ParsedTrace& t) {
  std::vector<Violation> out;

  std::map<std::string, std::vector<std::uint64_t>> last_dsv;
  std::map<std::string, std::uint64_t> last_gst;
  for (const auto& w : t.marks) {
    if (w.is_gst) {
      auto it = last_gst.find(w.actor);
      if (it != last_gst.end() && w.gst < it->second) {
        Violation v;
        v.check = "watermark-monotonic";
        v.detail = "gst decreased at " + w.actor;
        out.push_back(std::move(v));
      }
      last_gst[w.actor] = w.gst;
    } else {
      auto it = last_dsv.find(w.actor);
      if (it != last_dsv.end()) {
        for (std::size_t k = 0; k < w.dsv.size() && k < it->second.size(); ++k) {
          if (w.dsv[k] < it->second[k]) {
            Violation v;
            v.check = "watermark-monotonic";
            v.detail = "dsv[" + std::to_string(k) + "] decreased at " + w.actor;
            out.push_back(std::move(v));
            break;
          }
        }
      }
      last_dsv[w.actor] = w.dsv;
    }
  }

  // Safety against ground-truth deliveries: a watermark T for origin j at
  // replica i promises every version written at j with ut <= T was delivered
  // to replica i beforehand.
  struct PutRec {
    std::uint64_t ut;
    Key key;
    ReplicaId sr;
  };
  std::vector<PutRec> puts;
  for (const auto& op : t.ops) {
    if (op.kind == OpKind::Put) puts.push_back({hlc_encode(op.written.ut), op.key, op.written.sr});
  }
  std::sort(puts.begin(), puts.end(),
            [](const PutRec& a, const PutRec& b) { return a.ut < b.ut; });

  // Deliveries keyed by (ut, key): timestamps can collide across partitions.
  std::map<std::pair<ReplicaId, ReplicaId>,
           std::map<std::pair<std::uint64_t, Key>, std::uint64_t>>
      delivery;
  for (const auto& m : t.messages) {
    if ((m.type == "Replicate" || m.type == "GrReplicate") && m.received) {
      ReplicaId dest = replica_of_actor(m.dst);
      delivery[{m.ver.sr, dest}][{hlc_encode(m.ver.ut), m.key}] = m.recv_seq;
    }
  }

  constexpr std::uint64_t kNever = ~std::uint64_t{0};
  std::map<std::pair<ReplicaId, ReplicaId>,
           std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>>
      prefix;  // (origin, dest) -> (sorted uts, running max recv seq)
  for (ReplicaId j = 0; j < t.replicas; ++j) {
    for (ReplicaId i = 0; i < t.replicas; ++i) {
      if (i == j) continue;
      auto& [uts, pmax] = prefix[{j, i}];
      auto dit = delivery.find({j, i});
      std::uint64_t running = 0;
      for (const PutRec& p : puts) {
        if (p.sr != j) continue;
        std::uint64_t seq = kNever;
        if (dit != delivery.end()) {
          auto f = dit->second.find({p.ut, p.key});
          if (f != dit->second.end()) seq = f->second;
        }
        running = std::max(running, seq);
        uts.push_back(p.ut);
        pmax.push_back(running);
      }
    }
  }

  auto check_origin = [&](const WatermarkEvent& w, ReplicaId i, ReplicaId j, std::uint64_t T) {
    if (T == 0) return;
    auto& [uts, pmax] = prefix[{j, i}];
    auto it = std::upper_bound(uts.begin(), uts.end(), T);
    if (it == uts.begin()) return;
    std::size_t idx = static_cast<std::size_t>(it - uts.begin()) - 1;
    if (pmax[idx] >= w.seq) {
      Violation v;
      v.check = "watermark-safety";
      v.detail = "watermark at " + w.actor + " covers a version from replica " +
                 std::to_string(j) + " not yet delivered";
      out.push_back(std::move(v));
    }
  };

  for (const auto& w : t.marks) {
    ReplicaId i = replica_of_actor(w.actor);
    if (w.is_gst) {
      for (ReplicaId j = 0; j < t.replicas; ++j)
        if (j != i) check_origin(w, i, j, w.gst);
    } else {
      for (ReplicaId j = 0; j < t.replicas && static_cast<std::size_t>(j) < w.dsv.size(); ++j)
        if (j != i) check_origin(w, i, j, w.dsv[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

std::vector<Violation> audit_timestamp_order(const ParsedTrace& t, const DependencyGraph& g) {
  std::vector<Violation> out;
  std::vector<std::size_t> put_nodes;
  for (std::size_t i = 0; i < t.ops.size(); ++i)
    if (t.ops[i].kind == OpKind::Put) put_nodes.push_back(i);
  for (std::size_t a : put_nodes) {
    for (std::size_t b : put_nodes) {
      if (a == b) continue;
      if (!g.dep(a, b)) continue;  // a dep b: write(b) happens-before write(a)
      if (t.ops[a].written.ut > t.ops[b].written.ut) continue;
      Violation v;
      v.check = "timestamp-order";
      v.detail = "dependent write not timestamped above its dependency";
      v.client = t.ops[a].client;
      v.op_index = t.ops[a].index;
      v.key = t.ops[a].key;
      v.expected = t.ops[b].written;
      v.returned = t.ops[a].written;
      out.push_back(std::move(v));
    }
  }
  return out;
}

Verdict check_trace(const Trace& trace) {
  ParsedTrace t = parse_trace(trace);
  DependencyGraph g(t);

  Verdict v;
  v.causal_violations = check_causal_pp(t, g);
  v.rotx_violations = check_rotx_snapshots(t, g);
  v.convergence_violations = check_convergence(t, g);
  auto fifo = audit_fifo(t);
  auto marks = audit_watermarks(t);
  auto ts = audit_timestamp_order(t, g);
  v.audit_violations.insert(v.audit_violations.end(), fifo.begin(), fifo.end());
  v.audit_violations.insert(v.audit_violations.end(), marks.begin(), marks.end());
  v.audit_violations.insert(v.audit_violations.end(), ts.begin(), ts.end());
  for (const auto& op : t.ops)
    if (op.kind == OpKind::Put) v.max_c = std::max(v.max_c, op.written.ut.c);
  v.deferred_puts = t.deferred_puts;
  v.parked_rotx = t.parked_rotx;
  v.pass = v.causal_violations.empty() && v.rotx_violations.empty() &&
           v.convergence_violations.empty() && v.audit_violations.empty();
  return v;
}

nlohmann::json Verdict::to_json() const {
  auto arr = [](const std::vector<Violation>& vs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& v : vs) a.push_back(v.to_json());
    return a;
  };
  return nlohmann::json{{"pass", pass},
                        {"causal_violations", arr(causal_violations)},
                        {"rotx_violations", arr(rotx_violations)},
                        {"convergence_violations", arr(convergence_violations)},
                        {"audit_violations", arr(audit_violations)},
                        {"max_c", max_c},
                        {"deferred_puts", deferred_puts},
                        {"parked_rotx", parked_rotx}};
}

std::vector<std::vector<bool>> happens_before_oracle(const ParsedTrace& t) {
  std::size_t n = t.ops.size();
  std::vector<std::vector<bool>> hb(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      // Clause 1: same client, a earlier than b.
      if (t.ops[a].client == t.ops[b].client && t.ops[a].index < t.ops[b].index)
        hb[a][b] = true;
      // Clause 2: b reads a value written by a.
      if (t.ops[a].kind == OpKind::Put) {
        for (const ReadObs& obs : t.ops[b].reads) {
          if (!obs.absent && obs.key == t.ops[a].key && obs.returned == t.ops[a].written)
            hb[a][b] = true;
        }
      }
    }
  }
  // Clause 3: transitivity, iterated to a fixpoint.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t c = 0; c < n; ++c) {
        if (!hb[a][c]) continue;
        for (std::size_t b = 0; b < n; ++b) {
          if (hb[c][b] && !hb[a][b]) {
            hb[a][b] = true;
            changed = true;
          }
        }
      }
    }
  }
  return hb;
}

}  // namespace causalkv::checker
