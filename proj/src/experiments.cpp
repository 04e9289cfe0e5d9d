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

#include "causalkv/experiments.hpp"

#include <algorithm>
#include <cstdio>

#include "causalkv/workload.hpp"

namespace causalkv::exp {

using workload::BasicWorkload;

std::string metrics_to_csv(const std::vector<MetricRow>& rows) {
  std::string out = "protocol,preset,param,metric,value\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.value);
    out += r.protocol + "," + r.preset + "," + r.param + "," + r.metric + "," + buf + "\n";
  }
  return out;
}

Percentiles percentiles(std::vector<double> xs) {
  Percentiles p;
  if (xs.empty()) return p;
  std::sort(xs.begin(), xs.end());
  double sum = 0;
  for (double x : xs) sum += x;
  p.mean = sum / static_cast<double>(xs.size());
  auto at = [&](double q) {
    std::size_t idx = static_cast<std::size_t>(q * static_cast<double>(xs.size() - 1) + 0.5);
    return xs[std::min(idx, xs.size() - 1)];
  };
  p.median = at(0.5);
  p.p90 = at(0.9);
  p.p99 = at(0.99);
  return p;
}

void add_series(std::vector<MetricRow>& rows, const std::string& proto,
                const std::string& preset, const std::string& param,
                const std::string& metric_prefix, const std::vector<double>& xs) {
  Percentiles p = percentiles(xs);
  rows.push_back({proto, preset, param, metric_prefix + "_mean_ms", p.mean});
  rows.push_back({proto, preset, param, metric_prefix + "_median_ms", p.median});
  rows.push_back({proto, preset, param, metric_prefix + "_p90_ms", p.p90});
  rows.push_back({proto, preset, param, metric_prefix + "_p99_ms", p.p99});
  rows.push_back(
      {proto, preset, param, metric_prefix + "_count", static_cast<double>(xs.size())});
}

std::vector<double> op_latencies_ms(const checker::ParsedTrace& t, checker::OpKind kind) {
  std::vector<double> out;
  for (const auto& op : t.ops)
    if (op.kind == kind) out.push_back(static_cast<double>(op.ended - op.started) / 1000.0);
  return out;
}

std::vector<double> put_waits_ms(const checker::ParsedTrace& t) {
  std::vector<double> out;
  for (const auto& op : t.ops)
    if (op.kind == checker::OpKind::Put) out.push_back(static_cast<double>(op.waited) / 1000.0);
  return out;
}

std::vector<double> request_latencies_ms(const checker::ParsedTrace& t) {
  std::map<int, std::pair<Micros, Micros>> spans;  // client -> (first start, last end)
  for (const auto& op : t.ops) {
    auto [it, inserted] = spans.emplace(op.client, std::make_pair(op.started, op.ended));
    if (!inserted) {
      it->second.first = std::min(it->second.first, op.started);
      it->second.second = std::max(it->second.second, op.ended);
    }
  }
  std::vector<double> out;
  for (const auto& [c, span] : spans) {
    (void)c;
    out.push_back(static_cast<double>(span.second - span.first) / 1000.0);
  }
  return out;
}

std::vector<double> visibility_samples_ms(const checker::ParsedTrace& t) {
  struct WriteInfo {
    int client;
    Micros ended;
  };
  std::map<std::tuple<Key, std::uint64_t, ReplicaId>, WriteInfo> writes;
  for (const auto& op : t.ops) {
    if (op.kind == checker::OpKind::Put)
      writes[{op.key, hlc_encode(op.written.ut), op.written.sr}] = {op.client, op.ended};
  }
  std::vector<double> out;
  std::set<std::tuple<Key, std::uint64_t, ReplicaId>> seen;
  for (const auto& op : t.ops) {  // ops are in end_seq order
    if (op.kind == checker::OpKind::Put) continue;
    for (const auto& obs : op.reads) {
      if (obs.absent) continue;
      auto key = std::make_tuple(obs.key, hlc_encode(obs.returned.ut), obs.returned.sr);
      auto wit = writes.find(key);
      if (wit == writes.end()) continue;
      if (wit->second.client == op.client) continue;
      if (!seen.insert(key).second) continue;  // first remote read only
      out.push_back(static_cast<double>(op.ended - wit->second.ended) / 1000.0);
    }
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> rotx_latencies_by_involvement(
    const checker::ParsedTrace& t, int partitions, PartitionId slow) {
  std::vector<double> involving, other;
  for (const auto& op : t.ops) {
    if (op.kind != checker::OpKind::Rotx) continue;
    bool inv = false;
    for (const auto& k : op.keys) inv = inv || partition_for_key(k, partitions) == slow;
    (inv ? involving : other)
        .push_back(static_cast<double>(op.ended - op.started) / 1000.0);
  }
  return {involving, other};
}

sim::RunResult execute(const RunSpec& spec, sim::Protocol proto) {
  auto wl = spec.workload();
  return sim::run_simulation(spec.cfg, proto, *wl);
}

// ---- preset definitions ------------------------------------------------------

RunSpec put_skew_spec(double skew_ms, int puts, std::uint64_t seed) {
  RunSpec spec;
  spec.cfg.replicas = 1;
  spec.cfg.partitions = 2;
  spec.cfg.skew_ms = {{0.0, -skew_ms}};
  spec.cfg.intra_dc_ms = 0.5;
  spec.cfg.seed = seed;
  spec.workload = [puts]() {
    auto wl = std::make_unique<BasicWorkload>();
    std::vector<Key> keys = workload::keys_per_partition("ps", 2);
    wl->add_client(0, [keys, puts]() {
      return std::make_unique<workload::RoundRobinPutDriver>(keys, puts, 0, "w");
    });
    return wl;
  };
  return spec;
}

RunSpec query_amp_spec(int factor, double skew_ms, int requests, std::uint64_t seed) {
  RunSpec spec;
  spec.cfg.replicas = 1;
  spec.cfg.partitions = 2;
  spec.cfg.skew_ms = {{0.0, -skew_ms}};
  spec.cfg.intra_dc_ms = 0.5;
  spec.cfg.seed = seed;
  spec.workload = [factor, requests]() {
    auto wl = std::make_unique<BasicWorkload>();
    std::vector<Key> keys = workload::keys_per_partition("qa", 2);
    // One end-user request = one fresh session issuing `factor` dependent
    // writes; requests run back to back.
    for (int r = 0; r < requests; ++r) {
      wl->add_client(
          0,
          [keys, factor, r]() {
            return std::make_unique<workload::RoundRobinPutDriver>(keys, factor, 0,
                                                                   "q" + std::to_string(r));
          },
          r == 0 ? -1 : r - 1);
    }
    return wl;
  };
  return spec;
}

const std::vector<VisibilityLocation>& visibility_locations() {
  static const std::vector<VisibilityLocation> kLocs = {
      {"California", 1.1709114, 0.3201521}, {"Oregon", 21.8699663, 20.6107391},
      {"Virginia", 67.0469505, 61.2305881}, {"Ireland", 138.2809544, 139.3212938},
      {"Sydney", 159.0899451, 158.4004238}, {"Singapore", 175.6392972, 175.6030464}};
  return kLocs;
}

RunSpec visibility_spec(const VisibilityLocation& loc, int target, std::uint64_t seed) {
  RunSpec spec;
  spec.cfg.replicas = 3;
  spec.cfg.partitions = 2;
  spec.cfg.intra_dc_ms = 0.5;
  spec.cfg.links[{0, 1}] = {0.3, 0.0};  // the two collaborating sites are co-located
  spec.cfg.links[{0, 2}] = {loc.rtt_a_ms / 2.0, 0.0};
  spec.cfg.links[{1, 2}] = {loc.rtt_b_ms / 2.0, 0.0};
  spec.cfg.seed = seed;
  spec.workload = [target]() {
    auto wl = std::make_unique<BasicWorkload>();
    Key k = "ctr0";
    wl->add_client(0, [k, target]() {
      return std::make_unique<workload::CounterDriver>(k, 1, target, 1000);
    });
    wl->add_client(1, [k, target]() {
      return std::make_unique<workload::CounterDriver>(k, 0, target, 1000);
    });
    return wl;
  };
  return spec;
}

RunSpec rotx_slow_spec(double slow_ms, int reader_ops, std::uint64_t seed) {
  RunSpec spec;
  spec.cfg.replicas = 2;
  spec.cfg.partitions = kRotxPartitions;
  spec.cfg.intra_dc_ms = 0.5;
  spec.cfg.default_link = {40.0, 0.0};
  spec.cfg.seed = seed;
  if (slow_ms > 0) spec.cfg.slow.push_back({0, kRotxSlowPartition, slow_ms});
  spec.workload = [reader_ops]() {
    auto wl = std::make_unique<BasicWorkload>();
    std::vector<Key> hot = workload::keys_per_partition("hot", kRotxPartitions);
    auto shared = std::make_shared<workload::HotKeyShared>();
    shared->readers_active = 4;
    for (int w = 0; w < 2; ++w) {
      wl->add_client(0, [hot, shared, w]() {
        return std::make_unique<workload::HotKeyWriterDriver>(hot, shared, 2000,
                                                              "w" + std::to_string(w));
      });
    }
    for (int r = 0; r < 4; ++r) {
      wl->add_client(0, [hot, shared, reader_ops]() {
        return std::make_unique<workload::HotKeyReaderDriver>(hot, reader_ops, 3, shared, 1000);
      });
    }
    return wl;
  };
  return spec;
}

RunSpec soak_spec(std::uint64_t seed) {
  RunSpec spec;
  spec.cfg.replicas = 3;
  spec.cfg.partitions = 4;
  spec.cfg.intra_dc_ms = 0.5;
  spec.cfg.seed = seed;
  Rng rng = substream(seed, 0x50AC);
  spec.cfg.skew_ms.assign(3, std::vector<double>(4, 0.0));
  for (auto& row : spec.cfg.skew_ms)
    for (auto& s : row) s = static_cast<double>(rng.range(-100, 100));
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      spec.cfg.links[{a, b}] = {static_cast<double>(rng.range(20, 60)), 10.0};
  spec.workload = []() {
    auto wl = std::make_unique<BasicWorkload>();
    std::vector<Key> keys;
    for (int i = 0; i < 30; ++i) keys.push_back("k" + std::to_string(i));
    for (int rep = 0; rep < 3; ++rep) {
      for (int c = 0; c < 4; ++c) {
        int tag = rep * 4 + c;
        wl->add_client(rep, [keys, tag]() {
          return std::make_unique<workload::SoakDriver>(keys, 84, "c" + std::to_string(tag));
        });
      }
    }
    return wl;
  };
  return spec;
}

// ---- preset orchestration ----------------------------------------------------

namespace {

RunSpec with_override(RunSpec spec, const nlohmann::json* ov) {
  if (ov != nullptr && !ov->is_null()) {
    nlohmann::json j = spec.cfg.to_json();
    j.merge_patch(*ov);
    spec.cfg = sim::SimConfig::from_json(j);
  }
  return spec;
}

void run_both(PresetResult& out, const std::string& preset, const std::string& param,
              const RunSpec& spec,
              const std::function<void(const checker::ParsedTrace&, const std::string& proto,
                                       const std::string& param, std::vector<MetricRow>&)>&
                  extract) {
  for (sim::Protocol proto : {sim::Protocol::CausalKv, sim::Protocol::GentleRain}) {
    sim::RunResult res = execute(spec, proto);
    std::string label = preset + "/" + sim::protocol_name(proto) + "/" + param;
    checker::Verdict verdict = checker::check_trace(res.trace);
    out.pass = out.pass && verdict.pass;
    checker::ParsedTrace parsed = checker::parse_trace(res.trace);
    extract(parsed, sim::protocol_name(proto), param, out.rows);
    out.traces.emplace_back(label, std::move(res.trace));
    out.verdicts.emplace_back(label, std::move(verdict));
  }
}

PresetResult preset_put_skew(std::uint64_t seed, const nlohmann::json* ov) {
  PresetResult out;
  for (int skew = 0; skew <= 16; skew += 2) {
    RunSpec spec = with_override(put_skew_spec(skew, 200, seed), ov);
    run_both(out, "put-skew", "skew_ms=" + std::to_string(skew), spec,
             [](const checker::ParsedTrace& t, const std::string& proto,
                const std::string& param, std::vector<MetricRow>& rows) {
               add_series(rows, proto, "put-skew", param, "put_latency",
                          op_latencies_ms(t, checker::OpKind::Put));
               add_series(rows, proto, "put-skew", param, "put_wait", put_waits_ms(t));
             });
  }
  return out;
}

PresetResult preset_query_amp(std::uint64_t seed, const nlohmann::json* ov) {
  PresetResult out;
  for (int f : {1, 10, 50, 100, 500}) {
    int requests = f <= 10 ? 25 : (f <= 100 ? 15 : 5);
    RunSpec spec = with_override(query_amp_spec(f, 100.0, requests, seed), ov);
    run_both(out, "query-amp", "amp=" + std::to_string(f), spec,
             [](const checker::ParsedTrace& t, const std::string& proto,
                const std::string& param, std::vector<MetricRow>& rows) {
               add_series(rows, proto, "query-amp", param, "request_latency",
                          request_latencies_ms(t));
             });
  }
  return out;
}

PresetResult preset_visibility(std::uint64_t seed, const nlohmann::json* ov) {
  PresetResult out;
  for (const auto& loc : visibility_locations()) {
    RunSpec spec = with_override(visibility_spec(loc, 30, seed), ov);
    run_both(out, "visibility", "c=" + loc.name, spec,
             [](const checker::ParsedTrace& t, const std::string& proto,
                const std::string& param, std::vector<MetricRow>& rows) {
               add_series(rows, proto, "visibility", param, "visibility",
                          visibility_samples_ms(t));
             });
  }
  return out;
}

PresetResult preset_rotx_slow(std::uint64_t seed, const nlohmann::json* ov) {
  PresetResult out;
  for (double slow : {0.0, 100.0, 500.0}) {
    RunSpec spec = with_override(rotx_slow_spec(slow, 50, seed), ov);
    run_both(out, "rotx-slow", "slow_ms=" + std::to_string(static_cast<int>(slow)), spec,
             [](const checker::ParsedTrace& t, const std::string& proto,
                const std::string& param, std::vector<MetricRow>& rows) {
               auto [inv, noninv] =
                   rotx_latencies_by_involvement(t, kRotxPartitions, kRotxSlowPartition);
               add_series(rows, proto, "rotx-slow", param, "rotx_involving", inv);
               add_series(rows, proto, "rotx-slow", param, "rotx_noninvolving", noninv);
               rows.push_back({proto, "rotx-slow", param, "rotx_parked",
                               static_cast<double>(t.parked_rotx)});
             });
  }
  return out;
}

PresetResult preset_soak(std::uint64_t seed, const nlohmann::json* ov) {
  PresetResult out;
  RunSpec spec = with_override(soak_spec(seed), ov);
  run_both(out, "soak", "seed=" + std::to_string(seed), spec,
           [](const checker::ParsedTrace& t, const std::string& proto,
              const std::string& param, std::vector<MetricRow>& rows) {
             add_series(rows, proto, "soak", param, "get_latency",
                        op_latencies_ms(t, checker::OpKind::Get));
             add_series(rows, proto, "soak", param, "put_latency",
                        op_latencies_ms(t, checker::OpKind::Put));
             add_series(rows, proto, "soak", param, "rotx_latency",
                        op_latencies_ms(t, checker::OpKind::Rotx));
           });
  return out;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> kNames = {"put-skew", "query-amp", "visibility",
                                                  "rotx-slow", "soak"};
  return kNames;
}

PresetResult run_preset(const std::string& name, std::uint64_t seed,
                        const nlohmann::json* config_override) {
  if (name == "put-skew") return preset_put_skew(seed, config_override);
  if (name == "query-amp") return preset_query_amp(seed, config_override);
  if (name == "visibility") return preset_visibility(seed, config_override);
  if (name == "rotx-slow") return preset_rotx_slow(seed, config_override);
  if (name == "soak") return preset_soak(seed, config_override);
  throw FatalError("unknown preset: " + name);
}

}  // namespace causalkv::exp
