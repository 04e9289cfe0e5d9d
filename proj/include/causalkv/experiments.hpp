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

#include <functional>
#include <memory>

#include "causalkv/checker.hpp"
#include "causalkv/sim.hpp"

namespace causalkv::exp {

struct MetricRow {
  std::string protocol;
  std::string preset;
  std::string param;
  std::string metric;
  double value = 0;
};

std::string metrics_to_csv(const std::vector<MetricRow>& rows);

struct Percentiles {
  double mean = 0;
  double median = 0;
  double p90 = 0;
  double p99 = 0;
};

Percentiles percentiles(std::vector<double> xs);

void add_series(std::vector<MetricRow>& rows, const std::string& proto,
                const std::string& preset, const std::string& param,
                const std::string& metric_prefix, const std::vector<double>& xs);

// Metric extraction from parsed traces.
std::vector<double> op_latencies_ms(const checker::ParsedTrace& t, checker::OpKind kind);
std::vector<double> put_waits_ms(const checker::ParsedTrace& t);
// Per-client span, used where one client models one end-user request.
std::vector<double> request_latencies_ms(const checker::ParsedTrace& t);
// Time from a write's completion to the first read of it by another client.
std::vector<double> visibility_samples_ms(const checker::ParsedTrace& t);
// Transaction latencies split by whether any requested key lives on `slow`.
std::pair<std::vector<double>, std::vector<double>> rotx_latencies_by_involvement(
    const checker::ParsedTrace& t, int partitions, PartitionId slow);

// One simulation run: config plus a factory producing a fresh workload.
struct RunSpec {
  sim::SimConfig cfg;
  std::function<std::unique_ptr<sim::Workload>()> workload;
};

sim::RunResult execute(const RunSpec& spec, sim::Protocol proto);

RunSpec put_skew_spec(double skew_ms, int puts, std::uint64_t seed);
RunSpec query_amp_spec(int factor, double skew_ms, int requests, std::uint64_t seed);

struct VisibilityLocation {
  std::string name;
  double rtt_a_ms = 0;
  double rtt_b_ms = 0;
};
const std::vector<VisibilityLocation>& visibility_locations();
RunSpec visibility_spec(const VisibilityLocation& loc, int target, std::uint64_t seed);

RunSpec rotx_slow_spec(double slow_ms, int reader_ops, std::uint64_t seed);
RunSpec soak_spec(std::uint64_t seed);

inline constexpr PartitionId kRotxSlowPartition = 5;
inline constexpr int kRotxPartitions = 6;

// A finished preset: metric rows, one labeled trace per run, and the checker
// verdict for each.
struct PresetResult {
  std::vector<MetricRow> rows;
  std::vector<std::pair<std::string, sim::Trace>> traces;
  std::vector<std::pair<std::string, checker::Verdict>> verdicts;
  bool pass = true;
};

const std::vector<std::string>& preset_names();
PresetResult run_preset(const std::string& name, std::uint64_t seed,
                        const nlohmann::json* config_override = nullptr);

}  // namespace causalkv::exp
