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

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "causalkv/experiments.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw causalkv::FatalError("cannot open output file: " + p.string());
  out << content;
}

int cmd_run_experiment(const std::string& preset, std::uint64_t seed, const std::string& out_dir,
                       const std::string& config_file) {
  nlohmann::json override_json;
  const nlohmann::json* ov = nullptr;
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) throw causalkv::FatalError("cannot open config file: " + config_file);
    in >> override_json;
    ov = &override_json;
  }

  causalkv::exp::PresetResult res = causalkv::exp::run_preset(preset, seed, ov);

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "metrics.csv", causalkv::exp::metrics_to_csv(res.rows));

  std::string jsonl;
  for (const auto& [label, trace] : res.traces) {
    for (const auto& e : trace) {
      nlohmann::json j = e.to_json();
      j["run"] = label;
      jsonl += j.dump();
      jsonl += '\n';
    }
  }
  write_file(fs::path(out_dir) / "trace.jsonl", jsonl);

  nlohmann::json verdicts = nlohmann::json::object();
  for (const auto& [label, v] : res.verdicts) verdicts[label] = v.to_json();
  nlohmann::json verdict_out{{"pass", res.pass}, {"runs", verdicts}};
  write_file(fs::path(out_dir) / "verdict.json", verdict_out.dump(2) + "\n");

  for (const auto& [label, v] : res.verdicts) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << label << "\n";
  }
  std::cout << (res.pass ? "checker: all runs pass" : "checker: VIOLATIONS FOUND") << "\n"
            << "outputs written to " << out_dir << "\n";
  return res.pass ? 0 : 1;
}

int cmd_check(const std::string& trace_file, const std::string& verdict_file) {
  std::ifstream in(trace_file);
  if (!in) throw causalkv::FatalError("cannot open trace file: " + trace_file);

  // A file may hold several runs (tagged with "run"); check each separately.
  std::map<std::string, causalkv::sim::Trace> runs;
  std::vector<std::string> order;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    std::string label = j.value("run", "trace");
    if (runs.find(label) == runs.end()) order.push_back(label);
    runs[label].push_back(causalkv::sim::TraceEvent::from_json(j));
  }

  bool all_pass = true;
  nlohmann::json verdicts = nlohmann::json::object();
  for (const auto& label : order) {
    causalkv::checker::Verdict v = causalkv::checker::check_trace(runs[label]);
    all_pass = all_pass && v.pass;
    verdicts[label] = v.to_json();
    std::cout << (v.pass ? "PASS " : "FAIL ") << label << "\n";
  }
  if (!verdict_file.empty()) {
    write_file(verdict_file, nlohmann::json{{"pass", all_pass}, {"runs", verdicts}}.dump(2) + "\n");
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causally consistent key-value store simulator and experiment harness"};
  app.require_subcommand(1);

  std::string preset;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string config_file;
  auto* run = app.add_subcommand("run-experiment", "run an experiment preset on both protocols");
  run->add_option("preset", preset, "one of: put-skew, query-amp, visibility, rotx-slow, soak")
      ->required();
  run->add_option("--seed", seed, "deterministic seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--config", config_file, "JSON file merged over every run's sim config");

  std::string trace_file;
  std::string verdict_file;
  auto* check = app.add_subcommand("check", "run the consistency checker on a trace file");
  check->add_option("trace", trace_file, "trace JSONL file")->required();
  check->add_option("--out", verdict_file, "write the verdict JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      bool known = false;
      for (const auto& n : causalkv::exp::preset_names()) known = known || n == preset;
      if (!known) {
        std::cerr << "unknown preset: " << preset << "\n";
        return 2;
      }
      return cmd_run_experiment(preset, seed, out_dir, config_file);
    }
    return cmd_check(trace_file, verdict_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
