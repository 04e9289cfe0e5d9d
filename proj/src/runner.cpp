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
#include "causalkv/server.hpp"
#include "causalkv/sim.hpp"

namespace causalkv::sim {

RunResult run_simulation(const SimConfig& cfg, Protocol proto, Workload& workload) {
  Engine eng(cfg, proto);
  for (int m = 0; m < cfg.replicas; ++m) {
    for (int n = 0; n < cfg.partitions; ++n) {
      if (proto == Protocol::CausalKv) {
        eng.add_server(std::make_unique<Partition>(m, n, cfg.replicas));
      } else {
        eng.add_server(std::make_unique<gr::GrPartition>(m, n, cfg.replicas));
      }
    }
  }
  for (int c = 0; c < workload.client_count(); ++c) {
    ReplicaId home = workload.home(c);
    ckv_check(home >= 0 && home < cfg.replicas, "client home replica out of range");
    if (proto == Protocol::CausalKv) {
      eng.add_client(std::make_unique<Client>(c, home, cfg.replicas, workload.driver(c)),
                     home, workload.chain_after(c));
    } else {
      eng.add_client(std::make_unique<gr::GrClient>(c, home, workload.driver(c)), home,
                     workload.chain_after(c));
    }
  }
  return eng.run();
}

}  // namespace causalkv::sim
