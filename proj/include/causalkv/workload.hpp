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

#include "causalkv/sim.hpp"

namespace causalkv::workload {

// Smallest key with the given prefix that the placement function maps to the
// target partition.
Key key_for_partition(const std::string& prefix, PartitionId target, int partitions);

// One key per partition, in partition order.
std::vector<Key> keys_per_partition(const std::string& prefix, int partitions);

class BasicWorkload : public sim::Workload {
 public:
  using Factory = std::function<std::unique_ptr<sim::ClientDriver>()>;

  int add_client(ReplicaId home, Factory factory, int chain_after = -1);

  int client_count() const override { return static_cast<int>(factories_.size()); }
  ReplicaId home(int client) const override { return homes_[static_cast<std::size_t>(client)]; }
  std::unique_ptr<sim::ClientDriver> driver(int client) override {
    return factories_[static_cast<std::size_t>(client)]();
  }
  int chain_after(int client) const override {
    return chains_[static_cast<std::size_t>(client)];
  }

 private:
  std::vector<Factory> factories_;
  std::vector<ReplicaId> homes_;
  std::vector<int> chains_;
};

// Fixed list of operations with per-step delays.
class ScriptDriver : public sim::ClientDriver {
 public:
  struct Step {
    Micros delay = 0;
    sim::ClientOp op;
  };
  explicit ScriptDriver(std::vector<Step> steps) : steps_(std::move(steps)) {}

  std::optional<Next> start(Rng&) override { return make(); }
  std::optional<Next> next(const sim::OpOutcome&, Rng&) override { return make(); }

 private:
  std::optional<Next> make() {
    if (i_ >= steps_.size()) return std::nullopt;
    Step& s = steps_[i_++];
    return Next{s.delay, s.op};
  }
  std::vector<Step> steps_;
  std::size_t i_ = 0;
};

// Writes cycling through a key list; consecutive writes are causally chained
// through the session.
class RoundRobinPutDriver : public sim::ClientDriver {
 public:
  RoundRobinPutDriver(std::vector<Key> keys, int count, Micros think, std::string tag)
      : keys_(std::move(keys)), count_(count), think_(think), tag_(std::move(tag)) {}

  std::optional<Next> start(Rng&) override { return make(0); }
  std::optional<Next> next(const sim::OpOutcome&, Rng&) override { return make(think_); }

 private:
  std::optional<Next> make(Micros delay);
  std::vector<Key> keys_;
  int count_;
  Micros think_;
  std::string tag_;
  int i_ = 0;
};

// Collaborative counter: polls a key and increments it whenever the value's
// parity matches this client's role, until the target count is reached.
class CounterDriver : public sim::ClientDriver {
 public:
  CounterDriver(Key k, int parity, int target, Micros poll)
      : key_(std::move(k)), parity_(parity), target_(target), poll_(poll) {}

  std::optional<Next> start(Rng&) override { return Next{0, sim::OpGet{key_}}; }
  std::optional<Next> next(const sim::OpOutcome& prev, Rng&) override;

 private:
  Key key_;
  int parity_;
  int target_;
  Micros poll_;
};

// Shared coordination for the hot-key mix: writers stop once every reader is
// done.
struct HotKeyShared {
  int readers_active = 0;
};

class HotKeyWriterDriver : public sim::ClientDriver {
 public:
  HotKeyWriterDriver(std::vector<Key> keys, std::shared_ptr<HotKeyShared> shared, Micros think,
                     std::string tag)
      : keys_(std::move(keys)), shared_(std::move(shared)), think_(think), tag_(std::move(tag)) {}

  std::optional<Next> start(Rng& rng) override { return make(0, rng); }
  std::optional<Next> next(const sim::OpOutcome&, Rng& rng) override { return make(think_, rng); }

 private:
  std::optional<Next> make(Micros delay, Rng& rng);
  std::vector<Key> keys_;
  std::shared_ptr<HotKeyShared> shared_;
  Micros think_;
  std::string tag_;
  int i_ = 0;
};

// 50% point reads / 50% read-only transactions of a fixed size over hot keys.
class HotKeyReaderDriver : public sim::ClientDriver {
 public:
  HotKeyReaderDriver(std::vector<Key> keys, int ops, int txn_size,
                     std::shared_ptr<HotKeyShared> shared, Micros think)
      : keys_(std::move(keys)),
        ops_(ops),
        txn_size_(txn_size),
        shared_(std::move(shared)),
        think_(think) {}

  std::optional<Next> start(Rng& rng) override { return make(0, rng); }
  std::optional<Next> next(const sim::OpOutcome&, Rng& rng) override { return make(think_, rng); }

 private:
  std::optional<Next> make(Micros delay, Rng& rng);
  std::vector<Key> keys_;
  int ops_;
  int txn_size_;
  std::shared_ptr<HotKeyShared> shared_;
  Micros think_;
  int i_ = 0;
};

// Randomized mixed operations; checker fodder.
class SoakDriver : public sim::ClientDriver {
 public:
  SoakDriver(std::vector<Key> keyspace, int ops, std::string tag)
      : keys_(std::move(keyspace)), ops_(ops), tag_(std::move(tag)) {}

  std::optional<Next> start(Rng& rng) override { return make(rng); }
  std::optional<Next> next(const sim::OpOutcome&, Rng& rng) override { return make(rng); }

 private:
  std::optional<Next> make(Rng& rng);
  std::vector<Key> keys_;
  int ops_;
  std::string tag_;
  int i_ = 0;
};

}  // namespace causalkv::workload
