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

#include "causalkv/workload.hpp"

#include <algorithm>

namespace causalkv::workload {

Key key_for_partition(const std::string& prefix, PartitionId target, int partitions) {
  for (int i = 0;; ++i) {
    Key k = prefix + std::to_string(i);
    if (partition_for_key(k, partitions) == target) return k;
  }
}

std::vector<Key> keys_per_partition(const std::string& prefix, int partitions) {
  std::vector<Key> out;
  out.reserve(static_cast<std::size_t>(partitions));
  for (int n = 0; n < partitions; ++n) out.push_back(key_for_partition(prefix, n, partitions));
  return out;
}

int BasicWorkload::add_client(ReplicaId home, Factory factory, int chain_after) {
  factories_.push_back(std::move(factory));
  homes_.push_back(home);
  chains_.push_back(chain_after);
  return static_cast<int>(factories_.size()) - 1;
}

std::optional<sim::ClientDriver::Next> RoundRobinPutDriver::make(Micros delay) {
  if (i_ >= count_) return std::nullopt;
  const Key& k = keys_[static_cast<std::size_t>(i_) % keys_.size()];
  Value v = tag_ + "-" + std::to_string(i_);
  ++i_;
  return Next{delay, sim::OpPut{k, std::move(v)}};
}

std::optional<sim::ClientDriver::Next> CounterDriver::next(const sim::OpOutcome& prev, Rng&) {
  if (std::holds_alternative<sim::OpPut>(prev.op)) {
    return Next{poll_, sim::OpGet{key_}};
  }
  int value = 0;
  if (prev.value) value = std::stoi(*prev.value);
  if (value >= target_) return std::nullopt;
  if (value % 2 == parity_) {
    return Next{0, sim::OpPut{key_, std::to_string(value + 1)}};
  }
  return Next{poll_, sim::OpGet{key_}};
}

std::optional<sim::ClientDriver::Next> HotKeyWriterDriver::make(Micros delay, Rng& rng) {
  if (shared_->readers_active <= 0) return std::nullopt;
  const Key& k = keys_[rng.below(keys_.size())];
  Value v = tag_ + "-" + std::to_string(i_++);
  return Next{delay, sim::OpPut{k, std::move(v)}};
}

std::optional<sim::ClientDriver::Next> HotKeyReaderDriver::make(Micros delay, Rng& rng) {
  if (i_ >= ops_) {
    --shared_->readers_active;
    return std::nullopt;
  }
  ++i_;
  if (rng.coin()) {
    return Next{delay, sim::OpGet{keys_[rng.below(keys_.size())]}};
  }
  std::vector<Key> pick = keys_;
  // Deterministic partial shuffle for a distinct key subset.
  for (std::size_t j = 0; j < static_cast<std::size_t>(txn_size_) && j < pick.size(); ++j) {
    std::size_t r = j + rng.below(pick.size() - j);
    std::swap(pick[j], pick[r]);
  }
  pick.resize(std::min<std::size_t>(static_cast<std::size_t>(txn_size_), pick.size()));
  return Next{delay, sim::OpRotx{std::move(pick)}};
}

std::optional<sim::ClientDriver::Next> SoakDriver::make(Rng& rng) {
  if (i_ >= ops_) return std::nullopt;
  ++i_;
  Micros think = static_cast<Micros>(rng.below(3001));
  std::uint64_t roll = rng.below(100);
  if (roll < 40) {
    const Key& k = keys_[rng.below(keys_.size())];
    return Next{think, sim::OpPut{k, tag_ + "-" + std::to_string(i_)}};
  }
  if (roll < 80) {
    return Next{think, sim::OpGet{keys_[rng.below(keys_.size())]}};
  }
  std::size_t size = 2 + rng.below(3);  // 2..4
  std::vector<Key> pick = keys_;
  for (std::size_t j = 0; j < size && j < pick.size(); ++j) {
    std::size_t r = j + rng.below(pick.size() - j);
    std::swap(pick[j], pick[r]);
  }
  pick.resize(std::min(size, pick.size()));
  return Next{think, sim::OpRotx{std::move(pick)}};
}

}  // namespace causalkv::workload
