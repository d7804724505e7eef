/* Copyright 2026 The switchnet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// In-process simulation of decentralized training. Each node owns one unit
// and a private copy of its subset; the coordinator only dispatches work and
// gathers the trained units.

#ifndef SWITCHNET_FEDERATED_HPP_
#define SWITCHNET_FEDERATED_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "switchnet/data.hpp"
#include "switchnet/network.hpp"
#include "switchnet/neuron.hpp"

namespace switchnet {

struct Node {
  std::size_t node_id = 0;
  NeuronUnit unit;
  std::vector<ObservationId> subset_ids;
  std::vector<Observation> local_data;  // copied, never aliased
};

struct ScheduleEntry {
  std::size_t node_id = 0;
  std::size_t worker_id = 0;
};

struct FedRunReport {
  std::vector<TrainLog> logs;             // indexed by node id
  std::vector<double> duration_ms;        // indexed by node id
  std::vector<std::vector<ObservationId>> observed_ids;  // sorted, unique
  std::size_t workers = 1;
  std::vector<ScheduleEntry> schedule;
  double wall_ms = 0.0;
};

struct FedResult {
  std::vector<NeuronUnit> units;  // indexed by node id
  FedRunReport report;
};

/// Node k receives units[k] and a copy of subset k's observations.
std::vector<Node> make_nodes(const PartitionSet& partitions,
                             const Dataset& dataset,
                             std::vector<NeuronUnit> units);

/// Static schedule: node i runs on worker i % workers.
std::vector<ScheduleEntry> static_schedule(std::size_t n_nodes,
                                           std::size_t workers);

/// Trains every node's unit on its local data with seed
/// derive_node_seed(config.seed, node_id). Output is independent of the
/// worker count.
FedResult run_local_training(std::span<const Node> nodes,
                             const TrainConfig& config, std::size_t workers);

/// Copies of `nodes` carrying the trained units.
std::vector<Node> with_trained_units(std::vector<Node> nodes,
                                     std::span<const NeuronUnit> units);

/// Assembles node units in node-id order. Throws if ids are not exactly
/// 0..n-1.
ModularNetwork collect(std::span<const Node> nodes, SwitchTable switch_table,
                       Aggregation aggregation = Aggregation::router_mean());

/// The config a single node trains with.
TrainConfig node_train_config(const TrainConfig& config, std::size_t node_id);

}  // namespace switchnet

#endif  // SWITCHNET_FEDERATED_HPP_
