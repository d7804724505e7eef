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

#include "switchnet/federated.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <set>
#include <thread>

#include "switchnet/error.hpp"
#include "switchnet/rng.hpp"

namespace switchnet {

std::vector<Node> make_nodes(const PartitionSet& partitions, const Dataset& dataset,
                             std::vector<NeuronUnit> units) {
  if (units.size() != partitions.n_units()) {
    throw Error(ErrorKind::kInvalidArgument,
                std::to_string(units.size()) + " units for " +
                    std::to_string(partitions.n_units()) + " partition subsets");
  }
  check_partition(dataset, partitions);
  std::vector<Node> nodes;
  nodes.reserve(units.size());
  for (std::size_t k = 0; k < units.size(); ++k) {
    Node node;
    node.node_id = k;
    node.unit = std::move(units[k]);
    node.subset_ids = partitions.subsets[k];
    node.local_data.reserve(node.subset_ids.size());
    for (ObservationId id : node.subset_ids) node.local_data.push_back(dataset.at(id));
    nodes.push_back(std::move(node));
  }
  return nodes;
}

std::vector<ScheduleEntry> static_schedule(std::size_t n_nodes, std::size_t workers) {
  std::vector<ScheduleEntry> schedule;
  schedule.reserve(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) schedule.push_back({i, i % workers});
  return schedule;
}

TrainConfig node_train_config(const TrainConfig& config, std::size_t node_id) {
  TrainConfig c = config;
  c.seed = derive_node_seed(config.seed, node_id);
  return c;
}

FedResult run_local_training(std::span<const Node> nodes, const TrainConfig& config,
                             std::size_t workers) {
  if (workers < 1) throw Error(ErrorKind::kInvalidArgument, "workers must be >= 1");
  config.validate();
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].node_id != i) {
      throw Error(ErrorKind::kInvalidArgument,
                  "node ids must be 0..n-1 in order (position " + std::to_string(i) +
                      " holds node " + std::to_string(nodes[i].node_id) + ")");
    }
  }

  FedResult result;
  result.units.resize(n);
  result.report.logs.resize(n);
  result.report.duration_ms.assign(n, 0.0);
  result.report.observed_ids.resize(n);
  result.report.workers = workers;
  result.report.schedule = static_schedule(n, workers);
  std::vector<std::exception_ptr> failures(n);

  // Each slot is written by exactly one worker, so no locking is needed.
  auto train_node = [&](std::size_t i) {
    const Node& node = nodes[i];
    std::set<ObservationId> seen;
    const auto start = std::chrono::steady_clock::now();
    try {
      auto [unit, log] =
          train_unit(node.unit, node.local_data, node_train_config(config, i),
                     [&seen](const Observation& o) { seen.insert(o.id); });
      result.units[i] = std::move(unit);
      result.report.logs[i] = std::move(log);
    } catch (...) {
      failures[i] = std::current_exception();
    }
    const auto stop = std::chrono::steady_clock::now();
    result.report.duration_ms[i] =
        std::chrono::duration<double, std::milli>(stop - start).count();
    result.report.observed_ids[i].assign(seen.begin(), seen.end());
  };

  const auto wall_start = std::chrono::steady_clock::now();
  const std::size_t pool = std::min(workers, std::max<std::size_t>(n, 1));
  if (pool <= 1) {
    for (std::size_t i = 0; i < n; ++i) train_node(i);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(pool);
    for (std::size_t w = 0; w < pool; ++w) {
      threads.emplace_back([&, w] {
        for (const auto& entry : result.report.schedule) {
          if (entry.worker_id == w) train_node(entry.node_id);
        }
      });
    }
  }
  result.report.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - wall_start)
                              .count();

  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "node " + std::to_string(i) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::kTraining, "node " + std::to_string(i) + ": " + e.what());
    }
  }
  return result;
}

std::vector<Node> with_trained_units(std::vector<Node> nodes,
                                     std::span<const NeuronUnit> units) {
  if (nodes.size() != units.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                std::to_string(units.size()) + " trained units for " +
                    std::to_string(nodes.size()) + " nodes");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].unit = units[i];
  return nodes;
}

ModularNetwork collect(std::span<const Node> nodes, SwitchTable switch_table,
                       Aggregation aggregation) {
  std::vector<const Node*> ordered;
  ordered.reserve(nodes.size());
  for (const auto& n : nodes) ordered.push_back(&n);
  std::sort(ordered.begin(), ordered.end(),
            [](const Node* a, const Node* b) { return a->node_id < b->node_id; });
  std::vector<NeuronUnit> units;
  units.reserve(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (ordered[i]->node_id != i) {
      throw Error(ErrorKind::kInvalidArgument,
                  "missing node " + std::to_string(i) + " during collection");
    }
    units.push_back(ordered[i]->unit);
  }
  return assemble(std::move(units), std::move(switch_table), std::move(aggregation));
}

}  // namespace switchnet
