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

// Config-driven experiment: generate -> partition -> local training ->
// collect -> (readout) -> evaluate -> analyze -> write bundle.

#ifndef SWITCHNET_PIPELINE_HPP_
#define SWITCHNET_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "switchnet/analysis.hpp"
#include "switchnet/data.hpp"
#include "switchnet/federated.hpp"
#include "switchnet/network.hpp"
#include "switchnet/neuron.hpp"
#include "switchnet/serialize.hpp"
#include "switchnet/switch_table.hpp"
#include "switchnet/version.hpp"

namespace switchnet {

struct ExperimentConfig {
  std::uint64_t seed = 42;

  // data: either synthetic specs or a dataset CSV path.
  std::vector<GroupSpec> group_specs;
  std::size_t eval_per_group = 5;
  std::optional<std::filesystem::path> dataset_path;

  PartitionPlan plan;
  double holdout_fraction = 0.2;

  SwitchTable switch_table;

  TrainConfig train;
  Activation activation = Activation::kSigmoid;
  std::size_t workers = 0;  // 0: one worker per unit

  AggregationKind aggregation = AggregationKind::kRouterMean;
  Statistic statistic = Statistic::kMean;

  std::filesystem::path output_dir = "switchnet_out";

  std::size_t n_units() const { return plan.assignments.size(); }
  std::size_t effective_workers() const {
    return workers == 0 ? n_units() : workers;
  }
};

/// The five-group, five-unit experiment (20/30/10/20/20 split, identity
/// switch) as a config document.
Json default_config_json();

/// Applies `key=value` overrides with dotted keys, e.g. `train.epochs=100`.
/// Values parse as JSON when possible, otherwise as strings.
void apply_overrides(Json& config, const std::vector<std::string>& overrides);

/// Parses and cross-validates a config document. Throws Error(kConfig).
ExperimentConfig parse_config(const Json& config);

/// Specs with `extra` observations added to every group: the extra points
/// form the unseen evaluation pool once the plan has drawn its subsets.
std::vector<GroupSpec> with_eval_pool(std::vector<GroupSpec> specs,
                                      std::size_t extra);

// Stages shared by run_pipeline and the individual CLI subcommands. Each
// run_* is pure; each write_* lays its artifacts out under a directory with
// fixed file names.

struct FedOutcome {
  FedResult result;
  ModularNetwork network;
  std::optional<TrainLog> readout_log;
};

/// init_unit(dim, activation, k, train.seed) per subset, local training,
/// collection, and a readout fit on the partitioned ids when requested.
FedOutcome run_fedsim(const Dataset& dataset, const PartitionSet& partitions,
                      const SwitchTable& switch_table, AggregationKind aggregation,
                      Activation activation, const TrainConfig& train,
                      std::size_t workers);
void write_fed_outputs(const std::filesystem::path& dir, const FedOutcome& outcome);

/// Trains the unit for one subset exactly as node `subset` would.
std::pair<NeuronUnit, TrainLog> train_subset(const Dataset& dataset,
                                             const PartitionSet& partitions,
                                             std::size_t subset,
                                             Activation activation,
                                             const TrainConfig& train);

struct EvalOutcome {
  TestSets sets;
  Metrics overlapping;
  Metrics non_overlapping;
  ContributionReport contribution;  // on the non-overlapping set
};

EvalOutcome run_evaluation(const ModularNetwork& net, const Dataset& dataset,
                           const PartitionSet& partitions, double holdout_fraction,
                           std::uint64_t seed);
void write_eval_outputs(const std::filesystem::path& dir, const EvalOutcome& outcome);

struct AnalysisOutcome {
  HeatmapMatrix matrix;
  AttributionReport attribution;
};

/// Heatmap over the union of both test sets.
AnalysisOutcome run_analysis(const ModularNetwork& net, const Dataset& dataset,
                             const PartitionSet& partitions, double holdout_fraction,
                             std::uint64_t seed, Statistic statistic);
void write_analysis_outputs(const std::filesystem::path& dir,
                            const AnalysisOutcome& outcome);

struct ReportBundle {
  std::map<std::string, std::filesystem::path> artifacts;
  std::filesystem::path manifest;
};

/// Runs every stage. Config errors raise Error(kConfig) before anything is
/// written; stage failures raise Error(kRuntime) naming the stage.
ReportBundle run_pipeline(const Json& config);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace switchnet

#endif  // SWITCHNET_PIPELINE_HPP_
