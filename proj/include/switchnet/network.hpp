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

#ifndef SWITCHNET_NETWORK_HPP_
#define SWITCHNET_NETWORK_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "switchnet/data.hpp"
#include "switchnet/neuron.hpp"
#include "switchnet/switch_table.hpp"

namespace switchnet {

enum class AggregationKind { kRouterMean, kLinearReadout };

/// How gated unit activations combine into a score. router-mean averages
/// the active units; linear-readout computes sigmoid(weights . g + bias).
struct Aggregation {
  AggregationKind kind = AggregationKind::kRouterMean;
  std::vector<double> weights;
  double bias = 0.0;

  static Aggregation router_mean() { return {}; }
  static Aggregation linear_readout(std::vector<double> weights, double bias);

  friend bool operator==(const Aggregation&, const Aggregation&) = default;
};

std::string to_string(AggregationKind k);
AggregationKind aggregation_from_string(const std::string& s);

/// Trained units behind a switch. Immutable once assembled.
class ModularNetwork {
 public:
  const std::vector<NeuronUnit>& units() const noexcept { return units_; }
  const SwitchTable& switch_table() const noexcept { return switch_; }
  const Aggregation& aggregation() const noexcept { return aggregation_; }
  std::size_t n_units() const noexcept { return units_.size(); }
  std::size_t dim() const noexcept { return units_.front().dim(); }

  friend bool operator==(const ModularNetwork&, const ModularNetwork&) = default;

 private:
  friend ModularNetwork assemble(std::vector<NeuronUnit>, SwitchTable,
                                 Aggregation);
  std::vector<NeuronUnit> units_;
  SwitchTable switch_;
  Aggregation aggregation_;
};

/// Throws on an empty unit list, a switch/unit count mismatch, mixed
/// dimensions or a readout of the wrong length.
ModularNetwork assemble(std::vector<NeuronUnit> units, SwitchTable switch_table,
                        Aggregation aggregation = Aggregation::router_mean());

struct Prediction {
  double score = 0.5;
  int predicted_label = 1;
  ActivationMask active_mask;
  std::vector<double> gated_activations;
  // Set when no unit was active; the score is then fixed at 0.5 under
  // router-mean.
  bool empty_route = false;
};

/// Gated pass. Inactive units are not evaluated and contribute exactly 0.
/// `ablate`, when given, is forced inactive on top of the routed mask.
Prediction forward(const ModularNetwork& net, const Observation& obs,
                   std::optional<UnitIndex> ablate = std::nullopt);

/// Ungated pass: activation of every unit regardless of the switch.
std::vector<double> probe_activations(const ModularNetwork& net,
                                      std::span<const double> x);

enum class SetKind { kOverlapping, kNonOverlapping };
std::string to_string(SetKind k);

struct Metrics {
  double accuracy = 0.0;
  std::map<GroupId, double> per_group_accuracy;
  std::map<GroupId, std::size_t> per_group_n;
  std::size_t n = 0;
  SetKind set_kind = SetKind::kNonOverlapping;
};

Metrics evaluate(const ModularNetwork& net, std::span<const ObservationId> ids,
                 const Dataset& dataset, SetKind set_kind,
                 std::optional<UnitIndex> ablate = std::nullopt);

struct ReadoutFit {
  ModularNetwork network;
  TrainLog log;
};

/// Fits the linear readout by per-observation gradient descent (bce) on the
/// gated activation vectors of `ids`. Units are frozen. Starts from zero
/// readout parameters.
ReadoutFit fit_readout(const ModularNetwork& net,
                       std::span<const ObservationId> ids,
                       const Dataset& dataset, const TrainConfig& config);

struct ContributionRow {
  UnitIndex unit = 0;
  double full_accuracy = 0.0;
  double ablated_accuracy = 0.0;
  double contribution = 0.0;
};

struct ContributionReport {
  std::vector<ContributionRow> rows;
};

/// Accuracy drop when each unit in turn is forced inactive in every mask.
ContributionReport neuron_contribution(const ModularNetwork& net,
                                       std::span<const ObservationId> ids,
                                       const Dataset& dataset);

}  // namespace switchnet

#endif  // SWITCHNET_NETWORK_HPP_
