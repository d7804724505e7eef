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

#include "switchnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "switchnet/error.hpp"
#include "switchnet/rng.hpp"

namespace switchnet {

Aggregation Aggregation::linear_readout(std::vector<double> weights, double bias) {
  Aggregation a;
  a.kind = AggregationKind::kLinearReadout;
  a.weights = std::move(weights);
  a.bias = bias;
  return a;
}

std::string to_string(AggregationKind k) {
  return k == AggregationKind::kRouterMean ? "router-mean" : "linear-readout";
}

AggregationKind aggregation_from_string(const std::string& s) {
  if (s == "router-mean") return AggregationKind::kRouterMean;
  if (s == "linear-readout") return AggregationKind::kLinearReadout;
  throw Error(ErrorKind::kParse, "unknown aggregation '" + s + "'");
}

std::string to_string(SetKind k) {
  return k == SetKind::kOverlapping ? "overlapping" : "non-overlapping";
}

ModularNetwork assemble(std::vector<NeuronUnit> units, SwitchTable switch_table,
                        Aggregation aggregation) {
  if (units.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "a network needs at least one unit");
  }
  if (switch_table.n_units() != units.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "switch covers " + std::to_string(switch_table.n_units()) +
                    " units but " + std::to_string(units.size()) + " were given");
  }
  const std::size_t dim = units.front().dim();
  for (const auto& u : units) {
    if (u.dim() != dim || dim == 0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "unit " + std::to_string(u.unit_index) + " has dimension " +
                      std::to_string(u.dim()) + ", expected " + std::to_string(dim));
    }
  }
  if (aggregation.kind == AggregationKind::kLinearReadout) {
    if (aggregation.weights.empty()) aggregation.weights.assign(units.size(), 0.0);
    if (aggregation.weights.size() != units.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "readout has " + std::to_string(aggregation.weights.size()) +
                      " weights for " + std::to_string(units.size()) + " units");
    }
  } else {
    aggregation.weights.clear();
    aggregation.bias = 0.0;
  }
  ModularNetwork net;
  net.units_ = std::move(units);
  net.switch_ = std::move(switch_table);
  net.aggregation_ = std::move(aggregation);
  return net;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double readout_score(const Aggregation& agg, std::span<const double> gated) {
  double z = agg.bias;
  for (std::size_t u = 0; u < gated.size(); ++u) z += agg.weights[u] * gated[u];
  return sigmoid(z);
}

}  // namespace

Prediction forward(const ModularNetwork& net, const Observation& obs,
                   std::optional<UnitIndex> ablate) {
  if (obs.features.size() != net.dim()) {
    throw Error(ErrorKind::kInvalidArgument,
                "observation " + std::to_string(obs.id) + " has " +
                    std::to_string(obs.features.size()) + " features, network expects " +
                    std::to_string(net.dim()));
  }
  Prediction p;
  p.active_mask = route(net.switch_table(), obs.group);
  if (ablate && *ablate < p.active_mask.size()) p.active_mask.bits[*ablate] = false;

  p.gated_activations.assign(net.n_units(), 0.0);
  double active_sum = 0.0;
  std::size_t active = 0;
  for (std::size_t u = 0; u < net.n_units(); ++u) {
    if (!p.active_mask[u]) continue;
    p.gated_activations[u] = unit_forward(net.units()[u], obs.features);
    active_sum += p.gated_activations[u];
    ++active;
  }
  p.empty_route = active == 0;
  if (net.aggregation().kind == AggregationKind::kRouterMean) {
    p.score = active == 0 ? 0.5 : active_sum / static_cast<double>(active);
  } else {
    p.score = readout_score(net.aggregation(), p.gated_activations);
  }
  p.predicted_label = p.score >= 0.5 ? 1 : 0;
  return p;
}

std::vector<double> probe_activations(const ModularNetwork& net,
                                      std::span<const double> x) {
  std::vector<double> out;
  out.reserve(net.n_units());
  for (const auto& u : net.units()) out.push_back(unit_forward(u, x));
  return out;
}

Metrics evaluate(const ModularNetwork& net, std::span<const ObservationId> ids,
                 const Dataset& dataset, SetKind set_kind,
                 std::optional<UnitIndex> ablate) {
  if (ids.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "evaluation id list is empty");
  }
  Metrics m;
  m.set_kind = set_kind;
  std::map<GroupId, std::size_t> correct_by_group;
  std::size_t correct = 0;
  for (ObservationId id : ids) {
    const Observation& o = dataset.at(id);
    const Prediction p = forward(net, o, ablate);
    const bool hit = p.predicted_label == o.label;
    correct += hit ? 1 : 0;
    correct_by_group[o.group] += hit ? 1 : 0;
    ++m.per_group_n[o.group];
  }
  m.n = ids.size();
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.n);
  for (const auto& [g, n] : m.per_group_n) {
    m.per_group_accuracy[g] =
        static_cast<double>(correct_by_group[g]) / static_cast<double>(n);
  }
  return m;
}

ReadoutFit fit_readout(const ModularNetwork& net, std::span<const ObservationId> ids,
                       const Dataset& dataset, const TrainConfig& config) {
  if (net.aggregation().kind != AggregationKind::kLinearReadout) {
    throw Error(ErrorKind::kInvalidArgument,
                "fit_readout needs a linear-readout network");
  }
  if (ids.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "calibration id list is empty");
  }
  config.validate();

  // Gated activations depend only on the frozen units, so compute them once.
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  features.reserve(ids.size());
  for (ObservationId id : ids) {
    const Observation& o = dataset.at(id);
    features.push_back(forward(net, o).gated_activations);
    labels.push_back(o.label);
  }

  std::vector<double> w(net.n_units(), 0.0);
  double b = 0.0;
  auto loss_at = [&](std::size_t i) {
    double z = b;
    for (std::size_t u = 0; u < w.size(); ++u) z += w[u] * features[i][u];
    const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    return std::pair{softplus - static_cast<double>(labels[i]) * z, sigmoid(z)};
  };

  TrainLog log;
  std::vector<std::size_t> order(ids.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.shuffle) {
      Rng rng = make_rng(RngDomain::kReadout,
                         {config.seed, static_cast<std::uint64_t>(epoch)});
      std::shuffle(order.begin(), order.end(), rng);
    }
    double sum = 0.0;
    for (std::size_t step = 0; step < order.size(); ++step) {
      const std::size_t i = order[step];
      const auto [loss, score] = loss_at(i);
      if (!std::isfinite(loss)) {
        throw Error(ErrorKind::kTraining,
                    "non-finite readout loss at epoch " + std::to_string(epoch) +
                        ", step " + std::to_string(step));
      }
      sum += loss;
      const double g = score - static_cast<double>(labels[i]);
      for (std::size_t u = 0; u < w.size(); ++u) {
        w[u] -= config.learning_rate * g * features[i][u];
      }
      b -= config.learning_rate * g;
      ++log.steps;
    }
    log.epoch_loss.push_back(sum / static_cast<double>(ids.size()));
  }
  double final_sum = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) final_sum += loss_at(i).first;
  log.final_loss = final_sum / static_cast<double>(ids.size());

  ReadoutFit out{assemble(net.units(), net.switch_table(),
                          Aggregation::linear_readout(std::move(w), b)),
                 std::move(log)};
  return out;
}

ContributionReport neuron_contribution(const ModularNetwork& net,
                                       std::span<const ObservationId> ids,
                                       const Dataset& dataset) {
  const Metrics full = evaluate(net, ids, dataset, SetKind::kNonOverlapping);
  ContributionReport report;
  for (std::size_t u = 0; u < net.n_units(); ++u) {
    const Metrics ablated = evaluate(net, ids, dataset, SetKind::kNonOverlapping, u);
    ContributionRow row;
    row.unit = u;
    row.full_accuracy = full.accuracy;
    row.ablated_accuracy = ablated.accuracy;
    row.contribution = full.accuracy - ablated.accuracy;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace switchnet
