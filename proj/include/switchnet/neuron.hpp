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

#ifndef SWITCHNET_NEURON_HPP_
#define SWITCHNET_NEURON_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "switchnet/data.hpp"

namespace switchnet {

enum class Activation { kSigmoid, kRelu, kTanh };
enum class Loss { kMse, kBce };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);
std::string to_string(Loss l);
Loss loss_from_string(const std::string& s);

double activate(Activation a, double z);
/// Derivative of the activation at pre-activation z. relu'(0) is 0.
double activate_derivative(Activation a, double z);

/// Single-node perceptron: act(w . x + b).
struct NeuronUnit {
  std::vector<double> weights;
  double bias = 0.0;
  Activation activation = Activation::kSigmoid;
  UnitIndex unit_index = 0;

  std::size_t dim() const noexcept { return weights.size(); }
  bool finite() const;

  friend bool operator==(const NeuronUnit&, const NeuronUnit&) = default;
};

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 50;
  Loss loss = Loss::kBce;
  std::uint64_t seed = 0;
  bool shuffle = true;

  void validate() const;
};

struct TrainLog {
  std::vector<double> epoch_loss;  // mean loss over each epoch's steps
  double final_loss = 0.0;         // mean loss of the trained parameters
  std::size_t steps = 0;
};

struct Gradient {
  std::vector<double> d_weights;
  double d_bias = 0.0;
};

/// Weights uniform in [-0.5, 0.5] from a generator keyed by
/// (seed, unit_index); bias 0.
NeuronUnit init_unit(std::size_t dim, Activation activation,
                     UnitIndex unit_index, std::uint64_t seed);

double pre_activation(const NeuronUnit& unit, std::span<const double> x);
double unit_forward(const NeuronUnit& unit, std::span<const double> x);

/// Loss of a single prediction. bce is evaluated from the pre-activation
/// when the unit is sigmoid so it stays finite for saturated outputs.
double unit_loss(const NeuronUnit& unit, std::span<const double> x, int y,
                 Loss loss);

/// Analytic gradient. bce is only defined for sigmoid units.
Gradient unit_gradient(const NeuronUnit& unit, std::span<const double> x, int y,
                       Loss loss);

/// Central finite differences of unit_loss. Unreliable for relu units whose
/// pre-activation sits within h of the kink.
Gradient fd_gradient(const NeuronUnit& unit, std::span<const double> x, int y,
                     Loss loss, double h = 1e-5);

/// Called with every observation the trainer reads, in visiting order.
using ObservationVisitor = std::function<void(const Observation&)>;

/// Per-observation gradient descent over `subset` for config.epochs epochs.
/// Epoch order is shuffled by a generator keyed by (config.seed,
/// unit_index, epoch) when config.shuffle is set. Reads and writes nothing
/// but the returned copy of `unit`.
std::pair<NeuronUnit, TrainLog> train_unit(
    NeuronUnit unit, std::span<const Observation> subset,
    const TrainConfig& config, const ObservationVisitor& visit = {});

}  // namespace switchnet

#endif  // SWITCHNET_NEURON_HPP_
