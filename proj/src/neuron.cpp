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

#include "switchnet/neuron.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "switchnet/error.hpp"
#include "switchnet/rng.hpp"

namespace switchnet {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
  }
  return "sigmoid";
}

Activation activation_from_string(const std::string& s) {
  if (s == "sigmoid") return Activation::kSigmoid;
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  throw Error(ErrorKind::kParse, "unknown activation '" + s + "'");
}

std::string to_string(Loss l) { return l == Loss::kMse ? "mse" : "bce"; }

Loss loss_from_string(const std::string& s) {
  if (s == "mse") return Loss::kMse;
  if (s == "bce") return Loss::kBce;
  throw Error(ErrorKind::kParse, "unknown loss '" + s + "'");
}

double activate(Activation a, double z) {
  switch (a) {
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-z));
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kTanh:
      return std::tanh(z);
  }
  return 0.0;
}

double activate_derivative(Activation a, double z) {
  switch (a) {
    case Activation::kSigmoid: {
      const double s = activate(a, z);
      return s * (1.0 - s);
    }
    case Activation::kRelu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 0.0;
}

bool NeuronUnit::finite() const {
  return std::isfinite(bias) &&
         std::all_of(weights.begin(), weights.end(),
                     [](double w) { return std::isfinite(w); });
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::kInvalidArgument, "learning rate must be > 0");
  }
  if (epochs < 1) {
    throw Error(ErrorKind::kInvalidArgument, "epochs must be >= 1");
  }
}

NeuronUnit init_unit(std::size_t dim, Activation activation, UnitIndex unit_index,
                     std::uint64_t seed) {
  if (dim == 0) {
    throw Error(ErrorKind::kInvalidArgument, "unit dimension must be >= 1");
  }
  Rng rng = make_rng(RngDomain::kInit, {seed, unit_index});
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  NeuronUnit unit;
  unit.weights.resize(dim);
  for (double& w : unit.weights) w = uniform(rng);
  unit.bias = 0.0;
  unit.activation = activation;
  unit.unit_index = unit_index;
  return unit;
}

namespace {

void check_dim(const NeuronUnit& unit, std::span<const double> x) {
  if (x.size() != unit.weights.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "input has " + std::to_string(x.size()) + " features, unit " +
                    std::to_string(unit.unit_index) + " expects " +
                    std::to_string(unit.weights.size()));
  }
}

void check_pairing(const NeuronUnit& unit, Loss loss) {
  if (loss == Loss::kBce && unit.activation != Activation::kSigmoid) {
    throw Error(ErrorKind::kInvalidArgument,
                "bce loss requires a sigmoid unit, got " + to_string(unit.activation));
  }
}

// softplus(z) - y*z == -[y log s(z) + (1-y) log(1 - s(z))]
double bce_from_logit(double z, int y) {
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return softplus - static_cast<double>(y) * z;
}

}  // namespace

double pre_activation(const NeuronUnit& unit, std::span<const double> x) {
  check_dim(unit, x);
  double z = unit.bias;
  for (std::size_t i = 0; i < x.size(); ++i) z += unit.weights[i] * x[i];
  return z;
}

double unit_forward(const NeuronUnit& unit, std::span<const double> x) {
  return activate(unit.activation, pre_activation(unit, x));
}

double unit_loss(const NeuronUnit& unit, std::span<const double> x, int y,
                 Loss loss) {
  check_pairing(unit, loss);
  const double z = pre_activation(unit, x);
  if (loss == Loss::kBce) return bce_from_logit(z, y);
  const double diff = activate(unit.activation, z) - static_cast<double>(y);
  return diff * diff;
}

Gradient unit_gradient(const NeuronUnit& unit, std::span<const double> x, int y,
                       Loss loss) {
  check_pairing(unit, loss);
  const double z = pre_activation(unit, x);
  const double yhat = activate(unit.activation, z);
  Gradient g;
  if (loss == Loss::kBce) {
    g.d_bias = yhat - static_cast<double>(y);
  } else {
    g.d_bias = 2.0 * (yhat - static_cast<double>(y)) *
               activate_derivative(unit.activation, z);
  }
  g.d_weights.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g.d_weights[i] = g.d_bias * x[i];
  return g;
}

Gradient fd_gradient(const NeuronUnit& unit, std::span<const double> x, int y,
                     Loss loss, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::kInvalidArgument, "step h must be > 0");
  check_dim(unit, x);
  NeuronUnit probe = unit;
  auto central = [&](double& param) {
    const double saved = param;
    param = saved + h;
    const double up = unit_loss(probe, x, y, loss);
    param = saved - h;
    const double down = unit_loss(probe, x, y, loss);
    param = saved;
    return (up - down) / (2.0 * h);
  };
  Gradient g;
  g.d_weights.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g.d_weights[i] = central(probe.weights[i]);
  g.d_bias = central(probe.bias);
  return g;
}

std::pair<NeuronUnit, TrainLog> train_unit(NeuronUnit unit,
                                           std::span<const Observation> subset,
                                           const TrainConfig& config,
                                           const ObservationVisitor& visit) {
  config.validate();
  if (subset.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "unit " + std::to_string(unit.unit_index) + " has an empty subset");
  }
  for (const auto& o : subset) check_dim(unit, o.features);
  check_pairing(unit, config.loss);

  TrainLog log;
  log.epoch_loss.reserve(static_cast<std::size_t>(config.epochs));
  std::vector<std::size_t> order(subset.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.shuffle) {
      Rng rng = make_rng(RngDomain::kShuffle,
                         {config.seed, unit.unit_index,
                          static_cast<std::uint64_t>(epoch)});
      std::shuffle(order.begin(), order.end(), rng);
    }
    double loss_sum = 0.0;
    for (std::size_t step = 0; step < order.size(); ++step) {
      const Observation& o = subset[order[step]];
      if (visit) visit(o);
      const double loss = unit_loss(unit, o.features, o.label, config.loss);
      if (!std::isfinite(loss)) {
        throw Error(ErrorKind::kTraining,
                    "non-finite loss for unit " + std::to_string(unit.unit_index) +
                        " at epoch " + std::to_string(epoch) + ", step " +
                        std::to_string(step));
      }
      loss_sum += loss;
      const Gradient g = unit_gradient(unit, o.features, o.label, config.loss);
      for (std::size_t i = 0; i < unit.weights.size(); ++i) {
        unit.weights[i] -= config.learning_rate * g.d_weights[i];
      }
      unit.bias -= config.learning_rate * g.d_bias;
      ++log.steps;
    }
    if (!unit.finite()) {
      throw Error(ErrorKind::kTraining,
                  "non-finite parameters for unit " + std::to_string(unit.unit_index) +
                      " after epoch " + std::to_string(epoch));
    }
    log.epoch_loss.push_back(loss_sum / static_cast<double>(subset.size()));
  }

  double final_sum = 0.0;
  for (const auto& o : subset) final_sum += unit_loss(unit, o.features, o.label, config.loss);
  log.final_loss = final_sum / static_cast<double>(subset.size());
  return {std::move(unit), std::move(log)};
}

}  // namespace switchnet
