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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"
#include "switchnet/error.hpp"
#include "switchnet/neuron.hpp"

namespace switchnet {
namespace {

using testing::make_unit;

double sigmoid_oracle(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<Observation> observations(const std::vector<std::vector<double>>& xs,
                                      const std::vector<int>& ys) {
  std::vector<Observation> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.push_back({static_cast<ObservationId>(i), 0, ys[i], xs[i]});
  }
  return out;
}

TEST(InitUnit, DeterministicAndBiasZero) {
  const NeuronUnit a = init_unit(2, Activation::kSigmoid, 0, 42);
  const NeuronUnit b = init_unit(2, Activation::kSigmoid, 0, 42);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.bias, 0.0);
  EXPECT_EQ(a.unit_index, 0u);
  for (double w : a.weights) {
    EXPECT_GE(w, -0.5);
    EXPECT_LE(w, 0.5);
  }
}

TEST(InitUnit, UnitsZeroAndOneDifferPinned) {
  const NeuronUnit u0 = init_unit(2, Activation::kSigmoid, 0, 42);
  const NeuronUnit u1 = init_unit(2, Activation::kSigmoid, 1, 42);
  EXPECT_NE(u0.weights, u1.weights);
  // Regression values for seed 42.
  EXPECT_DOUBLE_EQ(u0.weights[0], 0.094793041466073813);
  EXPECT_DOUBLE_EQ(u0.weights[1], 0.24510966054165861);
  EXPECT_DOUBLE_EQ(u1.weights[0], -0.059156668620107988);
  EXPECT_DOUBLE_EQ(u1.weights[1], 0.47111491571767894);
}

TEST(InitUnit, UniformRangeOverManyDraws) {
  const NeuronUnit u = init_unit(20000, Activation::kTanh, 3, 9);
  double lo = 1, hi = -1, mean = 0;
  for (double w : u.weights) {
    lo = std::min(lo, w);
    hi = std::max(hi, w);
    mean += w;
  }
  mean /= static_cast<double>(u.weights.size());
  EXPECT_GE(lo, -0.5);
  EXPECT_LE(hi, 0.5);
  EXPECT_LT(lo, -0.49);
  EXPECT_GT(hi, 0.49);
  EXPECT_NEAR(mean, 0.0, 0.01);
}

TEST(InitUnit, ZeroDimensionIsRejected) {
  EXPECT_THROW(init_unit(0, Activation::kSigmoid, 0, 1), Error);
}

TEST(UnitForward, Examples) {
  const std::vector<double> x1{5.0, -3.0};
  EXPECT_EQ(unit_forward(make_unit({0, 0}, 0), x1), 0.5);
  const std::vector<double> x2{2.0, 1.0};
  EXPECT_NEAR(unit_forward(make_unit({1, -1}, 0), x2), 0.731059, 1e-6);
  EXPECT_DOUBLE_EQ(unit_forward(make_unit({1, -1}, 0), x2), sigmoid_oracle(1.0));
  const std::vector<double> x3{1.0, 0.0};
  EXPECT_EQ(unit_forward(make_unit({1, 0}, -2, Activation::kRelu), x3), 0.0);
  EXPECT_DOUBLE_EQ(unit_forward(make_unit({1, 0}, 0.5, Activation::kTanh), x3), std::tanh(1.5));
}

TEST(UnitForward, DimensionMismatch) {
  const std::vector<double> x{1.0};
  EXPECT_THROW(unit_forward(make_unit({1, 0}, 0), x), Error);
}

TEST(Activation, DerivativesAtKnownPoints) {
  EXPECT_EQ(activate_derivative(Activation::kSigmoid, 0.0), 0.25);
  EXPECT_EQ(activate_derivative(Activation::kRelu, 0.0), 0.0);
  EXPECT_EQ(activate_derivative(Activation::kRelu, 1e-9), 1.0);
  EXPECT_EQ(activate_derivative(Activation::kRelu, -1e-9), 0.0);
  EXPECT_EQ(activate_derivative(Activation::kTanh, 0.0), 1.0);
}

TEST(UnitGradient, SigmoidMseAtZeroWeights) {
  const std::vector<double> x{1.0, 1.0};
  const Gradient g = unit_gradient(make_unit({0, 0}, 0), x, 1, Loss::kMse);
  EXPECT_DOUBLE_EQ(g.d_bias, -0.25);
  EXPECT_EQ(g.d_weights, (std::vector<double>{-0.25, -0.25}));
}

TEST(UnitGradient, SigmoidBceAtZeroWeights) {
  const std::vector<double> x{1.0, 1.0};
  const Gradient g = unit_gradient(make_unit({0, 0}, 0), x, 1, Loss::kBce);
  EXPECT_DOUBLE_EQ(g.d_bias, -0.5);
  EXPECT_EQ(g.d_weights, (std::vector<double>{-0.5, -0.5}));
}

TEST(UnitGradient, BceRequiresSigmoid) {
  const std::vector<double> x{1.0, 1.0};
  EXPECT_THROW(unit_gradient(make_unit({0, 0}, 0, Activation::kRelu), x, 1, Loss::kBce), Error);
  EXPECT_THROW(unit_gradient(make_unit({0, 0}, 0, Activation::kTanh), x, 1, Loss::kBce), Error);
}

TEST(FdGradient, MatchesZeroWeightCase) {
  const std::vector<double> x{1.0, 1.0};
  const Gradient g = fd_gradient(make_unit({0, 0}, 0), x, 1, Loss::kMse);
  EXPECT_NEAR(g.d_bias, -0.25, 1e-8);
  EXPECT_NEAR(g.d_weights[0], -0.25, 1e-8);
  EXPECT_NEAR(g.d_weights[1], -0.25, 1e-8);
  EXPECT_THROW(fd_gradient(make_unit({0, 0}, 0), x, 1, Loss::kMse, 0.0), Error);
}

TEST(FdGradient, BceLossIsStableForLargeLogits) {
  const std::vector<double> x{1.0};
  const NeuronUnit u = make_unit({800.0}, 0);
  EXPECT_TRUE(std::isfinite(unit_loss(u, x, 0, Loss::kBce)));
  EXPECT_NEAR(unit_loss(u, x, 0, Loss::kBce), 800.0, 1e-9);
  EXPECT_NEAR(unit_loss(u, x, 1, Loss::kBce), 0.0, 1e-12);
}

double rel_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

TEST(GradientProperty, AnalyticMatchesFiniteDifferences) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> wdist(-1.5, 1.5), xdist(-2.0, 2.0);
  const std::vector<std::pair<Activation, Loss>> pairs{{Activation::kSigmoid, Loss::kMse},
                                                       {Activation::kSigmoid, Loss::kBce},
                                                       {Activation::kRelu, Loss::kMse},
                                                       {Activation::kTanh, Loss::kMse}};
  int checked = 0;
  double worst = 0.0;
  while (checked < 100) {
    const auto [act, loss] = pairs[rng() % pairs.size()];
    const std::size_t dim = 1 + rng() % 4;
    std::vector<double> w(dim), x(dim);
    for (auto& v : w) v = wdist(rng);
    for (auto& v : x) v = xdist(rng);
    const NeuronUnit u = make_unit(w, wdist(rng), act);
    if (act == Activation::kRelu && std::abs(pre_activation(u, x)) < 1e-4) continue;
    const int y = static_cast<int>(rng() % 2);
    const Gradient a = unit_gradient(u, x, y, loss);
    const Gradient f = fd_gradient(u, x, y, loss, 1e-5);
    worst = std::max(worst, rel_error(a.d_bias, f.d_bias));
    for (std::size_t i = 0; i < dim; ++i) {
      worst = std::max(worst, rel_error(a.d_weights[i], f.d_weights[i]));
    }
    ++checked;
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(TrainUnit, SingleSgdStep) {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 1;
  cfg.loss = Loss::kMse;
  const auto data = observations({{1.0, 1.0}}, {1});
  const auto [u, log] = train_unit(make_unit({0, 0}, 0), data, cfg);
  EXPECT_DOUBLE_EQ(u.weights[0], 0.025);
  EXPECT_DOUBLE_EQ(u.weights[1], 0.025);
  EXPECT_DOUBLE_EQ(u.bias, 0.025);
  EXPECT_EQ(log.steps, 1u);
  ASSERT_EQ(log.epoch_loss.size(), 1u);
  EXPECT_DOUBLE_EQ(log.epoch_loss[0], 0.25);
}

std::vector<Observation> separable_ten() {
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (int i = 0; i < 10; ++i) {
    const double t = -2.0 + 0.45 * i;
    xs.push_back({t, 0.3 * (i % 3) - 0.3});
    ys.push_back(t > 0 ? 1 : 0);
  }
  return observations(xs, ys);
}

TEST(TrainUnit, LossDecreasesOnSeparableSubset) {
  TrainConfig cfg;
  cfg.seed = 42;
  const auto data = separable_ten();
  const auto [u, log] = train_unit(init_unit(2, Activation::kSigmoid, 0, 42), data, cfg);
  ASSERT_EQ(log.epoch_loss.size(), 50u);
  EXPECT_EQ(log.steps, 500u);
  EXPECT_LT(log.final_loss, log.epoch_loss.front());
  EXPECT_LT(log.epoch_loss.back(), log.epoch_loss.front());
  EXPECT_TRUE(u.finite());
  for (const auto& o : data) EXPECT_EQ(unit_forward(u, o.features) >= 0.5 ? 1 : 0, o.label);
}

TEST(TrainUnit, DeterministicAndIsolated) {
  TrainConfig cfg;
  cfg.seed = 5;
  const auto data_a = separable_ten();
  const auto data_b = observations({{1, 2}, {-1, -2}, {0.5, 0.5}}, {1, 0, 1});
  const NeuronUnit a0 = init_unit(2, Activation::kSigmoid, 0, 5);
  const NeuronUnit b0 = init_unit(2, Activation::kSigmoid, 1, 5);

  const auto a_first = train_unit(a0, data_a, cfg).first;
  const auto b_second = train_unit(b0, data_b, cfg).first;
  const auto b_first = train_unit(b0, data_b, cfg).first;
  const auto a_second = train_unit(a0, data_a, cfg).first;
  EXPECT_EQ(a_first, a_second);
  EXPECT_EQ(b_first, b_second);
}

TEST(TrainUnit, ShuffleDependsOnSeedAndCanBeDisabled) {
  TrainConfig cfg;
  cfg.epochs = 3;
  std::vector<ObservationId> order_a, order_b, order_plain;
  const auto data = separable_ten();
  const NeuronUnit u = init_unit(2, Activation::kSigmoid, 0, 1);
  cfg.seed = 1;
  train_unit(u, data, cfg, [&](const Observation& o) { order_a.push_back(o.id); });
  cfg.seed = 2;
  train_unit(u, data, cfg, [&](const Observation& o) { order_b.push_back(o.id); });
  cfg.shuffle = false;
  train_unit(u, data, cfg, [&](const Observation& o) { order_plain.push_back(o.id); });
  ASSERT_EQ(order_a.size(), 30u);
  EXPECT_NE(order_a, order_b);
  for (std::size_t i = 0; i < order_plain.size(); ++i) EXPECT_EQ(order_plain[i], i % 10);
}

TEST(TrainUnit, Errors) {
  TrainConfig cfg;
  EXPECT_THROW(train_unit(make_unit({0, 0}, 0), std::vector<Observation>{}, cfg), Error);
  EXPECT_THROW(train_unit(make_unit({0}, 0), separable_ten(), cfg), Error);
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train_unit(make_unit({0, 0}, 0), separable_ten(), cfg), Error);
  cfg.learning_rate = 0.1;
  cfg.epochs = 0;
  EXPECT_THROW(train_unit(make_unit({0, 0}, 0), separable_ten(), cfg), Error);
}

TEST(TrainUnit, DivergenceAbortsNamingEpochAndStep) {
  TrainConfig cfg;
  cfg.loss = Loss::kMse;
  cfg.shuffle = false;
  // The squared error of a relu output near 1e308 overflows to inf.
  const auto data = observations({{1.0, 0.0}, {1e308, 0.0}}, {1, 1});
  try {
    train_unit(make_unit({0.5, 0.0}, 0, Activation::kRelu, 3), data, cfg);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTraining);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("unit 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("epoch 0, step 1"), std::string::npos) << msg;
  }
}

TEST(Enums, StringRoundTrip) {
  for (auto a : {Activation::kSigmoid, Activation::kRelu, Activation::kTanh}) {
    EXPECT_EQ(activation_from_string(to_string(a)), a);
  }
  for (auto l : {Loss::kMse, Loss::kBce}) EXPECT_EQ(loss_from_string(to_string(l)), l);
  EXPECT_THROW(activation_from_string("softmax"), Error);
}

}  // namespace
}  // namespace switchnet
