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
#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "support.hpp"
#include "switchnet/error.hpp"
#include "switchnet/network.hpp"
#include "switchnet/serialize.hpp"

namespace switchnet {
namespace {

using testing::make_unit;
using testing::zero_units;

std::vector<NeuronUnit> random_units(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<NeuronUnit> units;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> w(dim);
    for (auto& v : w) v = d(rng);
    units.push_back(make_unit(w, d(rng), Activation::kSigmoid, k));
  }
  return units;
}

bool same_bits(const Prediction& a, const Prediction& b) {
  if (std::bit_cast<std::uint64_t>(a.score) != std::bit_cast<std::uint64_t>(b.score)) return false;
  if (a.predicted_label != b.predicted_label || a.active_mask != b.active_mask) return false;
  if (a.gated_activations.size() != b.gated_activations.size()) return false;
  for (std::size_t i = 0; i < a.gated_activations.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a.gated_activations[i]) !=
        std::bit_cast<std::uint64_t>(b.gated_activations[i])) {
      return false;
    }
  }
  return true;
}

// Group g sits at x0 = 3g; the label is the sign of x1. Unit g thresholds x1.
Dataset separable_dataset(std::size_t per_group) {
  std::vector<GroupInfo> groups;
  std::vector<Observation> obs;
  ObservationId id = 0;
  for (GroupId g = 0; g < 5; ++g) {
    groups.push_back({g, "g" + std::to_string(g)});
    for (std::size_t i = 0; i < per_group; ++i) {
      const double x1 = (i % 2 == 0 ? 1.0 : -1.0) * (0.5 + 0.1 * static_cast<double>(i));
      obs.push_back({id++, g, x1 > 0 ? 1 : 0, {3.0 * g, x1}});
    }
  }
  return Dataset(2, groups, obs);
}

std::vector<NeuronUnit> separating_units() {
  std::vector<NeuronUnit> units;
  for (UnitIndex k = 0; k < 5; ++k) units.push_back(make_unit({0.0, 6.0}, 0.0, Activation::kSigmoid, k));
  return units;
}

TEST(Assemble, Valid) {
  const ModularNetwork net = assemble(zero_units(5, 2), identity_switch(5));
  EXPECT_EQ(net.n_units(), 5u);
  EXPECT_EQ(net.dim(), 2u);
  EXPECT_EQ(net.aggregation().kind, AggregationKind::kRouterMean);
}

TEST(Assemble, Errors) {
  EXPECT_THROW(assemble(zero_units(5, 2), identity_switch(4)), Error);
  EXPECT_THROW(assemble({}, identity_switch(1)), Error);
  auto units = zero_units(2, 2);
  units[1].weights.push_back(0.0);
  EXPECT_THROW(assemble(units, identity_switch(2)), Error);
  EXPECT_THROW(assemble(zero_units(2, 2), identity_switch(2),
                        Aggregation::linear_readout({1.0, 2.0, 3.0}, 0.0)),
               Error);
}

TEST(Assemble, EmptyReadoutWeightsStartAtZero) {
  const ModularNetwork net =
      assemble(zero_units(3, 2), identity_switch(3), Aggregation::linear_readout({}, 0.0));
  EXPECT_EQ(net.aggregation().weights, (std::vector<double>{0, 0, 0}));
}

TEST(Forward, IdentityOnlyRoutedUnitActive) {
  std::mt19937_64 rng(1);
  const ModularNetwork net = assemble(random_units(5, 2, rng), identity_switch(5));
  const Observation o{0, 2, 1, {0.3, -0.7}};
  const Prediction p = forward(net, o);
  for (UnitIndex u = 0; u < 5; ++u) {
    if (u == 2) {
      EXPECT_NE(p.gated_activations[u], 0.0);
    } else {
      EXPECT_EQ(p.gated_activations[u], 0.0);
    }
  }
  EXPECT_EQ(p.score, unit_forward(net.units()[2], o.features));
  EXPECT_EQ(p.predicted_label, p.score >= 0.5 ? 1 : 0);
}

TEST(Forward, ZeroWeightsTieResolvesToOne) {
  const ModularNetwork net = assemble(zero_units(5, 2), identity_switch(5, Fallback::kAllActive));
  for (GroupId g : {0u, 3u, 11u}) {
    const Prediction p = forward(net, {0, g, 0, {4.0, -1.0}});
    EXPECT_EQ(p.score, 0.5);
    EXPECT_EQ(p.predicted_label, 1);
  }
}

TEST(Forward, GroupOfUnitsMeanAndEmptyRoute) {
  std::mt19937_64 rng(2);
  const auto units = random_units(5, 2, rng);
  const SwitchTable sw = build_switch(5, {{0, {1, 3}}}, Fallback::kNoneActive).table;
  const ModularNetwork net = assemble(units, sw);
  const Observation o{0, 0, 1, {0.2, 0.9}};
  const Prediction p = forward(net, o);
  EXPECT_DOUBLE_EQ(p.score, (unit_forward(units[1], o.features) + unit_forward(units[3], o.features)) / 2);
  const Prediction empty = forward(net, {0, 4, 1, {0.2, 0.9}});
  EXPECT_TRUE(empty.empty_route);
  EXPECT_EQ(empty.score, 0.5);
  EXPECT_EQ(empty.predicted_label, 1);
  EXPECT_EQ(empty.gated_activations, std::vector<double>(5, 0.0));
}

TEST(Forward, RoutingErrorPropagates) {
  const ModularNetwork net = assemble(zero_units(2, 2), identity_switch(2));
  try {
    forward(net, {0, 5, 0, {0, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRouting);
  }
  EXPECT_THROW(forward(net, {0, 0, 0, {0}}), Error);
}

TEST(Forward, LinearReadoutScore) {
  std::mt19937_64 rng(3);
  const auto units = random_units(3, 2, rng);
  const SwitchTable sw = build_switch(3, {{0, {0, 2}}}).table;
  const ModularNetwork net = assemble(units, sw, Aggregation::linear_readout({0.5, -7.0, 1.5}, -0.25));
  const Observation o{0, 0, 1, {1.0, -0.5}};
  const double z = 0.5 * unit_forward(units[0], o.features) + 1.5 * unit_forward(units[2], o.features) - 0.25;
  EXPECT_NEAR(forward(net, o).score, 1.0 / (1.0 + std::exp(-z)), 1e-15);
}

TEST(Forward, AblationForcesUnitInactive) {
  std::mt19937_64 rng(4);
  const SwitchTable sw = build_switch(3, {{0, {0, 1}}}).table;
  const ModularNetwork net = assemble(random_units(3, 2, rng), sw);
  const Observation o{0, 0, 1, {1.0, -0.5}};
  const Prediction p = forward(net, o, 1);
  EXPECT_FALSE(p.active_mask[1]);
  EXPECT_EQ(p.gated_activations[1], 0.0);
  EXPECT_EQ(p.score, unit_forward(net.units()[0], o.features));
}

TEST(GatingProperty, PerturbingInactiveUnitsIsBitInvisible) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    std::map<GroupId, std::set<UnitIndex>> entries;
    for (GroupId g = 0; g < 4; ++g) {
      entries[g] = {rng() % n};
      if (rng() % 2) entries[g].insert(rng() % n);
    }
    const SwitchTable sw = build_switch(n, entries).table;
    auto units = random_units(n, 3, rng);
    const bool readout = rng() % 2 == 0;
    std::vector<double> rw(n);
    for (auto& v : rw) v = d(rng);
    const Aggregation agg = readout ? Aggregation::linear_readout(rw, d(rng)) : Aggregation::router_mean();
    const Observation o{0, static_cast<GroupId>(rng() % 4), 0, {d(rng), d(rng), d(rng)}};
    const Prediction base = forward(assemble(units, sw, agg), o);
    const ActivationMask mask = route(sw, o.group);
    for (UnitIndex u = 0; u < n; ++u) {
      if (mask[u]) continue;
      for (auto& w : units[u].weights) w = d(rng) * 1e6;
      units[u].bias = std::nan("");
      units[u].activation = Activation::kRelu;
    }
    const Prediction perturbed = forward(assemble(units, sw, agg), o);
    ASSERT_TRUE(same_bits(base, perturbed)) << "trial " << trial;
  }
}

TEST(ZeroActivationLaw, InactiveEntriesAreExactlyZero) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  const ModularNetwork net = assemble(random_units(5, 2, rng), identity_switch(5));
  for (int i = 0; i < 1000; ++i) {
    const Observation o{0, static_cast<GroupId>(rng() % 5), 0, {d(rng), d(rng)}};
    const Prediction p = forward(net, o);
    const auto probe = probe_activations(net, o.features);
    for (UnitIndex u = 0; u < 5; ++u) {
      if (p.active_mask[u]) {
        ASSERT_EQ(p.gated_activations[u], probe[u]);
      } else {
        ASSERT_EQ(std::bit_cast<std::uint64_t>(p.gated_activations[u]), 0u);
      }
    }
  }
}

TEST(Probe, Examples) {
  const std::vector<double> x{2.0, 1.0};
  EXPECT_EQ(probe_activations(assemble(zero_units(5, 2), identity_switch(5)), x),
            std::vector<double>(5, 0.5));
  auto units = zero_units(2, 2);
  units[1].weights = {1.0, -1.0};
  const auto probe = probe_activations(assemble(units, identity_switch(2)), x);
  EXPECT_NEAR(probe[1], 0.731059, 1e-6);
}

TEST(Evaluate, SeparableUnitsScorePerfectly) {
  const Dataset ds = separable_dataset(8);
  const ModularNetwork net = assemble(separating_units(), identity_switch(5));
  const auto ids = ds.ids();
  const Metrics m = evaluate(net, ids, ds, SetKind::kNonOverlapping);
  std::size_t correct = 0;
  for (const auto& o : ds.observations()) {
    const double z = 6.0 * o.features[1];
    correct += ((1.0 / (1.0 + std::exp(-z)) >= 0.5 ? 1 : 0) == o.label);
  }
  EXPECT_EQ(correct, ds.size());
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.n, ds.size());
  for (const auto& [g, acc] : m.per_group_accuracy) EXPECT_EQ(acc, 1.0);
}

TEST(Evaluate, RecomposesAndIsOrderIndependent) {
  std::mt19937_64 rng(6);
  const Dataset ds = testing::default_dataset();
  const ModularNetwork net = assemble(random_units(5, 2, rng), identity_switch(5));
  auto ids = ds.ids();
  const Metrics m = evaluate(net, ids, ds, SetKind::kOverlapping);
  double recomposed = 0.0;
  std::size_t total = 0;
  for (const auto& [g, acc] : m.per_group_accuracy) {
    recomposed += acc * static_cast<double>(m.per_group_n.at(g));
    total += m.per_group_n.at(g);
  }
  EXPECT_EQ(total, m.n);
  EXPECT_NEAR(recomposed / static_cast<double>(m.n), m.accuracy, 1e-12);
  std::shuffle(ids.begin(), ids.end(), rng);
  const Metrics shuffled = evaluate(net, ids, ds, SetKind::kOverlapping);
  EXPECT_EQ(shuffled.accuracy, m.accuracy);
  EXPECT_EQ(shuffled.per_group_accuracy, m.per_group_accuracy);
}

TEST(Evaluate, Errors) {
  const Dataset ds = separable_dataset(2);
  const ModularNetwork net = assemble(separating_units(), identity_switch(5));
  EXPECT_THROW(evaluate(net, std::vector<ObservationId>{}, ds, SetKind::kOverlapping), Error);
  EXPECT_THROW(evaluate(net, std::vector<ObservationId>{999}, ds, SetKind::kOverlapping), Error);
}

// Group 0 is all ones, group 1 all zeros; relu units with constant output
// equal to their group's label.
struct ReadoutFixture {
  Dataset ds;
  ModularNetwork net;
  ReadoutFixture()
      : ds(1, {{0, "ones"}, {1, "zeros"}},
           {{0, 0, 1, {0.3}}, {1, 0, 1, {-0.2}}, {2, 1, 0, {0.9}}, {3, 1, 0, {0.1}},
            {4, 0, 1, {1.1}}, {5, 1, 0, {-0.4}}}),
        net(assemble({make_unit({0.0}, 1.0, Activation::kRelu, 0),
                      make_unit({0.0}, 0.0, Activation::kRelu, 1)},
                     identity_switch(2), Aggregation::linear_readout({}, 0.0))) {}
};

TEST(FitReadout, UnitsFrozenAndLossDecreases) {
  ReadoutFixture f;
  TrainConfig cfg;
  cfg.seed = 42;
  const auto ids = f.ds.ids();
  const ReadoutFit fit = fit_readout(f.net, ids, f.ds, cfg);
  EXPECT_EQ(fit.network.units(), f.net.units());
  EXPECT_EQ(fit.network.switch_table(), f.net.switch_table());
  EXPECT_EQ(fit.network.aggregation().weights.size(), 2u);
  ASSERT_GE(fit.log.epoch_loss.size(), 5u);
  for (std::size_t e = 1; e < 5; ++e) EXPECT_LT(fit.log.epoch_loss[e], fit.log.epoch_loss[e - 1]);
  EXPECT_EQ(evaluate(fit.network, ids, f.ds, SetKind::kOverlapping).accuracy, 1.0);
}

TEST(FitReadout, ShapeForFiveUnits) {
  const Dataset ds = separable_dataset(4);
  const ModularNetwork net =
      assemble(separating_units(), identity_switch(5), Aggregation::linear_readout({}, 0.0));
  TrainConfig cfg;
  const auto ids = ds.ids();
  EXPECT_EQ(fit_readout(net, ids, ds, cfg).network.aggregation().weights.size(), 5u);
}

TEST(FitReadout, Errors) {
  ReadoutFixture f;
  TrainConfig cfg;
  EXPECT_THROW(fit_readout(f.net, std::vector<ObservationId>{}, f.ds, cfg), Error);
  const ModularNetwork mean_net = assemble(f.net.units(), f.net.switch_table());
  const auto ids = f.ds.ids();
  EXPECT_THROW(fit_readout(mean_net, ids, f.ds, cfg), Error);
}

TEST(Contribution, RowsAndIdentity) {
  std::mt19937_64 rng(8);
  const Dataset ds = testing::default_dataset();
  const ModularNetwork net = assemble(random_units(5, 2, rng), identity_switch(5));
  std::vector<ObservationId> ids;
  for (const auto& o : ds.observations()) {
    if (o.group != 3) ids.push_back(o.id);
  }
  const ContributionReport r = neuron_contribution(net, ids, ds);
  ASSERT_EQ(r.rows.size(), 5u);
  const Metrics full = evaluate(net, ids, ds, SetKind::kNonOverlapping);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.contribution, row.full_accuracy - row.ablated_accuracy);
    EXPECT_EQ(row.full_accuracy, full.accuracy);
  }
  EXPECT_EQ(r.rows[3].contribution, 0.0);  // group 3 not evaluated

  for (UnitIndex k = 0; k < 5; ++k) {
    const Metrics ablated = evaluate(net, ids, ds, SetKind::kNonOverlapping, k);
    for (const auto& [g, acc] : full.per_group_accuracy) {
      if (g != k) EXPECT_EQ(ablated.per_group_accuracy.at(g), acc) << "unit " << k << " group " << g;
    }
  }
}

TEST(NetworkJson, ReloadGivesBitIdenticalPredictions) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  const ModularNetwork net = assemble(random_units(4, 2, rng), build_switch(4, {{0, {0, 1}}, {1, {2}}, {2, {3}}}).table,
                                      Aggregation::linear_readout({0.1, -0.3, 1.0 / 3.0, 2.5}, 0.7));
  const ModularNetwork back = network_from_json(Json::parse(network_to_json(net).dump()));
  EXPECT_EQ(back, net);
  for (int i = 0; i < 200; ++i) {
    const Observation o{0, static_cast<GroupId>(rng() % 3), 0, {d(rng), d(rng)}};
    ASSERT_TRUE(same_bits(forward(net, o), forward(back, o)));
  }
}

}  // namespace
}  // namespace switchnet
