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
#include <set>
#include <string>
#include <vector>

#include "support.hpp"
#include "switchnet/error.hpp"
#include "switchnet/federated.hpp"
#include "switchnet/rng.hpp"

namespace switchnet {
namespace {

struct Fixture {
  Dataset ds = testing::default_dataset();
  PartitionSet p = testing::default_partition(ds);
  TrainConfig cfg = [] {
    TrainConfig c;
    c.seed = 42;
    return c;
  }();
  std::vector<NeuronUnit> init() const {
    std::vector<NeuronUnit> units;
    for (UnitIndex k = 0; k < p.n_units(); ++k) units.push_back(init_unit(2, Activation::kSigmoid, k, cfg.seed));
    return units;
  }
};

TEST(MakeNodes, SizesAndLocality) {
  Fixture f;
  const auto nodes = make_nodes(f.p, f.ds, f.init());
  ASSERT_EQ(nodes.size(), 5u);
  const std::vector<std::size_t> sizes{20, 30, 10, 20, 20};
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(nodes[k].node_id, k);
    EXPECT_EQ(nodes[k].local_data.size(), sizes[k]);
    EXPECT_EQ(nodes[k].subset_ids, f.p.subsets[k]);
    for (const auto& o : nodes[k].local_data) EXPECT_EQ(o, f.ds.at(o.id));
  }
  const std::set<ObservationId> subset3(f.p.subsets[3].begin(), f.p.subsets[3].end());
  for (const auto& o : nodes[2].local_data) EXPECT_FALSE(subset3.contains(o.id));
}

TEST(MakeNodes, CopiesData) {
  Fixture f;
  std::vector<Node> nodes;
  {
    const Dataset scratch = testing::default_dataset();
    nodes = make_nodes(f.p, scratch, f.init());
  }
  EXPECT_EQ(nodes[1].local_data.front(), f.ds.at(nodes[1].local_data.front().id));
}

TEST(MakeNodes, CountMismatch) {
  Fixture f;
  auto units = f.init();
  units.pop_back();
  EXPECT_THROW(make_nodes(f.p, f.ds, units), Error);
}

TEST(NodeSeeds, DerivedPerNode) {
  std::set<std::uint64_t> seeds;
  for (std::size_t k = 0; k < 5; ++k) seeds.insert(derive_node_seed(42, k));
  EXPECT_EQ(seeds.size(), 5u);
  EXPECT_EQ(derive_node_seed(42, 3), derive_node_seed(42, 3));
  EXPECT_EQ(node_train_config(TrainConfig{}, 2).seed, derive_node_seed(0, 2));
}

TEST(StaticSchedule, RoundRobin) {
  const auto s = static_schedule(5, 2);
  ASSERT_EQ(s.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(s[i].node_id, i);
    EXPECT_EQ(s[i].worker_id, i % 2);
  }
}

TEST(RunLocalTraining, WorkerCountInvarianceAndSequentialOracle) {
  Fixture f;
  const auto nodes = make_nodes(f.p, f.ds, f.init());
  std::vector<NeuronUnit> oracle;
  for (const auto& n : nodes) {
    oracle.push_back(train_unit(n.unit, n.local_data, node_train_config(f.cfg, n.node_id)).first);
  }
  for (std::size_t workers : {1u, 2u, 4u, 5u, 9u}) {
    const FedResult r = run_local_training(nodes, f.cfg, workers);
    EXPECT_EQ(r.units, oracle) << workers << " workers";
    EXPECT_EQ(r.report.logs.size(), 5u);
    EXPECT_EQ(r.report.duration_ms.size(), 5u);
    EXPECT_EQ(r.report.workers, workers);
    EXPECT_EQ(r.report.schedule.size(), 5u);
  }
}

TEST(RunLocalTraining, ObservedIdsStayWithinSubset) {
  Fixture f;
  const auto nodes = make_nodes(f.p, f.ds, f.init());
  const FedResult r = run_local_training(nodes, f.cfg, 3);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    EXPECT_EQ(r.report.observed_ids[k], nodes[k].subset_ids);
    EXPECT_EQ(r.report.logs[k].steps, nodes[k].local_data.size() * 50);
  }
}

TEST(RunLocalTraining, FailureNamesNode) {
  Fixture f;
  auto nodes = make_nodes(f.p, f.ds, f.init());
  TrainConfig bad = f.cfg;
  bad.loss = Loss::kBce;
  nodes[3].unit.activation = Activation::kRelu;  // bce needs sigmoid
  try {
    run_local_training(nodes, bad, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("node 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(run_local_training(nodes, f.cfg, 0), Error);
}

TEST(Collect, IsAssemblyInNodeOrder) {
  Fixture f;
  const auto nodes = make_nodes(f.p, f.ds, f.init());
  const FedResult r = run_local_training(nodes, f.cfg, 2);
  auto trained = with_trained_units(nodes, r.units);
  const ModularNetwork direct = assemble(r.units, identity_switch(5));
  std::reverse(trained.begin(), trained.end());
  const ModularNetwork collected = collect(trained, identity_switch(5));
  EXPECT_EQ(collected, direct);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(collected.units()[k], r.units[k]);
  for (const auto& o : f.ds.observations()) {
    ASSERT_EQ(forward(collected, o).score, forward(direct, o).score);
  }
  trained.pop_back();  // drops node 0
  EXPECT_THROW(collect(trained, identity_switch(4)), Error);
}

}  // namespace
}  // namespace switchnet
