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

// JSON forms of every artifact. Doubles are written in shortest round-trip
// form so a reload reproduces the same bits.

#ifndef SWITCHNET_SERIALIZE_HPP_
#define SWITCHNET_SERIALIZE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "switchnet/analysis.hpp"
#include "switchnet/data.hpp"
#include "switchnet/federated.hpp"
#include "switchnet/network.hpp"
#include "switchnet/neuron.hpp"
#include "switchnet/switch_table.hpp"

namespace switchnet {

using Json = nlohmann::ordered_json;

Json group_spec_to_json(const GroupSpec& spec);
GroupSpec group_spec_from_json(const Json& j);
Json group_specs_to_json(const std::vector<GroupSpec>& specs);
std::vector<GroupSpec> group_specs_from_json(const Json& j);

Json groups_to_json(const std::vector<GroupInfo>& groups);
std::vector<GroupInfo> groups_from_json(const Json& j);

Json plan_to_json(const PartitionPlan& plan);
PartitionPlan plan_from_json(const Json& j, Selection selection);
Json partition_to_json(const PartitionSet& partitions);
PartitionSet partition_from_json(const Json& j);

Json unit_to_json(const NeuronUnit& unit);
NeuronUnit unit_from_json(const Json& j);
Json train_log_to_json(const TrainLog& log, UnitIndex unit);

Json switch_to_json(const SwitchTable& table);
SwitchTable switch_from_json(const Json& j);

Json aggregation_to_json(const Aggregation& agg);
Aggregation aggregation_from_json(const Json& j);
Json network_to_json(const ModularNetwork& net);
ModularNetwork network_from_json(const Json& j);

Json metrics_to_json(const Metrics& metrics);
Json contribution_to_json(const ContributionReport& report);
Json attribution_to_json(const AttributionReport& report);
Json test_sets_to_json(const TestSets& sets);

/// Everything deterministic about a federated run.
Json fed_report_to_json(const FedRunReport& report);
/// Wall-clock data only; kept apart so other artifacts compare byte-exact.
Json fed_timing_to_json(const FedRunReport& report);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
Json read_json_file(const std::filesystem::path& path);
/// Two-space indented, trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace switchnet

#endif  // SWITCHNET_SERIALIZE_HPP_
