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

#include "switchnet/serialize.hpp"

#include <fstream>
#include <sstream>

#include "switchnet/error.hpp"
#include "switchnet/version.hpp"

namespace switchnet {

namespace {

template <typename T>
T field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::kParse, std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse,
                std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

std::uint64_t parse_key(const std::string& key, const char* what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(key, &used);
    if (used != key.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kParse,
                std::string(what) + ": key '" + key + "' is not an integer");
  }
}

}  // namespace

Json group_spec_to_json(const GroupSpec& spec) {
  Json rule = {{"kind", to_string(spec.label_rule.kind)}};
  if (spec.label_rule.kind == LabelRuleKind::kLinearThreshold) {
    rule["weights"] = spec.label_rule.weights;
    rule["bias"] = spec.label_rule.bias;
  }
  return Json{{"name", spec.name},
              {"mean", spec.mean},
              {"scale", spec.scale},
              {"label_rule", rule},
              {"count", spec.count}};
}

GroupSpec group_spec_from_json(const Json& j) {
  constexpr const char* kWhat = "group spec";
  GroupSpec s;
  s.name = field<std::string>(j, "name", kWhat);
  s.mean = field<std::vector<double>>(j, "mean", kWhat);
  s.scale = field<std::vector<double>>(j, "scale", kWhat);
  const Json rule = field<Json>(j, "label_rule", kWhat);
  s.label_rule.kind = label_rule_from_string(field<std::string>(rule, "kind", "label rule"));
  if (s.label_rule.kind == LabelRuleKind::kLinearThreshold) {
    s.label_rule.weights = field<std::vector<double>>(rule, "weights", "label rule");
    s.label_rule.bias = field<double>(rule, "bias", "label rule");
  }
  const auto count = field<std::int64_t>(j, "count", kWhat);
  if (count < 1) throw Error(ErrorKind::kInvalidArgument, "group spec count must be >= 1");
  s.count = static_cast<std::size_t>(count);
  return s;
}

Json group_specs_to_json(const std::vector<GroupSpec>& specs) {
  Json arr = Json::array();
  for (const auto& s : specs) arr.push_back(group_spec_to_json(s));
  return arr;
}

std::vector<GroupSpec> group_specs_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::kParse, "group specs must be a JSON array");
  std::vector<GroupSpec> specs;
  for (const auto& item : j) specs.push_back(group_spec_from_json(item));
  return specs;
}

Json groups_to_json(const std::vector<GroupInfo>& groups) {
  Json arr = Json::array();
  for (const auto& g : groups) arr.push_back({{"id", g.id}, {"name", g.name}});
  return arr;
}

std::vector<GroupInfo> groups_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::kParse, "group table must be a JSON array");
  std::vector<GroupInfo> out;
  for (const auto& item : j) {
    out.push_back({field<GroupId>(item, "id", "group"),
                   field<std::string>(item, "name", "group")});
  }
  return out;
}

Json plan_to_json(const PartitionPlan& plan) {
  Json arr = Json::array();
  for (const auto& a : plan.assignments) {
    Json e = {{"unit", a.unit}, {"count", a.count}};
    if (plan.selection == Selection::kStratified) {
      e["group"] = a.group.value_or(static_cast<GroupId>(a.unit));
    }
    if (plan.selection == Selection::kExplicit) e["ids"] = a.ids;
    arr.push_back(std::move(e));
  }
  return arr;
}

PartitionPlan plan_from_json(const Json& j, Selection selection) {
  if (!j.is_array()) throw Error(ErrorKind::kParse, "plan must be a JSON array");
  PartitionPlan plan;
  plan.selection = selection;
  for (const auto& item : j) {
    PlanEntry e;
    e.unit = field<std::size_t>(item, "unit", "plan entry");
    if (item.contains("group")) e.group = field<GroupId>(item, "group", "plan entry");
    if (item.contains("ids")) e.ids = field<std::vector<ObservationId>>(item, "ids", "plan entry");
    e.count = item.contains("count") ? field<std::size_t>(item, "count", "plan entry")
                                     : e.ids.size();
    plan.assignments.push_back(std::move(e));
  }
  return plan;
}

Json partition_to_json(const PartitionSet& partitions) {
  Json subsets = Json::object();
  for (std::size_t k = 0; k < partitions.subsets.size(); ++k) {
    subsets[std::to_string(k)] = partitions.subsets[k];
  }
  return Json{{"seed", partitions.seed},
              {"selection", to_string(partitions.plan.selection)},
              {"plan", plan_to_json(partitions.plan)},
              {"subsets", subsets}};
}

PartitionSet partition_from_json(const Json& j) {
  constexpr const char* kWhat = "partition";
  PartitionSet p;
  p.seed = field<std::uint64_t>(j, "seed", kWhat);
  const Selection sel = j.contains("selection")
                            ? selection_from_string(field<std::string>(j, "selection", kWhat))
                            : Selection::kExplicit;
  p.plan = plan_from_json(field<Json>(j, "plan", kWhat), sel);
  const Json subsets = field<Json>(j, "subsets", kWhat);
  if (!subsets.is_object()) throw Error(ErrorKind::kParse, "partition: 'subsets' must be an object");
  p.subsets.resize(subsets.size());
  for (const auto& [key, ids] : subsets.items()) {
    const auto k = parse_key(key, kWhat);
    if (k >= p.subsets.size()) {
      throw Error(ErrorKind::kParse, "partition: subset keys must be 0..n-1");
    }
    p.subsets[k] = ids.get<std::vector<ObservationId>>();
  }
  return p;
}

Json unit_to_json(const NeuronUnit& unit) {
  return Json{{"unit_index", unit.unit_index},
              {"activation", to_string(unit.activation)},
              {"weights", unit.weights},
              {"bias", unit.bias}};
}

NeuronUnit unit_from_json(const Json& j) {
  constexpr const char* kWhat = "unit";
  NeuronUnit u;
  u.unit_index = field<std::size_t>(j, "unit_index", kWhat);
  u.activation = activation_from_string(field<std::string>(j, "activation", kWhat));
  u.weights = field<std::vector<double>>(j, "weights", kWhat);
  u.bias = field<double>(j, "bias", kWhat);
  if (u.weights.empty()) throw Error(ErrorKind::kParse, "unit: weights must be non-empty");
  return u;
}

Json train_log_to_json(const TrainLog& log, UnitIndex unit) {
  return Json{{"unit_index", unit},
              {"epochs", log.epoch_loss.size()},
              {"steps", log.steps},
              {"final_loss", log.final_loss},
              {"epoch_loss", log.epoch_loss}};
}

Json switch_to_json(const SwitchTable& table) {
  Json entries = Json::object();
  for (const auto& [group, units] : table.entries()) {
    entries[std::to_string(group)] = std::vector<UnitIndex>(units.begin(), units.end());
  }
  return Json{{"n_units", table.n_units()},
              {"fallback", to_string(table.fallback())},
              {"entries", entries}};
}

SwitchTable switch_from_json(const Json& j) {
  constexpr const char* kWhat = "switch";
  const auto n_units = field<std::size_t>(j, "n_units", kWhat);
  const Fallback fallback =
      j.contains("fallback") ? fallback_from_string(field<std::string>(j, "fallback", kWhat))
                             : Fallback::kError;
  const Json entries = field<Json>(j, "entries", kWhat);
  if (!entries.is_object()) throw Error(ErrorKind::kParse, "switch: 'entries' must be an object");
  std::map<GroupId, std::set<UnitIndex>> table;
  for (const auto& [key, units] : entries.items()) {
    const auto g = static_cast<GroupId>(parse_key(key, kWhat));
    const auto list = units.get<std::vector<UnitIndex>>();
    table[g] = std::set<UnitIndex>(list.begin(), list.end());
  }
  return build_switch(n_units, std::move(table), fallback).table;
}

Json aggregation_to_json(const Aggregation& agg) {
  Json j = {{"kind", to_string(agg.kind)}};
  if (agg.kind == AggregationKind::kLinearReadout) {
    j["weights"] = agg.weights;
    j["bias"] = agg.bias;
  }
  return j;
}

Aggregation aggregation_from_json(const Json& j) {
  const auto kind = aggregation_from_string(field<std::string>(j, "kind", "aggregation"));
  if (kind == AggregationKind::kRouterMean) return Aggregation::router_mean();
  return Aggregation::linear_readout(field<std::vector<double>>(j, "weights", "aggregation"),
                                     field<double>(j, "bias", "aggregation"));
}

Json network_to_json(const ModularNetwork& net) {
  Json units = Json::array();
  for (const auto& u : net.units()) units.push_back(unit_to_json(u));
  return Json{{"version", kVersion},
              {"units", units},
              {"switch", switch_to_json(net.switch_table())},
              {"aggregation", aggregation_to_json(net.aggregation())}};
}

ModularNetwork network_from_json(const Json& j) {
  constexpr const char* kWhat = "network bundle";
  const Json units_json = field<Json>(j, "units", kWhat);
  if (!units_json.is_array()) throw Error(ErrorKind::kParse, "network bundle: 'units' must be an array");
  std::vector<NeuronUnit> units;
  for (const auto& u : units_json) units.push_back(unit_from_json(u));
  return assemble(std::move(units), switch_from_json(field<Json>(j, "switch", kWhat)),
                  aggregation_from_json(field<Json>(j, "aggregation", kWhat)));
}

Json metrics_to_json(const Metrics& metrics) {
  Json per_group = Json::object();
  for (const auto& [g, acc] : metrics.per_group_accuracy) per_group[std::to_string(g)] = acc;
  return Json{{"accuracy", metrics.accuracy},
              {"per_group_accuracy", per_group},
              {"n", metrics.n},
              {"set_kind", to_string(metrics.set_kind)},
              {"version", kVersion}};
}

Json contribution_to_json(const ContributionReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"unit", r.unit},
                    {"full_accuracy", r.full_accuracy},
                    {"ablated_accuracy", r.ablated_accuracy},
                    {"contribution", r.contribution}});
  }
  return Json{{"version", kVersion}, {"units", rows}};
}

Json attribution_to_json(const AttributionReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"unit", r.unit}, {"group", r.group}, {"margin", r.margin}});
  }
  return rows;
}

Json test_sets_to_json(const TestSets& sets) {
  return Json{{"overlapping", sets.overlapping}, {"non_overlapping", sets.non_overlapping}};
}

Json fed_report_to_json(const FedRunReport& report) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < report.logs.size(); ++i) {
    nodes.push_back({{"node", i},
                     {"final_loss", report.logs[i].final_loss},
                     {"epochs", report.logs[i].epoch_loss.size()},
                     {"steps", report.logs[i].steps},
                     {"observed", report.observed_ids[i].size()}});
  }
  Json schedule = Json::array();
  for (const auto& s : report.schedule) {
    schedule.push_back({{"node", s.node_id}, {"worker", s.worker_id}});
  }
  return Json{{"version", kVersion},
              {"workers", report.workers},
              {"nodes", nodes},
              {"schedule", schedule}};
}

Json fed_timing_to_json(const FedRunReport& report) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < report.duration_ms.size(); ++i) {
    nodes.push_back({{"node", i}, {"duration_ms", report.duration_ms[i]}});
  }
  return Json{{"workers", report.workers}, {"wall_ms", report.wall_ms}, {"nodes", nodes}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kNotFound, "cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, "'" + path.string() + "': " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace switchnet
