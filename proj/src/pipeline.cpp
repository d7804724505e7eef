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

#include "switchnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "switchnet/error.hpp"

namespace switchnet {

namespace {

// One cluster per vertex of a radius-2 pentagon in (age, income) space. Each
// group is labelled by a threshold on the projection onto its own direction;
// the mixed group is split through its centre.
struct DefaultGroup {
  const char* name;
  double mean_x, mean_y;
  double dir_x, dir_y;
  double threshold;
  std::size_t count;
};

constexpr DefaultGroup kDefaultGroups[] = {
    {"Young – Low Income", -1.18, -1.62, -0.588, -0.809, 1.6, 20},
    {"Young – High Income", -1.90, 0.62, -0.951, 0.309, 1.6, 30},
    {"Senior – High Income", 1.90, 0.62, 0.951, 0.309, 1.6, 10},
    {"Senior – Low Income", 1.18, -1.62, 0.588, -0.809, 1.6, 20},
    {"Mid-age – Mild Income (Mixed)", 0.0, 2.0, 0.0, 1.0, 2.0, 20},
};

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::kConfig, "config: " + what);
}

void check_keys(const Json& section, const char* name,
                std::initializer_list<const char*> allowed) {
  if (!section.is_object()) config_error(std::string("'") + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&key](const char* a) { return key == a; })) {
      config_error(std::string("unknown key '") + name + "." + key + "'");
    }
  }
}

template <typename T>
T get_or(const Json& section, const char* key, T fallback, const char* where) {
  if (!section.contains(key)) return fallback;
  try {
    return section.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    config_error(std::string("bad value for '") + where + "." + key + "'");
  }
}

Json without_output(const Json& config) {
  Json copy = config;
  if (copy.is_object()) copy.erase("output");
  return copy;
}

}  // namespace

Json default_config_json() {
  Json groups = Json::array();
  for (const auto& g : kDefaultGroups) {
    GroupSpec spec;
    spec.name = g.name;
    spec.mean = {g.mean_x, g.mean_y};
    spec.scale = {0.5, 0.5};
    spec.label_rule.kind = LabelRuleKind::kLinearThreshold;
    spec.label_rule.weights = {g.dir_x, g.dir_y};
    spec.label_rule.bias = -g.threshold;
    spec.count = g.count;
    groups.push_back(group_spec_to_json(spec));
  }
  Json entries = Json::object();
  Json counts = Json::array();
  for (std::size_t k = 0; k < std::size(kDefaultGroups); ++k) {
    entries[std::to_string(k)] = Json::array({k});
    counts.push_back(kDefaultGroups[k].count);
  }
  return Json{
      {"seed", 42},
      {"data", {{"groups", groups}, {"eval_per_group", 5}}},
      {"partition",
       {{"selection", "stratified"}, {"counts", counts}, {"holdout_fraction", 0.2}}},
      {"switch", {{"n_units", std::size(kDefaultGroups)}, {"fallback", "error"}, {"entries", entries}}},
      {"train",
       {{"learning_rate", 0.1},
        {"epochs", 50},
        {"loss", "bce"},
        {"activation", "sigmoid"},
        {"shuffle", true},
        {"workers", 0}}},
      {"network", {{"aggregation", "router-mean"}, {"heatmap_statistic", "mean"}}},
      {"output", {{"dir", "switchnet_out"}}},
  };
}

void apply_overrides(Json& config, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      config_error("override '" + item + "' is not of the form key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    std::string pointer;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (part.empty()) config_error("override key '" + key + "' has an empty segment");
      pointer += "/" + part;
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    Json value;
    try {
      value = Json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
      value = raw;
    }
    try {
      config[nlohmann::ordered_json::json_pointer(pointer)] = value;
    } catch (const nlohmann::json::exception& e) {
      config_error("cannot apply override '" + item + "': " + e.what());
    }
  }
}

std::vector<GroupSpec> with_eval_pool(std::vector<GroupSpec> specs, std::size_t extra) {
  for (auto& s : specs) s.count += extra;
  return specs;
}

ExperimentConfig parse_config(const Json& j) {
  check_keys(j, "config", {"seed", "data", "partition", "switch", "train", "network", "output"});
  for (const char* section : {"data", "partition", "switch", "train"}) {
    if (!j.contains(section)) config_error(std::string("missing section '") + section + "'");
  }
  ExperimentConfig c;
  c.seed = get_or<std::uint64_t>(j, "seed", 42, "config");

  try {
    const Json& data = j.at("data");
    check_keys(data, "data", {"groups", "eval_per_group", "path"});
    if (data.contains("path") == data.contains("groups")) {
      config_error("'data' needs exactly one of 'groups' or 'path'");
    }
    if (data.contains("path")) {
      c.dataset_path = get_or<std::string>(data, "path", "", "data");
    } else {
      c.group_specs = group_specs_from_json(data.at("groups"));
      if (c.group_specs.empty()) config_error("'data.groups' is empty");
    }
    c.eval_per_group = get_or<std::size_t>(data, "eval_per_group", 5, "data");

    const Json& part = j.at("partition");
    check_keys(part, "partition", {"selection", "counts", "groups", "ids", "holdout_fraction"});
    const Selection sel =
        selection_from_string(get_or<std::string>(part, "selection", "stratified", "partition"));
    if (sel == Selection::kExplicit) {
      const auto ids = get_or<std::vector<std::vector<ObservationId>>>(part, "ids", {}, "partition");
      std::vector<std::size_t> counts;
      for (const auto& list : ids) counts.push_back(list.size());
      c.plan = make_plan(counts, sel);
      for (std::size_t k = 0; k < ids.size(); ++k) c.plan.assignments[k].ids = ids[k];
    } else {
      const auto counts = get_or<std::vector<std::size_t>>(part, "counts", {}, "partition");
      c.plan = make_plan(counts, sel);
      if (part.contains("groups")) {
        const auto groups = get_or<std::vector<GroupId>>(part, "groups", {}, "partition");
        if (groups.size() != counts.size()) {
          config_error("'partition.groups' must have one entry per count");
        }
        for (std::size_t k = 0; k < groups.size(); ++k) c.plan.assignments[k].group = groups[k];
      }
    }
    c.plan.validate();
    c.holdout_fraction = get_or<double>(part, "holdout_fraction", 0.2, "partition");
    if (!(c.holdout_fraction > 0.0 && c.holdout_fraction < 1.0)) {
      config_error("'partition.holdout_fraction' must be in (0, 1)");
    }

    c.switch_table = switch_from_json(j.at("switch"));

    const Json& train = j.at("train");
    check_keys(train, "train", {"learning_rate", "epochs", "loss", "activation", "shuffle", "workers"});
    c.train.learning_rate = get_or<double>(train, "learning_rate", 0.1, "train");
    c.train.epochs = get_or<int>(train, "epochs", 50, "train");
    c.train.loss = loss_from_string(get_or<std::string>(train, "loss", "bce", "train"));
    c.train.shuffle = get_or<bool>(train, "shuffle", true, "train");
    c.train.seed = c.seed;
    c.train.validate();
    c.activation = activation_from_string(get_or<std::string>(train, "activation", "sigmoid", "train"));
    c.workers = get_or<std::size_t>(train, "workers", 0, "train");

    const Json network = j.value("network", Json::object());
    check_keys(network, "network", {"aggregation", "heatmap_statistic"});
    c.aggregation = aggregation_from_string(
        get_or<std::string>(network, "aggregation", "router-mean", "network"));
    c.statistic = statistic_from_string(
        get_or<std::string>(network, "heatmap_statistic", "mean", "network"));

    const Json output = j.value("output", Json::object());
    check_keys(output, "output", {"dir"});
    c.output_dir = get_or<std::string>(output, "dir", "switchnet_out", "output");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    config_error(e.what());
  }

  // Referential consistency.
  if (c.switch_table.n_units() != c.n_units()) {
    config_error("partition plan has " + std::to_string(c.n_units()) +
                 " units but switch.n_units is " + std::to_string(c.switch_table.n_units()));
  }
  if (c.train.loss == Loss::kBce && c.activation != Activation::kSigmoid) {
    config_error("bce loss requires sigmoid activation");
  }
  if (!c.group_specs.empty()) {
    const std::size_t dim = c.group_specs.front().mean.size();
    for (const auto& s : c.group_specs) {
      if (s.mean.size() != dim || s.scale.size() != dim) {
        config_error("group specs disagree on dimension");
      }
    }
    if (c.plan.selection == Selection::kStratified) {
      std::vector<std::size_t> demand(c.group_specs.size(), 0);
      for (const auto& a : c.plan.assignments) {
        const GroupId g = a.group.value_or(static_cast<GroupId>(a.unit));
        if (g >= c.group_specs.size()) {
          config_error("unit " + std::to_string(a.unit) + " draws from unknown group " +
                       std::to_string(g));
        }
        demand[g] += a.count;
      }
      for (std::size_t g = 0; g < demand.size(); ++g) {
        if (demand[g] > c.group_specs[g].count + c.eval_per_group) {
          config_error("plan draws " + std::to_string(demand[g]) + " observations from group " +
                       std::to_string(g) + " which only has " +
                       std::to_string(c.group_specs[g].count + c.eval_per_group));
        }
      }
    }
  }
  return c;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::pair<NeuronUnit, TrainLog> train_subset(const Dataset& dataset,
                                             const PartitionSet& partitions,
                                             std::size_t subset, Activation activation,
                                             const TrainConfig& train) {
  if (subset >= partitions.n_units()) {
    throw Error(ErrorKind::kInvalidArgument,
                "subset " + std::to_string(subset) + " does not exist (partition has " +
                    std::to_string(partitions.n_units()) + ")");
  }
  std::vector<Observation> local;
  for (ObservationId id : partitions.subsets[subset]) local.push_back(dataset.at(id));
  NeuronUnit unit = init_unit(dataset.dim(), activation, subset, train.seed);
  return train_unit(std::move(unit), local, node_train_config(train, subset));
}

FedOutcome run_fedsim(const Dataset& dataset, const PartitionSet& partitions,
                      const SwitchTable& switch_table, AggregationKind aggregation,
                      Activation activation, const TrainConfig& train,
                      std::size_t workers) {
  if (switch_table.n_units() != partitions.n_units()) {
    throw Error(ErrorKind::kInvalidArgument,
                "switch covers " + std::to_string(switch_table.n_units()) +
                    " units but the partition has " +
                    std::to_string(partitions.n_units()) + " subsets");
  }
  std::vector<NeuronUnit> units;
  for (std::size_t k = 0; k < partitions.n_units(); ++k) {
    units.push_back(init_unit(dataset.dim(), activation, k, train.seed));
  }
  auto nodes = make_nodes(partitions, dataset, std::move(units));
  FedResult result = run_local_training(nodes, train, workers);
  nodes = with_trained_units(std::move(nodes), result.units);

  const Aggregation agg = aggregation == AggregationKind::kRouterMean
                              ? Aggregation::router_mean()
                              : Aggregation::linear_readout({}, 0.0);
  ModularNetwork net = collect(nodes, switch_table, agg);
  std::optional<TrainLog> readout_log;
  if (aggregation == AggregationKind::kLinearReadout) {
    const auto calibration = partitions.assigned_ids();
    ReadoutFit fit = fit_readout(net, calibration, dataset, train);
    net = std::move(fit.network);
    readout_log = std::move(fit.log);
  }
  return FedOutcome{std::move(result), std::move(net), std::move(readout_log)};
}

void write_fed_outputs(const std::filesystem::path& dir, const FedOutcome& outcome) {
  const auto& units = outcome.network.units();
  for (std::size_t k = 0; k < units.size(); ++k) {
    write_json_file(dir / "units" / ("unit_" + std::to_string(k) + ".json"),
                    unit_to_json(units[k]));
    write_json_file(dir / "units" / ("unit_" + std::to_string(k) + ".log.json"),
                    train_log_to_json(outcome.result.report.logs[k], k));
  }
  write_json_file(dir / "network.json", network_to_json(outcome.network));
  write_json_file(dir / "fed_report.json", fed_report_to_json(outcome.result.report));
  write_json_file(dir / "fed_timing.json", fed_timing_to_json(outcome.result.report));
  if (outcome.readout_log) {
    write_json_file(dir / "readout_log.json",
                    train_log_to_json(*outcome.readout_log, units.size()));
  }
}

EvalOutcome run_evaluation(const ModularNetwork& net, const Dataset& dataset,
                           const PartitionSet& partitions, double holdout_fraction,
                           std::uint64_t seed) {
  EvalOutcome out;
  out.sets = make_test_sets(dataset, partitions, holdout_fraction, seed);
  out.overlapping = evaluate(net, out.sets.overlapping, dataset, SetKind::kOverlapping);
  out.non_overlapping =
      evaluate(net, out.sets.non_overlapping, dataset, SetKind::kNonOverlapping);
  out.contribution = neuron_contribution(net, out.sets.non_overlapping, dataset);
  return out;
}

void write_eval_outputs(const std::filesystem::path& dir, const EvalOutcome& outcome) {
  write_json_file(dir / "test_sets.json", test_sets_to_json(outcome.sets));
  write_json_file(dir / "metrics_overlapping.json", metrics_to_json(outcome.overlapping));
  write_json_file(dir / "metrics_non_overlapping.json",
                  metrics_to_json(outcome.non_overlapping));
  write_json_file(dir / "contribution.json", contribution_to_json(outcome.contribution));
}

AnalysisOutcome run_analysis(const ModularNetwork& net, const Dataset& dataset,
                             const PartitionSet& partitions, double holdout_fraction,
                             std::uint64_t seed, Statistic statistic) {
  const TestSets sets = make_test_sets(dataset, partitions, holdout_fraction, seed);
  std::vector<ObservationId> ids = sets.overlapping;
  ids.insert(ids.end(), sets.non_overlapping.begin(), sets.non_overlapping.end());
  std::sort(ids.begin(), ids.end());
  AnalysisOutcome out;
  out.matrix = heatmap(net, ids, dataset, statistic);
  out.attribution = attribute(out.matrix);
  return out;
}

void write_analysis_outputs(const std::filesystem::path& dir,
                            const AnalysisOutcome& outcome) {
  export_heatmap_csv(outcome.matrix, dir / "heatmap.csv");
  render_heatmap_svg(outcome.matrix, dir / "heatmap.svg");
  write_json_file(dir / "attribution.json", attribution_to_json(outcome.attribution));
}

ReportBundle run_pipeline(const Json& config_json) {
  const ExperimentConfig cfg = parse_config(config_json);
  const auto& dir = cfg.output_dir;

  std::string stage;
  try {
    stage = "generate";
    Dataset dataset =
        cfg.dataset_path
            ? load_dataset(*cfg.dataset_path)
            : generate_synthetic(with_eval_pool(cfg.group_specs, cfg.eval_per_group), cfg.seed);

    stage = "partition";
    const PartitionSet partitions = partition(dataset, cfg.plan, cfg.seed);

    stage = "train";
    const FedOutcome fed = run_fedsim(dataset, partitions, cfg.switch_table, cfg.aggregation,
                                      cfg.activation, cfg.train, cfg.effective_workers());

    stage = "evaluate";
    const EvalOutcome eval =
        run_evaluation(fed.network, dataset, partitions, cfg.holdout_fraction, cfg.seed);

    stage = "analyze";
    const AnalysisOutcome analysis = run_analysis(fed.network, dataset, partitions,
                                                  cfg.holdout_fraction, cfg.seed, cfg.statistic);

    stage = "write";
    std::filesystem::create_directories(dir);
    const Json resolved = without_output(config_json);
    write_json_file(dir / "config.json", resolved);
    save_dataset(dataset, dir / "dataset.csv");
    write_json_file(dir / "partition.json", partition_to_json(partitions));
    write_fed_outputs(dir, fed);
    write_eval_outputs(dir, eval);
    write_analysis_outputs(dir, analysis);

    ReportBundle bundle;
    auto add = [&](const std::string& name, const std::filesystem::path& rel) {
      bundle.artifacts[name] = dir / rel;
    };
    add("config", "config.json");
    add("dataset", "dataset.csv");
    add("groups", "dataset.groups.json");
    add("partition", "partition.json");
    for (std::size_t k = 0; k < fed.network.n_units(); ++k) {
      add("unit_" + std::to_string(k), "units/unit_" + std::to_string(k) + ".json");
      add("unit_" + std::to_string(k) + "_log", "units/unit_" + std::to_string(k) + ".log.json");
    }
    add("network", "network.json");
    add("fed_report", "fed_report.json");
    add("fed_timing", "fed_timing.json");
    if (fed.readout_log) add("readout_log", "readout_log.json");
    add("test_sets", "test_sets.json");
    add("metrics_overlapping", "metrics_overlapping.json");
    add("metrics_non_overlapping", "metrics_non_overlapping.json");
    add("contribution", "contribution.json");
    add("heatmap_csv", "heatmap.csv");
    add("heatmap_svg", "heatmap.svg");
    add("attribution", "attribution.json");

    Json artifacts = Json::object();
    for (const auto& [name, path] : bundle.artifacts) {
      artifacts[name] = std::filesystem::relative(path, dir).generic_string();
    }
    bundle.manifest = dir / "manifest.json";
    write_json_file(bundle.manifest, Json{{"version", kVersion},
                                          {"config_hash", fnv1a_hex(resolved.dump())},
                                          {"artifacts", artifacts}});
    return bundle;
  } catch (const Error& e) {
    throw Error(ErrorKind::kRuntime, "stage " + stage + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kRuntime, "stage " + stage + ": " + e.what());
  }
}

}  // namespace switchnet
