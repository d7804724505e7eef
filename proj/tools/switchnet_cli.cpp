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

// switchnet command line. Every subcommand goes through the C API.
//
// Exit codes: 0 success, 1 usage/config error or missing input, 2 runtime
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "switchnet/switchnet.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Thrown to unwind to main with an exit code after printing a diagnostic.
struct Exit {
  int code;
};

int exit_code_for(sn_status s) {
  switch (s) {
    case SN_OK:
      return kExitOk;
    case SN_ERR_CONFIG:
    case SN_ERR_NOT_FOUND:
    case SN_ERR_INVALID_ARGUMENT:
    case SN_ERR_PARSE:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

void check(sn_status s, const std::string& what) {
  if (s == SN_OK) return;
  std::cerr << "switchnet: " << what << ": " << sn_last_error() << "\n";
  throw Exit{exit_code_for(s)};
}

void require_input(const std::string& path, const std::string& artifact) {
  if (!std::filesystem::exists(path)) {
    std::cerr << "switchnet: missing input " << artifact << " '" << path << "'\n";
    throw Exit{kExitUsage};
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using Dataset = std::unique_ptr<sn_dataset, Deleter<sn_dataset, sn_dataset_free>>;
using Partition = std::unique_ptr<sn_partition, Deleter<sn_partition, sn_partition_free>>;
using Switch = std::unique_ptr<sn_switch, Deleter<sn_switch, sn_switch_free>>;
using Unit = std::unique_ptr<sn_unit, Deleter<sn_unit, sn_unit_free>>;
using TrainLog = std::unique_ptr<sn_train_log, Deleter<sn_train_log, sn_train_log_free>>;
using Network = std::unique_ptr<sn_network, Deleter<sn_network, sn_network_free>>;
using FedResult = std::unique_ptr<sn_fed_result, Deleter<sn_fed_result, sn_fed_result_free>>;
using EvalResult = std::unique_ptr<sn_eval_result, Deleter<sn_eval_result, sn_eval_result_free>>;
using Analysis = std::unique_ptr<sn_analysis, Deleter<sn_analysis, sn_analysis_free>>;

Dataset load_dataset(const std::string& path) {
  require_input(path, "dataset");
  sn_dataset* raw = nullptr;
  check(sn_dataset_load(path.c_str(), &raw), "loading dataset '" + path + "'");
  return Dataset(raw);
}

Partition load_partition(const std::string& path, const sn_dataset* ds) {
  require_input(path, "partition");
  sn_partition* raw = nullptr;
  check(sn_partition_load(path.c_str(), ds, &raw), "loading partition '" + path + "'");
  return Partition(raw);
}

Switch load_switch(const std::string& path) {
  require_input(path, "switch");
  sn_switch* raw = nullptr;
  check(sn_switch_load(path.c_str(), &raw), "loading switch '" + path + "'");
  return Switch(raw);
}

Network load_network(const std::string& path) {
  require_input(path, "network bundle");
  sn_network* raw = nullptr;
  check(sn_network_load(path.c_str(), &raw), "loading network bundle '" + path + "'");
  return Network(raw);
}

struct TrainOptions {
  uint64_t seed = 42;
  double learning_rate = 0.1;
  int epochs = 50;
  std::string loss = "bce";
  std::string activation = "sigmoid";
  bool no_shuffle = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
    cmd->add_option("--lr", learning_rate, "Learning rate")->capture_default_str();
    cmd->add_option("--epochs", epochs, "Epochs")->capture_default_str();
    cmd->add_option("--loss", loss, "Loss")->check(CLI::IsMember({"bce", "mse"}))->capture_default_str();
    cmd->add_option("--activation", activation, "Unit activation")
        ->check(CLI::IsMember({"sigmoid", "relu", "tanh"}))
        ->capture_default_str();
    cmd->add_flag("--no-shuffle", no_shuffle, "Visit observations in id order");
  }

  sn_train_config config() const {
    sn_train_config c = sn_train_config_default(seed);
    c.learning_rate = learning_rate;
    c.epochs = epochs;
    c.loss = loss == "mse" ? SN_LOSS_MSE : SN_LOSS_BCE;
    c.shuffle = no_shuffle ? 0 : 1;
    return c;
  }

  sn_activation act() const {
    if (activation == "relu") return SN_ACT_RELU;
    if (activation == "tanh") return SN_ACT_TANH;
    return SN_ACT_SIGMOID;
  }
};

sn_aggregation parse_aggregation(const std::string& s) {
  return s == "linear-readout" ? SN_AGG_LINEAR_READOUT : SN_AGG_ROUTER_MEAN;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"switchnet: switch-gated modular networks of independently trained units"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", std::string("switchnet ") + sn_version());

  // pipeline
  std::string config_path;
  std::vector<std::string> overrides;
  auto* pipeline = app.add_subcommand("pipeline", "Run the full experiment from a config file");
  pipeline->add_option("--config", config_path, "Experiment config (JSON)")->required();
  pipeline->add_option("--set", overrides, "Override a config value, e.g. train.epochs=100");

  std::string init_out;
  auto* init = app.add_subcommand("init-config", "Write the default experiment config");
  init->add_option("--out", init_out, "Output path")->required();

  // gen-data
  std::string specs_path, data_out;
  uint64_t gen_seed = 42;
  std::size_t eval_per_group = 0;
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic group-structured dataset");
  gen->add_option("--specs", specs_path, "Group spec file (JSON array)")->required();
  gen->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  gen->add_option("--eval-per-group", eval_per_group,
                  "Extra observations per group for the unseen evaluation pool")
      ->capture_default_str();
  gen->add_option("--out", data_out, "Dataset CSV")->required();

  // partition
  std::string part_data, part_out, selection = "stratified";
  std::vector<std::size_t> counts;
  std::vector<uint32_t> part_groups;
  uint64_t part_seed = 42;
  auto* part = app.add_subcommand("partition", "Split a dataset into disjoint unit subsets");
  part->add_option("--data", part_data, "Dataset CSV")->required();
  part->add_option("--counts", counts, "Observations per unit")->required()->delimiter(',');
  part->add_option("--groups", part_groups, "Group each unit draws from (stratified)")
      ->delimiter(',');
  part->add_option("--selection", selection, "Selection mode")
      ->check(CLI::IsMember({"stratified", "contiguous"}))
      ->capture_default_str();
  part->add_option("--seed", part_seed, "Seed")->capture_default_str();
  part->add_option("--out", part_out, "Partition JSON")->required();

  // train
  std::string train_data, train_part, train_out, train_log;
  std::size_t subset = 0;
  TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "Train the unit for one partition subset");
  train->add_option("--data", train_data, "Dataset CSV")->required();
  train->add_option("--partition", train_part, "Partition JSON")->required();
  train->add_option("--subset", subset, "Subset (unit) index")->required();
  train->add_option("--out", train_out, "Unit JSON")->required();
  train->add_option("--log", train_log, "Train log JSON");
  train_opts.add_to(train);

  // fedsim
  std::string fed_data, fed_part, fed_switch, fed_out, fed_agg = "router-mean";
  std::size_t workers = 0;
  TrainOptions fed_opts;
  auto* fed = app.add_subcommand("fedsim", "Train every unit on its own simulated node");
  fed->add_option("--data", fed_data, "Dataset CSV")->required();
  fed->add_option("--partition", fed_part, "Partition JSON")->required();
  fed->add_option("--switch", fed_switch, "Switch JSON (default: identity)");
  fed->add_option("--workers", workers, "Worker threads (0: one per unit)")->capture_default_str();
  fed->add_option("--aggregation", fed_agg, "Aggregation")
      ->check(CLI::IsMember({"router-mean", "linear-readout"}))
      ->capture_default_str();
  fed->add_option("--out-dir", fed_out, "Output directory")->required();
  fed_opts.add_to(fed);

  // assemble
  std::vector<std::string> unit_paths;
  std::string asm_switch, asm_out, asm_agg = "router-mean";
  auto* asmb = app.add_subcommand("assemble", "Assemble trained unit files into a network bundle");
  asmb->add_option("--units", unit_paths, "Unit JSON files in unit order")->required();
  asmb->add_option("--switch", asm_switch, "Switch JSON (default: identity)");
  asmb->add_option("--aggregation", asm_agg, "Aggregation (readout starts unfitted)")
      ->check(CLI::IsMember({"router-mean", "linear-readout"}))
      ->capture_default_str();
  asmb->add_option("--out", asm_out, "Network bundle JSON")->required();

  // eval / heatmap share their inputs
  std::string ev_net, ev_data, ev_part, ev_out, statistic = "mean";
  double holdout = 0.2;
  uint64_t ev_seed = 42;
  auto* eval = app.add_subcommand("eval", "Evaluate on overlapping and non-overlapping test sets");
  auto* heat = app.add_subcommand("heatmap", "Per-unit activation heatmap and attribution");
  for (auto* cmd : {eval, heat}) {
    cmd->add_option("--network", ev_net, "Network bundle JSON")->required();
    cmd->add_option("--data", ev_data, "Dataset CSV")->required();
    cmd->add_option("--partition", ev_part, "Partition JSON")->required();
    cmd->add_option("--holdout", holdout, "Fraction of partitioned ids in the overlapping set")
        ->capture_default_str();
    cmd->add_option("--seed", ev_seed, "Seed")->capture_default_str();
    cmd->add_option("--out-dir", ev_out, "Output directory")->required();
  }
  heat->add_option("--statistic", statistic, "Cell statistic")
      ->check(CLI::IsMember({"mean", "max"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*pipeline) {
      require_input(config_path, "config");
      std::vector<const char*> raw;
      for (const auto& o : overrides) raw.push_back(o.c_str());
      char manifest[4096] = {0};
      check(sn_pipeline_run(config_path.c_str(), raw.data(), raw.size(), manifest,
                            sizeof(manifest)),
            "pipeline");
      std::cout << "wrote " << manifest << "\n";
    } else if (*init) {
      check(sn_default_config_write(init_out.c_str()), "writing config");
    } else if (*gen) {
      require_input(specs_path, "group spec file");
      sn_dataset* raw = nullptr;
      check(sn_dataset_generate(slurp(specs_path).c_str(), gen_seed, eval_per_group, &raw),
            "generating dataset");
      Dataset ds(raw);
      check(sn_dataset_save(ds.get(), data_out.c_str()), "writing dataset");
      std::cout << "wrote " << sn_dataset_size(ds.get()) << " observations to " << data_out
                << "\n";
    } else if (*part) {
      Dataset ds = load_dataset(part_data);
      if (!part_groups.empty() && part_groups.size() != counts.size()) {
        std::cerr << "switchnet: --groups needs one entry per count\n";
        return kExitUsage;
      }
      sn_partition* raw = nullptr;
      check(sn_partition_create(ds.get(),
                                selection == "contiguous" ? SN_SELECT_CONTIGUOUS
                                                          : SN_SELECT_STRATIFIED,
                                counts.data(), part_groups.empty() ? nullptr : part_groups.data(),
                                counts.size(), part_seed, &raw),
            "partitioning");
      Partition p(raw);
      check(sn_partition_save(p.get(), part_out.c_str()), "writing partition");
    } else if (*train) {
      Dataset ds = load_dataset(train_data);
      Partition p = load_partition(train_part, ds.get());
      const sn_train_config cfg = train_opts.config();
      sn_unit* unit_raw = nullptr;
      sn_train_log* log_raw = nullptr;
      check(sn_unit_train_subset(ds.get(), p.get(), subset, train_opts.act(), &cfg, &unit_raw,
                                 &log_raw),
            "training subset " + std::to_string(subset));
      Unit unit(unit_raw);
      TrainLog log(log_raw);
      check(sn_unit_save(unit.get(), train_out.c_str()), "writing unit");
      if (!train_log.empty()) check(sn_train_log_save(log.get(), train_log.c_str()), "writing log");
      std::cout << "subset " << subset << ": " << sn_partition_subset_size(p.get(), subset)
                << " observations, final loss " << sn_train_log_final_loss(log.get()) << "\n";
    } else if (*fed) {
      Dataset ds = load_dataset(fed_data);
      Partition p = load_partition(fed_part, ds.get());
      Switch sw;
      if (fed_switch.empty()) {
        sn_switch* raw = nullptr;
        check(sn_switch_identity(sn_partition_unit_count(p.get()), &raw), "building switch");
        sw.reset(raw);
      } else {
        sw = load_switch(fed_switch);
      }
      const sn_train_config cfg = fed_opts.config();
      const std::size_t w = workers == 0 ? sn_partition_unit_count(p.get()) : workers;
      sn_fed_result* raw = nullptr;
      check(sn_fedsim_run(ds.get(), p.get(), sw.get(), parse_aggregation(fed_agg), fed_opts.act(),
                          &cfg, w, &raw),
            "federated training");
      FedResult result(raw);
      check(sn_fed_result_write(result.get(), fed_out.c_str()), "writing federated outputs");
      std::cout << "trained " << sn_partition_unit_count(p.get()) << " nodes on " << w
                << " workers in " << sn_fed_result_wall_ms(result.get()) << " ms\n";
    } else if (*asmb) {
      std::vector<Unit> units;
      std::vector<const sn_unit*> handles;
      for (const auto& path : unit_paths) {
        require_input(path, "unit");
        sn_unit* raw = nullptr;
        check(sn_unit_load(path.c_str(), &raw), "loading unit '" + path + "'");
        units.emplace_back(raw);
        handles.push_back(raw);
      }
      Switch sw;
      if (asm_switch.empty()) {
        sn_switch* raw = nullptr;
        check(sn_switch_identity(units.size(), &raw), "building switch");
        sw.reset(raw);
      } else {
        sw = load_switch(asm_switch);
      }
      sn_network* raw = nullptr;
      check(sn_network_assemble(handles.data(), handles.size(), sw.get(),
                                parse_aggregation(asm_agg), &raw),
            "assembling network");
      Network net(raw);
      check(sn_network_save(net.get(), asm_out.c_str()), "writing network bundle");
    } else if (*eval) {
      Network net = load_network(ev_net);
      Dataset ds = load_dataset(ev_data);
      Partition p = load_partition(ev_part, ds.get());
      sn_eval_result* raw = nullptr;
      check(sn_evaluate(net.get(), ds.get(), p.get(), holdout, ev_seed, &raw), "evaluating");
      EvalResult result(raw);
      check(sn_eval_result_write(result.get(), ev_out.c_str()), "writing metrics");
      std::cout << "accuracy overlapping " << sn_eval_result_accuracy(result.get(), 0)
                << ", non-overlapping " << sn_eval_result_accuracy(result.get(), 1) << "\n";
    } else if (*heat) {
      Network net = load_network(ev_net);
      Dataset ds = load_dataset(ev_data);
      Partition p = load_partition(ev_part, ds.get());
      sn_analysis* raw = nullptr;
      check(sn_analyze(net.get(), ds.get(), p.get(), holdout, ev_seed,
                       statistic == "max" ? SN_STAT_MAX : SN_STAT_MEAN, &raw),
            "computing heatmap");
      Analysis result(raw);
      check(sn_analysis_write(result.get(), ev_out.c_str()), "writing heatmap");
      for (std::size_t u = 0; u < sn_analysis_rows(result.get()); ++u) {
        std::cout << "unit " << u << " -> group " << sn_analysis_attributed_group(result.get(), u)
                  << "\n";
      }
    } else {
      std::cout << app.help();
      return kExitUsage;
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitOk;
}
