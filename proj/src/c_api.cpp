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

#include "switchnet/switchnet.h"

#include <cstring>
#include <new>
#include <string>

#include "switchnet/error.hpp"
#include "switchnet/pipeline.hpp"

namespace sn = switchnet;

struct sn_dataset {
  sn::Dataset value;
};
struct sn_partition {
  sn::PartitionSet value;
};
struct sn_switch {
  sn::SwitchTable value;
};
struct sn_unit {
  sn::NeuronUnit value;
};
struct sn_train_log {
  sn::TrainLog value;
  sn::UnitIndex unit;
};
struct sn_network {
  sn::ModularNetwork value;
};
struct sn_fed_result {
  sn::FedOutcome value;
};
struct sn_eval_result {
  sn::EvalOutcome value;
};
struct sn_analysis {
  sn::AnalysisOutcome value;
};

namespace {

thread_local std::string g_last_error;

sn_status to_status(sn::ErrorKind kind) {
  switch (kind) {
    case sn::ErrorKind::kInvalidArgument:
      return SN_ERR_INVALID_ARGUMENT;
    case sn::ErrorKind::kConfig:
      return SN_ERR_CONFIG;
    case sn::ErrorKind::kIo:
      return SN_ERR_IO;
    case sn::ErrorKind::kParse:
      return SN_ERR_PARSE;
    case sn::ErrorKind::kRouting:
      return SN_ERR_ROUTING;
    case sn::ErrorKind::kTraining:
      return SN_ERR_TRAINING;
    case sn::ErrorKind::kNotFound:
      return SN_ERR_NOT_FOUND;
    case sn::ErrorKind::kRuntime:
      return SN_ERR_RUNTIME;
  }
  return SN_ERR_RUNTIME;
}

sn_status fail(sn_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
sn_status guarded(F&& body) {
  try {
    body();
    return SN_OK;
  } catch (const sn::Error& e) {
    return fail(to_status(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(SN_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SN_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(SN_ERR_RUNTIME, e.what());
  }
}

#define SN_REQUIRE(cond, what)                                  \
  do {                                                          \
    if (!(cond)) return fail(SN_ERR_INVALID_ARGUMENT, (what)); \
  } while (0)

sn::Activation to_cpp(sn_activation a) {
  switch (a) {
    case SN_ACT_SIGMOID:
      return sn::Activation::kSigmoid;
    case SN_ACT_RELU:
      return sn::Activation::kRelu;
    case SN_ACT_TANH:
      return sn::Activation::kTanh;
  }
  throw sn::Error(sn::ErrorKind::kInvalidArgument, "unknown activation code");
}

sn::TrainConfig to_cpp(const sn_train_config& c) {
  sn::TrainConfig out;
  out.learning_rate = c.learning_rate;
  out.epochs = c.epochs;
  out.loss = c.loss == SN_LOSS_MSE ? sn::Loss::kMse : sn::Loss::kBce;
  out.seed = c.seed;
  out.shuffle = c.shuffle != 0;
  return out;
}

sn::AggregationKind to_cpp(sn_aggregation a) {
  return a == SN_AGG_LINEAR_READOUT ? sn::AggregationKind::kLinearReadout
                                    : sn::AggregationKind::kRouterMean;
}

}  // namespace

extern "C" {

const char* sn_version(void) { return sn::kVersion; }

const char* sn_last_error(void) { return g_last_error.c_str(); }

const char* sn_status_name(sn_status status) {
  switch (status) {
    case SN_OK:
      return "ok";
    case SN_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case SN_ERR_CONFIG:
      return "config error";
    case SN_ERR_IO:
      return "i/o error";
    case SN_ERR_PARSE:
      return "parse error";
    case SN_ERR_ROUTING:
      return "routing error";
    case SN_ERR_TRAINING:
      return "training error";
    case SN_ERR_NOT_FOUND:
      return "not found";
    case SN_ERR_RUNTIME:
      return "runtime error";
  }
  return "unknown";
}

sn_train_config sn_train_config_default(uint64_t seed) {
  const sn::TrainConfig d;
  return sn_train_config{d.learning_rate, d.epochs, SN_LOSS_BCE, seed, 1};
}

//---------------------------------------------------------------------------//
// data

sn_status sn_dataset_generate(const char* specs_json, uint64_t seed,
                              size_t extra_per_group, sn_dataset** out) {
  SN_REQUIRE(specs_json && out, "null argument");
  return guarded([&] {
    const auto specs =
        sn::with_eval_pool(sn::group_specs_from_json(sn::Json::parse(specs_json)),
                           extra_per_group);
    *out = new sn_dataset{sn::generate_synthetic(specs, seed)};
  });
}

sn_status sn_dataset_load(const char* csv_path, sn_dataset** out) {
  SN_REQUIRE(csv_path && out, "null argument");
  return guarded([&] { *out = new sn_dataset{sn::load_dataset(csv_path)}; });
}

sn_status sn_dataset_save(const sn_dataset* dataset, const char* csv_path) {
  SN_REQUIRE(dataset && csv_path, "null argument");
  return guarded([&] { sn::save_dataset(dataset->value, csv_path); });
}

size_t sn_dataset_size(const sn_dataset* dataset) {
  return dataset ? dataset->value.size() : 0;
}

size_t sn_dataset_dim(const sn_dataset* dataset) {
  return dataset ? dataset->value.dim() : 0;
}

size_t sn_dataset_group_count(const sn_dataset* dataset) {
  return dataset ? dataset->value.groups().size() : 0;
}

void sn_dataset_free(sn_dataset* dataset) { delete dataset; }

sn_status sn_partition_create(const sn_dataset* dataset, sn_selection selection,
                              const size_t* counts, const uint32_t* groups,
                              size_t n_units, uint64_t seed, sn_partition** out) {
  SN_REQUIRE(dataset && counts && out, "null argument");
  return guarded([&] {
    const auto sel = selection == SN_SELECT_CONTIGUOUS ? sn::Selection::kContiguous
                                                       : sn::Selection::kStratified;
    sn::PartitionPlan plan = sn::make_plan(std::span(counts, n_units), sel);
    if (groups != nullptr) {
      for (size_t k = 0; k < n_units; ++k) plan.assignments[k].group = groups[k];
    }
    *out = new sn_partition{sn::partition(dataset->value, plan, seed)};
  });
}

sn_status sn_partition_create_explicit(const sn_dataset* dataset,
                                       const uint64_t* const* ids,
                                       const size_t* counts, size_t n_units,
                                       uint64_t seed, sn_partition** out) {
  SN_REQUIRE(dataset && ids && counts && out, "null argument");
  return guarded([&] {
    sn::PartitionPlan plan =
        sn::make_plan(std::span(counts, n_units), sn::Selection::kExplicit);
    for (size_t k = 0; k < n_units; ++k) {
      plan.assignments[k].ids.assign(ids[k], ids[k] + counts[k]);
    }
    *out = new sn_partition{sn::partition(dataset->value, plan, seed)};
  });
}

sn_status sn_partition_load(const char* json_path, const sn_dataset* dataset,
                            sn_partition** out) {
  SN_REQUIRE(json_path && dataset && out, "null argument");
  return guarded([&] {
    auto p = sn::partition_from_json(sn::read_json_file(json_path));
    sn::check_partition(dataset->value, p);
    *out = new sn_partition{std::move(p)};
  });
}

sn_status sn_partition_save(const sn_partition* partition, const char* json_path) {
  SN_REQUIRE(partition && json_path, "null argument");
  return guarded(
      [&] { sn::write_json_file(json_path, sn::partition_to_json(partition->value)); });
}

size_t sn_partition_unit_count(const sn_partition* partition) {
  return partition ? partition->value.n_units() : 0;
}

size_t sn_partition_subset_size(const sn_partition* partition, size_t unit) {
  if (!partition || unit >= partition->value.n_units()) return 0;
  return partition->value.subsets[unit].size();
}

void sn_partition_free(sn_partition* partition) { delete partition; }

//---------------------------------------------------------------------------//
// switch

sn_status sn_switch_from_json(const char* json, sn_switch** out) {
  SN_REQUIRE(json && out, "null argument");
  return guarded(
      [&] { *out = new sn_switch{sn::switch_from_json(sn::Json::parse(json))}; });
}

sn_status sn_switch_load(const char* json_path, sn_switch** out) {
  SN_REQUIRE(json_path && out, "null argument");
  return guarded(
      [&] { *out = new sn_switch{sn::switch_from_json(sn::read_json_file(json_path))}; });
}

sn_status sn_switch_identity(size_t n_units, sn_switch** out) {
  SN_REQUIRE(out, "null argument");
  return guarded([&] { *out = new sn_switch{sn::identity_switch(n_units)}; });
}

sn_status sn_switch_save(const sn_switch* sw, const char* json_path) {
  SN_REQUIRE(sw && json_path, "null argument");
  return guarded([&] { sn::write_json_file(json_path, sn::switch_to_json(sw->value)); });
}

size_t sn_switch_unit_count(const sn_switch* sw) { return sw ? sw->value.n_units() : 0; }

sn_status sn_switch_route(const sn_switch* sw, uint32_t group, uint8_t* mask,
                          size_t mask_len) {
  SN_REQUIRE(sw && mask, "null argument");
  SN_REQUIRE(mask_len >= sw->value.n_units(), "mask buffer too small");
  return guarded([&] {
    const auto m = sn::route(sw->value, group);
    for (size_t u = 0; u < m.size(); ++u) mask[u] = m[u] ? 1 : 0;
  });
}

void sn_switch_free(sn_switch* sw) { delete sw; }

//---------------------------------------------------------------------------//
// units

sn_status sn_unit_init(size_t dim, sn_activation activation, size_t unit_index,
                       uint64_t seed, sn_unit** out) {
  SN_REQUIRE(out, "null argument");
  return guarded([&] {
    *out = new sn_unit{sn::init_unit(dim, to_cpp(activation), unit_index, seed)};
  });
}

sn_status sn_unit_load(const char* json_path, sn_unit** out) {
  SN_REQUIRE(json_path && out, "null argument");
  return guarded(
      [&] { *out = new sn_unit{sn::unit_from_json(sn::read_json_file(json_path))}; });
}

sn_status sn_unit_save(const sn_unit* unit, const char* json_path) {
  SN_REQUIRE(unit && json_path, "null argument");
  return guarded([&] { sn::write_json_file(json_path, sn::unit_to_json(unit->value)); });
}

sn_status sn_unit_forward(const sn_unit* unit, const double* x, size_t n, double* out) {
  SN_REQUIRE(unit && x && out, "null argument");
  return guarded([&] { *out = sn::unit_forward(unit->value, std::span(x, n)); });
}

sn_status sn_unit_train_subset(const sn_dataset* dataset, const sn_partition* partition,
                               size_t subset, sn_activation activation,
                               const sn_train_config* config, sn_unit** unit_out,
                               sn_train_log** log_out) {
  SN_REQUIRE(dataset && partition && config && unit_out, "null argument");
  return guarded([&] {
    auto [unit, log] = sn::train_subset(dataset->value, partition->value, subset,
                                        to_cpp(activation), to_cpp(*config));
    *unit_out = new sn_unit{std::move(unit)};
    if (log_out) *log_out = new sn_train_log{std::move(log), subset};
  });
}

void sn_unit_free(sn_unit* unit) { delete unit; }

double sn_train_log_final_loss(const sn_train_log* log) {
  return log ? log->value.final_loss : 0.0;
}

size_t sn_train_log_epochs(const sn_train_log* log) {
  return log ? log->value.epoch_loss.size() : 0;
}

sn_status sn_train_log_save(const sn_train_log* log, const char* json_path) {
  SN_REQUIRE(log && json_path, "null argument");
  return guarded([&] {
    sn::write_json_file(json_path, sn::train_log_to_json(log->value, log->unit));
  });
}

void sn_train_log_free(sn_train_log* log) { delete log; }

//---------------------------------------------------------------------------//
// network

sn_status sn_network_assemble(const sn_unit* const* units, size_t n, const sn_switch* sw,
                              sn_aggregation aggregation, sn_network** out) {
  SN_REQUIRE(sw && out && (units || n == 0), "null argument");
  return guarded([&] {
    std::vector<sn::NeuronUnit> list;
    for (size_t i = 0; i < n; ++i) {
      if (!units[i]) throw sn::Error(sn::ErrorKind::kInvalidArgument, "null unit handle");
      list.push_back(units[i]->value);
    }
    const sn::Aggregation agg = aggregation == SN_AGG_LINEAR_READOUT
                                    ? sn::Aggregation::linear_readout({}, 0.0)
                                    : sn::Aggregation::router_mean();
    *out = new sn_network{sn::assemble(std::move(list), sw->value, agg)};
  });
}

sn_status sn_network_load(const char* json_path, sn_network** out) {
  SN_REQUIRE(json_path && out, "null argument");
  return guarded([&] {
    *out = new sn_network{sn::network_from_json(sn::read_json_file(json_path))};
  });
}

sn_status sn_network_save(const sn_network* net, const char* json_path) {
  SN_REQUIRE(net && json_path, "null argument");
  return guarded([&] { sn::write_json_file(json_path, sn::network_to_json(net->value)); });
}

size_t sn_network_unit_count(const sn_network* net) { return net ? net->value.n_units() : 0; }

sn_status sn_network_forward(const sn_network* net, const double* x, size_t n,
                             uint32_t group, double* score, int32_t* label,
                             double* gated, size_t gated_len) {
  SN_REQUIRE(net && x, "null argument");
  SN_REQUIRE(!gated || gated_len >= net->value.n_units(), "gated buffer too small");
  return guarded([&] {
    sn::Observation obs;
    obs.group = group;
    obs.features.assign(x, x + n);
    const sn::Prediction p = sn::forward(net->value, obs);
    if (score) *score = p.score;
    if (label) *label = p.predicted_label;
    if (gated) std::copy(p.gated_activations.begin(), p.gated_activations.end(), gated);
  });
}

void sn_network_free(sn_network* net) { delete net; }

//---------------------------------------------------------------------------//
// federated simulation

sn_status sn_fedsim_run(const sn_dataset* dataset, const sn_partition* partition,
                        const sn_switch* sw, sn_aggregation aggregation,
                        sn_activation activation, const sn_train_config* config,
                        size_t workers, sn_fed_result** out) {
  SN_REQUIRE(dataset && partition && sw && config && out, "null argument");
  return guarded([&] {
    *out = new sn_fed_result{sn::run_fedsim(dataset->value, partition->value, sw->value,
                                            to_cpp(aggregation), to_cpp(activation),
                                            to_cpp(*config), workers)};
  });
}

sn_status sn_fed_result_write(const sn_fed_result* result, const char* dir) {
  SN_REQUIRE(result && dir, "null argument");
  return guarded([&] { sn::write_fed_outputs(dir, result->value); });
}

sn_status sn_fed_result_network(const sn_fed_result* result, sn_network** out) {
  SN_REQUIRE(result && out, "null argument");
  return guarded([&] { *out = new sn_network{result->value.network}; });
}

double sn_fed_result_wall_ms(const sn_fed_result* result) {
  return result ? result->value.result.report.wall_ms : 0.0;
}

void sn_fed_result_free(sn_fed_result* result) { delete result; }

//---------------------------------------------------------------------------//
// evaluation and analysis

sn_status sn_evaluate(const sn_network* net, const sn_dataset* dataset,
                      const sn_partition* partition, double holdout_fraction,
                      uint64_t seed, sn_eval_result** out) {
  SN_REQUIRE(net && dataset && partition && out, "null argument");
  return guarded([&] {
    *out = new sn_eval_result{sn::run_evaluation(net->value, dataset->value,
                                                 partition->value, holdout_fraction, seed)};
  });
}

sn_status sn_eval_result_write(const sn_eval_result* result, const char* dir) {
  SN_REQUIRE(result && dir, "null argument");
  return guarded([&] { sn::write_eval_outputs(dir, result->value); });
}

double sn_eval_result_accuracy(const sn_eval_result* result, int32_t non_overlapping) {
  if (!result) return 0.0;
  return non_overlapping ? result->value.non_overlapping.accuracy
                         : result->value.overlapping.accuracy;
}

void sn_eval_result_free(sn_eval_result* result) { delete result; }

sn_status sn_analyze(const sn_network* net, const sn_dataset* dataset,
                     const sn_partition* partition, double holdout_fraction,
                     uint64_t seed, sn_statistic statistic, sn_analysis** out) {
  SN_REQUIRE(net && dataset && partition && out, "null argument");
  return guarded([&] {
    const auto stat = statistic == SN_STAT_MAX ? sn::Statistic::kMax : sn::Statistic::kMean;
    *out = new sn_analysis{sn::run_analysis(net->value, dataset->value, partition->value,
                                            holdout_fraction, seed, stat)};
  });
}

sn_status sn_analysis_write(const sn_analysis* analysis, const char* dir) {
  SN_REQUIRE(analysis && dir, "null argument");
  return guarded([&] { sn::write_analysis_outputs(dir, analysis->value); });
}

size_t sn_analysis_rows(const sn_analysis* analysis) {
  return analysis ? analysis->value.matrix.rows() : 0;
}

size_t sn_analysis_cols(const sn_analysis* analysis) {
  return analysis ? analysis->value.matrix.cols() : 0;
}

double sn_analysis_value(const sn_analysis* analysis, size_t unit, size_t column) {
  if (!analysis || unit >= analysis->value.matrix.rows() ||
      column >= analysis->value.matrix.cols()) {
    return 0.0;
  }
  return analysis->value.matrix.values[unit][column];
}

uint32_t sn_analysis_attributed_group(const sn_analysis* analysis, size_t unit) {
  if (!analysis || unit >= analysis->value.attribution.rows.size()) return 0;
  return analysis->value.attribution.rows[unit].group;
}

void sn_analysis_free(sn_analysis* analysis) { delete analysis; }

//---------------------------------------------------------------------------//
// pipeline

sn_status sn_pipeline_run(const char* config_path, const char* const* overrides,
                          size_t n_overrides, char* manifest_out, size_t manifest_len) {
  SN_REQUIRE(config_path && (overrides || n_overrides == 0), "null argument");
  sn::Json config;
  const sn_status loaded = guarded([&] {
    try {
      config = sn::read_json_file(config_path);
    } catch (const sn::Error& e) {
      // An unreadable or malformed config is a config problem, not a stage failure.
      if (e.kind() == sn::ErrorKind::kParse) throw sn::Error(sn::ErrorKind::kConfig, e.what());
      throw;
    }
    std::vector<std::string> list(overrides, overrides + n_overrides);
    sn::apply_overrides(config, list);
  });
  if (loaded != SN_OK) return loaded;
  return guarded([&] {
    const auto bundle = sn::run_pipeline(config);
    if (manifest_out && manifest_len > 0) {
      const std::string path = bundle.manifest.string();
      const size_t n = std::min(path.size(), manifest_len - 1);
      std::memcpy(manifest_out, path.data(), n);
      manifest_out[n] = '\0';
    }
  });
}

sn_status sn_default_config_write(const char* json_path) {
  SN_REQUIRE(json_path, "null argument");
  return guarded([&] { sn::write_json_file(json_path, sn::default_config_json()); });
}

}  // extern "C"
