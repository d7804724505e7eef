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

/*
 * C interface to the switchnet library.
 *
 * Every object is an opaque handle created by an sn_*_create/load/...
 * function and released with the matching sn_*_free. Functions return an
 * sn_status; on failure sn_last_error() describes the problem. The message
 * is thread-local and valid until the next failing call on the same thread.
 * Handles are immutable once created and may be shared across threads.
 */

#ifndef SWITCHNET_SWITCHNET_H_
#define SWITCHNET_SWITCHNET_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SWITCHNET_BUILDING_LIBRARY)
#define SN_API __attribute__((visibility("default")))
#else
#define SN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sn_status {
  SN_OK = 0,
  SN_ERR_INVALID_ARGUMENT = 1,
  SN_ERR_CONFIG = 2,
  SN_ERR_IO = 3,
  SN_ERR_PARSE = 4,
  SN_ERR_ROUTING = 5,
  SN_ERR_TRAINING = 6,
  SN_ERR_NOT_FOUND = 7,
  SN_ERR_RUNTIME = 8
} sn_status;

typedef enum sn_activation {
  SN_ACT_SIGMOID = 0,
  SN_ACT_RELU = 1,
  SN_ACT_TANH = 2
} sn_activation;

typedef enum sn_loss { SN_LOSS_MSE = 0, SN_LOSS_BCE = 1 } sn_loss;

typedef enum sn_selection {
  SN_SELECT_CONTIGUOUS = 0,
  SN_SELECT_STRATIFIED = 1
} sn_selection;

typedef enum sn_aggregation {
  SN_AGG_ROUTER_MEAN = 0,
  SN_AGG_LINEAR_READOUT = 1
} sn_aggregation;

typedef enum sn_statistic { SN_STAT_MEAN = 0, SN_STAT_MAX = 1 } sn_statistic;

typedef struct sn_train_config {
  double learning_rate;
  int32_t epochs;
  sn_loss loss;
  uint64_t seed;
  int32_t shuffle; /* non-zero: shuffle each epoch */
} sn_train_config;

typedef struct sn_dataset sn_dataset;
typedef struct sn_partition sn_partition;
typedef struct sn_switch sn_switch;
typedef struct sn_unit sn_unit;
typedef struct sn_train_log sn_train_log;
typedef struct sn_network sn_network;
typedef struct sn_fed_result sn_fed_result;
typedef struct sn_eval_result sn_eval_result;
typedef struct sn_analysis sn_analysis;

SN_API const char* sn_version(void);
SN_API const char* sn_last_error(void);
SN_API const char* sn_status_name(sn_status status);

/* Defaults used by the shipped experiment: lr 0.1, 50 epochs, bce, shuffle. */
SN_API sn_train_config sn_train_config_default(uint64_t seed);

/* ---- data ------------------------------------------------------------- */

/* specs_json: JSON array of group specs. extra_per_group observations are
 * added to every group to form an unseen evaluation pool. */
SN_API sn_status sn_dataset_generate(const char* specs_json, uint64_t seed,
                                     size_t extra_per_group, sn_dataset** out);
SN_API sn_status sn_dataset_load(const char* csv_path, sn_dataset** out);
/* Writes the CSV and its `<stem>.groups.json` group table. */
SN_API sn_status sn_dataset_save(const sn_dataset* dataset, const char* csv_path);
SN_API size_t sn_dataset_size(const sn_dataset* dataset);
SN_API size_t sn_dataset_dim(const sn_dataset* dataset);
SN_API size_t sn_dataset_group_count(const sn_dataset* dataset);
SN_API void sn_dataset_free(sn_dataset* dataset);

/* groups may be NULL: unit k then draws from group k (stratified only). */
SN_API sn_status sn_partition_create(const sn_dataset* dataset,
                                     sn_selection selection,
                                     const size_t* counts,
                                     const uint32_t* groups, size_t n_units,
                                     uint64_t seed, sn_partition** out);
/* Explicit assignment: unit k receives ids[k][0..counts[k]). */
SN_API sn_status sn_partition_create_explicit(const sn_dataset* dataset,
                                              const uint64_t* const* ids,
                                              const size_t* counts,
                                              size_t n_units, uint64_t seed,
                                              sn_partition** out);
SN_API sn_status sn_partition_load(const char* json_path,
                                   const sn_dataset* dataset,
                                   sn_partition** out);
SN_API sn_status sn_partition_save(const sn_partition* partition,
                                   const char* json_path);
SN_API size_t sn_partition_unit_count(const sn_partition* partition);
SN_API size_t sn_partition_subset_size(const sn_partition* partition,
                                       size_t unit);
SN_API void sn_partition_free(sn_partition* partition);

/* ---- switch ----------------------------------------------------------- */

SN_API sn_status sn_switch_from_json(const char* json, sn_switch** out);
SN_API sn_status sn_switch_load(const char* json_path, sn_switch** out);
SN_API sn_status sn_switch_identity(size_t n_units, sn_switch** out);
SN_API sn_status sn_switch_save(const sn_switch* sw, const char* json_path);
SN_API size_t sn_switch_unit_count(const sn_switch* sw);
/* Writes n_units bytes (0/1) into mask. */
SN_API sn_status sn_switch_route(const sn_switch* sw, uint32_t group,
                                 uint8_t* mask, size_t mask_len);
SN_API void sn_switch_free(sn_switch* sw);

/* ---- units ------------------------------------------------------------ */

SN_API sn_status sn_unit_init(size_t dim, sn_activation activation,
                              size_t unit_index, uint64_t seed, sn_unit** out);
SN_API sn_status sn_unit_load(const char* json_path, sn_unit** out);
SN_API sn_status sn_unit_save(const sn_unit* unit, const char* json_path);
SN_API sn_status sn_unit_forward(const sn_unit* unit, const double* x,
                                 size_t n, double* out);
/* Trains a fresh unit for one partition subset, seeded exactly as the
 * matching federated node would be. */
SN_API sn_status sn_unit_train_subset(const sn_dataset* dataset,
                                      const sn_partition* partition,
                                      size_t subset, sn_activation activation,
                                      const sn_train_config* config,
                                      sn_unit** unit_out,
                                      sn_train_log** log_out);
SN_API void sn_unit_free(sn_unit* unit);

SN_API double sn_train_log_final_loss(const sn_train_log* log);
SN_API size_t sn_train_log_epochs(const sn_train_log* log);
SN_API sn_status sn_train_log_save(const sn_train_log* log, const char* json_path);
SN_API void sn_train_log_free(sn_train_log* log);

/* ---- network ---------------------------------------------------------- */

SN_API sn_status sn_network_assemble(const sn_unit* const* units, size_t n,
                                     const sn_switch* sw,
                                     sn_aggregation aggregation,
                                     sn_network** out);
SN_API sn_status sn_network_load(const char* json_path, sn_network** out);
SN_API sn_status sn_network_save(const sn_network* net, const char* json_path);
SN_API size_t sn_network_unit_count(const sn_network* net);
/* Gated prediction for a feature vector routed by `group`. gated may be NULL;
 * otherwise it receives n_units activations. */
SN_API sn_status sn_network_forward(const sn_network* net, const double* x,
                                    size_t n, uint32_t group, double* score,
                                    int32_t* label, double* gated,
                                    size_t gated_len);

/* ---- federated simulation -------------------------------------------- */

/* Initialises one unit per subset, trains them on isolated nodes with
 * `workers` threads, and collects the network. linear-readout additionally
 * fits the readout on the partitioned ids. */
SN_API sn_status sn_fedsim_run(const sn_dataset* dataset,
                               const sn_partition* partition,
                               const sn_switch* sw, sn_aggregation aggregation,
                               sn_activation activation,
                               const sn_train_config* config, size_t workers,
                               sn_fed_result** out);
/* units/unit_k.json, units/unit_k.log.json, network.json, fed_report.json,
 * fed_timing.json (and readout_log.json for linear-readout). */
SN_API sn_status sn_fed_result_write(const sn_fed_result* result,
                                     const char* dir);
/* New handle; free with sn_network_free. */
SN_API sn_status sn_fed_result_network(const sn_fed_result* result,
                                       sn_network** out);
SN_API double sn_fed_result_wall_ms(const sn_fed_result* result);
SN_API void sn_fed_result_free(sn_fed_result* result);

SN_API void sn_network_free(sn_network* net);

/* ---- evaluation and analysis ----------------------------------------- */

SN_API sn_status sn_evaluate(const sn_network* net, const sn_dataset* dataset,
                             const sn_partition* partition,
                             double holdout_fraction, uint64_t seed,
                             sn_eval_result** out);
/* test_sets.json, metrics_overlapping.json, metrics_non_overlapping.json,
 * contribution.json */
SN_API sn_status sn_eval_result_write(const sn_eval_result* result,
                                      const char* dir);
SN_API double sn_eval_result_accuracy(const sn_eval_result* result,
                                      int32_t non_overlapping);
SN_API void sn_eval_result_free(sn_eval_result* result);

SN_API sn_status sn_analyze(const sn_network* net, const sn_dataset* dataset,
                            const sn_partition* partition,
                            double holdout_fraction, uint64_t seed,
                            sn_statistic statistic, sn_analysis** out);
/* heatmap.csv, heatmap.svg, attribution.json */
SN_API sn_status sn_analysis_write(const sn_analysis* analysis, const char* dir);
SN_API size_t sn_analysis_rows(const sn_analysis* analysis);
SN_API size_t sn_analysis_cols(const sn_analysis* analysis);
SN_API double sn_analysis_value(const sn_analysis* analysis, size_t unit,
                                size_t column);
SN_API uint32_t sn_analysis_attributed_group(const sn_analysis* analysis,
                                             size_t unit);
SN_API void sn_analysis_free(sn_analysis* analysis);

/* ---- pipeline --------------------------------------------------------- */

/* Runs the full experiment described by the JSON config at config_path with
 * `key=value` overrides applied. SN_ERR_CONFIG (or SN_ERR_NOT_FOUND for a
 * missing config file) means nothing was run; SN_ERR_RUNTIME names the
 * failing stage. On success the manifest path is copied into manifest_out
 * (truncated to manifest_len) when manifest_out is non-NULL. */
SN_API sn_status sn_pipeline_run(const char* config_path,
                                 const char* const* overrides,
                                 size_t n_overrides, char* manifest_out,
                                 size_t manifest_len);
/* Writes the built-in default experiment config. */
SN_API sn_status sn_default_config_write(const char* json_path);

#ifdef __cplusplus
}
#endif

#endif /* SWITCHNET_SWITCHNET_H_ */
