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

// Observations, datasets, synthetic cluster generation and disjoint
// partitioning of a dataset into per-unit training subsets.

#ifndef SWITCHNET_DATA_HPP_
#define SWITCHNET_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace switchnet {

using ObservationId = std::uint64_t;
using GroupId = std::uint32_t;
using UnitIndex = std::size_t;

struct Observation {
  ObservationId id = 0;
  GroupId group = 0;
  int label = 0;
  std::vector<double> features;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct GroupInfo {
  GroupId id = 0;
  std::string name;

  friend bool operator==(const GroupInfo&, const GroupInfo&) = default;
};

/// Immutable collection of observations with a declared dimension and
/// group set. Lookup by id is O(1).
class Dataset {
 public:
  Dataset() = default;
  /// Validates every invariant; throws Error on violation.
  Dataset(std::size_t dim, std::vector<GroupInfo> groups,
          std::vector<Observation> observations);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return observations_.size(); }
  const std::vector<GroupInfo>& groups() const noexcept { return groups_; }
  const std::vector<Observation>& observations() const noexcept {
    return observations_;
  }

  bool contains(ObservationId id) const { return index_.contains(id); }
  /// Throws Error(kNotFound) for an unknown id.
  const Observation& at(ObservationId id) const;
  bool has_group(GroupId g) const;
  const std::string& group_name(GroupId g) const;

  std::vector<ObservationId> ids() const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.dim_ == b.dim_ && a.groups_ == b.groups_ &&
           a.observations_ == b.observations_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<GroupInfo> groups_;
  std::vector<Observation> observations_;
  std::unordered_map<ObservationId, std::size_t> index_;
};

enum class LabelRuleKind { kAllZero, kAllOne, kLinearThreshold };

/// Label assignment for generated points. The linear rule yields 1 iff
/// weights . x + bias > 0.
struct LabelRule {
  LabelRuleKind kind = LabelRuleKind::kAllZero;
  std::vector<double> weights;
  double bias = 0.0;

  int apply(std::span<const double> x) const;

  friend bool operator==(const LabelRule&, const LabelRule&) = default;
};

/// One Gaussian cluster of the synthetic generator.
struct GroupSpec {
  std::string name;
  std::vector<double> mean;
  std::vector<double> scale;
  LabelRule label_rule;
  std::size_t count = 1;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

/// Group g of the result is specs[g]; ids run 0..N-1 in spec order.
/// Observation i of group g is mean + scale * N(0, I) drawn from a
/// generator keyed by (seed, g, i).
Dataset generate_synthetic(std::span<const GroupSpec> specs, std::uint64_t seed);

/// Dataset CSV: header `id,group,label,f0,...,f{d-1}`. The declared group
/// table (ids and display names) is written next to it as
/// `<stem>.groups.json`. On load, rows naming a group outside that table are
/// rejected; without the sidecar the group set is inferred from the rows.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);
std::filesystem::path groups_sidecar_path(const std::filesystem::path& csv_path);
std::string dataset_to_csv(const Dataset& dataset);
Dataset dataset_from_csv(const std::string& text,
                         const std::vector<GroupInfo>* groups = nullptr);

enum class Selection { kContiguous, kStratified, kExplicit };

struct PlanEntry {
  UnitIndex unit = 0;
  std::size_t count = 0;
  // Stratified mode: the group the unit draws from. Defaults to the unit index.
  std::optional<GroupId> group;
  // Explicit mode: the exact ids; count must equal ids.size().
  std::vector<ObservationId> ids;

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

struct PartitionPlan {
  std::vector<PlanEntry> assignments;
  Selection selection = Selection::kStratified;

  std::size_t total() const;
  /// Checks positivity, contiguous unit indices from 0 and explicit-id sizes.
  void validate() const;

  friend bool operator==(const PartitionPlan&, const PartitionPlan&) = default;
};

/// Plan with one entry per count; stratified units draw from group == unit.
PartitionPlan make_plan(std::span<const std::size_t> counts,
                        Selection selection = Selection::kStratified);

struct PartitionSet {
  // subsets[k] holds unit k's ids, sorted ascending.
  std::vector<std::vector<ObservationId>> subsets;
  PartitionPlan plan;
  std::uint64_t seed = 0;

  std::size_t n_units() const noexcept { return subsets.size(); }
  std::vector<ObservationId> assigned_ids() const;

  friend bool operator==(const PartitionSet&, const PartitionSet&) = default;
};

PartitionSet partition(const Dataset& dataset, const PartitionPlan& plan,
                       std::uint64_t seed);

/// Throws unless subsets are non-empty, pairwise disjoint and drawn from
/// the dataset.
void check_partition(const Dataset& dataset, const PartitionSet& partitions);

struct TestSets {
  std::vector<ObservationId> overlapping;
  std::vector<ObservationId> non_overlapping;
};

/// non_overlapping: every id outside the partition union. overlapping: a
/// seeded sample of floor(fraction * |union|) partitioned ids. Both sorted.
TestSets make_test_sets(const Dataset& dataset, const PartitionSet& partitions,
                        double holdout_fraction, std::uint64_t seed);

std::string to_string(Selection s);
Selection selection_from_string(const std::string& s);
std::string to_string(LabelRuleKind k);
LabelRuleKind label_rule_from_string(const std::string& s);

}  // namespace switchnet

#endif  // SWITCHNET_DATA_HPP_
