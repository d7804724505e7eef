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

#include "switchnet/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include "switchnet/error.hpp"
#include "switchnet/rng.hpp"
#include "switchnet/serialize.hpp"

namespace switchnet {

Dataset::Dataset(std::size_t dim, std::vector<GroupInfo> groups,
                 std::vector<Observation> observations)
    : dim_(dim), groups_(std::move(groups)), observations_(std::move(observations)) {
  if (dim_ == 0) {
    throw Error(ErrorKind::kInvalidArgument, "dataset dimension must be >= 1");
  }
  std::set<GroupId> group_ids;
  for (const auto& g : groups_) {
    if (!group_ids.insert(g.id).second) {
      throw Error(ErrorKind::kInvalidArgument,
                  "duplicate group id " + std::to_string(g.id));
    }
  }
  index_.reserve(observations_.size());
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    const Observation& o = observations_[i];
    if (o.features.size() != dim_) {
      throw Error(ErrorKind::kInvalidArgument,
                  "observation " + std::to_string(o.id) + " has " +
                      std::to_string(o.features.size()) + " features, expected " +
                      std::to_string(dim_));
    }
    if (!group_ids.contains(o.group)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "observation " + std::to_string(o.id) + " has unknown group " +
                      std::to_string(o.group));
    }
    if (o.label != 0 && o.label != 1) {
      throw Error(ErrorKind::kInvalidArgument,
                  "observation " + std::to_string(o.id) + " has invalid label");
    }
    if (!index_.emplace(o.id, i).second) {
      throw Error(ErrorKind::kInvalidArgument,
                  "duplicate observation id " + std::to_string(o.id));
    }
  }
}

const Observation& Dataset::at(ObservationId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorKind::kNotFound, "unknown observation id " + std::to_string(id));
  }
  return observations_[it->second];
}

bool Dataset::has_group(GroupId g) const {
  return std::any_of(groups_.begin(), groups_.end(),
                     [g](const GroupInfo& info) { return info.id == g; });
}

const std::string& Dataset::group_name(GroupId g) const {
  for (const auto& info : groups_) {
    if (info.id == g) return info.name;
  }
  throw Error(ErrorKind::kNotFound, "unknown group " + std::to_string(g));
}

std::vector<ObservationId> Dataset::ids() const {
  std::vector<ObservationId> out;
  out.reserve(observations_.size());
  for (const auto& o : observations_) out.push_back(o.id);
  return out;
}

int LabelRule::apply(std::span<const double> x) const {
  switch (kind) {
    case LabelRuleKind::kAllZero:
      return 0;
    case LabelRuleKind::kAllOne:
      return 1;
    case LabelRuleKind::kLinearThreshold: {
      double z = bias;
      for (std::size_t i = 0; i < x.size(); ++i) z += weights[i] * x[i];
      return z > 0.0 ? 1 : 0;
    }
  }
  return 0;
}

Dataset generate_synthetic(std::span<const GroupSpec> specs, std::uint64_t seed) {
  if (specs.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "at least one group spec is required");
  }
  const std::size_t dim = specs.front().mean.size();
  if (dim == 0) {
    throw Error(ErrorKind::kInvalidArgument, "group spec mean must be non-empty");
  }
  for (std::size_t g = 0; g < specs.size(); ++g) {
    const GroupSpec& s = specs[g];
    const std::string where = "group spec " + std::to_string(g);
    if (s.mean.size() != dim || s.scale.size() != dim) {
      throw Error(ErrorKind::kInvalidArgument, where + ": dimension mismatch");
    }
    if (s.count < 1) {
      throw Error(ErrorKind::kInvalidArgument, where + ": count must be >= 1");
    }
    for (double v : s.scale) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::kInvalidArgument, where + ": scale entries must be > 0");
      }
    }
    if (s.label_rule.kind == LabelRuleKind::kLinearThreshold &&
        s.label_rule.weights.size() != dim) {
      throw Error(ErrorKind::kInvalidArgument,
                  where + ": label rule weights dimension mismatch");
    }
  }

  std::vector<GroupInfo> groups;
  std::vector<Observation> observations;
  ObservationId next_id = 0;
  for (std::size_t g = 0; g < specs.size(); ++g) {
    const GroupSpec& s = specs[g];
    groups.push_back({static_cast<GroupId>(g), s.name});
    for (std::size_t i = 0; i < s.count; ++i) {
      Rng rng = make_rng(RngDomain::kData, {seed, g, i});
      std::normal_distribution<double> normal(0.0, 1.0);
      Observation o;
      o.id = next_id++;
      o.group = static_cast<GroupId>(g);
      o.features.resize(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        o.features[d] = s.mean[d] + s.scale[d] * normal(rng);
      }
      o.label = s.label_rule.apply(o.features);
      observations.push_back(std::move(o));
    }
  }
  return Dataset(dim, std::move(groups), std::move(observations));
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(const std::string& field, T& out) {
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

Error row_error(const std::string& what, std::size_t line) {
  return Error(ErrorKind::kParse, what + ", line " + std::to_string(line));
}

}  // namespace

std::string dataset_to_csv(const Dataset& dataset) {
  std::string out = "id,group,label";
  for (std::size_t d = 0; d < dataset.dim(); ++d) out += ",f" + std::to_string(d);
  out += '\n';
  for (const auto& o : dataset.observations()) {
    out += std::to_string(o.id);
    out += ',';
    out += std::to_string(o.group);
    out += ',';
    out += std::to_string(o.label);
    for (double v : o.features) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

Dataset dataset_from_csv(const std::string& text,
                         const std::vector<GroupInfo>* groups) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kParse, "empty dataset file, line 1");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  if (header.size() < 4 || header[0] != "id" || header[1] != "group" ||
      header[2] != "label") {
    throw row_error("invalid header", 1);
  }
  const std::size_t dim = header.size() - 3;
  for (std::size_t d = 0; d < dim; ++d) {
    if (header[3 + d] != "f" + std::to_string(d)) {
      throw row_error("invalid header column '" + header[3 + d] + "'", 1);
    }
  }

  std::set<GroupId> declared;
  if (groups != nullptr) {
    for (const auto& g : *groups) declared.insert(g.id);
  }
  std::set<GroupId> seen_groups;
  std::unordered_set<ObservationId> seen_ids;
  std::vector<Observation> observations;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw row_error("wrong column count", line_no);
    }
    Observation o;
    if (!parse_number(fields[0], o.id)) throw row_error("invalid id", line_no);
    if (!parse_number(fields[1], o.group)) throw row_error("invalid group", line_no);
    if (!parse_number(fields[2], o.label) || (o.label != 0 && o.label != 1)) {
      throw row_error("invalid label", line_no);
    }
    if (groups != nullptr && !declared.contains(o.group)) {
      throw row_error("unknown group " + fields[1], line_no);
    }
    if (!seen_ids.insert(o.id).second) throw row_error("duplicate id", line_no);
    o.features.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      if (!parse_number(fields[3 + d], o.features[d]) ||
          !std::isfinite(o.features[d])) {
        throw row_error("non-numeric feature f" + std::to_string(d), line_no);
      }
    }
    seen_groups.insert(o.group);
    observations.push_back(std::move(o));
  }

  std::vector<GroupInfo> table;
  if (groups != nullptr) {
    table = *groups;
  } else {
    for (GroupId g : seen_groups) table.push_back({g, "group " + std::to_string(g)});
  }
  return Dataset(dim, std::move(table), std::move(observations));
}

std::filesystem::path groups_sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".groups.json");
  return p;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  write_text_file(path, dataset_to_csv(dataset));
  write_json_file(groups_sidecar_path(path), groups_to_json(dataset.groups()));
}

Dataset load_dataset(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto sidecar = groups_sidecar_path(path);
  if (std::filesystem::exists(sidecar)) {
    const auto groups = groups_from_json(read_json_file(sidecar));
    return dataset_from_csv(text, &groups);
  }
  return dataset_from_csv(text, nullptr);
}

std::size_t PartitionPlan::total() const {
  std::size_t sum = 0;
  for (const auto& a : assignments) sum += a.count;
  return sum;
}

void PartitionPlan::validate() const {
  if (assignments.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "partition plan has no assignments");
  }
  for (std::size_t k = 0; k < assignments.size(); ++k) {
    const PlanEntry& a = assignments[k];
    if (a.unit != k) {
      throw Error(ErrorKind::kInvalidArgument,
                  "plan unit indices must be contiguous from 0 (entry " +
                      std::to_string(k) + " has unit " + std::to_string(a.unit) + ")");
    }
    if (a.count == 0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "plan count for unit " + std::to_string(k) + " must be positive");
    }
    if (selection == Selection::kExplicit && a.ids.size() != a.count) {
      throw Error(ErrorKind::kInvalidArgument,
                  "explicit id list for unit " + std::to_string(k) +
                      " does not match its count");
    }
  }
}

PartitionPlan make_plan(std::span<const std::size_t> counts, Selection selection) {
  PartitionPlan plan;
  plan.selection = selection;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    PlanEntry e;
    e.unit = k;
    e.count = counts[k];
    if (selection == Selection::kStratified) e.group = static_cast<GroupId>(k);
    plan.assignments.push_back(std::move(e));
  }
  return plan;
}

std::vector<ObservationId> PartitionSet::assigned_ids() const {
  std::vector<ObservationId> all;
  for (const auto& s : subsets) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end());
  return all;
}

PartitionSet partition(const Dataset& dataset, const PartitionPlan& plan,
                       std::uint64_t seed) {
  plan.validate();
  if (plan.total() > dataset.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "plan assigns " + std::to_string(plan.total()) +
                    " observations but the dataset has " +
                    std::to_string(dataset.size()));
  }

  PartitionSet out;
  out.plan = plan;
  out.seed = seed;
  out.subsets.resize(plan.assignments.size());

  switch (plan.selection) {
    case Selection::kContiguous: {
      const auto& obs = dataset.observations();
      std::size_t cursor = 0;
      for (std::size_t k = 0; k < plan.assignments.size(); ++k) {
        for (std::size_t i = 0; i < plan.assignments[k].count; ++i) {
          out.subsets[k].push_back(obs[cursor++].id);
        }
      }
      break;
    }
    case Selection::kStratified: {
      std::map<GroupId, std::vector<ObservationId>> pools;
      for (const auto& o : dataset.observations()) pools[o.group].push_back(o.id);
      for (std::size_t k = 0; k < plan.assignments.size(); ++k) {
        const PlanEntry& a = plan.assignments[k];
        const GroupId g = a.group.value_or(static_cast<GroupId>(k));
        auto& pool = pools[g];
        if (pool.size() < a.count) {
          throw Error(ErrorKind::kInvalidArgument,
                      "group " + std::to_string(g) + " has " +
                          std::to_string(pool.size()) +
                          " unassigned observations, unit " + std::to_string(k) +
                          " needs " + std::to_string(a.count));
        }
        Rng rng = make_rng(RngDomain::kPartition, {seed, k, g});
        std::shuffle(pool.begin(), pool.end(), rng);
        out.subsets[k].assign(pool.begin(), pool.begin() + a.count);
        pool.erase(pool.begin(), pool.begin() + a.count);
        // Keep the remainder in id order so later units see a canonical pool.
        std::sort(pool.begin(), pool.end());
      }
      break;
    }
    case Selection::kExplicit: {
      for (std::size_t k = 0; k < plan.assignments.size(); ++k) {
        out.subsets[k] = plan.assignments[k].ids;
      }
      break;
    }
  }
  for (auto& s : out.subsets) std::sort(s.begin(), s.end());
  check_partition(dataset, out);
  return out;
}

void check_partition(const Dataset& dataset, const PartitionSet& partitions) {
  std::unordered_set<ObservationId> seen;
  for (std::size_t k = 0; k < partitions.subsets.size(); ++k) {
    const auto& subset = partitions.subsets[k];
    if (subset.empty()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "subset " + std::to_string(k) + " is empty");
    }
    for (ObservationId id : subset) {
      if (!dataset.contains(id)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "subset " + std::to_string(k) + " references unknown id " +
                        std::to_string(id));
      }
      if (!seen.insert(id).second) {
        throw Error(ErrorKind::kInvalidArgument,
                    "observation " + std::to_string(id) +
                        " is assigned to more than one unit");
      }
    }
  }
}

TestSets make_test_sets(const Dataset& dataset, const PartitionSet& partitions,
                        double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "holdout fraction must be in (0, 1)");
  }
  check_partition(dataset, partitions);
  const auto assigned = partitions.assigned_ids();
  const std::unordered_set<ObservationId> assigned_set(assigned.begin(),
                                                       assigned.end());
  TestSets out;
  for (const auto& o : dataset.observations()) {
    if (!assigned_set.contains(o.id)) out.non_overlapping.push_back(o.id);
  }
  if (out.non_overlapping.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "no unassigned observations: the non-overlapping test pool is empty");
  }
  std::sort(out.non_overlapping.begin(), out.non_overlapping.end());

  const auto n = static_cast<std::size_t>(
      std::floor(holdout_fraction * static_cast<double>(assigned.size())));
  std::vector<ObservationId> pool = assigned;
  Rng rng = make_rng(RngDomain::kTestSplit, {seed});
  std::shuffle(pool.begin(), pool.end(), rng);
  out.overlapping.assign(pool.begin(), pool.begin() + n);
  std::sort(out.overlapping.begin(), out.overlapping.end());
  return out;
}

std::string to_string(Selection s) {
  switch (s) {
    case Selection::kContiguous:
      return "contiguous";
    case Selection::kStratified:
      return "stratified";
    case Selection::kExplicit:
      return "explicit";
  }
  return "stratified";
}

Selection selection_from_string(const std::string& s) {
  if (s == "contiguous") return Selection::kContiguous;
  if (s == "stratified") return Selection::kStratified;
  if (s == "explicit") return Selection::kExplicit;
  throw Error(ErrorKind::kParse, "unknown selection '" + s + "'");
}

std::string to_string(LabelRuleKind k) {
  switch (k) {
    case LabelRuleKind::kAllZero:
      return "all-zero";
    case LabelRuleKind::kAllOne:
      return "all-one";
    case LabelRuleKind::kLinearThreshold:
      return "linear-threshold";
  }
  return "all-zero";
}

LabelRuleKind label_rule_from_string(const std::string& s) {
  if (s == "all-zero") return LabelRuleKind::kAllZero;
  if (s == "all-one") return LabelRuleKind::kAllOne;
  if (s == "linear-threshold") return LabelRuleKind::kLinearThreshold;
  throw Error(ErrorKind::kParse, "unknown label rule '" + s + "'");
}

}  // namespace switchnet
