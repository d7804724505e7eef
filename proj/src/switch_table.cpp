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

#include "switchnet/switch_table.hpp"

#include <algorithm>

#include "switchnet/error.hpp"

namespace switchnet {

std::string to_string(Fallback f) {
  switch (f) {
    case Fallback::kError:
      return "error";
    case Fallback::kAllActive:
      return "all-active";
    case Fallback::kNoneActive:
      return "none-active";
  }
  return "error";
}

Fallback fallback_from_string(const std::string& s) {
  if (s == "error") return Fallback::kError;
  if (s == "all-active") return Fallback::kAllActive;
  if (s == "none-active") return Fallback::kNoneActive;
  throw Error(ErrorKind::kParse, "unknown fallback '" + s + "'");
}

std::size_t ActivationMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

SwitchBuild build_switch(std::size_t n_units,
                         std::map<GroupId, std::set<UnitIndex>> entries,
                         Fallback fallback,
                         std::span<const GroupId> expected_groups) {
  if (n_units == 0) {
    throw Error(ErrorKind::kInvalidArgument, "switch needs at least one unit");
  }
  std::vector<bool> used(n_units, false);
  for (const auto& [group, units] : entries) {
    if (units.empty()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "switch entry for group " + std::to_string(group) + " is empty");
    }
    for (UnitIndex u : units) {
      if (u >= n_units) {
        throw Error(ErrorKind::kInvalidArgument,
                    "switch entry for group " + std::to_string(group) +
                        " names unit " + std::to_string(u) + " but n_units is " +
                        std::to_string(n_units));
      }
      used[u] = true;
    }
  }

  SwitchBuild out;
  for (std::size_t u = 0; u < n_units; ++u) {
    if (!used[u]) {
      out.warnings.push_back("unit " + std::to_string(u) +
                             " is not reachable from any group");
    }
  }
  for (GroupId g : expected_groups) {
    if (!entries.contains(g)) {
      out.warnings.push_back("group " + std::to_string(g) + " has no switch entry");
    }
  }
  out.table.n_units_ = n_units;
  out.table.entries_ = std::move(entries);
  out.table.fallback_ = fallback;
  return out;
}

SwitchTable identity_switch(std::size_t n_units, Fallback fallback) {
  std::map<GroupId, std::set<UnitIndex>> entries;
  for (std::size_t k = 0; k < n_units; ++k) entries[static_cast<GroupId>(k)] = {k};
  return build_switch(n_units, std::move(entries), fallback).table;
}

ActivationMask route(const SwitchTable& table, GroupId group) {
  ActivationMask mask;
  mask.bits.assign(table.n_units(), false);
  auto it = table.entries().find(group);
  if (it != table.entries().end()) {
    for (UnitIndex u : it->second) mask.bits[u] = true;
    return mask;
  }
  switch (table.fallback()) {
    case Fallback::kError:
      throw Error(ErrorKind::kRouting,
                  "no switch entry for group " + std::to_string(group));
    case Fallback::kAllActive:
      mask.bits.assign(table.n_units(), true);
      break;
    case Fallback::kNoneActive:
      break;
  }
  return mask;
}

}  // namespace switchnet
