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

// Group-keyed switch: maps an input's group to the set of units that are
// allowed to activate for it.

#ifndef SWITCHNET_SWITCH_TABLE_HPP_
#define SWITCHNET_SWITCH_TABLE_HPP_

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "switchnet/data.hpp"

namespace switchnet {

enum class Fallback { kError, kAllActive, kNoneActive };

std::string to_string(Fallback f);
Fallback fallback_from_string(const std::string& s);

struct ActivationMask {
  std::vector<bool> bits;

  std::size_t size() const noexcept { return bits.size(); }
  std::size_t count() const;
  bool operator[](std::size_t u) const { return bits[u]; }

  friend bool operator==(const ActivationMask&, const ActivationMask&) = default;
};

struct SwitchBuild;

/// Validates and freezes a switch. `expected_groups`, when non-empty, is
/// checked for coverage (missing groups are warnings, not errors).
SwitchBuild build_switch(std::size_t n_units,
                         std::map<GroupId, std::set<UnitIndex>> entries,
                         Fallback fallback = Fallback::kError,
                         std::span<const GroupId> expected_groups = {});

class SwitchTable {
 public:
  SwitchTable() = default;

  std::size_t n_units() const noexcept { return n_units_; }
  Fallback fallback() const noexcept { return fallback_; }
  const std::map<GroupId, std::set<UnitIndex>>& entries() const noexcept {
    return entries_;
  }

  friend bool operator==(const SwitchTable&, const SwitchTable&) = default;

 private:
  friend SwitchBuild build_switch(std::size_t,
                                  std::map<GroupId, std::set<UnitIndex>>,
                                  Fallback, std::span<const GroupId>);
  std::size_t n_units_ = 0;
  std::map<GroupId, std::set<UnitIndex>> entries_;
  Fallback fallback_ = Fallback::kError;
};

struct SwitchBuild {
  SwitchTable table;
  std::vector<std::string> warnings;  // dead units, missing expected groups
};

/// Group k -> {k} for k < n_units.
SwitchTable identity_switch(std::size_t n_units,
                            Fallback fallback = Fallback::kError);

/// Throws Error(kRouting) for an unknown group under Fallback::kError.
ActivationMask route(const SwitchTable& table, GroupId group);

}  // namespace switchnet

#endif  // SWITCHNET_SWITCH_TABLE_HPP_
