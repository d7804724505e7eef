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

// Shared fixtures for the test binaries.

#ifndef SWITCHNET_TESTS_SUPPORT_HPP_
#define SWITCHNET_TESTS_SUPPORT_HPP_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "switchnet/pipeline.hpp"

namespace switchnet::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("switchnet_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<GroupSpec> default_specs() {
  return group_specs_from_json(default_config_json()["data"]["groups"]);
}

// Default 100 training observations plus the evaluation pool.
inline Dataset default_dataset(std::uint64_t seed = 42) {
  return generate_synthetic(with_eval_pool(default_specs(), 5), seed);
}

inline PartitionSet default_partition(const Dataset& ds, std::uint64_t seed = 42) {
  const std::vector<std::size_t> counts{20, 30, 10, 20, 20};
  return partition(ds, make_plan(counts, Selection::kStratified), seed);
}

inline NeuronUnit make_unit(std::vector<double> w, double b,
                            Activation act = Activation::kSigmoid, UnitIndex k = 0) {
  NeuronUnit u;
  u.weights = std::move(w);
  u.bias = b;
  u.activation = act;
  u.unit_index = k;
  return u;
}

inline std::vector<NeuronUnit> zero_units(std::size_t n, std::size_t dim) {
  std::vector<NeuronUnit> units;
  for (std::size_t k = 0; k < n; ++k) {
    units.push_back(make_unit(std::vector<double>(dim, 0.0), 0.0, Activation::kSigmoid, k));
  }
  return units;
}

}  // namespace switchnet::testing

#endif  // SWITCHNET_TESTS_SUPPORT_HPP_
