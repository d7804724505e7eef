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

#ifndef SWITCHNET_RNG_HPP_
#define SWITCHNET_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace switchnet {

using Rng = std::mt19937_64;

// Stream domains. Every random draw in the library comes from a generator
// keyed by (domain, seed, ...) so that no two stages share a stream.
enum class RngDomain : std::uint32_t {
  kData = 1,
  kPartition = 2,
  kInit = 3,
  kShuffle = 4,
  kTestSplit = 5,
  kNodeSeed = 6,
  kReadout = 7,
};

/// Generator seeded from a domain tag and a tuple of 64-bit keys.
inline Rng make_rng(RngDomain domain, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(1 + 2 * keys.size());
  words.push_back(static_cast<std::uint32_t>(domain));
  for (std::uint64_t k : keys) {
    words.push_back(static_cast<std::uint32_t>(k & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

/// Seed for node `node_id`'s local training run. Never depends on scheduling.
inline std::uint64_t derive_node_seed(std::uint64_t seed, std::uint64_t node_id) {
  Rng rng = make_rng(RngDomain::kNodeSeed, {seed, node_id});
  return rng();
}

}  // namespace switchnet

#endif  // SWITCHNET_RNG_HPP_
