// Copyright 2026 The DFE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace dfe {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of an independent child stream addressed by (master, label, index).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t label, std::uint64_t index = 0) {
  return mix64(mix64(mix64(master) ^ label) ^ index);
}

inline Rng derive_rng(std::uint64_t master, std::uint64_t label, std::uint64_t index = 0) {
  return Rng(derive_seed(master, label, index));
}

/// Stream labels.
namespace stream {
inline constexpr std::uint64_t kSettings = 0x5e771e5;
inline constexpr std::uint64_t kShots = 0x5407;
inline constexpr std::uint64_t kTrials = 0x7e1a15;
inline constexpr std::uint64_t kStates = 0x57a7e;
}  // namespace stream

}  // namespace dfe
