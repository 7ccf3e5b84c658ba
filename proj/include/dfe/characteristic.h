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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dfe/pauli.h"
#include "dfe/states.h"

namespace dfe {

/// chi values below this magnitude are treated as exact zeros by samplers.
inline constexpr double kChiZeroTolerance = 1e-12;

struct CharValue {
  std::uint64_t k = 0;
  double chi = 0.0;
};

/// Tr(sigma W), sign of W included.
///
/// Cost: O(d) for statevectors and density matrices, O(n^2) for stabilizer
/// tableaus, and the same for noisy variants of those.
double pauli_expectation(const StateModel& state, const PauliOp& p);

/// chi(k) = Tr(rho W_k) / sqrt(d) for the unsigned Pauli with index k.
CharValue char_fn(const StateModel& state, std::uint64_t k);

/// chi(k) for every k in [0, 4^n), indexed by k. Refuses n above `dense_cap`.
std::vector<double> char_fn_full(const StateModel& state, std::size_t dense_cap = kDefaultDenseQubitCap);

/// sum_k a[k] * b[k]
double char_overlap(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace dfe
