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
#include <vector>

#include "dfe/pauli.h"
#include "dfe/rng.h"
#include "dfe/states.h"

namespace dfe {

/// Outcomes A_ij of one measurement setting.
struct ShotRecord {
  std::uint64_t setting = 0;
  PauliOp pauli;
  std::vector<int> outcomes;  // each +1 or -1

  long long sum() const;
};

/// One projective measurement of W on a fresh copy: +1 with probability
/// (1 + Tr(sigma W)) / 2.
int simulate_shot(const StateModel& true_state, const PauliOp& w, Rng& rng);

/// Outcome for a known expectation value, clamped to [-1, 1].
int shot_from_expectation(double expectation, Rng& rng);

/// m independent shots, outcomes kept.
ShotRecord simulate_shots(const StateModel& true_state, const PauliOp& w, std::uint64_t copies, Rng& rng,
                          std::uint64_t setting = 0);

/// Sum of m independent +-1 outcomes with mean `expectation`, drawn as one
/// binomial variate. Same law as adding simulate_shot results.
long long sum_of_shots(double expectation, std::uint64_t copies, Rng& rng);

/// ceil(x) that ignores floating-point excess below 1e-9 relative.
std::uint64_t ceil_count(double x);

/// m_i = ceil(2 ln(2/delta) / (d chi^2 l eps^2)). Throws on chi == 0.
std::uint64_t copies_for_state_setting(double chi, double dimension, std::uint64_t settings, double epsilon,
                                       double delta);

/// m_i = ceil(4 ln(4/delta) / (chi^2 l eps^2)). Throws on chi == 0.
std::uint64_t copies_for_channel_setting(double chi, std::uint64_t settings, double epsilon, double delta);

}  // namespace dfe
