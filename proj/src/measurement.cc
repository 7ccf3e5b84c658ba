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

#include "dfe/measurement.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dfe/characteristic.h"

namespace dfe {

namespace {

void check_schedule_args(double chi, std::uint64_t settings, double epsilon, double delta) {
  if (chi == 0.0 || !std::isfinite(chi)) {
    throw std::invalid_argument("copy schedule requested for a zero characteristic value");
  }
  if (settings == 0) {
    throw std::invalid_argument("settings count must be positive");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("epsilon and delta must lie in (0, 1)");
  }
}

}  // namespace

long long ShotRecord::sum() const {
  long long total = 0;
  for (int a : outcomes) total += a;
  return total;
}

int shot_from_expectation(double expectation, Rng& rng) {
  const double p_plus = std::clamp((1.0 + expectation) / 2.0, 0.0, 1.0);
  std::bernoulli_distribution plus(p_plus);
  return plus(rng) ? 1 : -1;
}

int simulate_shot(const StateModel& true_state, const PauliOp& w, Rng& rng) {
  return shot_from_expectation(pauli_expectation(true_state, w), rng);
}

ShotRecord simulate_shots(const StateModel& true_state, const PauliOp& w, std::uint64_t copies, Rng& rng,
                          std::uint64_t setting) {
  const double e = pauli_expectation(true_state, w);
  ShotRecord record{setting, w, {}};
  record.outcomes.reserve(copies);
  for (std::uint64_t j = 0; j < copies; ++j) record.outcomes.push_back(shot_from_expectation(e, rng));
  return record;
}

long long sum_of_shots(double expectation, std::uint64_t copies, Rng& rng) {
  if (copies == 0) return 0;
  if (copies > static_cast<std::uint64_t>(std::numeric_limits<long long>::max() / 2)) {
    throw std::overflow_error("too many shots");
  }
  const double p_plus = std::clamp((1.0 + expectation) / 2.0, 0.0, 1.0);
  std::binomial_distribution<long long> plus(static_cast<long long>(copies), p_plus);
  const long long k = plus(rng);
  return 2 * k - static_cast<long long>(copies);
}

std::uint64_t ceil_count(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("count formula produced a non-finite or negative value");
  }
  const double c = std::ceil(x * (1.0 - 1e-9));
  if (c >= 1.8e19) {
    throw std::overflow_error("count formula exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(c);
}

std::uint64_t copies_for_state_setting(double chi, double dimension, std::uint64_t settings, double epsilon,
                                       double delta) {
  check_schedule_args(chi, settings, epsilon, delta);
  const double value = 2.0 * std::log(2.0 / delta) /
                       (dimension * chi * chi * static_cast<double>(settings) * epsilon * epsilon);
  return std::max<std::uint64_t>(1, ceil_count(value));
}

std::uint64_t copies_for_channel_setting(double chi, std::uint64_t settings, double epsilon, double delta) {
  check_schedule_args(chi, settings, epsilon, delta);
  const double value =
      4.0 * std::log(4.0 / delta) / (chi * chi * static_cast<double>(settings) * epsilon * epsilon);
  return std::max<std::uint64_t>(1, ceil_count(value));
}

}  // namespace dfe
