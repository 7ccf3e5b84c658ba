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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfe/importance_sampler.h"
#include "dfe/pauli.h"
#include "dfe/states.h"

namespace dfe {

/// How the number of measurement settings l is chosen.
enum class Regime {
  /// l = ceil(1 / (eps^2 delta)), Chebyshev.
  generic,
  /// l = ceil(2 ln(2/delta) / (alpha^2 eps^2)), Hoeffding on |X| <= 1/alpha.
  well_conditioned,
  /// l = ceil(2 ln(2/delta) / eps^2), Hoeffding on |X| <= 1.
  shrinking_noise,
  /// l = ceil(ln(1/delta) / eps^2), the constant used for the ion-trap comparison.
  shrinking_noise_numerics,
  /// Generic l against the truncated surrogate target.
  truncated,
};

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);

struct DfeConfig {
  double epsilon = 0.05;
  double delta = 0.05;
  Regime regime = Regime::generic;
  double alpha = 1.0;  // well_conditioned
  double beta = 0.1;   // truncated
  std::uint64_t seed = 0;
  /// Replaces the regime's l when set.
  std::optional<std::uint64_t> settings_override;
  /// Refuse runs whose sum of m_i would exceed this.
  std::uint64_t max_total_copies = 10'000'000'000ULL;
  /// Keep per-setting records in the result.
  bool record_settings = true;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// l for the configured regime.
std::uint64_t settings_count(const DfeConfig& config);
/// Human-readable formula used by settings_count.
std::string settings_rule(const DfeConfig& config);

struct SettingRecord {
  PauliOp pauli;
  double chi_target = 0.0;  // chi_rho(k_i)
  double chi_true = 0.0;    // chi_sigma(k_i), exact; simulation bookkeeping only
  std::uint64_t copies = 0;  // m_i
  long long outcome_sum = 0;  // sum_j A_ij
  double x_tilde = 0.0;       // sum_j A_ij / (m_i sqrt(d) chi_rho(k_i))
  double x_ideal = 0.0;       // chi_sigma(k_i) / chi_rho(k_i)
};

struct DfeResult {
  std::size_t num_qubits = 0;
  double y_tilde = 0.0;  // fidelity estimate
  double y_ideal = 0.0;  // same k_i with exact chi_sigma
  std::uint64_t settings = 0;
  std::uint64_t total_copies = 0;
  double interval_low = 0.0;   // y_tilde - 2 eps
  double interval_high = 0.0;  // y_tilde + 2 eps
  double confidence = 0.0;     // 1 - 2 delta
  double expected_copies_bound = 0.0;
  /// sum_i 4 / (l^2 m_i d chi_rho(k_i)^2); Hoeffding needs <= 2 eps^2 / ln(2/delta).
  double hoeffding_constant = 0.0;
  std::uint64_t max_copies_per_setting = 0;
  std::vector<SettingRecord> records;

  DfeConfig config;
  std::string settings_rule;
  std::string sampler_mode;
  std::string noise_model;
};

/// X = chi_sigma(k) / chi_rho(k). Exact; needs sigma in hand.
double ideal_estimator_X(const PauliOp& w, const ImportanceSampler& target, const StateModel& true_state);

/// Runs the full state protocol: l importance-sampled settings, m_i simulated
/// shots on each, and the estimates Y~ and Y.
///
/// Settings come from stream (seed, kSettings); shots of setting i from stream
/// (seed, kShots, i), so the output is independent of evaluation order.
DfeResult estimate_fidelity(const ImportanceSampler& target, const StateModel& true_state, const DfeConfig& config,
                            const std::string& noise_model = "");

/// 1 + 1/(eps^2 delta) + (2d/eps^2) ln(2/delta).
double expected_copies_bound(double epsilon, double delta, double dimension);
/// l + (2d/eps^2) ln(2/delta), the same bound for an arbitrary l.
double expected_copies_bound_for_settings(std::uint64_t settings, double epsilon, double delta, double dimension);
/// 1 + 2 ln(2/delta) / (alpha^2 l eps^2): certain bound on m_i for an alpha-conditioned target.
double well_conditioned_copy_bound(double alpha, std::uint64_t settings, double epsilon, double delta);
/// 1 + 2 d ln(2/delta) / (beta^2 l eps^2): certain bound on m_i for a truncated target.
double truncated_copy_bound(double beta, double dimension, std::uint64_t settings, double epsilon, double delta);

/// Minimum nonzero |Tr(rho W)| over Paulis. Stabilizer tableaus give 1 without
/// enumeration; other inputs must be pure and within `dense_cap`.
double alpha_of(const StateModel& target, std::size_t dense_cap = kDefaultDenseQubitCap);
/// Closed form for the W state: 1/n for odd n, 2/n for even n.
double alpha_of_w_state(std::size_t num_qubits);

/// Exact first and second moments of X by enumeration of chi tables.
struct EstimatorMoments {
  double mean = 0.0;         // E[X]
  double second_moment = 0.0;  // E[X^2]
  double variance() const { return second_moment - mean * mean; }
};
EstimatorMoments exact_estimator_moments(const std::vector<double>& chi_target, const std::vector<double>& chi_true);

nlohmann::json to_json(const DfeConfig& config);
nlohmann::json to_json(const DfeResult& result);

}  // namespace dfe
