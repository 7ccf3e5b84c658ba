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

#include "dfe/dfe_engine.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dfe/characteristic.h"
#include "dfe/measurement.h"
#include "dfe/rng.h"

namespace dfe {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::generic:
      return "generic";
    case Regime::well_conditioned:
      return "well_conditioned";
    case Regime::shrinking_noise:
      return "shrinking_noise";
    case Regime::shrinking_noise_numerics:
      return "shrinking_noise_numerics";
    case Regime::truncated:
      return "truncated";
  }
  return "unknown";
}

Regime regime_from_string(const std::string& name) {
  for (Regime r : {Regime::generic, Regime::well_conditioned, Regime::shrinking_noise,
                   Regime::shrinking_noise_numerics, Regime::truncated}) {
    if (to_string(r) == name) return r;
  }
  throw std::invalid_argument("unknown regime '" + name + "'");
}

void DfeConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (regime == Regime::well_conditioned && !(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1]");
  }
  if (regime == Regime::truncated && !(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("beta must lie in (0, 1)");
  }
  if (settings_override && *settings_override == 0) {
    throw std::invalid_argument("settings override must be positive");
  }
}

std::uint64_t settings_count(const DfeConfig& config) {
  config.validate();
  if (config.settings_override) return *config.settings_override;
  const double eps2 = config.epsilon * config.epsilon;
  switch (config.regime) {
    case Regime::generic:
    case Regime::truncated:
      return ceil_count(1.0 / (eps2 * config.delta));
    case Regime::well_conditioned:
      return ceil_count(2.0 * std::log(2.0 / config.delta) / (config.alpha * config.alpha * eps2));
    case Regime::shrinking_noise:
      return ceil_count(2.0 * std::log(2.0 / config.delta) / eps2);
    case Regime::shrinking_noise_numerics:
      return ceil_count(std::log(1.0 / config.delta) / eps2);
  }
  throw std::logic_error("unhandled regime");
}

std::string settings_rule(const DfeConfig& config) {
  if (config.settings_override) return "fixed l = " + std::to_string(*config.settings_override);
  switch (config.regime) {
    case Regime::generic:
    case Regime::truncated:
      return "ceil(1 / (eps^2 delta))";
    case Regime::well_conditioned:
      return "ceil(2 ln(2/delta) / (alpha^2 eps^2))";
    case Regime::shrinking_noise:
      return "ceil(2 ln(2/delta) / eps^2)";
    case Regime::shrinking_noise_numerics:
      return "ceil(ln(1/delta) / eps^2)";
  }
  return "";
}

double ideal_estimator_X(const PauliOp& w, const ImportanceSampler& target, const StateModel& true_state) {
  const double chi_rho = target.chi(w);
  if (chi_rho == 0.0) {
    throw std::invalid_argument("estimator X undefined where chi_rho(k) = 0");
  }
  const double sqrt_d = std::sqrt(std::ldexp(1.0, static_cast<int>(w.num_qubits())));
  return pauli_expectation(true_state, w.unsigned_op()) / sqrt_d / chi_rho;
}

DfeResult estimate_fidelity(const ImportanceSampler& target, const StateModel& true_state, const DfeConfig& config,
                            const std::string& noise_model) {
  config.validate();
  const std::size_t n = target.num_qubits();
  if (num_qubits(true_state) != n) {
    throw std::invalid_argument("target and true state qubit counts differ");
  }
  const double d = std::ldexp(1.0, static_cast<int>(n));
  const double sqrt_d = std::sqrt(d);
  const std::uint64_t l = settings_count(config);

  DfeResult result;
  result.num_qubits = n;
  result.settings = l;
  result.config = config;
  result.settings_rule = settings_rule(config);
  result.sampler_mode = to_string(target.mode());
  result.noise_model = noise_model;
  if (result.noise_model.empty()) {
    if (const auto* noisy = std::get_if<NoisyState>(&true_state)) result.noise_model = noisy->noise.describe();
  }

  // Settings first, so the copy budget is known before any shots are simulated.
  std::vector<SettingRecord> records(l);
  Rng settings_rng = derive_rng(config.seed, stream::kSettings);
  std::uint64_t total = 0;
  for (SettingRecord& r : records) {
    PauliDraw draw = target.sample(settings_rng);
    r.pauli = draw.pauli;
    r.chi_target = draw.chi;
    r.copies = copies_for_state_setting(draw.chi, d, l, config.epsilon, config.delta);
    if (r.copies > config.max_total_copies - std::min(total, config.max_total_copies)) {
      throw std::length_error("copy budget exceeded: raise max_total_copies or truncate the target");
    }
    total += r.copies;
  }

  double sum_tilde = 0.0;
  double sum_ideal = 0.0;
  double hoeffding = 0.0;
  const double l2 = static_cast<double>(l) * static_cast<double>(l);
  for (std::uint64_t i = 0; i < l; ++i) {
    SettingRecord& r = records[i];
    const double expectation = pauli_expectation(true_state, r.pauli);
    Rng shot_rng = derive_rng(config.seed, stream::kShots, i);
    r.outcome_sum = sum_of_shots(expectation, r.copies, shot_rng);
    r.chi_true = expectation / sqrt_d;
    r.x_tilde = static_cast<double>(r.outcome_sum) / (static_cast<double>(r.copies) * sqrt_d * r.chi_target);
    r.x_ideal = r.chi_true / r.chi_target;
    sum_tilde += r.x_tilde;
    sum_ideal += r.x_ideal;
    hoeffding += 4.0 / (l2 * static_cast<double>(r.copies) * d * r.chi_target * r.chi_target);
    result.max_copies_per_setting = std::max(result.max_copies_per_setting, r.copies);
  }

  result.total_copies = total;
  result.y_tilde = sum_tilde / static_cast<double>(l);
  result.y_ideal = sum_ideal / static_cast<double>(l);
  result.interval_low = result.y_tilde - 2.0 * config.epsilon;
  result.interval_high = result.y_tilde + 2.0 * config.epsilon;
  result.confidence = 1.0 - 2.0 * config.delta;
  result.expected_copies_bound = expected_copies_bound_for_settings(l, config.epsilon, config.delta, d);
  result.hoeffding_constant = hoeffding;
  if (config.record_settings) result.records = std::move(records);
  return result;
}

double expected_copies_bound(double epsilon, double delta, double dimension) {
  const double eps2 = epsilon * epsilon;
  return 1.0 + 1.0 / (eps2 * delta) + (2.0 * dimension / eps2) * std::log(2.0 / delta);
}

double expected_copies_bound_for_settings(std::uint64_t settings, double epsilon, double delta, double dimension) {
  const double eps2 = epsilon * epsilon;
  return static_cast<double>(settings) + (2.0 * dimension / eps2) * std::log(2.0 / delta);
}

double well_conditioned_copy_bound(double alpha, std::uint64_t settings, double epsilon, double delta) {
  return 1.0 + 2.0 * std::log(2.0 / delta) / (alpha * alpha * static_cast<double>(settings) * epsilon * epsilon);
}

double truncated_copy_bound(double beta, double dimension, std::uint64_t settings, double epsilon, double delta) {
  return 1.0 + 2.0 * dimension * std::log(2.0 / delta) /
                   (beta * beta * static_cast<double>(settings) * epsilon * epsilon);
}

double alpha_of(const StateModel& target, std::size_t dense_cap) {
  if (std::holds_alternative<StabilizerTableau>(target)) return 1.0;
  if (const auto* noisy = std::get_if<NoisyState>(&target)) {
    if (noisy->noise.kind != PauliNoise::Kind::none && noisy->noise.probability > 0.0) {
      throw std::invalid_argument("alpha is defined for pure targets only");
    }
    return std::visit([&](const auto& ideal) { return alpha_of(StateModel(ideal), dense_cap); }, noisy->ideal);
  }
  const std::vector<double> chi = char_fn_full(target, dense_cap);
  double purity = 0.0;
  for (double c : chi) purity += c * c;
  if (std::abs(purity - 1.0) > 1e-9) {
    throw std::invalid_argument("alpha is defined for pure targets only");
  }
  const double sqrt_d = std::sqrt(std::ldexp(1.0, static_cast<int>(num_qubits(target))));
  double alpha = std::numeric_limits<double>::infinity();
  for (double c : chi) {
    if (std::abs(c) >= kChiZeroTolerance) alpha = std::min(alpha, std::abs(c) * sqrt_d);
  }
  return alpha;
}

double alpha_of_w_state(std::size_t num_qubits) {
  if (num_qubits < 2) throw std::invalid_argument("W state needs n >= 2");
  const double n = static_cast<double>(num_qubits);
  return (num_qubits % 2 == 1 ? 1.0 : 2.0) / n;
}

EstimatorMoments exact_estimator_moments(const std::vector<double>& chi_target, const std::vector<double>& chi_true) {
  if (chi_target.size() != chi_true.size()) {
    throw std::invalid_argument("characteristic tables differ in length");
  }
  EstimatorMoments m;
  for (std::size_t k = 0; k < chi_target.size(); ++k) {
    const double c = chi_target[k];
    if (std::abs(c) < kChiZeroTolerance) continue;
    const double x = chi_true[k] / c;
    m.mean += c * c * x;
    m.second_moment += c * c * x * x;
  }
  return m;
}

nlohmann::json to_json(const DfeConfig& config) {
  nlohmann::json j = {
      {"epsilon", config.epsilon},
      {"delta", config.delta},
      {"regime", to_string(config.regime)},
      {"seed", config.seed},
      {"settings_rule", settings_rule(config)},
      {"copies_rule", "m_i = ceil(2 ln(2/delta) / (d chi^2 l eps^2))"},
      {"log", "natural"},
      {"max_total_copies", config.max_total_copies},
  };
  if (config.regime == Regime::well_conditioned) j["alpha"] = config.alpha;
  if (config.regime == Regime::truncated) j["beta"] = config.beta;
  if (config.settings_override) j["settings_override"] = *config.settings_override;
  return j;
}

nlohmann::json to_json(const DfeResult& result) {
  nlohmann::json j = {
      {"num_qubits", result.num_qubits},
      {"fidelity_estimate", result.y_tilde},
      {"ideal_estimate", result.y_ideal},
      {"settings", result.settings},
      {"total_copies", result.total_copies},
      {"interval", {result.interval_low, result.interval_high}},
      {"confidence", result.confidence},
      {"expected_copies_bound", result.expected_copies_bound},
      {"hoeffding_constant", result.hoeffding_constant},
      {"max_copies_per_setting", result.max_copies_per_setting},
      {"sampler", result.sampler_mode},
      {"noise_model", result.noise_model},
      {"config", to_json(result.config)},
  };
  nlohmann::json records = nlohmann::json::array();
  for (const SettingRecord& r : result.records) {
    nlohmann::json rec = {
        {"pauli", r.pauli.str()},       {"chi_target", r.chi_target}, {"chi_true", r.chi_true},
        {"copies", r.copies},           {"outcome_sum", r.outcome_sum}, {"x_tilde", r.x_tilde},
        {"x_ideal", r.x_ideal},
    };
    if (r.pauli.num_qubits() <= kMaxIndexedQubits) rec["k"] = r.pauli.index();
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  return j;
}

}  // namespace dfe
