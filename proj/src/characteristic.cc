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

#include "dfe/characteristic.h"

#include <cmath>
#include <stdexcept>

namespace dfe {

namespace {

double ideal_expectation(const std::variant<PureState, StabilizerTableau>& ideal, const PauliOp& p) {
  if (const auto* psi = std::get_if<PureState>(&ideal)) {
    return pauli_expectation(std::span<const Complex>(psi->amplitudes()), p);
  }
  return std::get<StabilizerTableau>(ideal).expectation(p);
}

std::vector<double> real_parts(const std::vector<Complex>& traces, double scale) {
  std::vector<double> out(traces.size());
  for (std::size_t k = 0; k < traces.size(); ++k) out[k] = traces[k].real() * scale;
  return out;
}

std::vector<double> ideal_char_full(const std::variant<PureState, StabilizerTableau>& ideal) {
  if (const auto* psi = std::get_if<PureState>(&ideal)) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(psi->dimension()));
    return real_parts(all_pauli_traces(std::span<const Complex>(psi->amplitudes())), scale);
  }
  const auto& tab = std::get<StabilizerTableau>(ideal);
  const std::size_t n = tab.num_qubits();
  const std::uint64_t dim = std::uint64_t{1} << n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<double> out(dim * dim, 0.0);
  for (std::uint64_t subset = 0; subset < dim; ++subset) {
    PauliOp g = tab.group_element(subset);
    out[g.index()] = g.sign() * scale;
  }
  return out;
}

}  // namespace

double pauli_expectation(const StateModel& state, const PauliOp& p) {
  if (num_qubits(state) != p.num_qubits()) {
    throw std::invalid_argument("state and Pauli qubit counts differ");
  }
  if (const auto* psi = std::get_if<PureState>(&state)) {
    return pauli_expectation(std::span<const Complex>(psi->amplitudes()), p);
  }
  if (const auto* rho = std::get_if<DensityMatrix>(&state)) {
    return pauli_expectation(rho->matrix(), p);
  }
  if (const auto* tab = std::get_if<StabilizerTableau>(&state)) {
    return tab->expectation(p);
  }
  const auto& noisy = std::get<NoisyState>(state);
  return noisy.noise.attenuation(p) * ideal_expectation(noisy.ideal, p);
}

CharValue char_fn(const StateModel& state, std::uint64_t k) {
  const std::size_t n = num_qubits(state);
  const double d = std::ldexp(1.0, static_cast<int>(n));
  return {k, pauli_expectation(state, PauliOp::from_index(n, k)) / std::sqrt(d)};
}

std::vector<double> char_fn_full(const StateModel& state, std::size_t dense_cap) {
  const std::size_t n = num_qubits(state);
  if (n > dense_cap) {
    throw std::length_error("exhaustive characteristic function requested for " + std::to_string(n) +
                            " qubits; cap is " + std::to_string(dense_cap));
  }
  const double scale = 1.0 / std::sqrt(std::ldexp(1.0, static_cast<int>(n)));
  if (const auto* psi = std::get_if<PureState>(&state)) {
    return ideal_char_full(*psi);
  }
  if (const auto* rho = std::get_if<DensityMatrix>(&state)) {
    return real_parts(all_pauli_traces(rho->matrix()), scale);
  }
  if (const auto* tab = std::get_if<StabilizerTableau>(&state)) {
    return ideal_char_full(*tab);
  }
  const auto& noisy = std::get<NoisyState>(state);
  std::vector<double> out = ideal_char_full(noisy.ideal);
  for (std::uint64_t k = 0; k < out.size(); ++k) {
    if (out[k] != 0.0) out[k] *= noisy.noise.attenuation(PauliOp::from_index(n, k));
  }
  return out;
}

double char_overlap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("characteristic vectors differ in length");
  }
  double total = 0;
  for (std::size_t k = 0; k < a.size(); ++k) total += a[k] * b[k];
  return total;
}

}  // namespace dfe
