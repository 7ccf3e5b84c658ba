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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "dfe/alias_table.h"
#include "dfe/characteristic.h"
#include "dfe/pauli.h"
#include "dfe/rng.h"
#include "dfe/states.h"

namespace dfe {

enum class SamplerMode { exhaustive, stabilizer, w_state, truncated };

std::string to_string(SamplerMode mode);

/// One importance-sampled setting: an unsigned Pauli W_k together with the
/// target's chi(k), which is never zero.
struct PauliDraw {
  PauliOp pauli;
  double chi = 0.0;
};

/// Distribution Pr(k) = chi_rho(k)^2 over Pauli indices of a pure target.
///
/// Implementations are immutable after construction; draws take a caller
/// supplied RNG stream so concurrent callers use independent streams.
class ImportanceSampler {
 public:
  virtual ~ImportanceSampler() = default;

  virtual std::size_t num_qubits() const = 0;
  virtual SamplerMode mode() const = 0;
  virtual PauliDraw sample(Rng& rng) const = 0;
  /// Target chi at an unsigned Pauli (0 off the support).
  virtual double chi(const PauliOp& p) const = 0;
  /// Pr(p) = chi(p)^2.
  double probability(const PauliOp& p) const {
    double c = chi(p);
    return c * c;
  }
};

/// Alias-table sampler over all 4^n indices of an explicit chi table. Entries
/// with |chi| < kChiZeroTolerance get probability zero.
class ExhaustiveSampler final : public ImportanceSampler {
 public:
  ExhaustiveSampler(std::size_t num_qubits, std::vector<double> chi, SamplerMode mode = SamplerMode::exhaustive);

  std::size_t num_qubits() const override { return num_qubits_; }
  SamplerMode mode() const override { return mode_; }
  PauliDraw sample(Rng& rng) const override;
  double chi(const PauliOp& p) const override;

  const std::vector<double>& chi_table() const { return chi_; }
  /// Probability the alias table realizes for index k.
  double table_probability(std::uint64_t k) const { return table_.probability(static_cast<std::size_t>(k)); }

 private:
  std::size_t num_qubits_;
  SamplerMode mode_;
  std::vector<double> chi_;
  AliasTable table_;
};

/// Uniform over the 2^n signed elements of a stabilizer group; never enumerates.
class StabilizerSampler final : public ImportanceSampler {
 public:
  explicit StabilizerSampler(StabilizerTableau tableau);

  std::size_t num_qubits() const override { return tableau_.num_qubits(); }
  SamplerMode mode() const override { return SamplerMode::stabilizer; }
  PauliDraw sample(Rng& rng) const override;
  double chi(const PauliOp& p) const override;

  const StabilizerTableau& tableau() const { return tableau_; }

 private:
  StabilizerTableau tableau_;
  double inv_sqrt_d_;
};

/// Closed-form sampler for the n-qubit W state, O(n) per draw.
class WStateSampler final : public ImportanceSampler {
 public:
  explicit WStateSampler(std::size_t num_qubits);

  std::size_t num_qubits() const override { return num_qubits_; }
  SamplerMode mode() const override { return SamplerMode::w_state; }
  PauliDraw sample(Rng& rng) const override;
  double chi(const PauliOp& p) const override;

 private:
  std::size_t num_qubits_;
  AliasTable weight_table_;  // q(w), w = 0..n
};

/// Exhaustive sampler for a pure state. Throws std::length_error above `dense_cap`.
ExhaustiveSampler build_exhaustive(const PureState& state, std::size_t dense_cap = kDefaultDenseQubitCap);

/// One uniformly random element of the stabilizer group, sign included. O(n^2).
PauliOp sample_stabilizer(const StabilizerTableau& tableau, Rng& rng);

using Rational = boost::rational<std::int64_t>;

/// Largest n for which W-state probabilities are produced as exact rationals.
inline constexpr std::size_t kMaxRationalWQubits = 20;

/// p(j, k) = Pr(sigma_x^j sigma_z^k) for the n-qubit W state:
/// (n - 2|k|)^2 / (n^2 d) if j = 0; 4 / (n^2 d) if |j| = 2 and j.k even; else 0.
Rational w_state_prob(std::size_t num_qubits, std::uint64_t j_bits, std::uint64_t k_bits);
double w_state_prob_real(std::size_t num_qubits, std::uint64_t j_bits, std::uint64_t k_bits);

/// q(w) = C(n, w) (n - 2w)^2 / (n d), the weight law of k in the j = 0 branch.
std::vector<Rational> w_weight_distribution(std::size_t num_qubits);
std::vector<double> w_weight_distribution_real(std::size_t num_qubits);

/// Draws (j, k) exactly from w_state_prob. With probability 1/n takes the j = 0
/// branch: weight w ~ q(w), then a uniform weight-w k. Otherwise j is a uniform
/// weight-2 string and k has n-1 fair random bits: the first is copied onto
/// both sites of j and the rest fill the other sites lowest index first.
std::pair<std::uint64_t, std::uint64_t> sample_w_state(std::size_t num_qubits, Rng& rng);

/// Target with small chi values cut away.
struct TruncatedTarget {
  std::size_t num_qubits = 0;
  double beta = 0.0;
  std::vector<double> chi_source;     // chi_rho
  std::vector<double> chi_truncated;  // chi_rho1: entries with |chi| < beta/d zeroed
  double truncated_norm = 0.0;        // ||rho1||_2
  std::vector<double> chi_surrogate;  // chi_rho2 = chi_rho1 / ||rho1||_2
  double bias_bound = 0.0;            // ||rho2 - rho||_2, computed explicitly
  double bias_cap = 0.0;              // 2 beta
  std::size_t retained = 0;
};

/// Keeps k with |chi_rho(k)| >= beta/d and renormalizes. Throws if beta is
/// outside (0, 1) or nothing survives.
TruncatedTarget truncate(const PureState& state, double beta, std::size_t dense_cap = kDefaultDenseQubitCap);

/// Samples Pr(k) = chi_rho2(k)^2.
ExhaustiveSampler build_truncated(const TruncatedTarget& target);

}  // namespace dfe
