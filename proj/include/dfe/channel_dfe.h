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
#include <variant>
#include <vector>

#include <json.hpp>

#include "dfe/alias_table.h"
#include "dfe/clifford.h"
#include "dfe/dfe_engine.h"
#include "dfe/pauli.h"
#include "dfe/rng.h"
#include "dfe/states.h"

namespace dfe {

/// Generic (non-Clifford) channels are handled through dense d x d matrices
/// acting on Pauli inputs, never through 4^n x 4^n superoperators.
inline constexpr std::size_t kDefaultChannelDenseCap = 4;

/// Tensor product of single-qubit Pauli eigenstates. Qubit q is the
/// eigenstate of `axes.factor(q)` (never I) with eigenvalue (-1)^{bit q of minus}.
struct ProductEigenstate {
  PauliOp axes;
  std::uint64_t minus = 0;

  std::size_t num_qubits() const { return axes.num_qubits(); }
  /// Stabilizer generators +-axis_q.
  StabilizerTableau tableau() const;
  /// Dense statevector, qubit 0 least significant.
  PureState statevector() const;
};

struct EigenbasisElement {
  ProductEigenstate state;
  int eigenvalue = 1;  // lambda in {+1, -1}
};

/// The a-th eigenstate of W (a in [0, d)). Bit q of a picks the -1 eigenstate on
/// qubit q. Identity factors use the computational basis and contribute +1 to
/// lambda, so lambda = prod over the support of W of (-1)^{a_q}.
EigenbasisElement eigenbasis_product_state(const PauliOp& w, std::uint64_t a);

/// Unitary, Clifford, or Kraus core optionally followed by Pauli-diagonal noise.
class ChannelModel {
 public:
  struct DenseUnitary {
    Matrix u;
  };
  struct KrausList {
    std::vector<Matrix> ops;
  };
  using Core = std::variant<DenseUnitary, CliffordCircuit, KrausList>;

  static ChannelModel unitary(Matrix u);
  static ChannelModel clifford(CliffordCircuit circuit);
  static ChannelModel identity(std::size_t num_qubits);
  /// Throws unless sum K^dagger K = I within 1e-9.
  static ChannelModel kraus(std::vector<Matrix> ops);
  /// E(rho) = I/d for every input.
  static ChannelModel fully_depolarizing(std::size_t num_qubits);

  /// This channel followed by `noise`. Replaces any earlier noise.
  ChannelModel followed_by(PauliNoise noise) const;

  std::size_t num_qubits() const { return num_qubits_; }
  const Core& core() const { return core_; }
  const PauliNoise& noise() const { return noise_; }
  bool is_unitary() const;
  const CliffordCircuit* clifford_circuit() const { return std::get_if<CliffordCircuit>(&core_); }
  /// Dense U of a unitary core.
  Matrix unitary_matrix() const;

  /// E(A) for any d x d matrix, by linear extension.
  Matrix apply(const Matrix& a) const;

  /// Tr(W E(|phi><phi|)) for a product eigenstate input.
  double output_expectation(const ProductEigenstate& input, const PauliOp& measured) const;

  /// chi_E(k, k') = Tr(W_k E(W_k')) / d, signs of both Paulis included.
  double char_fn(const PauliOp& out, const PauliOp& in) const;

  /// Kraus operators of the whole channel, noise included; dense oracle path.
  std::vector<Matrix> to_kraus(std::size_t dense_cap = kDefaultChannelDenseCap) const;

  std::string describe() const;

 private:
  ChannelModel(std::size_t n, Core core, PauliNoise noise);

  std::size_t num_qubits_ = 0;
  Core core_;
  PauliNoise noise_;
};

/// chi_E(k, k') with Pauli indices; refuses dense kinds above `dense_cap`.
double char_fn_channel(const ChannelModel& channel, std::uint64_t k, std::uint64_t k_prime,
                       std::size_t dense_cap = kDefaultChannelDenseCap);

/// A sampled (k, k') pair: measure `out` after preparing eigenstates of `in`.
/// `chi` is the signed chi_U(k, k').
struct PairDraw {
  PauliOp out;
  PauliOp in;
  double chi = 0.0;
};

/// Pr(k, k') = chi_U(k, k')^2 / d^2 for a unitary target.
class PairSampler {
 public:
  virtual ~PairSampler() = default;
  virtual std::size_t num_qubits() const = 0;
  virtual bool is_clifford() const = 0;
  virtual PairDraw sample(Rng& rng) const = 0;
};

/// Enumerates all 16^n pairs into an alias table. Dense; n <= cap.
class ExhaustivePairSampler final : public PairSampler {
 public:
  explicit ExhaustivePairSampler(const ChannelModel& target, std::size_t dense_cap = kDefaultChannelDenseCap);

  std::size_t num_qubits() const override { return num_qubits_; }
  bool is_clifford() const override { return false; }
  PairDraw sample(Rng& rng) const override;

  /// chi_U table indexed by k * 4^n + k'.
  const std::vector<double>& chi_table() const { return chi_; }

 private:
  std::size_t num_qubits_;
  std::vector<double> chi_;
  AliasTable table_;
};

/// k' uniform over 4^n, k from conjugation; never enumerates.
class CliffordPairSampler final : public PairSampler {
 public:
  explicit CliffordPairSampler(CliffordCircuit circuit);

  std::size_t num_qubits() const override { return circuit_.num_qubits(); }
  bool is_clifford() const override { return true; }
  PairDraw sample(Rng& rng) const override;

 private:
  CliffordCircuit circuit_;
};

/// Clifford fast path for Clifford cores, dense enumeration otherwise. Throws
/// for non-unitary targets.
std::unique_ptr<PairSampler> make_pair_sampler(const ChannelModel& target,
                                               std::size_t dense_cap = kDefaultChannelDenseCap);

PairDraw sample_channel_pair(const ChannelModel& target, Rng& rng);

/// How the sign of chi_U enters for Clifford targets. `signed_chi` divides by
/// the signed chi_U = +-1. `absorbed` measures sign * W_k instead (B carries the
/// sign) and divides by |chi_U|. Both give identical estimates.
enum class SignConvention { signed_chi, absorbed };

struct ChannelSettingRecord {
  PauliOp out;
  PauliOp in;
  double chi_target = 0.0;  // chi_U(k_i, k'_i) as used in the division
  double chi_true = 0.0;    // chi_E(k_i, k'_i), exact; bookkeeping only
  std::uint64_t uses = 0;   // m_i
  long long b_sum = 0;      // sum_j B_ij
  double x_tilde = 0.0;
  double x_ideal = 0.0;
  std::vector<std::uint64_t> prepared;  // a_ij, when logging is enabled
};

struct ChannelDfeResult {
  std::size_t num_qubits = 0;
  double entanglement_fidelity = 0.0;  // F_e estimate
  double average_fidelity = 0.0;       // (d F_e + 1) / (d + 1)
  double ideal_estimate = 0.0;         // Y from the same pairs with exact chi_E
  std::uint64_t settings = 0;
  std::uint64_t total_uses = 0;
  double interval_low = 0.0;
  double interval_high = 0.0;
  double confidence = 0.0;
  double expected_uses_bound = 0.0;
  /// sum_i 4 / (l^2 chi_U^2 m_i); Hoeffding needs <= eps^2 / ln(4/delta).
  double hoeffding_constant = 0.0;
  std::uint64_t max_uses_per_setting = 0;
  bool clifford_path = false;
  SignConvention sign_convention = SignConvention::signed_chi;
  std::vector<ChannelSettingRecord> records;

  DfeConfig config;
  std::string settings_rule;
  std::string target_description;
  std::string actual_description;
};

struct ChannelDfeOptions {
  SignConvention sign_convention = SignConvention::signed_chi;
  bool log_prepared_states = false;
  std::size_t dense_cap = kDefaultChannelDenseCap;
};

/// Entanglement-fidelity protocol: l pairs from `target`, m_i uses of `actual`
/// per pair, each on a uniformly chosen eigenstate of W_k'.
///
/// Pairs come from stream (seed, kSettings); the uses of pair i from stream
/// (seed, kShots, i).
ChannelDfeResult estimate_entanglement_fidelity(const PairSampler& target, const ChannelModel& actual,
                                                const DfeConfig& config, const ChannelDfeOptions& options = {});
ChannelDfeResult estimate_entanglement_fidelity(const ChannelModel& target, const ChannelModel& actual,
                                                const DfeConfig& config, const ChannelDfeOptions& options = {});

/// (d F_e + 1) / (d + 1). Throws if F_e is outside [0, 1] by more than 1e-9.
double avg_fidelity_from_entanglement(double entanglement_fidelity, double dimension);

/// 1 + 1/(eps^2 delta) + (4 d^2 / eps^2) ln(4/delta).
double expected_channel_uses_bound(double epsilon, double delta, double dimension);
/// 1 + 4 ln(4/delta) / (alpha^2 l eps^2): certain bound on m_i when |chi_U| >= alpha on the support.
double well_conditioned_use_bound(double alpha, std::uint64_t settings, double epsilon, double delta);

/// Tr(U^dagger E) / d^2 as sum_K |Tr(U^dagger K)|^2 / d^2 over the Kraus
/// operators of `actual`. Dense oracle.
double entanglement_fidelity_kraus(const ChannelModel& target, const ChannelModel& actual,
                                   std::size_t dense_cap = kDefaultChannelDenseCap);

/// F_e without dense matrices when `target` and `actual` share a Clifford core
/// and the noise is none or global depolarizing: (1-p) + p/d^2.
double entanglement_fidelity_clifford(const ChannelModel& target, const ChannelModel& actual);

nlohmann::json to_json(const ChannelDfeResult& result);

}  // namespace dfe
