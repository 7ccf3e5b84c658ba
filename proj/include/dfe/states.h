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
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dfe/clifford.h"
#include "dfe/pauli.h"

namespace dfe {

/// Exhaustive 4^n work is refused above this many qubits unless a caller
/// passes a larger cap explicitly.
inline constexpr std::size_t kDefaultDenseQubitCap = 8;

/// Normalized pure state |psi>.
class PureState {
 public:
  PureState() = default;
  /// Throws unless the length is a power of two and the norm is 1 within 1e-9.
  explicit PureState(std::vector<Complex> amplitudes);
  static PureState normalized(std::vector<Complex> amplitudes);
  static PureState basis(std::size_t num_qubits, std::uint64_t index);

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  const std::vector<Complex>& amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[i]; }

 private:
  std::size_t num_qubits_ = 0;
  std::vector<Complex> amplitudes_;
};

/// Hermitian, PSD, unit-trace d x d matrix.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Validates hermiticity, trace and (when `check_positive`) eigenvalues >= -1e-9.
  explicit DensityMatrix(Matrix matrix, bool check_positive = true);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(std::size_t num_qubits);

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }

 private:
  std::size_t num_qubits_ = 0;
  Matrix matrix_;
};

/// Stabilizer state given by n independent commuting signed generators.
///
/// Construction runs Gaussian elimination once. Membership of a Pauli in the
/// stabilizer group, sign included, then costs O(n^2) word operations.
class StabilizerTableau {
 public:
  StabilizerTableau() = default;
  /// Throws if the generators anticommute, are dependent, or include -I.
  explicit StabilizerTableau(std::vector<PauliOp> generators);
  /// |0...0> pushed through `circuit`.
  static StabilizerTableau from_circuit(const CliffordCircuit& circuit);

  std::size_t num_qubits() const { return num_qubits_; }
  const std::vector<PauliOp>& generators() const { return generators_; }

  /// Product of the generators selected by `subset` (bit i selects generator i),
  /// multiplied in increasing i, with its accumulated sign.
  PauliOp group_element(std::uint64_t subset) const;

  /// Tr(rho W): +-1 when +-W is in the group, else 0.
  double expectation(const PauliOp& p) const;

  /// Dense statevector (global phase arbitrary).
  PureState to_pure_state() const;

 private:
  struct ReducedRow {
    std::uint64_t x;
    std::uint64_t z;
    std::uint64_t combo;  // which generators were summed into this row
    int pivot;            // bit position in the 2n-bit (x | z << n) layout
  };

  std::size_t num_qubits_ = 0;
  std::vector<PauliOp> generators_;
  std::vector<ReducedRow> reduced_;
};

/// Pauli-diagonal noise: Tr(N(rho) W) = attenuation(W) * Tr(rho W) for every Pauli W.
/// N is self-adjoint, so the same factors describe the Heisenberg picture.
struct PauliNoise {
  enum class Kind {
    none,
    /// rho -> (1-p) rho + p I/d
    global_depolarizing,
    /// per qubit: rho -> (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z)
    local_depolarizing,
    /// per qubit: rho -> (1-p/2) rho + (p/2) Z rho Z
    dephasing,
  };
  Kind kind = Kind::none;
  double probability = 0.0;

  static PauliNoise none() { return {}; }
  static PauliNoise global_depolarizing(double p);
  static PauliNoise local_depolarizing(double p);
  static PauliNoise dephasing(double p);

  double attenuation(const PauliOp& w) const;
  /// Applies the map to an arbitrary d x d matrix.
  Matrix apply(const Matrix& a) const;
  std::string describe() const;
};

/// A pure or stabilizer state seen through Pauli-diagonal noise. Expectations
/// are evaluated lazily so noisy states never need a d x d matrix.
struct NoisyState {
  std::variant<PureState, StabilizerTableau> ideal;
  PauliNoise noise;
};

using StateModel = std::variant<PureState, DensityMatrix, StabilizerTableau, NoisyState>;

std::size_t num_qubits(const StateModel& state);

/// Dense d x d matrix of any state model. Refuses n above `dense_cap`.
DensityMatrix to_density_matrix(const StateModel& state, std::size_t dense_cap = kDefaultDenseQubitCap);

StabilizerTableau make_ghz(std::size_t num_qubits);
PureState make_dicke(std::size_t num_qubits, std::size_t excitations);
PureState make_w(std::size_t num_qubits);
PureState make_haar_random(std::size_t num_qubits, std::uint64_t seed,
                           std::size_t dense_cap = kDefaultDenseQubitCap);

/// Global depolarizing: (1-p) rho + p I/d.
DensityMatrix depolarize(const StateModel& state, double p);
/// Independent depolarizing of strength p on every qubit.
DensityMatrix depolarize_local(const StateModel& state, double p);
/// Independent phase flips with probability p/2 on every qubit.
DensityMatrix dephase(const StateModel& state, double p);

/// Same maps as above, lazily.
NoisyState with_noise(const PureState& state, PauliNoise noise);
NoisyState with_noise(const StabilizerTableau& state, PauliNoise noise);

/// Tr(rho sigma) through dense matrices; oracle for small n.
double dense_overlap(const StateModel& a, const StateModel& b, std::size_t dense_cap = kDefaultDenseQubitCap);

/// {"n": n, "amplitudes": [[re, im], ...]}
nlohmann::json to_json(const PureState& psi);
PureState pure_state_from_json(const nlohmann::json& j);

}  // namespace dfe
