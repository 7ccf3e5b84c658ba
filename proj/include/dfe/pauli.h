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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace dfe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Pauli bit masks are single machine words.
inline constexpr std::size_t kMaxQubits = 64;

/// Largest qubit count whose Pauli index k in [0, 4^n) fits a uint64.
inline constexpr std::size_t kMaxIndexedQubits = 32;

/// Single-qubit Pauli factors. The numeric values are the base-4 digits used
/// by PauliOp::index().
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// An n-qubit Pauli operator in symplectic form with a real sign.
///
/// Qubit q owns bit q of `x_bits` and `z_bits` and bit q of a computational
/// basis index. The operator is the tensor product of per-qubit factors
/// W(x, z) with W(0,0) = I, W(1,0) = X, W(1,1) = Y, W(0,1) = Z, so every
/// PauliOp is Hermitian with eigenvalues +1 and -1.
///
/// index() packs the factors as base-4 digits, qubit 0 least significant,
/// with digits I=0, X=1, Y=2, Z=3. For n = 1 this orders {I, X, Y, Z}.
class PauliOp {
 public:
  PauliOp() = default;
  PauliOp(std::size_t num_qubits, std::uint64_t x_bits, std::uint64_t z_bits, bool negative = false);

  static PauliOp identity(std::size_t num_qubits);
  static PauliOp from_index(std::size_t num_qubits, std::uint64_t index);
  /// Parses strings like "XYZ_", "+XIZ", "-ZZ". Character i is qubit i.
  /// Both '_' and 'I' denote identity.
  static PauliOp from_string(std::string_view text);
  static PauliOp single(std::size_t num_qubits, std::size_t qubit, Pauli factor);

  std::size_t num_qubits() const { return num_qubits_; }
  std::uint64_t x_bits() const { return x_bits_; }
  std::uint64_t z_bits() const { return z_bits_; }
  bool negative() const { return negative_; }
  int sign() const { return negative_ ? -1 : 1; }

  std::uint64_t index() const;
  Pauli factor(std::size_t qubit) const;
  std::size_t weight() const;
  bool is_identity() const { return x_bits_ == 0 && z_bits_ == 0; }
  bool commutes_with(const PauliOp& other) const;

  PauliOp unsigned_op() const { return PauliOp(num_qubits_, x_bits_, z_bits_, false); }
  PauliOp negated() const { return PauliOp(num_qubits_, x_bits_, z_bits_, !negative_); }
  /// Same operator up to sign.
  bool same_support(const PauliOp& other) const {
    return num_qubits_ == other.num_qubits_ && x_bits_ == other.x_bits_ && z_bits_ == other.z_bits_;
  }

  std::string str() const;

  friend bool operator==(const PauliOp&, const PauliOp&) = default;

 private:
  std::size_t num_qubits_ = 0;
  std::uint64_t x_bits_ = 0;
  std::uint64_t z_bits_ = 0;
  bool negative_ = false;
};

/// A Pauli operator times i^phase.
struct PhasedPauli {
  PauliOp op;
  int phase = 0;  // exponent of i, in [0, 4)
};

/// Operator product lhs * rhs. The result carries phase 0 or 2 folded into the
/// sign when the factors commute, and phase 1 or 3 otherwise.
PhasedPauli multiply(const PauliOp& lhs, const PauliOp& rhs);

/// Product of commuting operators; throws std::invalid_argument if they anticommute.
PauliOp multiply_commuting(const PauliOp& lhs, const PauliOp& rhs);

/// Dense 2^n x 2^n matrix, sign included. Intended for oracles at small n.
Matrix dense_matrix(const PauliOp& op);

/// Phase i^{|x & z|} * (-1)^{z . b} * sign picked up by W|b> = phase * |b ^ x>.
Complex basis_action_phase(const PauliOp& op, std::uint64_t basis_index);

/// <psi|W|psi> for a normalized statevector; O(d).
double pauli_expectation(std::span<const Complex> amplitudes, const PauliOp& op);

/// Tr(rho W) for a dense density matrix; O(d).
double pauli_expectation(const Matrix& rho, const PauliOp& op);

/// Tr(A W) for an arbitrary square matrix (complex in general).
Complex pauli_trace(const Matrix& a, const PauliOp& op);

/// Tr(A W_k) for every unsigned Pauli index k, in index order. Uses one
/// Walsh-Hadamard transform per X-pattern, O(d^2 log d) in total.
std::vector<Complex> all_pauli_traces(const Matrix& a);
std::vector<Complex> all_pauli_traces(std::span<const Complex> amplitudes);

/// Index of the unsigned Pauli with the given bit masks.
std::uint64_t pauli_index(std::size_t num_qubits, std::uint64_t x_bits, std::uint64_t z_bits);

}  // namespace dfe
