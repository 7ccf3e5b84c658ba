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
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "dfe/pauli.h"

namespace dfe {

enum class GateKind : std::uint8_t { H, S, CNOT };

struct Gate {
  GateKind kind;
  std::size_t target;
  std::size_t control = 0;  // CNOT only

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// A circuit over {H, S, CNOT}. Conjugation U W U^dagger is tracked exactly,
/// sign included, in O(gates) word operations.
class CliffordCircuit {
 public:
  explicit CliffordCircuit(std::size_t num_qubits = 0);

  std::size_t num_qubits() const { return num_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }

  CliffordCircuit& h(std::size_t q);
  CliffordCircuit& s(std::size_t q);
  CliffordCircuit& cnot(std::size_t control, std::size_t target);

  /// U p U^dagger where U applies the gates in list order.
  PauliOp propagate(const PauliOp& p) const;

  /// Dense unitary; qubit q is bit q of the basis index.
  Matrix to_unitary() const;

  /// Line format: one gate per line, `H q`, `S q`, `CNOT c t`. Blank lines and
  /// lines starting with '#' are skipped.
  static CliffordCircuit parse(std::istream& in, std::size_t num_qubits = 0);
  static CliffordCircuit parse_file(const std::string& path, std::size_t num_qubits = 0);
  std::string to_text() const;

  /// Uniformly chosen gate kinds and qubits. Needs n >= 2 when CNOTs can occur.
  static CliffordCircuit random(std::size_t num_qubits, std::size_t num_gates, std::mt19937_64& rng);

 private:
  void check_qubit(std::size_t q) const;

  std::size_t num_qubits_;
  std::vector<Gate> gates_;
};

}  // namespace dfe
