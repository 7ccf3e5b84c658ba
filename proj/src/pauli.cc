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

#include "dfe/pauli.h"

#include <bit>
#include <stdexcept>

namespace dfe {

namespace {

std::uint64_t low_mask(std::size_t num_qubits) {
  return num_qubits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << num_qubits) - 1;
}

constexpr Complex kIPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

void walsh_hadamard(std::vector<Complex>& v) {
  for (std::size_t half = 1; half < v.size(); half <<= 1) {
    for (std::size_t block = 0; block < v.size(); block += 2 * half) {
      for (std::size_t i = block; i < block + half; ++i) {
        Complex a = v[i];
        Complex b = v[i + half];
        v[i] = a + b;
        v[i + half] = a - b;
      }
    }
  }
}

template <typename Entry>
std::vector<Complex> traces_from_entries(std::size_t num_qubits, Entry entry) {
  const std::uint64_t dim = std::uint64_t{1} << num_qubits;
  std::vector<Complex> out(dim * dim);
  std::vector<Complex> row(dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      row[b] = entry(b, b ^ x);
    }
    walsh_hadamard(row);
    for (std::uint64_t z = 0; z < dim; ++z) {
      out[pauli_index(num_qubits, x, z)] = kIPowers[std::popcount(x & z) & 3] * row[z];
    }
  }
  return out;
}

std::size_t qubits_for_dimension(std::size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw std::invalid_argument("dimension is not a power of two");
  }
  return static_cast<std::size_t>(std::countr_zero(dim));
}

}  // namespace

PauliOp::PauliOp(std::size_t num_qubits, std::uint64_t x_bits, std::uint64_t z_bits, bool negative)
    : num_qubits_(num_qubits), x_bits_(x_bits), z_bits_(z_bits), negative_(negative) {
  if (num_qubits > kMaxQubits) {
    throw std::invalid_argument("PauliOp supports at most 64 qubits");
  }
  if ((x_bits | z_bits) & ~low_mask(num_qubits)) {
    throw std::invalid_argument("Pauli bits set beyond the qubit count");
  }
}

PauliOp PauliOp::identity(std::size_t num_qubits) { return PauliOp(num_qubits, 0, 0); }

PauliOp PauliOp::from_index(std::size_t num_qubits, std::uint64_t index) {
  if (num_qubits > kMaxIndexedQubits) {
    throw std::out_of_range("Pauli index only defined for n <= 32");
  }
  if (num_qubits < kMaxIndexedQubits && index >> (2 * num_qubits)) {
    throw std::out_of_range("Pauli index " + std::to_string(index) + " out of range for " +
                            std::to_string(num_qubits) + " qubits");
  }
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (std::size_t q = 0; q < num_qubits; ++q) {
    auto digit = (index >> (2 * q)) & 3;
    if (digit == 1 || digit == 2) x |= std::uint64_t{1} << q;
    if (digit == 2 || digit == 3) z |= std::uint64_t{1} << q;
  }
  return PauliOp(num_qubits, x, z);
}

PauliOp PauliOp::from_string(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.size() > kMaxQubits) {
    throw std::invalid_argument("Pauli string longer than 64 qubits");
  }
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (std::size_t q = 0; q < text.size(); ++q) {
    std::uint64_t bit = std::uint64_t{1} << q;
    switch (text[q]) {
      case '_':
      case 'I':
        break;
      case 'X':
        x |= bit;
        break;
      case 'Y':
        x |= bit;
        z |= bit;
        break;
      case 'Z':
        z |= bit;
        break;
      default:
        throw std::invalid_argument("bad Pauli character '" + std::string(1, text[q]) + "'");
    }
  }
  return PauliOp(text.size(), x, z, negative);
}

PauliOp PauliOp::single(std::size_t num_qubits, std::size_t qubit, Pauli factor) {
  if (qubit >= num_qubits) {
    throw std::out_of_range("qubit index out of range");
  }
  std::uint64_t bit = std::uint64_t{1} << qubit;
  bool has_x = factor == Pauli::X || factor == Pauli::Y;
  bool has_z = factor == Pauli::Y || factor == Pauli::Z;
  return PauliOp(num_qubits, has_x ? bit : 0, has_z ? bit : 0);
}

std::uint64_t PauliOp::index() const { return pauli_index(num_qubits_, x_bits_, z_bits_); }

Pauli PauliOp::factor(std::size_t qubit) const {
  bool x = (x_bits_ >> qubit) & 1;
  bool z = (z_bits_ >> qubit) & 1;
  if (x) return z ? Pauli::Y : Pauli::X;
  return z ? Pauli::Z : Pauli::I;
}

std::size_t PauliOp::weight() const { return static_cast<std::size_t>(std::popcount(x_bits_ | z_bits_)); }

bool PauliOp::commutes_with(const PauliOp& other) const {
  return ((std::popcount(x_bits_ & other.z_bits_) + std::popcount(z_bits_ & other.x_bits_)) & 1) == 0;
}

std::string PauliOp::str() const {
  std::string out(1, negative_ ? '-' : '+');
  for (std::size_t q = 0; q < num_qubits_; ++q) {
    out.push_back("_XYZ"[static_cast<int>(factor(q))]);
  }
  return out;
}

std::uint64_t pauli_index(std::size_t num_qubits, std::uint64_t x_bits, std::uint64_t z_bits) {
  if (num_qubits > kMaxIndexedQubits) {
    throw std::out_of_range("Pauli index only defined for n <= 32");
  }
  std::uint64_t index = 0;
  for (std::size_t q = 0; q < num_qubits; ++q) {
    std::uint64_t x = (x_bits >> q) & 1;
    std::uint64_t z = (z_bits >> q) & 1;
    std::uint64_t digit = x ? (z ? 2 : 1) : (z ? 3 : 0);
    index |= digit << (2 * q);
  }
  return index;
}

PhasedPauli multiply(const PauliOp& lhs, const PauliOp& rhs) {
  if (lhs.num_qubits() != rhs.num_qubits()) {
    throw std::invalid_argument("Pauli qubit counts differ");
  }
  // W(x,z) = i^{|x&z|} X^x Z^z and Z^z1 X^x2 = (-1)^{|z1&x2|} X^x2 Z^z1.
  std::uint64_t x = lhs.x_bits() ^ rhs.x_bits();
  std::uint64_t z = lhs.z_bits() ^ rhs.z_bits();
  int phase = std::popcount(lhs.x_bits() & lhs.z_bits()) + std::popcount(rhs.x_bits() & rhs.z_bits()) +
              2 * std::popcount(lhs.z_bits() & rhs.x_bits()) - std::popcount(x & z);
  if (lhs.negative()) phase += 2;
  if (rhs.negative()) phase += 2;
  phase = ((phase % 4) + 4) % 4;
  bool negative = phase >= 2;
  return {PauliOp(lhs.num_qubits(), x, z, negative), phase % 2};
}

PauliOp multiply_commuting(const PauliOp& lhs, const PauliOp& rhs) {
  PhasedPauli product = multiply(lhs, rhs);
  if (product.phase != 0) {
    throw std::invalid_argument("product of anticommuting Paulis is not Hermitian");
  }
  return product.op;
}

Complex basis_action_phase(const PauliOp& op, std::uint64_t basis_index) {
  int phase = std::popcount(op.x_bits() & op.z_bits()) + 2 * std::popcount(op.z_bits() & basis_index);
  if (op.negative()) phase += 2;
  return kIPowers[phase & 3];
}

Matrix dense_matrix(const PauliOp& op) {
  const std::uint64_t dim = std::uint64_t{1} << op.num_qubits();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t b = 0; b < dim; ++b) {
    m(static_cast<Eigen::Index>(b ^ op.x_bits()), static_cast<Eigen::Index>(b)) = basis_action_phase(op, b);
  }
  return m;
}

double pauli_expectation(std::span<const Complex> amplitudes, const PauliOp& op) {
  if (amplitudes.size() != (std::size_t{1} << op.num_qubits())) {
    throw std::invalid_argument("statevector dimension does not match Pauli");
  }
  Complex total = 0;
  for (std::uint64_t b = 0; b < amplitudes.size(); ++b) {
    total += std::conj(amplitudes[b ^ op.x_bits()]) * basis_action_phase(op, b) * amplitudes[b];
  }
  return total.real();
}

Complex pauli_trace(const Matrix& a, const PauliOp& op) {
  if (a.rows() != a.cols() || static_cast<std::uint64_t>(a.rows()) != (std::uint64_t{1} << op.num_qubits())) {
    throw std::invalid_argument("matrix dimension does not match Pauli");
  }
  Complex total = 0;
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(a.rows()); ++b) {
    total += basis_action_phase(op, b) * a(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b ^ op.x_bits()));
  }
  return total;
}

double pauli_expectation(const Matrix& rho, const PauliOp& op) { return pauli_trace(rho, op).real(); }

std::vector<Complex> all_pauli_traces(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("matrix is not square");
  }
  std::size_t n = qubits_for_dimension(static_cast<std::size_t>(a.rows()));
  return traces_from_entries(n, [&](std::uint64_t row, std::uint64_t col) {
    return a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  });
}

std::vector<Complex> all_pauli_traces(std::span<const Complex> amplitudes) {
  std::size_t n = qubits_for_dimension(amplitudes.size());
  return traces_from_entries(n, [&](std::uint64_t row, std::uint64_t col) {
    return amplitudes[row] * std::conj(amplitudes[col]);
  });
}

}  // namespace dfe
