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

#include "dfe/clifford.h"

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace dfe {

CliffordCircuit::CliffordCircuit(std::size_t num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits > kMaxQubits) {
    throw std::invalid_argument("circuit wider than 64 qubits");
  }
}

void CliffordCircuit::check_qubit(std::size_t q) const {
  if (q >= num_qubits_) {
    throw std::out_of_range("gate qubit " + std::to_string(q) + " out of range for " +
                            std::to_string(num_qubits_) + " qubits");
  }
}

CliffordCircuit& CliffordCircuit::h(std::size_t q) {
  check_qubit(q);
  gates_.push_back({GateKind::H, q});
  return *this;
}

CliffordCircuit& CliffordCircuit::s(std::size_t q) {
  check_qubit(q);
  gates_.push_back({GateKind::S, q});
  return *this;
}

CliffordCircuit& CliffordCircuit::cnot(std::size_t control, std::size_t target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) {
    throw std::invalid_argument("CNOT control equals target");
  }
  gates_.push_back({GateKind::CNOT, target, control});
  return *this;
}

PauliOp CliffordCircuit::propagate(const PauliOp& p) const {
  if (p.num_qubits() != num_qubits_) {
    throw std::invalid_argument("Pauli width does not match circuit");
  }
  std::uint64_t x = p.x_bits();
  std::uint64_t z = p.z_bits();
  bool negative = p.negative();
  for (const Gate& g : gates_) {
    const std::uint64_t t = std::uint64_t{1} << g.target;
    switch (g.kind) {
      case GateKind::H: {
        // X -> Z, Z -> X, Y -> -Y
        if ((x & t) && (z & t)) negative = !negative;
        std::uint64_t xt = x & t;
        x = (x & ~t) | (z & t);
        z = (z & ~t) | xt;
        break;
      }
      case GateKind::S: {
        // X -> Y, Y -> -X, Z -> Z
        if ((x & t) && (z & t)) negative = !negative;
        if (x & t) z ^= t;
        break;
      }
      case GateKind::CNOT: {
        const std::uint64_t c = std::uint64_t{1} << g.control;
        bool xc = x & c;
        bool zc = z & c;
        bool xt = x & t;
        bool zt = z & t;
        if (xc && zt && (xt == zc)) negative = !negative;
        if (xc) x ^= t;
        if (zt) z ^= c;
        break;
      }
    }
  }
  return PauliOp(num_qubits_, x, z, negative);
}

Matrix CliffordCircuit::to_unitary() const {
  const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << num_qubits_);
  Matrix u = Matrix::Identity(dim, dim);
  const double r = 1.0 / std::sqrt(2.0);
  for (const Gate& g : gates_) {
    const Eigen::Index t = Eigen::Index{1} << g.target;
    Matrix gate = Matrix::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
      switch (g.kind) {
        case GateKind::H:
          if (b & t) {
            gate(b ^ t, b) = r;
            gate(b, b) = -r;
          } else {
            gate(b, b) = r;
            gate(b ^ t, b) = r;
          }
          break;
        case GateKind::S:
          gate(b, b) = (b & t) ? Complex(0, 1) : Complex(1, 0);
          break;
        case GateKind::CNOT: {
          const Eigen::Index c = Eigen::Index{1} << g.control;
          gate((b & c) ? (b ^ t) : b, b) = 1;
          break;
        }
      }
    }
    u = gate * u;
  }
  return u;
}

CliffordCircuit CliffordCircuit::parse(std::istream& in, std::size_t num_qubits) {
  std::vector<Gate> parsed;
  std::size_t widest = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::string name;
    if (!(words >> name) || name.front() == '#') continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("circuit line " + std::to_string(line_no) + ": " + why);
    };
    long long a = -1;
    long long b = -1;
    if (name == "H" || name == "S") {
      if (!(words >> a) || a < 0) fail("expected one qubit index");
      parsed.push_back({name == "H" ? GateKind::H : GateKind::S, static_cast<std::size_t>(a)});
      widest = std::max(widest, static_cast<std::size_t>(a) + 1);
    } else if (name == "CNOT" || name == "CX") {
      if (!(words >> a >> b) || a < 0 || b < 0) fail("expected control and target");
      parsed.push_back({GateKind::CNOT, static_cast<std::size_t>(b), static_cast<std::size_t>(a)});
      widest = std::max({widest, static_cast<std::size_t>(a) + 1, static_cast<std::size_t>(b) + 1});
    } else {
      fail("unknown gate '" + name + "'");
    }
    std::string extra;
    if (words >> extra && extra.front() != '#') fail("trailing token '" + extra + "'");
  }
  if (num_qubits == 0) num_qubits = widest;
  CliffordCircuit circuit(num_qubits);
  for (const Gate& g : parsed) {
    switch (g.kind) {
      case GateKind::H:
        circuit.h(g.target);
        break;
      case GateKind::S:
        circuit.s(g.target);
        break;
      case GateKind::CNOT:
        circuit.cnot(g.control, g.target);
        break;
    }
  }
  return circuit;
}

CliffordCircuit CliffordCircuit::parse_file(const std::string& path, std::size_t num_qubits) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open circuit file " + path);
  }
  return parse(in, num_qubits);
}

std::string CliffordCircuit::to_text() const {
  std::ostringstream out;
  for (const Gate& g : gates_) {
    switch (g.kind) {
      case GateKind::H:
        out << "H " << g.target << '\n';
        break;
      case GateKind::S:
        out << "S " << g.target << '\n';
        break;
      case GateKind::CNOT:
        out << "CNOT " << g.control << ' ' << g.target << '\n';
        break;
    }
  }
  return out.str();
}

CliffordCircuit CliffordCircuit::random(std::size_t num_qubits, std::size_t num_gates, std::mt19937_64& rng) {
  CliffordCircuit circuit(num_qubits);
  if (num_qubits == 0) {
    if (num_gates != 0) throw std::invalid_argument("gates requested on zero qubits");
    return circuit;
  }
  std::uniform_int_distribution<std::size_t> pick_kind(0, num_qubits >= 2 ? 2 : 1);
  std::uniform_int_distribution<std::size_t> pick_qubit(0, num_qubits - 1);
  for (std::size_t i = 0; i < num_gates; ++i) {
    switch (pick_kind(rng)) {
      case 0:
        circuit.h(pick_qubit(rng));
        break;
      case 1:
        circuit.s(pick_qubit(rng));
        break;
      default: {
        std::size_t c = pick_qubit(rng);
        std::size_t t = pick_qubit(rng);
        while (t == c) t = pick_qubit(rng);
        circuit.cnot(c, t);
      }
    }
  }
  return circuit;
}

}  // namespace dfe
