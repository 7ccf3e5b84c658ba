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

#include "dfe/states.h"

#include <bit>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dfe {

namespace {

constexpr double kStateTolerance = 1e-9;

std::size_t checked_qubits(std::size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw std::invalid_argument("state dimension " + std::to_string(dim) + " is not a power of two");
  }
  return static_cast<std::size_t>(std::countr_zero(dim));
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("noise probability must lie in [0, 1]");
  }
}

void check_dense_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw std::length_error("dense path requested for " + std::to_string(n) + " qubits; cap is " +
                            std::to_string(cap));
  }
}

// W A W for Hermitian W.
Matrix conjugate_by_pauli(const Matrix& a, const PauliOp& w) {
  const Eigen::Index dim = a.rows();
  const std::uint64_t x = w.x_bits();
  std::vector<Complex> phase(static_cast<std::size_t>(dim));
  for (Eigen::Index r = 0; r < dim; ++r) {
    phase[static_cast<std::size_t>(r)] = basis_action_phase(w, static_cast<std::uint64_t>(r) ^ x);
  }
  Matrix out(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto cc = static_cast<Eigen::Index>(static_cast<std::uint64_t>(c) ^ x);
    const Complex pc = std::conj(phase[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < dim; ++r) {
      const auto rr = static_cast<Eigen::Index>(static_cast<std::uint64_t>(r) ^ x);
      out(r, c) = phase[static_cast<std::size_t>(r)] * pc * a(rr, cc);
    }
  }
  return out;
}

void apply_pauli_in_place(std::vector<Complex>& v, const PauliOp& w) {
  std::vector<Complex> out(v.size());
  for (std::uint64_t b = 0; b < v.size(); ++b) {
    out[b ^ w.x_bits()] = basis_action_phase(w, b) * v[b];
  }
  v.swap(out);
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// PureState / DensityMatrix

PureState::PureState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  num_qubits_ = checked_qubits(amplitudes_.size());
  double norm2 = 0;
  for (const Complex& a : amplitudes_) norm2 += std::norm(a);
  if (std::abs(std::sqrt(norm2) - 1.0) > kStateTolerance) {
    throw std::invalid_argument("pure state is not normalized");
  }
}

PureState PureState::normalized(std::vector<Complex> amplitudes) {
  double norm2 = 0;
  for (const Complex& a : amplitudes) norm2 += std::norm(a);
  if (norm2 <= 0) {
    throw std::invalid_argument("cannot normalize the zero vector");
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (Complex& a : amplitudes) a *= scale;
  return PureState(std::move(amplitudes));
}

PureState PureState::basis(std::size_t num_qubits, std::uint64_t index) {
  std::vector<Complex> amps(std::size_t{1} << num_qubits);
  if (index >= amps.size()) {
    throw std::out_of_range("basis index out of range");
  }
  amps[index] = 1.0;
  return PureState(std::move(amps));
}

DensityMatrix::DensityMatrix(Matrix matrix, bool check_positive) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw std::invalid_argument("density matrix is not square");
  }
  num_qubits_ = checked_qubits(static_cast<std::size_t>(matrix_.rows()));
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kStateTolerance) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace() - Complex(1.0)) > kStateTolerance) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  if (check_positive) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(matrix_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kStateTolerance) {
      throw std::invalid_argument("density matrix has a negative eigenvalue");
    }
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  Eigen::Map<const Vector> v(psi.amplitudes().data(), static_cast<Eigen::Index>(psi.dimension()));
  return DensityMatrix(v * v.adjoint(), false);
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t num_qubits) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim), false);
}

// ---------------------------------------------------------------------------
// StabilizerTableau

StabilizerTableau::StabilizerTableau(std::vector<PauliOp> generators) : generators_(std::move(generators)) {
  if (generators_.empty()) {
    throw std::invalid_argument("stabilizer tableau needs at least one generator");
  }
  num_qubits_ = generators_.front().num_qubits();
  if (generators_.size() != num_qubits_) {
    throw std::invalid_argument("stabilizer tableau needs exactly n generators");
  }
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (generators_[i].num_qubits() != num_qubits_) {
      throw std::invalid_argument("generator widths differ");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (!generators_[i].commutes_with(generators_[j])) {
        throw std::invalid_argument("stabilizer generators " + std::to_string(j) + " and " +
                                    std::to_string(i) + " anticommute");
      }
    }
  }
  const int n = static_cast<int>(num_qubits_);
  auto has_bit = [n](std::uint64_t x, std::uint64_t z, int pos) {
    return pos < n ? ((x >> pos) & 1) != 0 : ((z >> (pos - n)) & 1) != 0;
  };
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    ReducedRow row{generators_[i].x_bits(), generators_[i].z_bits(), std::uint64_t{1} << i, -1};
    for (const ReducedRow& r : reduced_) {
      if (has_bit(row.x, row.z, r.pivot)) {
        row.x ^= r.x;
        row.z ^= r.z;
        row.combo ^= r.combo;
      }
    }
    if (row.x == 0 && row.z == 0) {
      throw std::invalid_argument("stabilizer generators are not independent");
    }
    row.pivot = row.x ? std::countr_zero(row.x) : n + std::countr_zero(row.z);
    reduced_.push_back(row);
  }
}

StabilizerTableau StabilizerTableau::from_circuit(const CliffordCircuit& circuit) {
  std::vector<PauliOp> gens;
  gens.reserve(circuit.num_qubits());
  for (std::size_t q = 0; q < circuit.num_qubits(); ++q) {
    gens.push_back(circuit.propagate(PauliOp::single(circuit.num_qubits(), q, Pauli::Z)));
  }
  return StabilizerTableau(std::move(gens));
}

PauliOp StabilizerTableau::group_element(std::uint64_t subset) const {
  if (num_qubits_ < 64 && (subset >> num_qubits_) != 0) {
    throw std::out_of_range("generator subset has bits beyond n");
  }
  PauliOp acc = PauliOp::identity(num_qubits_);
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if ((subset >> i) & 1) acc = multiply_commuting(acc, generators_[i]);
  }
  return acc;
}

double StabilizerTableau::expectation(const PauliOp& p) const {
  if (p.num_qubits() != num_qubits_) {
    throw std::invalid_argument("Pauli width does not match tableau");
  }
  const int n = static_cast<int>(num_qubits_);
  std::uint64_t x = p.x_bits();
  std::uint64_t z = p.z_bits();
  std::uint64_t combo = 0;
  for (const ReducedRow& r : reduced_) {
    bool set = r.pivot < n ? ((x >> r.pivot) & 1) : ((z >> (r.pivot - n)) & 1);
    if (set) {
      x ^= r.x;
      z ^= r.z;
      combo ^= r.combo;
    }
  }
  if (x != 0 || z != 0) return 0.0;
  return static_cast<double>(group_element(combo).sign() * p.sign());
}

PureState StabilizerTableau::to_pure_state() const {
  const std::size_t dim = std::size_t{1} << num_qubits_;
  for (std::size_t b = 0; b < dim; ++b) {
    std::vector<Complex> v(dim);
    v[b] = 1.0;
    for (const PauliOp& g : generators_) {
      std::vector<Complex> gv = v;
      apply_pauli_in_place(gv, g);
      for (std::size_t i = 0; i < dim; ++i) v[i] = 0.5 * (v[i] + gv[i]);
    }
    double norm2 = 0;
    for (const Complex& a : v) norm2 += std::norm(a);
    if (norm2 > 1e-6) return PureState::normalized(std::move(v));
  }
  throw std::logic_error("stabilizer projector annihilated every basis state");
}

// ---------------------------------------------------------------------------
// Noise

PauliNoise PauliNoise::global_depolarizing(double p) {
  check_probability(p);
  return {Kind::global_depolarizing, p};
}

PauliNoise PauliNoise::local_depolarizing(double p) {
  check_probability(p);
  return {Kind::local_depolarizing, p};
}

PauliNoise PauliNoise::dephasing(double p) {
  check_probability(p);
  return {Kind::dephasing, p};
}

double PauliNoise::attenuation(const PauliOp& w) const {
  switch (kind) {
    case Kind::none:
      return 1.0;
    case Kind::global_depolarizing:
      return w.is_identity() ? 1.0 : 1.0 - probability;
    case Kind::local_depolarizing:
      return std::pow(1.0 - 4.0 * probability / 3.0, static_cast<double>(w.weight()));
    case Kind::dephasing:
      return std::pow(1.0 - probability, static_cast<double>(std::popcount(w.x_bits())));
  }
  return 1.0;
}

Matrix PauliNoise::apply(const Matrix& a) const {
  const std::size_t n = checked_qubits(static_cast<std::size_t>(a.rows()));
  const double p = probability;
  switch (kind) {
    case Kind::none:
      return a;
    case Kind::global_depolarizing: {
      const Eigen::Index dim = a.rows();
      return (1.0 - p) * a + p * a.trace() * Matrix::Identity(dim, dim) / static_cast<double>(dim);
    }
    case Kind::local_depolarizing: {
      Matrix out = a;
      for (std::size_t q = 0; q < n; ++q) {
        Matrix twirl = conjugate_by_pauli(out, PauliOp::single(n, q, Pauli::X)) +
                       conjugate_by_pauli(out, PauliOp::single(n, q, Pauli::Y)) +
                       conjugate_by_pauli(out, PauliOp::single(n, q, Pauli::Z));
        out = (1.0 - p) * out + (p / 3.0) * twirl;
      }
      return out;
    }
    case Kind::dephasing: {
      Matrix out = a;
      for (std::size_t q = 0; q < n; ++q) {
        out = (1.0 - p / 2.0) * out + (p / 2.0) * conjugate_by_pauli(out, PauliOp::single(n, q, Pauli::Z));
      }
      return out;
    }
  }
  return a;
}

std::string PauliNoise::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::none:
      return "none";
    case Kind::global_depolarizing:
      out << "global_depolarizing(p=" << probability << "): rho -> (1-p) rho + p I/d";
      break;
    case Kind::local_depolarizing:
      out << "local_depolarizing(p=" << probability << "): per qubit rho -> (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z)";
      break;
    case Kind::dephasing:
      out << "dephasing(p=" << probability << "): per qubit rho -> (1-p/2) rho + (p/2) Z rho Z";
      break;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// StateModel helpers

std::size_t num_qubits(const StateModel& state) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoisyState>) {
          return std::visit([](const auto& ideal) { return ideal.num_qubits(); }, s.ideal);
        } else {
          return s.num_qubits();
        }
      },
      state);
}

namespace {

Matrix dense_of_ideal(const std::variant<PureState, StabilizerTableau>& ideal) {
  if (const auto* psi = std::get_if<PureState>(&ideal)) {
    return DensityMatrix::from_pure(*psi).matrix();
  }
  return DensityMatrix::from_pure(std::get<StabilizerTableau>(ideal).to_pure_state()).matrix();
}

}  // namespace

DensityMatrix to_density_matrix(const StateModel& state, std::size_t dense_cap) {
  check_dense_cap(num_qubits(state), dense_cap);
  if (const auto* psi = std::get_if<PureState>(&state)) return DensityMatrix::from_pure(*psi);
  if (const auto* rho = std::get_if<DensityMatrix>(&state)) return *rho;
  if (const auto* tab = std::get_if<StabilizerTableau>(&state)) return DensityMatrix::from_pure(tab->to_pure_state());
  const auto& noisy = std::get<NoisyState>(state);
  return DensityMatrix(noisy.noise.apply(dense_of_ideal(noisy.ideal)), false);
}

StabilizerTableau make_ghz(std::size_t num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("GHZ state needs 1 <= n <= 64");
  }
  const std::uint64_t all = num_qubits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << num_qubits) - 1;
  std::vector<PauliOp> gens;
  gens.emplace_back(num_qubits, all, 0);
  for (std::size_t q = 0; q + 1 < num_qubits; ++q) {
    gens.emplace_back(num_qubits, 0, (std::uint64_t{3} << q));
  }
  return StabilizerTableau(std::move(gens));
}

PureState make_dicke(std::size_t num_qubits, std::size_t excitations) {
  if (num_qubits < 1 || excitations > num_qubits) {
    throw std::invalid_argument("Dicke state needs n >= 1 and 0 <= excitations <= n");
  }
  if (num_qubits > 30) {
    throw std::length_error("Dicke statevector too large");
  }
  const std::size_t dim = std::size_t{1} << num_qubits;
  const double amp = 1.0 / std::sqrt(binomial(num_qubits, excitations));
  std::vector<Complex> amps(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    if (static_cast<std::size_t>(std::popcount(b)) == excitations) amps[b] = amp;
  }
  return PureState(std::move(amps));
}

PureState make_w(std::size_t num_qubits) { return make_dicke(num_qubits, 1); }

PureState make_haar_random(std::size_t num_qubits, std::uint64_t seed, std::size_t dense_cap) {
  check_dense_cap(num_qubits, dense_cap);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Complex> amps(std::size_t{1} << num_qubits);
  for (Complex& a : amps) {
    double re = gauss(rng);
    double im = gauss(rng);
    a = Complex(re, im);
  }
  return PureState::normalized(std::move(amps));
}

DensityMatrix depolarize(const StateModel& state, double p) {
  return DensityMatrix(PauliNoise::global_depolarizing(p).apply(to_density_matrix(state).matrix()), false);
}

DensityMatrix depolarize_local(const StateModel& state, double p) {
  return DensityMatrix(PauliNoise::local_depolarizing(p).apply(to_density_matrix(state).matrix()), false);
}

DensityMatrix dephase(const StateModel& state, double p) {
  return DensityMatrix(PauliNoise::dephasing(p).apply(to_density_matrix(state).matrix()), false);
}

NoisyState with_noise(const PureState& state, PauliNoise noise) { return NoisyState{state, noise}; }

NoisyState with_noise(const StabilizerTableau& state, PauliNoise noise) { return NoisyState{state, noise}; }

double dense_overlap(const StateModel& a, const StateModel& b, std::size_t dense_cap) {
  const DensityMatrix da = to_density_matrix(a, dense_cap);
  const DensityMatrix db = to_density_matrix(b, dense_cap);
  if (da.dimension() != db.dimension()) {
    throw std::invalid_argument("state dimensions differ");
  }
  return (da.matrix() * db.matrix()).trace().real();
}

nlohmann::json to_json(const PureState& psi) {
  nlohmann::json amps = nlohmann::json::array();
  for (const Complex& a : psi.amplitudes()) amps.push_back({a.real(), a.imag()});
  return {{"n", psi.num_qubits()}, {"amplitudes", std::move(amps)}};
}

PureState pure_state_from_json(const nlohmann::json& j) {
  const auto& amps = j.at("amplitudes");
  std::vector<Complex> out;
  out.reserve(amps.size());
  for (const auto& pair : amps) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("amplitudes must be [re, im] pairs");
    }
    out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  PureState psi(std::move(out));
  if (j.contains("n") && j.at("n").get<std::size_t>() != psi.num_qubits()) {
    throw std::invalid_argument("field n disagrees with amplitude count");
  }
  return psi;
}

}  // namespace dfe
