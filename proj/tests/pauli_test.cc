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

#include <gtest/gtest.h>

#include <random>

#include "dfe/characteristic.h"
#include "dfe/pauli.h"
#include "dfe/states.h"
#include "oracles.h"

namespace dfe {
namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

TEST(PauliOp, IndexZeroIsIdentity) {
  PauliOp p = PauliOp::from_index(1, 0);
  EXPECT_TRUE(p.is_identity());
  EXPECT_EQ(p.str(), "+_");
}

TEST(PauliOp, SingleQubitOrder) {
  const char* names[] = {"+_", "+X", "+Y", "+Z"};
  for (std::uint64_t k = 0; k < 4; ++k) {
    PauliOp p = PauliOp::from_index(1, k);
    EXPECT_EQ(p.str(), names[k]);
    EXPECT_LT(max_abs_diff(dense_matrix(p), oracle::single(static_cast<int>(k))), 1e-15);
  }
}

TEST(PauliOp, ThreeQubitIndex17MatchesKronecker) {
  PauliOp p = PauliOp::from_index(3, 17);
  EXPECT_LT(max_abs_diff(dense_matrix(p), oracle::pauli_index(3, 17)), 1e-15);
}

TEST(PauliOp, AllThreeQubitMatricesMatchKronecker) {
  for (std::uint64_t k = 0; k < 64; ++k) {
    EXPECT_LT(max_abs_diff(dense_matrix(PauliOp::from_index(3, k)), oracle::pauli_index(3, k)), 1e-15) << k;
  }
}

TEST(PauliOp, IndexRoundTrip) {
  for (std::size_t n : {1, 2, 5, 13}) {
    std::mt19937_64 rng(n);
    const std::uint64_t count = std::uint64_t{1} << (2 * n);
    for (int t = 0; t < 200; ++t) {
      const std::uint64_t k = rng() % count;
      PauliOp p = PauliOp::from_index(n, k);
      EXPECT_EQ(p.index(), k);
      EXPECT_EQ(pauli_index(n, p.x_bits(), p.z_bits()), k);
    }
  }
}

TEST(PauliOp, IndexOutOfRangeThrows) {
  EXPECT_THROW(PauliOp::from_index(1, 4), std::out_of_range);
  EXPECT_THROW(PauliOp::from_index(2, 16), std::out_of_range);
}

TEST(PauliOp, StringRoundTrip) {
  PauliOp p = PauliOp::from_string("-XY_Z");
  EXPECT_EQ(p.num_qubits(), 4u);
  EXPECT_EQ(p.sign(), -1);
  EXPECT_EQ(p.str(), "-XY_Z");
  EXPECT_EQ(p.weight(), 3u);
  EXPECT_EQ(p.factor(1), Pauli::Y);
}

TEST(PauliOp, HermitianWithUnitEigenvalues) {
  for (std::uint64_t k = 0; k < 16; ++k) {
    Matrix m = dense_matrix(PauliOp::from_index(2, k));
    EXPECT_LT(max_abs_diff(m, m.adjoint()), 1e-15);
    EXPECT_LT(max_abs_diff(m * m, Matrix::Identity(4, 4)), 1e-15);
  }
}

TEST(PauliOp, ProductPhaseMatchesDense) {
  const Complex phases[] = {1.0, Complex(0, 1), -1.0, Complex(0, -1)};
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) {
      PauliOp lhs = PauliOp::from_index(2, a);
      PauliOp rhs = PauliOp::from_index(2, b).negated();
      PhasedPauli prod = multiply(lhs, rhs);
      Matrix expected = oracle::pauli_index(2, a) * (-oracle::pauli_index(2, b));
      Matrix got = phases[prod.phase] * dense_matrix(prod.op);
      EXPECT_LT(max_abs_diff(got, expected), 1e-14) << a << " " << b;
      Matrix commutator = oracle::pauli_index(2, a) * oracle::pauli_index(2, b) -
                          oracle::pauli_index(2, b) * oracle::pauli_index(2, a);
      EXPECT_EQ(lhs.commutes_with(rhs), commutator.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST(PauliOp, MultiplyCommutingRejectsAnticommuting) {
  EXPECT_THROW(multiply_commuting(PauliOp::from_string("X"), PauliOp::from_string("Z")), std::invalid_argument);
  EXPECT_EQ(multiply_commuting(PauliOp::from_string("XX"), PauliOp::from_string("ZZ")).str(), "-YY");
}

TEST(PauliExpectation, ZeroStateZ) {
  EXPECT_DOUBLE_EQ(pauli_expectation(StateModel(PureState::basis(1, 0)), PauliOp::from_string("Z")), 1.0);
}

TEST(PauliExpectation, MaximallyMixedIsTraceless) {
  StateModel mixed = DensityMatrix::maximally_mixed(2);
  for (std::uint64_t k = 1; k < 16; ++k) {
    EXPECT_NEAR(pauli_expectation(mixed, PauliOp::from_index(2, k)), 0.0, 1e-15);
  }
}

TEST(PauliExpectation, RandomStateMatchesDenseTrace) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    auto amps = oracle::random_amplitudes(3, rng);
    const std::uint64_t k = rng() % 64;
    const double expected = oracle::expectation(oracle::projector(amps), oracle::pauli_index(3, k));
    PureState psi(amps);
    EXPECT_NEAR(pauli_expectation(StateModel(psi), PauliOp::from_index(3, k)), expected, 1e-10);
    Matrix rho = oracle::projector(amps);
    EXPECT_NEAR(pauli_expectation(rho, PauliOp::from_index(3, k)), expected, 1e-10);
  }
}

TEST(PauliExpectation, DimensionMismatchThrows) {
  EXPECT_THROW(pauli_expectation(StateModel(PureState::basis(2, 0)), PauliOp::from_string("Z")),
               std::invalid_argument);
}

TEST(AllPauliTraces, MatchesDenseForMixedMatrix) {
  std::mt19937_64 rng(5);
  oracle::Matrix rho = oracle::random_density(3, 2, rng);
  std::vector<Complex> traces = all_pauli_traces(rho);
  ASSERT_EQ(traces.size(), 64u);
  for (std::uint64_t k = 0; k < 64; ++k) {
    EXPECT_LT(std::abs(traces[k] - (rho * oracle::pauli_index(3, k)).trace()), 1e-12);
  }
}

TEST(CharFn, IdentityGivesInverseSqrtD) {
  std::mt19937_64 rng(2);
  PureState psi(oracle::random_amplitudes(4, rng));
  EXPECT_NEAR(char_fn(StateModel(psi), 0).chi, 0.25, 1e-15);
}

TEST(CharFn, GhzStabilizerElementsArePlusMinusInvSqrtD) {
  StabilizerTableau ghz = make_ghz(3);
  for (std::uint64_t s = 0; s < 8; ++s) {
    PauliOp g = ghz.group_element(s);
    const double chi = char_fn(StateModel(ghz), g.index()).chi;
    EXPECT_NEAR(std::abs(chi), 1.0 / std::sqrt(8.0), 1e-15);
    EXPECT_EQ(chi > 0 ? 1 : -1, g.sign());
  }
}

TEST(CharFn, WStateWeightOneXPartVanishes) {
  const oracle::Matrix rho = oracle::projector(make_w(3).amplitudes());
  for (std::uint64_t x : {1u, 2u, 4u}) {
    for (std::uint64_t z = 0; z < 8; ++z) {
      const double dense = oracle::expectation(rho, oracle::pauli_bits(3, x, z));
      EXPECT_NEAR(dense, 0.0, 1e-15);
      EXPECT_NEAR(char_fn(StateModel(make_w(3)), pauli_index(3, x, z)).chi, 0.0, 1e-15);
    }
  }
}

TEST(CharFnFull, PureStatePurityIsOne) {
  std::mt19937_64 rng(3);
  PureState psi(oracle::random_amplitudes(4, rng));
  std::vector<double> chi = char_fn_full(StateModel(psi));
  EXPECT_NEAR(char_overlap(chi, chi), 1.0, 1e-12);
}

TEST(CharFnFull, OverlapOfRandomMixedStatesMatchesTrace) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    oracle::Matrix a = oracle::random_density(2, 1 + t % 4, rng);
    oracle::Matrix b = oracle::random_density(2, 1 + (t + 1) % 4, rng);
    const double expected = (a * b).trace().real();
    const double got = char_overlap(char_fn_full(StateModel(DensityMatrix(a))), char_fn_full(StateModel(DensityMatrix(b))));
    EXPECT_NEAR(got, expected, 1e-10);
  }
}

TEST(CharFnFull, DepolarizedOverlap) {
  std::mt19937_64 rng(8);
  PureState psi(oracle::random_amplitudes(2, rng));
  DensityMatrix sigma = depolarize(StateModel(psi), 0.1);
  const double got = char_overlap(char_fn_full(StateModel(psi)), char_fn_full(StateModel(sigma)));
  EXPECT_NEAR(got, 0.925, 1e-12);
  EXPECT_NEAR((oracle::projector(psi.amplitudes()) * sigma.matrix()).trace().real(), 0.925, 1e-12);
}

TEST(CharFnFull, OverlapIdentityUpToFourQubits) {
  std::mt19937_64 rng(9);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int t = 0; t < 5; ++t) {
      oracle::Matrix a = oracle::random_density(n, 1, rng);
      oracle::Matrix b = oracle::random_density(n, 3, rng);
      const double got =
          char_overlap(char_fn_full(StateModel(DensityMatrix(a))), char_fn_full(StateModel(DensityMatrix(b))));
      EXPECT_NEAR(got, (a * b).trace().real(), 1e-9);
    }
  }
}

TEST(CharFnFull, ValuesAreBounded) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 10; ++t) {
    DensityMatrix rho(oracle::random_density(3, 2, rng));
    for (double c : char_fn_full(StateModel(rho))) EXPECT_LE(std::abs(c) * std::sqrt(8.0), 1.0 + 1e-9);
  }
}

TEST(CharFnFull, CapExceededThrows) { EXPECT_THROW(char_fn_full(StateModel(make_ghz(9))), std::length_error); }

TEST(CharFn, TableauMatchesDenseStatevector) {
  std::mt19937_64 rng(12);
  for (std::size_t n = 1; n <= 4; ++n) {
    CliffordCircuit c = CliffordCircuit::random(n, 20, rng);
    StabilizerTableau tab = StabilizerTableau::from_circuit(c);
    oracle::Matrix u = oracle::circuit_unitary(c);
    oracle::Matrix rho = u.col(0) * u.col(0).adjoint();
    const std::uint64_t count = std::uint64_t{1} << (2 * n);
    for (std::uint64_t k = 0; k < count; ++k) {
      EXPECT_NEAR(pauli_expectation(StateModel(tab), PauliOp::from_index(n, k)),
                  oracle::expectation(rho, oracle::pauli_index(n, k)), 1e-12);
    }
  }
}

}  // namespace
}  // namespace dfe
