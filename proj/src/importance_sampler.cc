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

#include "dfe/importance_sampler.h"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dfe {

namespace {

std::vector<double> squared_weights(const std::vector<double>& chi) {
  std::vector<double> w(chi.size());
  for (std::size_t k = 0; k < chi.size(); ++k) {
    w[k] = std::abs(chi[k]) < kChiZeroTolerance ? 0.0 : chi[k] * chi[k];
  }
  return w;
}

std::uint64_t low_mask(std::size_t n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

void check_w_args(std::size_t n, std::uint64_t j_bits, std::uint64_t k_bits) {
  if (n < 2 || n > kMaxQubits) {
    throw std::invalid_argument("W-state formulas need 2 <= n <= 64");
  }
  if ((j_bits | k_bits) & ~low_mask(n)) {
    throw std::invalid_argument("W-state bit strings wider than n");
  }
}

std::int64_t binomial_int(std::size_t n, std::size_t k) {
  std::int64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<std::int64_t>(n - k + i) / static_cast<std::int64_t>(i);
  }
  return r;
}

double binomial_real(std::size_t n, std::size_t k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

// Uniform n-bit string of Hamming weight w.
std::uint64_t uniform_weight_string(std::size_t n, std::size_t w, Rng& rng) {
  std::vector<std::size_t> sites(n);
  std::iota(sites.begin(), sites.end(), std::size_t{0});
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < w; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(sites[i], sites[pick(rng)]);
    out |= std::uint64_t{1} << sites[i];
  }
  return out;
}

}  // namespace

std::string to_string(SamplerMode mode) {
  switch (mode) {
    case SamplerMode::exhaustive:
      return "exhaustive";
    case SamplerMode::stabilizer:
      return "stabilizer";
    case SamplerMode::w_state:
      return "w_state";
    case SamplerMode::truncated:
      return "truncated";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

ExhaustiveSampler::ExhaustiveSampler(std::size_t num_qubits, std::vector<double> chi, SamplerMode mode)
    : num_qubits_(num_qubits), mode_(mode), chi_(std::move(chi)) {
  if (num_qubits > kMaxIndexedQubits || chi_.size() != (std::size_t{1} << (2 * num_qubits))) {
    throw std::invalid_argument("chi table must have 4^n entries");
  }
  std::vector<double> weights = squared_weights(chi_);
  table_ = AliasTable(weights);
}

PauliDraw ExhaustiveSampler::sample(Rng& rng) const {
  std::size_t k = table_.sample(rng);
  return {PauliOp::from_index(num_qubits_, k), chi_[k]};
}

double ExhaustiveSampler::chi(const PauliOp& p) const {
  if (p.num_qubits() != num_qubits_) {
    throw std::invalid_argument("Pauli width does not match sampler");
  }
  double c = chi_[p.index()];
  return std::abs(c) < kChiZeroTolerance ? 0.0 : c;
}

ExhaustiveSampler build_exhaustive(const PureState& state, std::size_t dense_cap) {
  return ExhaustiveSampler(state.num_qubits(), char_fn_full(state, dense_cap));
}

// ---------------------------------------------------------------------------

StabilizerSampler::StabilizerSampler(StabilizerTableau tableau)
    : tableau_(std::move(tableau)),
      inv_sqrt_d_(std::sqrt(std::ldexp(1.0, -static_cast<int>(tableau_.num_qubits())))) {}

PauliOp sample_stabilizer(const StabilizerTableau& tableau, Rng& rng) {
  std::uint64_t subset = rng() & low_mask(tableau.num_qubits());
  return tableau.group_element(subset);
}

PauliDraw StabilizerSampler::sample(Rng& rng) const {
  PauliOp g = sample_stabilizer(tableau_, rng);
  return {g.unsigned_op(), g.sign() * inv_sqrt_d_};
}

double StabilizerSampler::chi(const PauliOp& p) const { return tableau_.expectation(p.unsigned_op()) * inv_sqrt_d_; }

// ---------------------------------------------------------------------------

Rational w_state_prob(std::size_t n, std::uint64_t j_bits, std::uint64_t k_bits) {
  check_w_args(n, j_bits, k_bits);
  if (n > kMaxRationalWQubits) {
    throw std::length_error("exact W-state probabilities limited to n <= 20");
  }
  const std::int64_t nn = static_cast<std::int64_t>(n);
  const std::int64_t denom = nn * nn * (std::int64_t{1} << n);
  const int j_weight = std::popcount(j_bits);
  if (j_weight == 0) {
    std::int64_t c = nn - 2 * std::popcount(k_bits);
    return Rational(c * c, denom);
  }
  if (j_weight == 2 && (std::popcount(j_bits & k_bits) % 2) == 0) {
    return Rational(4, denom);
  }
  return Rational(0);
}

double w_state_prob_real(std::size_t n, std::uint64_t j_bits, std::uint64_t k_bits) {
  check_w_args(n, j_bits, k_bits);
  const double nd = static_cast<double>(n);
  const double denom = nd * nd * std::ldexp(1.0, static_cast<int>(n));
  const int j_weight = std::popcount(j_bits);
  if (j_weight == 0) {
    double c = nd - 2.0 * std::popcount(k_bits);
    return c * c / denom;
  }
  if (j_weight == 2 && (std::popcount(j_bits & k_bits) % 2) == 0) {
    return 4.0 / denom;
  }
  return 0.0;
}

std::vector<Rational> w_weight_distribution(std::size_t n) {
  if (n < 2 || n > kMaxRationalWQubits) {
    throw std::length_error("exact W weight distribution needs 2 <= n <= 20");
  }
  const std::int64_t nn = static_cast<std::int64_t>(n);
  const std::int64_t denom = nn * (std::int64_t{1} << n);
  std::vector<Rational> q;
  q.reserve(n + 1);
  for (std::size_t w = 0; w <= n; ++w) {
    std::int64_t c = nn - 2 * static_cast<std::int64_t>(w);
    q.emplace_back(binomial_int(n, w) * c * c, denom);
  }
  return q;
}

std::vector<double> w_weight_distribution_real(std::size_t n) {
  if (n < 2 || n > kMaxQubits) {
    throw std::invalid_argument("W weight distribution needs 2 <= n <= 64");
  }
  std::vector<double> q;
  q.reserve(n + 1);
  const double nd = static_cast<double>(n);
  for (std::size_t w = 0; w <= n; ++w) {
    double c = nd - 2.0 * static_cast<double>(w);
    q.push_back(binomial_real(n, w) * c * c / (nd * std::ldexp(1.0, static_cast<int>(n))));
  }
  return q;
}

namespace {

std::pair<std::uint64_t, std::uint64_t> sample_w_with(std::size_t n, const AliasTable& weights, Rng& rng) {
  std::bernoulli_distribution first_branch(1.0 / static_cast<double>(n));
  if (first_branch(rng)) {
    std::size_t w = weights.sample(rng);
    return {0, uniform_weight_string(n, w, rng)};
  }
  std::uniform_int_distribution<std::size_t> pick_a(0, n - 1);
  std::uniform_int_distribution<std::size_t> pick_b(0, n - 2);
  std::size_t a = pick_a(rng);
  std::size_t b = pick_b(rng);
  if (b >= a) ++b;
  const std::uint64_t j = (std::uint64_t{1} << a) | (std::uint64_t{1} << b);

  std::uniform_int_distribution<std::uint64_t> coin(0, 1);
  std::uint64_t k = 0;
  if (coin(rng)) k |= j;
  for (std::size_t q = 0; q < n; ++q) {
    if (q == a || q == b) continue;
    if (coin(rng)) k |= std::uint64_t{1} << q;
  }
  return {j, k};
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> sample_w_state(std::size_t n, Rng& rng) {
  check_w_args(n, 0, 0);
  std::vector<double> q = w_weight_distribution_real(n);
  return sample_w_with(n, AliasTable(q), rng);
}

WStateSampler::WStateSampler(std::size_t num_qubits)
    : num_qubits_(num_qubits), weight_table_(w_weight_distribution_real(num_qubits)) {}

PauliDraw WStateSampler::sample(Rng& rng) const {
  auto [j, k] = sample_w_with(num_qubits_, weight_table_, rng);
  PauliOp p(num_qubits_, j, k);
  return {p, chi(p)};
}

double WStateSampler::chi(const PauliOp& p) const {
  if (p.num_qubits() != num_qubits_) {
    throw std::invalid_argument("Pauli width does not match sampler");
  }
  const double nd = static_cast<double>(num_qubits_);
  const double inv_sqrt_d = std::sqrt(std::ldexp(1.0, -static_cast<int>(num_qubits_)));
  const std::uint64_t j = p.x_bits();
  const std::uint64_t k = p.z_bits();
  double expectation = 0.0;
  if (j == 0) {
    expectation = (nd - 2.0 * std::popcount(k)) / nd;
  } else if (std::popcount(j) == 2 && std::popcount(j & k) % 2 == 0) {
    expectation = 2.0 / nd;
  }
  return p.sign() * expectation * inv_sqrt_d;
}

// ---------------------------------------------------------------------------

TruncatedTarget truncate(const PureState& state, double beta, std::size_t dense_cap) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("truncation beta must lie in (0, 1)");
  }
  TruncatedTarget t;
  t.num_qubits = state.num_qubits();
  t.beta = beta;
  t.bias_cap = 2.0 * beta;
  t.chi_source = char_fn_full(state, dense_cap);
  const double threshold = beta / static_cast<double>(state.dimension());
  t.chi_truncated.resize(t.chi_source.size());
  double norm2 = 0.0;
  for (std::size_t k = 0; k < t.chi_source.size(); ++k) {
    const double c = t.chi_source[k];
    if (std::abs(c) >= threshold) {
      t.chi_truncated[k] = c;
      norm2 += c * c;
      ++t.retained;
    }
  }
  if (t.retained == 0 || norm2 == 0.0) {
    throw std::invalid_argument("truncation threshold removes every Pauli");
  }
  t.truncated_norm = std::sqrt(norm2);
  t.chi_surrogate.resize(t.chi_source.size());
  double bias2 = 0.0;
  for (std::size_t k = 0; k < t.chi_source.size(); ++k) {
    t.chi_surrogate[k] = t.chi_truncated[k] / t.truncated_norm;
    const double diff = t.chi_surrogate[k] - t.chi_source[k];
    bias2 += diff * diff;
  }
  t.bias_bound = std::sqrt(bias2);
  return t;
}

ExhaustiveSampler build_truncated(const TruncatedTarget& target) {
  return ExhaustiveSampler(target.num_qubits, target.chi_surrogate, SamplerMode::truncated);
}

}  // namespace dfe
