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

#include "dfe/channel_dfe.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dfe/characteristic.h"
#include "dfe/measurement.h"

namespace dfe {

namespace {

std::uint64_t low_mask(std::size_t n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

void check_dense_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw std::length_error("dense channel path requested for " + std::to_string(n) + " qubits; cap is " +
                            std::to_string(cap));
  }
}

std::size_t qubits_of(const Matrix& m) {
  const auto dim = static_cast<std::size_t>(m.rows());
  if (m.rows() != m.cols() || dim == 0 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("channel matrices must be square with power-of-two dimension");
  }
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

std::vector<Matrix> noise_kraus(const PauliNoise& noise, std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  const double p = noise.probability;
  std::vector<Matrix> ops;
  switch (noise.kind) {
    case PauliNoise::Kind::none:
      ops.push_back(Matrix::Identity(dim, dim));
      break;
    case PauliNoise::Kind::global_depolarizing: {
      // (1-p) rho + p I/d = (1-p) rho + (p/d^2) sum_P P rho P
      const double d2 = static_cast<double>(dim) * static_cast<double>(dim);
      const std::uint64_t count = std::uint64_t{1} << (2 * n);
      for (std::uint64_t k = 0; k < count; ++k) {
        const double weight = k == 0 ? 1.0 - p + p / d2 : p / d2;
        if (weight > 0) ops.push_back(std::sqrt(weight) * dense_matrix(PauliOp::from_index(n, k)));
      }
      break;
    }
    case PauliNoise::Kind::local_depolarizing: {
      const std::uint64_t count = std::uint64_t{1} << (2 * n);
      for (std::uint64_t k = 0; k < count; ++k) {
        PauliOp w = PauliOp::from_index(n, k);
        const double weight = std::pow(1.0 - p, static_cast<double>(n - w.weight())) *
                              std::pow(p / 3.0, static_cast<double>(w.weight()));
        if (weight > 0) ops.push_back(std::sqrt(weight) * dense_matrix(w));
      }
      break;
    }
    case PauliNoise::Kind::dephasing: {
      for (std::uint64_t z = 0; z < (std::uint64_t{1} << n); ++z) {
        PauliOp w(n, 0, z);
        const double flips = static_cast<double>(w.weight());
        const double weight = std::pow(1.0 - p / 2.0, static_cast<double>(n) - flips) * std::pow(p / 2.0, flips);
        if (weight > 0) ops.push_back(std::sqrt(weight) * dense_matrix(w));
      }
      break;
    }
  }
  return ops;
}

}  // namespace

// ---------------------------------------------------------------------------
// Eigenbases

StabilizerTableau ProductEigenstate::tableau() const {
  const std::size_t n = num_qubits();
  std::vector<PauliOp> gens;
  gens.reserve(n);
  for (std::size_t q = 0; q < n; ++q) {
    PauliOp g = PauliOp::single(n, q, axes.factor(q));
    gens.push_back((minus >> q) & 1 ? g.negated() : g);
  }
  return StabilizerTableau(std::move(gens));
}

PureState ProductEigenstate::statevector() const {
  const std::size_t n = num_qubits();
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Complex> amps{1.0};
  for (std::size_t q = 0; q < n; ++q) {
    const bool neg = (minus >> q) & 1;
    Complex zero_amp;
    Complex one_amp;
    switch (axes.factor(q)) {
      case Pauli::X:
        zero_amp = r;
        one_amp = neg ? -r : r;
        break;
      case Pauli::Y:
        zero_amp = r;
        one_amp = neg ? Complex(0, -r) : Complex(0, r);
        break;
      default:
        zero_amp = neg ? 0.0 : 1.0;
        one_amp = neg ? 1.0 : 0.0;
        break;
    }
    // qubit q becomes bit q: new index = old + (bit << q)
    std::vector<Complex> next(amps.size() * 2);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      next[i] = amps[i] * zero_amp;
      next[i + amps.size()] = amps[i] * one_amp;
    }
    amps.swap(next);
  }
  return PureState(std::move(amps));
}

EigenbasisElement eigenbasis_product_state(const PauliOp& w, std::uint64_t a) {
  const std::size_t n = w.num_qubits();
  if (a & ~low_mask(n)) {
    throw std::out_of_range("eigenbasis index out of range");
  }
  const std::uint64_t support = w.x_bits() | w.z_bits();
  const std::uint64_t z = w.z_bits() | (~support & low_mask(n));
  EigenbasisElement e{{PauliOp(n, w.x_bits(), z), a}, w.sign()};
  if (std::popcount(a & support) % 2 == 1) e.eigenvalue = -e.eigenvalue;
  return e;
}

// ---------------------------------------------------------------------------
// ChannelModel

ChannelModel::ChannelModel(std::size_t n, Core core, PauliNoise noise)
    : num_qubits_(n), core_(std::move(core)), noise_(noise) {}

ChannelModel ChannelModel::unitary(Matrix u) {
  const std::size_t n = qubits_of(u);
  const auto dim = u.rows();
  if ((u.adjoint() * u - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("matrix is not unitary");
  }
  return ChannelModel(n, DenseUnitary{std::move(u)}, PauliNoise::none());
}

ChannelModel ChannelModel::clifford(CliffordCircuit circuit) {
  const std::size_t n = circuit.num_qubits();
  return ChannelModel(n, std::move(circuit), PauliNoise::none());
}

ChannelModel ChannelModel::identity(std::size_t num_qubits) { return clifford(CliffordCircuit(num_qubits)); }

ChannelModel ChannelModel::kraus(std::vector<Matrix> ops) {
  if (ops.empty()) throw std::invalid_argument("Kraus list is empty");
  const std::size_t n = qubits_of(ops.front());
  const auto dim = ops.front().rows();
  Matrix total = Matrix::Zero(dim, dim);
  for (const Matrix& k : ops) {
    if (k.rows() != dim || k.cols() != dim) throw std::invalid_argument("Kraus operators differ in size");
    total += k.adjoint() * k;
  }
  if ((total - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("Kraus operators are not trace preserving");
  }
  return ChannelModel(n, KrausList{std::move(ops)}, PauliNoise::none());
}

ChannelModel ChannelModel::fully_depolarizing(std::size_t num_qubits) {
  return identity(num_qubits).followed_by(PauliNoise::global_depolarizing(1.0));
}

ChannelModel ChannelModel::followed_by(PauliNoise noise) const { return ChannelModel(num_qubits_, core_, noise); }

bool ChannelModel::is_unitary() const {
  const bool noiseless = noise_.kind == PauliNoise::Kind::none || noise_.probability == 0.0;
  return noiseless && !std::holds_alternative<KrausList>(core_);
}

Matrix ChannelModel::unitary_matrix() const {
  if (const auto* u = std::get_if<DenseUnitary>(&core_)) return u->u;
  if (const auto* c = std::get_if<CliffordCircuit>(&core_)) return c->to_unitary();
  throw std::invalid_argument("Kraus channel has no unitary matrix");
}

Matrix ChannelModel::apply(const Matrix& a) const {
  if (static_cast<std::size_t>(a.rows()) != (std::size_t{1} << num_qubits_) || a.rows() != a.cols()) {
    throw std::invalid_argument("matrix dimension does not match channel");
  }
  Matrix out;
  if (const auto* kl = std::get_if<KrausList>(&core_)) {
    out = Matrix::Zero(a.rows(), a.cols());
    for (const Matrix& k : kl->ops) out += k * a * k.adjoint();
  } else {
    Matrix u = unitary_matrix();
    out = u * a * u.adjoint();
  }
  return noise_.apply(out);
}

double ChannelModel::output_expectation(const ProductEigenstate& input, const PauliOp& measured) const {
  if (input.num_qubits() != num_qubits_ || measured.num_qubits() != num_qubits_) {
    throw std::invalid_argument("channel width mismatch");
  }
  if (const auto* circuit = std::get_if<CliffordCircuit>(&core_)) {
    StabilizerTableau in = input.tableau();
    std::vector<PauliOp> gens;
    gens.reserve(num_qubits_);
    for (const PauliOp& g : in.generators()) gens.push_back(circuit->propagate(g));
    return noise_.attenuation(measured) * StabilizerTableau(std::move(gens)).expectation(measured);
  }
  const PureState phi = input.statevector();
  if (const auto* u = std::get_if<DenseUnitary>(&core_)) {
    Eigen::Map<const Vector> v(phi.amplitudes().data(), static_cast<Eigen::Index>(phi.dimension()));
    Vector out = u->u * v;
    std::span<const Complex> amps(out.data(), static_cast<std::size_t>(out.size()));
    return noise_.attenuation(measured) * pauli_expectation(amps, measured);
  }
  Matrix rho = apply(DensityMatrix::from_pure(phi).matrix());
  return pauli_expectation(rho, measured);
}

double ChannelModel::char_fn(const PauliOp& out, const PauliOp& in) const {
  if (out.num_qubits() != num_qubits_ || in.num_qubits() != num_qubits_) {
    throw std::invalid_argument("channel width mismatch");
  }
  if (const auto* circuit = std::get_if<CliffordCircuit>(&core_)) {
    PauliOp image = circuit->propagate(in);
    if (!image.same_support(out)) return 0.0;
    return noise_.attenuation(out) * static_cast<double>(image.sign() * out.sign());
  }
  const double d = std::ldexp(1.0, static_cast<int>(num_qubits_));
  return pauli_trace(apply(dense_matrix(in)), out).real() / d;
}

std::vector<Matrix> ChannelModel::to_kraus(std::size_t dense_cap) const {
  check_dense_cap(num_qubits_, dense_cap);
  std::vector<Matrix> core_ops;
  if (const auto* kl = std::get_if<KrausList>(&core_)) {
    core_ops = kl->ops;
  } else {
    core_ops.push_back(unitary_matrix());
  }
  std::vector<Matrix> out;
  for (const Matrix& n_op : noise_kraus(noise_, num_qubits_)) {
    for (const Matrix& c_op : core_ops) out.push_back(n_op * c_op);
  }
  return out;
}

std::string ChannelModel::describe() const {
  std::ostringstream out;
  if (const auto* c = std::get_if<CliffordCircuit>(&core_)) {
    out << "clifford(n=" << num_qubits_ << ", gates=" << c->gates().size() << ")";
  } else if (std::holds_alternative<DenseUnitary>(core_)) {
    out << "unitary(n=" << num_qubits_ << ")";
  } else {
    out << "kraus(n=" << num_qubits_ << ", ops=" << std::get<KrausList>(core_).ops.size() << ")";
  }
  if (noise_.kind != PauliNoise::Kind::none) out << " then " << noise_.describe();
  return out.str();
}

double char_fn_channel(const ChannelModel& channel, std::uint64_t k, std::uint64_t k_prime, std::size_t dense_cap) {
  const std::size_t n = channel.num_qubits();
  if (!channel.clifford_circuit()) check_dense_cap(n, dense_cap);
  return channel.char_fn(PauliOp::from_index(n, k), PauliOp::from_index(n, k_prime));
}

// ---------------------------------------------------------------------------
// Pair samplers

ExhaustivePairSampler::ExhaustivePairSampler(const ChannelModel& target, std::size_t dense_cap)
    : num_qubits_(target.num_qubits()) {
  if (!target.is_unitary()) {
    throw std::invalid_argument("pair sampling needs a unitary target");
  }
  check_dense_cap(num_qubits_, dense_cap);
  const Matrix u = target.unitary_matrix();
  const std::uint64_t paulis = std::uint64_t{1} << (2 * num_qubits_);
  const double d = std::ldexp(1.0, static_cast<int>(num_qubits_));
  chi_.assign(paulis * paulis, 0.0);
  std::vector<double> weights(paulis * paulis, 0.0);
  for (std::uint64_t kp = 0; kp < paulis; ++kp) {
    const Matrix image = u * dense_matrix(PauliOp::from_index(num_qubits_, kp)) * u.adjoint();
    const std::vector<Complex> traces = all_pauli_traces(image);
    for (std::uint64_t k = 0; k < paulis; ++k) {
      const double c = traces[k].real() / d;
      chi_[k * paulis + kp] = c;
      if (std::abs(c) >= kChiZeroTolerance) weights[k * paulis + kp] = c * c / (d * d);
    }
  }
  table_ = AliasTable(weights);
}

PairDraw ExhaustivePairSampler::sample(Rng& rng) const {
  const std::uint64_t paulis = std::uint64_t{1} << (2 * num_qubits_);
  const std::size_t idx = table_.sample(rng);
  return {PauliOp::from_index(num_qubits_, idx / paulis), PauliOp::from_index(num_qubits_, idx % paulis), chi_[idx]};
}

CliffordPairSampler::CliffordPairSampler(CliffordCircuit circuit) : circuit_(std::move(circuit)) {}

PairDraw CliffordPairSampler::sample(Rng& rng) const {
  const std::size_t n = circuit_.num_qubits();
  const std::uint64_t mask = low_mask(n);
  const std::uint64_t x = rng() & mask;
  const std::uint64_t z = rng() & mask;
  PauliOp in(n, x, z);
  PauliOp image = circuit_.propagate(in);
  return {image.unsigned_op(), in, static_cast<double>(image.sign())};
}

std::unique_ptr<PairSampler> make_pair_sampler(const ChannelModel& target, std::size_t dense_cap) {
  if (!target.is_unitary()) {
    throw std::invalid_argument("pair sampling needs a unitary target");
  }
  if (const auto* c = target.clifford_circuit()) return std::make_unique<CliffordPairSampler>(*c);
  return std::make_unique<ExhaustivePairSampler>(target, dense_cap);
}

PairDraw sample_channel_pair(const ChannelModel& target, Rng& rng) { return make_pair_sampler(target)->sample(rng); }

// ---------------------------------------------------------------------------
// Protocol

ChannelDfeResult estimate_entanglement_fidelity(const PairSampler& target, const ChannelModel& actual,
                                                const DfeConfig& config, const ChannelDfeOptions& options) {
  config.validate();
  const std::size_t n = target.num_qubits();
  if (actual.num_qubits() != n) {
    throw std::invalid_argument("target and actual channel widths differ");
  }
  if (!actual.clifford_circuit()) check_dense_cap(n, std::max<std::size_t>(options.dense_cap, 12));
  const double d = std::ldexp(1.0, static_cast<int>(n));
  const std::uint64_t l = settings_count(config);
  const bool absorbed = options.sign_convention == SignConvention::absorbed;

  ChannelDfeResult result;
  result.num_qubits = n;
  result.settings = l;
  result.config = config;
  result.settings_rule = settings_rule(config);
  result.clifford_path = target.is_clifford();
  result.sign_convention = options.sign_convention;
  result.actual_description = actual.describe();

  std::vector<ChannelSettingRecord> records(l);
  Rng pair_rng = derive_rng(config.seed, stream::kSettings);
  std::uint64_t total = 0;
  for (ChannelSettingRecord& r : records) {
    PairDraw draw = target.sample(pair_rng);
    r.out = draw.out;
    r.in = draw.in;
    r.chi_target = absorbed ? std::abs(draw.chi) : draw.chi;
    r.x_ideal = draw.chi;  // signed chi_U, replaced below
    r.uses = copies_for_channel_setting(draw.chi, l, config.epsilon, config.delta);
    if (r.uses > config.max_total_copies - std::min(total, config.max_total_copies)) {
      throw std::length_error("channel-use budget exceeded");
    }
    total += r.uses;
  }

  const std::uint64_t mask = low_mask(n);
  const double l2 = static_cast<double>(l) * static_cast<double>(l);
  double sum_tilde = 0.0;
  double sum_ideal = 0.0;
  double hoeffding = 0.0;
  for (std::uint64_t i = 0; i < l; ++i) {
    ChannelSettingRecord& r = records[i];
    const double chi_signed = r.x_ideal;
    const int relabel = absorbed && chi_signed < 0 ? -1 : 1;
    Rng use_rng = derive_rng(config.seed, stream::kShots, i);
    long long b_sum = 0;
    if (options.log_prepared_states) r.prepared.reserve(r.uses);
    for (std::uint64_t j = 0; j < r.uses; ++j) {
      const std::uint64_t a = use_rng() & mask;
      EigenbasisElement element = eigenbasis_product_state(r.in, a);
      const double e = actual.output_expectation(element.state, r.out);
      // Measuring -W is the W measurement with its outcome labels swapped.
      const int outcome = relabel * shot_from_expectation(e, use_rng);
      b_sum += element.eigenvalue * outcome;
      if (options.log_prepared_states) r.prepared.push_back(a);
    }
    r.b_sum = b_sum;
    r.x_tilde = static_cast<double>(b_sum) / (r.chi_target * static_cast<double>(r.uses));
    r.chi_true = actual.char_fn(r.out, r.in);
    r.x_ideal = r.chi_true / chi_signed;
    sum_tilde += r.x_tilde;
    sum_ideal += r.x_ideal;
    hoeffding += 4.0 / (l2 * chi_signed * chi_signed * static_cast<double>(r.uses));
    result.max_uses_per_setting = std::max(result.max_uses_per_setting, r.uses);
  }

  result.total_uses = total;
  result.entanglement_fidelity = sum_tilde / static_cast<double>(l);
  result.ideal_estimate = sum_ideal / static_cast<double>(l);
  result.average_fidelity = (d * result.entanglement_fidelity + 1.0) / (d + 1.0);
  result.interval_low = result.entanglement_fidelity - 2.0 * config.epsilon;
  result.interval_high = result.entanglement_fidelity + 2.0 * config.epsilon;
  result.confidence = 1.0 - 2.0 * config.delta;
  result.expected_uses_bound = static_cast<double>(l) + (4.0 * d * d / (config.epsilon * config.epsilon)) *
                                                            std::log(4.0 / config.delta);
  result.hoeffding_constant = hoeffding;
  if (config.record_settings) result.records = std::move(records);
  return result;
}

ChannelDfeResult estimate_entanglement_fidelity(const ChannelModel& target, const ChannelModel& actual,
                                                const DfeConfig& config, const ChannelDfeOptions& options) {
  auto sampler = make_pair_sampler(target, options.dense_cap);
  ChannelDfeResult result = estimate_entanglement_fidelity(*sampler, actual, config, options);
  result.target_description = target.describe();
  return result;
}

double avg_fidelity_from_entanglement(double entanglement_fidelity, double dimension) {
  if (entanglement_fidelity < -1e-9 || entanglement_fidelity > 1.0 + 1e-9) {
    throw std::invalid_argument("entanglement fidelity outside [0, 1]");
  }
  if (!(dimension >= 1.0)) throw std::invalid_argument("dimension must be >= 1");
  return (dimension * entanglement_fidelity + 1.0) / (dimension + 1.0);
}

double expected_channel_uses_bound(double epsilon, double delta, double dimension) {
  const double eps2 = epsilon * epsilon;
  return 1.0 + 1.0 / (eps2 * delta) + (4.0 * dimension * dimension / eps2) * std::log(4.0 / delta);
}

double well_conditioned_use_bound(double alpha, std::uint64_t settings, double epsilon, double delta) {
  return 1.0 + 4.0 * std::log(4.0 / delta) / (alpha * alpha * static_cast<double>(settings) * epsilon * epsilon);
}

double entanglement_fidelity_kraus(const ChannelModel& target, const ChannelModel& actual, std::size_t dense_cap) {
  if (!target.is_unitary()) throw std::invalid_argument("target must be unitary");
  if (target.num_qubits() != actual.num_qubits()) throw std::invalid_argument("channel widths differ");
  check_dense_cap(target.num_qubits(), dense_cap);
  const Matrix u_dag = target.unitary_matrix().adjoint();
  const double d = std::ldexp(1.0, static_cast<int>(target.num_qubits()));
  double total = 0.0;
  for (const Matrix& k : actual.to_kraus(dense_cap)) total += std::norm((u_dag * k).trace());
  return total / (d * d);
}

double entanglement_fidelity_clifford(const ChannelModel& target, const ChannelModel& actual) {
  const CliffordCircuit* t = target.clifford_circuit();
  const CliffordCircuit* a = actual.clifford_circuit();
  if (!t || !a || t->num_qubits() != a->num_qubits() || t->gates() != a->gates() || !target.is_unitary()) {
    throw std::invalid_argument("closed form needs a unitary Clifford target and the same circuit in actual");
  }
  const double d = std::ldexp(1.0, static_cast<int>(t->num_qubits()));
  switch (actual.noise().kind) {
    case PauliNoise::Kind::none:
      return 1.0;
    case PauliNoise::Kind::global_depolarizing: {
      const double p = actual.noise().probability;
      return (1.0 - p) + p / (d * d);
    }
    default:
      throw std::invalid_argument("closed form only covers global depolarizing noise");
  }
}

nlohmann::json to_json(const ChannelDfeResult& result) {
  nlohmann::json config = to_json(result.config);
  config["copies_rule"] = "m_i = ceil(4 ln(4/delta) / (chi_U^2 l eps^2))";
  nlohmann::json j = {
      {"num_qubits", result.num_qubits},
      {"entanglement_fidelity", result.entanglement_fidelity},
      {"average_fidelity", result.average_fidelity},
      {"ideal_estimate", result.ideal_estimate},
      {"settings", result.settings},
      {"total_uses", result.total_uses},
      {"interval", {result.interval_low, result.interval_high}},
      {"confidence", result.confidence},
      {"expected_uses_bound", result.expected_uses_bound},
      {"hoeffding_constant", result.hoeffding_constant},
      {"max_uses_per_setting", result.max_uses_per_setting},
      {"clifford_path", result.clifford_path},
      {"sign_convention", result.sign_convention == SignConvention::signed_chi ? "signed_chi" : "absorbed"},
      {"target", result.target_description},
      {"actual", result.actual_description},
      {"config", std::move(config)},
  };
  nlohmann::json records = nlohmann::json::array();
  for (const ChannelSettingRecord& r : result.records) {
    nlohmann::json rec = {
        {"out", r.out.str()},     {"in", r.in.str()},         {"chi_target", r.chi_target},
        {"chi_true", r.chi_true}, {"uses", r.uses},           {"b_sum", r.b_sum},
        {"x_tilde", r.x_tilde},   {"x_ideal", r.x_ideal},
    };
    if (!r.prepared.empty()) rec["prepared"] = r.prepared;
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  return j;
}

}  // namespace dfe
