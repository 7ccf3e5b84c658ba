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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dfe/channel_dfe.h"
#include "dfe/characteristic.h"
#include "dfe/clifford.h"
#include "dfe/dfe_engine.h"
#include "dfe/harness.h"
#include "dfe/importance_sampler.h"
#include "oracles.h"
#include "stats.h"

namespace {

using namespace dfe;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* format, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

oracle::Matrix dense_chi_matrix(const std::vector<double>& chi, std::size_t n) {
  const double sqrt_d = std::sqrt(std::ldexp(1.0, static_cast<int>(n)));
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  oracle::Matrix m = oracle::Matrix::Zero(d, d);
  for (std::uint64_t k = 0; k < chi.size(); ++k) {
    if (chi[k] != 0.0) m += chi[k] / sqrt_d * oracle::pauli_index(n, k);
  }
  return m;
}

Verdict fig1_reproduction() {
  Verdict v;
  ExperimentSpec spec;
  spec.kind = ExperimentKind::fig1;
  spec.num_qubits = 8;
  spec.trials = 200;
  spec.noise = "depolarize-local:0.1";
  spec.config.epsilon = 0.05;
  spec.config.delta = 0.05;
  spec.config.seed = 1;
  const auto start = Clock::now();
  const Fig1Result r = run_fig1(spec);
  const double elapsed = seconds_since(start);
  const double std = r.summary.at("residual").at("std").get<double>();
  const double above = r.summary.at("copies").at("fraction_above_4x_bound").get<double>();
  v.require(settings_count(spec.config) == 8000, "l = 8000");
  v.require(std >= 0.013 && std <= 0.023, "residual std in [1.3%, 2.3%]");
  v.require(above <= 0.025, "fraction of trials above 4 E(m) <= 2.5%");
  v.require(elapsed <= 1800, "runtime <= 30 min");
  v.note("200 trials, n=8, residual std " + fmt("%.4f", std) + ", above-4x fraction " + fmt("%.3f", above) +
         ", " + fmt("%.1f s", elapsed));
  return v;
}

Verdict calibration() {
  Verdict v;
  ExperimentSpec spec;
  spec.kind = ExperimentKind::calibration;
  spec.target = "mixed";
  spec.num_qubits = 3;
  spec.trials = 1200;
  spec.noise = "dephase:0.2";
  spec.config.epsilon = 0.1;
  spec.config.delta = 0.1;
  spec.config.seed = 2;
  const auto start = Clock::now();
  const nlohmann::json r = run_calibration(spec);
  const double elapsed = seconds_since(start);
  const double allowed = r.at("allowed_rate").get<double>();
  const double r1 = r.at("stage1").at("rate").get<double>();
  const double r2 = r.at("stage2").at("rate").get<double>();
  v.require(r1 <= allowed, "stage-1 failure rate within delta + 3 sigma");
  v.require(r2 <= allowed, "stage-2 failure rate within delta + 3 sigma");
  v.require(elapsed <= 300, "runtime <= 5 min");
  v.note("1200 trials over ghz/w/haar n=3, eps=delta=0.1, rates " + fmt("%.4f", r1) + " and " + fmt("%.4f", r2) +
         " vs allowed " + fmt("%.4f", allowed) + ", " + fmt("%.1f s", elapsed));
  return v;
}

Verdict exact_identities() {
  Verdict v;
  std::mt19937_64 gen(3);
  double worst_overlap = 0, worst_var = 0, worst_channel = 0, worst_eigen = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int t = 0; t < 5; ++t) {
      const std::vector<oracle::Complex> amps = oracle::random_amplitudes(n, gen);
      const oracle::Matrix rho = oracle::projector(amps);
      const oracle::Matrix sigma = oracle::random_density(n, 1 + t % 3, gen);
      const PureState psi{std::vector<Complex>(amps.begin(), amps.end())};
      const std::vector<double> chi_rho = char_fn_full(psi);
      const std::vector<double> chi_sigma = char_fn_full(DensityMatrix(sigma));
      const double f = (rho * sigma).trace().real();
      worst_overlap = std::max(worst_overlap, std::abs(char_overlap(chi_rho, chi_sigma) - f));
      const EstimatorMoments m = exact_estimator_moments(chi_rho, chi_sigma);
      const double var = (sigma * sigma).trace().real() - f * f;
      worst_var = std::max(worst_var, std::abs(m.variance() - var));
    }
  }
  for (int t = 0; t < 5; ++t) {
    const std::size_t n = 2;
    const oracle::Matrix u = oracle::random_unitary(n, gen);
    const oracle::Matrix w = oracle::random_unitary(n, gen);
    const double q = 0.1 + 0.2 * t;
    std::vector<Matrix> kraus = {std::sqrt(1 - q) * oracle::on_qubit(n, 0, oracle::hadamard()) * u,
                                 std::sqrt(q) * w};
    const ChannelModel target = ChannelModel::unitary(u);
    const ChannelModel actual = ChannelModel::kraus(kraus);
    double mean = 0;
    for (std::uint64_t k = 0; k < 16; ++k) {
      for (std::uint64_t kp = 0; kp < 16; ++kp) {
        const PauliOp out = PauliOp::from_index(n, k);
        const PauliOp in = PauliOp::from_index(n, kp);
        const double cu = target.char_fn(out, in);
        if (std::abs(cu) < kChiZeroTolerance) continue;
        mean += cu * cu / 16.0 * (actual.char_fn(out, in) / cu);
      }
    }
    double expected = 0;
    for (const auto& k : kraus) expected += std::norm((u.adjoint() * k).trace());
    expected /= 16.0;
    worst_channel = std::max(worst_channel, std::abs(mean - expected));
  }
  for (std::size_t n = 1; n <= 3; ++n) {
    const std::size_t d = std::size_t{1} << n;
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << (2 * n)); ++k) {
      oracle::Matrix sum = oracle::Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      const PauliOp w = PauliOp::from_index(n, k);
      for (std::uint64_t a = 0; a < d; ++a) {
        const EigenbasisElement e = eigenbasis_product_state(w, a);
        const PureState phi = e.state.statevector();
        sum += e.eigenvalue * oracle::projector(phi.amplitudes());
      }
      const oracle::Matrix diff = sum / static_cast<double>(d) - oracle::pauli_index(n, k) / static_cast<double>(d);
      worst_eigen = std::max(worst_eigen, diff.cwiseAbs().maxCoeff());
    }
  }
  v.require(worst_overlap <= 1e-9, "overlap identity within 1e-9");
  v.require(worst_var <= 1e-9, "estimator variance identity within 1e-9");
  v.require(worst_channel <= 1e-9, "channel estimator mean within 1e-9");
  v.require(worst_eigen <= 1e-10, "eigenbasis reconstruction within 1e-10");
  v.note("max deviations: overlap " + fmt("%.1e", worst_overlap) + ", variance " + fmt("%.1e", worst_var) +
         ", channel mean " + fmt("%.1e", worst_channel) + ", eigenbasis " + fmt("%.1e", worst_eigen));
  return v;
}

Verdict w_sampler() {
  Verdict v;
  double worst_p = 1, worst_dense = 0;
  for (std::size_t n = 2; n <= 4; ++n) {
    const std::uint64_t d = std::uint64_t{1} << n;
    std::vector<double> probs(d * d);
    for (std::uint64_t j = 0; j < d; ++j) {
      for (std::uint64_t k = 0; k < d; ++k) probs[j * d + k] = w_state_prob_real(n, j, k);
    }
    std::vector<std::uint64_t> counts(d * d, 0);
    Rng rng(derive_seed(4, n));
    const std::uint64_t draws = 1'000'000;
    for (std::uint64_t i = 0; i < draws; ++i) {
      const auto [j, k] = sample_w_state(n, rng);
      ++counts[j * d + k];
    }
    worst_p = std::min(worst_p, stats::chi_squared_p_value(probs, counts, draws));

    std::vector<oracle::Complex> amps(d, 0.0);
    for (std::size_t q = 0; q < n; ++q) amps[std::size_t{1} << q] = 1.0 / std::sqrt(static_cast<double>(n));
    const oracle::Matrix rho = oracle::projector(amps);
    for (std::uint64_t j = 0; j < d; ++j) {
      for (std::uint64_t k = 0; k < d; ++k) {
        const double e = oracle::expectation(rho, oracle::pauli_bits(n, j, k));
        worst_dense = std::max(worst_dense, std::abs(probs[j * d + k] - e * e / static_cast<double>(d)));
      }
    }
  }
  bool exact = true;
  for (std::size_t n = 2; n <= 8; ++n) {
    const std::uint64_t d = std::uint64_t{1} << n;
    Rational total(0);
    for (std::uint64_t j = 0; j < d; ++j) {
      for (std::uint64_t k = 0; k < d; ++k) total += w_state_prob(n, j, k);
    }
    exact = exact && total == Rational(1);
  }
  v.require(worst_p > 0.001, "goodness of fit p > 0.001 for n = 2, 3, 4");
  v.require(worst_dense <= 1e-10, "closed form equals dense chi^2 within 1e-10");
  v.require(exact, "rational sum equals 1 for 2 <= n <= 8");
  v.note("min p-value " + fmt("%.4f", worst_p) + " at 1e6 draws, dense deviation " + fmt("%.1e", worst_dense) +
         ", rational sums exact for 2 <= n <= 8");
  return v;
}

StabilizerTableau circuit_state(const CliffordCircuit& c) {
  std::vector<PauliOp> gens;
  for (std::size_t q = 0; q < c.num_qubits(); ++q) gens.push_back(c.propagate(PauliOp::single(c.num_qubits(), q, Pauli::Z)));
  return StabilizerTableau(std::move(gens));
}

template <class Draw>
double microseconds_per_draw(Draw draw, int count) {
  const auto start = Clock::now();
  for (int i = 0; i < count; ++i) draw();
  return seconds_since(start) * 1e6 / count;
}

Verdict scale_independence() {
  Verdict v;
  DfeConfig cfg;
  cfg.regime = Regime::well_conditioned;
  cfg.alpha = 1.0;
  cfg.record_settings = true;
  const std::uint64_t l = settings_count(cfg);
  const double state_bound = well_conditioned_copy_bound(1.0, l, cfg.epsilon, cfg.delta);
  const double channel_bound = well_conditioned_use_bound(1.0, l, cfg.epsilon, cfg.delta);
  std::string totals;
  for (std::size_t n : {4, 8, 12}) {
    Rng rng(derive_seed(5, n));
    const CliffordCircuit c = CliffordCircuit::random(n, 50, rng);
    std::vector<std::pair<std::string, StabilizerTableau>> targets = {{"ghz", make_ghz(n)}, {"circuit", circuit_state(c)}};
    for (const auto& [name, tab] : targets) {
      const StabilizerSampler sampler(tab);
      cfg.seed = derive_seed(6, n);
      const DfeResult r = estimate_fidelity(sampler, with_noise(tab, PauliNoise::global_depolarizing(0.1)), cfg);
      bool each = true;
      for (const auto& rec : r.records) each = each && static_cast<double>(rec.copies) <= state_bound;
      v.require(each && static_cast<double>(r.total_copies) <= static_cast<double>(l) * state_bound,
                name + " state n=" + std::to_string(n) + " within bound");
      totals += " " + name + std::to_string(n) + "=" + std::to_string(r.total_copies);
    }
    const ChannelModel target = ChannelModel::clifford(c);
    const ChannelDfeResult r =
        estimate_entanglement_fidelity(target, target.followed_by(PauliNoise::global_depolarizing(0.1)), cfg);
    bool each = true;
    for (const auto& rec : r.records) each = each && static_cast<double>(rec.uses) <= channel_bound;
    v.require(each && static_cast<double>(r.total_uses) <= static_cast<double>(l) * channel_bound,
              "clifford channel n=" + std::to_string(n) + " within bound");
    totals += " channel" + std::to_string(n) + "=" + std::to_string(r.total_uses);
  }

  Rng rng(7);
  const StabilizerSampler ghz(make_ghz(50));
  const CliffordCircuit c50 = CliffordCircuit::random(50, 50, rng);
  const StabilizerSampler circuit(circuit_state(c50));
  const CliffordPairSampler pairs(c50);
  volatile double sink = 0;
  const double t_ghz = microseconds_per_draw([&] { sink = sink + ghz.sample(rng).chi; }, 20000);
  const double t_circuit = microseconds_per_draw([&] { sink = sink + circuit.sample(rng).chi; }, 20000);
  const double t_pairs = microseconds_per_draw([&] { sink = sink + pairs.sample(rng).chi; }, 20000);
  v.require(t_ghz < 1000 && t_circuit < 1000 && t_pairs < 1000, "draw cost < 1 ms at n = 50");
  v.note("l=" + std::to_string(l) + ", per-setting bounds " + fmt("%.3f", state_bound) + " (state) and " +
         fmt("%.3f", channel_bound) + " (channel), totals" + totals + "; n=50 draws " + fmt("%.2f", t_ghz) + "/" +
         fmt("%.2f", t_circuit) + "/" + fmt("%.2f us", t_pairs));
  return v;
}

Verdict clifford_oracle() {
  Verdict v;
  std::mt19937_64 gen(8);
  int mismatches = 0;
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const CliffordCircuit c = CliffordCircuit::random(3, 1 + t % 20, gen);
    const oracle::Matrix u = oracle::circuit_unitary(c);
    for (std::uint64_t k = 0; k < 64; ++k) {
      const oracle::Matrix conj = u * oracle::pauli_index(3, k) * u.adjoint();
      const PauliOp image = c.propagate(PauliOp::from_index(3, k));
      const oracle::Matrix mine = image.sign() * oracle::pauli_bits(3, image.x_bits(), image.z_bits());
      const double dev = (conj - mine).cwiseAbs().maxCoeff();
      worst = std::max(worst, dev);
      if (dev > 1e-12) ++mismatches;
    }
  }
  v.require(mismatches == 0, "every conjugation matches with sign");
  v.note("6400 cases, " + std::to_string(mismatches) + " mismatches, max deviation " + fmt("%.1e", worst));
  return v;
}

Verdict truncation() {
  Verdict v;
  const std::size_t n = 3;
  const double d = 8;
  double worst_slack = -1, worst_oracle = 0;
  bool keep_rule = true, copies_ok = true;
  int runs = 0;
  for (int s = 0; s < 50; ++s) {
    const PureState psi = make_haar_random(n, derive_seed(9, s));
    const oracle::Matrix rho = oracle::projector(std::vector<oracle::Complex>(psi.amplitudes().begin(), psi.amplitudes().end()));
    for (double beta : {0.1, 0.3, 0.5}) {
      const TruncatedTarget tt = truncate(psi, beta);
      const double bias = (dense_chi_matrix(tt.chi_surrogate, n) - rho).norm();
      worst_oracle = std::max(worst_oracle, std::abs(bias - tt.bias_bound));
      worst_slack = std::max(worst_slack, bias - 2 * beta);
      for (double c : tt.chi_truncated) keep_rule = keep_rule && (c == 0.0 || std::abs(c) >= beta / d);
      for (double c : tt.chi_surrogate) keep_rule = keep_rule && (c == 0.0 || std::abs(c) >= beta / d);

      DfeConfig cfg;
      cfg.regime = Regime::truncated;
      cfg.beta = beta;
      cfg.seed = derive_seed(10, s, static_cast<std::uint64_t>(beta * 10));
      const ExhaustiveSampler sampler = build_truncated(tt);
      const DfeResult r = estimate_fidelity(sampler, with_noise(psi, PauliNoise::local_depolarizing(0.05)), cfg);
      const double bound = truncated_copy_bound(beta, d, r.settings, cfg.epsilon, cfg.delta);
      for (const auto& rec : r.records) copies_ok = copies_ok && static_cast<double>(rec.copies) <= bound;
      ++runs;
    }
  }
  v.require(worst_slack <= 0, "bias <= 2 beta");
  v.require(worst_oracle <= 1e-10, "reported bias matches dense reconstruction");
  v.require(keep_rule, "every retained |chi| >= beta/d");
  v.require(copies_ok, "every m_i within the certainty bound");
  v.note(std::to_string(runs) + " state/beta pairs, max (bias - 2 beta) " + fmt("%.3f", worst_slack) +
         ", bias oracle deviation " + fmt("%.1e", worst_oracle));
  return v;
}

Verdict channel_end_to_end() {
  Verdict v;
  const std::size_t n = 10;
  const double p = 0.1;
  const double d = 1024;
  Rng rng(11);
  const ChannelModel target = ChannelModel::clifford(CliffordCircuit::random(n, 50, rng));
  const ChannelModel actual = target.followed_by(PauliNoise::global_depolarizing(p));
  const double truth = (1 - p) + p / (d * d);
  DfeConfig cfg;
  cfg.record_settings = false;
  int inside = 0;
  double worst_avg = 0;
  const int runs = 100;
  const auto start = Clock::now();
  for (int i = 0; i < runs; ++i) {
    cfg.seed = derive_seed(12, i);
    const ChannelDfeResult r = estimate_entanglement_fidelity(target, actual, cfg);
    if (std::abs(r.entanglement_fidelity - truth) <= 2 * cfg.epsilon) ++inside;
    worst_avg = std::max(worst_avg, std::abs(r.average_fidelity - (d * r.entanglement_fidelity + 1) / (d + 1)));
  }
  const double exact = entanglement_fidelity_clifford(target, actual);
  const double exact_avg = avg_fidelity_from_entanglement(exact, d);
  worst_avg = std::max(worst_avg, std::abs(exact_avg - (d * truth + 1) / (d + 1)));
  v.require(inside >= static_cast<int>(std::ceil((1 - 2 * cfg.delta) * runs)), "estimate within 2 eps in >= 90% of runs");
  v.require(std::abs(exact - truth) <= 1e-12, "closed-form F_e");
  v.require(worst_avg <= 1e-12, "average fidelity relation within 1e-12");
  v.note(std::to_string(inside) + "/100 runs within 2 eps of " + fmt("%.7f", truth) + ", avg relation deviation " +
         fmt("%.1e", worst_avg) + ", " + fmt("%.1f s", seconds_since(start)));
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "fig1 residual spread", fig1_reproduction},
      {2, "guarantee calibration", calibration},
      {3, "exact identities", exact_identities},
      {4, "W-state sampler", w_sampler},
      {5, "stabilizer and Clifford scale independence", scale_independence},
      {6, "Clifford propagation oracle", clifford_oracle},
      {7, "truncation", truncation},
      {8, "channel end-to-end", channel_end_to_end},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failed;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
