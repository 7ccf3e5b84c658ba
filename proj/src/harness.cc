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

#include "dfe/harness.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "dfe/characteristic.h"
#include "dfe/clifford.h"
#include "dfe/rng.h"

namespace dfe {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::uint64_t parse_uint(const std::string& text, const std::string& what) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError(what + ": expected a non-negative integer, got '" + text + "'");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw UsageError(what + ": integer out of range '" + text + "'");
  }
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError(what + ": expected a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw UsageError(what + ": expected a number, got '" + text + "'");
  return v;
}

std::string format_number(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string shortest(double v) {
  for (int digits = 15; digits < 17; ++digits) {
    const std::string s = format_number(v, digits);
    if (std::stod(s) == v) return s;
  }
  return format_number(v, 17);
}

std::size_t qubit_count(const std::string& text, const std::string& what) {
  const std::uint64_t n = parse_uint(text, what);
  if (n < 1 || n > kMaxQubits) throw UsageError(what + ": qubit count must lie in [1, 64]");
  return static_cast<std::size_t>(n);
}

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample, N-1
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

nlohmann::json to_json(const Summary& s, std::size_t count) {
  return {{"mean", s.mean},
          {"std", s.std},
          {"std_error", count > 0 ? s.std / std::sqrt(static_cast<double>(count)) : 0.0},
          {"min", s.min},
          {"max", s.max}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string family_of(const std::string& target) { return target.substr(0, target.find(':')); }

DfeConfig resolve_alpha(const ExperimentSpec& spec, const StateTarget& target) {
  DfeConfig cfg = spec.config;
  if (cfg.regime == Regime::well_conditioned) cfg.alpha = spec.alpha ? *spec.alpha : target_alpha(target);
  return cfg;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::state_dfe:
      return "state_dfe";
    case ExperimentKind::channel_dfe:
      return "channel_dfe";
    case ExperimentKind::fig1:
      return "fig1";
    case ExperimentKind::sample_dist:
      return "sample_dist";
    case ExperimentKind::calibration:
      return "calibration";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "state") return ExperimentKind::state_dfe;
  if (name == "channel") return ExperimentKind::channel_dfe;
  if (name == "sample-dist") return ExperimentKind::sample_dist;
  if (name == "calibrate") return ExperimentKind::calibration;
  for (ExperimentKind k : {ExperimentKind::state_dfe, ExperimentKind::channel_dfe, ExperimentKind::fig1,
                           ExperimentKind::sample_dist, ExperimentKind::calibration}) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown experiment kind '" + name + "'");
}

ExperimentSpec ExperimentSpec::resolved() const {
  ExperimentSpec s = *this;
  if (s.trials == 0) {
    s.trials = kind == ExperimentKind::fig1 ? 200 : kind == ExperimentKind::calibration ? 1000 : 1;
  }
  if (s.num_qubits == 0) s.num_qubits = kind == ExperimentKind::fig1 ? 8 : 3;
  if (s.noise.empty()) {
    s.noise = kind == ExperimentKind::fig1          ? "depolarize-local:0.1"
              : kind == ExperimentKind::calibration ? "dephase:0.2"
                                                    : "none";
  }
  if (s.target.empty() && kind == ExperimentKind::calibration) s.target = "mixed";
  if (s.target.empty() && kind == ExperimentKind::fig1) s.target = "haar:" + std::to_string(s.num_qubits);
  return s;
}

void ExperimentSpec::validate() const {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (alpha && !(*alpha > 0.0 && *alpha <= 1.0)) throw UsageError("alpha must lie in (0, 1]");
  const ExperimentSpec r = resolved();
  if (r.trials < 1) throw UsageError("trials must be at least 1");
  if (r.target.empty()) throw UsageError("a target is required for " + to_string(kind));
  if (r.num_qubits < 1 || r.num_qubits > kMaxQubits) throw UsageError("n must lie in [1, 64]");
  parse_noise(r.noise);
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("spec must be a JSON object");
  static const std::vector<std::string> known = {"kind",  "target", "noise",  "epsilon", "delta",
                                                 "regime", "alpha", "beta",   "seed",    "settings",
                                                 "trials", "n",     "out",    "sign_convention",
                                                 "log_prepared", "records", "max_total_copies"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw UsageError("unknown spec field '" + key + "'");
  }
  ExperimentSpec s;
  auto has = [&](const char* key) { return j.contains(key) && !j.at(key).is_null(); };
  try {
    if (has("kind")) s.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    if (has("target")) s.target = j.at("target").get<std::string>();
    if (has("noise")) s.noise = j.at("noise").get<std::string>();
    if (has("epsilon")) s.config.epsilon = j.at("epsilon").get<double>();
    if (has("delta")) s.config.delta = j.at("delta").get<double>();
    if (has("regime")) s.config.regime = regime_from_string(j.at("regime").get<std::string>());
    if (has("alpha")) s.alpha = j.at("alpha").get<double>();
    if (has("beta")) s.config.beta = j.at("beta").get<double>();
    if (has("seed")) s.config.seed = j.at("seed").get<std::uint64_t>();
    if (has("settings")) s.config.settings_override = j.at("settings").get<std::uint64_t>();
    if (has("trials")) s.trials = j.at("trials").get<std::uint64_t>();
    if (has("n")) s.num_qubits = j.at("n").get<std::size_t>();
    if (has("out")) s.out = j.at("out").get<std::string>();
    if (has("sign_convention")) {
      const auto c = j.at("sign_convention").get<std::string>();
      if (c == "signed") {
        s.sign_convention = SignConvention::signed_chi;
      } else if (c == "absorbed") {
        s.sign_convention = SignConvention::absorbed;
      } else {
        throw UsageError("sign_convention must be signed or absorbed");
      }
    }
    if (has("log_prepared")) s.log_prepared = j.at("log_prepared").get<bool>();
    if (has("records")) s.config.record_settings = j.at("records").get<bool>();
    if (has("max_total_copies")) s.config.max_total_copies = j.at("max_total_copies").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad spec field: ") + e.what());
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return s;
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json j = {
      {"kind", to_string(spec.kind)},
      {"target", spec.target},
      {"noise", spec.noise},
      {"epsilon", spec.config.epsilon},
      {"delta", spec.config.delta},
      {"regime", to_string(spec.config.regime)},
      {"beta", spec.config.beta},
      {"seed", spec.config.seed},
      {"trials", spec.trials},
      {"n", spec.num_qubits},
      {"out", spec.out},
      {"sign_convention", spec.sign_convention == SignConvention::absorbed ? "absorbed" : "signed"},
      {"log_prepared", spec.log_prepared},
      {"records", spec.config.record_settings},
      {"max_total_copies", spec.config.max_total_copies},
  };
  j["alpha"] = spec.alpha ? nlohmann::json(*spec.alpha) : nlohmann::json(nullptr);
  j["settings"] =
      spec.config.settings_override ? nlohmann::json(*spec.config.settings_override) : nlohmann::json(nullptr);
  return j;
}

PauliNoise parse_noise(const std::string& text) {
  if (text == "none") return PauliNoise::none();
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("noise must be none or kind:p, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const double p = parse_double(text.substr(colon + 1), "noise strength");
  try {
    if (kind == "depolarize") return PauliNoise::global_depolarizing(p);
    if (kind == "depolarize-local") return PauliNoise::local_depolarizing(p);
    if (kind == "dephase") return PauliNoise::dephasing(p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("unknown noise kind '" + kind + "'");
}

std::string noise_to_string(const PauliNoise& noise) {
  const std::string p = shortest(noise.probability);
  switch (noise.kind) {
    case PauliNoise::Kind::none:
      return "none";
    case PauliNoise::Kind::global_depolarizing:
      return "depolarize:" + p;
    case PauliNoise::Kind::local_depolarizing:
      return "depolarize-local:" + p;
    case PauliNoise::Kind::dephasing:
      return "dephase:" + p;
  }
  return "none";
}

StateModel StateTarget::ideal_model() const {
  return std::visit([](const auto& s) -> StateModel { return s; }, ideal);
}

NoisyState StateTarget::noisy(const PauliNoise& noise) const {
  return std::visit([&](const auto& s) { return with_noise(s, noise); }, ideal);
}

StateTarget parse_state_target(const std::string& text, const DfeConfig& config, std::uint64_t master_seed) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw UsageError("empty target");
  const std::string& kind = parts[0];
  StateTarget t;
  t.description = text;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) throw UsageError("malformed target '" + text + "'");
  };
  if (kind == "ghz") {
    need(2, 2);
    StabilizerTableau tab = make_ghz(qubit_count(parts[1], "ghz"));
    t.sampler = std::make_unique<StabilizerSampler>(tab);
    t.ideal = std::move(tab);
  } else if (kind == "w") {
    need(2, 2);
    const std::size_t n = qubit_count(parts[1], "w");
    if (n < 2) throw UsageError("w needs at least 2 qubits");
    t.sampler = std::make_unique<WStateSampler>(n);
    t.ideal = make_w(n);
  } else if (kind == "dicke") {
    need(3, 3);
    const std::size_t n = qubit_count(parts[1], "dicke");
    const std::uint64_t k = parse_uint(parts[2], "dicke excitations");
    if (k > n) throw UsageError("dicke excitations exceed qubit count");
    t.ideal = make_dicke(n, static_cast<std::size_t>(k));
  } else if (kind == "haar") {
    need(2, 3);
    const std::size_t n = qubit_count(parts[1], "haar");
    const std::uint64_t seed =
        parts.size() == 3 ? parse_uint(parts[2], "haar seed") : derive_seed(master_seed, stream::kStates);
    t.ideal = make_haar_random(n, seed);
    t.description = "haar:" + std::to_string(n) + ":" + std::to_string(seed);
  } else if (kind == "file") {
    if (parts.size() < 2) throw UsageError("file target needs a path");
    const std::string path = text.substr(5);
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open target file '" + path + "'");
    nlohmann::json j;
    try {
      in >> j;
      t.ideal = pure_state_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("bad target file '" + path + "': " + e.what());
    }
  } else {
    throw UsageError("unknown state target '" + text + "'");
  }

  const auto* pure = std::get_if<PureState>(&t.ideal);
  if (config.regime == Regime::truncated) {
    if (!pure) throw UsageError("the truncated regime needs a dense pure target");
    t.truncated = truncate(*pure, config.beta);
    t.sampler = std::make_unique<ExhaustiveSampler>(build_truncated(*t.truncated));
  } else if (!t.sampler) {
    t.sampler = std::make_unique<ExhaustiveSampler>(build_exhaustive(*pure));
  }
  return t;
}

ChannelModel parse_channel_target(const std::string& text, std::uint64_t master_seed) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw UsageError("empty target");
  const std::string& kind = parts[0];
  if (kind == "cnot" && parts.size() == 1) return ChannelModel::clifford(CliffordCircuit(2).cnot(0, 1));
  if (kind == "identity" && parts.size() == 2) return ChannelModel::identity(qubit_count(parts[1], "identity"));
  if (kind == "clifford" && parts.size() >= 2) {
    const std::string path = text.substr(9);
    if (!std::filesystem::exists(path)) throw UsageError("cannot open circuit file '" + path + "'");
    try {
      return ChannelModel::clifford(CliffordCircuit::parse_file(path));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("bad circuit file: ") + e.what());
    } catch (const std::out_of_range& e) {
      throw UsageError(std::string("bad circuit file: ") + e.what());
    }
  }
  if (kind == "clifford-random" && (parts.size() == 3 || parts.size() == 4)) {
    const std::size_t n = qubit_count(parts[1], "clifford-random");
    if (n < 2) throw UsageError("clifford-random needs at least 2 qubits");
    const std::uint64_t gates = parse_uint(parts[2], "clifford-random gates");
    const std::uint64_t seed =
        parts.size() == 4 ? parse_uint(parts[3], "clifford-random seed") : derive_seed(master_seed, stream::kStates);
    Rng rng(seed);
    return ChannelModel::clifford(CliffordCircuit::random(n, static_cast<std::size_t>(gates), rng));
  }
  throw UsageError("unknown channel target '" + text + "'");
}

double target_alpha(const StateTarget& target) {
  if (std::holds_alternative<StabilizerTableau>(target.ideal)) return 1.0;
  if (target.sampler->mode() == SamplerMode::w_state) return alpha_of_w_state(target.num_qubits());
  return alpha_of(target.ideal_model());
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DFE_THREADS"); env && *env) {
    const std::uint64_t cap = parse_uint(env, "DFE_THREADS");
    if (cap < 1) throw UsageError("DFE_THREADS must be at least 1");
    workers = static_cast<std::size_t>(std::min<std::uint64_t>(cap, 1024));
  }
  return std::max<std::size_t>(1, std::min(workers, jobs));
}

Histogram::Histogram(double lo, double hi, std::size_t bins) : lo_(lo), hi_(hi), counts_(bins, 0) {
  if (!(hi > lo) || bins == 0) throw std::invalid_argument("histogram needs lo < hi and at least one bin");
}

void Histogram::add(double value) {
  ++total_;
  if (value < lo_) {
    ++underflow_;
  } else if (value >= hi_) {
    ++overflow_;
  } else {
    auto b = static_cast<std::size_t>((value - lo_) / (hi_ - lo_) * static_cast<double>(counts_.size()));
    ++counts_[std::min(b, counts_.size() - 1)];
  }
}

void Histogram::write_csv(std::ostream& out) const {
  const double width = (hi_ - lo_) / static_cast<double>(counts_.size());
  auto edge = [&](std::size_t i) { return i == counts_.size() ? hi_ : lo_ + width * static_cast<double>(i); };
  out << "bin_lo,bin_hi,count\n";
  out << "-inf," << format_number(lo_, 10) << ',' << underflow_ << '\n';
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    out << format_number(edge(i), 10) << ',' << format_number(edge(i + 1), 10) << ',' << counts_[i] << '\n';
  }
  out << format_number(hi_, 10) << ",inf," << overflow_ << '\n';
}

nlohmann::json Histogram::layout() const {
  return {{"lo", lo_}, {"hi", hi_}, {"bins", counts_.size()}, {"underflow", underflow_}, {"overflow", overflow_}};
}

Fig1Result run_fig1(const ExperimentSpec& input) {
  const ExperimentSpec spec = input.resolved();
  spec.validate();
  const std::size_t n = spec.num_qubits;
  if (n > kDefaultDenseQubitCap) {
    throw std::length_error("fig1 needs dense targets; n = " + std::to_string(n) + " exceeds the cap of " +
                            std::to_string(kDefaultDenseQubitCap));
  }
  const PauliNoise noise = parse_noise(spec.noise);
  const double d = std::ldexp(1.0, static_cast<int>(n));
  const double bound = expected_copies_bound_for_settings(settings_count(spec.config), spec.config.epsilon,
                                                          spec.config.delta, d);

  std::vector<Fig1Trial> trials(spec.trials);
  parallel_for(trials.size(), [&](std::size_t i) {
    const std::uint64_t trial_seed = derive_seed(spec.config.seed, stream::kTrials, i);
    const StateTarget target = parse_state_target(spec.target, spec.config, trial_seed);
    DfeConfig cfg = resolve_alpha(spec, target);
    cfg.seed = trial_seed;
    cfg.record_settings = false;
    const StateModel sigma = target.noisy(noise);
    const DfeResult r = estimate_fidelity(*target.sampler, sigma, cfg);
    Fig1Trial& t = trials[i];
    t.fidelity = dense_overlap(target.ideal_model(), to_density_matrix(sigma));
    t.y_tilde = r.y_tilde;
    t.y_ideal = r.y_ideal;
    t.total_copies = r.total_copies;
  });

  Fig1Result result{std::move(trials), Histogram(-0.1, 0.1, 40), Histogram(0.0, 6.0 * bound, 60), {}};
  std::vector<double> residuals, ideal_residuals, copies, fidelities;
  std::uint64_t above = 0;
  for (const Fig1Trial& t : result.trials) {
    result.residuals.add(t.residual());
    result.copies.add(static_cast<double>(t.total_copies));
    residuals.push_back(t.residual());
    ideal_residuals.push_back(t.y_ideal - t.fidelity);
    copies.push_back(static_cast<double>(t.total_copies));
    fidelities.push_back(t.fidelity);
    if (static_cast<double>(t.total_copies) > 4.0 * bound) ++above;
  }
  const auto count = result.trials.size();
  nlohmann::json& s = result.summary;
  s["kind"] = "fig1";
  s["spec"] = to_json(spec);
  s["config"] = to_json(spec.config);
  s["num_qubits"] = n;
  s["trials"] = count;
  s["settings"] = settings_count(spec.config);
  s["noise"] = noise.describe();
  s["seeding"] = "trial i uses seed derive(master, trials, i); its state derive(trial, states)";
  s["residual_definition"] = "y_tilde - Tr(rho sigma), Tr(rho sigma) from dense matrices";
  s["residual"] = to_json(summarize(residuals), count);
  s["ideal_residual"] = to_json(summarize(ideal_residuals), count);
  s["fidelity"] = to_json(summarize(fidelities), count);
  s["copies"] = to_json(summarize(copies), count);
  s["copies"]["expected_bound"] = bound;
  s["copies"]["trials_above_4x_bound"] = above;
  s["copies"]["fraction_above_4x_bound"] = static_cast<double>(above) / static_cast<double>(count);
  s["histograms"] = {{"residual", result.residuals.layout()}, {"copies", result.copies.layout()}};
  return result;
}

void write_fig1(const Fig1Result& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream residual, copies;
  result.residuals.write_csv(residual);
  result.copies.write_csv(copies);
  write_text(dir / "residual.csv", residual.str());
  write_text(dir / "copies.csv", copies.str());
  write_text(dir / "summary.json", result.summary.dump(2) + "\n");
}

nlohmann::json run_calibration(const ExperimentSpec& input) {
  const ExperimentSpec spec = input.resolved();
  spec.validate();
  const PauliNoise noise = parse_noise(spec.noise);
  const std::string n = std::to_string(spec.num_qubits);
  const std::vector<std::string> rotation =
      spec.target == "mixed" ? std::vector<std::string>{"ghz:" + n, "w:" + n, "haar:" + n}
                             : std::vector<std::string>{spec.target};
  const double eps = spec.config.epsilon;

  struct Outcome {
    std::string family;
    bool stage1 = false;
    bool stage2 = false;
  };
  std::vector<Outcome> outcomes(spec.trials);
  parallel_for(outcomes.size(), [&](std::size_t i) {
    const std::uint64_t trial_seed = derive_seed(spec.config.seed, stream::kTrials, i);
    const std::string& text = rotation[i % rotation.size()];
    const StateTarget target = parse_state_target(text, spec.config, trial_seed);
    DfeConfig cfg = resolve_alpha(spec, target);
    cfg.seed = trial_seed;
    cfg.record_settings = false;
    const StateModel sigma = target.noisy(noise);
    const double truth = dense_overlap(target.ideal_model(), to_density_matrix(sigma));
    const DfeResult r = estimate_fidelity(*target.sampler, sigma, cfg);
    outcomes[i] = {family_of(text), std::abs(r.y_ideal - truth) >= eps, std::abs(r.y_tilde - r.y_ideal) >= eps};
  });

  std::uint64_t f1 = 0, f2 = 0;
  std::map<std::string, std::array<std::uint64_t, 3>> by_family;
  for (const Outcome& o : outcomes) {
    f1 += o.stage1;
    f2 += o.stage2;
    auto& row = by_family[o.family];
    ++row[0];
    row[1] += o.stage1;
    row[2] += o.stage2;
  }
  const double trials = static_cast<double>(spec.trials);
  const double delta = spec.config.delta;
  const double allowed = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / trials);
  auto stage = [&](std::uint64_t failures, const std::string& event) {
    const double rate = static_cast<double>(failures) / trials;
    return nlohmann::json{{"event", event}, {"failures", failures}, {"rate", rate}, {"pass", rate <= allowed}};
  };
  nlohmann::json report = {
      {"kind", "calibration"},
      {"spec", to_json(spec)},
      {"config", to_json(spec.config)},
      {"noise", noise.describe()},
      {"trials", spec.trials},
      {"targets", rotation},
      {"allowed_rate", allowed},
      {"allowed_rule", "delta + 3 sqrt(delta (1 - delta) / trials)"},
      {"stage1", stage(f1, "|Y - Tr(rho sigma)| >= eps")},
      {"stage2", stage(f2, "|Y~ - Y| >= eps")},
  };
  for (const auto& [family, row] : by_family) {
    report["by_target"][family] = {{"trials", row[0]}, {"stage1_failures", row[1]}, {"stage2_failures", row[2]}};
  }
  report["pass"] = report["stage1"]["pass"].get<bool>() && report["stage2"]["pass"].get<bool>();
  return report;
}

void write_sample_dist(const ExperimentSpec& input, std::ostream& out) {
  const ExperimentSpec spec = input.resolved();
  spec.validate();
  const StateTarget target = parse_state_target(spec.target, spec.config, spec.config.seed);
  const std::size_t n = target.num_qubits();
  if (n > kDefaultDenseQubitCap) {
    throw std::length_error("sample-dist lists all 4^n Paulis; n = " + std::to_string(n) + " exceeds the cap of " +
                            std::to_string(kDefaultDenseQubitCap));
  }
  out << "k,pauli,probability,chi\n";
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  for (std::uint64_t k = 0; k < count; ++k) {
    const PauliOp w = PauliOp::from_index(n, k);
    const double chi = target.sampler->chi(w);
    if (std::abs(chi) < kChiZeroTolerance) continue;
    out << k << ',' << w.str().substr(1) << ',' << format_number(chi * chi, 17) << ',' << format_number(chi, 17)
        << '\n';
  }
}

nlohmann::json run_state(const ExperimentSpec& input) {
  const ExperimentSpec spec = input.resolved();
  spec.validate();
  const PauliNoise noise = parse_noise(spec.noise);
  const StateTarget target = parse_state_target(spec.target, spec.config, spec.config.seed);
  const DfeConfig cfg = resolve_alpha(spec, target);
  const StateModel sigma = target.noisy(noise);
  const DfeResult r = estimate_fidelity(*target.sampler, sigma, cfg, noise.describe());
  nlohmann::json j = to_json(r);
  j["spec"] = to_json(spec);
  j["target"] = target.description;
  if (target.truncated) {
    j["truncation"] = {{"beta", target.truncated->beta},
                       {"retained", target.truncated->retained},
                       {"bias", target.truncated->bias_bound},
                       {"bias_cap", target.truncated->bias_cap}};
  }
  j["exact_fidelity"] = target.num_qubits() <= kDefaultDenseQubitCap
                            ? nlohmann::json(dense_overlap(target.ideal_model(), to_density_matrix(sigma)))
                            : nlohmann::json(nullptr);
  return j;
}

nlohmann::json run_channel(const ExperimentSpec& input) {
  const ExperimentSpec spec = input.resolved();
  spec.validate();
  const PauliNoise noise = parse_noise(spec.noise);
  const ChannelModel target = parse_channel_target(spec.target, spec.config.seed);
  const ChannelModel actual = target.followed_by(noise);
  DfeConfig cfg = spec.config;
  if (cfg.regime == Regime::well_conditioned) {
    if (!spec.alpha && !target.clifford_circuit()) throw UsageError("well_conditioned needs --alpha for this target");
    cfg.alpha = spec.alpha ? *spec.alpha : 1.0;
  }
  if (cfg.regime == Regime::truncated) throw UsageError("the truncated regime applies to state targets only");
  ChannelDfeOptions options;
  options.sign_convention = spec.sign_convention;
  options.log_prepared_states = spec.log_prepared;
  const ChannelDfeResult r = estimate_entanglement_fidelity(target, actual, cfg, options);
  nlohmann::json j = to_json(r);
  j["spec"] = to_json(spec);
  j["target"] = spec.target;
  std::optional<double> exact;
  const bool closed_form = target.clifford_circuit() && (noise.kind == PauliNoise::Kind::none ||
                                                         noise.kind == PauliNoise::Kind::global_depolarizing);
  if (closed_form) {
    exact = entanglement_fidelity_clifford(target, actual);
  } else if (target.num_qubits() <= kDefaultChannelDenseCap) {
    exact = entanglement_fidelity_kraus(target, actual);
  }
  const double d = std::ldexp(1.0, static_cast<int>(target.num_qubits()));
  j["exact_entanglement_fidelity"] = exact ? nlohmann::json(*exact) : nlohmann::json(nullptr);
  j["exact_average_fidelity"] =
      exact ? nlohmann::json(avg_fidelity_from_entanglement(*exact, d)) : nlohmann::json(nullptr);
  return j;
}

}  // namespace dfe
