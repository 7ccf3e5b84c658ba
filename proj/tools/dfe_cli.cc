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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfe/harness.h"

namespace {

struct Flags {
  std::string spec;
  std::string target;
  std::string noise;
  std::string regime;
  std::string out;
  std::string sign_convention;
  double epsilon = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t settings = 0;
  std::size_t n = 0;
  bool no_records = false;
  bool log_prepared = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--spec", f.spec, "JSON experiment spec; explicit flags override its fields")->check(CLI::ExistingFile);
  sub->add_option("--epsilon", f.epsilon, "Accuracy parameter");
  sub->add_option("--delta", f.delta, "Failure probability");
  sub->add_option("--regime", f.regime, "generic | well_conditioned | shrinking_noise | shrinking_noise_numerics | truncated");
  sub->add_option("--alpha", f.alpha, "well_conditioned alpha (default: computed from the target)");
  sub->add_option("--beta", f.beta, "Truncation threshold");
  sub->add_option("--settings", f.settings, "Override the number of settings l");
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--noise", f.noise, "none | depolarize:p | depolarize-local:p | dephase:p");
  sub->add_option("--out", f.out, "Output path");
}

dfe::ExperimentSpec build_spec(CLI::App* sub, const Flags& f, dfe::ExperimentKind kind) {
  dfe::ExperimentSpec spec;
  if (!f.spec.empty()) {
    std::ifstream in(f.spec);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw dfe::UsageError("cannot parse spec file: " + std::string(e.what()));
    }
    spec = dfe::spec_from_json(j);
  }
  spec.kind = kind;
  auto given = [&](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
  if (given("--target")) spec.target = f.target;
  if (given("--noise")) spec.noise = f.noise;
  if (given("--epsilon")) spec.config.epsilon = f.epsilon;
  if (given("--delta")) spec.config.delta = f.delta;
  if (given("--regime")) {
    try {
      spec.config.regime = dfe::regime_from_string(f.regime);
    } catch (const std::invalid_argument& e) {
      throw dfe::UsageError(e.what());
    }
  }
  if (given("--alpha")) spec.alpha = f.alpha;
  if (given("--beta")) spec.config.beta = f.beta;
  if (given("--settings")) spec.config.settings_override = f.settings;
  if (given("--seed")) spec.config.seed = f.seed;
  if (given("--trials")) spec.trials = f.trials;
  if (given("--n")) spec.num_qubits = f.n;
  if (given("--out")) spec.out = f.out;
  if (given("--no-records")) spec.config.record_settings = false;
  if (given("--log-prepared")) spec.log_prepared = true;
  if (given("--sign-convention")) {
    spec.sign_convention =
        f.sign_convention == "absorbed" ? dfe::SignConvention::absorbed : dfe::SignConvention::signed_chi;
  }
  spec.validate();
  return spec;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int run(CLI::App* sub, const Flags& f) {
  const std::string name = sub->get_name();
  const dfe::ExperimentKind kind = dfe::experiment_kind_from_string(name);
  const dfe::ExperimentSpec spec = build_spec(sub, f, kind);
  switch (kind) {
    case dfe::ExperimentKind::state_dfe:
      emit(dfe::run_state(spec).dump(2) + "\n", spec.out);
      return 0;
    case dfe::ExperimentKind::channel_dfe:
      emit(dfe::run_channel(spec).dump(2) + "\n", spec.out);
      return 0;
    case dfe::ExperimentKind::fig1: {
      const std::string dir = spec.out.empty() ? "results" : spec.out;
      const dfe::Fig1Result result = dfe::run_fig1(spec);
      dfe::write_fig1(result, dir);
      std::cout << result.summary.dump(2) << "\n";
      return 0;
    }
    case dfe::ExperimentKind::sample_dist: {
      std::ostringstream csv;
      dfe::write_sample_dist(spec, csv);
      emit(csv.str(), spec.out);
      return 0;
    }
    case dfe::ExperimentKind::calibration: {
      const nlohmann::json report = dfe::run_calibration(spec);
      emit(report.dump(2) + "\n", spec.out);
      if (!report.at("pass").get<bool>()) {
        std::cerr << "calibration failed: empirical failure rate above the allowed rate\n";
        return 2;
      }
      return 0;
    }
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct fidelity estimation for quantum states and channels", "dfe"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Flags f;
  CLI::App* state = app.add_subcommand("state", "Estimate Tr(rho sigma) for a state target");
  CLI::App* channel = app.add_subcommand("channel", "Estimate the entanglement fidelity of a channel");
  CLI::App* fig1 = app.add_subcommand("fig1", "Residual and copy-count histograms over Haar-random targets");
  CLI::App* dist = app.add_subcommand("sample-dist", "Importance-sampling table of a target as CSV");
  CLI::App* calibrate = app.add_subcommand("calibrate", "Empirical failure rates of both estimation stages");
  for (CLI::App* sub : {state, channel, fig1, dist, calibrate}) add_common(sub, f);
  for (CLI::App* sub : {state, channel, dist, calibrate}) {
    sub->add_option("--target", f.target, "Target description, e.g. ghz:4, w:3, haar:8, cnot, clifford:file.txt");
  }
  for (CLI::App* sub : {fig1, calibrate}) {
    sub->add_option("--trials", f.trials, "Number of trials")->check(CLI::PositiveNumber);
    sub->add_option("--n", f.n, "Number of qubits")->check(CLI::PositiveNumber);
  }
  for (CLI::App* sub : {state, channel}) sub->add_flag("--no-records", f.no_records, "Omit per-setting records");
  channel->add_option("--sign-convention", f.sign_convention, "signed | absorbed")
      ->check(CLI::IsMember({"signed", "absorbed"}));
  channel->add_flag("--log-prepared", f.log_prepared, "Log every prepared input eigenstate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    return run(sub, f);
  } catch (const dfe::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << sub->help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
