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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dfe/channel_dfe.h"
#include "dfe/dfe_engine.h"
#include "dfe/importance_sampler.h"
#include "dfe/states.h"

namespace dfe {

/// Malformed experiment description: bad target or noise string, bad field.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { state_dfe, channel_dfe, fig1, sample_dist, calibration };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::state_dfe;
  /// State targets: ghz:n, w:n, dicke:n:k, haar:n[:seed], file:path.json.
  /// Channel targets: identity:n, cnot, clifford:path.txt, clifford-random:n:gates.
  /// Calibration also accepts "mixed" (GHZ, W, Haar in rotation).
  std::string target;
  /// none, depolarize:p, depolarize-local:p, dephase:p. Empty picks the kind's default.
  std::string noise;
  DfeConfig config;
  /// well_conditioned alpha; resolved from the target when unset.
  std::optional<double> alpha;
  std::uint64_t trials = 0;  // 0: 200 for fig1, 1000 for calibration, else 1
  std::size_t num_qubits = 0;  // fig1 and mixed calibration; 0: 8 and 3
  std::string out;
  SignConvention sign_convention = SignConvention::signed_chi;
  bool log_prepared = false;

  /// Copy with kind defaults filled in.
  ExperimentSpec resolved() const;
  /// Throws UsageError on invalid fields.
  void validate() const;
};

ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentSpec& spec);

PauliNoise parse_noise(const std::string& text);
/// Canonical text form accepted by parse_noise.
std::string noise_to_string(const PauliNoise& noise);

struct StateTarget {
  std::string description;
  std::variant<PureState, StabilizerTableau> ideal;
  std::unique_ptr<ImportanceSampler> sampler;
  std::optional<TruncatedTarget> truncated;

  std::size_t num_qubits() const { return sampler->num_qubits(); }
  StateModel ideal_model() const;
  NoisyState noisy(const PauliNoise& noise) const;
};

/// Builds the target and its sampler for the configured regime. `master_seed`
/// seeds haar targets that do not name their own seed.
StateTarget parse_state_target(const std::string& text, const DfeConfig& config, std::uint64_t master_seed);
ChannelModel parse_channel_target(const std::string& text, std::uint64_t master_seed);

/// Minimum nonzero |Tr(rho W)| of the target, without enumeration when a closed form exists.
double target_alpha(const StateTarget& target);

/// Number of workers for `jobs` independent tasks: DFE_THREADS when set, else
/// one per hardware thread, never more than `jobs`.
std::size_t worker_count(std::size_t jobs);

/// Calls fn(i) for i in [0, count) on a worker pool. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = worker_count(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Fixed-edge histogram with explicit underflow and overflow rows.
class Histogram {
 public:
  Histogram(double lo, double hi, std::size_t bins);
  void add(double value);
  std::uint64_t total() const { return total_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t underflow() const { return underflow_; }
  std::uint64_t overflow() const { return overflow_; }
  /// bin_lo,bin_hi,count; the outer rows use -inf and inf edges.
  void write_csv(std::ostream& out) const;
  nlohmann::json layout() const;

 private:
  double lo_;
  double hi_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t underflow_ = 0;
  std::uint64_t overflow_ = 0;
  std::uint64_t total_ = 0;
};

struct Fig1Trial {
  double fidelity = 0.0;  // Tr(rho sigma), dense
  double y_tilde = 0.0;
  double y_ideal = 0.0;
  std::uint64_t total_copies = 0;
  double residual() const { return y_tilde - fidelity; }
};

struct Fig1Result {
  std::vector<Fig1Trial> trials;
  Histogram residuals;
  Histogram copies;
  nlohmann::json summary;
};

/// Haar-random targets of spec.num_qubits qubits through spec.noise, one
/// estimate_fidelity run per trial.
Fig1Result run_fig1(const ExperimentSpec& spec);
/// residual.csv, copies.csv and summary.json under `dir`.
void write_fig1(const Fig1Result& result, const std::filesystem::path& dir);

/// Empirical failure rates of both estimation stages against dense truth.
nlohmann::json run_calibration(const ExperimentSpec& spec);

/// k,pauli,probability,chi for every Pauli with nonzero probability.
void write_sample_dist(const ExperimentSpec& spec, std::ostream& out);

nlohmann::json run_state(const ExperimentSpec& spec);
nlohmann::json run_channel(const ExperimentSpec& spec);

}  // namespace dfe
