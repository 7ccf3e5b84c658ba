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

#include "dfe/alias_table.h"

#include <stdexcept>

namespace dfe {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) {
    throw std::invalid_argument("alias table needs at least one weight");
  }
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("alias table weights must be non-negative");
    total += w;
  }
  if (total <= 0) {
    throw std::invalid_argument("alias table weights sum to zero");
  }

  normalized_.resize(n);
  accept_.resize(n);
  alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small;
  std::vector<std::size_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    normalized_[i] = weights[i] / total;
    scaled[i] = normalized_[i] * static_cast<double>(n);
    alias_[i] = i;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    std::size_t s = small.back();
    small.pop_back();
    std::size_t l = large.back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::size_t i : large) accept_[i] = 1.0;
  for (std::size_t i : small) {
    accept_[i] = 1.0;
    // Never let rounding hand a zero-weight column its own outcome.
    if (normalized_[i] == 0.0) {
      for (std::size_t j = 0; j < n; ++j) {
        if (normalized_[j] > 0.0) {
          accept_[i] = 0.0;
          alias_[i] = j;
          break;
        }
      }
    }
  }
}

std::size_t AliasTable::sample(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> column(0, accept_.size() - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::size_t i = column(rng);
  return coin(rng) < accept_[i] ? i : alias_[i];
}

}  // namespace dfe
