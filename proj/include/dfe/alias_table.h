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

#include <cstddef>
#include <span>
#include <vector>

#include "dfe/rng.h"

namespace dfe {

/// Walker/Vose alias table: O(n) build, O(1) draws.
class AliasTable {
 public:
  AliasTable() = default;
  /// Weights need not be normalized; negative or all-zero weights throw.
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return accept_.size(); }
  std::size_t sample(Rng& rng) const;

  /// Probability the table actually realizes for outcome i (normalized weight).
  double probability(std::size_t i) const { return normalized_[i]; }

 private:
  std::vector<double> accept_;
  std::vector<std::size_t> alias_;
  std::vector<double> normalized_;
};

}  // namespace dfe
