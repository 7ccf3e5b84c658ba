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

#include <boost/math/distributions/chi_squared.hpp>
#include <cstdint>
#include <vector>

namespace stats {

// Pearson statistic over cells with expected count >= 5, remaining cells pooled.
// Any draw in a zero-probability cell gives p = 0.
inline double chi_squared_p_value(const std::vector<double>& probs, const std::vector<std::uint64_t>& counts,
                                  std::uint64_t draws) {
  double stat = 0;
  double pooled_p = 0;
  double pooled_c = 0;
  int cells = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(draws);
    if (probs[i] == 0) {
      if (counts[i] != 0) return 0.0;
      continue;
    }
    if (expected < 5) {
      pooled_p += probs[i];
      pooled_c += static_cast<double>(counts[i]);
      continue;
    }
    stat += (counts[i] - expected) * (counts[i] - expected) / expected;
    ++cells;
  }
  if (pooled_p > 0) {
    const double expected = pooled_p * static_cast<double>(draws);
    stat += (pooled_c - expected) * (pooled_c - expected) / expected;
    ++cells;
  }
  if (cells < 2) return 1.0;
  boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace stats
