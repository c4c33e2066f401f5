// Copyright 2026 The dptab Authors
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

#include "dptab/stats.hpp"

#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "dptab/error.hpp"

namespace dptab::harness {

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("paired t-test needs equal lengths");
  const std::size_t n = a.size();
  if (n < 2) throw DataError("paired t-test needs at least two pairs");

  std::vector<double> diff(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = a[i] - b[i];
    mean += diff[i];
  }
  mean /= static_cast<double>(n);

  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double variance = ss / static_cast<double>(n - 1);
  if (variance <= 0.0) {
    throw DataError("paired t-test undefined: differences have zero variance");
  }

  TTestResult result;
  result.dof = n - 1;
  result.t = mean / std::sqrt(variance / static_cast<double>(n));
  const boost::math::students_t dist(static_cast<double>(result.dof));
  result.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(result.t)));
  return result;
}

double energy_report(double power_watts, double hours, double grid_factor) {
  if (power_watts < 0 || hours < 0 || grid_factor < 0) {
    throw DataError("energy report inputs must be non-negative");
  }
  return power_watts * hours / 1000.0 * grid_factor;
}

}  // namespace dptab::harness
