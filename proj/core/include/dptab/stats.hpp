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

#ifndef DPTAB_STATS_HPP_
#define DPTAB_STATS_HPP_

#include <cstddef>
#include <span>

namespace dptab::harness {

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-tailed
  std::size_t dof = 0;
};

/// Two-tailed paired Student t-test. Requires equal lengths >= 2 and a
/// non-zero variance of the differences.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// kg CO2eq = power (W) * time (h) / 1000 * grid factor (kg/kWh).
double energy_report(double power_watts, double hours, double grid_factor);

}  // namespace dptab::harness

#endif  // DPTAB_STATS_HPP_
