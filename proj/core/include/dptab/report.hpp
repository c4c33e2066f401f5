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

#ifndef DPTAB_REPORT_HPP_
#define DPTAB_REPORT_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dptab/harness.hpp"

namespace dptab::harness {

inline constexpr std::string_view kReportHeader =
    "dataset,pipeline,epsilon,k,trial,seed,accuracy,tp_rate,tn_rate,unparsed,"
    "wall_ms";

std::string format_epsilon(double epsilon);
double parse_epsilon(const std::string& text);

std::string format_trial_row(const TrialRow& row);
TrialRow parse_trial_row(const std::string& line);

void write_report_csv(const TrialReport& report, std::ostream& out);
TrialReport read_report_csv(const std::filesystem::path& path);

/// Aligned mean/std accuracy grid, one block per k, columns by epsilon.
void write_report_text(const TrialReport& report, std::ostream& out);

}  // namespace dptab::harness

#endif  // DPTAB_REPORT_HPP_
