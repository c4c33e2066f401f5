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

#include "dptab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dptab/error.hpp"

namespace dptab::harness {

std::string format_epsilon(double epsilon) {
  if (std::isinf(epsilon)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", epsilon);
  return buf;
}

double parse_epsilon(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw DataError("cannot parse epsilon '" + text + "'");
  }
}

std::string format_trial_row(const TrialRow& row) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%s,%s,%s,%zu,%zu,%llu,%.6f,%.6f,%.6f,%zu,%.3f",
                row.dataset.c_str(), row.pipeline.c_str(),
                format_epsilon(row.epsilon).c_str(), row.k, row.trial,
                static_cast<unsigned long long>(row.seed), row.accuracy,
                row.tp_rate, row.tn_rate, row.unparsed, row.wall_ms);
  return buf;
}

TrialRow parse_trial_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (cells.size() != 11) {
    throw DataError("malformed report row: '" + line + "'");
  }
  TrialRow row;
  row.dataset = cells[0];
  row.pipeline = cells[1];
  row.epsilon = parse_epsilon(cells[2]);
  row.k = std::stoul(cells[3]);
  row.trial = std::stoul(cells[4]);
  row.seed = std::stoull(cells[5]);
  row.accuracy = std::stod(cells[6]);
  row.tp_rate = std::stod(cells[7]);
  row.tn_rate = std::stod(cells[8]);
  row.unparsed = std::stoul(cells[9]);
  row.wall_ms = std::stod(cells[10]);
  return row;
}

void write_report_csv(const TrialReport& report, std::ostream& out) {
  out << kReportHeader << '\n';
  for (const auto& row : report.rows) out << format_trial_row(row) << '\n';
}

TrialReport read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open report '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty report file");
  if (line != kReportHeader) {
    throw DataError("unexpected report header in '" + path.string() + "'");
  }
  TrialReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    report.rows.push_back(parse_trial_row(line));
  }
  return report;
}

std::map<std::pair<double, std::size_t>, CellStats> TrialReport::aggregate() const {
  std::map<std::pair<double, std::size_t>, std::vector<double>> samples;
  for (const auto& row : rows) {
    samples[{row.epsilon, row.k}].push_back(row.accuracy);
  }
  std::map<std::pair<double, std::size_t>, CellStats> cells;
  for (const auto& [key, values] : samples) {
    CellStats stats;
    stats.trials = values.size();
    for (double v : values) stats.mean += v;
    stats.mean /= static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.stddev = values.size() > 1
                       ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                       : 0.0;
    cells[key] = stats;
  }
  return cells;
}

void write_report_text(const TrialReport& report, std::ostream& out) {
  if (report.rows.empty()) {
    out << "(no trials)\n";
    return;
  }
  const auto cells = report.aggregate();
  std::vector<double> epsilons;
  std::vector<std::size_t> ks;
  for (const auto& [key, unused] : cells) {
    if (std::find(epsilons.begin(), epsilons.end(), key.first) == epsilons.end()) {
      epsilons.push_back(key.first);
    }
    if (std::find(ks.begin(), ks.end(), key.second) == ks.end()) {
      ks.push_back(key.second);
    }
  }
  std::sort(epsilons.begin(), epsilons.end());
  std::sort(ks.begin(), ks.end());

  out << report.rows.front().dataset << " / " << report.rows.front().pipeline
      << " - mean accuracy (std) over trials\n\n";
  char buf[64];
  out << "   k |";
  for (double eps : epsilons) {
    std::snprintf(buf, sizeof(buf), " %*s |", 11, ("eps=" + format_epsilon(eps)).c_str());
    out << buf;
  }
  out << '\n';
  out << "-----+";
  for (std::size_t i = 0; i < epsilons.size(); ++i) out << "-------------+";
  out << '\n';
  for (std::size_t k : ks) {
    std::snprintf(buf, sizeof(buf), "%4zu |", k);
    out << buf;
    for (double eps : epsilons) {
      auto it = cells.find({eps, k});
      if (it == cells.end()) {
        out << "           - |";
      } else {
        std::snprintf(buf, sizeof(buf), " %.3f (%.3f) |", it->second.mean,
                      it->second.stddev);
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace dptab::harness
