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

#include "dptab/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "dptab/error.hpp"

namespace dptab::privacy {

bool PrivacyBudget::is_infinite() const { return std::isinf(epsilon); }

void PrivacyBudget::validate() const {
  if (std::isnan(epsilon) || epsilon < 0) {
    throw DataError("privacy budget must be non-negative");
  }
}

PrivacyBudget compose_sequential(std::span<const PrivacyBudget> budgets) {
  PrivacyBudget total{0.0};
  for (const auto& budget : budgets) {
    budget.validate();
    total.epsilon += budget.epsilon;
  }
  return total;
}

PrivacyBudget compose_parallel(std::span<const PrivacyBudget> budgets) {
  PrivacyBudget total{0.0};
  for (const auto& budget : budgets) {
    budget.validate();
    total.epsilon = std::max(total.epsilon, budget.epsilon);
  }
  return total;
}

PrivacyBudget amplify(PrivacyBudget budget, std::size_t n, std::size_t population) {
  budget.validate();
  if (n == 0) throw DataError("subsample size must be positive");
  if (n > population) throw DataError("subsample size exceeds the population");
  if (budget.is_infinite()) return budget;
  const double rate = static_cast<double>(n) / static_cast<double>(population);
  return {std::log1p(rate * std::expm1(budget.epsilon))};
}

std::vector<PrivacyBudget> split_uniform(PrivacyBudget budget, std::size_t parts) {
  budget.validate();
  if (parts == 0) throw DataError("cannot split a budget into zero parts");
  return std::vector<PrivacyBudget>(
      parts, PrivacyBudget{budget.epsilon / static_cast<double>(parts)});
}

void SpendLedger::spend(std::string op_id, PrivacyBudget budget) {
  budget.validate();
  std::lock_guard lock(mutex_);
  entries_.push_back({std::move(op_id), budget.epsilon, Kind::kSequential, {}, {}});
}

void SpendLedger::spend_parallel(std::string op_id, std::string group_id,
                                 PrivacyBudget budget, std::string attestation) {
  budget.validate();
  if (group_id.empty()) throw DataError("parallel spends need a group id");
  std::lock_guard lock(mutex_);
  entries_.push_back({std::move(op_id), budget.epsilon, Kind::kParallelGroup,
                      std::move(group_id), std::move(attestation)});
}

PrivacyBudget SpendLedger::total_locked() const {
  double total = 0.0;
  std::map<std::string, double> group_max;
  for (const auto& entry : entries_) {
    if (entry.kind == Kind::kSequential) {
      total += entry.epsilon;
    } else {
      auto [it, unused] = group_max.try_emplace(entry.group, 0.0);
      it->second = std::max(it->second, entry.epsilon);
    }
  }
  for (const auto& [unused, eps] : group_max) total += eps;
  return {total};
}

PrivacyBudget SpendLedger::total() const {
  std::lock_guard lock(mutex_);
  return total_locked();
}

std::size_t SpendLedger::entry_count() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<SpendLedger::Entry> SpendLedger::snapshot() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

void SpendLedger::write_audit_log(std::ostream& out) const {
  std::lock_guard lock(mutex_);
  double sequential = 0.0;
  std::map<std::string, double> group_max;
  for (const auto& entry : entries_) {
    const char* kind = entry.kind == Kind::kSequential ? "sequential" : "parallel";
    if (entry.kind == Kind::kSequential) {
      sequential += entry.epsilon;
    } else {
      auto [it, unused] = group_max.try_emplace(entry.group, 0.0);
      it->second = std::max(it->second, entry.epsilon);
    }
    double running = sequential;
    for (const auto& [unused2, eps] : group_max) running += eps;
    char line[256];
    std::snprintf(line, sizeof(line), "%s\t%.9g\t%s%s%s\t%.9g\n",
                  entry.op_id.c_str(), entry.epsilon, kind,
                  entry.group.empty() ? "" : ":", entry.group.c_str(), running);
    out << line;
  }
}

}  // namespace dptab::privacy
