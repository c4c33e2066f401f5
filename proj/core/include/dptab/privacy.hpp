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
//
// Pure-epsilon budget arithmetic (delta is fixed at zero): sequential and
// parallel composition, amplification by subsampling, uniform splitting, and
// an append-only spend ledger.

#ifndef DPTAB_PRIVACY_HPP_
#define DPTAB_PRIVACY_HPP_

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace dptab::privacy {

struct PrivacyBudget {
  double epsilon = 0.0;  // >= 0, +inf marks the no-privacy runs

  static PrivacyBudget infinite() {
    return {std::numeric_limits<double>::infinity()};
  }
  bool is_infinite() const;
  void validate() const;  // epsilon >= 0, not NaN
};

/// Total cost of queries over the same data: the sum (+inf absorbs).
PrivacyBudget compose_sequential(std::span<const PrivacyBudget> budgets);

/// Total cost of queries over disjoint data: the maximum. Disjointness is
/// the caller's attestation; the accountant only records it.
PrivacyBudget compose_parallel(std::span<const PrivacyBudget> budgets);

/// Amplification by subsampling at rate n/N:
///   eps' = ln(1 + (n/N) (e^eps - 1)).
PrivacyBudget amplify(PrivacyBudget budget, std::size_t n, std::size_t population);

/// Equal per-part budgets that reassemble the total.
std::vector<PrivacyBudget> split_uniform(PrivacyBudget budget, std::size_t parts);

/// Append-only record of budget spends. Sequential entries add; entries
/// sharing a parallel group contribute only the group's maximum.
class SpendLedger {
 public:
  enum class Kind { kSequential, kParallelGroup };

  struct Entry {
    std::string op_id;
    double epsilon;
    Kind kind;
    std::string group;        // empty for sequential entries
    std::string attestation;  // caller's disjointness statement
  };

  void spend(std::string op_id, PrivacyBudget budget);
  void spend_parallel(std::string op_id, std::string group_id,
                      PrivacyBudget budget, std::string attestation);

  PrivacyBudget total() const;
  std::size_t entry_count() const;
  std::vector<Entry> snapshot() const;

  /// Line-oriented audit log: op id, epsilon, kind, running total.
  void write_audit_log(std::ostream& out) const;

 private:
  PrivacyBudget total_locked() const;

  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
};

}  // namespace dptab::privacy

#endif  // DPTAB_PRIVACY_HPP_
