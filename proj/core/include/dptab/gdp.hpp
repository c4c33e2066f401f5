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
// Global pipeline: Poisson subsampling, GROUP BY partitioning, and
// Laplace-noised aggregate demonstrations.

#ifndef DPTAB_GDP_HPP_
#define DPTAB_GDP_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dptab/dataset.hpp"
#include "dptab/privacy.hpp"
#include "dptab/prompt.hpp"
#include "dptab/rng.hpp"

namespace dptab::gdp {

/// One GROUP BY key: either a partition of a categorical domain into value
/// groups, or a numeric threshold split (<= t vs > t).
struct BucketRule {
  std::string column;  // feature name or the label name
  std::vector<std::vector<std::string>> value_groups;
  std::optional<double> threshold;

  std::size_t bucket_count() const;
  std::string bucket_label(std::size_t bucket) const;
  void validate(const Schema& schema) const;
};

/// Ordered GROUP BY keys whose bucket counts multiply to the subset count k.
/// An empty key list means k = 1 (no partitioning).
struct GroupByPlan {
  std::vector<BucketRule> keys;

  std::size_t subset_count() const;
  void validate(const Schema& schema, std::size_t k) const;
};

/// DP aggregates of one subset: mean for numerical features, modal category
/// for categorical ones, modal label. subset_size is diagnostic only and is
/// never serialized.
struct AggregateRecord {
  std::vector<Value> values;
  std::string label;
  std::size_t subset_size = 0;
};

/// Includes each record independently with probability n_target/N.
Dataset poisson_subsample(const Dataset& dataset, std::size_t n_target,
                          std::uint64_t seed);

/// Splits into subset_count() disjoint datasets ordered by bucket
/// enumeration (first key slowest). Throws EmptyGroupError naming the first
/// empty bucket.
std::vector<Dataset> group_by_partition(const Dataset& subset,
                                        const GroupByPlan& plan);

/// Count plus Laplace(1/xi_half) noise (count sensitivity is 1).
double dp_count(std::span<const double> values, double xi_half,
                rng::SplitMix64& engine);

/// Values clipped into [gamma, alpha], summed, plus
/// Laplace((alpha-gamma)/xi_half) noise.
double dp_sum_clipped(std::span<const double> values, double gamma, double alpha,
                      double xi_half, rng::SplitMix64& engine);

/// DP sum over DP count, each on half the budget. The noisy count is floored
/// at one, the quotient is clamped into [gamma, alpha], and integer-flagged
/// features round half-up.
double dp_mean_numerical(std::span<const double> values, double gamma, double alpha,
                         double xi, rng::SplitMix64& engine,
                         bool integer_valued = false);

/// Histogram of per-category counts, each noised with Laplace(1/xi) under
/// parallel composition; returns the argmax category with ties broken by
/// domain order.
std::string dp_mode_categorical(std::span<const std::string> values,
                                std::span<const std::string> domain, double xi,
                                rng::SplitMix64& engine);

/// DP aggregates for one subset, spending budgets[i] on attribute i
/// (features then label).
AggregateRecord aggregate_subset(const Dataset& subset,
                                 std::span<const double> budgets,
                                 std::uint64_t seed);

/// Algorithm: Poisson-subsample n_target records, partition them by the
/// plan, and serialize one DP aggregate per subset. Budgets are per
/// attribute (features then label); each subset spends the full list under
/// parallel composition, recorded in the ledger when one is given.
prompt::DemonstrationSet gdp_demonstrations(const Dataset& dataset,
                                            std::size_t n_target,
                                            const GroupByPlan& plan,
                                            std::span<const double> budgets,
                                            std::uint64_t seed,
                                            const prompt::PromptTemplate& tmpl,
                                            privacy::SpendLedger* ledger = nullptr);

}  // namespace dptab::gdp

#endif  // DPTAB_GDP_HPP_
