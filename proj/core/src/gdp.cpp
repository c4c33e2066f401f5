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

#include "dptab/gdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "dptab/error.hpp"

namespace dptab::gdp {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double laplace_or_zero(rng::SplitMix64& engine, double scale_numerator, double budget) {
  if (std::isinf(budget)) return 0.0;
  if (!(budget > 0)) throw DataError("budget must be positive");
  return rng::laplace(engine, scale_numerator / budget);
}

}  // namespace

std::size_t BucketRule::bucket_count() const {
  return threshold ? 2 : value_groups.size();
}

std::string BucketRule::bucket_label(std::size_t bucket) const {
  if (threshold) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%s%g", column.c_str(),
                  bucket == 0 ? "<=" : ">", *threshold);
    return buf;
  }
  std::string label = column + "=[";
  const auto& group = value_groups[bucket];
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (i) label += ',';
    label += group[i];
  }
  return label + "]";
}

void BucketRule::validate(const Schema& schema) const {
  const FeatureSpec* feature = schema.find(column);
  if (!feature) throw ConfigError("GROUP BY column '" + column + "' not in schema");
  if (threshold) {
    if (!feature->is_numerical()) {
      throw ConfigError("threshold split on non-numerical column '" + column + "'");
    }
    if (!value_groups.empty()) {
      throw ConfigError("column '" + column + "': cannot mix threshold and value groups");
    }
    return;
  }
  if (!feature->is_categorical()) {
    throw ConfigError("value-group split on numerical column '" + column + "'");
  }
  if (value_groups.size() < 2) {
    throw ConfigError("column '" + column + "': need at least two buckets");
  }
  std::set<std::string> seen;
  std::size_t covered = 0;
  for (const auto& group : value_groups) {
    if (group.empty()) throw ConfigError("column '" + column + "': empty value group");
    for (const auto& value : group) {
      if (!feature->index_of(value)) {
        throw ConfigError("column '" + column + "': value '" + value +
                          "' not in the domain");
      }
      if (!seen.insert(value).second) {
        throw ConfigError("column '" + column + "': buckets overlap on '" + value + "'");
      }
      ++covered;
    }
  }
  if (covered != feature->domain_size()) {
    throw ConfigError("column '" + column + "': buckets do not cover the domain");
  }
}

std::size_t GroupByPlan::subset_count() const {
  std::size_t count = 1;
  for (const auto& key : keys) count *= key.bucket_count();
  return count;
}

void GroupByPlan::validate(const Schema& schema, std::size_t k) const {
  for (const auto& key : keys) key.validate(schema);
  if (subset_count() != k) {
    throw ConfigError("GROUP BY plan yields " + std::to_string(subset_count()) +
                      " subsets, expected " + std::to_string(k));
  }
}

Dataset poisson_subsample(const Dataset& dataset, std::size_t n_target,
                          std::uint64_t seed) {
  const std::size_t n = dataset.size();
  if (n_target < 1 || n_target > n) {
    throw DataError("subsample target must be in [1, N]");
  }
  const double rate = static_cast<double>(n_target) / static_cast<double>(n);
  rng::SplitMix64 engine(rng::derive(seed, "poisson-subsample"));
  Dataset out{dataset.schema, {}, dataset.provenance};
  out.records.reserve(n_target + n_target / 4);
  for (const auto& record : dataset.records) {
    if (rng::uniform01(engine) < rate) out.records.push_back(record);
  }
  return out;
}

std::vector<Dataset> group_by_partition(const Dataset& subset,
                                        const GroupByPlan& plan) {
  const Schema& schema = *subset.schema;
  plan.validate(schema, plan.subset_count());
  const std::size_t k = plan.subset_count();
  if (k < 2) throw DataError("partitioning needs k >= 2 (k = 1 skips GROUP BY)");

  // Pre-resolve column positions; label shows up as index = feature_count.
  struct Key {
    const BucketRule* rule;
    std::size_t column;
  };
  std::vector<Key> keys;
  keys.reserve(plan.keys.size());
  for (const auto& rule : plan.keys) {
    std::size_t column = schema.feature_count();
    if (rule.column != schema.label.name) {
      for (std::size_t f = 0; f < schema.feature_count(); ++f) {
        if (schema.features[f].name == rule.column) {
          column = f;
          break;
        }
      }
      if (column == schema.feature_count()) {
        throw ConfigError("GROUP BY column '" + rule.column + "' not found");
      }
    }
    keys.push_back({&rule, column});
  }

  auto bucket_of = [&](const Record& record, const Key& key) -> std::size_t {
    const BucketRule& rule = *key.rule;
    if (rule.threshold) {
      const double value = std::get<double>(record.values[key.column]);
      return value <= *rule.threshold ? 0 : 1;
    }
    const std::string& value = key.column == schema.feature_count()
                                   ? record.label
                                   : std::get<std::string>(record.values[key.column]);
    for (std::size_t g = 0; g < rule.value_groups.size(); ++g) {
      const auto& group = rule.value_groups[g];
      if (std::find(group.begin(), group.end(), value) != group.end()) return g;
    }
    throw DataError("value '" + value + "' matches no bucket of '" + rule.column + "'");
  };

  std::vector<Dataset> parts(k, Dataset{subset.schema, {}, subset.provenance});
  for (const auto& record : subset.records) {
    std::size_t index = 0;
    for (const auto& key : keys) {
      index = index * key.rule->bucket_count() + bucket_of(record, key);
    }
    parts[index].records.push_back(record);
  }

  for (std::size_t i = 0; i < k; ++i) {
    if (!parts[i].records.empty()) continue;
    // Name the offending bucket by walking the mixed-radix digits.
    std::string bucket_id;
    std::size_t remainder = i;
    std::size_t radix = k;
    for (const auto& key : keys) {
      radix /= key.rule->bucket_count();
      const std::size_t digit = remainder / radix;
      remainder %= radix;
      if (!bucket_id.empty()) bucket_id += ", ";
      bucket_id += key.rule->bucket_label(digit);
    }
    throw EmptyGroupError(bucket_id);
  }
  return parts;
}

double dp_count(std::span<const double> values, double xi_half,
                rng::SplitMix64& engine) {
  return static_cast<double>(values.size()) + laplace_or_zero(engine, 1.0, xi_half);
}

double dp_sum_clipped(std::span<const double> values, double gamma, double alpha,
                      double xi_half, rng::SplitMix64& engine) {
  if (!(gamma < alpha)) throw DataError("clipping needs gamma < alpha");
  double sum = 0.0;
  for (double v : values) sum += std::clamp(v, gamma, alpha);
  return sum + laplace_or_zero(engine, alpha - gamma, xi_half);
}

double dp_mean_numerical(std::span<const double> values, double gamma, double alpha,
                         double xi, rng::SplitMix64& engine, bool integer_valued) {
  if (!(xi > 0)) throw DataError("budget must be positive");
  const double xi_half = std::isinf(xi) ? kInfinity : xi / 2.0;
  const double noisy_sum = dp_sum_clipped(values, gamma, alpha, xi_half, engine);
  const double noisy_count = std::max(1.0, dp_count(values, xi_half, engine));
  double mean = std::clamp(noisy_sum / noisy_count, gamma, alpha);
  if (integer_valued) mean = std::floor(mean + 0.5);  // round half-up
  return mean;
}

std::string dp_mode_categorical(std::span<const std::string> values,
                                std::span<const std::string> domain, double xi,
                                rng::SplitMix64& engine) {
  if (domain.empty()) throw DataError("empty categorical domain");
  if (!(xi > 0)) throw DataError("budget must be positive");

  std::size_t best = 0;
  double best_count = -kInfinity;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto count = static_cast<double>(
        std::count(values.begin(), values.end(), domain[i]));
    const double noisy = count + laplace_or_zero(engine, 1.0, xi);
    if (noisy > best_count) {  // strict: ties keep the earlier domain value
      best_count = noisy;
      best = i;
    }
  }
  return std::string(domain[best]);
}

AggregateRecord aggregate_subset(const Dataset& subset,
                                 std::span<const double> budgets,
                                 std::uint64_t seed) {
  const Schema& schema = *subset.schema;
  if (budgets.size() != schema.attribute_count()) {
    throw DataError("need one budget per feature plus one for the label");
  }

  AggregateRecord aggregate;
  aggregate.subset_size = subset.size();
  aggregate.values.reserve(schema.feature_count());
  for (std::size_t f = 0; f < schema.feature_count(); ++f) {
    const FeatureSpec& feature = schema.features[f];
    rng::SplitMix64 engine(rng::derive(seed, "dp-aggregate", f));
    if (feature.is_numerical()) {
      std::vector<double> column;
      column.reserve(subset.size());
      for (const auto& record : subset.records) {
        column.push_back(std::get<double>(record.values[f]));
      }
      const auto& num = feature.numerical();
      aggregate.values.emplace_back(dp_mean_numerical(
          column, num.lower, num.upper, budgets[f], engine, num.integer_valued));
    } else {
      std::vector<std::string> column;
      column.reserve(subset.size());
      for (const auto& record : subset.records) {
        column.push_back(std::get<std::string>(record.values[f]));
      }
      aggregate.values.emplace_back(dp_mode_categorical(
          column, feature.categorical().domain, budgets[f], engine));
    }
  }

  rng::SplitMix64 engine(rng::derive(seed, "dp-aggregate", schema.feature_count()));
  std::vector<std::string> labels;
  labels.reserve(subset.size());
  for (const auto& record : subset.records) labels.push_back(record.label);
  aggregate.label = dp_mode_categorical(labels, schema.label.categorical().domain,
                                        budgets.back(), engine);
  return aggregate;
}

prompt::DemonstrationSet gdp_demonstrations(const Dataset& dataset,
                                            std::size_t n_target,
                                            const GroupByPlan& plan,
                                            std::span<const double> budgets,
                                            std::uint64_t seed,
                                            const prompt::PromptTemplate& tmpl,
                                            privacy::SpendLedger* ledger) {
  const Schema& schema = *dataset.schema;
  const std::size_t k = plan.subset_count();
  plan.validate(schema, k);

  const Dataset sample = poisson_subsample(dataset, n_target, seed);
  std::vector<Dataset> subsets;
  if (k == 1) {
    if (sample.records.empty()) throw EmptyGroupError("(whole subsample)");
    subsets.push_back(sample);
  } else {
    subsets = group_by_partition(sample, plan);
  }

  prompt::DemonstrationSet demos;
  demos.items.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const AggregateRecord aggregate =
        aggregate_subset(subsets[i], budgets, rng::derive(seed, "subset", i));
    if (ledger) {
      double spent = 0.0;
      for (double b : budgets) spent += b;
      // Group id is unique per build so repeated builds on one ledger
      // compose sequentially across builds, parallel within.
      ledger->spend_parallel("gdp-subset-" + std::to_string(i),
                             "gdp-groupby-" + std::to_string(seed),
                             privacy::PrivacyBudget{spent},
                             "GROUP BY buckets are disjoint by construction");
    }
    demos.items.push_back(prompt::render_demonstration(
        tmpl, schema, aggregate.values, aggregate.label,
        prompt::RenderSource::kAggregate));
  }
  return demos;
}

}  // namespace dptab::gdp
