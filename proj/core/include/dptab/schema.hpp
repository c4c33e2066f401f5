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

#ifndef DPTAB_SCHEMA_HPP_
#define DPTAB_SCHEMA_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dptab {

/// A feature cell: numbers for numerical features, category labels for
/// categorical ones.
using Value = std::variant<double, std::string>;

struct CategoricalKind {
  std::vector<std::string> domain;  // ordered, duplicate-free, non-empty
};

struct NumericalKind {
  double lower = 0.0;   // gamma: declared public lower bound
  double upper = 0.0;   // alpha: declared public upper bound
  bool integer_valued = false;
};

/// Typed description of one column plus the natural-language fragments the
/// serializer substitutes for its values (keyed by category label or by
/// binary bucket "0"/"1").
struct FeatureSpec {
  std::string name;
  std::variant<CategoricalKind, NumericalKind> kind;
  std::map<std::string, std::string> phrasing;

  bool is_categorical() const {
    return std::holds_alternative<CategoricalKind>(kind);
  }
  bool is_numerical() const { return !is_categorical(); }
  const CategoricalKind& categorical() const {
    return std::get<CategoricalKind>(kind);
  }
  const NumericalKind& numerical() const { return std::get<NumericalKind>(kind); }

  /// Domain size of a categorical feature.
  std::size_t domain_size() const { return categorical().domain.size(); }

  /// Position of a category label in the declared domain.
  std::optional<std::size_t> index_of(std::string_view value) const;

  /// Checks the declared invariants; throws ConfigError on violation.
  void validate() const;
};

/// Ordered feature list plus a binary categorical label.
struct Schema {
  std::string dataset_id;
  std::vector<FeatureSpec> features;
  FeatureSpec label;
  std::string template_id;

  std::size_t feature_count() const { return features.size(); }
  /// Features plus the label.
  std::size_t attribute_count() const { return features.size() + 1; }

  const FeatureSpec* find(std::string_view name) const;
  void validate() const;
};

}  // namespace dptab

#endif  // DPTAB_SCHEMA_HPP_
