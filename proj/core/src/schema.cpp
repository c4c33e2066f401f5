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

#include "dptab/schema.hpp"

#include <algorithm>
#include <set>

#include "dptab/error.hpp"

namespace dptab {

std::optional<std::size_t> FeatureSpec::index_of(std::string_view value) const {
  const auto& domain = categorical().domain;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (domain[i] == value) return i;
  }
  return std::nullopt;
}

void FeatureSpec::validate() const {
  if (name.empty()) throw ConfigError("feature with empty name");
  if (is_categorical()) {
    const auto& domain = categorical().domain;
    if (domain.empty()) {
      throw ConfigError("feature '" + name + "': empty categorical domain");
    }
    std::set<std::string> unique(domain.begin(), domain.end());
    if (unique.size() != domain.size()) {
      throw ConfigError("feature '" + name + "': duplicate domain values");
    }
    for (const auto& [key, unused] : phrasing) {
      if (!index_of(key)) {
        throw ConfigError("feature '" + name + "': phrasing key '" + key +
                          "' is not a domain value");
      }
    }
  } else {
    const auto& num = numerical();
    if (!(num.lower < num.upper)) {
      throw ConfigError("feature '" + name +
                        "': lower bound must be below upper bound");
    }
  }
}

const FeatureSpec* Schema::find(std::string_view name) const {
  if (label.name == name) return &label;
  for (const auto& feature : features) {
    if (feature.name == name) return &feature;
  }
  return nullptr;
}

void Schema::validate() const {
  if (features.empty()) throw ConfigError("schema needs at least one feature");
  std::set<std::string> names;
  for (const auto& feature : features) {
    feature.validate();
    if (!names.insert(feature.name).second) {
      throw ConfigError("duplicate feature name '" + feature.name + "'");
    }
  }
  label.validate();
  if (!label.is_categorical() || label.domain_size() != 2) {
    throw ConfigError("label must be categorical with exactly two values");
  }
  if (names.contains(label.name)) {
    throw ConfigError("label name '" + label.name + "' collides with a feature");
  }
}

}  // namespace dptab
