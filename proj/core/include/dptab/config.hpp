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

#ifndef DPTAB_CONFIG_HPP_
#define DPTAB_CONFIG_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dptab/dataset.hpp"
#include "dptab/gdp.hpp"
#include "dptab/prompt.hpp"
#include "dptab/schema.hpp"

namespace dptab {

/// Everything declared per dataset: the typed schema with public bounds, the
/// serialization templates for both pipelines, bucket phrasing for the
/// binarized features, and the GROUP BY plans keyed by subset count k.
struct DatasetConfig {
  std::shared_ptr<const Schema> schema;
  prompt::PromptTemplate ldp_template;
  prompt::PromptTemplate gdp_template;
  PhrasingOverrides ldp_phrasing;
  std::map<std::size_t, gdp::GroupByPlan> group_by;  // k -> plan (k=1: empty plan)

  const gdp::GroupByPlan& plan_for(std::size_t k) const;
};

DatasetConfig load_dataset_config(const std::filesystem::path& path);

/// Feature names binarize() will produce for this schema, in order (before
/// any constant-column drops).
std::vector<std::string> binarized_feature_names(const Schema& schema);

}  // namespace dptab

#endif  // DPTAB_CONFIG_HPP_
