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

#include "dptab/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "dptab/error.hpp"

namespace dptab {
namespace {

using nlohmann::json;

FeatureSpec parse_feature(const json& j) {
  FeatureSpec feature;
  feature.name = j.at("name").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "categorical") {
    feature.kind = CategoricalKind{j.at("domain").get<std::vector<std::string>>()};
  } else if (kind == "numerical") {
    NumericalKind num;
    num.lower = j.at("lower").get<double>();
    num.upper = j.at("upper").get<double>();
    num.integer_valued = j.value("integer", false);
    feature.kind = num;
  } else {
    throw ConfigError("feature '" + feature.name + "': unknown kind '" + kind + "'");
  }
  if (j.contains("phrasing")) {
    feature.phrasing = j.at("phrasing").get<std::map<std::string, std::string>>();
  }
  feature.validate();
  return feature;
}

prompt::PromptTemplate parse_template(const json& j) {
  prompt::PromptTemplate tmpl;
  tmpl.template_id = j.at("template_id").get<std::string>();
  tmpl.body = j.at("body").get<std::string>();
  tmpl.question = j.at("question").get<std::string>();
  return tmpl;
}

gdp::BucketRule parse_bucket_rule(const json& j) {
  gdp::BucketRule rule;
  rule.column = j.at("column").get<std::string>();
  if (j.contains("threshold")) {
    rule.threshold = j.at("threshold").get<double>();
  }
  if (j.contains("groups")) {
    rule.value_groups =
        j.at("groups").get<std::vector<std::vector<std::string>>>();
  }
  return rule;
}

}  // namespace

const gdp::GroupByPlan& DatasetConfig::plan_for(std::size_t k) const {
  auto it = group_by.find(k);
  if (it == group_by.end()) {
    throw ConfigError("no GROUP BY plan declared for k = " + std::to_string(k));
  }
  return it->second;
}

std::vector<std::string> binarized_feature_names(const Schema& schema) {
  std::vector<std::string> names;
  for (const auto& feature : schema.features) {
    if (feature.is_numerical() || feature.domain_size() == 2) {
      names.push_back(feature.name);
    } else {
      for (const auto& value : feature.categorical().domain) {
        names.push_back(feature.name + "=" + value);
      }
    }
  }
  return names;
}

DatasetConfig load_dataset_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }

  DatasetConfig config;
  auto schema = std::make_shared<Schema>();
  schema->dataset_id = j.at("dataset_id").get<std::string>();
  for (const auto& feature_json : j.at("features")) {
    schema->features.push_back(parse_feature(feature_json));
  }
  schema->label = parse_feature(j.at("label"));
  if (schema->label.phrasing.empty()) {
    throw ConfigError("label needs Yes/No phrasing");
  }
  schema->validate();

  config.gdp_template = parse_template(j.at("gdp"));
  schema->template_id = config.gdp_template.template_id;
  config.schema = schema;
  config.gdp_template.validate(*schema);

  const auto& ldp = j.at("ldp");
  config.ldp_template = parse_template(ldp);
  if (ldp.contains("phrasing")) {
    config.ldp_phrasing = ldp.at("phrasing").get<PhrasingOverrides>();
  }
  {
    // Placeholder check against the names binarize() will produce.
    Schema skeleton;
    skeleton.dataset_id = schema->dataset_id;
    skeleton.label = schema->label;
    for (const auto& name : binarized_feature_names(*schema)) {
      FeatureSpec feature;
      feature.name = name;
      feature.kind = CategoricalKind{{"0", "1"}};
      feature.phrasing = {{"0", "x"}, {"1", "x"}};
      skeleton.features.push_back(std::move(feature));
    }
    config.ldp_template.validate(skeleton);
  }

  if (j.contains("group_by")) {
    for (const auto& [key, rules] : j.at("group_by").items()) {
      const auto k = static_cast<std::size_t>(std::stoul(key));
      gdp::GroupByPlan plan;
      for (const auto& rule_json : rules) {
        plan.keys.push_back(parse_bucket_rule(rule_json));
      }
      plan.validate(*schema, k);
      config.group_by[k] = std::move(plan);
    }
  }
  config.group_by.try_emplace(1);  // k = 1 skips partitioning

  return config;
}

}  // namespace dptab
