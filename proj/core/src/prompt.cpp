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

#include "dptab/prompt.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "dptab/error.hpp"

namespace dptab::prompt {
namespace {

constexpr std::string_view kAnswerCue = "Answer:";

std::set<std::string> placeholders_of(const std::string& text) {
  std::set<std::string> names;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string::npos) {
    const auto end = text.find('}', pos);
    if (end == std::string::npos) {
      throw ConfigError("unterminated placeholder in template");
    }
    names.insert(text.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return names;
}

std::string substitute(const std::string& body, const std::string& name,
                       const std::string& value) {
  std::string result;
  result.reserve(body.size() + value.size());
  const std::string token = "{" + name + "}";
  std::size_t pos = 0;
  while (true) {
    const auto hit = body.find(token, pos);
    if (hit == std::string::npos) {
      result.append(body, pos, std::string::npos);
      return result;
    }
    result.append(body, pos, hit - pos);
    result.append(value);
    pos = hit + token.size();
  }
}

}  // namespace

PhrasingMode PromptTemplate::mode_for(const FeatureSpec& feature) const {
  auto it = modes.find(feature.name);
  if (it != modes.end()) return it->second;
  if (feature.phrasing.empty()) return PhrasingMode::kVerbatim;
  if (feature.is_categorical() && feature.domain_size() == 2 &&
      feature.index_of("0") && feature.index_of("1")) {
    return PhrasingMode::kBinaryBucket;
  }
  return PhrasingMode::kCategoricalPhrase;
}

void PromptTemplate::validate(const Schema& schema) const {
  const auto names = placeholders_of(body);
  std::set<std::string> expected;
  for (const auto& feature : schema.features) expected.insert(feature.name);
  if (names != expected) {
    throw ConfigError("template '" + template_id +
                      "': placeholders do not match the schema's feature names");
  }
  if (!placeholders_of(question).empty()) {
    throw ConfigError("template '" + template_id +
                      "': the question must not contain placeholders");
  }
  if (question.size() < kAnswerCue.size() ||
      question.compare(question.size() - kAnswerCue.size(), kAnswerCue.size(),
                       kAnswerCue) != 0) {
    throw ConfigError("template '" + template_id +
                      "': the question must end with the answer cue '" +
                      std::string(kAnswerCue) + "'");
  }
}

std::string Prompt::text() const {
  std::string out;
  for (const auto& demo : demonstrations) {
    out += demo.question;
    out += ' ';
    out += demo.answer;
    out += "\n\n";
  }
  out += query;
  return out;
}

std::string format_value(const Value& value, const FeatureSpec& feature,
                         PhrasingMode mode) {
  if (std::holds_alternative<double>(value)) {
    const double v = std::get<double>(value);
    char buf[64];
    if (feature.is_numerical() && feature.numerical().integer_valued) {
      std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(std::llround(v)));
    } else {
      std::snprintf(buf, sizeof(buf), "%.2f", v);
    }
    return buf;
  }
  const std::string& raw = std::get<std::string>(value);
  if (mode == PhrasingMode::kVerbatim) return raw;
  auto it = feature.phrasing.find(raw);
  if (it == feature.phrasing.end()) {
    throw DataError("no phrasing for value '" + raw + "' of feature '" +
                    feature.name + "'");
  }
  return it->second;
}

namespace {

std::string render_question(const PromptTemplate& tmpl, const Schema& schema,
                            std::span<const Value> values) {
  if (values.size() != schema.feature_count()) {
    throw DataError("value count does not match template '" + tmpl.template_id +
                    "' (schema '" + schema.dataset_id + "')");
  }
  std::string text = tmpl.body;
  for (std::size_t f = 0; f < schema.feature_count(); ++f) {
    const FeatureSpec& feature = schema.features[f];
    text = substitute(text, feature.name,
                      format_value(values[f], feature, tmpl.mode_for(feature)));
  }
  if (text.find('{') != std::string::npos) {
    throw DataError("unresolved placeholder after rendering template '" +
                    tmpl.template_id + "'");
  }
  text += ' ';
  text += tmpl.question;
  return text;
}

std::string answer_phrase(const Schema& schema, std::string_view label_value) {
  if (label_value.empty()) throw DataError("record is missing the label");
  if (!schema.label.index_of(label_value)) {
    throw DataError("label value '" + std::string(label_value) +
                    "' outside the label domain");
  }
  auto it = schema.label.phrasing.find(std::string(label_value));
  if (it == schema.label.phrasing.end()) {
    throw ConfigError("label phrasing missing for value '" +
                      std::string(label_value) + "'");
  }
  if (it->second != "Yes" && it->second != "No") {
    throw ConfigError("label phrasing must be 'Yes' or 'No'");
  }
  return it->second;
}

}  // namespace

Demonstration render_demonstration(const PromptTemplate& tmpl, const Schema& schema,
                                   std::span<const Value> values,
                                   std::string_view label_value, RenderSource) {
  Demonstration demo;
  demo.question = render_question(tmpl, schema, values);
  demo.answer = answer_phrase(schema, label_value);
  return demo;
}

Demonstration render_demonstration(const PromptTemplate& tmpl, const Schema& schema,
                                   const Record& record, Provenance provenance) {
  if (provenance != Provenance::kReconstructedSampled) {
    throw DataError(
        "demonstrations may only be rendered from DP-protected records "
        "(reconstructed-sampled provenance)");
  }
  return render_demonstration(tmpl, schema, record.values, record.label,
                              RenderSource::kReconstructedSample);
}

std::string render_query(const PromptTemplate& tmpl, const Schema& schema,
                         const Record& record) {
  return render_question(tmpl, schema, record.values);
}

Prompt assemble_prompt(const DemonstrationSet& demos, std::string query,
                       std::string query_id) {
  Prompt prompt;
  prompt.demonstrations = demos.items;
  prompt.query = std::move(query);
  prompt.query_id = std::move(query_id);
  return prompt;
}

}  // namespace dptab::prompt
