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

#ifndef DPTAB_PROMPT_HPP_
#define DPTAB_PROMPT_HPP_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dptab/dataset.hpp"
#include "dptab/schema.hpp"

namespace dptab::prompt {

/// How a feature's value turns into text.
enum class PhrasingMode {
  kVerbatim,           // numbers and raw category labels
  kBinaryBucket,       // phrasing["0"/"1"]
  kCategoricalPhrase,  // phrasing[category]
};

/// Text template with one {name} placeholder per schema feature, followed by
/// a fixed question that ends with the answer cue "Answer:".
struct PromptTemplate {
  std::string template_id;
  std::string body;
  std::string question;
  std::map<std::string, PhrasingMode> modes;  // per feature; default inferred

  PhrasingMode mode_for(const FeatureSpec& feature) const;
  /// Placeholder set must equal the schema's feature names and the question
  /// must end with the answer cue.
  void validate(const Schema& schema) const;
};

struct Demonstration {
  std::string question;
  std::string answer;  // "Yes" or "No"
};

struct DemonstrationSet {
  std::vector<Demonstration> items;
};

/// k demonstrations followed by one unanswered query.
struct Prompt {
  std::vector<Demonstration> demonstrations;
  std::string query;     // ends with the answer cue
  std::string query_id;  // results are keyed by this

  std::string text() const;
};

/// What a demonstration is rendered from. Raw records are rejected; only
/// DP-protected sources may reach the serializer.
enum class RenderSource { kReconstructedSample, kAggregate };

/// Numeric formatting used in prompts: integer-flagged values print bare,
/// other numbers with two decimals; categorical values go through the
/// feature's phrasing map when one is declared.
std::string format_value(const Value& value, const FeatureSpec& feature,
                         PhrasingMode mode);

Demonstration render_demonstration(const PromptTemplate& tmpl, const Schema& schema,
                                   std::span<const Value> values,
                                   std::string_view label_value,
                                   RenderSource source);

/// Firewall overload: throws unless the record's provenance is
/// reconstructed-sampled.
Demonstration render_demonstration(const PromptTemplate& tmpl, const Schema& schema,
                                   const Record& record, Provenance provenance);

/// Renders the question text of a record with the label excluded.
std::string render_query(const PromptTemplate& tmpl, const Schema& schema,
                         const Record& record);

Prompt assemble_prompt(const DemonstrationSet& demos, std::string query,
                       std::string query_id = {});

}  // namespace dptab::prompt

#endif  // DPTAB_PROMPT_HPP_
