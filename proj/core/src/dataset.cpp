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

#include "dptab/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dptab/error.hpp"
#include "dptab/rng.hpp"

namespace dptab {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t");
  auto end = s.find_last_not_of(" \t");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

double parse_numeric_cell(const std::string& cell, std::size_t row,
                          const std::string& column) {
  const std::string text = trim(cell);
  double value = 0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (ec != std::errc{} || ptr != last) {
    throw DataError("row " + std::to_string(row) + ", column '" + column +
                    "': cannot parse numeric value '" + cell + "'");
  }
  return value;
}

std::string format_numeric_cell(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json feature_to_json(const FeatureSpec& feature) {
  nlohmann::json j;
  j["name"] = feature.name;
  if (feature.is_categorical()) {
    j["kind"] = "categorical";
    j["domain"] = feature.categorical().domain;
  } else {
    const auto& num = feature.numerical();
    j["kind"] = "numerical";
    j["lower"] = num.lower;
    j["upper"] = num.upper;
    j["integer"] = num.integer_valued;
  }
  if (!feature.phrasing.empty()) j["phrasing"] = feature.phrasing;
  return j;
}

FeatureSpec feature_from_json(const nlohmann::json& j) {
  FeatureSpec feature;
  feature.name = j.at("name").get<std::string>();
  if (j.at("kind") == "categorical") {
    feature.kind = CategoricalKind{j.at("domain").get<std::vector<std::string>>()};
  } else {
    NumericalKind num;
    num.lower = j.at("lower").get<double>();
    num.upper = j.at("upper").get<double>();
    num.integer_valued = j.value("integer", false);
    feature.kind = num;
  }
  if (j.contains("phrasing")) {
    feature.phrasing = j.at("phrasing").get<std::map<std::string, std::string>>();
  }
  return feature;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path meta = path;
  meta += ".meta.json";
  return meta;
}

}  // namespace

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kRaw:
      return "raw";
    case Provenance::kPerturbed:
      return "perturbed";
    case Provenance::kReconstructedSampled:
      return "reconstructed-sampled";
  }
  return "raw";
}

Provenance provenance_from_name(std::string_view name) {
  if (name == "raw") return Provenance::kRaw;
  if (name == "perturbed") return Provenance::kPerturbed;
  if (name == "reconstructed-sampled") return Provenance::kReconstructedSampled;
  throw DataError("unknown provenance marker '" + std::string(name) + "'");
}

Dataset load_csv(const std::filesystem::path& path,
                 std::shared_ptr<const Schema> schema, LoadReport* report) {
  schema->validate();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("'" + path.string() + "' is empty (missing header row)");
  }
  const auto header = split_csv_line(line);
  std::vector<std::string> expected;
  expected.reserve(schema->attribute_count());
  for (const auto& feature : schema->features) expected.push_back(feature.name);
  expected.push_back(schema->label.name);
  if (header.size() != expected.size() ||
      !std::equal(header.begin(), header.end(), expected.begin(),
                  [](const std::string& a, const std::string& b) {
                    return trim(a) == b;
                  })) {
    throw DataError("'" + path.string() + "': header does not match schema '" +
                    schema->dataset_id + "'");
  }

  Dataset dataset;
  dataset.schema = std::move(schema);
  dataset.provenance = Provenance::kRaw;

  std::size_t row = 1;  // header was row 0
  while (std::getline(in, line)) {
    if (line.empty()) {
      ++row;
      continue;
    }
    auto cells = split_csv_line(line);
    if (cells.size() != expected.size()) {
      throw DataError("row " + std::to_string(row) + ": expected " +
                      std::to_string(expected.size()) + " cells, found " +
                      std::to_string(cells.size()));
    }
    if (report) ++report->rows_read;
    const bool missing = std::any_of(cells.begin(), cells.end(),
                                     [](const std::string& c) { return trim(c).empty(); });
    if (missing) {
      if (report) ++report->rows_dropped;
      ++row;
      continue;
    }

    Record record;
    record.values.reserve(dataset.schema->feature_count());
    for (std::size_t i = 0; i < dataset.schema->feature_count(); ++i) {
      const auto& feature = dataset.schema->features[i];
      if (feature.is_numerical()) {
        record.values.emplace_back(parse_numeric_cell(cells[i], row, feature.name));
      } else {
        const std::string value = trim(cells[i]);
        if (!feature.index_of(value)) {
          throw DataError("row " + std::to_string(row) + ", column '" +
                          feature.name + "': value '" + value +
                          "' is not in the declared domain");
        }
        record.values.emplace_back(value);
      }
    }
    const auto& label = dataset.schema->label;
    const std::string label_value = trim(cells.back());
    if (!label.index_of(label_value)) {
      throw DataError("row " + std::to_string(row) + ", column '" + label.name +
                      "': value '" + label_value + "' is not in the declared domain");
    }
    record.label = label_value;
    dataset.records.push_back(std::move(record));
    ++row;
  }
  return dataset;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  const Schema& schema = *dataset.schema;
  for (const auto& feature : schema.features) out << feature.name << ',';
  out << schema.label.name << '\n';
  for (const auto& record : dataset.records) {
    for (const auto& value : record.values) {
      if (std::holds_alternative<double>(value)) {
        out << format_numeric_cell(std::get<double>(value));
      } else {
        out << std::get<std::string>(value);
      }
      out << ',';
    }
    out << record.label << '\n';
  }
  out.flush();
  if (!out) throw DataError("failed writing '" + path.string() + "'");

  nlohmann::json meta;
  meta["provenance"] = std::string(provenance_name(dataset.provenance));
  meta["dataset_id"] = schema.dataset_id;
  meta["template_id"] = schema.template_id;
  meta["features"] = nlohmann::json::array();
  for (const auto& feature : schema.features) {
    meta["features"].push_back(feature_to_json(feature));
  }
  meta["label"] = feature_to_json(schema.label);
  std::ofstream meta_out(sidecar_path(path));
  meta_out << meta.dump(2) << '\n';
  if (!meta_out) throw DataError("failed writing sidecar for '" + path.string() + "'");
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream meta_in(sidecar_path(path));
  if (!meta_in) {
    throw DataError("missing sidecar '" + sidecar_path(path).string() + "'");
  }
  nlohmann::json meta = nlohmann::json::parse(meta_in);
  auto schema = std::make_shared<Schema>();
  schema->dataset_id = meta.at("dataset_id").get<std::string>();
  schema->template_id = meta.value("template_id", std::string{});
  for (const auto& j : meta.at("features")) {
    schema->features.push_back(feature_from_json(j));
  }
  schema->label = feature_from_json(meta.at("label"));

  Dataset dataset = load_csv(path, schema);
  dataset.provenance =
      provenance_from_name(meta.at("provenance").get<std::string>());
  return dataset;
}

BinarizeResult binarize(const Dataset& dataset, const BinarizeOptions& options) {
  if (dataset.provenance != Provenance::kRaw) {
    throw DataError("binarize expects raw data");
  }
  const Schema& schema = *dataset.schema;
  const std::size_t n = dataset.size();

  BinarizeResult result;
  auto binary_schema = std::make_shared<Schema>();
  binary_schema->dataset_id = schema.dataset_id;
  binary_schema->template_id = schema.template_id;
  binary_schema->label = schema.label;

  // Per source feature: how each output feature maps a source cell to a bit.
  struct Mapper {
    std::size_t source;
    bool numerical;
    double threshold = 0;                // numerical
    std::optional<std::string> one_hot;  // categorical: matches this value
    std::optional<std::size_t> pass_index;  // already-binary passthrough
  };
  std::vector<Mapper> mappers;

  auto phrase_override = [&](const std::string& name)
      -> const std::map<std::string, std::string>* {
    if (!options.phrasing) return nullptr;
    auto it = options.phrasing->find(name);
    return it == options.phrasing->end() ? nullptr : &it->second;
  };

  auto format_threshold = [](double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", t);
    return std::string(buf);
  };

  for (std::size_t f = 0; f < schema.feature_count(); ++f) {
    const FeatureSpec& feature = schema.features[f];
    if (feature.is_numerical()) {
      double threshold = 0;
      if (options.fixed_thresholds) {
        auto it = options.fixed_thresholds->find(feature.name);
        if (it == options.fixed_thresholds->end()) {
          // Not thresholded at train time (constant column): drop here too.
          result.dropped_features.push_back(feature.name);
          continue;
        }
        threshold = it->second;
      } else {
        if (n == 0) throw DataError("cannot derive thresholds from an empty dataset");
        double sum = 0;
        for (const auto& record : dataset.records) {
          sum += std::get<double>(record.values[f]);
        }
        threshold = sum / static_cast<double>(n);
        const bool constant = std::all_of(
            dataset.records.begin(), dataset.records.end(), [&](const Record& r) {
              return std::get<double>(r.values[f]) ==
                     std::get<double>(dataset.records.front().values[f]);
            });
        if (constant) {
          result.dropped_features.push_back(feature.name);
          result.warnings.push_back("dropped constant numerical feature '" +
                                    feature.name + "' (threshold undefined)");
          continue;
        }
      }
      result.thresholds[feature.name] = threshold;

      FeatureSpec out;
      out.name = feature.name;
      out.kind = CategoricalKind{{"0", "1"}};
      if (const auto* phrases = phrase_override(feature.name)) {
        out.phrasing = *phrases;
      } else {
        out.phrasing["1"] = "more than " + format_threshold(threshold);
        out.phrasing["0"] = "less than or equal to " + format_threshold(threshold);
      }
      binary_schema->features.push_back(std::move(out));
      mappers.push_back({f, true, threshold, std::nullopt, std::nullopt});
    } else if (feature.domain_size() == 2) {
      // Already binary; passes through unchanged (binarize is idempotent).
      FeatureSpec out = feature;
      if (const auto* phrases = phrase_override(feature.name)) out.phrasing = *phrases;
      binary_schema->features.push_back(std::move(out));
      mappers.push_back({f, false, 0, std::nullopt, 0});
    } else {
      for (const auto& value : feature.categorical().domain) {
        FeatureSpec out;
        out.name = feature.name + "=" + value;
        out.kind = CategoricalKind{{"0", "1"}};
        if (const auto* phrases = phrase_override(out.name)) {
          out.phrasing = *phrases;
        } else {
          out.phrasing["1"] = value;
          out.phrasing["0"] = "not " + value;
        }
        binary_schema->features.push_back(std::move(out));
        mappers.push_back({f, false, 0, value, std::nullopt});
      }
    }
  }

  constexpr std::size_t kMaxBinaryFeatures = 14;
  if (binary_schema->features.size() > kMaxBinaryFeatures) {
    throw DataError("feature limit exceeded: binarization yields " +
                    std::to_string(binary_schema->features.size()) +
                    " features (limit " + std::to_string(kMaxBinaryFeatures) + ")");
  }
  binary_schema->validate();

  result.data.schema = binary_schema;
  result.data.provenance = Provenance::kRaw;
  result.data.records.reserve(n);
  for (const auto& record : dataset.records) {
    Record out;
    out.values.reserve(mappers.size());
    for (const auto& mapper : mappers) {
      const Value& cell = record.values[mapper.source];
      if (mapper.numerical) {
        out.values.emplace_back(std::string(
            std::get<double>(cell) > mapper.threshold ? "1" : "0"));
      } else if (mapper.one_hot) {
        out.values.emplace_back(
            std::string(std::get<std::string>(cell) == *mapper.one_hot ? "1" : "0"));
      } else {
        out.values.emplace_back(std::get<std::string>(cell));
      }
    }
    out.label = record.label;
    result.data.records.push_back(std::move(out));
  }
  result.schema = binary_schema;
  return result;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset,
                                             std::uint64_t seed) {
  const std::size_t n = dataset.size();
  if (n < 2) throw DataError("split needs at least two records");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng::SplitMix64 engine(rng::derive(seed, "train-test-split"));
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = rng::uniform_below(engine, i + 1);
    std::swap(order[i], order[j]);
  }

  const auto train_size = static_cast<std::size_t>(
      std::floor(0.8 * static_cast<double>(n)));
  Dataset train{dataset.schema, {}, dataset.provenance};
  Dataset test{dataset.schema, {}, dataset.provenance};
  train.records.reserve(train_size);
  test.records.reserve(n - train_size);
  for (std::size_t i = 0; i < n; ++i) {
    (i < train_size ? train : test).records.push_back(dataset.records[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

Dataset subsample_test(const Dataset& test, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw DataError("subsample fraction must be in (0, 1]");
  }
  const std::size_t n = test.size();
  const std::size_t keep =
      n == 0 ? 0
             : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(
                                            fraction * static_cast<double>(n))));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng::SplitMix64 engine(rng::derive(seed, "test-subsample"));
  for (std::size_t i = 0; i < keep; ++i) {
    const auto j = i + rng::uniform_below(engine, n - i);
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + keep);
  std::sort(chosen.begin(), chosen.end());

  Dataset out{test.schema, {}, test.provenance};
  out.records.reserve(keep);
  for (std::size_t idx : chosen) out.records.push_back(test.records[idx]);
  return out;
}

}  // namespace dptab
