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

#ifndef DPTAB_DATASET_HPP_
#define DPTAB_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dptab/schema.hpp"

namespace dptab {

/// Where a dataset sits relative to the privacy barrier. Raw data must never
/// be read by anything downstream of perturbation.
enum class Provenance { kRaw, kPerturbed, kReconstructedSampled };

std::string_view provenance_name(Provenance p);
Provenance provenance_from_name(std::string_view name);

struct Record {
  std::vector<Value> values;  // aligned with Schema::features
  std::string label;
};

struct Dataset {
  std::shared_ptr<const Schema> schema;
  std::vector<Record> records;
  Provenance provenance = Provenance::kRaw;

  std::size_t size() const { return records.size(); }
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;  // rows with missing cells
};

/// Reads a header-first CSV whose columns are the schema features followed by
/// the label. Rows with empty cells are dropped and counted; unparseable
/// cells raise DataError naming the row and column.
Dataset load_csv(const std::filesystem::path& path,
                 std::shared_ptr<const Schema> schema,
                 LoadReport* report = nullptr);

/// Writes the records as CSV plus a JSON sidecar ("<path>.meta.json")
/// carrying the provenance marker and enough schema to reload the file.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Reloads a dataset written by write_dataset, restoring provenance and
/// schema from the sidecar.
Dataset read_dataset(const std::filesystem::path& path);

/// Per-feature phrase overrides used when binarize() builds bucket phrasing:
/// feature name -> { "0": fragment, "1": fragment }.
using PhrasingOverrides =
    std::map<std::string, std::map<std::string, std::string>>;

struct BinarizeOptions {
  const PhrasingOverrides* phrasing = nullptr;
  /// Reuse thresholds computed on another split (train) instead of deriving
  /// them from this data.
  const std::map<std::string, double>* fixed_thresholds = nullptr;
};

struct BinarizeResult {
  Dataset data;
  std::shared_ptr<const Schema> schema;
  std::map<std::string, double> thresholds;  // numerical feature -> mean
  std::vector<std::string> dropped_features;  // constant columns
  std::vector<std::string> warnings;
};

/// Mean-thresholds numerical features into {0,1} indicators and one-hot
/// expands categorical features. Fails if the result exceeds 14 binary
/// features. Idempotent on already-binary schemas.
BinarizeResult binarize(const Dataset& dataset, const BinarizeOptions& options = {});

/// Seeded shuffle followed by a floor(0.8*N) / remainder split.
std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset,
                                             std::uint64_t seed);

/// Keeps floor(fraction*N) records (at least one), chosen uniformly without
/// replacement; original record order is preserved.
Dataset subsample_test(const Dataset& test, double fraction, std::uint64_t seed);

}  // namespace dptab

#endif  // DPTAB_DATASET_HPP_
