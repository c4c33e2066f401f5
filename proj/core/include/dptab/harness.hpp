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
// Experiment orchestration: epsilon x k grids with repeated trials over the
// LDP or GDP pipeline, deterministic seeding, accuracy scoring, and report
// emission.

#ifndef DPTAB_HARNESS_HPP_
#define DPTAB_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dptab/config.hpp"
#include "dptab/dataset.hpp"
#include "dptab/llm.hpp"
#include "dptab/privacy.hpp"

namespace dptab::harness {

enum class Pipeline { kLdp, kGdp };
enum class MockMode { kNone, kFixedYes, kFixedNo, kEchoMajority, kOracleTruth };

std::string_view pipeline_name(Pipeline p);
Pipeline pipeline_from_name(std::string_view name);
MockMode mock_mode_from_name(std::string_view name);

struct ExperimentConfig {
  std::filesystem::path dataset_config;
  std::filesystem::path data_csv;
  Pipeline pipeline = Pipeline::kLdp;
  std::vector<double> epsilon_grid = {1, 5, 10, 25, 50,
                                      std::numeric_limits<double>::infinity()};
  std::vector<std::size_t> k_grid = {1, 2, 4, 8};
  std::size_t trials = 5;
  std::size_t n_target = 0;  // GDP subsample target; required for GDP
  double test_fraction = 0.1;
  MockMode mock = MockMode::kEchoMajority;
  llm::BackendConfig backend;  // used when mock == kNone
  std::uint64_t master_seed = 0;
  bool retry_empty_groups = false;  // resample on EmptyGroup, up to 10 tries
  std::string unparsed_policy = "incorrect";  // or "abstain-excluded"
  std::filesystem::path out_dir = "reports";
  bool resume = false;

  void validate() const;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct TrialRow {
  std::string dataset;
  std::string pipeline;
  double epsilon = 0;
  std::size_t k = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double accuracy = 0;
  double tp_rate = 0;
  double tn_rate = 0;
  std::size_t unparsed = 0;
  double wall_ms = 0;
};

struct CellStats {
  double mean = 0;
  double stddev = 0;
  std::size_t trials = 0;
};

struct TrialReport {
  std::vector<TrialRow> rows;

  /// Mean/std accuracy per (epsilon, k), in grid order of appearance.
  std::map<std::pair<double, std::size_t>, CellStats> aggregate() const;
};

/// Everything loaded and split once per run: the raw 80/20 split, the query
/// subsample, and (for LDP) the binarized train/query datasets sharing the
/// train-derived thresholds.
struct PreparedExperiment {
  ExperimentConfig config;
  DatasetConfig dataset;
  Dataset train_raw;
  Dataset queries_raw;
  Dataset train_binary;
  Dataset queries_binary;
  std::shared_ptr<const Schema> binary_schema;
  std::string yes_value;  // label value whose phrasing is "Yes"
  std::unique_ptr<llm::CompletionBackend> backend;
};

PreparedExperiment prepare_experiment(ExperimentConfig config);

/// Deterministic per-cell seed: master -> (epsilon value, k, trial).
std::uint64_t cell_seed(std::uint64_t master_seed, double epsilon, std::size_t k,
                        std::size_t trial);

/// One LDP trial: perturb once, reconstruct once, then per query a fresh
/// k-sample of demonstrations. The ledger must close at the declared epsilon
/// or the trial fails.
TrialRow run_ldp_trial(const PreparedExperiment& experiment, double epsilon,
                       std::size_t k, std::size_t trial,
                       privacy::SpendLedger* ledger = nullptr);

/// One GDP trial: one Poisson subsample and one demonstration set reused for
/// every query. The ledger's amplified total must match amplify(epsilon, n, N)
/// or the trial fails.
TrialRow run_gdp_trial(const PreparedExperiment& experiment, double epsilon,
                       std::size_t k, std::size_t trial,
                       privacy::SpendLedger* ledger = nullptr);

/// Runs the full grid, streaming rows to <out>/report.csv as they finish
/// (with a .partial sentinel while incomplete), then writes the aligned-text
/// report and the budget audit log.
TrialReport run_grid(const ExperimentConfig& config);

}  // namespace dptab::harness

#endif  // DPTAB_HARNESS_HPP_
