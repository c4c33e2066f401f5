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

#include "dptab/harness.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "dptab/error.hpp"
#include "dptab/gdp.hpp"
#include "dptab/ldp.hpp"
#include "dptab/report.hpp"
#include "dptab/rng.hpp"

namespace dptab::harness {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Score {
  double accuracy = 0;
  double tp_rate = 0;
  double tn_rate = 0;
  std::size_t unparsed = 0;
};

/// Results are keyed by query index, so completion order never matters.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const int spawn = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  threads.reserve(spawn);
  for (int t = 0; t < spawn; ++t) threads.emplace_back(worker);
  for (auto& thread : threads) thread.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> budget_values(double epsilon, std::size_t parts) {
  const auto budgets = privacy::split_uniform({epsilon}, parts);
  std::vector<double> values;
  values.reserve(parts);
  for (const auto& b : budgets) values.push_back(b.epsilon);
  return values;
}

void check_budget_closure(double actual, double declared, const char* what) {
  if (std::isinf(declared) && std::isinf(actual)) return;
  if (std::abs(actual - declared) > 1e-9 * std::max(1.0, std::abs(declared))) {
    throw DataError(std::string(what) + ": ledger total " +
                    format_epsilon(actual) + " does not match declared budget " +
                    format_epsilon(declared));
  }
}

Score score_verdicts(const std::vector<llm::Verdict>& verdicts,
                     const std::vector<bool>& truth_is_yes,
                     const std::string& unparsed_policy) {
  Score score;
  std::size_t tp = 0;
  std::size_t tn = 0;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i] == llm::Verdict::kUnparsed) {
      ++score.unparsed;
    } else if (verdicts[i] == llm::Verdict::kYes && truth_is_yes[i]) {
      ++tp;
    } else if (verdicts[i] == llm::Verdict::kNo && !truth_is_yes[i]) {
      ++tn;
    }
  }
  const auto total = static_cast<double>(verdicts.size());
  if (total == 0) return score;
  score.tp_rate = static_cast<double>(tp) / total;
  score.tn_rate = static_cast<double>(tn) / total;
  if (unparsed_policy == "abstain-excluded") {
    const auto scored = total - static_cast<double>(score.unparsed);
    score.accuracy = scored > 0 ? static_cast<double>(tp + tn) / scored : 0.0;
  } else {
    score.accuracy = static_cast<double>(tp + tn) / total;
  }
  return score;
}

std::string find_yes_value(const Schema& schema) {
  for (const auto& [value, phrase] : schema.label.phrasing) {
    if (phrase == "Yes") return value;
  }
  throw ConfigError("label phrasing declares no 'Yes' value");
}

}  // namespace

std::string_view pipeline_name(Pipeline p) {
  return p == Pipeline::kLdp ? "ldp" : "gdp";
}

Pipeline pipeline_from_name(std::string_view name) {
  if (name == "ldp") return Pipeline::kLdp;
  if (name == "gdp") return Pipeline::kGdp;
  throw ConfigError("unknown pipeline '" + std::string(name) + "'");
}

MockMode mock_mode_from_name(std::string_view name) {
  if (name == "none") return MockMode::kNone;
  if (name == "fixed-yes") return MockMode::kFixedYes;
  if (name == "fixed-no") return MockMode::kFixedNo;
  if (name == "echo-majority") return MockMode::kEchoMajority;
  if (name == "oracle-truth") return MockMode::kOracleTruth;
  throw ConfigError("unknown mock mode '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (epsilon_grid.empty() || k_grid.empty()) {
    throw ConfigError("epsilon and k grids must be non-empty");
  }
  for (double eps : epsilon_grid) {
    if (std::isnan(eps) || eps <= 0) {
      throw ConfigError("epsilon grid values must be positive (or inf)");
    }
  }
  for (std::size_t k : k_grid) {
    if (k < 1) throw ConfigError("k grid values must be >= 1");
  }
  if (!(test_fraction > 0) || test_fraction > 1) {
    throw ConfigError("test_fraction must be in (0, 1]");
  }
  if (pipeline == Pipeline::kGdp && n_target == 0) {
    throw ConfigError("GDP needs a positive n_target");
  }
  if (unparsed_policy != "incorrect" && unparsed_policy != "abstain-excluded") {
    throw ConfigError("unparsed policy must be 'incorrect' or 'abstain-excluded'");
  }
  if (mock == MockMode::kNone) backend.validate();
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("experiment config '" + path.string() + "': " + e.what());
  }

  ExperimentConfig config;
  config.dataset_config = j.at("dataset_config").get<std::string>();
  config.data_csv = j.at("data").get<std::string>();
  config.pipeline = pipeline_from_name(j.value("pipeline", "ldp"));
  if (j.contains("epsilons")) {
    config.epsilon_grid.clear();
    for (const auto& e : j.at("epsilons")) {
      config.epsilon_grid.push_back(
          e.is_string() ? parse_epsilon(e.get<std::string>()) : e.get<double>());
    }
  }
  if (j.contains("ks")) config.k_grid = j.at("ks").get<std::vector<std::size_t>>();
  config.trials = j.value("trials", std::size_t{5});
  config.n_target = j.value("n_target", std::size_t{0});
  config.test_fraction = j.value("test_fraction", 0.1);
  config.mock = mock_mode_from_name(j.value("mock", "echo-majority"));
  config.master_seed = j.value("seed", std::uint64_t{0});
  config.retry_empty_groups = j.value("retry_empty_groups", false);
  config.unparsed_policy = j.value("unparsed", "incorrect");
  config.out_dir = j.value("out", std::string{"reports"});
  if (j.contains("backend")) {
    const auto& b = j.at("backend");
    config.backend.endpoint = b.value("endpoint", "");
    config.backend.model = b.value("model", "local");
    config.backend.max_tokens = b.value("max_tokens", 16);
    config.backend.temperature = b.value("temperature", 0.0);
    config.backend.timeout_ms = b.value("timeout_ms", 30000);
    config.backend.max_concurrency = b.value("max_concurrency", 4);
    config.backend.retries = b.value("retries", 2);
    config.backend.backoff_ms = b.value("backoff_ms", 100);
    config.backend.api_key = b.value("api_key", "");
  }
  config.validate();
  return config;
}

std::uint64_t cell_seed(std::uint64_t master_seed, double epsilon, std::size_t k,
                        std::size_t trial) {
  // Derivation chain is keyed by the grid values, not positions, so editing
  // the grid does not reseed unrelated cells.
  std::uint64_t seed = rng::derive(master_seed, "cell");
  seed = rng::derive(seed, std::bit_cast<std::uint64_t>(epsilon));
  seed = rng::derive(seed, static_cast<std::uint64_t>(k));
  return rng::derive(seed, static_cast<std::uint64_t>(trial));
}

PreparedExperiment prepare_experiment(ExperimentConfig config) {
  config.validate();

  PreparedExperiment prepared;
  prepared.dataset = load_dataset_config(config.dataset_config);
  prepared.yes_value = find_yes_value(*prepared.dataset.schema);

  Dataset full = load_csv(config.data_csv, prepared.dataset.schema);
  auto [train, test] = split_train_test(full, config.master_seed);
  prepared.train_raw = std::move(train);
  prepared.queries_raw =
      subsample_test(test, config.test_fraction, config.master_seed);

  if (config.pipeline == Pipeline::kLdp) {
    BinarizeOptions options;
    options.phrasing = &prepared.dataset.ldp_phrasing;
    auto train_result = binarize(prepared.train_raw, options);
    prepared.binary_schema = train_result.schema;
    prepared.train_binary = std::move(train_result.data);

    BinarizeOptions query_options;
    query_options.phrasing = &prepared.dataset.ldp_phrasing;
    query_options.fixed_thresholds = &train_result.thresholds;
    auto query_result = binarize(prepared.queries_raw, query_options);
    prepared.queries_binary = std::move(query_result.data);
    prepared.dataset.ldp_template.validate(*prepared.binary_schema);
  } else {
    if (config.n_target > prepared.train_raw.size()) {
      throw ConfigError("n_target exceeds the training split size");
    }
  }

  switch (config.mock) {
    case MockMode::kFixedYes:
      prepared.backend = llm::MockBackend::fixed("Yes");
      break;
    case MockMode::kFixedNo:
      prepared.backend = llm::MockBackend::fixed("No");
      break;
    case MockMode::kEchoMajority:
      prepared.backend = llm::MockBackend::echo_majority();
      break;
    case MockMode::kOracleTruth: {
      std::vector<std::string> answers;
      answers.reserve(prepared.queries_raw.size());
      for (const auto& record : prepared.queries_raw.records) {
        answers.push_back(record.label == prepared.yes_value ? "Yes" : "No");
      }
      prepared.backend = llm::MockBackend::oracle(
          [answers = std::move(answers)](const prompt::Prompt& p) {
            return answers.at(std::stoul(p.query_id));
          });
      break;
    }
    case MockMode::kNone:
      prepared.backend = std::make_unique<llm::HttpBackend>(config.backend);
      break;
  }

  prepared.config = std::move(config);
  return prepared;
}

namespace {

TrialRow make_row(const PreparedExperiment& experiment, double epsilon,
                  std::size_t k, std::size_t trial, std::uint64_t seed,
                  const Score& score, double wall_ms) {
  TrialRow row;
  row.dataset = experiment.dataset.schema->dataset_id;
  row.pipeline = std::string(pipeline_name(experiment.config.pipeline));
  row.epsilon = epsilon;
  row.k = k;
  row.trial = trial;
  row.seed = seed;
  row.accuracy = score.accuracy;
  row.tp_rate = score.tp_rate;
  row.tn_rate = score.tn_rate;
  row.unparsed = score.unparsed;
  row.wall_ms = wall_ms;
  return row;
}

std::vector<bool> truth_flags(const Dataset& queries, const std::string& yes_value) {
  std::vector<bool> truth;
  truth.reserve(queries.size());
  for (const auto& record : queries.records) {
    truth.push_back(record.label == yes_value);
  }
  return truth;
}

}  // namespace

TrialRow run_ldp_trial(const PreparedExperiment& experiment, double epsilon,
                       std::size_t k, std::size_t trial,
                       privacy::SpendLedger* ledger) {
  const auto& config = experiment.config;
  const Schema& schema = *experiment.binary_schema;
  const std::uint64_t seed = cell_seed(config.master_seed, epsilon, k, trial);
  const auto start = std::chrono::steady_clock::now();

  privacy::SpendLedger local_ledger;
  privacy::SpendLedger* spend = ledger ? ledger : &local_ledger;

  const auto budgets = budget_values(epsilon, schema.attribute_count());
  const auto matrices = ldp::build_matrices(schema, budgets);

  const Dataset perturbed = ldp::perturb_dataset(
      experiment.train_binary, matrices, rng::derive(seed, "perturb"));
  const auto lambda = ldp::observed_frequencies(perturbed);
  const auto reconstructed =
      ldp::reconstruct_joint(lambda, matrices, experiment.binary_schema);

  for (std::size_t a = 0; a < schema.attribute_count(); ++a) {
    const std::string& name =
        a < schema.feature_count() ? schema.features[a].name : schema.label.name;
    spend->spend("rr:" + name, {budgets[a]});
  }
  check_budget_closure(spend->total().epsilon, epsilon, "ldp build");

  const std::size_t query_count = experiment.queries_binary.size();
  std::vector<llm::Verdict> verdicts(query_count, llm::Verdict::kUnparsed);
  parallel_for(query_count, config.backend.max_concurrency, [&](std::size_t q) {
    const auto demos = ldp_demonstrations(reconstructed, k,
                                          rng::derive(seed, "query-demos", q),
                                          experiment.dataset.ldp_template);
    const auto query = prompt::render_query(experiment.dataset.ldp_template, schema,
                                            experiment.queries_binary.records[q]);
    const auto completion = experiment.backend->complete(
        prompt::assemble_prompt(demos, query, std::to_string(q)));
    verdicts[q] = llm::extract_answer(completion.text);
  });

  const auto truth = truth_flags(experiment.queries_binary, experiment.yes_value);
  const Score score = score_verdicts(verdicts, truth, config.unparsed_policy);

  double wall_ms = 0.0;
  if (config.mock == MockMode::kNone) {
    wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  }
  return make_row(experiment, epsilon, k, trial, seed, score, wall_ms);
}

TrialRow run_gdp_trial(const PreparedExperiment& experiment, double epsilon,
                       std::size_t k, std::size_t trial,
                       privacy::SpendLedger* ledger) {
  const auto& config = experiment.config;
  const Schema& schema = *experiment.dataset.schema;
  const std::uint64_t seed = cell_seed(config.master_seed, epsilon, k, trial);
  const auto start = std::chrono::steady_clock::now();

  privacy::SpendLedger local_ledger;
  privacy::SpendLedger* spend = ledger ? ledger : &local_ledger;

  const auto budgets = budget_values(epsilon, schema.attribute_count());
  const auto& plan = experiment.dataset.plan_for(k);

  prompt::DemonstrationSet demos;
  const std::size_t max_attempts = config.retry_empty_groups ? 10 : 1;
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      demos = gdp::gdp_demonstrations(
          experiment.train_raw, config.n_target, plan, budgets,
          rng::derive(seed, "gdp-build", attempt), experiment.dataset.gdp_template,
          spend);
      break;
    } catch (const EmptyGroupError&) {
      if (attempt + 1 >= max_attempts) throw;
    }
  }

  // Thm. accounting: parallel max over disjoint buckets leaves epsilon, and
  // subsampling at rate n/N amplifies it.
  check_budget_closure(spend->total().epsilon, epsilon, "gdp build");
  const auto amplified = privacy::amplify({spend->total().epsilon}, config.n_target,
                                          experiment.train_raw.size());
  const auto declared = privacy::amplify({epsilon}, config.n_target,
                                         experiment.train_raw.size());
  check_budget_closure(amplified.epsilon, declared.epsilon, "gdp amplified total");
  spend->spend("amplified(poisson n/N)", amplified);

  const std::size_t query_count = experiment.queries_raw.size();
  std::vector<llm::Verdict> verdicts(query_count, llm::Verdict::kUnparsed);
  parallel_for(query_count, config.backend.max_concurrency, [&](std::size_t q) {
    const auto query = prompt::render_query(experiment.dataset.gdp_template, schema,
                                            experiment.queries_raw.records[q]);
    const auto completion = experiment.backend->complete(
        prompt::assemble_prompt(demos, query, std::to_string(q)));
    verdicts[q] = llm::extract_answer(completion.text);
  });

  const auto truth = truth_flags(experiment.queries_raw, experiment.yes_value);
  const Score score = score_verdicts(verdicts, truth, config.unparsed_policy);

  double wall_ms = 0.0;
  if (config.mock == MockMode::kNone) {
    wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  }
  return make_row(experiment, epsilon, k, trial, seed, score, wall_ms);
}

TrialReport run_grid(const ExperimentConfig& config) {
  PreparedExperiment experiment = prepare_experiment(config);
  const auto& cfg = experiment.config;

  std::filesystem::create_directories(cfg.out_dir);
  const auto csv_path = cfg.out_dir / "report.csv";
  const auto sentinel_path = cfg.out_dir / "report.csv.partial";
  const auto audit_path = cfg.out_dir / "audit.log";

  TrialReport done;
  if (cfg.resume && std::filesystem::exists(csv_path)) {
    done = read_report_csv(csv_path);
  }
  auto already_done = [&](double eps, std::size_t k, std::size_t trial) {
    return std::any_of(done.rows.begin(), done.rows.end(), [&](const TrialRow& r) {
      return ((std::isinf(r.epsilon) && std::isinf(eps)) || r.epsilon == eps) &&
             r.k == k && r.trial == trial;
    });
  };

  std::ofstream csv(csv_path, done.rows.empty() ? std::ios::trunc : std::ios::app);
  if (!csv) throw DataError("cannot write '" + csv_path.string() + "'");
  if (done.rows.empty()) csv << kReportHeader << '\n';
  std::ofstream audit(audit_path, done.rows.empty() ? std::ios::trunc : std::ios::app);

  {
    std::ofstream sentinel(sentinel_path);
    sentinel << "grid in progress; report.csv holds completed trials\n";
  }

  TrialReport report;
  report.rows = done.rows;
  for (double epsilon : cfg.epsilon_grid) {
    for (std::size_t k : cfg.k_grid) {
      for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        if (cfg.resume && already_done(epsilon, k, trial)) continue;
        privacy::SpendLedger ledger;
        TrialRow row = cfg.pipeline == Pipeline::kLdp
                           ? run_ldp_trial(experiment, epsilon, k, trial, &ledger)
                           : run_gdp_trial(experiment, epsilon, k, trial, &ledger);
        csv << format_trial_row(row) << '\n';
        csv.flush();
        audit << "# trial eps=" << format_epsilon(epsilon) << " k=" << k
              << " trial=" << trial << '\n';
        ledger.write_audit_log(audit);
        audit.flush();
        report.rows.push_back(std::move(row));
      }
    }
  }

  std::ofstream text(cfg.out_dir / "report.txt");
  write_report_text(report, text);
  std::filesystem::remove(sentinel_path);
  return report;
}

}  // namespace dptab::harness
