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
// Local pipeline: k-ary randomized response per attribute, observed
// frequency tabulation, joint-distribution reconstruction through the
// inverse transition matrices, and demonstration sampling.

#ifndef DPTAB_LDP_HPP_
#define DPTAB_LDP_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dptab/dataset.hpp"
#include "dptab/prompt.hpp"
#include "dptab/tensor.hpp"

namespace dptab::ldp {

/// U x U randomized-response transition matrix. Row u is the output
/// distribution reported when the true value is u: e^eps/(U-1+e^eps) on the
/// diagonal and 1/(U-1+e^eps) elsewhere. Budget +inf yields the identity.
struct DistortionMatrix {
  std::size_t size = 0;
  double epsilon = 0.0;
  std::vector<double> entries;  // row-major

  double at(std::size_t u, std::size_t o) const { return entries[u * size + o]; }
  bool is_identity() const;

  /// Checks row sums and the closed-form structure.
  void validate() const;

  /// max over (u, u', o) of p[u][o] / p[u'][o]; the per-matrix privacy bound
  /// requires this to stay at or below e^epsilon.
  double max_likelihood_ratio() const;

  /// Row-major inverse. Closed form for the randomized-response structure;
  /// LU decomposition otherwise. Appends a warning when the condition number
  /// exceeds 1e8.
  std::vector<double> inverse(std::vector<std::string>* warnings = nullptr) const;
};

DistortionMatrix build_distortion_matrix(double epsilon, std::size_t domain_size);

/// Builds one matrix per feature plus one for the label from a per-attribute
/// budget split.
std::vector<DistortionMatrix> build_matrices(const Schema& schema,
                                             std::span<const double> budgets);

/// Per-attribute budget split; the total must reassemble the declared budget.
struct BudgetAllocation {
  std::vector<double> per_attribute;  // features then label

  double total() const;
  void validate(double declared_total) const;
};

/// Independently resamples every cell through its attribute's matrix row.
/// Each record draws from its own derived RNG stream, so the output is
/// schedule-independent and byte-stable for a fixed seed.
Dataset perturb_dataset(const Dataset& dataset,
                        std::span<const DistortionMatrix> matrices,
                        std::uint64_t seed);

/// Normalized joint value counts of a perturbed dataset.
FrequencyTensor observed_frequencies(const Dataset& perturbed);

/// Applies each matrix inverse along its tensor mode; equal to multiplying by
/// the inverse Kronecker product without materializing it. No clamping.
FrequencyTensor apply_inverse(const FrequencyTensor& lambda,
                              std::span<const DistortionMatrix> matrices,
                              std::vector<std::string>* warnings = nullptr);

/// Estimated true joint distribution plus the schema it indexes.
struct ReconstructedDistribution {
  FrequencyTensor distribution;  // non-negative, sums to one
  std::shared_ptr<const Schema> schema;
  std::size_t clamped_cells = 0;
  std::vector<std::string> warnings;
};

ReconstructedDistribution reconstruct_joint(const FrequencyTensor& lambda,
                                            std::span<const DistortionMatrix> matrices,
                                            std::shared_ptr<const Schema> schema);

/// k records drawn i.i.d. (with replacement) from the joint distribution and
/// decoded into schema values.
std::vector<Record> sample_reconstructed(const ReconstructedDistribution& dist,
                                         std::size_t k, std::uint64_t seed);

/// Samples k records and serializes them with labels included.
prompt::DemonstrationSet ldp_demonstrations(const ReconstructedDistribution& dist,
                                            std::size_t k, std::uint64_t seed,
                                            const prompt::PromptTemplate& tmpl);

}  // namespace dptab::ldp

#endif  // DPTAB_LDP_HPP_
