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

#include "dptab/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "dptab/error.hpp"
#include "dptab/rng.hpp"

namespace dptab::ldp {
namespace {

constexpr double kRowSumTolerance = 1e-12;

std::vector<std::size_t> attribute_dims(const Schema& schema) {
  std::vector<std::size_t> dims;
  dims.reserve(schema.attribute_count());
  for (const auto& feature : schema.features) {
    if (!feature.is_categorical()) {
      throw DataError("feature '" + feature.name +
                      "' is numerical; perturb/reconstruct require categorical "
                      "(binarized) data");
    }
    dims.push_back(feature.domain_size());
  }
  dims.push_back(schema.label.domain_size());
  return dims;
}

std::vector<std::size_t> record_coords(const Record& record, const Schema& schema) {
  std::vector<std::size_t> coords;
  coords.reserve(schema.attribute_count());
  for (std::size_t f = 0; f < schema.feature_count(); ++f) {
    const auto& feature = schema.features[f];
    const auto& cell = std::get<std::string>(record.values[f]);
    auto idx = feature.index_of(cell);
    if (!idx) {
      throw DataError("value '" + cell + "' outside domain of '" + feature.name + "'");
    }
    coords.push_back(*idx);
  }
  auto label_idx = schema.label.index_of(record.label);
  if (!label_idx) {
    throw DataError("label value '" + record.label + "' outside the label domain");
  }
  coords.push_back(*label_idx);
  return coords;
}

double one_norm(const std::vector<double>& m, std::size_t n) {
  double best = 0;
  for (std::size_t col = 0; col < n; ++col) {
    double sum = 0;
    for (std::size_t row = 0; row < n; ++row) sum += std::abs(m[row * n + col]);
    best = std::max(best, sum);
  }
  return best;
}

}  // namespace

bool DistortionMatrix::is_identity() const { return std::isinf(epsilon); }

void DistortionMatrix::validate() const {
  if (size < 2) throw DataError("distortion matrix needs domain size >= 2");
  if (entries.size() != size * size) throw DataError("distortion matrix shape mismatch");
  for (std::size_t u = 0; u < size; ++u) {
    double row_sum = 0;
    for (std::size_t o = 0; o < size; ++o) row_sum += at(u, o);
    if (std::abs(row_sum - 1.0) > kRowSumTolerance) {
      throw DataError("distortion matrix row " + std::to_string(u) +
                      " does not sum to 1");
    }
  }
  if (is_identity()) return;
  const double diagonal = std::exp(epsilon) / (size - 1 + std::exp(epsilon));
  const double off_diagonal = 1.0 / (size - 1 + std::exp(epsilon));
  for (std::size_t u = 0; u < size; ++u) {
    for (std::size_t o = 0; o < size; ++o) {
      const double expected = u == o ? diagonal : off_diagonal;
      if (std::abs(at(u, o) - expected) > 1e-12) {
        throw DataError("distortion matrix entry deviates from the closed form");
      }
    }
  }
}

double DistortionMatrix::max_likelihood_ratio() const {
  double best = 1.0;
  for (std::size_t o = 0; o < size; ++o) {
    for (std::size_t u = 0; u < size; ++u) {
      for (std::size_t v = 0; v < size; ++v) {
        if (u == v) continue;
        const double denom = at(v, o);
        if (denom <= 0) return std::numeric_limits<double>::infinity();
        best = std::max(best, at(u, o) / denom);
      }
    }
  }
  return best;
}

std::vector<double> DistortionMatrix::inverse(std::vector<std::string>* warnings) const {
  std::vector<double> inv(size * size, 0.0);
  if (is_identity()) {
    for (std::size_t i = 0; i < size; ++i) inv[i * size + i] = 1.0;
    return inv;
  }

  const double diagonal = std::exp(epsilon) / (size - 1 + std::exp(epsilon));
  const double off_diagonal = 1.0 / (size - 1 + std::exp(epsilon));
  bool closed_form = entries.size() == size * size;
  for (std::size_t u = 0; closed_form && u < size; ++u) {
    for (std::size_t o = 0; o < size; ++o) {
      const double expected = u == o ? diagonal : off_diagonal;
      if (std::abs(at(u, o) - expected) > 1e-12) {
        closed_form = false;
        break;
      }
    }
  }

  if (closed_form) {
    // P = (a-b)I + bJ with unit row sums inverts to (I - bJ)/(a-b).
    const double gap = diagonal - off_diagonal;
    for (std::size_t u = 0; u < size; ++u) {
      for (std::size_t o = 0; o < size; ++o) {
        const double entry = (u == o ? 1.0 : 0.0) - off_diagonal;
        inv[u * size + o] = entry / gap;
      }
    }
  } else {
    Eigen::MatrixXd m(size, size);
    for (std::size_t u = 0; u < size; ++u) {
      for (std::size_t o = 0; o < size; ++o) m(u, o) = at(u, o);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw DataError("singular distortion matrix");
    Eigen::MatrixXd m_inv = lu.inverse();
    for (std::size_t u = 0; u < size; ++u) {
      for (std::size_t o = 0; o < size; ++o) inv[u * size + o] = m_inv(u, o);
    }
  }

  if (warnings) {
    const double condition = one_norm(entries, size) * one_norm(inv, size);
    if (condition > 1e8) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "ill-conditioned distortion matrix (condition ~%.3g)", condition);
      warnings->push_back(buf);
    }
  }
  return inv;
}

DistortionMatrix build_distortion_matrix(double epsilon, std::size_t domain_size) {
  if (domain_size < 2) throw DataError("randomized response needs domain size >= 2");
  if (std::isnan(epsilon) || epsilon <= 0) {
    throw DataError("budget must be positive (epsilon = 0 gives a singular matrix)");
  }

  DistortionMatrix matrix;
  matrix.size = domain_size;
  matrix.epsilon = epsilon;
  matrix.entries.assign(domain_size * domain_size, 0.0);
  if (std::isinf(epsilon)) {
    for (std::size_t i = 0; i < domain_size; ++i) {
      matrix.entries[i * domain_size + i] = 1.0;
    }
    return matrix;
  }

  const double denom = static_cast<double>(domain_size) - 1.0 + std::exp(epsilon);
  const double diagonal = std::exp(epsilon) / denom;
  const double off_diagonal = 1.0 / denom;
  for (std::size_t u = 0; u < domain_size; ++u) {
    for (std::size_t o = 0; o < domain_size; ++o) {
      matrix.entries[u * domain_size + o] = u == o ? diagonal : off_diagonal;
    }
  }
  matrix.validate();
  return matrix;
}

std::vector<DistortionMatrix> build_matrices(const Schema& schema,
                                             std::span<const double> budgets) {
  if (budgets.size() != schema.attribute_count()) {
    throw DataError("need one budget per feature plus one for the label");
  }
  std::vector<DistortionMatrix> matrices;
  matrices.reserve(budgets.size());
  for (std::size_t f = 0; f < schema.feature_count(); ++f) {
    matrices.push_back(
        build_distortion_matrix(budgets[f], schema.features[f].domain_size()));
  }
  matrices.push_back(
      build_distortion_matrix(budgets.back(), schema.label.domain_size()));
  return matrices;
}

double BudgetAllocation::total() const {
  return std::accumulate(per_attribute.begin(), per_attribute.end(), 0.0);
}

void BudgetAllocation::validate(double declared_total) const {
  if (per_attribute.empty()) throw DataError("empty budget allocation");
  const bool all_infinite = std::all_of(per_attribute.begin(), per_attribute.end(),
                                        [](double e) { return std::isinf(e); });
  if (all_infinite) {
    if (!std::isinf(declared_total)) {
      throw DataError("infinite per-attribute budgets need an infinite total");
    }
    return;
  }
  for (double e : per_attribute) {
    if (!(e > 0) || std::isinf(e)) {
      throw DataError("per-attribute budgets must be positive and finite");
    }
  }
  if (std::abs(total() - declared_total) > 1e-9) {
    throw DataError("budget allocation does not sum to the declared total");
  }
}

Dataset perturb_dataset(const Dataset& dataset,
                        std::span<const DistortionMatrix> matrices,
                        std::uint64_t seed) {
  const Schema& schema = *dataset.schema;
  const auto dims = attribute_dims(schema);
  if (matrices.size() != dims.size()) {
    throw DataError("need one distortion matrix per feature plus the label");
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (matrices[i].size != dims[i]) {
      throw DataError("distortion matrix size does not match attribute domain");
    }
  }

  Dataset out{dataset.schema, {}, Provenance::kPerturbed};
  out.records.resize(dataset.size());
  const std::uint64_t base = rng::derive(seed, "rr-perturb");
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    rng::SplitMix64 engine(rng::derive(base, r));
    const auto coords = record_coords(dataset.records[r], schema);
    Record record;
    record.values.reserve(schema.feature_count());
    for (std::size_t a = 0; a < coords.size(); ++a) {
      const auto& matrix = matrices[a];
      std::size_t reported = coords[a];
      if (!matrix.is_identity()) {
        std::span<const double> row(matrix.entries.data() + coords[a] * matrix.size,
                                    matrix.size);
        reported = rng::categorical(engine, row);
      }
      if (a + 1 < coords.size()) {
        record.values.emplace_back(schema.features[a].categorical().domain[reported]);
      } else {
        record.label = schema.label.categorical().domain[reported];
      }
    }
    out.records[r] = std::move(record);
  }
  return out;
}

FrequencyTensor observed_frequencies(const Dataset& perturbed) {
  if (perturbed.provenance != Provenance::kPerturbed) {
    throw DataError("observed frequencies are tabulated from perturbed data only");
  }
  if (perturbed.records.empty()) throw DataError("empty dataset");
  const Schema& schema = *perturbed.schema;
  FrequencyTensor tensor(attribute_dims(schema));
  for (const auto& record : perturbed.records) {
    const auto coords = record_coords(record, schema);
    tensor.at(coords) += 1.0;
  }
  tensor.normalize();
  return tensor;
}

FrequencyTensor apply_inverse(const FrequencyTensor& lambda,
                              std::span<const DistortionMatrix> matrices,
                              std::vector<std::string>* warnings) {
  const auto& dims = lambda.dims();
  if (matrices.size() != dims.size()) {
    throw DataError("need one matrix per tensor mode");
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (matrices[i].size != dims[i]) {
      throw DataError("matrix size does not match tensor mode " + std::to_string(i));
    }
  }

  FrequencyTensor result = lambda;
  std::vector<double> scratch;
  // Stride layout: mode i repeats in blocks of inner(i) cells, outer(i) times.
  for (std::size_t mode = 0; mode < dims.size(); ++mode) {
    const auto inverse = matrices[mode].inverse(warnings);
    const std::size_t d = dims[mode];
    std::size_t inner = 1;
    for (std::size_t j = mode + 1; j < dims.size(); ++j) inner *= dims[j];
    const std::size_t outer = result.cell_count() / (d * inner);

    auto cells = result.cells();
    scratch.assign(d, 0.0);
    for (std::size_t block = 0; block < outer; ++block) {
      const std::size_t base = block * d * inner;
      for (std::size_t offset = 0; offset < inner; ++offset) {
        for (std::size_t u = 0; u < d; ++u) {
          double acc = 0;
          for (std::size_t v = 0; v < d; ++v) {
            acc += inverse[u * d + v] * cells[base + v * inner + offset];
          }
          scratch[u] = acc;
        }
        for (std::size_t u = 0; u < d; ++u) {
          cells[base + u * inner + offset] = scratch[u];
        }
      }
    }
  }
  return result;
}

ReconstructedDistribution reconstruct_joint(const FrequencyTensor& lambda,
                                            std::span<const DistortionMatrix> matrices,
                                            std::shared_ptr<const Schema> schema) {
  ReconstructedDistribution result{FrequencyTensor({1}), std::move(schema), 0, {}};
  result.distribution = apply_inverse(lambda, matrices, &result.warnings);
  result.clamped_cells = result.distribution.clamp_negative_and_normalize();
  return result;
}

std::vector<Record> sample_reconstructed(const ReconstructedDistribution& dist,
                                         std::size_t k, std::uint64_t seed) {
  if (k < 1) throw DataError("need at least one sample");
  if (!dist.distribution.normalized()) {
    throw DataError("distribution must be normalized before sampling");
  }
  const Schema& schema = *dist.schema;
  const auto& dims = dist.distribution.dims();

  rng::SplitMix64 engine(rng::derive(seed, "reconstructed-sample"));
  std::vector<Record> records;
  records.reserve(k);
  std::vector<std::size_t> coords(dims.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t cell = rng::categorical(engine, dist.distribution.cells());
    dist.distribution.coords_of(cell, coords);
    Record record;
    record.values.reserve(schema.feature_count());
    for (std::size_t f = 0; f < schema.feature_count(); ++f) {
      record.values.emplace_back(schema.features[f].categorical().domain[coords[f]]);
    }
    record.label = schema.label.categorical().domain[coords.back()];
    records.push_back(std::move(record));
  }
  return records;
}

prompt::DemonstrationSet ldp_demonstrations(const ReconstructedDistribution& dist,
                                            std::size_t k, std::uint64_t seed,
                                            const prompt::PromptTemplate& tmpl) {
  prompt::DemonstrationSet demos;
  for (const auto& record : sample_reconstructed(dist, k, seed)) {
    demos.items.push_back(prompt::render_demonstration(
        tmpl, *dist.schema, record.values, record.label,
        prompt::RenderSource::kReconstructedSample));
  }
  return demos;
}

}  // namespace dptab::ldp
