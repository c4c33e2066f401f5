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

#include "dptab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dptab/error.hpp"

namespace dptab::harness {

EncodedData encode_for_training(const Dataset& dataset) {
  const Schema& schema = *dataset.schema;
  EncodedData data;
  data.x.reserve(dataset.size());
  data.y.reserve(dataset.size());
  for (const auto& record : dataset.records) {
    std::vector<double> row;
    row.reserve(schema.feature_count());
    for (std::size_t f = 0; f < schema.feature_count(); ++f) {
      const auto& feature = schema.features[f];
      if (feature.is_numerical()) {
        row.push_back(std::get<double>(record.values[f]));
      } else {
        auto idx = feature.index_of(std::get<std::string>(record.values[f]));
        if (!idx) throw DataError("value outside domain while encoding");
        row.push_back(static_cast<double>(*idx));
      }
    }
    auto label_idx = schema.label.index_of(record.label);
    if (!label_idx) throw DataError("label outside domain while encoding");
    data.x.push_back(std::move(row));
    data.y.push_back(static_cast<int>(*label_idx));
  }
  return data;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

LogisticRegression LogisticRegression::train(const EncodedData& data,
                                             LrOptions options, std::uint64_t) {
  if (data.size() == 0) throw DataError("cannot train on an empty dataset");
  const std::size_t n = data.size();
  const std::size_t dim = data.x.front().size();

  LogisticRegression model;
  model.weights_.assign(dim, 0.0);

  std::vector<double> gradient(dim);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::fill(gradient.begin(), gradient.end(), 0.0);
    double bias_gradient = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = model.predict_proba(data.x[i]);
      const double err = p - static_cast<double>(data.y[i]);
      for (std::size_t d = 0; d < dim; ++d) gradient[d] += err * data.x[i][d];
      bias_gradient += err;
      const double clipped = std::clamp(p, 1e-12, 1.0 - 1e-12);
      loss -= data.y[i] ? std::log(clipped) : std::log(1.0 - clipped);
    }
    if (std::isnan(loss)) {
      model.diverged_ = true;
      break;
    }
    const double scale = options.learning_rate / static_cast<double>(n);
    for (std::size_t d = 0; d < dim; ++d) model.weights_[d] -= scale * gradient[d];
    model.bias_ -= scale * bias_gradient;
  }
  return model;
}

double LogisticRegression::predict_proba(std::span<const double> x) const {
  double z = bias_;
  for (std::size_t d = 0; d < weights_.size(); ++d) z += weights_[d] * x[d];
  return sigmoid(z);
}

int LogisticRegression::predict(std::span<const double> x) const {
  return predict_proba(x) >= 0.5 ? 1 : 0;
}

GaussianNaiveBayes GaussianNaiveBayes::train(const EncodedData& data, std::uint64_t) {
  if (data.size() == 0) throw DataError("cannot train on an empty dataset");
  const std::size_t dim = data.x.front().size();

  GaussianNaiveBayes model;
  std::size_t counts[2] = {0, 0};
  for (int cls = 0; cls < 2; ++cls) {
    model.mean_[cls].assign(dim, 0.0);
    model.variance_[cls].assign(dim, 0.0);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int cls = data.y[i];
    ++counts[cls];
    for (std::size_t d = 0; d < dim; ++d) model.mean_[cls][d] += data.x[i][d];
  }
  model.degenerate_prior_ = counts[0] == 0 || counts[1] == 0;
  for (int cls = 0; cls < 2; ++cls) {
    model.prior_[cls] =
        static_cast<double>(counts[cls]) / static_cast<double>(data.size());
    if (counts[cls] == 0) continue;
    for (std::size_t d = 0; d < dim; ++d) {
      model.mean_[cls][d] /= static_cast<double>(counts[cls]);
    }
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int cls = data.y[i];
    for (std::size_t d = 0; d < dim; ++d) {
      const double delta = data.x[i][d] - model.mean_[cls][d];
      model.variance_[cls][d] += delta * delta;
    }
  }
  for (int cls = 0; cls < 2; ++cls) {
    if (counts[cls] == 0) {
      model.variance_[cls].assign(dim, kVarianceFloor);
      continue;
    }
    for (std::size_t d = 0; d < dim; ++d) {
      model.variance_[cls][d] = std::max(
          kVarianceFloor, model.variance_[cls][d] / static_cast<double>(counts[cls]));
    }
  }
  return model;
}

double GaussianNaiveBayes::posterior(std::span<const double> x) const {
  double log_joint[2];
  for (int cls = 0; cls < 2; ++cls) {
    if (prior_[cls] == 0.0) {
      log_joint[cls] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double acc = std::log(prior_[cls]);
    for (std::size_t d = 0; d < mean_[cls].size(); ++d) {
      const double var = variance_[cls][d];
      const double delta = x[d] - mean_[cls][d];
      acc += -0.5 * std::log(2.0 * M_PI * var) - delta * delta / (2.0 * var);
    }
    log_joint[cls] = acc;
  }
  if (std::isinf(log_joint[0]) && log_joint[0] < 0) return 1.0;
  if (std::isinf(log_joint[1]) && log_joint[1] < 0) return 0.0;
  const double peak = std::max(log_joint[0], log_joint[1]);
  const double w0 = std::exp(log_joint[0] - peak);
  const double w1 = std::exp(log_joint[1] - peak);
  return w1 / (w0 + w1);
}

int GaussianNaiveBayes::predict(std::span<const double> x) const {
  return posterior(x) >= 0.5 ? 1 : 0;
}

}  // namespace dptab::harness
