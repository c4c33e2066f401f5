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
// Non-LLM baselines trained on DP-protected data: logistic regression fit by
// full-batch gradient descent and Gaussian naive Bayes.

#ifndef DPTAB_BASELINES_HPP_
#define DPTAB_BASELINES_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dptab/dataset.hpp"

namespace dptab::harness {

/// Numeric design matrix: numerical features pass through, categorical cells
/// become their domain index (0/1 for binarized data). Labels map to their
/// domain index.
struct EncodedData {
  std::vector<std::vector<double>> x;
  std::vector<int> y;

  std::size_t size() const { return x.size(); }
};

EncodedData encode_for_training(const Dataset& dataset);

struct LrOptions {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
};

class LogisticRegression {
 public:
  static LogisticRegression train(const EncodedData& data, LrOptions options = {},
                                  std::uint64_t seed = 0);

  double predict_proba(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  bool diverged() const { return diverged_; }

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  bool diverged_ = false;
};

class GaussianNaiveBayes {
 public:
  static GaussianNaiveBayes train(const EncodedData& data, std::uint64_t seed = 0);

  /// Posterior probability of class 1.
  double posterior(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  bool degenerate_prior() const { return degenerate_prior_; }

 private:
  static constexpr double kVarianceFloor = 1e-9;

  std::vector<double> mean_[2];
  std::vector<double> variance_[2];
  double prior_[2] = {0.5, 0.5};
  bool degenerate_prior_ = false;
};

template <typename Model>
double evaluate_accuracy(const Model& model, const EncodedData& data) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (model.predict(data.x[i]) == data.y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace dptab::harness

#endif  // DPTAB_BASELINES_HPP_
