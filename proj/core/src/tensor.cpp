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

#include "dptab/tensor.hpp"

#include <numeric>

#include "dptab/error.hpp"

namespace dptab::ldp {

FrequencyTensor::FrequencyTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)) {
  if (dims_.empty()) throw DataError("tensor needs at least one dimension");
  std::size_t count = 1;
  for (std::size_t d : dims_) {
    if (d == 0) throw DataError("tensor dimension of size zero");
    if (count > kMaxCells / d) {
      throw DataError("joint domain too large: more than " +
                      std::to_string(kMaxCells) + " cells");
    }
    count *= d;
  }
  cells_.assign(count, 0.0);
}

std::size_t FrequencyTensor::flat_index(std::span<const std::size_t> coords) const {
  if (coords.size() != dims_.size()) throw DataError("coordinate rank mismatch");
  std::size_t index = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (coords[i] >= dims_[i]) throw DataError("coordinate out of range");
    index = index * dims_[i] + coords[i];
  }
  return index;
}

void FrequencyTensor::coords_of(std::size_t flat, std::span<std::size_t> out) const {
  for (std::size_t i = dims_.size(); i-- > 0;) {
    out[i] = flat % dims_[i];
    flat /= dims_[i];
  }
}

double FrequencyTensor::sum() const {
  return std::accumulate(cells_.begin(), cells_.end(), 0.0);
}

void FrequencyTensor::normalize() {
  const double total = sum();
  if (!(total > 0)) throw DataError("cannot normalize tensor with mass <= 0");
  for (double& cell : cells_) cell /= total;
  normalized_ = true;
}

std::size_t FrequencyTensor::clamp_negative_and_normalize() {
  std::size_t clamped = 0;
  for (double& cell : cells_) {
    if (cell < 0) {
      cell = 0;
      ++clamped;
    }
  }
  normalize();
  return clamped;
}

}  // namespace dptab::ldp
