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

#ifndef DPTAB_TENSOR_HPP_
#define DPTAB_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace dptab::ldp {

/// Dense joint-frequency tensor over the attribute domains, stored row-major
/// with the last attribute (the label) varying fastest. That layout matches
/// the flattening under which the stacked per-attribute transition matrices
/// act as their Kronecker product.
class FrequencyTensor {
 public:
  /// Refuses joint domains above this many cells; reconstruction over larger
  /// products is not tractable (mirrors the 14-binary-feature cap).
  static constexpr std::size_t kMaxCells = std::size_t{1} << 20;

  explicit FrequencyTensor(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t cell_count() const { return cells_.size(); }

  std::span<double> cells() { return cells_; }
  std::span<const double> cells() const { return cells_; }

  double& at(std::span<const std::size_t> coords) {
    return cells_[flat_index(coords)];
  }
  double at(std::span<const std::size_t> coords) const {
    return cells_[flat_index(coords)];
  }

  std::size_t flat_index(std::span<const std::size_t> coords) const;
  void coords_of(std::size_t flat, std::span<std::size_t> out) const;

  double sum() const;
  bool normalized() const { return normalized_; }

  /// Divides by the total mass; throws DataError when the mass is <= 0.
  void normalize();

  /// Clamps negative cells to zero, then normalizes. Returns the number of
  /// clamped cells.
  std::size_t clamp_negative_and_normalize();

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> cells_;
  bool normalized_ = false;
};

}  // namespace dptab::ldp

#endif  // DPTAB_TENSOR_HPP_
