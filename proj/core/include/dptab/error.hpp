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

#ifndef DPTAB_ERROR_HPP_
#define DPTAB_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dptab {

/// Base class for all dptab exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration files, schemas, or templates.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid data, arguments, or violated preconditions.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Completion backend transport or protocol failures.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// A GROUP BY bucket received no records. Carries the bucket id so the
/// caller can resample or report.
class EmptyGroupError : public DataError {
 public:
  explicit EmptyGroupError(std::string bucket)
      : DataError("empty GROUP BY bucket: " + bucket), bucket_(std::move(bucket)) {}

  const std::string& bucket() const { return bucket_; }

 private:
  std::string bucket_;
};

}  // namespace dptab

#endif  // DPTAB_ERROR_HPP_
