// SPDX-License-Identifier: Apache-2.0
//
// mmce - wideband mmWave MIMO channel estimation with hybrid beamforming
// and low-resolution ADCs.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MMCE_ERRORS_HPP
#define MMCE_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmce {

/// Invalid argument values or inconsistent dimensions, detected up front.
class ParameterError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Structurally valid input that is numerically unusable (e.g. a zero
/// precoder whose power constraint cannot be met).
class DegenerateInputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A linear system without full column rank.
class SingularSystemError : public std::runtime_error {
  public:
    SingularSystemError(const std::string &what, std::int64_t rank, std::int64_t cols)
        : std::runtime_error(what), rank(rank), cols(cols) {}
    std::int64_t rank = 0;
    std::int64_t cols = 0;
};

/// Numerical failure in the middle of an iterative solver. For greedy
/// pursuits the support selected before the failure is attached.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
    NumericalError(const std::string &what, std::vector<std::int64_t> partial_support)
        : std::runtime_error(what), support(std::move(partial_support)) {}
    std::vector<std::int64_t> support;
};

} // namespace mmce

#endif
