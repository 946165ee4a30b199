// Copyright 2026 The redobs Authors
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

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace redobs {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Number of configuration samples used by extremal eigenvalue and gain
/// searches over the joint space.
inline constexpr int kDefaultGridPoints = 2048;

/// Smallest admissible output-injection gain (1/s).
inline constexpr double kMinGain = 0.01;

/// Raised when the inertia matrix cannot be inverted reliably.
class SingularInertiaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an integrated state leaves the numerically sane range.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_size(Eigen::Index actual, Eigen::Index expected, const char* what) {
  if (actual != expected) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(expected) + ", got " +
                                std::to_string(actual));
  }
}

}  // namespace detail
}  // namespace redobs
