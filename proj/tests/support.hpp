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

// Independent oracles shared by the unit and acceptance tests. Nothing here
// reuses the closed forms of the library.

#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "redobs/dynamics.hpp"

namespace redobs::testing {

/// Frozen values for the default two-link arm, eta = 1, v_max = 1.5 and a
/// 2048-point grid. Produced offline with numpy from the Jacobian-based mass
/// matrix below and a dense eigenvalue sweep.
inline constexpr double kLambda1 = 0.76401267242969;
inline constexpr double kLambda2 = 40.902636328765;
inline constexpr double kK0 = 13.357983048433708;
inline constexpr double kKr[] = {5.321460479046021, 13.357983048433708, 21.394505617821395,
                                 29.43102818720908, 37.46755075659677, 45.50407332598446};
inline constexpr double kConservativeK0 = 40.29278378402821;
/// Largest root of 10x^3 - 38x^2 + 30x - 1 (sympy nroots, 20 digits).
inline constexpr double kKappaSquared = 2.7043490999210755429;

/// Mass matrix assembled from the link Jacobians of thin rods:
/// M = sum_i m_i Jv_i' Jv_i + I_i Jw_i' Jw_i.
inline Eigen::Matrix2d lagrangian_inertia(const TwoLinkParams& p, const Eigen::Vector2d& q) {
  const double d1 = p.L1 / 2, d2 = p.L2 / 2;
  const double i1 = p.m1 * p.L1 * p.L1 / 12, i2 = p.m2 * p.L2 * p.L2 / 12;
  const double s1 = std::sin(q(0)), c1 = std::cos(q(0));
  const double s12 = std::sin(q(0) + q(1)), c12 = std::cos(q(0) + q(1));
  Eigen::Matrix2d jv1;
  jv1 << -d1 * s1, 0, d1 * c1, 0;
  Eigen::Matrix2d jv2;
  jv2 << -p.L1 * s1 - d2 * s12, -d2 * s12, p.L1 * c1 + d2 * c12, d2 * c12;
  Eigen::RowVector2d jw1(1, 0), jw2(1, 1);
  return p.m1 * jv1.transpose() * jv1 + p.m2 * jv2.transpose() * jv2 +
         i1 * jw1.transpose() * jw1 + i2 * jw2.transpose() * jw2;
}

/// Potential energy from the heights of the two centers of mass.
inline double lagrangian_potential(const TwoLinkParams& p, const Eigen::Vector2d& q) {
  const double y1 = p.L1 / 2 * std::sin(q(0));
  const double y2 = p.L1 * std::sin(q(0)) + p.L2 / 2 * std::sin(q(0) + q(1));
  return p.gravity_accel * (p.m1 * y1 + p.m2 * y2);
}

/// Christoffel-symbol Coriolis matrix from central differences of the
/// Jacobian mass matrix.
inline Eigen::Matrix2d christoffel_coriolis(const TwoLinkParams& p, const Eigen::Vector2d& q,
                                            const Eigen::Vector2d& v, double h = 1e-5) {
  Eigen::Matrix2d dm[2];
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e(i) = h;
    dm[i] = (lagrangian_inertia(p, q + e) - lagrangian_inertia(p, q - e)) / (2 * h);
  }
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) {
        c(k, j) += 0.5 * (dm[i](k, j) + dm[j](k, i) - dm[k](i, j)) * v(i);
      }
    }
  }
  return c;
}

class Random {
 public:
  explicit Random(unsigned seed) : gen_(seed) {}

  Eigen::VectorXd angles(Eigen::Index n) {
    std::uniform_real_distribution<double> d(-std::numbers::pi, std::numbers::pi);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = d(gen_);
    return v;
  }

  Eigen::VectorXd normal(Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = d(gen_);
    return v;
  }

  Eigen::VectorXd unit(Eigen::Index n) {
    Eigen::VectorXd v = normal(n);
    return v / v.norm();
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace redobs::testing
