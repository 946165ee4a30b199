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

#include <cmath>

#include "redobs/common.hpp"
#include "redobs/dynamics.hpp"

namespace redobs {

/// PD regulation gains and setpoint. Gains are diagonal with positive
/// entries, stored as their diagonals.
template <typename Scalar>
struct PdConfig {
  VectorX<Scalar> kp;
  VectorX<Scalar> kd;
  VectorX<Scalar> x_ref;

  void validate(Eigen::Index n) const {
    detail::require_size(kp.size(), n, "PdConfig(kp)");
    detail::require_size(kd.size(), n, "PdConfig(kd)");
    detail::require_size(x_ref.size(), n, "PdConfig(x_ref)");
    if (!((kp.array() > 0).all() && (kd.array() > 0).all())) {
      throw std::invalid_argument("PD gains must be positive");
    }
  }
};

/// Gravity compensation plus (cos(t/2), -cos(t)).
template <typename Scalar>
VectorX<Scalar> open_loop_1(const RobotModel<Scalar>& model, const VectorX<Scalar>& q, Scalar t) {
  detail::require_size(model.dof(), 2, "open_loop_1");
  using std::cos;
  VectorX<Scalar> extra(2);
  extra << cos(t / 2), -cos(t);
  return gravity(model, q) + extra;
}

/// Gravity compensation plus (sin(t), 1 + sin(2t)).
template <typename Scalar>
VectorX<Scalar> open_loop_2(const RobotModel<Scalar>& model, const VectorX<Scalar>& q, Scalar t) {
  detail::require_size(model.dof(), 2, "open_loop_2");
  using std::sin;
  VectorX<Scalar> extra(2);
  extra << sin(t), 1 + sin(2 * t);
  return gravity(model, q) + extra;
}

/// tau = g(q) + Kp (x_ref - q) - Kd xhat2. The damping term uses the velocity
/// estimate.
template <typename Scalar>
VectorX<Scalar> pd_gravity_feedback(const RobotModel<Scalar>& model,
                                    const PdConfig<Scalar>& config, const VectorX<Scalar>& q,
                                    const VectorX<Scalar>& xhat2) {
  detail::require_size(xhat2.size(), model.dof(), "pd_gravity_feedback(xhat2)");
  return gravity(model, q) + config.kp.cwiseProduct(config.x_ref - q) -
         config.kd.cwiseProduct(xhat2);
}

}  // namespace redobs
