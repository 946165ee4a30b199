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

// Velocity observers for a manipulator whose joint positions y = q are
// measured.
//
// The reduced-order observer integrates only z and defines the estimate
//
//   xhat2 = z + k * y
//   M(y) z' = -C(y, xhat2) xhat2 - F xhat2 - g(y) + tau - M(y) k xhat2
//
// so the error e = x2 - xhat2 obeys
//
//   M(y) e' = -C(y, x2) e - C(y, xhat2) e - F e - k M(y) e
//
// independently of tau and g. With V = e' M(y) e / 2 and a speed bound
// |x2| <= v_max, V decreases while |e| < eta whenever
//
//   k >= max_y [c0(y) (v_max + eta) - lambda_min(F)] / lambda_min(M(y)).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "redobs/common.hpp"
#include "redobs/dynamics.hpp"

namespace redobs {

template <typename Scalar>
struct GainDesign {
  Scalar eta{};
  Scalar v_max{};
  Scalar k0{};
  Scalar lambda1{};
  Scalar lambda2{};
  /// Radius of the guaranteed region of attraction, eta * sqrt(lambda1 / lambda2).
  Scalar region_radius{};
};

/// Gain guaranteeing Lyapunov decrease inside the eta-ball for speeds up to
/// speed_bound, clamped below by kMinGain.
template <typename Scalar>
Scalar injection_gain(const DesignSamples<Scalar>& samples, Scalar eta, Scalar speed_bound) {
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Scalar k = (samples.coriolis_bound[i] * (speed_bound + eta) - samples.damping_min_eig) /
                     samples.inertia_min_eig[i];
    best = std::max(best, k);
  }
  return std::max(best, Scalar(kMinGain));
}

template <typename Scalar>
GainDesign<Scalar> design_gain(const DesignSamples<Scalar>& samples, Scalar eta, Scalar v_max) {
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  if (!(v_max >= 0)) throw std::invalid_argument("v_max must be nonnegative");
  using std::sqrt;
  const auto bounds = samples.spectral_bounds();
  GainDesign<Scalar> d;
  d.eta = eta;
  d.v_max = v_max;
  d.k0 = injection_gain(samples, eta, v_max);
  d.lambda1 = bounds.lambda1;
  d.lambda2 = bounds.lambda2;
  d.region_radius = eta * sqrt(bounds.lambda1 / bounds.lambda2);
  return d;
}

template <typename Scalar>
GainDesign<Scalar> compute_k0(const RobotModel<Scalar>& model, Scalar eta, Scalar v_max,
                              int points = kDefaultGridPoints) {
  return design_gain(sample_design(model, points), eta, v_max);
}

/// Gain from the uniform bounds c0 <= c0_max and lambda_min(M) >= 2 lambda1
/// taken separately. Never smaller than the grid gain.
template <typename Scalar>
Scalar conservative_k0(const DesignSamples<Scalar>& samples, Scalar eta, Scalar v_max) {
  const auto bounds = samples.spectral_bounds();
  const Scalar k = (samples.coriolis_bound_max * (v_max + eta) - samples.damping_min_eig) /
                   (Scalar(2) * bounds.lambda1);
  return std::max(k, Scalar(kMinGain));
}

/// Guaranteed exponential rate for errors starting in a compact subset of the
/// region of attraction whose largest norm is eps_max.
template <typename Scalar>
Scalar convergence_rate(const GainDesign<Scalar>& design, Scalar eps_max) {
  using std::sqrt;
  return design.eta - sqrt(design.lambda2 / design.lambda1) * eps_max;
}

// ---------------------------------------------------------------------------

template <typename Scalar>
struct ReducedObserverState {
  VectorX<Scalar> z;
  Scalar gain{};

  static ReducedObserverState from_estimate(const VectorX<Scalar>& xhat2,
                                            const VectorX<Scalar>& y, Scalar gain) {
    return {xhat2 - gain * y, gain};
  }

  VectorX<Scalar> estimate(const VectorX<Scalar>& y) const { return z + gain * y; }

  /// Changes the gain keeping the estimate at y unchanged.
  void rebase(Scalar new_gain, const VectorX<Scalar>& y) {
    z += (gain - new_gain) * y;
    gain = new_gain;
  }
};

/// Time derivative of z.
template <typename Scalar>
VectorX<Scalar> reduced_observer_derivative(const RobotModel<Scalar>& model,
                                            const ReducedObserverState<Scalar>& obs,
                                            const VectorX<Scalar>& y,
                                            const VectorX<Scalar>& tau) {
  const auto n = model.dof();
  detail::require_size(obs.z.size(), n, "reduced_observer_derivative(z)");
  detail::require_size(y.size(), n, "reduced_observer_derivative(y)");
  detail::require_size(tau.size(), n, "reduced_observer_derivative(tau)");
  if (!(obs.gain > 0)) throw std::invalid_argument("observer gain must be positive");

  const VectorX<Scalar> xhat2 = obs.estimate(y);
  const VectorX<Scalar> rhs =
      -model.coriolis(y, xhat2) * xhat2 - model.damping() * xhat2 - model.gravity(y) + tau;
  return solve_inertia(model, y, rhs) - obs.gain * xhat2;
}

// ---------------------------------------------------------------------------

/// Classical high-gain full-order observer, used as a comparison baseline:
///
///   xhat1' = xhat2 + kd e
///   M(y) xhat2' = -C(y, xhat2) xhat2 - F xhat2 - g(y) + tau + kp e
///
/// with e = y - xhat1.
template <typename Scalar>
struct FullOrderObserverState {
  VectorX<Scalar> position;
  VectorX<Scalar> velocity;
  Scalar kp{};
  Scalar kd{};
};

/// kd = k0 and kp = k0^2 match the injection bandwidth of a reduced-order
/// observer with gain k0.
template <typename Scalar>
std::pair<Scalar, Scalar> matched_full_order_gains(Scalar k0) {
  return {k0 * k0, k0};
}

template <typename Scalar>
struct FullOrderDerivative {
  VectorX<Scalar> position;
  VectorX<Scalar> velocity;
};

template <typename Scalar>
FullOrderDerivative<Scalar> full_order_observer_derivative(
    const RobotModel<Scalar>& model, const FullOrderObserverState<Scalar>& obs,
    const VectorX<Scalar>& y, const VectorX<Scalar>& tau) {
  const auto n = model.dof();
  detail::require_size(obs.position.size(), n, "full_order_observer_derivative(position)");
  detail::require_size(obs.velocity.size(), n, "full_order_observer_derivative(velocity)");
  detail::require_size(y.size(), n, "full_order_observer_derivative(y)");
  detail::require_size(tau.size(), n, "full_order_observer_derivative(tau)");
  if (!(obs.kp > 0 && obs.kd > 0)) throw std::invalid_argument("observer gains must be positive");

  const VectorX<Scalar> e = y - obs.position;
  const auto& v = obs.velocity;
  const VectorX<Scalar> rhs =
      -model.coriolis(y, v) * v - model.damping() * v - model.gravity(y) + tau + obs.kp * e;
  return {v + obs.kd * e, solve_inertia(model, y, rhs)};
}

}  // namespace redobs
