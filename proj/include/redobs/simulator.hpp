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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "redobs/common.hpp"
#include "redobs/controllers.hpp"
#include "redobs/dynamics.hpp"
#include "redobs/hybrid_logic.hpp"
#include "redobs/observers.hpp"

namespace redobs {

enum class ControllerKind { zero, gravity, open_loop_1, open_loop_2, pd };
enum class ObserverMode { reduced, full, both };
enum class GainMode { constant, scheduled };
enum class ObserverKind { reduced, full };

std::string to_string(ControllerKind k);
std::string to_string(ObserverMode m);
std::string to_string(GainMode m);
ControllerKind parse_controller_kind(const std::string& text);
ObserverMode parse_observer_mode(const std::string& text);
GainMode parse_gain_mode(const std::string& text);

struct ModelSpec {
  enum class Kind { two_link, single_link };
  Kind kind = Kind::two_link;
  TwoLinkParams two_link;
  SingleLinkParams single_link;

  std::shared_ptr<const RobotModel<double>> build() const;
  Eigen::Index dof() const { return kind == Kind::two_link ? 2 : 1; }
};

struct ControllerSpec {
  ControllerKind kind = ControllerKind::zero;
  PdConfig<double> pd;
};

struct Scenario {
  std::string name;
  std::string description;
  ModelSpec model;
  Eigen::VectorXd q0;
  Eigen::VectorXd dq0;
  Eigen::VectorXd xhat2_0;
  ControllerSpec controller;
  ObserverMode observers = ObserverMode::reduced;
  GainMode gain = GainMode::constant;
  double eta = 1.0;
  double v_max = 1.5;
  /// Multiplies every designed gain. 1 except for deliberately mistuned runs.
  double gain_scale = 1.0;
  HybridConfig hybrid;
  int r_guess = 1;
  double dt = 1e-3;
  double t_final = 20.0;
  int grid_points = kDefaultGridPoints;

  void validate() const;
  std::size_t step_count() const;
};

struct ObserverSample {
  Eigen::VectorXd xhat2;
  Eigen::VectorXd eps;
  double eps_norm = 0.0;
  double lyapunov = 0.0;
};

struct Sample {
  double t = 0.0;
  Eigen::VectorXd x1;
  Eigen::VectorXd x2;
  Eigen::VectorXd tau;
  std::optional<ObserverSample> reduced;
  std::optional<ObserverSample> full;
  int r = 0;
  /// Gain of the reduced observer over the step starting at this sample.
  double gain = 0.0;
  SpeedBounds bounds;

  const std::optional<ObserverSample>& observer(ObserverKind which) const {
    return which == ObserverKind::reduced ? reduced : full;
  }
};

struct Trajectory {
  std::string scenario;
  ObserverMode observers = ObserverMode::reduced;
  GainMode gain_mode = GainMode::constant;
  HybridConfig hybrid;
  GainDesign<double> design;
  double full_kp = 0.0;
  double full_kd = 0.0;
  double dt = 0.0;
  double t_final = 0.0;
  std::vector<Sample> samples;
  std::vector<JumpEvent> jumps;

  bool has(ObserverKind which) const;
  /// The observer shown in single-observer exports: reduced when present.
  ObserverKind primary() const;
};

/// Classical fourth-order Runge-Kutta step of x' = f(t, x).
template <typename F>
Eigen::VectorXd rk4_step(F&& f, double t, const Eigen::VectorXd& x, double dt) {
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + dt / 2, x + dt / 2 * k1);
  const Eigen::VectorXd k3 = f(t + dt / 2, x + dt / 2 * k2);
  const Eigen::VectorXd k4 = f(t + dt, x + dt * k3);
  return x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

Eigen::VectorXd compute_torque(const RobotModel<double>& model, const ControllerSpec& controller,
                               const Eigen::VectorXd& q, const Eigen::VectorXd& xhat2, double t);

/// Integrates plant and observers jointly with fixed-step RK4. The logic
/// mode is held within a step and updated at step boundaries; on a gain
/// change z is rebased so the estimate stays continuous. Throws
/// SimulationError on blow-up (any state component beyond 1e6) and
/// SingularInertiaError on inertia inversion failure.
Trajectory simulate(const Scenario& scenario);

std::vector<Scenario> builtin_scenarios();
std::optional<Scenario> find_builtin_scenario(const std::string& name);

}  // namespace redobs
