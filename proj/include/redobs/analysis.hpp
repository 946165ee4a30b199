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

// Post-hoc checks of the observer stability claims on recorded trajectories.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "redobs/simulator.hpp"

namespace redobs {

/// Default threshold on |eps| used for settling times (rad/s).
inline constexpr double kSettlingThreshold = 0.01;

/// V = eps' M(y) eps / 2.
double lyapunov_value(const RobotModel<double>& model, const Eigen::VectorXd& eps,
                      const Eigen::VectorXd& y);

struct LyapunovCheck {
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;
  /// Largest V(t + dt) - V(t) among checked pairs; -inf when none.
  double max_increase = 0.0;
  std::optional<double> first_violation_time;
};

/// Over consecutive sample pairs where both endpoints satisfy
/// |eps| < region_radius and |x2| <= speed bound (v_max, or r * v_bar in
/// scheduled mode), requires V(t + dt) <= V(t) + 1e-8 (1 + V(t)).
LyapunovCheck check_lyapunov_decrease(const Trajectory& traj, const GainDesign<double>& design,
                                      ObserverKind which = ObserverKind::reduced);

/// First time after which |eps| stays below threshold through the end of the
/// trajectory; empty when the last sample is not below it.
std::optional<double> settling_time(const Trajectory& traj, ObserverKind which,
                                    double threshold = kSettlingThreshold);

/// Jumps whose membership condition does not hold at the recorded estimate
/// norm, or that change r by other than one.
std::size_t illegal_jump_count(const Trajectory& traj);

/// Jump events implied by changes of r between consecutive samples, for
/// trajectories read back from CSV.
std::vector<JumpEvent> jumps_from_samples(const Trajectory& traj, ObserverKind which);

/// Number of jumps that follow the previous jump within 10 steps.
std::size_t chatter_score(const Trajectory& traj);

/// Samples after |eps| first enters the eta-ball at which |x2| falls outside
/// the recorded sandwich bounds.
std::size_t sandwich_violations(const Trajectory& traj, ObserverKind which, double eta);

/// True when r takes a single value over the samples with t >= fraction * t_final.
bool r_constant_over_tail(const Trajectory& traj, double fraction = 0.8);

/// Least-squares slope of -log|eps| over the samples between the first entry
/// into the region of attraction and the point |eps| reaches 1e-9. This is
/// the observed rate, reported next to the guaranteed one.
std::optional<double> observed_decay_rate(const Trajectory& traj, ObserverKind which,
                                          double region_radius);

struct StabilityReport {
  std::string observer;
  std::optional<double> settling_time;
  double max_lyapunov_increase = 0.0;
  std::size_t lyapunov_violations = 0;
  std::size_t lyapunov_pairs_checked = 0;
  bool initial_error_in_region = false;
  std::size_t sandwich_violations = 0;
  std::size_t jump_count = 0;
  std::size_t illegal_jumps = 0;
  std::size_t chatter_score = 0;
  int final_r = 0;
  bool r_constant_tail = false;
  std::optional<double> guaranteed_rate;
  std::optional<double> observed_rate;
  double max_speed = 0.0;

  /// Lyapunov decrease, sandwich validity, legal jumps and settling.
  bool passed() const;
};

StabilityReport analyze(const Trajectory& traj, ObserverKind which,
                        double threshold = kSettlingThreshold);

/// Reduced and full-order reports side by side. Throws std::invalid_argument
/// unless the trajectory carries both observers.
std::pair<StabilityReport, StabilityReport> compare_observers(
    const Trajectory& traj, double threshold = kSettlingThreshold);

/// key: value lines; keys are prefixed with prefix.
void write_report(std::ostream& os, const StabilityReport& report, const std::string& prefix);

}  // namespace redobs
