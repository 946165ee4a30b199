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

// Gain scheduling driven by the norm of the velocity estimate.
//
// Mode r uses the gain k_r sized for speeds up to r * v_bar. While the error
// stays in the eta-ball, |xhat2| - eta <= |x2| <= |xhat2| + eta, so the mode
// is switched on the estimate alone:
//
//   up set    D+_r = { |xhat2| >= r v_bar - eta }
//   down set  D-_r = { |xhat2| <= (r - 1) v_bar + eta }   (paper_faithful)
//             D-_r = { |xhat2| <= (r - 1) v_bar - eta }   (hysteresis)
//   flow set  C_r  = closure of the complement of D+_r u D-_r

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "redobs/common.hpp"
#include "redobs/dynamics.hpp"
#include "redobs/observers.hpp"

namespace redobs {

enum class JumpSemantics { paper_faithful, hysteresis };

std::string to_string(JumpSemantics s);
JumpSemantics parse_jump_semantics(const std::string& text);

struct HybridConfig {
  double v_bar = 1.5;
  double eta = 1.0;
  JumpSemantics semantics = JumpSemantics::hysteresis;
  int r_min = 0;

  void validate() const;

  double up_threshold(int r) const { return r * v_bar - eta; }
  double down_threshold(int r) const {
    return semantics == JumpSemantics::paper_faithful ? (r - 1) * v_bar + eta
                                                      : (r - 1) * v_bar - eta;
  }
};

bool jump_up_set(const HybridConfig& config, int r, const Eigen::VectorXd& xhat2);
/// Always false at r == r_min.
bool jump_down_set(const HybridConfig& config, int r, const Eigen::VectorXd& xhat2);
bool flow_set(const HybridConfig& config, int r, const Eigen::VectorXd& xhat2);

/// Range of |xhat2| covered by the flow set of mode r.
struct FlowInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool empty = true;
};

FlowInterval flow_interval(const HybridConfig& config, int r);

/// Lowest mode whose flow set contains xhat2 = 0, i.e. the value the logic
/// settles at once the estimate vanishes. Empty if no mode up to
/// r_min + search_limit qualifies.
std::optional<int> lowest_resting_mode(const HybridConfig& config, int search_limit = 1000);

/// Scheduled gains k_r, tabulated for r = 0..kTableSize-1 and computed on
/// demand beyond.
class GainSchedule {
 public:
  static constexpr int kTableSize = 65;

  GainSchedule(DesignSamples<double> samples, const HybridConfig& config);
  GainSchedule(const RobotModel<double>& model, const HybridConfig& config,
               int points = kDefaultGridPoints);

  double gain(int r) const;
  const DesignSamples<double>& samples() const { return samples_; }

 private:
  DesignSamples<double> samples_;
  HybridConfig config_;
  std::vector<double> table_;
};

double compute_kr(const RobotModel<double>& model, const HybridConfig& config, int r,
                  int points = kDefaultGridPoints);

struct LogicState {
  int r = 0;
  double gain = 0.0;
  long jump_count = 0;
  double last_jump_time = 0.0;
};

struct JumpEvent {
  double t = 0.0;
  int r_old = 0;
  int r_new = 0;
  double xhat2_norm = 0.0;
};

/// At most one jump; the up set wins where both jump sets hold.
LogicState step_logic(const HybridConfig& config, const GainSchedule& schedule,
                      const LogicState& logic, const Eigen::VectorXd& xhat2, double t);

/// Applies jumps at t = 0 from r_guess until xhat2_0 is in no active jump
/// set, or only in the one leading back to the mode just left. Throws
/// std::runtime_error after 1000 jumps.
LogicState initialize_logic(const HybridConfig& config, const GainSchedule& schedule,
                            const Eigen::VectorXd& xhat2_0, int r_guess);

struct SpeedBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds on |x2| implied by |x2 - xhat2| <= eta.
SpeedBounds velocity_sandwich(double eta, const Eigen::VectorXd& xhat2);

}  // namespace redobs
