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

#include "redobs/hybrid_logic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace redobs {

std::string to_string(JumpSemantics s) {
  return s == JumpSemantics::paper_faithful ? "paper" : "hysteresis";
}

JumpSemantics parse_jump_semantics(const std::string& text) {
  if (text == "paper" || text == "paper_faithful") return JumpSemantics::paper_faithful;
  if (text == "hysteresis") return JumpSemantics::hysteresis;
  throw std::invalid_argument("unknown jump semantics '" + text + "'");
}

void HybridConfig::validate() const {
  if (!(v_bar > 0)) throw std::invalid_argument("v_bar must be positive");
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  if (r_min < 0) throw std::invalid_argument("r_min must be nonnegative");
}

bool jump_up_set(const HybridConfig& config, int r, const Eigen::VectorXd& xhat2) {
  return xhat2.norm() >= config.up_threshold(r);
}

bool jump_down_set(const HybridConfig& config, int r, const Eigen::VectorXd& xhat2) {
  if (r <= config.r_min) return false;
  return xhat2.norm() <= config.down_threshold(r);
}

FlowInterval flow_interval(const HybridConfig& config, int r) {
  // Complement of the jump sets: down_threshold < |x| < up_threshold.
  const double hi = config.up_threshold(r);
  const double lo = r > config.r_min ? config.down_threshold(r) : -1.0;
  FlowInterval out;
  out.lower = std::max(lo, 0.0);
  out.upper = hi;
  out.empty = !(hi > out.lower);
  return out;
}

bool flow_set(const HybridConfig& config, int r, const Eigen::VectorXd& xhat2) {
  const auto interval = flow_interval(config, r);
  if (interval.empty) return false;
  const double v = xhat2.norm();
  return v >= interval.lower && v <= interval.upper;
}

std::optional<int> lowest_resting_mode(const HybridConfig& config, int search_limit) {
  for (int r = config.r_min; r <= config.r_min + search_limit; ++r) {
    const auto interval = flow_interval(config, r);
    if (!interval.empty && interval.lower == 0.0) return r;
  }
  return std::nullopt;
}

GainSchedule::GainSchedule(DesignSamples<double> samples, const HybridConfig& config)
    : samples_(std::move(samples)), config_(config) {
  config_.validate();
  table_.reserve(kTableSize);
  for (int r = 0; r < kTableSize; ++r) {
    table_.push_back(injection_gain(samples_, config_.eta, r * config_.v_bar));
  }
}

GainSchedule::GainSchedule(const RobotModel<double>& model, const HybridConfig& config,
                           int points)
    : GainSchedule(sample_design(model, points), config) {}

double GainSchedule::gain(int r) const {
  if (r < 0) throw std::invalid_argument("mode index must be nonnegative");
  if (r < kTableSize) return table_[static_cast<std::size_t>(r)];
  return injection_gain(samples_, config_.eta, r * config_.v_bar);
}

double compute_kr(const RobotModel<double>& model, const HybridConfig& config, int r,
                  int points) {
  config.validate();
  if (r < config.r_min) throw std::invalid_argument("mode index below r_min");
  return injection_gain(sample_design(model, points), config.eta, r * config.v_bar);
}

namespace {

int next_mode(const HybridConfig& config, int r, const Eigen::VectorXd& xhat2) {
  if (jump_up_set(config, r, xhat2)) return r + 1;
  if (jump_down_set(config, r, xhat2)) return r - 1;
  return r;
}

}  // namespace

LogicState step_logic(const HybridConfig& config, const GainSchedule& schedule,
                      const LogicState& logic, const Eigen::VectorXd& xhat2, double t) {
  LogicState out = logic;
  const int r_next = next_mode(config, logic.r, xhat2);
  if (r_next != logic.r) {
    out.r = r_next;
    out.gain = schedule.gain(r_next);
    out.jump_count += 1;
    out.last_jump_time = t;
  }
  return out;
}

LogicState initialize_logic(const HybridConfig& config, const GainSchedule& schedule,
                            const Eigen::VectorXd& xhat2_0, int r_guess) {
  config.validate();
  if (r_guess < config.r_min) throw std::invalid_argument("r_guess below r_min");

  constexpr int kMaxIterations = 1000;
  int r = r_guess;
  std::optional<int> previous;
  for (int i = 0; i < kMaxIterations; ++i) {
    const int r_next = next_mode(config, r, xhat2_0);
    if (r_next == r || (previous && r_next == *previous)) {
      return {r, schedule.gain(r), 0, 0.0};
    }
    previous = r;
    r = r_next;
  }
  throw std::runtime_error("logic initialization did not settle within 1000 jumps");
}

SpeedBounds velocity_sandwich(double eta, const Eigen::VectorXd& xhat2) {
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  const double v = xhat2.norm();
  return {std::max(0.0, v - eta), v + eta};
}

}  // namespace redobs
