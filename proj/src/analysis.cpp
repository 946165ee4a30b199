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

#include "redobs/analysis.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <ostream>

namespace redobs {

double lyapunov_value(const RobotModel<double>& model, const Eigen::VectorXd& eps,
                      const Eigen::VectorXd& y) {
  detail::require_size(eps.size(), model.dof(), "lyapunov_value(eps)");
  return 0.5 * eps.dot(inertia(model, y) * eps);
}

namespace {

const ObserverSample& observer_at(const Sample& s, ObserverKind which) {
  const auto& obs = s.observer(which);
  if (!obs) throw std::invalid_argument("trajectory does not carry the requested observer");
  return *obs;
}

double speed_bound(const Trajectory& traj, const GainDesign<double>& design, const Sample& s) {
  if (traj.gain_mode == GainMode::scheduled) return s.r * traj.hybrid.v_bar;
  return design.v_max;
}

}  // namespace

LyapunovCheck check_lyapunov_decrease(const Trajectory& traj, const GainDesign<double>& design,
                                      ObserverKind which) {
  LyapunovCheck out;
  out.max_increase = -std::numeric_limits<double>::infinity();
  auto hypotheses = [&](const Sample& s) {
    return observer_at(s, which).eps_norm < design.region_radius &&
           s.x2.norm() <= speed_bound(traj, design, s);
  };
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i];
    const auto& b = traj.samples[i + 1];
    if (!hypotheses(a) || !hypotheses(b)) continue;
    const double va = observer_at(a, which).lyapunov;
    const double vb = observer_at(b, which).lyapunov;
    ++out.pairs_checked;
    out.max_increase = std::max(out.max_increase, vb - va);
    if (vb > va + 1e-8 * (1.0 + va)) {
      if (!out.first_violation_time) out.first_violation_time = a.t;
      ++out.violations;
    }
  }
  return out;
}

std::optional<double> settling_time(const Trajectory& traj, ObserverKind which,
                                    double threshold) {
  if (!(threshold > 0)) throw std::invalid_argument("settling threshold must be positive");
  const auto& s = traj.samples;
  if (s.empty() || observer_at(s.back(), which).eps_norm >= threshold) return std::nullopt;
  for (std::size_t i = s.size(); i-- > 0;) {
    if (observer_at(s[i], which).eps_norm >= threshold) return s[i + 1].t;
  }
  return s.front().t;
}

std::size_t illegal_jump_count(const Trajectory& traj) {
  std::size_t bad = 0;
  const auto& cfg = traj.hybrid;
  for (const auto& j : traj.jumps) {
    bool legal = false;
    if (j.r_new == j.r_old + 1) {
      legal = j.xhat2_norm >= cfg.up_threshold(j.r_old);
    } else if (j.r_new == j.r_old - 1) {
      legal = j.r_old > cfg.r_min && j.xhat2_norm <= cfg.down_threshold(j.r_old);
    }
    if (!legal) ++bad;
  }
  return bad;
}

std::vector<JumpEvent> jumps_from_samples(const Trajectory& traj, ObserverKind which) {
  std::vector<JumpEvent> out;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i - 1];
    const auto& b = traj.samples[i];
    if (a.r != b.r) out.push_back({b.t, a.r, b.r, observer_at(b, which).xhat2.norm()});
  }
  return out;
}

std::size_t chatter_score(const Trajectory& traj) {
  std::size_t score = 0;
  const double window = 10.0 * traj.dt * (1.0 + 1e-9);
  for (std::size_t i = 1; i < traj.jumps.size(); ++i) {
    if (traj.jumps[i].t - traj.jumps[i - 1].t <= window) ++score;
  }
  return score;
}

std::size_t sandwich_violations(const Trajectory& traj, ObserverKind which, double eta) {
  std::size_t bad = 0;
  bool entered = false;
  for (const auto& s : traj.samples) {
    entered = entered || observer_at(s, which).eps_norm <= eta;
    if (!entered) continue;
    const double v = s.x2.norm();
    if (v < s.bounds.lower || v > s.bounds.upper) ++bad;
  }
  return bad;
}

bool r_constant_over_tail(const Trajectory& traj, double fraction) {
  const double t0 = fraction * traj.t_final;
  std::optional<int> r;
  for (const auto& s : traj.samples) {
    if (s.t < t0) continue;
    if (r && *r != s.r) return false;
    r = s.r;
  }
  return true;
}

std::optional<double> observed_decay_rate(const Trajectory& traj, ObserverKind which,
                                          double region_radius) {
  double sum_t = 0, sum_y = 0, sum_tt = 0, sum_ty = 0;
  std::size_t count = 0;
  bool entered = false;
  for (const auto& s : traj.samples) {
    const double e = observer_at(s, which).eps_norm;
    entered = entered || e < region_radius;
    if (!entered) continue;
    if (e < 1e-9) break;
    const double y = std::log(e);
    sum_t += s.t;
    sum_y += y;
    sum_tt += s.t * s.t;
    sum_ty += s.t * y;
    ++count;
  }
  if (count < 10) return std::nullopt;
  const double nn = static_cast<double>(count);
  const double denom = nn * sum_tt - sum_t * sum_t;
  if (denom <= 0) return std::nullopt;
  return -(nn * sum_ty - sum_t * sum_y) / denom;
}

bool StabilityReport::passed() const {
  return lyapunov_violations == 0 && sandwich_violations == 0 && illegal_jumps == 0 &&
         settling_time.has_value();
}

StabilityReport analyze(const Trajectory& traj, ObserverKind which, double threshold) {
  if (traj.samples.empty()) throw std::invalid_argument("empty trajectory");
  StabilityReport r;
  r.observer = which == ObserverKind::reduced ? "reduced" : "full";
  r.settling_time = settling_time(traj, which, threshold);

  const auto lyap = check_lyapunov_decrease(traj, traj.design, which);
  r.lyapunov_violations = lyap.violations;
  r.lyapunov_pairs_checked = lyap.pairs_checked;
  r.max_lyapunov_increase = lyap.max_increase;

  r.initial_error_in_region =
      observer_at(traj.samples.front(), which).eps_norm < traj.design.region_radius;
  r.sandwich_violations = sandwich_violations(traj, which, traj.design.eta);

  if (which == ObserverKind::reduced) {
    r.jump_count = traj.jumps.size();
    r.illegal_jumps = illegal_jump_count(traj);
    r.chatter_score = chatter_score(traj);
  }
  r.final_r = traj.samples.back().r;
  r.r_constant_tail = r_constant_over_tail(traj);

  for (const auto& s : traj.samples) {
    const double e = observer_at(s, which).eps_norm;
    if (e < traj.design.region_radius) {
      r.guaranteed_rate = convergence_rate(traj.design, e);
      break;
    }
  }
  r.observed_rate = observed_decay_rate(traj, which, traj.design.region_radius);
  for (const auto& s : traj.samples) r.max_speed = std::max(r.max_speed, s.x2.norm());
  return r;
}

std::pair<StabilityReport, StabilityReport> compare_observers(const Trajectory& traj,
                                                              double threshold) {
  if (traj.observers != ObserverMode::both) {
    throw std::invalid_argument("observer comparison needs both observers");
  }
  return {analyze(traj, ObserverKind::reduced, threshold),
          analyze(traj, ObserverKind::full, threshold)};
}

void write_report(std::ostream& os, const StabilityReport& r, const std::string& prefix) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(10);
  auto opt = [&](const std::optional<double>& v) {
    if (v) {
      os << *v;
    } else {
      os << "none";
    }
  };
  os << prefix << "observer: " << r.observer << '\n';
  os << prefix << "settling_time: ";
  if (r.settling_time) {
    os << *r.settling_time;
  } else {
    os << "not-settled";
  }
  os << '\n';
  os << prefix << "lyapunov_pairs_checked: " << r.lyapunov_pairs_checked << '\n';
  os << prefix << "lyapunov_violations: " << r.lyapunov_violations << '\n';
  os << prefix << "max_lyapunov_increase: " << r.max_lyapunov_increase << '\n';
  os << prefix << "initial_error_in_region: " << (r.initial_error_in_region ? "true" : "false")
     << '\n';
  os << prefix << "sandwich_violations: " << r.sandwich_violations << '\n';
  os << prefix << "jump_count: " << r.jump_count << '\n';
  os << prefix << "illegal_jumps: " << r.illegal_jumps << '\n';
  os << prefix << "chatter_score: " << r.chatter_score << '\n';
  os << prefix << "final_r: " << r.final_r << '\n';
  os << prefix << "r_constant_final_20pct: " << (r.r_constant_tail ? "true" : "false") << '\n';
  os << prefix << "guaranteed_rate: ";
  opt(r.guaranteed_rate);
  os << '\n' << prefix << "observed_rate: ";
  opt(r.observed_rate);
  os << '\n' << prefix << "max_speed: " << r.max_speed << '\n';
  os << prefix << "checks_passed: " << (r.passed() ? "true" : "false") << '\n';
  os.flags(flags);
  os.precision(precision);
}

}  // namespace redobs
