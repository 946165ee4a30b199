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

#include "redobs/simulator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace redobs {

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::zero: return "zero";
    case ControllerKind::gravity: return "gravity";
    case ControllerKind::open_loop_1: return "open_loop_1";
    case ControllerKind::open_loop_2: return "open_loop_2";
    case ControllerKind::pd: return "pd";
  }
  return "?";
}

std::string to_string(ObserverMode m) {
  switch (m) {
    case ObserverMode::reduced: return "reduced";
    case ObserverMode::full: return "full";
    case ObserverMode::both: return "both";
  }
  return "?";
}

std::string to_string(GainMode m) { return m == GainMode::constant ? "constant" : "scheduled"; }

ControllerKind parse_controller_kind(const std::string& text) {
  for (auto k : {ControllerKind::zero, ControllerKind::gravity, ControllerKind::open_loop_1,
                 ControllerKind::open_loop_2, ControllerKind::pd}) {
    if (text == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown controller '" + text + "'");
}

ObserverMode parse_observer_mode(const std::string& text) {
  for (auto m : {ObserverMode::reduced, ObserverMode::full, ObserverMode::both}) {
    if (text == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown observer mode '" + text + "'");
}

GainMode parse_gain_mode(const std::string& text) {
  if (text == "constant") return GainMode::constant;
  if (text == "scheduled") return GainMode::scheduled;
  throw std::invalid_argument("unknown gain mode '" + text + "'");
}

std::shared_ptr<const RobotModel<double>> ModelSpec::build() const {
  if (kind == Kind::two_link) return std::make_shared<TwoLinkArm<double>>(two_link);
  return std::make_shared<SingleLink<double>>(single_link);
}

void Scenario::validate() const {
  const auto n = model.dof();
  detail::require_size(q0.size(), n, "scenario q0");
  detail::require_size(dq0.size(), n, "scenario dq0");
  detail::require_size(xhat2_0.size(), n, "scenario xhat2_0");
  if (!(q0.allFinite() && dq0.allFinite() && xhat2_0.allFinite())) {
    throw std::invalid_argument("scenario initial values must be finite");
  }
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (!(t_final > dt)) throw std::invalid_argument("t_final must exceed dt");
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  if (!(v_max >= 0)) throw std::invalid_argument("v_max must be nonnegative");
  if (!(gain_scale > 0)) throw std::invalid_argument("gain_scale must be positive");
  if (grid_points < 2) throw std::invalid_argument("grid_points must be at least 2");
  if (controller.kind == ControllerKind::pd) controller.pd.validate(n);
  if ((controller.kind == ControllerKind::open_loop_1 ||
       controller.kind == ControllerKind::open_loop_2) &&
      n != 2) {
    throw std::invalid_argument("open-loop profiles are defined for two joints");
  }
  if (gain == GainMode::scheduled) {
    hybrid.validate();
    if (observers != ObserverMode::reduced) {
      throw std::invalid_argument("scheduled gain requires the reduced observer only");
    }
    if (r_guess < hybrid.r_min) throw std::invalid_argument("r_guess below r_min");
  }
}

std::size_t Scenario::step_count() const {
  // Tolerates t_final / dt landing a few ulps below an integer.
  return static_cast<std::size_t>(std::floor(t_final / dt + 1e-9));
}

bool Trajectory::has(ObserverKind which) const {
  if (which == ObserverKind::reduced) return observers != ObserverMode::full;
  return observers != ObserverMode::reduced;
}

ObserverKind Trajectory::primary() const {
  return has(ObserverKind::reduced) ? ObserverKind::reduced : ObserverKind::full;
}

Eigen::VectorXd compute_torque(const RobotModel<double>& model, const ControllerSpec& controller,
                               const Eigen::VectorXd& q, const Eigen::VectorXd& xhat2, double t) {
  switch (controller.kind) {
    case ControllerKind::zero: return Eigen::VectorXd::Zero(model.dof());
    case ControllerKind::gravity: return gravity(model, q);
    case ControllerKind::open_loop_1: return open_loop_1(model, q, t);
    case ControllerKind::open_loop_2: return open_loop_2(model, q, t);
    case ControllerKind::pd: return pd_gravity_feedback(model, controller.pd, q, xhat2);
  }
  throw std::logic_error("unhandled controller kind");
}

namespace {

constexpr double kBlowUpLimit = 1e6;

// Layout of the stacked integration state.
struct StateLayout {
  Eigen::Index n = 0;
  bool reduced = false;
  bool full = false;

  Eigen::Index size() const { return 2 * n + (reduced ? n : 0) + (full ? 2 * n : 0); }
  Eigen::Index z() const { return 2 * n; }
  Eigen::Index full_pos() const { return 2 * n + (reduced ? n : 0); }
  Eigen::Index full_vel() const { return full_pos() + n; }
};

ObserverSample observer_sample(const RobotModel<double>& model, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& x2, Eigen::VectorXd xhat2) {
  ObserverSample s;
  s.eps = x2 - xhat2;
  s.xhat2 = std::move(xhat2);
  s.eps_norm = s.eps.norm();
  s.lyapunov = 0.5 * s.eps.dot(model.inertia(y) * s.eps);
  return s;
}

}  // namespace

Trajectory simulate(const Scenario& scenario) {
  scenario.validate();
  const auto model_ptr = scenario.model.build();
  const RobotModel<double>& model = *model_ptr;

  StateLayout layout;
  layout.n = model.dof();
  layout.reduced = scenario.observers != ObserverMode::full;
  layout.full = scenario.observers != ObserverMode::reduced;
  const auto n = layout.n;

  const auto samples = sample_design(model, scenario.grid_points);
  const bool scheduled = scenario.gain == GainMode::scheduled;

  Trajectory traj;
  traj.scenario = scenario.name;
  traj.observers = scenario.observers;
  traj.gain_mode = scenario.gain;
  traj.hybrid = scenario.hybrid;
  traj.design = design_gain(samples, scenario.eta, scenario.v_max);
  traj.design.k0 *= scenario.gain_scale;
  traj.dt = scenario.dt;
  traj.t_final = scenario.t_final;

  std::optional<GainSchedule> schedule;
  LogicState logic;
  if (scheduled) {
    schedule.emplace(samples, scenario.hybrid);
    logic = initialize_logic(scenario.hybrid, *schedule, scenario.xhat2_0, scenario.r_guess);
  }
  auto scaled = [&](double k) { return k * scenario.gain_scale; };

  const auto [kp, kd] = matched_full_order_gains(traj.design.k0);
  traj.full_kp = kp;
  traj.full_kd = kd;

  Eigen::VectorXd x(layout.size());
  x.segment(0, n) = scenario.q0;
  x.segment(n, n) = scenario.dq0;
  double gain = scheduled ? scaled(logic.gain) : traj.design.k0;
  if (layout.reduced) x.segment(layout.z(), n) = scenario.xhat2_0 - gain * scenario.q0;
  if (layout.full) {
    x.segment(layout.full_pos(), n) = scenario.q0;
    x.segment(layout.full_vel(), n) = scenario.xhat2_0;
  }

  auto feedback_estimate = [&](const Eigen::VectorXd& s) -> Eigen::VectorXd {
    const auto y = s.segment(0, n);
    if (layout.reduced) return s.segment(layout.z(), n) + gain * y;
    return s.segment(layout.full_vel(), n);
  };

  auto rhs = [&](double t, const Eigen::VectorXd& s) -> Eigen::VectorXd {
    const Eigen::VectorXd y = s.segment(0, n);
    const Eigen::VectorXd x2 = s.segment(n, n);
    const Eigen::VectorXd tau =
        compute_torque(model, scenario.controller, y, feedback_estimate(s), t);

    Eigen::VectorXd ds(s.size());
    const auto plant = forward_dynamics(model, PlantState<double>{y, x2}, tau);
    ds.segment(0, n) = plant.x1;
    ds.segment(n, n) = plant.x2;
    if (layout.reduced) {
      const ReducedObserverState<double> obs{s.segment(layout.z(), n), gain};
      ds.segment(layout.z(), n) = reduced_observer_derivative(model, obs, y, tau);
    }
    if (layout.full) {
      const FullOrderObserverState<double> obs{s.segment(layout.full_pos(), n),
                                               s.segment(layout.full_vel(), n), kp, kd};
      const auto d = full_order_observer_derivative(model, obs, y, tau);
      ds.segment(layout.full_pos(), n) = d.position;
      ds.segment(layout.full_vel(), n) = d.velocity;
    }
    return ds;
  };

  auto record = [&](double t) {
    Sample smp;
    smp.t = t;
    smp.x1 = x.segment(0, n);
    smp.x2 = x.segment(n, n);
    const Eigen::VectorXd xhat2 = feedback_estimate(x);
    smp.tau = compute_torque(model, scenario.controller, smp.x1, xhat2, t);
    if (layout.reduced) {
      smp.reduced = observer_sample(model, smp.x1, smp.x2, x.segment(layout.z(), n) + gain * smp.x1);
    }
    if (layout.full) {
      smp.full = observer_sample(model, smp.x1, smp.x2, x.segment(layout.full_vel(), n));
    }
    smp.r = logic.r;
    smp.gain = layout.reduced ? gain : kd;
    smp.bounds = velocity_sandwich(scenario.eta, xhat2);
    traj.samples.push_back(std::move(smp));
  };

  const std::size_t steps = scenario.step_count();
  traj.samples.reserve(steps + 1);
  record(0.0);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * scenario.dt;
    x = rk4_step(rhs, t, x, scenario.dt);
    const double t_next = static_cast<double>(i + 1) * scenario.dt;

    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kBlowUpLimit) {
      std::ostringstream msg;
      msg << "state diverged at t = " << t_next;
      throw SimulationError(msg.str());
    }

    if (scheduled) {
      const Eigen::VectorXd y = x.segment(0, n);
      const Eigen::VectorXd xhat2 = x.segment(layout.z(), n) + gain * y;
      const LogicState next = step_logic(scenario.hybrid, *schedule, logic, xhat2, t_next);
      if (next.r != logic.r) {
        traj.jumps.push_back({t_next, logic.r, next.r, xhat2.norm()});
        const double new_gain = scaled(next.gain);
        ReducedObserverState<double> obs{x.segment(layout.z(), n), gain};
        obs.rebase(new_gain, y);
        x.segment(layout.z(), n) = obs.z;
        gain = new_gain;
      }
      logic = next;
    }
    record(t_next);
  }
  return traj;
}

std::vector<Scenario> builtin_scenarios() {
  using std::numbers::pi;
  Scenario base;
  base.model.kind = ModelSpec::Kind::two_link;
  base.q0 = Eigen::Vector2d(-2.0 * pi / 3.0, pi / 10.0);
  base.dq0 = Eigen::Vector2d(-0.5, 1.0);
  base.xhat2_0 = Eigen::Vector2d::Zero();
  base.eta = 1.0;
  base.v_max = 1.5;
  base.hybrid.v_bar = 1.5;
  base.hybrid.eta = 1.0;
  base.hybrid.semantics = JumpSemantics::hysteresis;
  base.r_guess = 1;
  base.dt = 1e-3;

  Scenario ex1 = base;
  ex1.name = "example1";
  ex1.description = "open-loop torque, bounded speed; constant gain, reduced vs full-order";
  ex1.controller.kind = ControllerKind::open_loop_1;
  ex1.observers = ObserverMode::both;
  ex1.gain = GainMode::constant;
  ex1.t_final = 20.0;

  Scenario ex2 = base;
  ex2.name = "example2";
  ex2.description = "open-loop torque, growing speed; scheduled gain";
  ex2.controller.kind = ControllerKind::open_loop_2;
  ex2.observers = ObserverMode::reduced;
  ex2.gain = GainMode::scheduled;
  ex2.t_final = 20.0;

  Scenario ex3 = base;
  ex3.name = "example3";
  ex3.description = "PD regulation on the velocity estimate; scheduled gain";
  ex3.controller.kind = ControllerKind::pd;
  ex3.controller.pd.kp = Eigen::Vector2d(40.0, 20.0);
  ex3.controller.pd.kd = Eigen::Vector2d(60.0, 30.0);
  ex3.controller.pd.x_ref = Eigen::Vector2d(pi / 4.0, -pi / 3.0);
  ex3.observers = ObserverMode::reduced;
  ex3.gain = GainMode::scheduled;
  ex3.t_final = 20.0;

  return {ex1, ex2, ex3};
}

std::optional<Scenario> find_builtin_scenario(const std::string& name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

}  // namespace redobs
