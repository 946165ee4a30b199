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

#include <cmath>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "redobs/observers.hpp"
#include "redobs/simulator.hpp"
#include "support.hpp"

namespace redobs {
namespace {

using testing::Random;

const TwoLinkArm<double> kArm{TwoLinkParams{}};

// A Coriolis-free model with identity inertia and damping.
class UnitModel final : public RobotModel<double> {
 public:
  Eigen::Index dof() const override { return 2; }
  Matrix inertia(const Vector&) const override { return Matrix::Identity(2, 2); }
  Matrix inertia_rate(const Vector&, const Vector&) const override { return Matrix::Zero(2, 2); }
  Matrix coriolis(const Vector&, const Vector&) const override { return Matrix::Zero(2, 2); }
  Matrix damping() const override { return Matrix::Identity(2, 2); }
  Vector gravity(const Vector&) const override { return Vector::Zero(2); }
  double potential_energy(const Vector&) const override { return 0.0; }
  double coriolis_bound(const Vector&) const override { return 0.0; }
  double coriolis_bound_max() const override { return 0.0; }
};

TEST(ReducedObserver, EstimateIsDefinedFromZ) {
  const Eigen::Vector2d y(0.3, -0.2), xhat2(1.0, 2.0);
  auto obs = ReducedObserverState<double>::from_estimate(xhat2, y, 7.0);
  EXPECT_LT((obs.estimate(y) - xhat2).norm(), 1e-15);
  EXPECT_LT((obs.estimate(y) - obs.z - 7.0 * y).norm(), 1e-15);
  obs.rebase(11.0, y);
  EXPECT_EQ(obs.gain, 11.0);
  EXPECT_LT((obs.estimate(y) - xhat2).norm(), 1e-15);
}

TEST(ReducedObserver, ErrorDerivativeVanishesAtZeroError) {
  Random rng(11);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd y = rng.angles(2), x2 = rng.normal(2), tau = rng.normal(2, 10.0);
    const double k = 5.0;
    const auto obs = ReducedObserverState<double>::from_estimate(x2, y, k);
    const auto plant = forward_dynamics(kArm, PlantState<double>{y, x2}, tau);
    // d/dt xhat2 = zdot + k ydot.
    const Eigen::VectorXd xhat2_dot = reduced_observer_derivative(kArm, obs, y, tau) + k * x2;
    EXPECT_LT((plant.x2 - xhat2_dot).norm(), 1e-9);
  }
}

// M eps_dot + C(y, x2) eps + C(y, xhat2) eps + F eps + M k eps = 0 for any tau.
TEST(ReducedObserver, ErrorDynamicsIdentity) {
  Random rng(12);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd y = rng.angles(2), x2 = rng.normal(2, 2.0);
    const Eigen::VectorXd xhat2 = rng.normal(2, 2.0), tau = rng.normal(2, 50.0);
    const double k = 3.0;
    const auto obs = ReducedObserverState<double>::from_estimate(xhat2, y, k);
    const auto plant = forward_dynamics(kArm, PlantState<double>{y, x2}, tau);
    const Eigen::VectorXd eps = x2 - xhat2;
    const Eigen::VectorXd eps_dot =
        plant.x2 - (reduced_observer_derivative(kArm, obs, y, tau) + k * x2);
    const Eigen::MatrixXd m = kArm.inertia(y);
    const Eigen::VectorXd residual = m * eps_dot + kArm.coriolis(y, x2) * eps +
                                     kArm.coriolis(y, xhat2) * eps + kArm.damping() * eps +
                                     m * k * eps;
    EXPECT_LT(residual.norm(), 1e-9 * (1 + tau.norm()));
  }
}

TEST(ReducedObserver, RejectsNonpositiveGain) {
  const Eigen::VectorXd y = Eigen::Vector2d::Zero();
  const ReducedObserverState<double> obs{y, 0.0};
  EXPECT_THROW(reduced_observer_derivative(kArm, obs, y, y), std::invalid_argument);
}

// Scalar case: eps' = -(k + F/M) eps.
TEST(ReducedObserver, SingleLinkErrorIsExponential) {
  const double m = 2.0, f = 0.6, k = 3.0, dt = 1e-3;
  const SingleLink<double> link{SingleLinkParams{m, f, 4.0}};
  Eigen::VectorXd y(1), x2(1), tau(1);
  y << 0.2;
  x2 << 1.5;
  auto obs = ReducedObserverState<double>::from_estimate(Eigen::VectorXd::Zero(1), y, k);
  Eigen::VectorXd s(3);
  s << y, x2, obs.z;
  auto f_all = [&](double t, const Eigen::VectorXd& x) {
    Eigen::VectorXd tq(1);
    tq << std::sin(3 * t);
    const auto d = forward_dynamics(link, PlantState<double>{x.segment(0, 1), x.segment(1, 1)}, tq);
    const ReducedObserverState<double> o{x.segment(2, 1), k};
    Eigen::VectorXd out(3);
    out << d.x1, d.x2, reduced_observer_derivative(link, o, Eigen::VectorXd(x.segment(0, 1)), tq);
    return out;
  };
  for (int i = 0; i < 1000; ++i) s = rk4_step(f_all, i * dt, s, dt);
  const double eps = s(1) - (s(2) + k * s(0));
  EXPECT_NEAR(eps, 1.5 * std::exp(-(k + f / m)), 1e-6);
}

TEST(GainDesign, TwoLinkGridValues) {
  const auto d = compute_k0(kArm, 1.0, 1.5);
  EXPECT_NEAR(d.k0, testing::kK0, 1e-9);
  EXPECT_NEAR(d.lambda1, testing::kLambda1, 1e-10);
  EXPECT_NEAR(d.lambda2, testing::kLambda2, 1e-9);
  EXPECT_LE(d.region_radius, d.eta);
  EXPECT_NEAR(d.region_radius * d.region_radius * d.lambda2, d.eta * d.eta * d.lambda1, 1e-12);
}

TEST(GainDesign, GridRefinementChangesLittle) {
  const double coarse = compute_k0(kArm, 1.0, 1.5, 2048).k0;
  const double fine = compute_k0(kArm, 1.0, 1.5, 4096).k0;
  EXPECT_LT(std::abs(fine - coarse), 1e-3 * coarse);
}

TEST(GainDesign, ClampsToMinimumWithoutCoriolis) {
  const UnitModel model;
  EXPECT_EQ(compute_k0(model, 1.0, 2.0).k0, kMinGain);
}

TEST(GainDesign, RejectsBadInputs) {
  EXPECT_THROW(compute_k0(kArm, 0.0, 1.5), std::invalid_argument);
  EXPECT_THROW(compute_k0(kArm, 1.0, -0.1), std::invalid_argument);
}

TEST(GainDesign, NondecreasingInEtaAndSpeed) {
  const auto samples = sample_design(kArm);
  double prev = 0.0;
  for (double eta = 0.1; eta < 5; eta += 0.3) {
    const double k = design_gain(samples, eta, 1.5).k0;
    EXPECT_GE(k, prev);
    prev = k;
  }
  prev = 0.0;
  for (double v = 0.0; v < 10; v += 0.5) {
    const double k = design_gain(samples, 1.0, v).k0;
    EXPECT_GE(k, prev);
    prev = k;
  }
}

TEST(GainDesign, ConservativeGainDominates) {
  const auto samples = sample_design(kArm);
  const double cons = conservative_k0(samples, 1.0, 1.5);
  EXPECT_NEAR(cons, testing::kConservativeK0, 1e-8);
  EXPECT_GE(cons, design_gain(samples, 1.0, 1.5).k0);
}

TEST(ConvergenceRate, Examples) {
  GainDesign<double> d{1.0, 1.5, 1.0, 2.0, 2.0, 1.0};
  EXPECT_DOUBLE_EQ(convergence_rate(d, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(convergence_rate(d, 0.5), 0.5);
  const auto arm = compute_k0(kArm, 1.0, 1.5);
  EXPECT_NEAR(convergence_rate(arm, arm.region_radius), 0.0, 1e-14);
}

TEST(FullOrderObserver, ZeroErrorIsFixedPoint) {
  Random rng(13);
  const Eigen::VectorXd y = rng.angles(2), x2 = rng.normal(2), tau = rng.normal(2, 10.0);
  const FullOrderObserverState<double> obs{y, x2, 9.0, 3.0};
  const auto d = full_order_observer_derivative(kArm, obs, y, tau);
  const auto plant = forward_dynamics(kArm, PlantState<double>{y, x2}, tau);
  EXPECT_LT((d.position - plant.x1).norm(), 1e-12);
  EXPECT_LT((d.velocity - plant.x2).norm(), 1e-9);
}

TEST(FullOrderObserver, MatchedGains) {
  const auto [kp, kd] = matched_full_order_gains(4.0);
  EXPECT_EQ(kp, 16.0);
  EXPECT_EQ(kd, 4.0);
}

// Scalar case: (e1, e2)' = A (e1, e2) with A = [[-kd, 1], [-kp/M, -F/M]].
TEST(FullOrderObserver, SingleLinkMatchesLinearSystem) {
  const double m = 2.0, f = 0.6, kp = 9.0, kd = 3.0, dt = 1e-3;
  const SingleLink<double> link{SingleLinkParams{m, f, 4.0}};
  Eigen::VectorXd s(4);
  s << 0.2, 1.5, 0.0, 0.0;  // q, dq, position estimate, velocity estimate
  auto f_all = [&](double t, const Eigen::VectorXd& x) {
    Eigen::VectorXd tq(1);
    tq << std::cos(2 * t);
    const auto d = forward_dynamics(link, PlantState<double>{x.segment(0, 1), x.segment(1, 1)}, tq);
    const FullOrderObserverState<double> o{x.segment(2, 1), x.segment(3, 1), kp, kd};
    const auto od = full_order_observer_derivative(link, o, Eigen::VectorXd(x.segment(0, 1)), tq);
    Eigen::VectorXd out(4);
    out << d.x1, d.x2, od.position, od.velocity;
    return out;
  };
  for (int i = 0; i < 1000; ++i) s = rk4_step(f_all, i * dt, s, dt);

  Eigen::Matrix2d a;
  a << -kd, 1.0, -kp / m, -f / m;
  const Eigen::Vector2d e = a.exp() * Eigen::Vector2d(0.2, 1.5);
  EXPECT_NEAR(s(0) - s(2), e(0), 1e-6);
  EXPECT_NEAR(s(1) - s(3), e(1), 1e-6);
}

}  // namespace
}  // namespace redobs
