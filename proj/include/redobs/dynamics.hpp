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

// Rigid manipulator dynamics
//
//   M(q) q'' + C(q, q') q' + F q' + g(q) = tau
//
// with C built from Christoffel symbols of the first kind, so that
// dM/dt - 2 C is skew symmetric and C(q, u) w == C(q, w) u.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "redobs/common.hpp"

namespace redobs {

/// Joint positions x1 = q and speeds x2 = q'. Also used for its own time
/// derivative.
template <typename Scalar>
struct PlantState {
  VectorX<Scalar> x1;
  VectorX<Scalar> x2;
};

/// Provider of the terms of a rigid manipulator model. Implementations are
/// immutable after construction.
template <typename Scalar>
class RobotModel {
 public:
  using Vector = VectorX<Scalar>;
  using Matrix = MatrixX<Scalar>;

  virtual ~RobotModel() = default;

  virtual Eigen::Index dof() const = 0;

  virtual Matrix inertia(const Vector& q) const = 0;
  /// Time derivative of M along the motion q' = v.
  virtual Matrix inertia_rate(const Vector& q, const Vector& v) const = 0;
  virtual Matrix coriolis(const Vector& q, const Vector& v) const = 0;
  virtual Matrix damping() const = 0;
  virtual Vector gravity(const Vector& q) const = 0;
  virtual Scalar potential_energy(const Vector& q) const = 0;

  /// c0(q) such that ||C(q, v)|| <= c0(q) ||v|| for every v.
  virtual Scalar coriolis_bound(const Vector& q) const = 0;
  /// Uniform upper bound of coriolis_bound over the configuration space.
  virtual Scalar coriolis_bound_max() const = 0;

  /// Configurations on which extremal quantities over q are searched.
  ///
  /// The default samples a tensor grid over [-pi, pi]^n with roughly
  /// points^(1/n) nodes per joint, so its cost grows as points. Models whose
  /// terms depend on a subset of joints should override it.
  virtual std::vector<Vector> design_configurations(int points) const {
    const auto n = dof();
    const int per_axis =
        std::max(2, static_cast<int>(std::lround(std::pow(double(points), 1.0 / double(n)))));
    std::size_t total = 1;
    for (Eigen::Index i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);

    const Vector axis = Vector::LinSpaced(per_axis, Scalar(-std::numbers::pi),
                                          Scalar(std::numbers::pi));
    std::vector<Vector> out;
    out.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
      Vector q(n);
      std::size_t rest = flat;
      for (Eigen::Index j = 0; j < n; ++j) {
        q(j) = axis(static_cast<Eigen::Index>(rest % per_axis));
        rest /= per_axis;
      }
      out.push_back(std::move(q));
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Free-function interface with dimension checks.

template <typename Scalar, typename Derived>
MatrixX<Scalar> inertia(const RobotModel<Scalar>& model, const Eigen::MatrixBase<Derived>& q) {
  detail::require_size(q.size(), model.dof(), "inertia");
  return model.inertia(q.template cast<Scalar>());
}

template <typename Scalar, typename DerivedQ, typename DerivedV>
MatrixX<Scalar> coriolis(const RobotModel<Scalar>& model, const Eigen::MatrixBase<DerivedQ>& q,
                         const Eigen::MatrixBase<DerivedV>& v) {
  detail::require_size(q.size(), model.dof(), "coriolis(q)");
  detail::require_size(v.size(), model.dof(), "coriolis(v)");
  return model.coriolis(q.template cast<Scalar>(), v.template cast<Scalar>());
}

template <typename Scalar, typename Derived>
VectorX<Scalar> gravity(const RobotModel<Scalar>& model, const Eigen::MatrixBase<Derived>& q) {
  detail::require_size(q.size(), model.dof(), "gravity");
  return model.gravity(q.template cast<Scalar>());
}

template <typename Scalar, typename Derived>
Scalar c0_bound(const RobotModel<Scalar>& model, const Eigen::MatrixBase<Derived>& q) {
  detail::require_size(q.size(), model.dof(), "c0_bound");
  return model.coriolis_bound(q.template cast<Scalar>());
}

/// Solves M(q) x = rhs, refusing numerically singular inertia (condition
/// estimate above 1e12).
template <typename Scalar>
VectorX<Scalar> solve_inertia(const RobotModel<Scalar>& model, const VectorX<Scalar>& q,
                              const VectorX<Scalar>& rhs) {
  const MatrixX<Scalar> m = model.inertia(q);
  Eigen::LLT<MatrixX<Scalar>> llt(m);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= Scalar(1e-12))) {
    throw SingularInertiaError("inertia matrix is numerically singular");
  }
  return llt.solve(rhs);
}

/// Smallest eigenvalue of the symmetric part of a square matrix.
template <typename Derived>
typename Derived::Scalar symmetric_min_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
  using S = typename Derived::Scalar;
  const MatrixX<S> sym = (a + a.transpose()) / S(2);
  Eigen::SelfAdjointEigenSolver<MatrixX<S>> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

template <typename Scalar>
PlantState<Scalar> forward_dynamics(const RobotModel<Scalar>& model,
                                    const PlantState<Scalar>& state,
                                    const VectorX<Scalar>& tau) {
  const auto n = model.dof();
  detail::require_size(state.x1.size(), n, "forward_dynamics(x1)");
  detail::require_size(state.x2.size(), n, "forward_dynamics(x2)");
  detail::require_size(tau.size(), n, "forward_dynamics(tau)");

  const VectorX<Scalar> rhs = -model.coriolis(state.x1, state.x2) * state.x2 -
                              model.damping() * state.x2 - model.gravity(state.x1) + tau;
  return {state.x2, solve_inertia(model, state.x1, rhs)};
}

template <typename Scalar>
Scalar kinetic_energy(const RobotModel<Scalar>& model, const PlantState<Scalar>& state) {
  return Scalar(0.5) * state.x2.dot(model.inertia(state.x1) * state.x2);
}

template <typename Scalar>
Scalar mechanical_energy(const RobotModel<Scalar>& model, const PlantState<Scalar>& state) {
  return kinetic_energy(model, state) + model.potential_energy(state.x1);
}

/// Uniform eigenvalue bounds lambda1 <= V / |e|^2 <= lambda2 of the quadratic
/// form V = e' M(q) e / 2.
template <typename Scalar>
struct SpectralBounds {
  Scalar lambda1;
  Scalar lambda2;
};

/// Per-configuration quantities needed by every gain formula, sampled once.
template <typename Scalar>
struct DesignSamples {
  std::vector<Scalar> coriolis_bound;
  std::vector<Scalar> inertia_min_eig;
  std::vector<Scalar> inertia_max_eig;
  Scalar damping_min_eig{};
  Scalar coriolis_bound_max{};

  std::size_t size() const { return coriolis_bound.size(); }

  SpectralBounds<Scalar> spectral_bounds() const {
    return {*std::min_element(inertia_min_eig.begin(), inertia_min_eig.end()) / Scalar(2),
            *std::max_element(inertia_max_eig.begin(), inertia_max_eig.end()) / Scalar(2)};
  }
};

template <typename Scalar>
DesignSamples<Scalar> sample_design(const RobotModel<Scalar>& model,
                                    int points = kDefaultGridPoints) {
  DesignSamples<Scalar> out;
  const auto configs = model.design_configurations(points);
  out.coriolis_bound.reserve(configs.size());
  out.inertia_min_eig.reserve(configs.size());
  out.inertia_max_eig.reserve(configs.size());
  for (const auto& q : configs) {
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(model.inertia(q), Eigen::EigenvaluesOnly);
    out.inertia_min_eig.push_back(es.eigenvalues().minCoeff());
    out.inertia_max_eig.push_back(es.eigenvalues().maxCoeff());
    out.coriolis_bound.push_back(model.coriolis_bound(q));
  }
  out.damping_min_eig = symmetric_min_eigenvalue(model.damping());
  out.coriolis_bound_max = model.coriolis_bound_max();
  return out;
}

template <typename Scalar>
SpectralBounds<Scalar> spectral_bounds(const RobotModel<Scalar>& model,
                                       int points = kDefaultGridPoints) {
  return sample_design(model, points).spectral_bounds();
}

// ---------------------------------------------------------------------------
// Concrete models.

/// Planar two-link arm in a vertical plane. q1 is measured counterclockwise
/// from the horizontal axis, q2 relative to link 1. Links are thin rods:
/// center of mass at L/2 and barycentric inertia m L^2 / 12.
struct TwoLinkParams {
  double m1 = 10.0;
  double m2 = 20.0;
  double L1 = 1.0;
  double L2 = 1.5;
  double f1 = 0.1;
  double f2 = 0.3;
  double gravity_accel = 9.81;

  void validate() const {
    if (!(m1 > 0 && m2 > 0 && L1 > 0 && L2 > 0)) {
      throw std::invalid_argument("two-link masses and lengths must be positive");
    }
    if (!(f1 >= 0 && f2 >= 0)) {
      throw std::invalid_argument("two-link damping must be nonnegative");
    }
    if (!std::isfinite(gravity_accel)) {
      throw std::invalid_argument("gravity acceleration must be finite");
    }
  }
};

/// Supremum over unit v of the spectral norm of
///   [[-v2, -(v1 + v2)], [v1, 0]],
/// the velocity pattern of the two-link Coriolis matrix. Its square is the
/// largest root of 10 x^3 - 38 x^2 + 30 x - 1.
inline double two_link_coriolis_pattern_norm() {
  // Trigonometric solution of the depressed cubic t^3 + p t + q.
  const double a = -3.8, b = 3.0, c = -0.1;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double theta = std::acos(3.0 * q / (p * m)) / 3.0;
  return std::sqrt(m * std::cos(theta) - a / 3.0);
}

template <typename Scalar>
class TwoLinkArm final : public RobotModel<Scalar> {
 public:
  using typename RobotModel<Scalar>::Vector;
  using typename RobotModel<Scalar>::Matrix;

  explicit TwoLinkArm(const TwoLinkParams& p) : params_(p) {
    p.validate();
    const Scalar m1(p.m1), m2(p.m2), l1(p.L1), l2(p.L2);
    const Scalar d1 = l1 / 2, d2 = l2 / 2;
    const Scalar i1 = m1 * l1 * l1 / 12, i2 = m2 * l2 * l2 / 12;
    a_ = i1 + m1 * d1 * d1 + i2 + m2 * (l1 * l1 + d2 * d2);
    b_ = i2 + m2 * d2 * d2;
    h_ = m2 * l1 * d2;
    g1_ = (m1 * d1 + m2 * l1) * Scalar(p.gravity_accel);
    g2_ = m2 * d2 * Scalar(p.gravity_accel);
    f1_ = Scalar(p.f1);
    f2_ = Scalar(p.f2);
    pattern_norm_ = Scalar(two_link_coriolis_pattern_norm());
  }

  const TwoLinkParams& params() const { return params_; }
  /// Coupling coefficient m2 L1 d2 multiplying every Coriolis entry.
  Scalar coupling() const { return h_; }

  Eigen::Index dof() const override { return 2; }

  Matrix inertia(const Vector& q) const override {
    using std::cos;
    const Scalar c2 = cos(q(1));
    Matrix m(2, 2);
    m(0, 0) = a_ + 2 * h_ * c2;
    m(0, 1) = m(1, 0) = b_ + h_ * c2;
    m(1, 1) = b_;
    return m;
  }

  Matrix inertia_rate(const Vector& q, const Vector& v) const override {
    using std::sin;
    const Scalar k = -h_ * sin(q(1)) * v(1);
    Matrix md(2, 2);
    md(0, 0) = 2 * k;
    md(0, 1) = md(1, 0) = k;
    md(1, 1) = Scalar(0);
    return md;
  }

  Matrix coriolis(const Vector& q, const Vector& v) const override {
    using std::sin;
    const Scalar hs = h_ * sin(q(1));
    Matrix c(2, 2);
    c(0, 0) = -hs * v(1);
    c(0, 1) = -hs * (v(0) + v(1));
    c(1, 0) = hs * v(0);
    c(1, 1) = Scalar(0);
    return c;
  }

  Matrix damping() const override {
    Matrix f = Matrix::Zero(2, 2);
    f(0, 0) = f1_;
    f(1, 1) = f2_;
    return f;
  }

  Vector gravity(const Vector& q) const override {
    using std::cos;
    const Scalar c12 = cos(q(0) + q(1));
    Vector g(2);
    g(0) = g1_ * cos(q(0)) + g2_ * c12;
    g(1) = g2_ * c12;
    return g;
  }

  Scalar potential_energy(const Vector& q) const override {
    using std::sin;
    return g1_ * sin(q(0)) + g2_ * sin(q(0) + q(1));
  }

  Scalar coriolis_bound(const Vector& q) const override {
    using std::abs;
    using std::sin;
    return h_ * pattern_norm_ * abs(sin(q(1)));
  }

  Scalar coriolis_bound_max() const override { return h_ * pattern_norm_; }

  /// M and c0 depend on q2 only: a 1-D grid over q2 in [-pi, pi], q1 = 0.
  std::vector<Vector> design_configurations(int points) const override {
    const Vector axis =
        Vector::LinSpaced(std::max(points, 2), Scalar(-std::numbers::pi), Scalar(std::numbers::pi));
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(axis.size()));
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
      Vector q(2);
      q << Scalar(0), axis(i);
      out.push_back(std::move(q));
    }
    return out;
  }

 private:
  TwoLinkParams params_;
  Scalar a_, b_, h_, g1_, g2_, f1_, f2_, pattern_norm_;
};

/// One joint with constant inertia and no Coriolis terms; gravity torque is
/// gravity_torque * cos(q).
struct SingleLinkParams {
  double inertia = 1.0;
  double damping = 0.0;
  double gravity_torque = 0.0;

  void validate() const {
    if (!(inertia > 0)) throw std::invalid_argument("single-link inertia must be positive");
    if (!(damping >= 0)) throw std::invalid_argument("single-link damping must be nonnegative");
  }
};

template <typename Scalar>
class SingleLink final : public RobotModel<Scalar> {
 public:
  using typename RobotModel<Scalar>::Vector;
  using typename RobotModel<Scalar>::Matrix;

  explicit SingleLink(const SingleLinkParams& p) : params_(p) { p.validate(); }

  const SingleLinkParams& params() const { return params_; }

  Eigen::Index dof() const override { return 1; }
  Matrix inertia(const Vector&) const override {
    return Matrix::Constant(1, 1, Scalar(params_.inertia));
  }
  Matrix inertia_rate(const Vector&, const Vector&) const override { return Matrix::Zero(1, 1); }
  Matrix coriolis(const Vector&, const Vector&) const override { return Matrix::Zero(1, 1); }
  Matrix damping() const override { return Matrix::Constant(1, 1, Scalar(params_.damping)); }
  Vector gravity(const Vector& q) const override {
    using std::cos;
    return Vector::Constant(1, Scalar(params_.gravity_torque) * cos(q(0)));
  }
  Scalar potential_energy(const Vector& q) const override {
    using std::sin;
    return Scalar(params_.gravity_torque) * sin(q(0));
  }
  Scalar coriolis_bound(const Vector&) const override { return Scalar(0); }
  Scalar coriolis_bound_max() const override { return Scalar(0); }
  std::vector<Vector> design_configurations(int) const override { return {Vector::Zero(1)}; }

 private:
  SingleLinkParams params_;
};

}  // namespace redobs
