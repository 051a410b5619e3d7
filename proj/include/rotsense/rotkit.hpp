/*
 * Copyright 2026 The rotsense Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Rotation representations, conversions between them, and rotational
// distance functions. All distances are in radians and lie in [0, pi].

#include <numbers>

#include <Eigen/Core>

namespace rotsense::rotkit {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

/// Below this angle the exponential map and related conversions switch to
/// their Taylor series to avoid the 0/0 in sin(theta)/theta.
inline constexpr double kSmallAngle = 1e-6;

inline constexpr double kOrthogonalityTol = 1e-9;
inline constexpr double kUnitNormTol = 1e-12;
/// Looser tolerance accepted by the Vec4 overload of quat_to_matrix.
inline constexpr double kLooseUnitNormTol = 1e-6;

/// Element of SO(3): orthogonal with determinant one, checked on construction.
class RotationMatrix {
 public:
  static RotationMatrix from(const Mat3& r);
  static RotationMatrix identity() { return RotationMatrix(Mat3::Identity()); }

  const Mat3& matrix() const noexcept { return r_; }

 private:
  explicit RotationMatrix(const Mat3& r) : r_(r) {}
  Mat3 r_;
};

/// Rotation by angle() about the unit axis(). Negative angles are stored as
/// (|theta|, -axis), so angle() is never negative.
class AxisAngle {
 public:
  static AxisAngle make(double theta, const Vec3& axis);

  double angle() const noexcept { return theta_; }
  const Vec3& axis() const noexcept { return axis_; }
  /// The inverse rotation, i.e. the same axis with negated angle.
  AxisAngle inverse() const { return AxisAngle(theta_, -axis_); }

 private:
  AxisAngle(double theta, const Vec3& axis) : theta_(theta), axis_(axis) {}
  double theta_;
  Vec3 axis_;
};

/// Exponential coordinates s = theta * e. Constrained coordinates live in the
/// closed ball of radius pi; unconstrained ones may be any finite 3-vector.
class ExpCoords {
 public:
  static ExpCoords constrained(const Vec3& s);
  static ExpCoords unconstrained(const Vec3& s);

  const Vec3& vector() const noexcept { return s_; }
  bool is_constrained() const noexcept { return constrained_; }
  double angle() const { return s_.norm(); }

 private:
  ExpCoords(const Vec3& s, bool constrained) : s_(s), constrained_(constrained) {}
  Vec3 s_;
  bool constrained_;
};

/// Point on S^3, stored as (w, x, y, z). q and -q are the same rotation.
class UnitQuaternion {
 public:
  static UnitQuaternion make(double w, double x, double y, double z);
  static UnitQuaternion from_vector(const Vec4& v);
  static UnitQuaternion identity() { return UnitQuaternion(Vec4(1, 0, 0, 0)); }

  double w() const noexcept { return q_[0]; }
  double x() const noexcept { return q_[1]; }
  double y() const noexcept { return q_[2]; }
  double z() const noexcept { return q_[3]; }
  const Vec4& vector() const noexcept { return q_; }

  UnitQuaternion operator-() const { return UnitQuaternion(-q_); }

 private:
  explicit UnitQuaternion(const Vec4& q) : q_(q) {}
  Vec4 q_;
};

/// Unconstrained quaternion: any finite nonzero 4-vector.
class RawQuaternion {
 public:
  static RawQuaternion make(const Vec4& v);

  const Vec4& vector() const noexcept { return v_; }
  RawQuaternion scaled(double factor) const { return make(v_ * factor); }

 private:
  explicit RawQuaternion(const Vec4& v) : v_(v) {}
  Vec4 v_;
};

// Conversions

RotationMatrix exp_to_matrix(const ExpCoords& s);
UnitQuaternion axis_angle_to_quat(const AxisAngle& a);
RotationMatrix quat_to_matrix(const UnitQuaternion& q);
/// Accepts a 4-vector within kLooseUnitNormTol of unit length, renormalizes
/// it, and converts. Larger deviations are an invalid argument.
RotationMatrix quat_to_matrix(const Vec4& q);
UnitQuaternion normalize(const RawQuaternion& v);

/// Quaternion of the exponential coordinates, valid for any angle.
UnitQuaternion exp_to_quat(const ExpCoords& s);
/// Shepperd's method; the result has w >= 0.
UnitQuaternion matrix_to_quat(const RotationMatrix& r);
/// Angle in [0, pi].
AxisAngle quat_to_axis_angle(const UnitQuaternion& q);
/// Constrained exponential coordinates (angle in [0, pi]).
ExpCoords quat_to_exp(const UnitQuaternion& q);
/// With constrained = true the angle is first wrapped into [0, pi] (flipping
/// the axis when needed); otherwise s = theta * e as given.
ExpCoords axis_angle_to_exp(const AxisAngle& a, bool constrained = true);

// Distances

double dist_matrices(const RotationMatrix& r1, const RotationMatrix& r2);
double dist_exp(const ExpCoords& s1, const ExpCoords& s2);
double dist_quat(const UnitQuaternion& q1, const UnitQuaternion& q2);
/// Distance expressed through the angle phi in [0, pi] between the two
/// quaternions seen as 4-vectors.
double dist_quat_from_angle(double phi);

/// Angle theta3 in [0, 2*pi] of the composition of two axis-angle rotations.
double compose_angle(const AxisAngle& a1, const AxisAngle& a2);

/// Single-sample pose loss: squared position error plus rotational distance
/// between the true (constrained) and estimated (unconstrained) coordinates.
double pose_cost(const Vec3& z, const Vec3& z_hat, const ExpCoords& s,
                 const ExpCoords& s_hat);

/// Angle 4*atan2(sqrt(lo), sqrt(hi)) with lo = min(1-a, 1+a), hi = max(...),
/// given both 1-a and 1+a without cancellation. Equals 2*acos(|a|).
double double_cover_angle(double one_minus_a, double one_plus_a);

}  // namespace rotsense::rotkit
