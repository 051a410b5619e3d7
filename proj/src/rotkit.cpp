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

#include "rotsense/rotkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "rotsense/errors.hpp"

namespace rotsense::rotkit {
namespace {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

Mat3 skew(const Vec3& v) {
  Mat3 k;
  k << 0, -v.z(), v.y(),
       v.z(), 0, -v.x(),
       -v.y(), v.x(), 0;
  return k;
}

// Quaternion 4-vector of theta*e without forming the axis explicitly.
Vec4 exp_quat_vector(const Vec3& s) {
  const double theta = s.norm();
  const double half = 0.5 * theta;
  // sin(theta/2)/theta, series below the small-angle threshold.
  const double k = theta < kSmallAngle ? 0.5 - theta * theta / 48.0
                                       : std::sin(half) / theta;
  Vec4 q;
  q << std::cos(half), k * s;
  return q;
}

// 2*acos(|q1.q2|) evaluated from chord lengths.
double quat_vector_distance(const Vec4& q1, const Vec4& q2) {
  const double minus = (q1 - q2).norm();
  const double plus = (q1 + q2).norm();
  return 4.0 * std::atan2(std::min(minus, plus), std::max(minus, plus));
}

}  // namespace

RotationMatrix RotationMatrix::from(const Mat3& r) {
  if (!all_finite(r)) throw InvalidArgument("rotation matrix has non-finite entries");
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kOrthogonalityTol) {
    throw InvalidArgument("matrix is not orthogonal (max |R^T R - I| = " +
                          std::to_string(ortho) + ")");
  }
  if (std::abs(r.determinant() - 1.0) > kOrthogonalityTol) {
    throw InvalidArgument("matrix determinant is not +1");
  }
  return RotationMatrix(r);
}

AxisAngle AxisAngle::make(double theta, const Vec3& axis) {
  if (!std::isfinite(theta) || !all_finite(axis)) {
    throw InvalidArgument("axis-angle has non-finite components");
  }
  if (std::abs(axis.norm() - 1.0) > kUnitNormTol) {
    throw InvalidArgument("axis must have unit length");
  }
  if (theta < 0) return AxisAngle(-theta, -axis);
  return AxisAngle(theta, axis);
}

ExpCoords ExpCoords::constrained(const Vec3& s) {
  if (!all_finite(s)) throw InvalidArgument("exponential coordinates are not finite");
  if (s.norm() > kPi + kUnitNormTol) {
    throw InvalidArgument("constrained exponential coordinates must satisfy |s| <= pi");
  }
  return ExpCoords(s, true);
}

ExpCoords ExpCoords::unconstrained(const Vec3& s) {
  if (!all_finite(s)) throw InvalidArgument("exponential coordinates are not finite");
  return ExpCoords(s, false);
}

UnitQuaternion UnitQuaternion::make(double w, double x, double y, double z) {
  return from_vector(Vec4(w, x, y, z));
}

UnitQuaternion UnitQuaternion::from_vector(const Vec4& v) {
  if (!all_finite(v)) throw InvalidArgument("quaternion is not finite");
  if (std::abs(v.norm() - 1.0) > kUnitNormTol) {
    throw InvalidArgument("quaternion must have unit norm");
  }
  return UnitQuaternion(v);
}

RawQuaternion RawQuaternion::make(const Vec4& v) {
  if (!all_finite(v)) throw InvalidArgument("quaternion is not finite");
  if (!(v.norm() > 0.0)) {
    throw InvalidArgument("zero quaternion has no associated rotation");
  }
  return RawQuaternion(v);
}

RotationMatrix exp_to_matrix(const ExpCoords& coords) {
  const Vec3& s = coords.vector();
  const double theta = s.norm();
  double a;  // sin(theta)/theta
  double b;  // (1 - cos(theta))/theta^2
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    const double sh = std::sin(0.5 * theta) / theta;
    a = std::sin(theta) / theta;
    b = 2.0 * sh * sh;
  }
  const Mat3 k = skew(s);
  return RotationMatrix::from(Mat3::Identity() + a * k + b * (k * k));
}

UnitQuaternion axis_angle_to_quat(const AxisAngle& a) {
  const double half = 0.5 * a.angle();
  Vec4 q;
  q << std::cos(half), std::sin(half) * a.axis();
  return UnitQuaternion::from_vector(q);
}

RotationMatrix quat_to_matrix(const UnitQuaternion& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return RotationMatrix::from(r);
}

RotationMatrix quat_to_matrix(const Vec4& q) {
  if (!all_finite(q)) throw InvalidArgument("quaternion is not finite");
  const double n = q.norm();
  if (std::abs(n - 1.0) > kLooseUnitNormTol) {
    throw InvalidArgument("quaternion norm deviates from 1 by more than 1e-6");
  }
  return quat_to_matrix(UnitQuaternion::from_vector(q / n));
}

UnitQuaternion normalize(const RawQuaternion& v) {
  return UnitQuaternion::from_vector(v.vector() / v.vector().norm());
}

UnitQuaternion exp_to_quat(const ExpCoords& s) {
  const Vec4 q = exp_quat_vector(s.vector());
  return UnitQuaternion::from_vector(q / q.norm());
}

UnitQuaternion matrix_to_quat(const RotationMatrix& rot) {
  const Mat3& r = rot.matrix();
  const double tr = r.trace();
  Vec4 q;
  // Pick the largest of 4w^2, 4x^2, 4y^2, 4z^2 as the pivot.
  const double diag[4] = {tr, r(0, 0), r(1, 1), r(2, 2)};
  const int pivot = static_cast<int>(std::max_element(diag, diag + 4) - diag);
  switch (pivot) {
    case 0: {
      const double t = 2.0 * std::sqrt(1.0 + tr);
      q << 0.25 * t, (r(2, 1) - r(1, 2)) / t, (r(0, 2) - r(2, 0)) / t,
          (r(1, 0) - r(0, 1)) / t;
      break;
    }
    case 1: {
      const double t = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
      q << (r(2, 1) - r(1, 2)) / t, 0.25 * t, (r(0, 1) + r(1, 0)) / t,
          (r(0, 2) + r(2, 0)) / t;
      break;
    }
    case 2: {
      const double t = 2.0 * std::sqrt(1.0 - r(0, 0) + r(1, 1) - r(2, 2));
      q << (r(0, 2) - r(2, 0)) / t, (r(0, 1) + r(1, 0)) / t, 0.25 * t,
          (r(1, 2) + r(2, 1)) / t;
      break;
    }
    default: {
      const double t = 2.0 * std::sqrt(1.0 - r(0, 0) - r(1, 1) + r(2, 2));
      q << (r(1, 0) - r(0, 1)) / t, (r(0, 2) + r(2, 0)) / t,
          (r(1, 2) + r(2, 1)) / t, 0.25 * t;
      break;
    }
  }
  if (q[0] < 0) q = -q;
  return UnitQuaternion::from_vector(q / q.norm());
}

AxisAngle quat_to_axis_angle(const UnitQuaternion& quat) {
  Vec4 q = quat.vector();
  if (q[0] < 0) q = -q;
  const Vec3 v = q.tail<3>();
  const double vn = v.norm();
  if (vn == 0.0) return AxisAngle::make(0.0, Vec3::UnitX());
  const double theta = 2.0 * std::atan2(vn, q[0]);
  return AxisAngle::make(theta, v / vn);
}

ExpCoords quat_to_exp(const UnitQuaternion& quat) {
  Vec4 q = quat.vector();
  if (q[0] < 0) q = -q;
  const Vec3 v = q.tail<3>();
  const double vn = v.norm();
  const double theta = 2.0 * std::atan2(vn, q[0]);
  // theta / sin(theta/2), with sin(theta/2) = vn.
  const double k = vn < kSmallAngle ? 2.0 * (1.0 + vn * vn / 6.0) : theta / vn;
  Vec3 s = k * v;
  // Rounding can push |s| a hair past pi for half turns.
  if (s.norm() > kPi) s *= kPi / s.norm();
  return ExpCoords::constrained(s);
}

ExpCoords axis_angle_to_exp(const AxisAngle& a, bool constrained) {
  if (!constrained) return ExpCoords::unconstrained(a.angle() * a.axis());
  double theta = std::fmod(a.angle(), 2.0 * kPi);
  Vec3 axis = a.axis();
  if (theta > kPi) {
    theta = 2.0 * kPi - theta;
    axis = -axis;
  }
  return ExpCoords::constrained(theta * axis);
}

double dist_matrices(const RotationMatrix& r1, const RotationMatrix& r2) {
  const Mat3 m = r1.matrix() * r2.matrix().transpose();
  // cos and sin of the relative angle: (tr(M) - 1)/2 and |vee(M - M^T)|/2.
  const double c = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const Vec3 axis2(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double s = 0.5 * axis2.norm();
  return std::atan2(s, c);
}

double dist_exp(const ExpCoords& s1, const ExpCoords& s2) {
  return quat_vector_distance(exp_quat_vector(s1.vector()),
                              exp_quat_vector(s2.vector()));
}

double dist_quat(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  return quat_vector_distance(q1.vector(), q2.vector());
}

double dist_quat_from_angle(double phi) {
  if (!(phi >= 0.0 && phi <= kPi)) {
    throw InvalidArgument("quaternion angle must lie in [0, pi]");
  }
  return phi <= 0.5 * kPi ? 2.0 * phi : 2.0 * kPi - 2.0 * phi;
}

double compose_angle(const AxisAngle& a1, const AxisAngle& a2) {
  const double c1 = std::cos(0.5 * a1.angle()), s1 = std::sin(0.5 * a1.angle());
  const double c2 = std::cos(0.5 * a2.angle()), s2 = std::sin(0.5 * a2.angle());
  const Vec3& e1 = a1.axis();
  const Vec3& e2 = a2.axis();
  // Hamilton product of the two quaternions: scalar part is cos(theta3/2).
  const double scalar = c1 * c2 - e1.dot(e2) * s1 * s2;
  const Vec3 vec = c1 * s2 * e2 + c2 * s1 * e1 + s1 * s2 * e1.cross(e2);
  return 2.0 * std::atan2(vec.norm(), scalar);
}

double pose_cost(const Vec3& z, const Vec3& z_hat, const ExpCoords& s,
                 const ExpCoords& s_hat) {
  if (!all_finite(z) || !all_finite(z_hat)) {
    throw InvalidArgument("positions must be finite");
  }
  if (!s.is_constrained()) {
    throw InvalidArgument("true rotation must be constrained exponential coordinates");
  }
  return (z - z_hat).squaredNorm() + dist_exp(s, s_hat);
}

double double_cover_angle(double one_minus_a, double one_plus_a) {
  const double lo = std::max(0.0, std::min(one_minus_a, one_plus_a));
  const double hi = std::max(0.0, std::max(one_minus_a, one_plus_a));
  return 4.0 * std::atan2(std::sqrt(lo), std::sqrt(hi));
}

}  // namespace rotsense::rotkit
