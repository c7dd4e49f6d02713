// Copyright 2026 The dexgrasp Authors
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

#include "dexgrasp/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

namespace {
constexpr std::uint8_t kRenormalizeChain = 16;
}

bool is_unit(const Quat& q, double tol) {
  return std::abs(q.norm() - 1.0) <= tol;
}

double geodesic_distance(const Rotation& a, const Rotation& b) {
  if (!is_unit(a) || !is_unit(b)) {
    throw InvalidInputError("geodesic_distance: non-unit quaternion input");
  }
  const Quat rel = a.conjugate() * b;
  const double v = rel.vec().norm();
  const double w = std::abs(rel.w());
  return 2.0 * std::atan2(v, w);
}

bool rotations_equal(const Rotation& a, const Rotation& b, double tol) {
  return geodesic_distance(a, b) <= tol;
}

Quat rot_exp(const Vec3& axis_angle) {
  const double theta = axis_angle.norm();
  double half = 0.5 * theta;
  double s;
  if (theta < 1e-8) {
    // sin(theta/2)/theta ~ 1/2 - theta^2/48
    s = 0.5 - theta * theta / 48.0;
  } else {
    s = std::sin(half) / theta;
  }
  Quat q;
  q.w() = std::cos(half);
  q.vec() = s * axis_angle;
  return q;
}

Vec3 rot_log(const Quat& q_in) {
  Quat q = q_in;
  if (q.w() < 0.0) {
    q.coeffs() = -q.coeffs();
  }
  const double v = q.vec().norm();
  const double theta = 2.0 * std::atan2(v, q.w());
  if (v < 1e-12) {
    return 2.0 * q.vec();
  }
  return (theta / v) * q.vec();
}

SE3Pose SE3Pose::FromArray(const std::array<double, 7>& a) {
  SE3Pose p;
  p.translation = Vec3(a[0], a[1], a[2]);
  p.rotation = Quat(a[3], a[4], a[5], a[6]);
  return p;
}

std::array<double, 7> SE3Pose::to_array() const {
  return {translation.x(), translation.y(), translation.z(),
          rotation.w(),    rotation.x(),    rotation.y(),
          rotation.z()};
}

SE3Pose SE3Pose::inverse() const {
  SE3Pose out;
  out.rotation = rotation.conjugate();
  out.translation = -(out.rotation * translation);
  out.chain = chain;
  return out;
}

Eigen::Matrix4d SE3Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.toRotationMatrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

SE3Pose SE3Pose::normalized() const {
  SE3Pose out = *this;
  out.rotation.normalize();
  out.chain = 0;
  return out;
}

SE3Pose operator*(const SE3Pose& a, const SE3Pose& b) {
  SE3Pose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  const std::uint8_t chain = std::max(a.chain, b.chain) + 1;
  if (chain > kRenormalizeChain) {
    out.rotation.normalize();
    out.chain = 0;
  } else {
    out.chain = chain;
  }
  return out;
}

SE3Pose relative_pose(const SE3Pose& world_pose, const SE3Pose& frame) {
  return frame.inverse() * world_pose;
}

bool poses_equal(const SE3Pose& a, const SE3Pose& b, double tol) {
  return (a.translation - b.translation).norm() <= tol &&
         rotations_equal(a.rotation, b.rotation, tol);
}

SE3Pose interpolate(const SE3Pose& a, const SE3Pose& b, double t) {
  SE3Pose out;
  out.translation = (1.0 - t) * a.translation + t * b.translation;
  out.rotation = a.rotation.slerp(t, b.rotation);
  return out;
}

}  // namespace dexgrasp
