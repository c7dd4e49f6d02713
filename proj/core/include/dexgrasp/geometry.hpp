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

#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>

namespace dexgrasp {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// Rotations are stored as unit quaternions everywhere; rotation matrices are
// derived views only. q and -q denote the same rotation.
using Rotation = Eigen::Quaterniond;

inline constexpr double kUnitQuatTol = 1e-6;

bool is_unit(const Quat& q, double tol = kUnitQuatTol);

/// Shortest-arc angle between two rotations, in [0, pi]. Handles the double
/// cover: geodesic_distance(q, -q) == 0. Throws InvalidInputError if either
/// quaternion deviates from unit norm by more than kUnitQuatTol.
double geodesic_distance(const Rotation& a, const Rotation& b);

bool rotations_equal(const Rotation& a, const Rotation& b, double tol = 1e-9);

/// Axis-angle (rotation vector) exponential / logarithm.
Quat rot_exp(const Vec3& axis_angle);
Vec3 rot_log(const Quat& q);

/// Rigid transform: rotation followed by translation, x -> R x + t.
struct SE3Pose {
  Vec3 translation{Vec3::Zero()};
  Quat rotation{Quat::Identity()};

  static SE3Pose Identity() { return SE3Pose{}; }
  static SE3Pose FromArray(const std::array<double, 7>& a);

  // Serialized as [tx, ty, tz, qw, qx, qy, qz].
  std::array<double, 7> to_array() const;

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  SE3Pose inverse() const;
  Eigen::Matrix4d matrix() const;
  SE3Pose normalized() const;

  // Compositions since the rotation was last renormalized; long chains are
  // renormalized to bound quaternion drift.
  std::uint8_t chain = 0;
};

SE3Pose operator*(const SE3Pose& a, const SE3Pose& b);

/// Express `world_pose` in the coordinates of `frame`:
/// frame * relative_pose(world_pose, frame) == world_pose.
SE3Pose relative_pose(const SE3Pose& world_pose, const SE3Pose& frame);

bool poses_equal(const SE3Pose& a, const SE3Pose& b, double tol = 1e-9);

/// Interpolate from `a` (t=0) to `b` (t=1): linear in translation, spherical
/// in rotation.
SE3Pose interpolate(const SE3Pose& a, const SE3Pose& b, double t);

}  // namespace dexgrasp
