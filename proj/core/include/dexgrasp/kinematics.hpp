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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dexgrasp/geometry.hpp"

namespace dexgrasp {

struct Link {
  std::string name;
  int parent = -1;  // -1 marks the root (floating palm base)
  SE3Pose to_parent;
};

struct Joint {
  std::string name;
  int child_link = -1;
  Vec3 axis = Vec3::UnitZ();  // unit, in the child link frame
  double lo = 0.0;
  double hi = 0.0;
  double max_torque = 0.6;  // N*m
};

struct Keypoint {
  std::string name;
  int link = -1;
  Vec3 offset = Vec3::Zero();  // m, in the link frame
};

/// A configuration is one angle vector, length dof_count().
using JointConfig = Eigen::VectorXd;

/// Articulated hand: a tree of links rooted at a free-floating palm, revolute
/// joints only. Immutable after load; forward kinematics is pure.
struct HandModel {
  std::vector<Link> links;
  std::vector<Joint> joints;
  std::vector<Keypoint> keypoints;

  // Derived tables, filled by finalize().
  int root_link = -1;
  int palm_keypoint = -1;
  std::vector<int> topo_order;        // parents before children
  std::vector<int> joint_of_link;     // -1 where the link is fixed
  std::vector<std::vector<int>> keypoint_chains;  // ancestor joints, base->tip
  std::vector<int> tip_keypoints;     // keypoints whose name ends in "_tip"

  int dof_count() const { return static_cast<int>(joints.size()); }
  int link_index(const std::string& name) const;      // -1 if absent
  int keypoint_index(const std::string& name) const;  // -1 if absent

  JointConfig mid_range_config() const;

  /// Validates the tree and builds the derived tables. Throws SchemaError
  /// listing every violated constraint.
  void finalize();
};

struct HandState {
  SE3Pose palm_pose;
  JointConfig joints;
};

/// One frame of an ingested human demonstration: 21 named landmarks plus the
/// palm orientation and the object pose, all in the world frame. The landmark
/// convention follows the common 21-point mocap layout (wrist + 4 points per
/// finger); see kHumanKeypointNames.
struct HumanFrame {
  std::map<std::string, Vec3> keypoints;
  Rotation palm_orientation = Quat::Identity();
  SE3Pose object_pose;
};

extern const std::vector<std::string> kHumanKeypointNames;  // size 21

/// Parse and validate a hand model document (JSON, schema documented in the
/// README). Unknown fields are rejected; every violated constraint is
/// reported in the SchemaError message with its path.
HandModel load_hand_model(const std::string& json_text);

/// Canonical serialization of a model; stable across load/save and used for
/// the dataset header hash.
std::string hand_model_to_json(const HandModel& model);
std::uint64_t hand_model_hash(const HandModel& model);

/// World pose of every link, in link order. `link_poses` is resized.
void link_world_poses(const HandModel& model, const HandState& state,
                      std::vector<SE3Pose>& link_poses);

/// Keypoint world positions in model keypoint order (fast path).
std::vector<Vec3> fk_keypoints(const HandModel& model, const HandState& state);

/// Keypoint world positions by name.
std::map<std::string, Vec3> forward_kinematics(const HandModel& model,
                                               const HandState& state);

/// Componentwise clamp into [lo, hi]; idempotent.
JointConfig clamp_to_limits(const HandModel& model, const JointConfig& config);

bool within_limits(const HandModel& model, const JointConfig& config,
                   double tol = 1e-12);

}  // namespace dexgrasp
