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
#include <span>
#include <string>
#include <vector>

#include "dexgrasp/kinematics.hpp"
#include "dexgrasp/trajectory.hpp"

namespace dexgrasp {

// Simplified rigid-body grasp world: one primitive object on the z=0 table
// plane and a floating hand. The palm is kinematically servoed, finger joints
// are torque-limited PD, contacts are penalty springs with anchored Coulomb
// friction, integration is semi-implicit Euler at a fixed substep rate. Fully
// deterministic: all randomness enters through explicit seeds.

struct ObjectSpec {
  enum class Shape { box, cylinder };
  Shape shape = Shape::box;
  // box: full extents along x/y/z; cylinder: radius + height (axis z).
  double w = 0.06, d = 0.06, h = 0.06;
  double radius = 0.03, height = 0.06;
  double nominal_mass = 0.15;  // kg, <= 0.25
  std::string name = "object";

  static ObjectSpec Box(std::string name, double w, double d, double h,
                        double mass);
  static ObjectSpec Cylinder(std::string name, double radius, double height,
                             double mass);
  void validate() const;  // throws InvalidInputError
  Vec3 inertia_diag(double mass) const;
  double resting_half_height() const;  // upright pose center height
};

/// One domain-randomization draw.
struct PhysicsParams {
  double mass = 0.15;        // kg, randomized in [0.1, 0.25]
  double friction = 0.775;   // randomized in [0.7, 0.85]
  double noise_std = 0.01;   // m, action-translation noise
  std::uint64_t seed = 0;
};

/// Deterministic draw: mass in [0.1, 0.25] kg, friction in [0.7, 0.85];
/// noise_std carried over from the base.
PhysicsParams randomize(const PhysicsParams& base, std::uint64_t seed);

struct ContactReport {
  std::vector<std::string> tip_names;
  std::vector<double> force;       // N, fingertip-object normal force
  std::vector<std::uint8_t> flag;  // force > threshold (0.5 N)
};

struct SimConfig {
  double control_rate = 12.0;  // Hz
  int substeps = 80;           // per control step
  double gravity = 9.81;

  double k_normal = 4000.0;        // N/m penalty stiffness
  double k_tangent = 4000.0;       // N/m friction anchor stiffness
  double damping_ratio = 1.0;      // normal spring damping scale
  double tangent_damping = 10.0;   // N*s/m

  double fingertip_radius = 0.011;  // m, sphere proxy at keypoints
  double palm_radius = 0.025;

  double joint_kp = 4.0;        // N*m/rad
  double joint_kd = 0.12;       // N*m*s/rad
  double joint_inertia = 1e-3;  // kg*m^2 per joint
  double joint_viscous = 0.01;
  double palm_omega = 30.0;  // rad/s, critically damped palm tracker

  double table_half_extent = 0.40;  // m, logical placement bound
  double contact_flag_threshold = 0.5;   // N
  double spawn_penetration_tol = 0.005;  // m
  double table_penetration_tol = 0.002;  // m

  double lift_height = 0.10;   // m, success line
  double hold_seconds = 0.5;   // success must persist this long
  double perturb_seconds = 3.0;
  double perturb_translation = 0.005;  // m, jitter amplitude
  double perturb_rotation = 0.05;      // rad

  double dt() const { return 1.0 / (control_rate * substeps); }
  int hold_steps() const {
    return static_cast<int>(hold_seconds * control_rate + 0.5);
  }
};

struct SuccessSpec {
  double lift_height = 0.10;
  double hold_seconds = 0.5;
};

/// Signed distance from a world point to the primitive surface (< 0 inside).
/// `normal` (optional) receives the outward surface normal.
double signed_distance(const ObjectSpec& spec, const SE3Pose& pose,
                       const Vec3& point, Vec3* normal = nullptr);

/// n points uniform on the primitive surface, deterministic per seed,
/// rigidly transformed with the pose.
std::vector<Vec3> sample_surface_points(const ObjectSpec& spec,
                                        const SE3Pose& pose, int n,
                                        std::uint64_t seed);

class SimWorld {
 public:
  SimWorld(const HandModel& model, const ObjectSpec& object,
           const SE3Pose& object_pose, const HandState& hand_init,
           const PhysicsParams& params, const SimConfig& cfg = {});

  /// Advance one control step (1 / control_rate s) toward the target state.
  void step(const HandState& action);

  ContactReport contacts() const;

  const SE3Pose& object_pose() const { return obj_pose_; }
  const Vec3& object_velocity() const { return obj_vel_; }
  HandState hand_state() const;
  double time() const { return time_; }
  double object_height_gain() const {
    return obj_pose_.translation.z() - spawn_height_;
  }
  double max_table_penetration() const { return max_pen_; }
  const PhysicsParams& params() const { return params_; }
  const SimConfig& config() const { return cfg_; }
  const ObjectSpec& object() const { return object_; }
  const HandModel& model() const { return *model_; }

 private:
  void substep(const HandState& target);

  const HandModel* model_;
  ObjectSpec object_;
  PhysicsParams params_;
  SimConfig cfg_;

  // Object state.
  SE3Pose obj_pose_;
  Vec3 obj_vel_ = Vec3::Zero();
  Vec3 obj_omega_ = Vec3::Zero();  // world frame
  Vec3 inertia_body_ = Vec3::Ones();

  // Hand state.
  SE3Pose palm_;
  Vec3 palm_vel_ = Vec3::Zero();
  Vec3 palm_ang_vel_ = Vec3::Zero();
  JointConfig q_, qd_;

  double time_ = 0.0;
  double spawn_height_ = 0.0;
  double max_pen_ = 0.0;
  long step_index_ = 0;

  // Persistent friction anchors.
  struct TableAnchor {
    bool active = false;
    double x = 0, y = 0;
  };
  struct HandAnchor {
    bool active = false;
    Vec3 local = Vec3::Zero();  // object frame
  };
  std::vector<Vec3> table_points_;  // object body-frame contact samples
  std::vector<TableAnchor> table_anchors_;
  std::vector<HandAnchor> hand_anchors_;
  std::vector<double> kp_radius_;
  std::vector<double> tip_force_;  // per keypoint, last substep

  // Scratch buffers.
  std::vector<SE3Pose> link_poses_;
  std::vector<Vec3> kp_pos_;
  std::vector<Vec3> kp_vel_;
  std::vector<std::vector<Vec3>> kp_jac_;  // per keypoint, per chain joint
};

SimWorld spawn(const HandModel& model, const ObjectSpec& object,
               const SE3Pose& object_pose, const HandState& hand_init,
               const PhysicsParams& params, const SimConfig& cfg = {});

struct StepSnapshot {
  HandState hand;
  SE3Pose object_pose;
  std::vector<std::uint8_t> tip_contacts;
  double height_gain = 0.0;
};

struct RolloutResult {
  bool success = false;
  bool held = false;  // lift line maintained through the final hold window
  double final_height_gain = 0.0;
  double max_table_penetration = 0.0;
  std::vector<StepSnapshot> steps;  // steps[0] is the initial state
};

/// Execute an open-loop action sequence. Success: height gain of at least
/// `lift_height` at the end, maintained over the trailing hold window.
RolloutResult rollout(SimWorld world, std::span<const HandState> actions,
                      const SuccessSpec& spec = {});

struct VerifiedRollout {
  bool success = false;            // at end of the action sequence
  bool success_perturbed = false;  // also survived the jitter phase
  RolloutResult detail;
  int perturb_start = 0;  // snapshot index where the jitter phase begins
};

/// Rollout under one randomization draw: a single N(0, noise_std) offset
/// (drawn from params.seed) is applied to every action's palm translation;
/// optionally followed by perturb_seconds of seeded palm jitter during which
/// the object must never drop below the lift line.
VerifiedRollout verified_rollout(const HandModel& model,
                                 const ObjectSpec& object,
                                 const SE3Pose& object_pose,
                                 const HandState& hand_init,
                                 std::span<const HandState> actions,
                                 const PhysicsParams& params,
                                 const SimConfig& cfg = {},
                                 bool with_perturbation = false);

struct StabilityReport {
  bool pass = false;
  int draws_run = 0;
  std::vector<PhysicsParams> draws;
};

/// True iff the action sequence succeeds under K seeded randomization draws,
/// each with noise injection and the trailing perturbation phase.
StabilityReport stability_check(const HandModel& model,
                                const ObjectSpec& object,
                                const SE3Pose& object_pose,
                                const HandState& hand_init,
                                std::span<const HandState> actions, int K,
                                const PhysicsParams& base, std::uint64_t seed,
                                const SimConfig& cfg = {});

}  // namespace dexgrasp
