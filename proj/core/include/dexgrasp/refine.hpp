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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dexgrasp/rng.hpp"
#include "dexgrasp/sim.hpp"
#include "dexgrasp/trajectory.hpp"

namespace dexgrasp {

// Turns nominal trajectories into a large verified dataset: template matching
// across object poses, correlated-sampling refinement with rejection,
// object-centric translation augmentation, and funneling from novel initial
// hand states.

/// Per-actuated-dimension perturbation range, laid out as
/// [palm translation xyz (m), palm rotation vector xyz (rad), joints (rad)].
struct PerturbationBounds {
  Eigen::VectorXd p_min, p_max;

  void validate() const;  // componentwise p_min <= p_max, equal lengths
  static PerturbationBounds zero(int dof);
  /// Joints biased toward closing (-0.15 .. +0.25 rad), palm translation
  /// within 1 cm, palm rotation within 0.05 rad.
  static PerturbationBounds defaults(int dof);
};

struct StablePose {
  SE3Pose pose;
  std::string support_face;
};

struct RefineBudget {
  int target_count = 0;  // N
  int max_samples = 0;
  std::uint64_t seed = 0;
};

/// Analytic resting poses (box: 6 faces; cylinder: both flat ends plus
/// side-lying), each verified by a 1 s settling rollout with < 1 mm drift.
std::vector<StablePose> compute_stable_poses(const ObjectSpec& object,
                                             const SimConfig& cfg = {});

/// Re-pose a trajectory for a new initial object pose: end-effector and
/// object poses are left-multiplied by target * source^-1, finger joints are
/// copied unchanged. Input stage must be retargeted or refined.
RobotTrajectory template_transform(const RobotTrajectory& traj,
                                   const SE3Pose& source_pose,
                                   const SE3Pose& target_pose);

/// One shared scalar t drives every dimension:
/// p_k = t * p_max_k + (1 - t) * p_min_k (coordinated perturbation).
Eigen::VectorXd sample_perturbation(const PerturbationBounds& bounds, double t);
Eigen::VectorXd sample_perturbation(const PerturbationBounds& bounds, Rng& rng);

/// The nominal's actions with a perturbation vector applied to every step;
/// joint targets are clamped to limits.
std::vector<HandState> perturb_actions(const HandModel& model,
                                       std::span<const HandState> actions,
                                       const Eigen::VectorXd& p);

struct RefinedEntry {
  RobotTrajectory traj;        // simulated frames + perturbed actions
  std::string source_id;       // nominal record id
  int nominal_index = 0;
  std::uint64_t candidate_seed = 0;
  double t = 0.0;
  PhysicsParams replay_params;  // draw 0 of the stability gate
  int k_draws = 0;
};

struct RefineDiagnostics {
  int samples = 0;
  int accepted = 0;
  std::map<std::string, std::pair<int, int>> per_nominal;  // samples, accepts
};

struct NominalTrajectory {
  const RobotTrajectory* traj;
  std::string id;
};

struct RefineOptions {
  int k_draws = 10;
  bool randomize_physics = true;  // false: nominal params, zero noise
  int workers = 1;
};

/// Correlated-sampling refinement with rejection. Every accepted trajectory
/// passed the K-draw stability gate; acceptance order is deterministic
/// regardless of worker count. An exhausted budget with zero acceptances is
/// reported through the diagnostics, not an error.
std::vector<RefinedEntry> refine(const HandModel& model,
                                 std::span<const NominalTrajectory> nominals,
                                 const ObjectSpec& object,
                                 const RefineBudget& budget,
                                 const PerturbationBounds& bounds,
                                 const PhysicsParams& base_params,
                                 const RefineOptions& opts,
                                 const SimConfig& cfg = {},
                                 RefineDiagnostics* diag = nullptr);

struct AugmentOptions {
  int offsets_per_trajectory = 8;
  double max_offset = 0.05;  // m, uniform square in the table plane
  std::uint64_t seed = 0;
  int workers = 1;
};

struct AugmentedEntry {
  RobotTrajectory traj;
  std::string parent_id;
  Vec3 offset = Vec3::Zero();
  PhysicsParams replay_params;
};

/// Translate object start pose and palm targets together; keep offsets whose
/// rollout still succeeds. Off-table placements are rejected outright.
std::vector<AugmentedEntry> augment_translation(
    const HandModel& model, std::span<const RefinedEntry> refined,
    const ObjectSpec& object, const AugmentOptions& opts,
    const SimConfig& cfg = {});

struct FunnelConfig {
  int steps = 12;          // interpolation frames prepended
  int max_candidates = 3;  // nearest trajectories to try
  double w_rot = 0.3;
  double w_joints = 0.1;
};

struct FunnelCandidate {
  const RobotTrajectory* traj;
  std::string id;
  PhysicsParams replay_params;
};

struct FunneledEntry {
  RobotTrajectory traj;
  std::string parent_id;
  PhysicsParams replay_params;
};

/// Prepend a free-space interpolation from `initial_hand` to the nearest
/// trajectory start (weighted start-state distance), verify the prefix is
/// contact-free and the concatenation still succeeds. Returns nullopt when no
/// candidate yields a collision-free, successful funnel.
std::optional<FunneledEntry> funnel(const HandModel& model,
                                    const HandState& initial_hand,
                                    std::span<const FunnelCandidate> dataset,
                                    const ObjectSpec& object,
                                    const FunnelConfig& fcfg,
                                    const SimConfig& cfg = {});

}  // namespace dexgrasp
