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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dexgrasp/kinematics.hpp"
#include "dexgrasp/trajectory.hpp"

namespace dexgrasp {

// Maps each human demonstration frame onto a robot hand state by minimizing
// a weighted sum of three terms: squared mismatch of scaled inter-keypoint
// displacement vectors, distance between stacked object-center-to-fingertip
// displacements, and the palm orientation geodesic.

/// One displacement-vector pairing: the vector human_b - human_a on the human
/// side is matched (after scaling) against robot_b - robot_a on the robot.
struct KeypointPair {
  std::string human_a, human_b;
  std::string robot_a, robot_b;
};

struct OptimizerConfig {
  std::string method = "nelder_mead";
  int max_iters = 120;     // per block run
  double tolerance = 1e-9;  // relative simplex spread
  int restarts = 1;         // extra perturbed starts beyond the warm start
  int cycles = 3;           // coordinate-descent sweeps over blocks
};

struct RetargetConfig {
  double w_f = 1.0;
  double w_obj = 1.0;
  double w_r = 0.5;
  double s_r = 1.6;  // robot/human scale ratio
  std::vector<KeypointPair> keypoint_pairs;
  // human tip name -> robot tip keypoint name, for the object-centric term
  std::vector<std::pair<std::string, std::string>> tip_pairs;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidInputError

  /// Fingertip-to-fingertip plus palm-to-wrist displacement pairs inferred
  /// from the model's *_tip keypoints (human pinky unused).
  static RetargetConfig defaults_for(const HandModel& model);
};

/// Sum of squared displacement-vector mismatches (>= 0).
double cost_df(const std::map<std::string, Vec3>& robot_kp,
               const std::map<std::string, Vec3>& human_kp,
               const RetargetConfig& cfg);

/// L2 norm of the stacked differences between center-to-tip displacement
/// vectors of robot and human.
double cost_dobj(std::span<const Vec3> robot_tips,
                 std::span<const Vec3> human_tips, const Vec3& object_center);

/// Palm orientation term; delegates to the rotation geodesic.
double cost_dr(const Rotation& robot_palm, const Rotation& human_palm);

struct RetargetFrameResult {
  HandState state;
  double cost = 0.0;
  // Best cost after each optimizer iteration, across blocks and restarts;
  // non-increasing by construction.
  std::vector<double> best_cost_history;
};

RetargetFrameResult retarget_frame(const HandModel& model,
                                   const HumanFrame& frame,
                                   const RetargetConfig& cfg,
                                   const HandState* warm_start = nullptr,
                                   std::uint64_t seed = 0);

/// Retarget a whole demonstration; each frame is warm-started from its
/// predecessor and actions follow the next-position rule.
RobotTrajectory retarget_trajectory(const HandModel& model,
                                    std::span<const HumanFrame> demo,
                                    const RetargetConfig& cfg);

}  // namespace dexgrasp
