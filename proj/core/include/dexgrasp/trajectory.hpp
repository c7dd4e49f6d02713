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

#include <string>
#include <vector>

#include "dexgrasp/kinematics.hpp"

namespace dexgrasp {

enum class Stage { retargeted, templated, refined, augmented, funneled };

const char* stage_name(Stage s);
Stage stage_from_name(const std::string& name);  // throws SchemaError

struct TrajFrame {
  HandState hand;
  SE3Pose object_pose;
  // Per-fingertip binary contact flags (force above threshold). Empty for
  // kinematic stages, filled for simulated ones.
  std::vector<std::uint8_t> tip_contacts;
};

/// Time series at the control rate. actions[t] is the target driven between
/// frames[t] and frames[t+1], so len(actions) == len(frames) - 1.
struct RobotTrajectory {
  std::vector<TrajFrame> frames;
  std::vector<HandState> actions;
  std::string source_demo_id;
  Stage stage = Stage::retargeted;
};

/// Weighted start-state distance used by funneling and the nearest-neighbor
/// baseline: |dtrans| + w_rot * geodesic + w_joints * |dq|_2.
double start_state_distance(const HandState& a, const HandState& b,
                            double w_rot = 0.3, double w_joints = 0.1);

}  // namespace dexgrasp
