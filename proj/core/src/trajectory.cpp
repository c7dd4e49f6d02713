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

#include "dexgrasp/trajectory.hpp"

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::retargeted: return "retargeted";
    case Stage::templated: return "templated";
    case Stage::refined: return "refined";
    case Stage::augmented: return "augmented";
    case Stage::funneled: return "funneled";
  }
  return "unknown";
}

Stage stage_from_name(const std::string& name) {
  if (name == "retargeted") return Stage::retargeted;
  if (name == "templated") return Stage::templated;
  if (name == "refined") return Stage::refined;
  if (name == "augmented") return Stage::augmented;
  if (name == "funneled") return Stage::funneled;
  throw SchemaError("unknown trajectory stage '" + name + "'");
}

double start_state_distance(const HandState& a, const HandState& b,
                            double w_rot, double w_joints) {
  double d = (a.palm_pose.translation - b.palm_pose.translation).norm();
  d += w_rot * geodesic_distance(a.palm_pose.rotation, b.palm_pose.rotation);
  d += w_joints * (a.joints - b.joints).norm();
  return d;
}

}  // namespace dexgrasp
