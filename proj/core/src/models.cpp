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

#include "dexgrasp/models.hpp"

namespace dexgrasp {

namespace {

// Finger geometry for the bundled 16-dof hand (m).
constexpr double kProx = 0.050;
constexpr double kMed = 0.032;
constexpr double kDist = 0.030;
constexpr double kBaseX = 0.040;
constexpr double kSpreadY = 0.032;
constexpr double kMaxTorque = 0.6;

struct FingerSpec {
  const char* name;
  Vec3 base;
  bool flipped;  // thumb points -x
};

void add_finger(HandModel& m, const FingerSpec& f) {
  const int palm = 0;
  Quat base_rot = Quat::Identity();
  if (f.flipped) {
    base_rot = Quat(Eigen::AngleAxisd(3.14159265358979323846, Vec3::UnitZ()));
  }
  auto add_link = [&](const std::string& name, int parent, const Vec3& xyz,
                      const Quat& q) {
    Link l;
    l.name = name;
    l.parent = parent;
    l.to_parent.translation = xyz;
    l.to_parent.rotation = q;
    m.links.push_back(l);
    return static_cast<int>(m.links.size()) - 1;
  };
  auto add_joint = [&](const std::string& name, int child, const Vec3& axis,
                       double lo, double hi) {
    Joint j;
    j.name = name;
    j.child_link = child;
    j.axis = axis;
    j.lo = lo;
    j.hi = hi;
    j.max_torque = kMaxTorque;
    m.joints.push_back(j);
  };
  const std::string n = f.name;
  int base = add_link(n + "_base", palm, f.base, base_rot);
  int prox = add_link(n + "_prox", base, Vec3::Zero(), Quat::Identity());
  int med = add_link(n + "_med", prox, Vec3(kProx, 0, 0), Quat::Identity());
  int dist = add_link(n + "_dist", med, Vec3(kMed, 0, 0), Quat::Identity());
  add_joint(n + "_abd", base, Vec3::UnitZ(), -0.35, 0.35);
  add_joint(n + "_mcp", prox, Vec3::UnitY(), -0.20, 1.60);
  add_joint(n + "_pip", med, Vec3::UnitY(), -0.20, 1.70);
  add_joint(n + "_dip", dist, Vec3::UnitY(), -0.20, 1.70);
  m.keypoints.push_back({n + "_tip", dist, Vec3(kDist, 0, 0)});
  m.keypoints.push_back({n + "_mid", dist, Vec3::Zero()});
}

HandModel build_hand16() {
  HandModel m;
  m.links.push_back({"palm", -1, SE3Pose::Identity()});
  m.keypoints.push_back({"palm", 0, Vec3::Zero()});
  add_finger(m, {"index", Vec3(kBaseX, kSpreadY, 0), false});
  add_finger(m, {"middle", Vec3(kBaseX, 0, 0), false});
  add_finger(m, {"ring", Vec3(kBaseX, -kSpreadY, 0), false});
  add_finger(m, {"thumb", Vec3(-kBaseX, 0, 0), true});
  return m;
}

HandModel build_pincher() {
  HandModel m;
  m.links.push_back({"palm", -1, SE3Pose::Identity()});
  Link left;
  left.name = "left_finger";
  left.parent = 0;
  left.to_parent.translation = Vec3(0, 0.04, 0);
  m.links.push_back(left);
  Link right;
  right.name = "right_finger";
  right.parent = 0;
  right.to_parent.translation = Vec3(0, -0.04, 0);
  m.links.push_back(right);
  m.joints.push_back({"left_swing", 1, Vec3::UnitX(), -1.2, 1.2, kMaxTorque});
  m.joints.push_back({"right_swing", 2, Vec3::UnitX(), -1.2, 1.2, kMaxTorque});
  m.keypoints.push_back({"palm", 0, Vec3::Zero()});
  m.keypoints.push_back({"left_tip", 1, Vec3(0, 0, -0.08)});
  m.keypoints.push_back({"right_tip", 2, Vec3(0, 0, -0.08)});
  return m;
}

}  // namespace

std::string bundled_hand16_json() { return hand_model_to_json(build_hand16()); }

HandModel bundled_hand16() { return load_hand_model(bundled_hand16_json()); }

std::string bundled_pincher_json() {
  return hand_model_to_json(build_pincher());
}

HandModel bundled_pincher() { return load_hand_model(bundled_pincher_json()); }

JointConfig hand16_open_config() {
  JointConfig q(16);
  for (int f = 0; f < 4; ++f) {
    q[4 * f + 0] = 0.0;
    q[4 * f + 1] = 0.25;
    q[4 * f + 2] = 0.20;
    q[4 * f + 3] = 0.15;
  }
  return q;
}

JointConfig hand16_grip_config() {
  JointConfig q(16);
  for (int f = 0; f < 4; ++f) {
    q[4 * f + 0] = 0.0;
    q[4 * f + 1] = 1.05;
    q[4 * f + 2] = 0.95;
    q[4 * f + 3] = 0.55;
  }
  return q;
}

}  // namespace dexgrasp
