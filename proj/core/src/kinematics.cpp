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

#include "dexgrasp/kinematics.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <sstream>

#include "canonical_json.hpp"
#include "dexgrasp/errors.hpp"

namespace dexgrasp {

using nlohmann::json;

const std::vector<std::string> kHumanKeypointNames = {
    "wrist",
    "thumb_cmc",  "thumb_mcp",  "thumb_ip",   "thumb_tip",
    "index_mcp",  "index_pip",  "index_dip",  "index_tip",
    "middle_mcp", "middle_pip", "middle_dip", "middle_tip",
    "ring_mcp",   "ring_pip",   "ring_dip",   "ring_tip",
    "pinky_mcp",  "pinky_pip",  "pinky_dip",  "pinky_tip",
};

int HandModel::link_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(links.size()); ++i) {
    if (links[i].name == name) return i;
  }
  return -1;
}

int HandModel::keypoint_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(keypoints.size()); ++i) {
    if (keypoints[i].name == name) return i;
  }
  return -1;
}

JointConfig HandModel::mid_range_config() const {
  JointConfig q(dof_count());
  for (int i = 0; i < dof_count(); ++i) {
    q[i] = 0.5 * (joints[i].lo + joints[i].hi);
  }
  return q;
}

void HandModel::finalize() {
  std::vector<std::string> errs;
  const int n = static_cast<int>(links.size());

  if (n == 0) errs.push_back("links: empty");

  // Unique names.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (links[i].name == links[j].name) {
        errs.push_back("links[" + std::to_string(j) + "]: duplicate name '" +
                       links[j].name + "'");
      }
    }
  }

  root_link = -1;
  for (int i = 0; i < n; ++i) {
    const int p = links[i].parent;
    if (p == -1) {
      if (root_link >= 0) {
        errs.push_back("links[" + std::to_string(i) +
                       "]: second root; exactly one link may have parent -1");
      }
      root_link = i;
    } else if (p < 0 || p >= n) {
      errs.push_back("links[" + std::to_string(i) + "].parent: index " +
                     std::to_string(p) + " out of range");
    }
  }
  if (root_link < 0) errs.push_back("links: no root link (parent -1)");

  // Cycle detection / topological order.
  topo_order.clear();
  if (root_link >= 0) {
    std::vector<std::vector<int>> children(n);
    for (int i = 0; i < n; ++i) {
      if (i != root_link && links[i].parent >= 0 && links[i].parent < n) {
        children[links[i].parent].push_back(i);
      }
    }
    std::deque<int> queue{root_link};
    std::vector<bool> seen(n, false);
    while (!queue.empty()) {
      int l = queue.front();
      queue.pop_front();
      if (seen[l]) continue;
      seen[l] = true;
      topo_order.push_back(l);
      for (int c : children[l]) queue.push_back(c);
    }
    if (static_cast<int>(topo_order.size()) != n) {
      errs.push_back("links: cycle detected or unreachable links "
                     "(tree must be rooted at the palm)");
    }
  }

  joint_of_link.assign(n, -1);
  for (int j = 0; j < static_cast<int>(joints.size()); ++j) {
    const Joint& jt = joints[j];
    if (jt.child_link < 0 || jt.child_link >= n) {
      errs.push_back("joints[" + std::to_string(j) + "] '" + jt.name +
                     "': child_link out of range");
      continue;
    }
    if (jt.child_link == root_link) {
      errs.push_back("joints[" + std::to_string(j) + "] '" + jt.name +
                     "': root link cannot be jointed");
    }
    if (joint_of_link[jt.child_link] != -1) {
      errs.push_back("joints[" + std::to_string(j) + "] '" + jt.name +
                     "': link already has a joint");
    }
    joint_of_link[jt.child_link] = j;
    if (!(jt.lo < jt.hi)) {
      errs.push_back("joints[" + std::to_string(j) + "] '" + jt.name +
                     "': limits must satisfy lo < hi");
    }
    if (!(jt.max_torque > 0.0)) {
      errs.push_back("joints[" + std::to_string(j) + "] '" + jt.name +
                     "': max_torque must be positive");
    }
    if (jt.axis.norm() < 1e-9) {
      errs.push_back("joints[" + std::to_string(j) + "] '" + jt.name +
                     "': zero axis");
    }
  }
  for (Joint& jt : joints) {
    if (jt.axis.norm() >= 1e-9) jt.axis.normalize();
  }

  palm_keypoint = -1;
  tip_keypoints.clear();
  for (int k = 0; k < static_cast<int>(keypoints.size()); ++k) {
    const Keypoint& kp = keypoints[k];
    if (kp.link < 0 || kp.link >= n) {
      errs.push_back("keypoints[" + std::to_string(k) + "] '" + kp.name +
                     "': link out of range");
    }
    if (kp.name == "palm") {
      if (palm_keypoint >= 0) {
        errs.push_back("keypoints: duplicate 'palm' keypoint");
      }
      palm_keypoint = k;
    }
    if (kp.name.size() > 4 &&
        kp.name.compare(kp.name.size() - 4, 4, "_tip") == 0) {
      tip_keypoints.push_back(k);
    }
  }
  if (palm_keypoint < 0) {
    errs.push_back("keypoints: missing required keypoint named 'palm'");
  }

  if (!errs.empty()) {
    std::ostringstream oss;
    oss << "hand model invalid (" << errs.size() << " errors):";
    for (const auto& e : errs) oss << "\n  - " << e;
    throw SchemaError(oss.str());
  }

  // Ancestor joint chains per keypoint, base->tip order.
  keypoint_chains.assign(keypoints.size(), {});
  for (size_t k = 0; k < keypoints.size(); ++k) {
    std::vector<int> chain;
    int l = keypoints[k].link;
    while (l != -1) {
      if (joint_of_link[l] != -1) chain.push_back(joint_of_link[l]);
      l = links[l].parent;
    }
    std::reverse(chain.begin(), chain.end());
    keypoint_chains[k] = std::move(chain);
  }
}

namespace {

Vec3 parse_vec3(const json& a, const std::string& path,
                std::vector<std::string>& errs) {
  if (!a.is_array() || a.size() != 3 ||
      !std::all_of(a.begin(), a.end(),
                   [](const json& v) { return v.is_number(); })) {
    errs.push_back(path + ": expected an array of 3 numbers");
    return Vec3::Zero();
  }
  return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& path, std::vector<std::string>& errs) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) errs.push_back(path + ": unknown field '" + it.key() + "'");
  }
  for (const char* k : allowed) {
    if (!obj.contains(k)) {
      errs.push_back(path + ": missing field '" + std::string(k) + "'");
    }
  }
}

}  // namespace

HandModel load_hand_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("hand model: not valid JSON: ") + e.what());
  }

  std::vector<std::string> errs;
  if (!doc.is_object()) {
    throw SchemaError("hand model: top level must be an object");
  }
  check_keys(doc, {"links", "joints", "keypoints"}, "$", errs);
  HandModel m;

  if (doc.contains("links") && doc["links"].is_array()) {
    int i = 0;
    for (const json& jl : doc["links"]) {
      const std::string path = "links[" + std::to_string(i) + "]";
      Link l;
      if (!jl.is_object()) {
        errs.push_back(path + ": expected object");
      } else {
        check_keys(jl, {"name", "parent", "xyz", "quat"}, path, errs);
        if (jl.contains("name") && jl["name"].is_string())
          l.name = jl["name"].get<std::string>();
        else
          errs.push_back(path + ".name: expected string");
        if (jl.contains("parent") && jl["parent"].is_number_integer())
          l.parent = jl["parent"].get<int>();
        else
          errs.push_back(path + ".parent: expected integer index (-1 = root)");
        if (jl.contains("xyz"))
          l.to_parent.translation = parse_vec3(jl["xyz"], path + ".xyz", errs);
        if (jl.contains("quat")) {
          const json& q = jl["quat"];
          if (!q.is_array() || q.size() != 4) {
            errs.push_back(path + ".quat: expected [w,x,y,z]");
          } else {
            l.to_parent.rotation =
                Quat(q[0].get<double>(), q[1].get<double>(),
                     q[2].get<double>(), q[3].get<double>());
            if (!is_unit(l.to_parent.rotation, 1e-6)) {
              errs.push_back(path + ".quat: not a unit quaternion");
            }
            l.to_parent.rotation.normalize();
          }
        }
      }
      m.links.push_back(std::move(l));
      ++i;
    }
  } else {
    errs.push_back("$.links: expected array");
  }

  if (doc.contains("joints") && doc["joints"].is_array()) {
    int i = 0;
    for (const json& jj : doc["joints"]) {
      const std::string path = "joints[" + std::to_string(i) + "]";
      Joint jt;
      if (!jj.is_object()) {
        errs.push_back(path + ": expected object");
      } else {
        check_keys(jj, {"name", "child_link", "axis", "limits", "max_torque"},
                   path, errs);
        if (jj.contains("name") && jj["name"].is_string())
          jt.name = jj["name"].get<std::string>();
        else
          errs.push_back(path + ".name: expected string");
        if (jj.contains("child_link") && jj["child_link"].is_number_integer())
          jt.child_link = jj["child_link"].get<int>();
        else
          errs.push_back(path + ".child_link: expected integer link index");
        if (jj.contains("axis"))
          jt.axis = parse_vec3(jj["axis"], path + ".axis", errs);
        if (jj.contains("limits")) {
          const json& lim = jj["limits"];
          if (!lim.is_array() || lim.size() != 2 || !lim[0].is_number() ||
              !lim[1].is_number()) {
            errs.push_back(path + ".limits: expected [lo, hi]");
          } else {
            jt.lo = lim[0].get<double>();
            jt.hi = lim[1].get<double>();
          }
        }
        if (jj.contains("max_torque") && jj["max_torque"].is_number())
          jt.max_torque = jj["max_torque"].get<double>();
        else if (jj.contains("max_torque"))
          errs.push_back(path + ".max_torque: expected number");
      }
      m.joints.push_back(std::move(jt));
      ++i;
    }
  } else {
    errs.push_back("$.joints: expected array");
  }

  if (doc.contains("keypoints") && doc["keypoints"].is_array()) {
    int i = 0;
    for (const json& jk : doc["keypoints"]) {
      const std::string path = "keypoints[" + std::to_string(i) + "]";
      Keypoint kp;
      if (!jk.is_object()) {
        errs.push_back(path + ": expected object");
      } else {
        check_keys(jk, {"name", "link", "offset"}, path, errs);
        if (jk.contains("name") && jk["name"].is_string())
          kp.name = jk["name"].get<std::string>();
        else
          errs.push_back(path + ".name: expected string");
        if (jk.contains("link") && jk["link"].is_number_integer())
          kp.link = jk["link"].get<int>();
        else
          errs.push_back(path + ".link: expected integer link index");
        if (jk.contains("offset"))
          kp.offset = parse_vec3(jk["offset"], path + ".offset", errs);
      }
      m.keypoints.push_back(std::move(kp));
      ++i;
    }
  } else {
    errs.push_back("$.keypoints: expected array");
  }

  if (!errs.empty()) {
    std::ostringstream oss;
    oss << "hand model schema violations (" << errs.size() << "):";
    for (const auto& e : errs) oss << "\n  - " << e;
    throw SchemaError(oss.str());
  }

  m.finalize();
  return m;
}

std::string hand_model_to_json(const HandModel& model) {
  detail::JsonBuf b;
  auto vec3 = [&](const Vec3& v) {
    b.begin_arr();
    b.value_num(v.x());
    b.value_num(v.y());
    b.value_num(v.z());
    b.end_arr();
  };
  b.begin_obj();
  b.key("links");
  b.begin_arr();
  for (const Link& l : model.links) {
    b.begin_obj();
    b.key("name");
    b.value_str(l.name);
    b.key("parent");
    b.value_int(l.parent);
    b.key("xyz");
    vec3(l.to_parent.translation);
    b.key("quat");
    b.begin_arr();
    b.value_num(l.to_parent.rotation.w());
    b.value_num(l.to_parent.rotation.x());
    b.value_num(l.to_parent.rotation.y());
    b.value_num(l.to_parent.rotation.z());
    b.end_arr();
    b.end_obj();
  }
  b.end_arr();
  b.key("joints");
  b.begin_arr();
  for (const Joint& j : model.joints) {
    b.begin_obj();
    b.key("name");
    b.value_str(j.name);
    b.key("child_link");
    b.value_int(j.child_link);
    b.key("axis");
    vec3(j.axis);
    b.key("limits");
    b.begin_arr();
    b.value_num(j.lo);
    b.value_num(j.hi);
    b.end_arr();
    b.key("max_torque");
    b.value_num(j.max_torque);
    b.end_obj();
  }
  b.end_arr();
  b.key("keypoints");
  b.begin_arr();
  for (const Keypoint& k : model.keypoints) {
    b.begin_obj();
    b.key("name");
    b.value_str(k.name);
    b.key("link");
    b.value_int(k.link);
    b.key("offset");
    vec3(k.offset);
    b.end_obj();
  }
  b.end_arr();
  b.end_obj();
  return b.take();
}

std::uint64_t hand_model_hash(const HandModel& model) {
  return detail::fnv1a(hand_model_to_json(model));
}

void link_world_poses(const HandModel& model, const HandState& state,
                      std::vector<SE3Pose>& link_poses) {
  if (state.joints.size() != model.dof_count()) {
    throw InvalidInputError(
        "forward_kinematics: joint vector length " +
        std::to_string(state.joints.size()) + " does not match model dof " +
        std::to_string(model.dof_count()));
  }
  link_poses.resize(model.links.size());
  for (int l : model.topo_order) {
    const Link& link = model.links[l];
    SE3Pose base = (link.parent == -1) ? state.palm_pose
                                       : link_poses[link.parent];
    SE3Pose p = base * link.to_parent;
    const int j = model.joint_of_link[l];
    if (j >= 0) {
      const Joint& joint = model.joints[j];
      SE3Pose rot;
      rot.rotation = Quat(Eigen::AngleAxisd(state.joints[j], joint.axis));
      p = p * rot;
    }
    link_poses[l] = p;
  }
}

std::vector<Vec3> fk_keypoints(const HandModel& model, const HandState& state) {
  std::vector<SE3Pose> poses;
  link_world_poses(model, state, poses);
  std::vector<Vec3> out(model.keypoints.size());
  for (size_t k = 0; k < model.keypoints.size(); ++k) {
    out[k] = poses[model.keypoints[k].link].apply(model.keypoints[k].offset);
  }
  return out;
}

std::map<std::string, Vec3> forward_kinematics(const HandModel& model,
                                               const HandState& state) {
  std::vector<Vec3> pts = fk_keypoints(model, state);
  std::map<std::string, Vec3> out;
  for (size_t k = 0; k < model.keypoints.size(); ++k) {
    out[model.keypoints[k].name] = pts[k];
  }
  return out;
}

JointConfig clamp_to_limits(const HandModel& model, const JointConfig& config) {
  if (config.size() != model.dof_count()) {
    throw InvalidInputError("clamp_to_limits: length mismatch");
  }
  JointConfig out = config;
  for (int i = 0; i < model.dof_count(); ++i) {
    out[i] = std::clamp(out[i], model.joints[i].lo, model.joints[i].hi);
  }
  return out;
}

bool within_limits(const HandModel& model, const JointConfig& config,
                   double tol) {
  if (config.size() != model.dof_count()) return false;
  for (int i = 0; i < model.dof_count(); ++i) {
    if (config[i] < model.joints[i].lo - tol ||
        config[i] > model.joints[i].hi + tol) {
      return false;
    }
  }
  return true;
}

}  // namespace dexgrasp
