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

#include "dexgrasp/sim.hpp"

#include <algorithm>
#include <cmath>

#include "dexgrasp/errors.hpp"
#include "dexgrasp/rng.hpp"

namespace dexgrasp {

ObjectSpec ObjectSpec::Box(std::string name, double w, double d, double h,
                           double mass) {
  ObjectSpec s;
  s.shape = Shape::box;
  s.name = std::move(name);
  s.w = w;
  s.d = d;
  s.h = h;
  s.nominal_mass = mass;
  s.validate();
  return s;
}

ObjectSpec ObjectSpec::Cylinder(std::string name, double radius, double height,
                                double mass) {
  ObjectSpec s;
  s.shape = Shape::cylinder;
  s.name = std::move(name);
  s.radius = radius;
  s.height = height;
  s.nominal_mass = mass;
  s.validate();
  return s;
}

void ObjectSpec::validate() const {
  const bool dims_ok = (shape == Shape::box)
                           ? (w > 0 && d > 0 && h > 0)
                           : (radius > 0 && height > 0);
  if (!dims_ok) {
    throw InvalidInputError("object '" + name + "': dimensions must be positive");
  }
  if (!(nominal_mass > 0 && nominal_mass <= 0.25)) {
    throw InvalidInputError("object '" + name +
                            "': nominal_mass must be in (0, 0.25] kg");
  }
}

Vec3 ObjectSpec::inertia_diag(double mass) const {
  if (shape == Shape::box) {
    return Vec3(mass / 12.0 * (d * d + h * h), mass / 12.0 * (w * w + h * h),
                mass / 12.0 * (w * w + d * d));
  }
  const double ixx = mass * (3 * radius * radius + height * height) / 12.0;
  return Vec3(ixx, ixx, 0.5 * mass * radius * radius);
}

double ObjectSpec::resting_half_height() const {
  return (shape == Shape::box) ? 0.5 * h : 0.5 * height;
}

PhysicsParams randomize(const PhysicsParams& base, std::uint64_t seed) {
  Rng rng(seed);
  PhysicsParams p;
  p.mass = rng.uniform(0.1, 0.25);
  p.friction = rng.uniform(0.7, 0.85);
  p.noise_std = base.noise_std;
  p.seed = seed;
  return p;
}

double signed_distance(const ObjectSpec& spec, const SE3Pose& pose,
                       const Vec3& point, Vec3* normal) {
  const Vec3 q = pose.inverse().apply(point);
  Vec3 n_local = Vec3::UnitZ();
  double sd = 0.0;

  if (spec.shape == ObjectSpec::Shape::box) {
    const Vec3 e(0.5 * spec.w, 0.5 * spec.d, 0.5 * spec.h);
    const Vec3 qa = q.cwiseAbs() - e;
    if ((qa.array() <= 0.0).all()) {
      int axis = 0;
      qa.maxCoeff(&axis);
      sd = qa[axis];
      n_local = Vec3::Zero();
      n_local[axis] = (q[axis] >= 0.0) ? 1.0 : -1.0;
    } else {
      const Vec3 closest = q.cwiseMax(-e).cwiseMin(e);
      const Vec3 diff = q - closest;
      sd = diff.norm();
      n_local = diff / sd;
    }
  } else {
    const double rr = std::hypot(q.x(), q.y());
    const double dr = rr - spec.radius;
    const double dz = std::abs(q.z()) - 0.5 * spec.height;
    const double zsign = (q.z() >= 0.0) ? 1.0 : -1.0;
    const Vec3 radial =
        (rr > 1e-12) ? Vec3(q.x() / rr, q.y() / rr, 0.0) : Vec3::UnitX();
    if (dr <= 0.0 && dz <= 0.0) {
      if (dr > dz) {
        sd = dr;
        n_local = radial;
      } else {
        sd = dz;
        n_local = Vec3(0, 0, zsign);
      }
    } else {
      const double a = std::max(dr, 0.0);
      const double b = std::max(dz, 0.0);
      sd = std::hypot(a, b);
      n_local = (a * radial + b * Vec3(0, 0, zsign)) / sd;
    }
  }
  if (normal) *normal = pose.rotation * n_local;
  return sd;
}

std::vector<Vec3> sample_surface_points(const ObjectSpec& spec,
                                        const SE3Pose& pose, int n,
                                        std::uint64_t seed) {
  if (n < 1) throw InvalidInputError("sample_surface_points: n must be >= 1");
  Rng rng(seed);
  std::vector<Vec3> out;
  out.reserve(n);

  if (spec.shape == ObjectSpec::Shape::box) {
    const double ax = spec.d * spec.h;  // +-x faces
    const double ay = spec.w * spec.h;
    const double az = spec.w * spec.d;
    const double total = 2 * (ax + ay + az);
    for (int i = 0; i < n; ++i) {
      double u = rng.uniform() * total;
      Vec3 p;
      const double sx = 0.5 * spec.w, sy = 0.5 * spec.d, sz = 0.5 * spec.h;
      if (u < 2 * ax) {
        const double side = (u < ax) ? 1.0 : -1.0;
        p = Vec3(side * sx, rng.uniform(-sy, sy), rng.uniform(-sz, sz));
      } else if (u < 2 * ax + 2 * ay) {
        const double side = (u < 2 * ax + ay) ? 1.0 : -1.0;
        p = Vec3(rng.uniform(-sx, sx), side * sy, rng.uniform(-sz, sz));
      } else {
        const double side = (u < 2 * (ax + ay) + az) ? 1.0 : -1.0;
        p = Vec3(rng.uniform(-sx, sx), rng.uniform(-sy, sy), side * sz);
      }
      out.push_back(pose.apply(p));
    }
  } else {
    const double side_area = 2.0 * 3.14159265358979323846 * spec.radius *
                             spec.height;
    const double cap_area = 3.14159265358979323846 * spec.radius * spec.radius;
    const double total = side_area + 2 * cap_area;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform() * total;
      const double theta = rng.uniform() * 2.0 * 3.14159265358979323846;
      Vec3 p;
      if (u < side_area) {
        p = Vec3(spec.radius * std::cos(theta), spec.radius * std::sin(theta),
                 rng.uniform(-0.5 * spec.height, 0.5 * spec.height));
      } else {
        const double r = spec.radius * std::sqrt(rng.uniform());
        const double z = (u < side_area + cap_area) ? 0.5 * spec.height
                                                    : -0.5 * spec.height;
        p = Vec3(r * std::cos(theta), r * std::sin(theta), z);
      }
      out.push_back(pose.apply(p));
    }
  }
  return out;
}

namespace {

std::vector<Vec3> table_contact_points(const ObjectSpec& spec) {
  std::vector<Vec3> pts;
  if (spec.shape == ObjectSpec::Shape::box) {
    const double sx = 0.5 * spec.w, sy = 0.5 * spec.d, sz = 0.5 * spec.h;
    for (int ix : {-1, 1}) {
      for (int iy : {-1, 1}) {
        for (int iz : {-1, 1}) {
          pts.emplace_back(ix * sx, iy * sy, iz * sz);
        }
      }
    }
  } else {
    constexpr int kRim = 12;
    for (int iz : {-1, 1}) {
      const double z = iz * 0.5 * spec.height;
      pts.emplace_back(0, 0, z);
      for (int k = 0; k < kRim; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / kRim;
        pts.emplace_back(spec.radius * std::cos(a), spec.radius * std::sin(a),
                         z);
      }
    }
  }
  return pts;
}

}  // namespace

SimWorld::SimWorld(const HandModel& model, const ObjectSpec& object,
                   const SE3Pose& object_pose, const HandState& hand_init,
                   const PhysicsParams& params, const SimConfig& cfg)
    : model_(&model), object_(object), params_(params), cfg_(cfg) {
  object_.validate();
  if (hand_init.joints.size() != model.dof_count()) {
    throw InvalidInputError("spawn: hand state dof mismatch");
  }
  obj_pose_ = object_pose.normalized();
  palm_ = hand_init.palm_pose.normalized();
  q_ = clamp_to_limits(model, hand_init.joints);
  qd_ = JointConfig::Zero(model.dof_count());
  inertia_body_ = object_.inertia_diag(params_.mass);
  spawn_height_ = obj_pose_.translation.z();

  table_points_ = table_contact_points(object_);
  table_anchors_.assign(table_points_.size(), {});
  hand_anchors_.assign(model.keypoints.size(), {});
  tip_force_.assign(model.keypoints.size(), 0.0);
  kp_radius_.resize(model.keypoints.size());
  for (size_t k = 0; k < model.keypoints.size(); ++k) {
    kp_radius_[k] = (static_cast<int>(k) == model.palm_keypoint)
                        ? cfg_.palm_radius
                        : cfg_.fingertip_radius;
  }

  // Object must start on or above the table.
  double min_z = 1e9;
  for (const Vec3& bp : table_points_) {
    min_z = std::min(min_z, obj_pose_.apply(bp).z());
  }
  if (min_z < -cfg_.table_penetration_tol) {
    throw InvalidSetupError("spawn: object starts below the table plane");
  }

  // Hand must not interpenetrate the object.
  const std::vector<Vec3> kp = fk_keypoints(model, {palm_, q_});
  for (size_t k = 0; k < kp.size(); ++k) {
    const double sd = signed_distance(object_, obj_pose_, kp[k]);
    const double pen = kp_radius_[k] - sd;
    if (pen > cfg_.spawn_penetration_tol) {
      throw InvalidSetupError("spawn: keypoint '" + model.keypoints[k].name +
                              "' interpenetrates the object by " +
                              std::to_string(pen * 1000.0) + " mm");
    }
  }
}

HandState SimWorld::hand_state() const { return {palm_, q_}; }

ContactReport SimWorld::contacts() const {
  ContactReport rep;
  for (int k : model_->tip_keypoints) {
    rep.tip_names.push_back(model_->keypoints[k].name);
    rep.force.push_back(tip_force_[k]);
    rep.flag.push_back(tip_force_[k] > cfg_.contact_flag_threshold ? 1 : 0);
  }
  return rep;
}

void SimWorld::step(const HandState& action) {
  if (action.joints.size() != model_->dof_count()) {
    throw InvalidInputError("step: action dof mismatch");
  }
  for (int s = 0; s < cfg_.substeps; ++s) {
    substep(action);
  }
  ++step_index_;
  if (!obj_pose_.translation.allFinite() || !q_.allFinite() ||
      !palm_.translation.allFinite()) {
    throw NumericalError("simulation blew up at control step " +
                         std::to_string(step_index_));
  }
}

void SimWorld::substep(const HandState& target) {
  const double dt = cfg_.dt();
  const double m = params_.mass;
  const double mu = params_.friction;
  const double g = cfg_.gravity;
  const double c_normal = cfg_.damping_ratio * std::sqrt(cfg_.k_normal * m);

  // Hand kinematics: keypoint positions, velocities, jacobian columns.
  link_world_poses(*model_, {palm_, q_}, link_poses_);
  const size_t nk = model_->keypoints.size();
  kp_pos_.resize(nk);
  kp_vel_.resize(nk);
  kp_jac_.resize(nk);
  for (size_t k = 0; k < nk; ++k) {
    const Keypoint& kp = model_->keypoints[k];
    kp_pos_[k] = link_poses_[kp.link].apply(kp.offset);
    Vec3 v = palm_vel_ + palm_ang_vel_.cross(kp_pos_[k] - palm_.translation);
    const auto& chain = model_->keypoint_chains[k];
    kp_jac_[k].resize(chain.size());
    for (size_t c = 0; c < chain.size(); ++c) {
      const int j = chain[c];
      const int child = model_->joints[j].child_link;
      const Vec3 axis_w =
          link_poses_[child].rotation * model_->joints[j].axis;
      const Vec3 origin_w = link_poses_[child].translation;
      kp_jac_[k][c] = axis_w.cross(kp_pos_[k] - origin_w);
      v += qd_[j] * kp_jac_[k][c];
    }
    kp_vel_[k] = v;
  }

  Vec3 force(0, 0, -m * g);
  Vec3 torque = Vec3::Zero();
  JointConfig joint_torque = JointConfig::Zero(model_->dof_count());
  const Vec3 obj_pos = obj_pose_.translation;
  const SE3Pose obj_inv = obj_pose_.inverse();

  // Object-table contacts.
  for (size_t i = 0; i < table_points_.size(); ++i) {
    const Vec3 y = obj_pose_.apply(table_points_[i]);
    const double pen = -y.z();
    TableAnchor& anchor = table_anchors_[i];
    if (pen <= 0.0) {
      anchor.active = false;
      continue;
    }
    max_pen_ = std::max(max_pen_, pen);
    const Vec3 v_pt = obj_vel_ + obj_omega_.cross(y - obj_pos);
    double fn = cfg_.k_normal * pen - c_normal * v_pt.z();
    if (fn < 0.0) fn = 0.0;
    if (!anchor.active) {
      anchor.active = true;
      anchor.x = y.x();
      anchor.y = y.y();
    }
    Eigen::Vector2d ft =
        -cfg_.k_tangent * Eigen::Vector2d(y.x() - anchor.x, y.y() - anchor.y) -
        cfg_.tangent_damping * Eigen::Vector2d(v_pt.x(), v_pt.y());
    const double cap = mu * fn;
    const double ftn = ft.norm();
    if (ftn > cap) {
      ft *= (ftn > 1e-12) ? cap / ftn : 0.0;
      anchor.x = y.x() + ft.x() / cfg_.k_tangent;
      anchor.y = y.y() + ft.y() / cfg_.k_tangent;
    }
    const Vec3 f(ft.x(), ft.y(), fn);
    force += f;
    torque += (y - obj_pos).cross(f);
  }

  // Hand-object contacts (sphere proxies at keypoints).
  for (size_t k = 0; k < nk; ++k) {
    Vec3 n;
    const double sd = signed_distance(object_, obj_pose_, kp_pos_[k], &n);
    const double pen = kp_radius_[k] - sd;
    HandAnchor& anchor = hand_anchors_[k];
    tip_force_[k] = 0.0;
    if (pen <= 0.0) {
      anchor.active = false;
      continue;
    }
    const Vec3 cp = kp_pos_[k] - n * sd;  // point on the object surface
    const Vec3 v_obj_pt = obj_vel_ + obj_omega_.cross(cp - obj_pos);
    const double approach = (v_obj_pt - kp_vel_[k]).dot(n);
    double fn = cfg_.k_normal * pen + c_normal * approach;
    if (fn < 0.0) fn = 0.0;
    tip_force_[k] = fn;

    if (!anchor.active) {
      anchor.active = true;
      anchor.local = obj_inv.apply(kp_pos_[k]);
    }
    const Vec3 aw = obj_pose_.apply(anchor.local);
    Vec3 d_t = kp_pos_[k] - aw;
    d_t -= n * n.dot(d_t);
    Vec3 v_rel_t = kp_vel_[k] - v_obj_pt;
    v_rel_t -= n * n.dot(v_rel_t);
    Vec3 f_sphere_t = -cfg_.k_tangent * d_t - cfg_.tangent_damping * v_rel_t;
    const double cap = mu * fn;
    const double ftn = f_sphere_t.norm();
    if (ftn > cap) {
      f_sphere_t *= (ftn > 1e-12) ? cap / ftn : 0.0;
      const Vec3 aw_new = kp_pos_[k] + f_sphere_t / cfg_.k_tangent;
      anchor.local = obj_inv.apply(aw_new);
    }
    const Vec3 f_sphere = fn * n + f_sphere_t;
    force -= f_sphere;
    torque += (cp - obj_pos).cross(-f_sphere);
    const auto& chain = model_->keypoint_chains[k];
    for (size_t c = 0; c < chain.size(); ++c) {
      joint_torque[chain[c]] += kp_jac_[k][c].dot(f_sphere);
    }
  }

  // Hand-table contacts: normal penalty plus capped viscous friction.
  for (size_t k = 0; k < nk; ++k) {
    const double pen = kp_radius_[k] - kp_pos_[k].z();
    if (pen <= 0.0) continue;
    double fn = cfg_.k_normal * pen - c_normal * kp_vel_[k].z();
    if (fn < 0.0) fn = 0.0;
    Vec3 vt(kp_vel_[k].x(), kp_vel_[k].y(), 0.0);
    Vec3 ft = -cfg_.tangent_damping * vt;
    const double cap = mu * fn;
    if (ft.norm() > cap) ft *= cap / ft.norm();
    const Vec3 f = Vec3(0, 0, fn) + ft;
    const auto& chain = model_->keypoint_chains[k];
    for (size_t c = 0; c < chain.size(); ++c) {
      joint_torque[chain[c]] += kp_jac_[k][c].dot(f);
    }
  }

  // Object: semi-implicit Euler, gyroscopic term in the body frame.
  obj_vel_ += dt * force / m;
  obj_pose_.translation += dt * obj_vel_;
  const Eigen::Matrix3d rm = obj_pose_.rotation.toRotationMatrix();
  const Vec3 omega_b = rm.transpose() * obj_omega_;
  const Vec3 torque_b = rm.transpose() * torque;
  const Vec3 l_b = inertia_body_.cwiseProduct(omega_b);
  const Vec3 omega_dot_b =
      (torque_b - omega_b.cross(l_b)).cwiseQuotient(inertia_body_);
  obj_omega_ = rm * (omega_b + dt * omega_dot_b);
  obj_pose_.rotation =
      (rot_exp(obj_omega_ * dt) * obj_pose_.rotation).normalized();
  obj_pose_.chain = 0;

  // Finger joints: torque-limited PD plus contact torques.
  for (int j = 0; j < model_->dof_count(); ++j) {
    const Joint& joint = model_->joints[j];
    double tau = cfg_.joint_kp * (target.joints[j] - q_[j]) -
                 cfg_.joint_kd * qd_[j];
    tau = std::clamp(tau, -joint.max_torque, joint.max_torque);
    tau += joint_torque[j] - cfg_.joint_viscous * qd_[j];
    qd_[j] += dt * tau / cfg_.joint_inertia;
    q_[j] += dt * qd_[j];
    if (q_[j] < joint.lo) {
      q_[j] = joint.lo;
      qd_[j] = std::max(qd_[j], 0.0);
    } else if (q_[j] > joint.hi) {
      q_[j] = joint.hi;
      qd_[j] = std::min(qd_[j], 0.0);
    }
  }

  // Palm: critically damped second-order tracker in the 6-dof chart. The palm
  // is kinematic; contact forces do not push back on it.
  const double w0 = cfg_.palm_omega;
  const Vec3 acc =
      w0 * w0 * (target.palm_pose.translation - palm_.translation) -
      2.0 * w0 * palm_vel_;
  palm_vel_ += dt * acc;
  palm_.translation += dt * palm_vel_;
  const Vec3 rot_err =
      rot_log(target.palm_pose.rotation * palm_.rotation.conjugate());
  const Vec3 ang_acc = w0 * w0 * rot_err - 2.0 * w0 * palm_ang_vel_;
  palm_ang_vel_ += dt * ang_acc;
  palm_.rotation = (rot_exp(palm_ang_vel_ * dt) * palm_.rotation).normalized();
  palm_.chain = 0;

  time_ += dt;
}

SimWorld spawn(const HandModel& model, const ObjectSpec& object,
               const SE3Pose& object_pose, const HandState& hand_init,
               const PhysicsParams& params, const SimConfig& cfg) {
  return SimWorld(model, object, object_pose, hand_init, params, cfg);
}

namespace {

StepSnapshot snapshot_of(const SimWorld& w) {
  StepSnapshot s;
  s.hand = w.hand_state();
  s.object_pose = w.object_pose();
  s.tip_contacts = w.contacts().flag;
  s.height_gain = w.object_height_gain();
  return s;
}

bool sustained_success(const std::vector<StepSnapshot>& steps, int end_index,
                       double lift, int hold_steps) {
  if (end_index < hold_steps) return false;
  for (int i = end_index - hold_steps; i <= end_index; ++i) {
    if (steps[i].height_gain < lift) return false;
  }
  return true;
}

}  // namespace

RolloutResult rollout(SimWorld world, std::span<const HandState> actions,
                      const SuccessSpec& spec) {
  if (actions.empty()) {
    throw InvalidInputError("rollout: empty action sequence");
  }
  RolloutResult res;
  res.steps.push_back(snapshot_of(world));
  for (const HandState& a : actions) {
    world.step(a);
    res.steps.push_back(snapshot_of(world));
  }
  const int hold =
      static_cast<int>(spec.hold_seconds * world.config().control_rate + 0.5);
  const int end = static_cast<int>(res.steps.size()) - 1;
  res.final_height_gain = res.steps[end].height_gain;
  res.held = sustained_success(res.steps, end, spec.lift_height, hold);
  res.success = res.held && res.final_height_gain >= spec.lift_height;
  res.max_table_penetration = world.max_table_penetration();
  return res;
}

VerifiedRollout verified_rollout(const HandModel& model,
                                 const ObjectSpec& object,
                                 const SE3Pose& object_pose,
                                 const HandState& hand_init,
                                 std::span<const HandState> actions,
                                 const PhysicsParams& params,
                                 const SimConfig& cfg,
                                 bool with_perturbation) {
  if (actions.empty()) {
    throw InvalidInputError("verified_rollout: empty action sequence");
  }
  // One noise draw per trajectory, applied to every action translation.
  Rng noise_rng(derive_seed(params.seed, 0x5eedULL));
  const Vec3 noise(params.noise_std * noise_rng.normal(),
                   params.noise_std * noise_rng.normal(),
                   params.noise_std * noise_rng.normal());
  std::vector<HandState> noisy(actions.begin(), actions.end());
  for (HandState& a : noisy) a.palm_pose.translation += noise;

  SimWorld world(model, object, object_pose, hand_init, params, cfg);
  VerifiedRollout out;
  RolloutResult& res = out.detail;
  res.steps.push_back(snapshot_of(world));
  for (const HandState& a : noisy) {
    world.step(a);
    res.steps.push_back(snapshot_of(world));
  }
  const int hold = cfg.hold_steps();
  const int action_end = static_cast<int>(res.steps.size()) - 1;
  out.perturb_start = action_end;
  out.success =
      sustained_success(res.steps, action_end, cfg.lift_height, hold);

  if (with_perturbation) {
    Rng jitter(derive_seed(params.seed, 0x9e77ULL));
    const HandState& base = noisy.back();
    const int n = static_cast<int>(cfg.perturb_seconds * cfg.control_rate);
    bool stayed_up = out.success;
    for (int i = 0; i < n; ++i) {
      HandState t = base;
      for (int a = 0; a < 3; ++a) {
        t.palm_pose.translation[a] +=
            jitter.uniform(-cfg.perturb_translation, cfg.perturb_translation);
      }
      Vec3 rv(jitter.uniform(-cfg.perturb_rotation, cfg.perturb_rotation),
              jitter.uniform(-cfg.perturb_rotation, cfg.perturb_rotation),
              jitter.uniform(-cfg.perturb_rotation, cfg.perturb_rotation));
      t.palm_pose.rotation = rot_exp(rv) * base.palm_pose.rotation;
      world.step(t);
      res.steps.push_back(snapshot_of(world));
      if (res.steps.back().height_gain < cfg.lift_height) stayed_up = false;
    }
    out.success_perturbed = out.success && stayed_up;
  } else {
    out.success_perturbed = out.success;
  }

  const int end = static_cast<int>(res.steps.size()) - 1;
  res.final_height_gain = res.steps[end].height_gain;
  res.held = out.success;
  res.success = out.success;
  res.max_table_penetration = world.max_table_penetration();
  return out;
}

StabilityReport stability_check(const HandModel& model,
                                const ObjectSpec& object,
                                const SE3Pose& object_pose,
                                const HandState& hand_init,
                                std::span<const HandState> actions, int K,
                                const PhysicsParams& base, std::uint64_t seed,
                                const SimConfig& cfg) {
  if (K < 1) throw InvalidInputError("stability_check: K must be >= 1");
  StabilityReport rep;
  rep.pass = true;
  for (int k = 0; k < K; ++k) {
    const PhysicsParams draw = randomize(base, derive_seed(seed, k));
    rep.draws.push_back(draw);
    ++rep.draws_run;
    const VerifiedRollout vr = verified_rollout(
        model, object, object_pose, hand_init, actions, draw, cfg, true);
    if (!vr.success_perturbed) {
      rep.pass = false;
      break;
    }
  }
  return rep;
}

}  // namespace dexgrasp
