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

#include "dexgrasp/retarget.hpp"

#include <algorithm>
#include <cmath>

#include "dexgrasp/errors.hpp"
#include "dexgrasp/optimize.hpp"
#include "dexgrasp/rng.hpp"

namespace dexgrasp {

void RetargetConfig::validate() const {
  if (w_f < 0 || w_obj < 0 || w_r < 0) {
    throw InvalidInputError("retarget weights must be nonnegative");
  }
  if (w_f == 0 && w_obj == 0 && w_r == 0) {
    throw InvalidInputError("retarget weights must not all be zero");
  }
  if (!(s_r > 0)) {
    throw InvalidInputError("scale ratio s_r must be positive");
  }
}

RetargetConfig RetargetConfig::defaults_for(const HandModel& model) {
  RetargetConfig cfg;
  static const std::vector<std::pair<std::string, std::string>> kHumanTips = {
      {"thumb", "thumb_tip"},
      {"index", "index_tip"},
      {"middle", "middle_tip"},
      {"ring", "ring_tip"},
  };
  for (int k : model.tip_keypoints) {
    const std::string& robot_tip = model.keypoints[k].name;
    for (const auto& [finger, human_tip] : kHumanTips) {
      if (robot_tip.rfind(finger, 0) == 0) {
        cfg.keypoint_pairs.push_back({"wrist", human_tip, "palm", robot_tip});
        cfg.tip_pairs.emplace_back(human_tip, robot_tip);
        break;
      }
    }
  }
  return cfg;
}

double cost_df(const std::map<std::string, Vec3>& robot_kp,
               const std::map<std::string, Vec3>& human_kp,
               const RetargetConfig& cfg) {
  auto fetch = [](const std::map<std::string, Vec3>& m, const std::string& n,
                  const char* side) -> const Vec3& {
    auto it = m.find(n);
    if (it == m.end()) {
      throw InvalidInputError(std::string("cost_df: missing ") + side +
                              " keypoint '" + n + "'");
    }
    return it->second;
  };
  double total = 0.0;
  for (const KeypointPair& p : cfg.keypoint_pairs) {
    const Vec3 dr =
        fetch(robot_kp, p.robot_b, "robot") - fetch(robot_kp, p.robot_a, "robot");
    const Vec3 dh =
        fetch(human_kp, p.human_b, "human") - fetch(human_kp, p.human_a, "human");
    total += (dr - cfg.s_r * dh).squaredNorm();
  }
  return total;
}

double cost_dobj(std::span<const Vec3> robot_tips,
                 std::span<const Vec3> human_tips, const Vec3& object_center) {
  if (robot_tips.size() != human_tips.size()) {
    throw InvalidInputError("cost_dobj: tip count mismatch");
  }
  double sq = 0.0;
  for (size_t i = 0; i < robot_tips.size(); ++i) {
    const Vec3 dr = robot_tips[i] - object_center;
    const Vec3 dh = human_tips[i] - object_center;
    sq += (dr - dh).squaredNorm();
  }
  return std::sqrt(sq);
}

double cost_dr(const Rotation& robot_palm, const Rotation& human_palm) {
  return geodesic_distance(robot_palm, human_palm);
}

namespace {

// Resolved cost context for one frame: indices instead of name lookups.
struct FrameObjective {
  const HandModel* model;
  const RetargetConfig* cfg;
  std::vector<std::pair<int, int>> pair_idx;  // robot keypoint (a, b)
  std::vector<Vec3> pair_target;              // s_r * (human_b - human_a)
  std::vector<int> tip_idx;
  std::vector<Vec3> tip_target;  // human tip - object center
  Vec3 object_center;
  Rotation human_palm;
  Rotation ref_rot;  // rotation chart reference

  HandState decode(const Eigen::VectorXd& x) const {
    HandState s;
    s.palm_pose.translation = x.head<3>();
    s.palm_pose.rotation = rot_exp(x.segment<3>(3)) * ref_rot;
    s.joints = clamp_to_limits(*model, x.tail(model->dof_count()));
    return s;
  }

  double operator()(const Eigen::VectorXd& x) const {
    const HandState s = decode(x);
    const std::vector<Vec3> kp = fk_keypoints(*model, s);
    double df = 0.0;
    for (size_t i = 0; i < pair_idx.size(); ++i) {
      df += (kp[pair_idx[i].second] - kp[pair_idx[i].first] - pair_target[i])
                .squaredNorm();
    }
    double dobj_sq = 0.0;
    for (size_t i = 0; i < tip_idx.size(); ++i) {
      dobj_sq += (kp[tip_idx[i]] - object_center - tip_target[i]).squaredNorm();
    }
    const double dobj = std::sqrt(dobj_sq);
    const double dr = geodesic_distance(s.palm_pose.rotation, human_palm);
    return cfg->w_f * df + cfg->w_obj * dobj + cfg->w_r * dr;
  }
};

FrameObjective build_objective(const HandModel& model, const HumanFrame& frame,
                               const RetargetConfig& cfg,
                               const Rotation& ref_rot) {
  FrameObjective obj;
  obj.model = &model;
  obj.cfg = &cfg;
  obj.object_center = frame.object_pose.translation;
  obj.human_palm = frame.palm_orientation;
  obj.ref_rot = ref_rot;

  auto human = [&](const std::string& n) -> const Vec3& {
    auto it = frame.keypoints.find(n);
    if (it == frame.keypoints.end()) {
      throw InvalidInputError("retarget_frame: missing human keypoint '" + n +
                              "'");
    }
    if (!it->second.allFinite()) {
      throw InvalidInputError("retarget_frame: non-finite human keypoint '" +
                              n + "'");
    }
    return it->second;
  };
  auto robot = [&](const std::string& n) {
    const int k = model.keypoint_index(n);
    if (k < 0) {
      throw InvalidInputError("retarget_frame: missing robot keypoint '" + n +
                              "'");
    }
    return k;
  };

  for (const KeypointPair& p : cfg.keypoint_pairs) {
    obj.pair_idx.emplace_back(robot(p.robot_a), robot(p.robot_b));
    obj.pair_target.push_back(cfg.s_r * (human(p.human_b) - human(p.human_a)));
  }
  for (const auto& [human_tip, robot_tip] : cfg.tip_pairs) {
    obj.tip_idx.push_back(robot(robot_tip));
    obj.tip_target.push_back(human(human_tip) - obj.object_center);
  }
  return obj;
}

}  // namespace

RetargetFrameResult retarget_frame(const HandModel& model,
                                   const HumanFrame& frame,
                                   const RetargetConfig& cfg,
                                   const HandState* warm_start,
                                   std::uint64_t seed) {
  cfg.validate();
  const int dof = model.dof_count();
  const int n = 6 + dof;

  Rotation ref_rot =
      warm_start ? warm_start->palm_pose.rotation : frame.palm_orientation;
  FrameObjective obj = build_objective(model, frame, cfg, ref_rot);

  Eigen::VectorXd x0(n);
  if (warm_start) {
    x0.head<3>() = warm_start->palm_pose.translation;
    x0.segment<3>(3).setZero();
    x0.tail(dof) = warm_start->joints;
  } else {
    auto wrist = frame.keypoints.find("wrist");
    x0.head<3>() = (wrist != frame.keypoints.end()) ? wrist->second
                                                    : frame.object_pose.translation;
    x0.segment<3>(3).setZero();
    for (int j = 0; j < dof; ++j) {
      x0[6 + j] = model.joints[j].lo +
                  0.3 * (model.joints[j].hi - model.joints[j].lo);
    }
  }

  // Coordinate-descent blocks: palm chart, then joints in chunks of four.
  std::vector<std::vector<int>> blocks;
  blocks.push_back({0, 1, 2, 3, 4, 5});
  for (int j = 0; j < dof; j += 4) {
    std::vector<int> blk;
    for (int k = j; k < std::min(j + 4, dof); ++k) blk.push_back(6 + k);
    blocks.push_back(blk);
  }

  Eigen::VectorXd steps(n);
  steps.head<3>().setConstant(0.02);
  steps.segment<3>(3).setConstant(0.08);
  steps.tail(dof).setConstant(0.15);

  RetargetFrameResult out;
  Eigen::VectorXd best_x = x0;
  double best_f = obj(x0);
  out.best_cost_history.push_back(best_f);

  auto run_cycles = [&](Eigen::VectorXd x) {
    double fx = obj(x);
    for (int cycle = 0; cycle < cfg.optimizer.cycles; ++cycle) {
      for (const auto& blk : blocks) {
        Eigen::VectorXd y0(blk.size());
        Eigen::VectorXd ysteps(blk.size());
        for (size_t i = 0; i < blk.size(); ++i) {
          y0[i] = x[blk[i]];
          ysteps[i] = steps[blk[i]];
        }
        Eigen::VectorXd xfull = x;
        auto sub = [&](const Eigen::VectorXd& y) {
          for (size_t i = 0; i < blk.size(); ++i) xfull[blk[i]] = y[i];
          return obj(xfull);
        };
        NelderMeadOptions nm;
        nm.max_iters = cfg.optimizer.max_iters;
        nm.ftol_rel = cfg.optimizer.tolerance;
        nm.initial_steps = ysteps;
        NelderMeadResult r = nelder_mead(sub, y0, nm);
        if (r.fx < fx) {
          fx = r.fx;
          for (size_t i = 0; i < blk.size(); ++i) x[blk[i]] = r.x[i];
        }
        for (double h : r.best_history) {
          const double g = std::min(best_f, std::min(h, fx));
          out.best_cost_history.push_back(std::min(g, out.best_cost_history.back()));
        }
        if (fx < best_f) {
          best_f = fx;
          best_x = x;
        }
      }
    }
  };

  run_cycles(x0);
  Rng rng(derive_seed(cfg.seed, seed));
  for (int r = 0; r < cfg.optimizer.restarts; ++r) {
    Eigen::VectorXd x = best_x;
    for (int i = 0; i < 3; ++i) x[i] += rng.uniform(-0.02, 0.02);
    for (int i = 3; i < 6; ++i) x[i] += rng.uniform(-0.1, 0.1);
    for (int i = 6; i < n; ++i) x[i] += rng.uniform(-0.2, 0.2);
    run_cycles(x);
  }

  out.state = obj.decode(best_x);
  out.cost = best_f;
  return out;
}

RobotTrajectory retarget_trajectory(const HandModel& model,
                                    std::span<const HumanFrame> demo,
                                    const RetargetConfig& cfg) {
  if (demo.empty()) {
    throw InvalidInputError("retarget_trajectory: empty demonstration");
  }
  RobotTrajectory traj;
  traj.stage = Stage::retargeted;
  HandState warm;
  bool have_warm = false;
  for (size_t t = 0; t < demo.size(); ++t) {
    RetargetFrameResult r;
    try {
      r = retarget_frame(model, demo[t], cfg, have_warm ? &warm : nullptr,
                         static_cast<std::uint64_t>(t));
    } catch (const InvalidInputError& e) {
      throw InvalidInputError("frame " + std::to_string(t) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("frame " + std::to_string(t) + ": " + e.what());
    }
    warm = r.state;
    have_warm = true;
    TrajFrame f;
    f.hand = r.state;
    f.object_pose = demo[t].object_pose;
    traj.frames.push_back(std::move(f));
  }
  for (size_t t = 0; t + 1 < traj.frames.size(); ++t) {
    traj.actions.push_back(traj.frames[t + 1].hand);
  }
  return traj;
}

}  // namespace dexgrasp
