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

#include "dexgrasp/refine.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dexgrasp/errors.hpp"
#include "dexgrasp/models.hpp"

namespace dexgrasp {

void PerturbationBounds::validate() const {
  if (p_min.size() != p_max.size()) {
    throw InvalidInputError("perturbation bounds: length mismatch");
  }
  for (int i = 0; i < p_min.size(); ++i) {
    if (p_min[i] > p_max[i]) {
      throw InvalidInputError(
          "perturbation bounds: p_min > p_max at dimension " +
          std::to_string(i));
    }
  }
}

PerturbationBounds PerturbationBounds::zero(int dof) {
  PerturbationBounds b;
  b.p_min = Eigen::VectorXd::Zero(6 + dof);
  b.p_max = Eigen::VectorXd::Zero(6 + dof);
  return b;
}

PerturbationBounds PerturbationBounds::defaults(int dof) {
  PerturbationBounds b;
  b.p_min = Eigen::VectorXd::Zero(6 + dof);
  b.p_max = Eigen::VectorXd::Zero(6 + dof);
  b.p_min.head<3>().setConstant(-0.01);
  b.p_max.head<3>().setConstant(0.01);
  b.p_min.segment<3>(3).setConstant(-0.05);
  b.p_max.segment<3>(3).setConstant(0.05);
  b.p_min.tail(dof).setConstant(-0.15);
  b.p_max.tail(dof).setConstant(0.25);
  return b;
}

std::vector<StablePose> compute_stable_poses(const ObjectSpec& object,
                                             const SimConfig& cfg) {
  object.validate();
  std::vector<StablePose> candidates;
  auto make = [](double z, const Quat& q, const char* face) {
    StablePose p;
    p.pose.translation = Vec3(0, 0, z);
    p.pose.rotation = q;
    p.support_face = face;
    return p;
  };
  const double kPi = 3.14159265358979323846;
  if (object.shape == ObjectSpec::Shape::box) {
    const double hw = 0.5 * object.w, hd = 0.5 * object.d, hh = 0.5 * object.h;
    candidates.push_back(make(hh, Quat::Identity(), "z-"));
    candidates.push_back(
        make(hh, Quat(Eigen::AngleAxisd(kPi, Vec3::UnitX())), "z+"));
    candidates.push_back(
        make(hd, Quat(Eigen::AngleAxisd(kPi / 2, Vec3::UnitX())), "y+"));
    candidates.push_back(
        make(hd, Quat(Eigen::AngleAxisd(-kPi / 2, Vec3::UnitX())), "y-"));
    candidates.push_back(
        make(hw, Quat(Eigen::AngleAxisd(kPi / 2, Vec3::UnitY())), "x-"));
    candidates.push_back(
        make(hw, Quat(Eigen::AngleAxisd(-kPi / 2, Vec3::UnitY())), "x+"));
  } else {
    candidates.push_back(make(0.5 * object.height, Quat::Identity(), "z-"));
    candidates.push_back(make(
        0.5 * object.height, Quat(Eigen::AngleAxisd(kPi, Vec3::UnitX())),
        "z+"));
    candidates.push_back(make(
        object.radius, Quat(Eigen::AngleAxisd(kPi / 2, Vec3::UnitX())),
        "side"));
  }

  // Settling gate: 1 s with a parked hand, drift below 1 mm.
  const HandModel parked = bundled_pincher();
  HandState hand;
  hand.palm_pose.translation = Vec3(0, 0, 1.0);
  hand.joints = JointConfig::Zero(parked.dof_count());
  PhysicsParams params;
  params.mass = object.nominal_mass;
  params.noise_std = 0.0;

  std::vector<StablePose> out;
  for (const StablePose& sp : candidates) {
    SimWorld world(parked, object, sp.pose, hand, params, cfg);
    bool ok = true;
    const int steps = static_cast<int>(cfg.control_rate);
    for (int i = 0; i < steps && ok; ++i) {
      world.step(hand);
      const double drift =
          (world.object_pose().translation - sp.pose.translation).norm();
      if (drift > 1e-3) ok = false;
    }
    if (ok) out.push_back(sp);
  }
  return out;
}

RobotTrajectory template_transform(const RobotTrajectory& traj,
                                   const SE3Pose& source_pose,
                                   const SE3Pose& target_pose) {
  if (traj.stage != Stage::retargeted && traj.stage != Stage::refined) {
    throw InvalidInputError(
        "template_transform: input stage must be retargeted or refined");
  }
  const SE3Pose t = target_pose * source_pose.inverse();
  RobotTrajectory out = traj;
  for (TrajFrame& f : out.frames) {
    f.hand.palm_pose = t * f.hand.palm_pose;
    f.object_pose = t * f.object_pose;
    f.tip_contacts.clear();
  }
  for (HandState& a : out.actions) {
    a.palm_pose = t * a.palm_pose;
  }
  out.stage = Stage::templated;
  return out;
}

Eigen::VectorXd sample_perturbation(const PerturbationBounds& bounds,
                                    double t) {
  bounds.validate();
  return t * bounds.p_max + (1.0 - t) * bounds.p_min;
}

Eigen::VectorXd sample_perturbation(const PerturbationBounds& bounds,
                                    Rng& rng) {
  return sample_perturbation(bounds, rng.uniform());
}

std::vector<HandState> perturb_actions(const HandModel& model,
                                       std::span<const HandState> actions,
                                       const Eigen::VectorXd& p) {
  if (p.size() != 6 + model.dof_count()) {
    throw InvalidInputError("perturb_actions: perturbation length mismatch");
  }
  const Vec3 dtrans = p.head<3>();
  const Quat drot = rot_exp(p.segment<3>(3));
  std::vector<HandState> out(actions.begin(), actions.end());
  for (HandState& a : out) {
    a.palm_pose.translation += dtrans;
    a.palm_pose.rotation = drot * a.palm_pose.rotation;
    a.joints = clamp_to_limits(model, a.joints + p.tail(model.dof_count()));
  }
  return out;
}

namespace {

RobotTrajectory trajectory_from_steps(const std::vector<StepSnapshot>& steps,
                                      int count,
                                      std::vector<HandState> actions,
                                      const std::string& source_demo,
                                      Stage stage) {
  RobotTrajectory traj;
  traj.stage = stage;
  traj.source_demo_id = source_demo;
  traj.frames.reserve(count);
  for (int i = 0; i < count; ++i) {
    TrajFrame f;
    f.hand = steps[i].hand;
    f.object_pose = steps[i].object_pose;
    f.tip_contacts = steps[i].tip_contacts;
    traj.frames.push_back(std::move(f));
  }
  traj.actions = std::move(actions);
  return traj;
}

// Runs fn(i) for i in [begin, end) across `workers` threads. Results must be
// written to per-index slots; the caller consumes them in index order.
void parallel_for(int begin, int end, int workers,
                  const std::function<void(int)>& fn) {
  if (workers <= 1 || end - begin <= 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<int> next(begin);
  std::vector<std::thread> pool;
  const int n = std::min(workers, end - begin);
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= end) break;
        fn(i);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace

std::vector<RefinedEntry> refine(const HandModel& model,
                                 std::span<const NominalTrajectory> nominals,
                                 const ObjectSpec& object,
                                 const RefineBudget& budget,
                                 const PerturbationBounds& bounds,
                                 const PhysicsParams& base_params,
                                 const RefineOptions& opts,
                                 const SimConfig& cfg,
                                 RefineDiagnostics* diag) {
  if (budget.target_count < 0) {
    throw InvalidInputError("refine: target_count must be >= 0");
  }
  if (budget.target_count == 0) return {};
  if (nominals.empty()) {
    throw InvalidInputError("refine: no nominal trajectories");
  }
  bounds.validate();

  struct CandidateResult {
    bool ok = false;
    RefinedEntry entry;
  };

  auto evaluate = [&](int index) -> CandidateResult {
    CandidateResult res;
    const NominalTrajectory& nominal =
        nominals[index % static_cast<int>(nominals.size())];
    if (nominal.traj->actions.empty()) return res;
    const std::uint64_t cseed = derive_seed(budget.seed, index);
    Rng trng(derive_seed(cseed, 1));
    const double t = trng.uniform();
    const Eigen::VectorXd p = sample_perturbation(bounds, t);
    const std::vector<HandState> actions =
        perturb_actions(model, nominal.traj->actions, p);
    const SE3Pose& object_pose = nominal.traj->frames.front().object_pose;
    const HandState& hand_init = nominal.traj->frames.front().hand;

    PhysicsParams base = base_params;
    const std::uint64_t stability_seed = derive_seed(cseed, 2);
    std::vector<PhysicsParams> draws;
    bool pass = true;
    const int k = opts.randomize_physics ? opts.k_draws : 1;
    for (int d = 0; d < k && pass; ++d) {
      PhysicsParams params;
      if (opts.randomize_physics) {
        params = randomize(base, derive_seed(stability_seed, d));
      } else {
        params = base;
        params.mass = object.nominal_mass;
        params.noise_std = 0.0;
        params.seed = derive_seed(stability_seed, d);
      }
      draws.push_back(params);
      try {
        const VerifiedRollout vr =
            verified_rollout(model, object, object_pose, hand_init, actions,
                             params, cfg, true);
        pass = vr.success_perturbed;
      } catch (const InvalidSetupError&) {
        pass = false;
      }
    }
    if (!pass) return res;

    // Accepted: rebuild the stored trajectory from draw 0 (replay params).
    const VerifiedRollout vr = verified_rollout(
        model, object, object_pose, hand_init, actions, draws[0], cfg, false);
    res.ok = true;
    res.entry.traj = trajectory_from_steps(
        vr.detail.steps, static_cast<int>(actions.size()) + 1,
        actions, nominal.traj->source_demo_id, Stage::refined);
    res.entry.source_id = nominal.id;
    res.entry.nominal_index = index % static_cast<int>(nominals.size());
    res.entry.candidate_seed = cseed;
    res.entry.t = t;
    res.entry.replay_params = draws[0];
    res.entry.k_draws = k;
    return res;
  };

  std::vector<RefinedEntry> accepted;
  RefineDiagnostics local;
  RefineDiagnostics& d = diag ? *diag : local;
  for (const NominalTrajectory& n : nominals) {
    d.per_nominal.emplace(n.id, std::make_pair(0, 0));
  }

  constexpr int kBlock = 32;
  for (int start = 0; start < budget.max_samples &&
                      static_cast<int>(accepted.size()) < budget.target_count;
       start += kBlock) {
    const int end = std::min(start + kBlock, budget.max_samples);
    std::vector<CandidateResult> results(end - start);
    parallel_for(start, end, opts.workers,
                 [&](int i) { results[i - start] = evaluate(i); });
    for (int i = start; i < end; ++i) {
      if (static_cast<int>(accepted.size()) >= budget.target_count) break;
      CandidateResult& r = results[i - start];
      const std::string& nid =
          nominals[i % static_cast<int>(nominals.size())].id;
      ++d.samples;
      ++d.per_nominal[nid].first;
      if (r.ok) {
        ++d.accepted;
        ++d.per_nominal[nid].second;
        accepted.push_back(std::move(r.entry));
      }
    }
  }
  return accepted;
}

std::vector<AugmentedEntry> augment_translation(
    const HandModel& model, std::span<const RefinedEntry> refined,
    const ObjectSpec& object, const AugmentOptions& opts,
    const SimConfig& cfg) {
  struct Slot {
    bool ok = false;
    AugmentedEntry entry;
  };
  const int per = opts.offsets_per_trajectory;
  const int total = static_cast<int>(refined.size()) * per;
  std::vector<Slot> slots(total);

  auto evaluate = [&](int index) {
    const RefinedEntry& src = refined[index / per];
    if (src.traj.stage != Stage::refined || src.traj.frames.empty()) return;
    Rng rng(derive_seed(opts.seed, index));
    const Vec3 offset(rng.uniform(-opts.max_offset, opts.max_offset),
                      rng.uniform(-opts.max_offset, opts.max_offset), 0.0);
    SE3Pose object_pose = src.traj.frames.front().object_pose;
    object_pose.translation += offset;
    // Reject placements that leave the table.
    if (std::abs(object_pose.translation.x()) > cfg.table_half_extent ||
        std::abs(object_pose.translation.y()) > cfg.table_half_extent) {
      return;
    }
    std::vector<HandState> actions = src.traj.actions;
    for (HandState& a : actions) a.palm_pose.translation += offset;
    HandState hand_init = src.traj.frames.front().hand;
    hand_init.palm_pose.translation += offset;

    try {
      const VerifiedRollout vr =
          verified_rollout(model, object, object_pose, hand_init, actions,
                           src.replay_params, cfg, false);
      if (!vr.success) return;
      Slot& s = slots[index];
      s.ok = true;
      s.entry.traj = trajectory_from_steps(
          vr.detail.steps, static_cast<int>(actions.size()) + 1, actions,
          src.traj.source_demo_id, Stage::augmented);
      s.entry.parent_id = src.source_id;
      s.entry.offset = offset;
      s.entry.replay_params = src.replay_params;
    } catch (const InvalidSetupError&) {
    }
  };

  parallel_for(0, total, opts.workers, evaluate);
  std::vector<AugmentedEntry> out;
  for (int i = 0; i < total; ++i) {
    if (slots[i].ok) out.push_back(std::move(slots[i].entry));
  }
  return out;
}

std::optional<FunneledEntry> funnel(const HandModel& model,
                                    const HandState& initial_hand,
                                    std::span<const FunnelCandidate> dataset,
                                    const ObjectSpec& object,
                                    const FunnelConfig& fcfg,
                                    const SimConfig& cfg) {
  if (dataset.empty()) {
    throw InvalidInputError("funnel: empty dataset");
  }
  if (fcfg.steps < 1) {
    throw InvalidInputError("funnel: steps must be >= 1");
  }

  // Rank candidates by weighted start-state distance; ties break on index.
  std::vector<std::pair<double, int>> ranked;
  for (size_t i = 0; i < dataset.size(); ++i) {
    const RobotTrajectory& t = *dataset[i].traj;
    if (t.frames.empty() || t.actions.empty()) continue;
    ranked.emplace_back(
        start_state_distance(initial_hand, t.frames.front().hand, fcfg.w_rot,
                             fcfg.w_joints),
        static_cast<int>(i));
  }
  std::sort(ranked.begin(), ranked.end());

  const int tries =
      std::min<int>(fcfg.max_candidates, static_cast<int>(ranked.size()));
  for (int c = 0; c < tries; ++c) {
    const FunnelCandidate& cand = dataset[ranked[c].second];
    const RobotTrajectory& t = *cand.traj;
    const HandState& start = t.frames.front().hand;

    // Prefix frames: interpolation from the initial hand to the trajectory
    // start; the last interpolant equals the start exactly, so the junction
    // is continuous.
    std::vector<HandState> actions;
    actions.reserve(fcfg.steps + t.actions.size());
    for (int i = 1; i <= fcfg.steps; ++i) {
      const double a = static_cast<double>(i) / fcfg.steps;
      HandState s;
      s.palm_pose = interpolate(initial_hand.palm_pose, start.palm_pose, a);
      s.joints = clamp_to_limits(
          model, (1.0 - a) * initial_hand.joints + a * start.joints);
      actions.push_back(std::move(s));
    }
    actions.insert(actions.end(), t.actions.begin(), t.actions.end());

    try {
      const VerifiedRollout vr = verified_rollout(
          model, object, t.frames.front().object_pose, initial_hand, actions,
          cand.replay_params, cfg, false);
      if (!vr.success) continue;
      // Prefix must be contact-free: no fingertip flag before the junction.
      bool clean = true;
      for (int i = 0; i <= fcfg.steps && clean; ++i) {
        for (std::uint8_t f : vr.detail.steps[i].tip_contacts) {
          if (f) {
            clean = false;
            break;
          }
        }
      }
      if (!clean) continue;
      FunneledEntry entry;
      entry.traj = trajectory_from_steps(
          vr.detail.steps, static_cast<int>(actions.size()) + 1,
          std::move(actions), t.source_demo_id, Stage::funneled);
      entry.parent_id = cand.id;
      entry.replay_params = cand.replay_params;
      return entry;
    } catch (const InvalidSetupError&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace dexgrasp
