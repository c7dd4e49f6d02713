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

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dexgrasp/dataset.hpp"
#include "dexgrasp/sim.hpp"
#include "dexgrasp/trajectory.hpp"

namespace dexgrasp {

// Behavior-cloning policy over palm-relative features with a 5-frame history
// and three output branches (palm translation delta, palm rotation delta as
// an axis-angle chart, finger joint targets). The network is a plain
// feedforward net with hand-written backpropagation; the scene is summarized
// geometrically (object center shift plus optional max-pooled surface
// points) instead of a learned point-cloud encoder.

struct FeatureConfig {
  int history = 5;
  bool use_contacts = false;
  bool use_surface_points = true;
  int surface_points = 16;
  int point_feature_dim = 32;

  // Filled from the hand model.
  int dof = 0;
  int keypoint_count = 0;
  int tip_count = 0;

  int frame_dim() const {
    return dof + 3 * keypoint_count + 3 + (use_contacts ? tip_count : 0);
  }
  int history_dim() const { return history * frame_dim(); }
  int point_block_dim() const {
    return use_surface_points ? 3 * surface_points : 0;
  }
  int input_dim() const { return history_dim() + point_block_dim(); }
  int trunk_input_dim() const {
    return history_dim() + (use_surface_points ? point_feature_dim : 0);
  }
  static FeatureConfig for_model(const HandModel& model);
};

struct ObsFrame {
  HandState hand;
  SE3Pose object_pose;
  std::vector<std::uint8_t> tip_contacts;  // used when use_contacts is set
};

/// Feature vector for the newest frame of `window` (oldest first; shorter
/// windows are padded by repeating the oldest frame). Everything is expressed
/// in the current palm frame, so the result is invariant under any global
/// rigid transform of the whole scene. `surface_points` (world frame) are
/// required iff cfg.use_surface_points.
Eigen::VectorXd featurize(const HandModel& model,
                          std::span<const ObsFrame> window,
                          const FeatureConfig& cfg,
                          std::span<const Vec3> surface_points = {});

struct PolicyOutput {
  Vec3 dtrans = Vec3::Zero();   // m, in the current palm frame
  Vec3 drot = Vec3::Zero();     // axis-angle chart, palm-local
  Eigen::VectorXd fingers;      // absolute joint targets (rad)
};

/// Branch losses: |dtrans error| + rotation geodesic between exp(drot) and
/// exp(target) + |finger error|. Zero iff the two are equal as actions.
double loss(const PolicyOutput& pred, const PolicyOutput& target);

struct MLPPolicy {
  FeatureConfig feat;
  std::vector<int> hidden = {256, 256, 128};

  // Optional shared per-point linear+relu encoder, max-pooled over points.
  Eigen::MatrixXd point_w;  // [point_feature_dim x 3]
  Eigen::VectorXd point_b;
  std::vector<Eigen::MatrixXd> w;  // trunk weights
  std::vector<Eigen::VectorXd> b;
  Eigen::MatrixXd head_t, head_r, head_f;
  Eigen::VectorXd bias_t, bias_r, bias_f;

  static MLPPolicy init(const FeatureConfig& feat, std::uint64_t seed,
                        std::vector<int> hidden = {256, 256, 128});
  PolicyOutput forward(const Eigen::VectorXd& input) const;

  /// Apply a policy output to the current state, producing the next PD
  /// target. Finger targets are clamped to limits.
  HandState apply(const HandModel& model, const HandState& current,
                  const PolicyOutput& out) const;
};

struct TrainConfig {
  int batch_size = 460;
  double learning_rate = 0.0002;
  int epochs = 300;
  std::uint64_t seed = 0;
  // Stages whose records become training pairs.
  std::vector<Stage> stages = {Stage::refined, Stage::augmented,
                               Stage::funneled};
};

struct TrainResult {
  MLPPolicy policy;
  std::vector<double> epoch_loss;
};

/// Extracted supervised pairs for one object.
struct TrainingSet {
  Eigen::MatrixXd inputs;     // input_dim x n
  Eigen::MatrixXd target_t;   // 3 x n
  Eigen::MatrixXd target_r;   // 3 x n
  Eigen::MatrixXd target_f;   // dof x n
};

TrainingSet build_training_set(const HandModel& model, const GraspDataset& ds,
                               const std::string& object_name,
                               const FeatureConfig& feat,
                               std::span<const Stage> stages,
                               std::uint64_t seed);

/// Deterministic Adam training; throws InvalidInputError on an empty set.
TrainResult train(const HandModel& model, const GraspDataset& ds,
                  const std::string& object_name, const TrainConfig& cfg,
                  const FeatureConfig& feat);

/// Mean batch loss and parameter gradients (same shapes as the policy).
double loss_and_grad(const MLPPolicy& policy, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& target_t,
                     const Eigen::MatrixXd& target_r,
                     const Eigen::MatrixXd& target_f, MLPPolicy& grads);

std::string save_policy_text(const MLPPolicy& policy, const TrainConfig& cfg);
MLPPolicy load_policy_text(const std::string& text);
void save_policy(const MLPPolicy& policy, const TrainConfig& cfg,
                 const std::filesystem::path& path);
MLPPolicy load_policy(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Evaluation: episodes of up to `attempts` tries; an attempt ends on success,
// drop, or timeout; drops re-randomize the object pose and hand start.

struct EvalConfig {
  int episodes = 20;
  int attempts = 3;
  int max_steps = 96;  // per attempt, at the control rate
  std::uint64_t seed = 0;
  bool randomize_physics = true;
  double object_xy_range = 0.05;    // m
  double hand_xy_lo = 0.02, hand_xy_hi = 0.10;
  double hand_z_lo = 0.16, hand_z_hi = 0.24;
  double hand_tilt = 0.2;  // rad
  double drop_below = 0.02, drop_after = 0.05;  // m
  int workers = 1;
};

struct AttemptInit {
  SE3Pose object_pose;
  HandState hand;
  PhysicsParams params;
};

using InitSampler = std::function<AttemptInit(int episode, int attempt)>;

/// Default randomized initial conditions: stable pose x yaw x table offset
/// for the object, randomized palm pose above the object for the hand.
AttemptInit sample_initial_conditions(const HandModel& model,
                                      const ObjectSpec& object,
                                      std::span<const StablePose> stable,
                                      const EvalConfig& cfg,
                                      std::uint64_t seed);

struct EvalResult {
  std::array<double, 3> rate = {0, 0, 0};  // cumulative success by attempt
  int episodes = 0;
  std::vector<int> success_attempt;  // 1-based; -1 for failed episodes
};

EvalResult evaluate_policy(const HandModel& model, const MLPPolicy& policy,
                           const ObjectSpec& object, const SimConfig& sim_cfg,
                           const EvalConfig& cfg,
                           const InitSampler* init_override = nullptr);

/// Open-loop action source for baseline policies: given the attempt's initial
/// conditions, produce the full action stream to execute.
using ActionStream =
    std::function<std::vector<HandState>(const AttemptInit&)>;

EvalResult evaluate_stream(const HandModel& model, const ActionStream& stream,
                           const ObjectSpec& object, const SimConfig& sim_cfg,
                           const EvalConfig& cfg,
                           const InitSampler* init_override = nullptr);

/// Scripted baseline: linear palm path to a fixed standoff above the centroid
/// of the observed points, predefined closure, then lift. Orientation-blind.
std::vector<HandState> heuristic_baseline(const HandModel& model,
                                          std::span<const Vec3> object_points,
                                          const HandState& start);

/// Replays the actions of the training trajectory nearest to the test start
/// state under the funneling distance.
std::vector<HandState> nearest_neighbor_baseline(
    const HandState& test_state, std::span<const FunnelCandidate> train_set);

}  // namespace dexgrasp
