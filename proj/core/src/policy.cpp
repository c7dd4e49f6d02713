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

#include "dexgrasp/policy.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "canonical_json.hpp"
#include "dexgrasp/errors.hpp"
#include "dexgrasp/refine.hpp"
#include "dexgrasp/rng.hpp"
#include "parallel.hpp"

namespace dexgrasp {

using nlohmann::json;

FeatureConfig FeatureConfig::for_model(const HandModel& model) {
  FeatureConfig cfg;
  cfg.dof = model.dof_count();
  cfg.keypoint_count = static_cast<int>(model.keypoints.size());
  cfg.tip_count = static_cast<int>(model.tip_keypoints.size());
  return cfg;
}

Eigen::VectorXd featurize(const HandModel& model,
                          std::span<const ObsFrame> window,
                          const FeatureConfig& cfg,
                          std::span<const Vec3> surface_points) {
  if (window.empty()) {
    throw InvalidInputError("featurize: empty window");
  }
  for (const ObsFrame& f : window) {
    if (f.hand.joints.size() != cfg.dof) {
      throw InvalidInputError("featurize: frame dof mismatch");
    }
  }
  if (cfg.use_surface_points &&
      static_cast<int>(surface_points.size()) != cfg.surface_points) {
    throw InvalidInputError("featurize: expected " +
                            std::to_string(cfg.surface_points) +
                            " surface points");
  }

  const int n = static_cast<int>(window.size());
  const SE3Pose inv = window.back().hand.palm_pose.inverse();
  Eigen::VectorXd out(cfg.input_dim());
  int at = 0;
  for (int slot = 0; slot < cfg.history; ++slot) {
    const int idx = std::max(0, slot - (cfg.history - n));
    const ObsFrame& f = window[idx];
    out.segment(at, cfg.dof) = f.hand.joints;
    at += cfg.dof;
    const std::vector<Vec3> kp = fk_keypoints(model, f.hand);
    for (const Vec3& p : kp) {
      out.segment<3>(at) = inv.apply(p);
      at += 3;
    }
    out.segment<3>(at) = inv.apply(f.object_pose.translation);
    at += 3;
    if (cfg.use_contacts) {
      for (int tk = 0; tk < cfg.tip_count; ++tk) {
        out[at++] = (tk < static_cast<int>(f.tip_contacts.size()) &&
                     f.tip_contacts[tk])
                        ? 1.0
                        : 0.0;
      }
    }
  }
  for (const Vec3& p : surface_points) {
    out.segment<3>(at) = inv.apply(p);
    at += 3;
  }
  return out;
}

namespace {

// Quaternion exponential of an axis-angle vector, as [w, x, y, z].
Eigen::Vector4d exp_quat4(const Vec3& v) {
  const double theta = v.norm();
  const double half = 0.5 * theta;
  const double s =
      (theta < 1e-8) ? 0.5 - theta * theta / 48.0 : std::sin(half) / theta;
  Eigen::Vector4d q;
  q[0] = std::cos(half);
  q.tail<3>() = s * v;
  return q;
}

// d exp_quat4 / dv, rows [w, x, y, z].
Eigen::Matrix<double, 4, 3> exp_quat_jacobian(const Vec3& v) {
  const double theta = v.norm();
  const double half = 0.5 * theta;
  double s, k;
  if (theta < 1e-6) {
    s = 0.5 - theta * theta / 48.0;
    k = -1.0 / 24.0;  // (ds/dtheta)/theta as theta -> 0
  } else {
    s = std::sin(half) / theta;
    const double dsdt =
        std::cos(half) / (2.0 * theta) - std::sin(half) / (theta * theta);
    k = dsdt / theta;
  }
  Eigen::Matrix<double, 4, 3> j;
  j.row(0) = -0.5 * s * v.transpose();
  j.bottomRows<3>() = s * Eigen::Matrix3d::Identity() + k * (v * v.transpose());
  return j;
}

double rotation_loss(const Vec3& pred, const Vec3& target, Vec3* grad) {
  const Eigen::Vector4d qp = exp_quat4(pred);
  const Eigen::Vector4d qt = exp_quat4(target);
  const double dot = qp.dot(qt);
  const double m = std::min(std::abs(dot), 1.0);
  const double l = 2.0 * std::acos(m);
  if (grad) {
    if (m >= 1.0 - 1e-12) {
      grad->setZero();
    } else {
      const double scale = -2.0 / std::sqrt(1.0 - m * m);
      const double sign = (dot >= 0.0) ? 1.0 : -1.0;
      const Eigen::Vector4d dq = scale * sign * qt;
      *grad = exp_quat_jacobian(pred).transpose() * dq;
    }
  }
  return l;
}

double norm_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target,
                 Eigen::VectorXd* grad) {
  const Eigen::VectorXd diff = pred - target;
  const double l = diff.norm();
  if (grad) {
    *grad = (l > 1e-12) ? Eigen::VectorXd(diff / l)
                        : Eigen::VectorXd(Eigen::VectorXd::Zero(diff.size()));
  }
  return l;
}

Eigen::MatrixXd xavier(int rows, int cols, Rng& rng) {
  const double s = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-s, s);
  }
  return m;
}

// Flat views over every parameter tensor, in a fixed order shared by
// gradients, optimizer state, and the checkpoint format.
std::vector<std::pair<double*, long>> param_views(MLPPolicy& p) {
  std::vector<std::pair<double*, long>> v;
  if (p.feat.use_surface_points) {
    v.push_back({p.point_w.data(), p.point_w.size()});
    v.push_back({p.point_b.data(), p.point_b.size()});
  }
  for (size_t i = 0; i < p.w.size(); ++i) {
    v.push_back({p.w[i].data(), p.w[i].size()});
    v.push_back({p.b[i].data(), p.b[i].size()});
  }
  v.push_back({p.head_t.data(), p.head_t.size()});
  v.push_back({p.bias_t.data(), p.bias_t.size()});
  v.push_back({p.head_r.data(), p.head_r.size()});
  v.push_back({p.bias_r.data(), p.bias_r.size()});
  v.push_back({p.head_f.data(), p.head_f.size()});
  v.push_back({p.bias_f.data(), p.bias_f.size()});
  return v;
}

MLPPolicy like_zero(const MLPPolicy& p) {
  MLPPolicy g = p;
  auto views = param_views(g);
  for (auto& [ptr, n] : views) std::fill(ptr, ptr + n, 0.0);
  return g;
}

}  // namespace

double loss(const PolicyOutput& pred, const PolicyOutput& target) {
  double l = norm_loss(pred.dtrans, target.dtrans, nullptr);
  l += rotation_loss(pred.drot, target.drot, nullptr);
  l += norm_loss(pred.fingers, target.fingers, nullptr);
  return l;
}

MLPPolicy MLPPolicy::init(const FeatureConfig& feat, std::uint64_t seed,
                          std::vector<int> hidden) {
  MLPPolicy p;
  p.feat = feat;
  p.hidden = std::move(hidden);
  Rng rng(derive_seed(seed, 0x31a9ULL));
  if (feat.use_surface_points) {
    p.point_w = xavier(feat.point_feature_dim, 3, rng);
    p.point_b = Eigen::VectorXd::Zero(feat.point_feature_dim);
  }
  int in = feat.trunk_input_dim();
  for (int h : p.hidden) {
    p.w.push_back(xavier(h, in, rng));
    p.b.push_back(Eigen::VectorXd::Zero(h));
    in = h;
  }
  p.head_t = xavier(3, in, rng);
  p.bias_t = Eigen::VectorXd::Zero(3);
  p.head_r = xavier(3, in, rng);
  p.bias_r = Eigen::VectorXd::Zero(3);
  p.head_f = xavier(feat.dof, in, rng);
  p.bias_f = Eigen::VectorXd::Zero(feat.dof);
  return p;
}

PolicyOutput MLPPolicy::forward(const Eigen::VectorXd& input) const {
  if (input.size() != feat.input_dim()) {
    throw InvalidInputError("policy forward: input dimension mismatch");
  }
  Eigen::VectorXd v(feat.trunk_input_dim());
  v.head(feat.history_dim()) = input.head(feat.history_dim());
  if (feat.use_surface_points) {
    Eigen::VectorXd pooled =
        Eigen::VectorXd::Constant(feat.point_feature_dim, -1e300);
    for (int i = 0; i < feat.surface_points; ++i) {
      const Vec3 p = input.segment<3>(feat.history_dim() + 3 * i);
      Eigen::VectorXd h = (point_w * p + point_b).cwiseMax(0.0);
      pooled = pooled.cwiseMax(h);
    }
    v.tail(feat.point_feature_dim) = pooled;
  }
  for (size_t i = 0; i < w.size(); ++i) {
    v = (w[i] * v + b[i]).array().tanh().matrix();
  }
  PolicyOutput out;
  out.dtrans = head_t * v + bias_t;
  out.drot = head_r * v + bias_r;
  out.fingers = head_f * v + bias_f;
  return out;
}

HandState MLPPolicy::apply(const HandModel& model, const HandState& current,
                           const PolicyOutput& out) const {
  HandState target;
  target.palm_pose.rotation =
      (current.palm_pose.rotation * rot_exp(out.drot)).normalized();
  target.palm_pose.translation =
      current.palm_pose.translation + current.palm_pose.rotation * out.dtrans;
  target.joints = clamp_to_limits(model, out.fingers);
  return target;
}

double loss_and_grad(const MLPPolicy& policy, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& target_t,
                     const Eigen::MatrixXd& target_r,
                     const Eigen::MatrixXd& target_f, MLPPolicy& grads) {
  const FeatureConfig& feat = policy.feat;
  const int batch = static_cast<int>(inputs.cols());
  const int hist = feat.history_dim();
  const int trunk_in = feat.trunk_input_dim();
  const int fdim = feat.point_feature_dim;
  const int npts = feat.surface_points;
  const size_t layers = policy.w.size();

  // Forward.
  Eigen::MatrixXd v0(trunk_in, batch);
  v0.topRows(hist) = inputs.topRows(hist);
  Eigen::MatrixXd point_pre;               // fdim x (batch * npts)
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> argmax;
  if (feat.use_surface_points) {
    point_pre.resize(fdim, batch * npts);
    argmax.resize(fdim, batch);
    for (int s = 0; s < batch; ++s) {
      Eigen::VectorXd pooled = Eigen::VectorXd::Constant(fdim, -1e300);
      for (int i = 0; i < npts; ++i) {
        const Vec3 p = inputs.block<3, 1>(hist + 3 * i, s);
        point_pre.col(s * npts + i) = policy.point_w * p + policy.point_b;
        const Eigen::VectorXd h =
            point_pre.col(s * npts + i).cwiseMax(0.0);
        for (int c = 0; c < fdim; ++c) {
          if (h[c] > pooled[c]) {
            pooled[c] = h[c];
            argmax(c, s) = i;
          }
        }
      }
      v0.col(s).tail(fdim) = pooled;
    }
  }
  std::vector<Eigen::MatrixXd> z(layers + 1);
  z[0] = std::move(v0);
  for (size_t i = 0; i < layers; ++i) {
    z[i + 1] = ((policy.w[i] * z[i]).colwise() + policy.b[i])
                   .array()
                   .tanh()
                   .matrix();
  }
  const Eigen::MatrixXd& top = z[layers];
  const Eigen::MatrixXd pred_t = (policy.head_t * top).colwise() + policy.bias_t;
  const Eigen::MatrixXd pred_r = (policy.head_r * top).colwise() + policy.bias_r;
  const Eigen::MatrixXd pred_f = (policy.head_f * top).colwise() + policy.bias_f;

  // Per-sample branch losses and gradients at the heads.
  Eigen::MatrixXd gt(3, batch), gr(3, batch),
      gf(feat.dof, batch);
  double total = 0.0;
  const double inv_b = 1.0 / batch;
  for (int s = 0; s < batch; ++s) {
    Eigen::VectorXd g;
    total += norm_loss(pred_t.col(s), target_t.col(s), &g);
    gt.col(s) = g * inv_b;
    Vec3 grv;
    total += rotation_loss(pred_r.col(s), target_r.col(s), &grv);
    gr.col(s) = grv * inv_b;
    total += norm_loss(pred_f.col(s), target_f.col(s), &g);
    gf.col(s) = g * inv_b;
  }
  total *= inv_b;

  // Backward.
  grads.head_t = gt * top.transpose();
  grads.bias_t = gt.rowwise().sum();
  grads.head_r = gr * top.transpose();
  grads.bias_r = gr.rowwise().sum();
  grads.head_f = gf * top.transpose();
  grads.bias_f = gf.rowwise().sum();

  Eigen::MatrixXd dz = policy.head_t.transpose() * gt +
                       policy.head_r.transpose() * gr +
                       policy.head_f.transpose() * gf;
  for (size_t i = layers; i-- > 0;) {
    const Eigen::MatrixXd da =
        dz.array() * (1.0 - z[i + 1].array().square());
    grads.w[i] = da * z[i].transpose();
    grads.b[i] = da.rowwise().sum();
    dz = policy.w[i].transpose() * da;
  }

  if (feat.use_surface_points) {
    grads.point_w.setZero();
    grads.point_b.setZero();
    for (int s = 0; s < batch; ++s) {
      for (int c = 0; c < fdim; ++c) {
        const double g = dz(hist + c, s);
        if (g == 0.0) continue;
        const int i = argmax(c, s);
        if (point_pre(c, s * npts + i) <= 0.0) continue;  // relu gate
        const Vec3 p = inputs.block<3, 1>(hist + 3 * i, s);
        grads.point_w.row(c) += g * p.transpose();
        grads.point_b[c] += g;
      }
    }
  }
  return total;
}

TrainingSet build_training_set(const HandModel& model, const GraspDataset& ds,
                               const std::string& object_name,
                               const FeatureConfig& feat,
                               std::span<const Stage> stages,
                               std::uint64_t seed) {
  const ObjectSpec* object = nullptr;
  for (const ObjectSpec& o : ds.header.objects) {
    if (o.name == object_name) object = &o;
  }
  if (feat.use_surface_points && !object) {
    throw InvalidInputError("build_training_set: object '" + object_name +
                            "' not in dataset header");
  }

  std::vector<Eigen::VectorXd> xs;
  std::vector<PolicyOutput> ys;
  int record_index = 0;
  for (const TrajectoryRecord& r : ds.records) {
    ++record_index;
    if (r.object != object_name) continue;
    if (std::find(stages.begin(), stages.end(), r.traj.stage) == stages.end()) {
      continue;
    }
    const auto& frames = r.traj.frames;
    std::vector<ObsFrame> window;
    for (size_t t = 0; t < r.traj.actions.size(); ++t) {
      window.clear();
      const size_t lo = (t + 1 > static_cast<size_t>(feat.history))
                            ? t + 1 - feat.history
                            : 0;
      for (size_t i = lo; i <= t; ++i) {
        window.push_back(
            {frames[i].hand, frames[i].object_pose, frames[i].tip_contacts});
      }
      std::vector<Vec3> pts;
      if (feat.use_surface_points) {
        pts = sample_surface_points(
            *object, frames[t].object_pose, feat.surface_points,
            derive_seed(derive_seed(seed, record_index), t));
      }
      xs.push_back(featurize(model, window, feat, pts));

      const HandState& cur = frames[t].hand;
      const HandState& act = r.traj.actions[t];
      PolicyOutput y;
      y.dtrans = cur.palm_pose.rotation.conjugate() *
                 (act.palm_pose.translation - cur.palm_pose.translation);
      y.drot = rot_log(cur.palm_pose.rotation.conjugate() *
                       act.palm_pose.rotation);
      y.fingers = act.joints;
      ys.push_back(std::move(y));
    }
  }
  if (xs.empty()) {
    throw InvalidInputError("build_training_set: no training pairs for '" +
                            object_name + "'");
  }
  TrainingSet set;
  const int n = static_cast<int>(xs.size());
  set.inputs.resize(feat.input_dim(), n);
  set.target_t.resize(3, n);
  set.target_r.resize(3, n);
  set.target_f.resize(feat.dof, n);
  for (int i = 0; i < n; ++i) {
    set.inputs.col(i) = xs[i];
    set.target_t.col(i) = ys[i].dtrans;
    set.target_r.col(i) = ys[i].drot;
    set.target_f.col(i) = ys[i].fingers;
  }
  return set;
}

TrainResult train(const HandModel& model, const GraspDataset& ds,
                  const std::string& object_name, const TrainConfig& cfg,
                  const FeatureConfig& feat) {
  const TrainingSet set =
      build_training_set(model, ds, object_name, feat, cfg.stages, cfg.seed);
  const int n = static_cast<int>(set.inputs.cols());

  TrainResult result;
  result.policy = MLPPolicy::init(feat, cfg.seed);
  MLPPolicy grads = like_zero(result.policy);
  MLPPolicy m1 = like_zero(result.policy);
  MLPPolicy m2 = like_zero(result.policy);
  auto pv = param_views(result.policy);
  auto gv = param_views(grads);
  auto m1v = param_views(m1);
  auto m2v = param_views(m2);

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  long adam_step = 0;

  Rng shuffle_rng(derive_seed(cfg.seed, 0x5bf1ULL));
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  const int bs = std::min(cfg.batch_size, n);
  Eigen::MatrixXd bx(set.inputs.rows(), bs), bt(3, bs), br(3, bs),
      bf(feat.dof, bs);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[shuffle_rng.uniform_index(i + 1)]);
    }
    double epoch_loss = 0.0;
    int counted = 0;
    for (int at = 0; at + bs <= n || at == 0; at += bs) {
      const int cur = std::min(bs, n - at);
      if (cur <= 0) break;
      for (int c = 0; c < cur; ++c) {
        const int idx = perm[at + c];
        bx.col(c) = set.inputs.col(idx);
        bt.col(c) = set.target_t.col(idx);
        br.col(c) = set.target_r.col(idx);
        bf.col(c) = set.target_f.col(idx);
      }
      const double batch_loss =
          loss_and_grad(result.policy, bx.leftCols(cur), bt.leftCols(cur),
                        br.leftCols(cur), bf.leftCols(cur), grads);
      epoch_loss += batch_loss * cur;
      counted += cur;

      ++adam_step;
      const double bc1 = 1.0 - std::pow(kBeta1, adam_step);
      const double bc2 = 1.0 - std::pow(kBeta2, adam_step);
      for (size_t tidx = 0; tidx < pv.size(); ++tidx) {
        double* p = pv[tidx].first;
        double* g = gv[tidx].first;
        double* a = m1v[tidx].first;
        double* v = m2v[tidx].first;
        const long len = pv[tidx].second;
        for (long k = 0; k < len; ++k) {
          a[k] = kBeta1 * a[k] + (1.0 - kBeta1) * g[k];
          v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g[k] * g[k];
          p[k] -= cfg.learning_rate * (a[k] / bc1) /
                  (std::sqrt(v[k] / bc2) + kEps);
        }
      }
      if (at + bs >= n) break;
    }
    result.epoch_loss.push_back(epoch_loss / std::max(counted, 1));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoint IO.

std::string save_policy_text(const MLPPolicy& policy, const TrainConfig& cfg) {
  detail::JsonBuf b;
  b.begin_obj();
  b.key("format");
  b.value_str("policy/1");
  b.key("hidden");
  b.begin_arr();
  for (int h : policy.hidden) b.value_int(h);
  b.end_arr();
  b.key("feat");
  b.begin_obj();
  b.key("history");
  b.value_int(policy.feat.history);
  b.key("use_contacts");
  b.value_bool(policy.feat.use_contacts);
  b.key("use_surface_points");
  b.value_bool(policy.feat.use_surface_points);
  b.key("surface_points");
  b.value_int(policy.feat.surface_points);
  b.key("point_feature_dim");
  b.value_int(policy.feat.point_feature_dim);
  b.key("dof");
  b.value_int(policy.feat.dof);
  b.key("keypoint_count");
  b.value_int(policy.feat.keypoint_count);
  b.key("tip_count");
  b.value_int(policy.feat.tip_count);
  b.end_obj();
  b.key("train");
  b.begin_obj();
  b.key("batch_size");
  b.value_int(cfg.batch_size);
  b.key("learning_rate");
  b.value_num(cfg.learning_rate);
  b.key("epochs");
  b.value_int(cfg.epochs);
  b.key("seed");
  b.value_u64(cfg.seed);
  b.end_obj();
  b.end_obj();

  std::string out = b.take();
  out += '\n';
  auto tensor = [&out](const char* name, const Eigen::MatrixXd& m) {
    detail::JsonBuf t;
    t.begin_obj();
    t.key("name");
    t.value_str(name);
    t.key("rows");
    t.value_int(m.rows());
    t.key("cols");
    t.value_int(m.cols());
    t.key("data");
    t.begin_arr();
    for (long c = 0; c < m.cols(); ++c) {
      for (long r = 0; r < m.rows(); ++r) t.value_num(m(r, c));
    }
    t.end_arr();
    t.end_obj();
    out += t.take();
    out += '\n';
  };
  if (policy.feat.use_surface_points) {
    tensor("point_w", policy.point_w);
    tensor("point_b", policy.point_b);
  }
  for (size_t i = 0; i < policy.w.size(); ++i) {
    tensor(("w" + std::to_string(i)).c_str(), policy.w[i]);
    tensor(("b" + std::to_string(i)).c_str(), policy.b[i]);
  }
  tensor("head_t", policy.head_t);
  tensor("bias_t", policy.bias_t);
  tensor("head_r", policy.head_r);
  tensor("bias_r", policy.bias_r);
  tensor("head_f", policy.head_f);
  tensor("bias_f", policy.bias_f);
  return out;
}

MLPPolicy load_policy_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError("policy checkpoint: empty file");
  }
  json meta;
  try {
    meta = json::parse(line);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("policy checkpoint: bad header: ") +
                      e.what());
  }
  if (meta.value("format", "") != "policy/1") {
    throw SchemaError("policy checkpoint: unsupported format");
  }
  MLPPolicy p;
  const json& jf = meta["feat"];
  p.feat.history = jf["history"].get<int>();
  p.feat.use_contacts = jf["use_contacts"].get<bool>();
  p.feat.use_surface_points = jf["use_surface_points"].get<bool>();
  p.feat.surface_points = jf["surface_points"].get<int>();
  p.feat.point_feature_dim = jf["point_feature_dim"].get<int>();
  p.feat.dof = jf["dof"].get<int>();
  p.feat.keypoint_count = jf["keypoint_count"].get<int>();
  p.feat.tip_count = jf["tip_count"].get<int>();
  p.hidden.clear();
  for (const json& h : meta["hidden"]) p.hidden.push_back(h.get<int>());

  std::map<std::string, Eigen::MatrixXd> tensors;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json t = json::parse(line);
    const int rows = t["rows"].get<int>();
    const int cols = t["cols"].get<int>();
    Eigen::MatrixXd m(rows, cols);
    const json& data = t["data"];
    if (static_cast<long>(data.size()) != m.size()) {
      throw SchemaError("policy checkpoint: tensor size mismatch for '" +
                        t["name"].get<std::string>() + "'");
    }
    long i = 0;
    for (long c = 0; c < cols; ++c) {
      for (long r = 0; r < rows; ++r) m(r, c) = data[i++].get<double>();
    }
    tensors[t["name"].get<std::string>()] = std::move(m);
  }
  auto take = [&](const std::string& name) {
    auto it = tensors.find(name);
    if (it == tensors.end()) {
      throw SchemaError("policy checkpoint: missing tensor '" + name + "'");
    }
    return it->second;
  };
  if (p.feat.use_surface_points) {
    p.point_w = take("point_w");
    p.point_b = take("point_b").col(0);
  }
  for (size_t i = 0;; ++i) {
    if (!tensors.count("w" + std::to_string(i))) break;
    p.w.push_back(take("w" + std::to_string(i)));
    p.b.push_back(take("b" + std::to_string(i)).col(0));
  }
  p.head_t = take("head_t");
  p.bias_t = take("bias_t").col(0);
  p.head_r = take("head_r");
  p.bias_r = take("bias_r").col(0);
  p.head_f = take("head_f");
  p.bias_f = take("bias_f").col(0);
  return p;
}

void save_policy(const MLPPolicy& policy, const TrainConfig& cfg,
                 const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write policy to '" + path.string() + "'");
  const std::string text = save_policy_text(policy, cfg);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

MLPPolicy load_policy(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw MissingArtifactError("policy checkpoint '" + path.string() +
                               "' does not exist");
  }
  std::ostringstream oss;
  oss << f.rdbuf();
  return load_policy_text(oss.str());
}

// ---------------------------------------------------------------------------
// Evaluation.

AttemptInit sample_initial_conditions(const HandModel& model,
                                      const ObjectSpec& object,
                                      std::span<const StablePose> stable,
                                      const EvalConfig& cfg,
                                      std::uint64_t seed) {
  Rng rng(seed);
  AttemptInit init;
  const StablePose& sp = stable[rng.uniform_index(stable.size())];
  const double yaw = rng.uniform(-3.14159265358979323846, 3.14159265358979323846);
  init.object_pose.rotation =
      Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())) * sp.pose.rotation;
  init.object_pose.translation =
      sp.pose.translation + Vec3(rng.uniform(-cfg.object_xy_range,
                                             cfg.object_xy_range),
                                 rng.uniform(-cfg.object_xy_range,
                                             cfg.object_xy_range),
                                 0.0);

  const double ang = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  const double rad = rng.uniform(cfg.hand_xy_lo, cfg.hand_xy_hi);
  init.hand.palm_pose.translation =
      Vec3(init.object_pose.translation.x() + rad * std::cos(ang),
           init.object_pose.translation.y() + rad * std::sin(ang),
           rng.uniform(cfg.hand_z_lo, cfg.hand_z_hi));
  const double hand_yaw =
      rng.uniform(-3.14159265358979323846, 3.14159265358979323846);
  const Vec3 tilt(rng.uniform(-cfg.hand_tilt, cfg.hand_tilt),
                  rng.uniform(-cfg.hand_tilt, cfg.hand_tilt), 0.0);
  init.hand.palm_pose.rotation =
      (rot_exp(tilt) * Quat(Eigen::AngleAxisd(hand_yaw, Vec3::UnitZ())))
          .normalized();
  init.hand.joints = JointConfig(model.dof_count());
  for (int j = 0; j < model.dof_count(); ++j) {
    init.hand.joints[j] =
        model.joints[j].lo + 0.2 * (model.joints[j].hi - model.joints[j].lo);
  }

  PhysicsParams base;
  base.noise_std = 0.0;
  if (cfg.randomize_physics) {
    init.params = randomize(base, derive_seed(seed, 0xF1));
  } else {
    init.params = base;
    init.params.mass = object.nominal_mass;
    init.params.seed = derive_seed(seed, 0xF1);
  }
  return init;
}

namespace {

enum class AttemptOutcome { success, drop, timeout, invalid };

struct AttemptRunner {
  const HandModel* model;
  const ObjectSpec* object;
  const SimConfig* sim_cfg;
  const EvalConfig* cfg;

  // Returns the outcome of one closed-loop attempt.
  AttemptOutcome run_policy(const MLPPolicy& policy, const AttemptInit& init,
                            std::uint64_t attempt_seed) const {
    SimWorld world = [&]() {
      return SimWorld(*model, *object, init.object_pose, init.hand,
                      init.params, *sim_cfg);
    }();
    std::deque<ObsFrame> window;
    auto observe = [&]() {
      ObsFrame f;
      f.hand = world.hand_state();
      f.object_pose = world.object_pose();
      f.tip_contacts = world.contacts().flag;
      window.push_back(std::move(f));
      if (static_cast<int>(window.size()) > policy.feat.history) {
        window.pop_front();
      }
    };
    observe();

    const int hold = sim_cfg->hold_steps();
    int held = 0;
    double peak = 0.0;
    for (int step = 0; step < cfg->max_steps; ++step) {
      std::vector<Vec3> pts;
      if (policy.feat.use_surface_points) {
        pts = sample_surface_points(*object, world.object_pose(),
                                    policy.feat.surface_points,
                                    derive_seed(attempt_seed, step));
      }
      const std::vector<ObsFrame> win(window.begin(), window.end());
      const Eigen::VectorXd x = featurize(*model, win, policy.feat, pts);
      const PolicyOutput out = policy.forward(x);
      const HandState action = policy.apply(*model, world.hand_state(), out);
      world.step(action);
      observe();

      const double gain = world.object_height_gain();
      peak = std::max(peak, gain);
      held = (gain >= sim_cfg->lift_height) ? held + 1 : 0;
      if (held >= hold + 1) return AttemptOutcome::success;
      if (peak > cfg->drop_after && gain < cfg->drop_below) {
        return AttemptOutcome::drop;
      }
    }
    return AttemptOutcome::timeout;
  }

  AttemptOutcome run_stream(const ActionStream& stream,
                            const AttemptInit& init) const {
    std::vector<HandState> actions = stream(init);
    if (actions.empty()) return AttemptOutcome::invalid;
    SimWorld world(*model, *object, init.object_pose, init.hand, init.params,
                   *sim_cfg);
    const int hold = sim_cfg->hold_steps();
    int held = 0;
    double peak = 0.0;
    for (const HandState& a : actions) {
      world.step(a);
      const double gain = world.object_height_gain();
      peak = std::max(peak, gain);
      held = (gain >= sim_cfg->lift_height) ? held + 1 : 0;
      if (held >= hold + 1) return AttemptOutcome::success;
      if (peak > cfg->drop_after && gain < cfg->drop_below) {
        return AttemptOutcome::drop;
      }
    }
    return AttemptOutcome::timeout;
  }
};

template <typename RunAttempt>
EvalResult run_episodes(const HandModel& model, const ObjectSpec& object,
                        const SimConfig& sim_cfg, const EvalConfig& cfg,
                        const InitSampler* init_override,
                        const RunAttempt& run_attempt) {
  const std::vector<StablePose> stable = compute_stable_poses(object, sim_cfg);
  if (stable.empty()) {
    throw InvalidInputError("evaluate: no stable poses for object");
  }
  InitSampler sampler;
  if (init_override) {
    sampler = *init_override;
  } else {
    sampler = [&](int ep, int att) {
      return sample_initial_conditions(
          model, object, stable, cfg,
          derive_seed(cfg.seed, static_cast<std::uint64_t>(ep) * 97 + att));
    };
  }

  EvalResult res;
  res.episodes = cfg.episodes;
  res.success_attempt.assign(cfg.episodes, -1);
  detail::parallel_for(0, cfg.episodes, cfg.workers, [&](int ep) {
    for (int att = 0; att < cfg.attempts; ++att) {
      AttemptInit init = sampler(ep, att);
      AttemptOutcome outcome = AttemptOutcome::invalid;
      try {
        outcome = run_attempt(
            init, derive_seed(cfg.seed,
                              0x1000 + static_cast<std::uint64_t>(ep) * 97 +
                                  att));
      } catch (const InvalidSetupError&) {
        outcome = AttemptOutcome::invalid;
      }
      if (outcome == AttemptOutcome::success) {
        res.success_attempt[ep] = att + 1;
        break;
      }
    }
  });
  for (int k = 0; k < 3; ++k) {
    int wins = 0;
    for (int a : res.success_attempt) {
      if (a > 0 && a <= k + 1) ++wins;
    }
    res.rate[k] = static_cast<double>(wins) / cfg.episodes;
  }
  return res;
}

}  // namespace

EvalResult evaluate_policy(const HandModel& model, const MLPPolicy& policy,
                           const ObjectSpec& object, const SimConfig& sim_cfg,
                           const EvalConfig& cfg,
                           const InitSampler* init_override) {
  AttemptRunner runner{&model, &object, &sim_cfg, &cfg};
  return run_episodes(model, object, sim_cfg, cfg, init_override,
                      [&](const AttemptInit& init, std::uint64_t seed) {
                        return runner.run_policy(policy, init, seed);
                      });
}

EvalResult evaluate_stream(const HandModel& model, const ActionStream& stream,
                           const ObjectSpec& object, const SimConfig& sim_cfg,
                           const EvalConfig& cfg,
                           const InitSampler* init_override) {
  AttemptRunner runner{&model, &object, &sim_cfg, &cfg};
  return run_episodes(model, object, sim_cfg, cfg, init_override,
                      [&](const AttemptInit& init, std::uint64_t) {
                        return runner.run_stream(stream, init);
                      });
}

std::vector<HandState> heuristic_baseline(const HandModel& model,
                                          std::span<const Vec3> object_points,
                                          const HandState& start) {
  if (object_points.empty()) {
    throw InvalidInputError("heuristic_baseline: no object points");
  }
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : object_points) centroid += p;
  centroid /= static_cast<double>(object_points.size());

  const int dof = model.dof_count();
  JointConfig open(dof), grip(dof);
  for (int j = 0; j < dof; ++j) {
    open[j] = model.joints[j].lo + 0.2 * (model.joints[j].hi - model.joints[j].lo);
    grip[j] = model.joints[j].lo + 0.7 * (model.joints[j].hi - model.joints[j].lo);
  }

  const Vec3 standoff = centroid + Vec3(0, 0, 0.105);
  std::vector<HandState> actions;
  auto push = [&](const SE3Pose& pose, const JointConfig& q) {
    actions.push_back({pose, q});
  };
  // Linear approach to the standoff, leveling the palm.
  for (int i = 1; i <= 12; ++i) {
    const double a = i / 12.0;
    SE3Pose p;
    p.translation = (1 - a) * start.palm_pose.translation + a * standoff;
    p.rotation = start.palm_pose.rotation.slerp(a, Quat::Identity());
    push(p, open);
  }
  SE3Pose hover;
  hover.translation = standoff;
  // Predefined closure.
  for (int i = 1; i <= 10; ++i) {
    const double a = i / 10.0;
    push(hover, (1 - a) * open + a * grip);
  }
  for (int i = 0; i < 4; ++i) push(hover, grip);
  // Lift.
  for (int i = 1; i <= 12; ++i) {
    SE3Pose p = hover;
    p.translation.z() += 0.16 * i / 12.0;
    push(p, grip);
  }
  SE3Pose top = hover;
  top.translation.z() += 0.16;
  for (int i = 0; i < 10; ++i) push(top, grip);
  return actions;
}

std::vector<HandState> nearest_neighbor_baseline(
    const HandState& test_state, std::span<const FunnelCandidate> train_set) {
  if (train_set.empty()) {
    throw InvalidInputError("nearest_neighbor_baseline: empty training set");
  }
  int best = -1;
  double best_d = 0.0;
  for (size_t i = 0; i < train_set.size(); ++i) {
    if (train_set[i].traj->frames.empty()) continue;
    const double d = start_state_distance(
        test_state, train_set[i].traj->frames.front().hand);
    if (best < 0 || d < best_d) {
      best = static_cast<int>(i);
      best_d = d;
    }
  }
  if (best < 0) {
    throw InvalidInputError("nearest_neighbor_baseline: no usable trajectories");
  }
  return train_set[best].traj->actions;
}

}  // namespace dexgrasp
