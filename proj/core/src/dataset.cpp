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

#include "dexgrasp/dataset.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "canonical_json.hpp"
#include "dexgrasp/errors.hpp"

namespace dexgrasp {

using nlohmann::json;
using detail::JsonBuf;

namespace {

void emit_pose(JsonBuf& b, const SE3Pose& p) {
  for (double v : p.to_array()) b.value_num(v);
}

void emit_object(JsonBuf& b, const ObjectSpec& o) {
  b.begin_obj();
  b.key("name");
  b.value_str(o.name);
  b.key("shape");
  b.value_str(o.shape == ObjectSpec::Shape::box ? "box" : "cylinder");
  b.key("dims");
  b.begin_arr();
  if (o.shape == ObjectSpec::Shape::box) {
    b.value_num(o.w);
    b.value_num(o.d);
    b.value_num(o.h);
  } else {
    b.value_num(o.radius);
    b.value_num(o.height);
  }
  b.end_arr();
  b.key("mass");
  b.value_num(o.nominal_mass);
  b.end_obj();
}

void emit_header(JsonBuf& b, const DatasetHeader& h) {
  b.begin_obj();
  b.key("format");
  b.value_str(h.format_version);
  b.key("hand_hash");
  b.value_u64(h.hand_hash);
  b.key("dof");
  b.value_int(h.dof);
  b.key("objects");
  b.begin_arr();
  for (const ObjectSpec& o : h.objects) emit_object(b, o);
  b.end_arr();
  b.key("demo_ids");
  b.begin_arr();
  for (const std::string& id : h.demo_ids) b.value_str(id);
  b.end_arr();
  b.key("seed");
  b.value_u64(h.seed);
  b.key("config_hash");
  b.value_str(h.config_hash);
  b.end_obj();
}

void emit_demo(JsonBuf& b, const HumanDemoRecord& d) {
  b.begin_obj();
  b.key("type");
  b.value_str("human_demo");
  b.key("id");
  b.value_str(d.id);
  b.key("object");
  b.value_str(d.object);
  b.key("frames");
  b.begin_arr();
  for (const HumanFrame& f : d.frames) {
    b.begin_arr();
    for (const std::string& name : kHumanKeypointNames) {
      auto it = f.keypoints.find(name);
      if (it == f.keypoints.end()) {
        throw SchemaError("human demo '" + d.id + "': missing keypoint '" +
                          name + "'");
      }
      b.value_num(it->second.x());
      b.value_num(it->second.y());
      b.value_num(it->second.z());
    }
    b.value_num(f.palm_orientation.w());
    b.value_num(f.palm_orientation.x());
    b.value_num(f.palm_orientation.y());
    b.value_num(f.palm_orientation.z());
    emit_pose(b, f.object_pose);
    b.end_arr();
  }
  b.end_arr();
  b.end_obj();
}

void emit_record(JsonBuf& b, const TrajectoryRecord& r) {
  b.begin_obj();
  b.key("type");
  b.value_str("trajectory");
  b.key("id");
  b.value_str(r.id);
  b.key("object");
  b.value_str(r.object);
  b.key("stage");
  b.value_str(stage_name(r.traj.stage));
  b.key("source_demo");
  b.value_str(r.traj.source_demo_id);
  b.key("parent");
  b.value_str(r.prov.parent_id);
  b.key("candidate_seed");
  b.value_u64(r.prov.candidate_seed);
  b.key("t");
  b.value_num(r.prov.t);
  b.key("physics");
  b.begin_obj();
  b.key("mass");
  b.value_num(r.prov.physics.mass);
  b.key("friction");
  b.value_num(r.prov.physics.friction);
  b.key("noise_std");
  b.value_num(r.prov.physics.noise_std);
  b.key("seed");
  b.value_u64(r.prov.physics.seed);
  b.end_obj();
  b.key("verified");
  b.value_bool(r.prov.verified);
  b.key("k_draws");
  b.value_int(r.prov.k_draws);
  b.key("frames");
  b.begin_arr();
  for (const TrajFrame& f : r.traj.frames) {
    b.begin_arr();
    emit_pose(b, f.hand.palm_pose);
    for (int i = 0; i < f.hand.joints.size(); ++i) b.value_num(f.hand.joints[i]);
    emit_pose(b, f.object_pose);
    b.end_arr();
  }
  b.end_arr();
  b.key("contacts");
  b.begin_arr();
  for (const TrajFrame& f : r.traj.frames) {
    if (f.tip_contacts.empty()) continue;
    b.begin_arr();
    for (std::uint8_t c : f.tip_contacts) b.value_int(c);
    b.end_arr();
  }
  b.end_arr();
  b.key("actions");
  b.begin_arr();
  for (const HandState& a : r.traj.actions) {
    b.begin_arr();
    emit_pose(b, a.palm_pose);
    for (int i = 0; i < a.joints.size(); ++i) b.value_num(a.joints[i]);
    b.end_arr();
  }
  b.end_arr();
  b.end_obj();
}

void require_keys(const json& o, std::initializer_list<const char*> keys,
                  const std::string& where) {
  for (const char* k : keys) {
    if (!o.contains(k)) {
      throw SchemaError(where + ": missing field '" + std::string(k) + "'");
    }
  }
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool known = false;
    for (const char* k : keys) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw SchemaError(where + ": unknown field '" + it.key() + "'");
    }
  }
}

SE3Pose pose_from(const json& arr, size_t offset) {
  std::array<double, 7> a;
  for (size_t i = 0; i < 7; ++i) a[i] = arr[offset + i].get<double>();
  SE3Pose p = SE3Pose::FromArray(a);
  if (!is_unit(p.rotation, 1e-6)) {
    throw SchemaError("pose quaternion is not unit");
  }
  return p;
}

ObjectSpec parse_object(const json& jo, const std::string& where) {
  require_keys(jo, {"name", "shape", "dims", "mass"}, where);
  const std::string shape = jo["shape"].get<std::string>();
  const auto& dims = jo["dims"];
  if (shape == "box") {
    if (dims.size() != 3) throw SchemaError(where + ": box dims must be 3");
    return ObjectSpec::Box(jo["name"].get<std::string>(),
                           dims[0].get<double>(), dims[1].get<double>(),
                           dims[2].get<double>(), jo["mass"].get<double>());
  }
  if (shape == "cylinder") {
    if (dims.size() != 2) {
      throw SchemaError(where + ": cylinder dims must be 2");
    }
    return ObjectSpec::Cylinder(jo["name"].get<std::string>(),
                                dims[0].get<double>(), dims[1].get<double>(),
                                jo["mass"].get<double>());
  }
  throw SchemaError(where + ": unknown shape '" + shape + "'");
}

DatasetHeader parse_header(const json& j) {
  require_keys(j, {"format", "hand_hash", "dof", "objects", "demo_ids", "seed",
                   "config_hash"},
               "header");
  DatasetHeader h;
  h.format_version = j["format"].get<std::string>();
  if (h.format_version != "graspset/1") {
    throw SchemaError("header: unsupported format version '" +
                      h.format_version + "'");
  }
  h.hand_hash = j["hand_hash"].get<std::uint64_t>();
  h.dof = j["dof"].get<int>();
  int oi = 0;
  for (const json& jo : j["objects"]) {
    h.objects.push_back(
        parse_object(jo, "header.objects[" + std::to_string(oi++) + "]"));
  }
  for (const json& id : j["demo_ids"]) h.demo_ids.push_back(id.get<std::string>());
  h.seed = j["seed"].get<std::uint64_t>();
  h.config_hash = j["config_hash"].get<std::string>();
  return h;
}

HumanDemoRecord parse_demo(const json& j, const std::string& where) {
  require_keys(j, {"type", "id", "object", "frames"}, where);
  HumanDemoRecord d;
  d.id = j["id"].get<std::string>();
  d.object = j["object"].get<std::string>();
  const size_t expect = kHumanKeypointNames.size() * 3 + 4 + 7;
  for (const json& jf : j["frames"]) {
    if (!jf.is_array() || jf.size() != expect) {
      throw SchemaError(where + ": human frame must have " +
                        std::to_string(expect) + " numbers");
    }
    HumanFrame f;
    size_t o = 0;
    for (const std::string& name : kHumanKeypointNames) {
      f.keypoints[name] =
          Vec3(jf[o].get<double>(), jf[o + 1].get<double>(),
               jf[o + 2].get<double>());
      o += 3;
    }
    f.palm_orientation = Quat(jf[o].get<double>(), jf[o + 1].get<double>(),
                              jf[o + 2].get<double>(), jf[o + 3].get<double>());
    o += 4;
    f.object_pose = pose_from(jf, o);
    d.frames.push_back(std::move(f));
  }
  return d;
}

TrajectoryRecord parse_record(const json& j, int dof,
                              const std::string& where) {
  require_keys(j,
               {"type", "id", "object", "stage", "source_demo", "parent",
                "candidate_seed", "t", "physics", "verified", "k_draws",
                "frames", "contacts", "actions"},
               where);
  TrajectoryRecord r;
  r.id = j["id"].get<std::string>();
  r.object = j["object"].get<std::string>();
  r.traj.stage = stage_from_name(j["stage"].get<std::string>());
  r.traj.source_demo_id = j["source_demo"].get<std::string>();
  r.prov.parent_id = j["parent"].get<std::string>();
  r.prov.candidate_seed = j["candidate_seed"].get<std::uint64_t>();
  r.prov.t = j["t"].get<double>();
  const json& ph = j["physics"];
  require_keys(ph, {"mass", "friction", "noise_std", "seed"},
               where + ".physics");
  r.prov.physics.mass = ph["mass"].get<double>();
  r.prov.physics.friction = ph["friction"].get<double>();
  r.prov.physics.noise_std = ph["noise_std"].get<double>();
  r.prov.physics.seed = ph["seed"].get<std::uint64_t>();
  r.prov.verified = j["verified"].get<bool>();
  r.prov.k_draws = j["k_draws"].get<int>();

  const size_t frame_len = 7 + dof + 7;
  for (const json& jf : j["frames"]) {
    if (!jf.is_array() || jf.size() != frame_len) {
      throw SchemaError(where + ": frame must have " +
                        std::to_string(frame_len) + " numbers (dof " +
                        std::to_string(dof) + ")");
    }
    TrajFrame f;
    f.hand.palm_pose = pose_from(jf, 0);
    f.hand.joints = JointConfig(dof);
    for (int i = 0; i < dof; ++i) f.hand.joints[i] = jf[7 + i].get<double>();
    f.object_pose = pose_from(jf, 7 + dof);
    r.traj.frames.push_back(std::move(f));
  }
  const json& contacts = j["contacts"];
  if (!contacts.empty()) {
    if (contacts.size() != r.traj.frames.size()) {
      throw SchemaError(where + ": contacts length must match frames");
    }
    for (size_t i = 0; i < contacts.size(); ++i) {
      for (const json& c : contacts[i]) {
        r.traj.frames[i].tip_contacts.push_back(
            static_cast<std::uint8_t>(c.get<int>()));
      }
    }
  }
  const size_t action_len = 7 + dof;
  for (const json& ja : j["actions"]) {
    if (!ja.is_array() || ja.size() != action_len) {
      throw SchemaError(where + ": action must have " +
                        std::to_string(action_len) + " numbers");
    }
    HandState a;
    a.palm_pose = pose_from(ja, 0);
    a.joints = JointConfig(dof);
    for (int i = 0; i < dof; ++i) a.joints[i] = ja[7 + i].get<double>();
    r.traj.actions.push_back(std::move(a));
  }
  return r;
}

}  // namespace

const TrajectoryRecord* GraspDataset::find_record(const std::string& id) const {
  for (const TrajectoryRecord& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

void GraspDataset::validate() const {
  int idx = 0;
  for (const TrajectoryRecord& r : records) {
    const std::string where = "record " + std::to_string(idx++);
    for (const TrajFrame& f : r.traj.frames) {
      if (f.hand.joints.size() != header.dof) {
        throw SchemaError(where + ": frame dof does not match header");
      }
    }
    if (!r.traj.frames.empty() &&
        r.traj.actions.size() != r.traj.frames.size() - 1) {
      throw SchemaError(where + ": len(actions) must be len(frames) - 1");
    }
    if (r.traj.stage != Stage::retargeted && r.prov.parent_id.empty()) {
      throw SchemaError(where + ": stage '" +
                        std::string(stage_name(r.traj.stage)) +
                        "' requires provenance parent");
    }
  }
}

std::string serialize(const GraspDataset& ds) {
  std::string out;
  {
    JsonBuf b;
    emit_header(b, ds.header);
    out += b.take();
    out += '\n';
  }
  for (const HumanDemoRecord& d : ds.demos) {
    JsonBuf b;
    emit_demo(b, d);
    out += b.take();
    out += '\n';
  }
  for (const TrajectoryRecord& r : ds.records) {
    JsonBuf b;
    emit_record(b, r);
    out += b.take();
    out += '\n';
  }
  return out;
}

GraspDataset parse_dataset(const std::string& text) {
  GraspDataset ds;
  size_t pos = 0;
  int line_index = 0;
  bool have_header = false;
  while (pos < text.size()) {
    const size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      throw SchemaError(
          "truncated dataset: record starting at byte offset " +
          std::to_string(pos) + " is not newline-terminated");
    }
    const std::string_view line(text.data() + pos, nl - pos);
    const std::string where = have_header
                                  ? "record " + std::to_string(line_index - 1)
                                  : "header";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(where + " (byte offset " + std::to_string(pos) +
                        "): invalid JSON: " + e.what());
    }
    try {
      if (!have_header) {
        ds.header = parse_header(j);
        have_header = true;
      } else {
        const std::string type =
            j.contains("type") ? j["type"].get<std::string>() : "";
        if (type == "human_demo") {
          ds.demos.push_back(parse_demo(j, where));
        } else if (type == "trajectory") {
          ds.records.push_back(parse_record(j, ds.header.dof, where));
        } else {
          throw SchemaError(where + ": unknown record type '" + type + "'");
        }
      }
    } catch (const json::exception& e) {
      throw SchemaError(where + ": " + e.what());
    }
    pos = nl + 1;
    ++line_index;
  }
  if (!have_header) {
    throw SchemaError("dataset is empty: missing header line");
  }
  ds.validate();
  return ds;
}

void write_dataset(const GraspDataset& ds, const std::filesystem::path& path) {
  const std::string text = serialize(ds);
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

GraspDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw MissingArtifactError("dataset file '" + path.string() +
                               "' does not exist");
  }
  std::ostringstream oss;
  oss << f.rdbuf();
  return parse_dataset(oss.str());
}

void check_provenance_closure(const GraspDataset& ds) {
  std::set<std::string> demo_ids(ds.header.demo_ids.begin(),
                                 ds.header.demo_ids.end());
  std::map<std::string, const TrajectoryRecord*> by_id;
  for (const TrajectoryRecord& r : ds.records) by_id[r.id] = &r;
  for (const TrajectoryRecord& r : ds.records) {
    const TrajectoryRecord* cur = &r;
    int depth = 0;
    while (true) {
      if (++depth > 64) {
        throw SchemaError("record '" + r.id + "': provenance chain too deep");
      }
      if (cur->traj.stage == Stage::retargeted) {
        if (!demo_ids.count(cur->prov.parent_id)) {
          throw SchemaError("record '" + r.id +
                            "': chain ends at unknown demo '" +
                            cur->prov.parent_id + "'");
        }
        break;
      }
      auto it = by_id.find(cur->prov.parent_id);
      if (it == by_id.end()) {
        throw SchemaError("record '" + r.id + "': missing ancestor '" +
                          cur->prov.parent_id + "'");
      }
      cur = it->second;
    }
  }
}

DatasetStats stats(const GraspDataset& ds) {
  DatasetStats s;
  for (const HumanDemoRecord& d : ds.demos) {
    s.per_object[d.object].human++;
    s.total.human++;
  }
  for (const TrajectoryRecord& r : ds.records) {
    DatasetStats::Row& row = s.per_object[r.object];
    switch (r.traj.stage) {
      case Stage::retargeted:
      case Stage::templated:
        row.nominal++;
        s.total.nominal++;
        break;
      case Stage::refined:
        row.refined++;
        s.total.refined++;
        break;
      case Stage::augmented:
        row.augmented++;
        s.total.augmented++;
        break;
      case Stage::funneled:
        row.augmented++;
        row.funneled++;
        s.total.augmented++;
        s.total.funneled++;
        break;
    }
  }
  s.amplification =
      s.total.human > 0
          ? static_cast<double>(s.total.augmented) / s.total.human
          : 0.0;
  return s;
}

std::string format_stats_table(const DatasetStats& s) {
  std::ostringstream oss;
  std::vector<std::string> objects;
  for (const auto& [name, _] : s.per_object) objects.push_back(name);

  auto row = [&](const std::string& label, auto field) {
    oss << label;
    for (size_t i = label.size(); i < 24; ++i) oss << ' ';
    for (const std::string& o : objects) {
      std::string cell = std::to_string(field(s.per_object.at(o)));
      for (size_t i = cell.size(); i < std::max<size_t>(o.size(), 6) + 2; ++i)
        oss << ' ';
      oss << cell;
    }
    std::string cell = std::to_string(field(s.total));
    for (size_t i = cell.size(); i < 8; ++i) oss << ' ';
    oss << cell << '\n';
  };

  oss << "                        ";
  for (const std::string& o : objects) {
    for (size_t i = 0; i < std::max<size_t>(o.size(), 6) + 2 - o.size(); ++i)
      oss << ' ';
    oss << o;
  }
  oss << "     sum\n";
  row("Human Demo", [](const DatasetStats::Row& r) { return r.human; });
  row("Normalized Trajectory",
      [](const DatasetStats::Row& r) { return r.nominal; });
  row("Refined Trajectory",
      [](const DatasetStats::Row& r) { return r.refined; });
  row("Augmented Trajectory",
      [](const DatasetStats::Row& r) { return r.augmented; });
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", s.amplification);
  oss << "amplification (augmented / human): " << buf << "x\n";
  return oss.str();
}

}  // namespace dexgrasp
