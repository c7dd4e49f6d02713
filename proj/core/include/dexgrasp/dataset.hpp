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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dexgrasp/sim.hpp"
#include "dexgrasp/trajectory.hpp"

namespace dexgrasp {

// Newline-delimited store: one header line, then one record per line, each a
// JSON object in canonical form (fixed key order, doubles as decimal with 17
// significant digits). parse(serialize(x)) == x and the re-serialization is
// byte-identical.

struct Provenance {
  std::string parent_id;  // ancestor record (or demo id for retargeted)
  std::uint64_t candidate_seed = 0;
  double t = 0.0;  // correlated-sampling interpolation scalar
  PhysicsParams physics;
  bool verified = false;  // passed the stability gate
  int k_draws = 0;
};

struct TrajectoryRecord {
  std::string id;
  std::string object;
  RobotTrajectory traj;
  Provenance prov;
};

struct HumanDemoRecord {
  std::string id;
  std::string object;
  std::vector<HumanFrame> frames;
};

struct DatasetHeader {
  std::string format_version = "graspset/1";
  std::uint64_t hand_hash = 0;
  int dof = 0;
  std::vector<ObjectSpec> objects;
  std::vector<std::string> demo_ids;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct GraspDataset {
  DatasetHeader header;
  std::vector<HumanDemoRecord> demos;
  std::vector<TrajectoryRecord> records;

  const TrajectoryRecord* find_record(const std::string& id) const;
  /// Structural checks: dof vs header, action/frame length law, provenance
  /// presence beyond retargeted. Throws SchemaError.
  void validate() const;
};

std::string serialize(const GraspDataset& ds);
GraspDataset parse_dataset(const std::string& text);

void write_dataset(const GraspDataset& ds, const std::filesystem::path& path);
GraspDataset read_dataset(const std::filesystem::path& path);

/// Every non-retargeted record's parent chain must terminate at a demo id
/// listed in the header. Throws SchemaError on violation.
void check_provenance_closure(const GraspDataset& ds);

struct DatasetStats {
  struct Row {
    int human = 0;
    int nominal = 0;  // retargeted + templated
    int refined = 0;
    int augmented = 0;  // augmented + funneled
    int funneled = 0;   // subset of the above, kept for diagnostics
  };
  std::map<std::string, Row> per_object;
  Row total;
  double amplification = 0.0;  // augmented / human
};

DatasetStats stats(const GraspDataset& ds);
std::string format_stats_table(const DatasetStats& s);

}  // namespace dexgrasp
