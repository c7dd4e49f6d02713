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

#include <string>

#include "dexgrasp/kinematics.hpp"

namespace dexgrasp {

// Bundled hand descriptions so tests and the synthetic pipeline run without
// external assets. Both round-trip through the JSON loader.

/// 16-dof four-finger hand: three fingers plus an opposing thumb, each with
/// one abduction joint and three curl joints. Keypoints: palm, per-finger
/// tip and mid.
std::string bundled_hand16_json();
HandModel bundled_hand16();

/// 2-dof toy pincher: two single-joint fingers hanging from the palm.
std::string bundled_pincher_json();
HandModel bundled_pincher();

/// Joint vectors for the bundled 16-dof hand.
JointConfig hand16_open_config();
JointConfig hand16_grip_config();

}  // namespace dexgrasp
