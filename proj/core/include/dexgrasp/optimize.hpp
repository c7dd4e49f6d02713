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

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace dexgrasp {

struct NelderMeadOptions {
  int max_iters = 200;
  // Relative spread termination: stop when (f_worst - f_best) falls below
  // ftol_rel * (|f_best| + 1e-30). Ordering-based, so the optimizer is
  // invariant to positive rescaling of the objective.
  double ftol_rel = 1e-10;
  double initial_step = 0.08;
  Eigen::VectorXd initial_steps;  // optional per-dimension override
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  int evals = 0;
  std::vector<double> best_history;  // best f after each iteration
};

/// Downhill simplex minimization. Throws NumericalError with an iterate dump
/// if the objective returns a non-finite value.
NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const NelderMeadOptions& opts);

}  // namespace dexgrasp
