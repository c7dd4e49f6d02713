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

#include "dexgrasp/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dexgrasp/errors.hpp"

namespace dexgrasp {

namespace {

double checked_eval(const std::function<double(const Eigen::VectorXd&)>& f,
                    const Eigen::VectorXd& x, int& evals) {
  ++evals;
  double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream oss;
    oss << "nelder_mead: non-finite objective at x = [";
    for (int i = 0; i < x.size(); ++i) {
      if (i) oss << ", ";
      oss << x[i];
    }
    oss << "]";
    throw NumericalError(oss.str());
  }
  return v;
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  NelderMeadResult res;

  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i) {
    double step = (opts.initial_steps.size() == n) ? opts.initial_steps[i]
                                                   : opts.initial_step;
    pts[i + 1][i] += step;
  }
  for (int i = 0; i <= n; ++i) fv[i] = checked_eval(f, pts[i], res.evals);

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  std::vector<int> order(n + 1);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order[0];
    const int worst = order[n];
    const int second_worst = order[n - 1];

    res.best_history.push_back(fv[best]);
    if (fv[worst] - fv[best] <=
        opts.ftol_rel * (std::abs(fv[best]) + 1e-30)) {
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= n;

    Eigen::VectorXd xr = centroid + kReflect * (centroid - pts[worst]);
    double fr = checked_eval(f, xr, res.evals);
    if (fr < fv[best]) {
      Eigen::VectorXd xe = centroid + kExpand * (centroid - pts[worst]);
      double fe = checked_eval(f, xe, res.evals);
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second_worst]) {
      pts[worst] = xr;
      fv[worst] = fr;
    } else {
      Eigen::VectorXd xc = centroid + kContract * (pts[worst] - centroid);
      double fc = checked_eval(f, xc, res.evals);
      if (fc < fv[worst]) {
        pts[worst] = xc;
        fv[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + kShrink * (pts[i] - pts[best]);
          fv[i] = checked_eval(f, pts[i], res.evals);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i) {
    if (fv[i] < fv[best]) best = i;
  }
  res.x = pts[best];
  res.fx = fv[best];
  if (res.best_history.empty() || res.best_history.back() > res.fx) {
    res.best_history.push_back(res.fx);
  }
  return res;
}

}  // namespace dexgrasp
