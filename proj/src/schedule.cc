// Copyright 2026 The LGSG Authors.
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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lgsg/diffusion.h"

namespace lgsg {

double NoiseSchedule::SigmaTransitionSq(int t) const {
  const double a = AlphaTransition(t);
  return std::max(0.0, sigma[t] * sigma[t] - a * a * sigma[t - 1] * sigma[t - 1]);
}

NoiseSchedule MakeSchedule(int num_steps, double offset) {
  if (num_steps < 1) throw std::invalid_argument("schedule needs T >= 1");
  if (!(offset > 0.0)) throw std::invalid_argument("schedule offset must be positive");
  NoiseSchedule s;
  s.num_steps = num_steps;
  s.alpha.resize(num_steps + 1);
  s.sigma.resize(num_steps + 1);
  for (int t = 0; t <= num_steps; ++t) {
    const double angle =
        0.5 * std::numbers::pi * t / (static_cast<double>(num_steps) * (1.0 + offset));
    s.alpha[t] = std::cos(angle);
    s.sigma[t] = std::sin(angle);
  }
  return s;
}

}  // namespace lgsg
