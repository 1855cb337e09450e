// Copyright 2026 ptoadj contributors
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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptoadj::numdiff {

/// Step for a central difference of the given order about x. The relative
/// step balances the eps/h^k roundoff term against the O(h^4)
/// Richardson-extrapolated truncation error, i.e. h ~ eps^(1/(order+4)):
/// a uniform 1e-4 step lets roundoff swamp third derivatives once the
/// function scale reaches a few hundred.
inline double step_for(double x, int order) {
  constexpr double kRelStep[5] = {7e-4, 2.5e-3, 6e-3, 1.2e-2, 2e-2};
  if (order < 1 || order > 5) throw std::invalid_argument("step_for: order must be 1..5");
  return kRelStep[order - 1] * std::max(1.0, std::abs(x));
}

/// Plain central-difference stencil of the given order at step h.
template <typename F>
double central(const F& f, double x, int order, double h) {
  switch (order) {
    case 1:
      return (f(x + h) - f(x - h)) / (2.0 * h);
    case 2:
      return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    case 3:
      return (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) /
             (2.0 * h * h * h);
    case 4:
      return (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) +
              f(x - 2.0 * h)) /
             (h * h * h * h);
    case 5:
      return (f(x + 3.0 * h) - 4.0 * f(x + 2.0 * h) + 5.0 * f(x + h) - 5.0 * f(x - h) +
              4.0 * f(x - 2.0 * h) - f(x - 3.0 * h)) /
             (2.0 * h * h * h * h * h);
    default:
      throw std::invalid_argument("central: order must be in 1..5");
  }
}

/// Central difference with one level of Richardson extrapolation
/// (O(h^2) stencils promoted to O(h^4)).
template <typename F>
double derivative(const F& f, double x, int order) {
  const double h = step_for(x, order);
  const double coarse = central(f, x, order, h);
  const double fine = central(f, x, order, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace ptoadj::numdiff
