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

#include <Eigen/Core>

#include <array>
#include <stdexcept>

#include "ptoadj/tensor.hpp"

namespace ptoadj {

/// Slopes this small are rejected everywhere: the pricing map divides by them.
inline constexpr double kMinSlope = 1e-12;

enum class DemandFamily {
  kLinearKnownIntercept,   // d(p) = a - theta*p, a known
  kLinearTwoParam,         // d(p) = theta1 - theta2*p
  kLogLinearKnownIntercept,  // d(p) = exp(a - theta*p), a known
  kPowerLaw,               // d(p) = (a - theta*p)^gamma, a and gamma known
};

/// A demand family together with its known constants. The unknown
/// parameters (slope, or intercept+slope for the two-parameter family)
/// travel separately in a ParamVector.
struct DemandModel {
  DemandFamily family = DemandFamily::kLinearKnownIntercept;
  double intercept = 0.0;  // a, unused for the two-parameter family
  double gamma = 1.0;      // power-law exponent only

  static DemandModel linear(double a);
  static DemandModel linear_two_param();
  static DemandModel log_linear(double a);
  static DemandModel power_law(double a, double gamma);

  bool single_parameter() const { return family != DemandFamily::kLinearTwoParam; }
};

/// One or two real parameters with value semantics and no allocation.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(double theta) : v_{theta, 0.0}, n_(1) {}
  ParamVector(double theta1, double theta2) : v_{theta1, theta2}, n_(2) {}

  int size() const { return n_; }

  double scalar() const {
    if (n_ != 1) throw std::logic_error("ParamVector: scalar access on vector parameter");
    return v_[0];
  }

  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }

  friend bool operator==(const ParamVector& a, const ParamVector& b) {
    return a.n_ == b.n_ && a.v_ == b.v_;
  }

 private:
  std::array<double, 2> v_{0.0, 0.0};
  int n_ = 0;
};

/// Quantity demanded at `price`. Power-law clamps the base at zero before
/// exponentiation so the value is defined at every nonnegative price.
double demand(const DemandModel& model, const ParamVector& params, double price);

/// Revenue-maximizing price for the model under the supplied parameters:
/// a/(2*theta), 1/theta, a/(theta*(1+gamma)), or theta1/(2*theta2).
double optimal_price(const DemandModel& model, const ParamVector& params);

/// The true-revenue objective evaluated at the price induced by the
/// estimate, as an analytic (unclamped) function of the estimate. Coincides
/// with realized_reward whenever demand at the induced price is nonnegative.
double surrogate_reward(const DemandModel& model, const ParamVector& true_params,
                        const ParamVector& est_params);

/// price * max(demand, 0): what a deployed policy actually earns.
double realized_reward(const DemandModel& model, const ParamVector& true_params,
                       double price);

/// The constant C with R'''(theta)/R''(theta) = C/theta at the truth:
/// -6 (linear), -4 (log-linear), -2(1+2*gamma)/gamma (power-law).
/// The two-parameter family has no scalar ratio and throws.
double derivative_ratio_constant(const DemandModel& model);

/// k-th derivative of the surrogate reward in the estimate argument, for
/// single-parameter families. Orders 1-3 are closed-form; 4-5 fall back to
/// central differences (see numdiff.hpp for the step policy).
double reward_derivative(const DemandModel& model, const ParamVector& true_params,
                         const ParamVector& at, int order);

/// Derivatives of the two-parameter surrogate in the estimate argument.
/// Gradient and Hessian are closed-form; the third-derivative tensor is
/// obtained by differencing the Hessian and symmetrizing.
Eigen::Vector2d reward_gradient(const DemandModel& model, const ParamVector& true_params,
                                const ParamVector& at);
Eigen::Matrix2d reward_hessian(const DemandModel& model, const ParamVector& true_params,
                               const ParamVector& at);
Tensor3 reward_third_tensor(const DemandModel& model, const ParamVector& true_params,
                            const ParamVector& at);

}  // namespace ptoadj
