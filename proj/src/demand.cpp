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

#include "ptoadj/demand.hpp"

#include <cmath>

#include "ptoadj/numdiff.hpp"

namespace ptoadj {

namespace {

void check_model(const DemandModel& m) {
  switch (m.family) {
    case DemandFamily::kLinearTwoParam:
      return;
    case DemandFamily::kPowerLaw:
      if (!(m.gamma > 0.0)) throw std::invalid_argument("power-law exponent must be positive");
      [[fallthrough]];
    default:
      if (!(m.intercept > 0.0)) throw std::invalid_argument("demand intercept must be positive");
  }
}

void check_params(const DemandModel& m, const ParamVector& params) {
  const int want = m.single_parameter() ? 1 : 2;
  if (params.size() != want) {
    throw std::invalid_argument("parameter vector has wrong length for demand family");
  }
  const double slope = params[want - 1];
  if (!std::isfinite(slope) || slope <= kMinSlope) {
    throw std::invalid_argument("slope parameter must exceed 1e-12");
  }
  if (want == 2 && !std::isfinite(params[0])) {
    throw std::invalid_argument("intercept parameter must be finite");
  }
}

double pow_checked(double base, double exponent) {
  if (base >= 0.0) return std::pow(base, exponent);
  if (exponent == std::floor(exponent)) return std::pow(base, exponent);
  throw std::domain_error("power-law surrogate evaluated where the demand base is negative");
}

// Single-parameter derivative formulas in the estimate argument x, with
// truth t. Orders 1..3 only; callers dispatch higher orders to differencing.
double linear_derivative(double a, double t, double x, int order) {
  const double a2 = a * a;
  const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
  switch (order) {
    case 1: return -a2 / (2.0 * x2) + a2 * t / (2.0 * x3);
    case 2: return a2 / x3 - 1.5 * a2 * t / x4;
    default: return -3.0 * a2 / x4 + 6.0 * a2 * t / x5;
  }
}

double log_linear_derivative(double a, double t, double x, int order) {
  const double e = std::exp(a - t / x);
  const double x2 = x * x, x3 = x2 * x, x5 = x3 * x2, x7 = x5 * x2;
  switch (order) {
    case 1: return e * (t - x) / x3;
    case 2: return e * (t * t - 4.0 * t * x + 2.0 * x2) / x5;
    default: return e * (t * t * t - 9.0 * t * t * x + 18.0 * t * x2 - 6.0 * x3) / x7;
  }
}

// Power-law derivatives go through u = 1/x: with q = t/(1+gamma) the
// surrogate is S(u) = K*u*(1-q*u)^gamma, whose u-derivatives are compact,
// and the chain rule maps them back to x.
double power_law_derivative(double a, double gamma, double t, double x, int order) {
  const double c = 1.0 + gamma;
  const double k = std::pow(a, c) / c;
  const double q = t / c;
  const double u = 1.0 / x;
  const double bu = 1.0 - q * u;
  const double s1 = k * pow_checked(bu, gamma - 1.0) * (1.0 - t * u);
  const double g = q * (gamma - 1.0) * (1.0 - t * u) + t * bu;
  const double s2 = -k * pow_checked(bu, gamma - 2.0) * g;
  const double s3 =
      k * pow_checked(bu, gamma - 3.0) * (q * (gamma - 2.0) * g + bu * q * t * gamma);
  const double u1 = -1.0 / (x * x);
  const double u2 = 2.0 / (x * x * x);
  const double u3 = -6.0 / (x * x * x * x);
  switch (order) {
    case 1: return s1 * u1;
    case 2: return s2 * u1 * u1 + s1 * u2;
    default: return s3 * u1 * u1 * u1 + 3.0 * s2 * u1 * u2 + s1 * u3;
  }
}

}  // namespace

DemandModel DemandModel::linear(double a) {
  DemandModel m{DemandFamily::kLinearKnownIntercept, a, 1.0};
  check_model(m);
  return m;
}

DemandModel DemandModel::linear_two_param() {
  return DemandModel{DemandFamily::kLinearTwoParam, 0.0, 1.0};
}

DemandModel DemandModel::log_linear(double a) {
  DemandModel m{DemandFamily::kLogLinearKnownIntercept, a, 1.0};
  check_model(m);
  return m;
}

DemandModel DemandModel::power_law(double a, double gamma) {
  DemandModel m{DemandFamily::kPowerLaw, a, gamma};
  check_model(m);
  return m;
}

double demand(const DemandModel& model, const ParamVector& params, double price) {
  check_params(model, params);
  if (!(price >= 0.0)) throw std::invalid_argument("price must be nonnegative");
  switch (model.family) {
    case DemandFamily::kLinearKnownIntercept:
      return model.intercept - params.scalar() * price;
    case DemandFamily::kLinearTwoParam:
      return params[0] - params[1] * price;
    case DemandFamily::kLogLinearKnownIntercept:
      return std::exp(model.intercept - params.scalar() * price);
    case DemandFamily::kPowerLaw:
      return std::pow(std::max(model.intercept - params.scalar() * price, 0.0), model.gamma);
  }
  throw std::logic_error("unreachable");
}

double optimal_price(const DemandModel& model, const ParamVector& params) {
  check_params(model, params);
  switch (model.family) {
    case DemandFamily::kLinearKnownIntercept:
      return model.intercept / (2.0 * params.scalar());
    case DemandFamily::kLinearTwoParam:
      return params[0] / (2.0 * params[1]);
    case DemandFamily::kLogLinearKnownIntercept:
      return 1.0 / params.scalar();
    case DemandFamily::kPowerLaw:
      return model.intercept / (params.scalar() * (1.0 + model.gamma));
  }
  throw std::logic_error("unreachable");
}

double surrogate_reward(const DemandModel& model, const ParamVector& true_params,
                        const ParamVector& est_params) {
  check_params(model, true_params);
  check_params(model, est_params);
  switch (model.family) {
    case DemandFamily::kLinearKnownIntercept: {
      const double a2 = model.intercept * model.intercept;
      const double x = est_params.scalar();
      return a2 / (2.0 * x) - a2 * true_params.scalar() / (4.0 * x * x);
    }
    case DemandFamily::kLinearTwoParam: {
      const double x1 = est_params[0], x2 = est_params[1];
      return true_params[0] * x1 / (2.0 * x2) -
             true_params[1] * x1 * x1 / (4.0 * x2 * x2);
    }
    case DemandFamily::kLogLinearKnownIntercept: {
      const double x = est_params.scalar();
      return std::exp(model.intercept - true_params.scalar() / x) / x;
    }
    case DemandFamily::kPowerLaw: {
      const double c = 1.0 + model.gamma;
      const double x = est_params.scalar();
      const double base = 1.0 - true_params.scalar() / (x * c);
      return std::pow(model.intercept, c) / (c * x) * pow_checked(base, model.gamma);
    }
  }
  throw std::logic_error("unreachable");
}

double realized_reward(const DemandModel& model, const ParamVector& true_params,
                       double price) {
  return price * std::max(demand(model, true_params, price), 0.0);
}

double derivative_ratio_constant(const DemandModel& model) {
  switch (model.family) {
    case DemandFamily::kLinearKnownIntercept:
      return -6.0;
    case DemandFamily::kLogLinearKnownIntercept:
      return -4.0;
    case DemandFamily::kPowerLaw:
      return -2.0 * (1.0 + 2.0 * model.gamma) / model.gamma;
    case DemandFamily::kLinearTwoParam:
      throw std::invalid_argument(
          "two-parameter demand has no scalar derivative-ratio constant");
  }
  throw std::logic_error("unreachable");
}

double reward_derivative(const DemandModel& model, const ParamVector& true_params,
                         const ParamVector& at, int order) {
  if (order < 1 || order > 5) throw std::invalid_argument("derivative order must be 1..5");
  if (!model.single_parameter()) {
    throw std::invalid_argument(
        "use reward_gradient/reward_hessian/reward_third_tensor for two parameters");
  }
  check_params(model, true_params);
  check_params(model, at);
  const double t = true_params.scalar();
  const double x = at.scalar();
  if (order <= 3) {
    switch (model.family) {
      case DemandFamily::kLinearKnownIntercept:
        return linear_derivative(model.intercept, t, x, order);
      case DemandFamily::kLogLinearKnownIntercept:
        return log_linear_derivative(model.intercept, t, x, order);
      default:
        return power_law_derivative(model.intercept, model.gamma, t, x, order);
    }
  }
  const auto f = [&](double xx) { return surrogate_reward(model, true_params, ParamVector(xx)); };
  return numdiff::derivative(f, x, order);
}

Eigen::Vector2d reward_gradient(const DemandModel& model, const ParamVector& true_params,
                                const ParamVector& at) {
  if (model.family != DemandFamily::kLinearTwoParam) {
    throw std::invalid_argument("reward_gradient requires the two-parameter family");
  }
  check_params(model, true_params);
  check_params(model, at);
  const double t1 = true_params[0], t2 = true_params[1];
  const double x1 = at[0], x2 = at[1];
  const double x2sq = x2 * x2;
  return {t1 / (2.0 * x2) - t2 * x1 / (2.0 * x2sq),
          -t1 * x1 / (2.0 * x2sq) + t2 * x1 * x1 / (2.0 * x2sq * x2)};
}

Eigen::Matrix2d reward_hessian(const DemandModel& model, const ParamVector& true_params,
                               const ParamVector& at) {
  if (model.family != DemandFamily::kLinearTwoParam) {
    throw std::invalid_argument("reward_hessian requires the two-parameter family");
  }
  check_params(model, true_params);
  check_params(model, at);
  const double t1 = true_params[0], t2 = true_params[1];
  const double x1 = at[0], x2 = at[1];
  const double x2sq = x2 * x2, x2cu = x2sq * x2, x2qu = x2cu * x2;
  Eigen::Matrix2d h;
  h(0, 0) = -t2 / (2.0 * x2sq);
  h(0, 1) = h(1, 0) = -t1 / (2.0 * x2sq) + t2 * x1 / x2cu;
  h(1, 1) = t1 * x1 / x2cu - 1.5 * t2 * x1 * x1 / x2qu;
  return h;
}

Tensor3 reward_third_tensor(const DemandModel& model, const ParamVector& true_params,
                            const ParamVector& at) {
  if (model.family != DemandFamily::kLinearTwoParam) {
    throw std::invalid_argument("reward_third_tensor requires the two-parameter family");
  }
  check_params(model, true_params);
  check_params(model, at);
  Tensor3 t(2);
  for (int k = 0; k < 2; ++k) {
    const auto h_entry = [&](int i, int j) {
      return [&, i, j](double xk) {
        ParamVector shifted = at;
        shifted[k] = xk;
        return reward_hessian(model, true_params, shifted)(i, j);
      };
    };
    for (int i = 0; i < 2; ++i) {
      for (int j = i; j < 2; ++j) {
        const double v = numdiff::derivative(h_entry(i, j), at[k], 1);
        t(k, i, j) = v;
        t(k, j, i) = v;
      }
    }
  }
  return t.symmetrized();
}

}  // namespace ptoadj
