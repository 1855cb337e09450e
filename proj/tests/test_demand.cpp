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

#include <doctest.h>

#include <cmath>

#include "ptoadj/demand.hpp"
#include "ptoadj/numdiff.hpp"
#include "ptoadj/rng.hpp"

using namespace ptoadj;

namespace {

double surrogate_of(const DemandModel& m, double theta, double x) {
  return surrogate_reward(m, ParamVector(theta), ParamVector(x));
}

}  // namespace

TEST_CASE("demand values") {
  CHECK(demand(DemandModel::linear(60.0), ParamVector(3.0), 10.0) == 30.0);
  CHECK(demand(DemandModel::log_linear(8.0), ParamVector(5.0), 0.2) ==
        doctest::Approx(std::exp(7.0)).epsilon(1e-14));
  CHECK(demand(DemandModel::power_law(1.0, 2.0), ParamVector(1.0), 1.5) == 0.0);
  CHECK(demand(DemandModel::linear_two_param(), ParamVector(60.0, 3.0), 10.0) == 30.0);
  CHECK_THROWS_AS(
      (void)demand(DemandModel::linear(60.0), ParamVector(3.0), -1.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)demand(DemandModel::linear(60.0), ParamVector(0.0), 1.0),
      std::invalid_argument);
}

TEST_CASE("optimal prices") {
  CHECK(optimal_price(DemandModel::linear(60.0), ParamVector(3.0)) == 10.0);
  CHECK(optimal_price(DemandModel::log_linear(8.0), ParamVector(5.0)) == 0.2);
  CHECK(optimal_price(DemandModel::power_law(1.0, 1.0), ParamVector(1.0)) == 0.5);
  CHECK(optimal_price(DemandModel::linear_two_param(), ParamVector(60.0, 3.0)) == 10.0);
  CHECK_THROWS_AS(
      (void)optimal_price(DemandModel::linear(60.0), ParamVector(1e-13)),
      std::invalid_argument);
}

TEST_CASE("surrogate reward values") {
  CHECK(surrogate_of(DemandModel::linear(1.0), 1.0, 1.0) == doctest::Approx(0.25));
  CHECK(surrogate_of(DemandModel::linear(60.0), 3.0, 3.0) == doctest::Approx(300.0));
  CHECK(surrogate_of(DemandModel::linear(1.0), 1.0, 0.5) == doctest::Approx(0.0));
  // Two-parameter form at the truth gives the optimal revenue theta1^2/(4 theta2).
  CHECK(surrogate_reward(DemandModel::linear_two_param(), ParamVector(60.0, 3.0),
                         ParamVector(60.0, 3.0)) == doctest::Approx(300.0));
}

TEST_CASE("realized reward values and clamping") {
  const DemandModel linear = DemandModel::linear(60.0);
  CHECK(realized_reward(linear, ParamVector(3.0), 25.0) == 0.0);
  CHECK(realized_reward(linear, ParamVector(3.0), 10.0) == 300.0);
  CHECK(realized_reward(DemandModel::log_linear(8.0), ParamVector(5.0), 0.2) ==
        doctest::Approx(0.2 * std::exp(7.0)));
}

TEST_CASE("optimal price maximizes: surrogate at truth equals realized at optimum") {
  const DemandModel models[] = {DemandModel::linear(60.0), DemandModel::log_linear(8.0),
                                DemandModel::power_law(2.0, 2.0)};
  for (const DemandModel& m : models) {
    for (const double theta : {0.5, 1.0, 3.0, 5.0}) {
      const ParamVector t(theta);
      CHECK(surrogate_reward(m, t, t) ==
            doctest::Approx(realized_reward(m, t, optimal_price(m, t))).epsilon(1e-12));
    }
  }
}

TEST_CASE("derivative ratio constants") {
  CHECK(derivative_ratio_constant(DemandModel::linear(60.0)) == -6.0);
  CHECK(derivative_ratio_constant(DemandModel::log_linear(8.0)) == -4.0);
  CHECK(derivative_ratio_constant(DemandModel::power_law(1.0, 2.0)) == -5.0);
  CHECK(derivative_ratio_constant(DemandModel::power_law(1.0, 1.0)) == -6.0);
  CHECK_THROWS_AS((void)derivative_ratio_constant(DemandModel::linear_two_param()),
                  std::invalid_argument);
}

TEST_CASE("reward derivative closed forms") {
  const DemandModel m = DemandModel::linear(1.0);
  CHECK(reward_derivative(m, ParamVector(1.0), ParamVector(1.0), 2) == doctest::Approx(-0.5));
  CHECK(reward_derivative(m, ParamVector(1.0), ParamVector(1.0), 1) == doctest::Approx(0.0));
  // Fourth and fifth orders fall back to differencing; linear demand has
  // R4 = 12a^2/x^5 - 30a^2 t/x^6 and R5 = -60a^2/x^6 + 180a^2 t/x^7.
  CHECK(reward_derivative(m, ParamVector(1.0), ParamVector(1.0), 4) ==
        doctest::Approx(-18.0).epsilon(1e-4));
  CHECK(reward_derivative(m, ParamVector(1.0), ParamVector(1.0), 5) ==
        doctest::Approx(120.0).epsilon(1e-3));
  CHECK_THROWS_AS(
      (void)reward_derivative(m, ParamVector(1.0), ParamVector(1.0), 6),
      std::invalid_argument);
  CHECK_THROWS_AS((void)reward_derivative(DemandModel::linear_two_param(),
                                          ParamVector(60.0, 3.0), ParamVector(60.0, 3.0), 2),
                  std::invalid_argument);
}

TEST_CASE("closed-form derivatives agree with differencing away from the truth") {
  const DemandModel models[] = {DemandModel::linear(60.0), DemandModel::log_linear(8.0),
                                DemandModel::power_law(2.0, 2.5)};
  Philox rng(7, substream_id(StreamKind::kAux, 1, 0));
  for (const DemandModel& m : models) {
    for (int trial = 0; trial < 20; ++trial) {
      const double theta = 0.5 + 4.5 * rng.next_uniform();
      const double x = theta * (0.8 + 0.4 * rng.next_uniform());
      const ParamVector truth(theta);
      const auto f = [&](double xx) { return surrogate_reward(m, truth, ParamVector(xx)); };
      for (int order = 1; order <= 3; ++order) {
        const double analytic = reward_derivative(m, truth, ParamVector(x), order);
        const double fd = numdiff::derivative(f, x, order);
        CHECK(analytic == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("derivative ratio property on the (model, theta) grid") {
  const DemandModel models[] = {DemandModel::linear(60.0), DemandModel::log_linear(8.0),
                                DemandModel::power_law(2.0, 2.0)};
  for (const DemandModel& m : models) {
    const double c = derivative_ratio_constant(m);
    for (const double theta : {0.5, 1.0, 3.0, 5.0}) {
      const ParamVector truth(theta);
      const auto f = [&](double x) { return surrogate_reward(m, truth, ParamVector(x)); };
      const double r1 = numdiff::derivative(f, theta, 1);
      const double r2 = numdiff::derivative(f, theta, 2);
      const double r3 = numdiff::derivative(f, theta, 3);
      CHECK(theta * r3 / r2 == doctest::Approx(c).epsilon(1e-4));
      CHECK(std::abs(r1) < 1e-6 * std::abs(r2) * theta);  // maximum at the truth
      CHECK(r2 < 0.0);
    }
  }
}

TEST_CASE("truth maximizes the surrogate and underestimation hurts more") {
  const DemandModel models[] = {DemandModel::linear(1.0), DemandModel::log_linear(8.0),
                                DemandModel::power_law(2.0, 2.0)};
  for (const DemandModel& m : models) {
    for (const double theta : {0.5, 1.0, 3.0}) {
      const double peak = surrogate_of(m, theta, theta);
      for (const double rel : {0.6, 0.8, 0.9, 1.1, 1.25, 1.5}) {
        CHECK(surrogate_of(m, theta, rel * theta) < peak);
      }
    }
  }
  // Asymmetry for the unit linear model: R(theta-d) < R(theta+d).
  for (double delta = 0.05; delta <= 0.5 + 1e-12; delta += 0.05) {
    CHECK(surrogate_of(DemandModel::linear(1.0), 1.0, 1.0 - delta) <
          surrogate_of(DemandModel::linear(1.0), 1.0, 1.0 + delta));
  }
}

TEST_CASE("two-parameter gradient, Hessian and third tensor") {
  const DemandModel m = DemandModel::linear_two_param();
  const ParamVector truth(60.0, 3.0);

  const Eigen::Vector2d g = reward_gradient(m, truth, truth);
  CHECK(g.cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::Matrix2d h = reward_hessian(m, truth, truth);
  CHECK(h(0, 0) == doctest::Approx(-1.0 / 6.0));
  CHECK(h(0, 1) == doctest::Approx(20.0 / 6.0));
  CHECK(h(1, 0) == doctest::Approx(20.0 / 6.0));
  CHECK(h(1, 1) == doctest::Approx(-400.0 / 6.0));

  // Hessian against direct differencing of the surrogate itself.
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const auto fij = [&](double xi, double xj) {
        ParamVector at = truth;
        at[i] = xi;
        if (i == j) {
          return surrogate_reward(m, truth, at);
        }
        at[j] = xj;
        return surrogate_reward(m, truth, at);
      };
      double fd = 0.0;
      if (i == j) {
        const auto f = [&](double x) { return fij(x, 0.0); };
        fd = numdiff::derivative(f, truth[i], 2);
      } else {
        const double hi = numdiff::step_for(truth[i], 1);
        const double hj = numdiff::step_for(truth[j], 1);
        fd = (fij(truth[i] + hi, truth[j] + hj) - fij(truth[i] + hi, truth[j] - hj) -
              fij(truth[i] - hi, truth[j] + hj) + fij(truth[i] - hi, truth[j] - hj)) /
             (4.0 * hi * hj);
      }
      CHECK(h(i, j) == doctest::Approx(fd).epsilon(1e-5));
    }
  }

  // Third tensor: differenced values match the hand-derived entries at the
  // truth: T112 = 1/t2^2, T122 = -2 t1/t2^3, T222 = 3 t1^2/t2^4, T111 = 0.
  const Tensor3 t = reward_third_tensor(m, truth, truth);
  CHECK(t.symmetry_gap() == 0.0);
  CHECK(t(0, 0, 0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(t(0, 0, 1) == doctest::Approx(1.0 / 9.0).epsilon(1e-8));
  CHECK(t(0, 1, 1) == doctest::Approx(-2.0 * 60.0 / 27.0).epsilon(1e-8));
  CHECK(t(1, 1, 1) == doctest::Approx(3.0 * 3600.0 / 81.0).epsilon(1e-8));
}

TEST_CASE("power-law surrogate rejects negative base with fractional exponent") {
  const DemandModel m = DemandModel::power_law(1.0, 2.5);
  // Estimate far below the truth pushes the plug-in price past the zero
  // crossing of demand; the analytic surrogate is undefined there.
  CHECK_THROWS_AS((void)surrogate_of(m, 3.0, 0.2), std::domain_error);
}
