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

#include "ptoadj/checks.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "ptoadj/adjustment.hpp"
#include "ptoadj/demand.hpp"
#include "ptoadj/numdiff.hpp"
#include "ptoadj/rng.hpp"
#include "ptoadj/simulation.hpp"

namespace ptoadj {

namespace {

CheckResult make_check(std::string name, double measured, double expected,
                       double tolerance) {
  CheckResult r{std::move(name), measured, expected, tolerance, false};
  r.pass = std::abs(measured - expected) <=
           tolerance * std::max(1.0, std::abs(expected));
  return r;
}

double fd_ratio_times_theta(const DemandModel& model, double theta) {
  const ParamVector truth(theta);
  const auto f = [&](double x) { return surrogate_reward(model, truth, ParamVector(x)); };
  const double r2 = numdiff::derivative(f, theta, 2);
  const double r3 = numdiff::derivative(f, theta, 3);
  return theta * r3 / r2;
}

std::string short_num(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

bool all_pass(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

std::vector<CheckResult> constant_checks() {
  std::vector<CheckResult> results;
  results.push_back(make_check("C linear", derivative_ratio_constant(DemandModel::linear(60.0)),
                               -6.0, 0.0));
  results.push_back(make_check(
      "C log-linear", derivative_ratio_constant(DemandModel::log_linear(8.0)), -4.0, 0.0));
  for (const double gamma : {0.5, 1.0, 2.0, 5.0}) {
    results.push_back(make_check("C power-law gamma=" + short_num(gamma),
                                 derivative_ratio_constant(DemandModel::power_law(2.0, gamma)),
                                 -2.0 * (1.0 + 2.0 * gamma) / gamma, 0.0));
  }

  const DemandModel grid_models[] = {DemandModel::linear(60.0), DemandModel::log_linear(8.0),
                                     DemandModel::power_law(2.0, 2.0)};
  const char* labels[] = {"linear", "log-linear", "power-law"};
  for (int m = 0; m < 3; ++m) {
    const double expected = derivative_ratio_constant(grid_models[m]);
    for (const double theta : {0.5, 1.0, 3.0, 5.0}) {
      results.push_back(make_check(
          std::string("fd ratio ") + labels[m] + " theta=" + short_num(theta),
          fd_ratio_times_theta(grid_models[m], theta), expected, 1e-4));
    }
  }
  return results;
}

std::vector<CheckResult> gap_checks(int n, long draws, std::uint64_t seed) {
  const DemandModel model = DemandModel::linear(1.0);
  const double theta = 1.0;
  const double sigma_sq = 1.0;
  const double c = derivative_ratio_constant(model);
  const double r2 = reward_derivative(model, ParamVector(theta), ParamVector(theta), 2);

  const double oracle_lambda = oracle_lambda_single(c, sigma_sq, theta);
  const double measured_oracle = synthetic_adjustment_gap(
      model, theta, sigma_sq, n, draws, seed, [oracle_lambda](double) { return oracle_lambda; });
  const double expected_oracle = oracle_gap_single(c, sigma_sq, theta, r2);

  const double measured_plugin = synthetic_adjustment_gap(
      model, theta, sigma_sq, n, draws, seed,
      [c, sigma_sq](double estimate) { return plugin_lambda_single(c, sigma_sq, estimate); });
  const double expected_plugin = plugin_gap_single(c, sigma_sq, theta, r2);

  std::vector<CheckResult> results;
  results.push_back(make_check("n^2 gap, oracle adjustment", measured_oracle,
                               expected_oracle, 0.10));
  results.push_back(make_check("n^2 gap, plug-in adjustment", measured_plugin,
                               expected_plugin, 0.10));
  // Ratio window [3.4, 4.6] stated as 4.0 +/- 15%.
  results.push_back(
      make_check("plug-in/oracle gap ratio", measured_plugin / measured_oracle, 4.0, 0.15));
  return results;
}

std::vector<CheckResult> multi_checks(int trials, std::uint64_t seed) {
  std::vector<CheckResult> results;
  Philox rng(seed, substream_id(StreamKind::kAux, 2, 0));
  const DemandModel model = DemandModel::linear_two_param();
  double worst = 0.0;
  double worst_residual = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double theta1 = 20.0 + 80.0 * rng.next_uniform();
    const double theta2 = 1.0 + 7.0 * rng.next_uniform();
    // Random SPD covariance with mild anisotropy.
    const double g11 = rng.next_normal(), g12 = rng.next_normal();
    const double g21 = rng.next_normal(), g22 = rng.next_normal();
    Eigen::Matrix2d g;
    g << g11, g12, g21, g22;
    const Eigen::Matrix2d sigma =
        g * g.transpose() + 0.1 * Eigen::Matrix2d::Identity();

    const ParamVector truth(theta1, theta2);
    MultiStructure s;
    s.theta = Eigen::Vector2d(theta1, theta2);
    s.hessian = reward_hessian(model, truth, truth);
    s.sigma = sigma;
    s.third = reward_third_tensor(model, truth, truth);

    const Eigen::MatrixXd a = quadratic_term(s);
    const Eigen::VectorXd b = linear_term(s);
    const Eigen::VectorXd lambda = solve_adjustment(a, b, SolveStrategy::kPinLast);
    const Eigen::Vector2d reference = two_param_pinned_lambda(s.theta, sigma);

    const double err = std::abs(lambda(0) - reference(0)) /
                       std::max(1.0, std::abs(reference(0)));
    worst = std::max(worst, std::max(err, std::abs(lambda(1))));
    // Stationarity residual projected onto the row space of A (the
    // near-null direction of the singular quadratic carries no constraint).
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    Eigen::VectorXd residual = a * lambda + 0.5 * b;
    const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
      if (std::abs(eig.eigenvalues()(i)) <= 1e-10 * largest) {
        const Eigen::VectorXd v = eig.eigenvectors().col(i);
        residual -= v * (v.dot(residual));
      }
    }
    worst_residual = std::max(
        worst_residual, residual.cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff()));
  }
  results.push_back(make_check("pinned solve vs closed form (worst of " +
                                   std::to_string(trials) + ")",
                               worst, 0.0, 1e-6));
  results.push_back(make_check("stationarity residual on row space", worst_residual, 0.0, 1e-9));
  return results;
}

}  // namespace ptoadj
