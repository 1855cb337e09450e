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

#include "ptoadj/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace ptoadj {

namespace {

void check_dataset(const Dataset& data) {
  if (data.prices.size() != data.demands.size()) {
    throw std::invalid_argument("dataset: price and demand lengths differ");
  }
  if (data.n() < 2) throw std::invalid_argument("dataset: need at least two observations");
  bool distinct = false;
  for (int i = 0; i < data.n(); ++i) {
    const double p = data.prices[static_cast<std::size_t>(i)];
    if (!(p > 0.0)) throw std::invalid_argument("dataset: prices must be positive");
    if (p != data.prices[0]) distinct = true;
  }
  if (!distinct) throw std::invalid_argument("dataset: design is singular (one price level)");
}

EstimateReport known_intercept_on(const std::vector<double>& prices,
                                  const std::vector<double>& values, double a) {
  const int n = static_cast<int>(prices.size());
  double sum_p_sq = 0.0;
  double sum_p_dev = 0.0;
  for (int i = 0; i < n; ++i) {
    sum_p_sq += prices[i] * prices[i];
    sum_p_dev += prices[i] * (values[i] - a);
  }
  const double theta = -sum_p_dev / sum_p_sq;

  EstimateReport report;
  report.theta_hat = ParamVector(theta);
  report.residuals.resize(values.size());
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = values[i] - a + theta * prices[i];
    report.residuals[static_cast<std::size_t>(i)] = r;
    rss += r * r;
  }
  report.dof = n - 1;
  report.sigma_eps_hat_sq = report.dof > 0 ? rss / report.dof : 0.0;
  report.covariance(0, 0) = report.sigma_eps_hat_sq * n / sum_p_sq;
  return report;
}

}  // namespace

EstimateReport fit_known_intercept(const Dataset& data, double a) {
  check_dataset(data);
  return known_intercept_on(data.prices, data.demands, a);
}

EstimateReport fit_log_linear(const Dataset& data, double a) {
  check_dataset(data);
  std::vector<double> logs(data.demands.size());
  for (std::size_t i = 0; i < data.demands.size(); ++i) {
    if (!(data.demands[i] > 0.0)) {
      throw std::domain_error("log-linear fit requires strictly positive demand");
    }
    logs[i] = std::log(data.demands[i]);
  }
  return known_intercept_on(data.prices, logs, a);
}

EstimateReport fit_two_param(const Dataset& data) {
  check_dataset(data);
  const int n = data.n();
  // Normal equations for the design (1, -p), so the solved coefficients are
  // (theta1, theta2) directly and no sign mapping of the covariance is needed.
  double sum_p = 0.0, sum_p_sq = 0.0, sum_d = 0.0, sum_pd = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = data.prices[static_cast<std::size_t>(i)];
    const double d = data.demands[static_cast<std::size_t>(i)];
    sum_p += p;
    sum_p_sq += p * p;
    sum_d += d;
    sum_pd += p * d;
  }
  const double det = n * sum_p_sq - sum_p * sum_p;
  if (!(det > 1e-12 * n * sum_p_sq)) {
    throw std::invalid_argument("two-parameter fit: singular design");
  }
  const double theta1 = (sum_p_sq * sum_d - sum_p * sum_pd) / det;
  const double theta2 = (sum_p * sum_d - n * sum_pd) / det;

  EstimateReport report;
  report.theta_hat = ParamVector(theta1, theta2);
  report.residuals.resize(static_cast<std::size_t>(n));
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = data.demands[static_cast<std::size_t>(i)] -
                     (theta1 - theta2 * data.prices[static_cast<std::size_t>(i)]);
    report.residuals[static_cast<std::size_t>(i)] = r;
    rss += r * r;
  }
  report.dof = n - 2;
  report.sigma_eps_hat_sq = report.dof > 0 ? rss / report.dof : 0.0;
  // (X'X)^-1 in closed form, scaled to the n-scaled covariance convention.
  const double scale = report.sigma_eps_hat_sq * n / det;
  report.covariance(0, 0) = scale * sum_p_sq;
  report.covariance(0, 1) = report.covariance(1, 0) = scale * sum_p;
  report.covariance(1, 1) = scale * n;
  return report;
}

EstimateReport truncate_estimate(EstimateReport report, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("truncation floor must be positive");
  const int slope_index = report.theta_hat.size() - 1;
  if (report.theta_hat[slope_index] < floor) {
    report.theta_hat[slope_index] = floor;
    report.truncated = true;
  }
  return report;
}

EstimateReport fit_model(const DemandModel& model, const Dataset& data, double floor) {
  switch (model.family) {
    case DemandFamily::kLinearKnownIntercept:
      return truncate_estimate(fit_known_intercept(data, model.intercept), floor);
    case DemandFamily::kLinearTwoParam:
      return truncate_estimate(fit_two_param(data), floor);
    case DemandFamily::kLogLinearKnownIntercept:
      return truncate_estimate(fit_log_linear(data, model.intercept), floor);
    case DemandFamily::kPowerLaw:
      throw std::invalid_argument("no estimator is defined for power-law demand");
  }
  throw std::logic_error("unreachable");
}

}  // namespace ptoadj
