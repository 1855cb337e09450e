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

#include <vector>

#include "ptoadj/demand.hpp"

namespace ptoadj {

/// Paired price/demand observations. Demands are stored raw for every
/// family; the log transform for log-linear fitting happens inside the
/// estimator.
struct Dataset {
  std::vector<double> prices;
  std::vector<double> demands;

  int n() const { return static_cast<int>(prices.size()); }
};

/// Default truncation floor for slope estimates.
inline constexpr double kDefaultSlopeFloor = 1e-3;

/// Point estimate plus the uncertainty quantities the adjustments consume.
///
/// Variance convention: `covariance` is n-SCALED, i.e. Var(theta_hat) is
/// approximately covariance/n. Every adjustment formula in this library
/// consumes that convention; dividing by n twice is the classic
/// integration mistake here.
struct EstimateReport {
  ParamVector theta_hat;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // top-left block used for m=1
  std::vector<double> residuals;
  double sigma_eps_hat_sq = 0.0;  // residual variance, dof-corrected
  int dof = 0;
  bool truncated = false;

  /// n-scaled slope variance (single-parameter convenience accessor).
  double sigma_sq() const { return covariance(0, 0); }
};

/// OLS slope for d_i = a - theta*p_i + eps_i with known a:
/// theta_hat = -sum p_i (d_i - a) / sum p_i^2. Residual variance uses
/// denominator n-1; the reported variance is sigma_eps^2 * n / sum p_i^2.
EstimateReport fit_known_intercept(const Dataset& data, double a);

/// Two-column OLS for d_i = theta1 - theta2*p_i + eps_i. Covariance is
/// n * sigma_eps^2 (X'X)^-1 in (theta1, theta2) coordinates; dof = n-2,
/// with sigma_eps^2 defined as zero when dof is zero.
EstimateReport fit_two_param(const Dataset& data);

/// Known-intercept OLS applied to log demands; residuals live in log space.
EstimateReport fit_log_linear(const Dataset& data, double a);

/// Floors slope-type components at `floor` (the intercept of the
/// two-parameter family is left alone). Negative estimates are floored to
/// +floor, not reflected; `truncated` records whether anything fired.
EstimateReport truncate_estimate(EstimateReport report, double floor = kDefaultSlopeFloor);

/// Convenience: run the family's estimator and apply the floor.
EstimateReport fit_model(const DemandModel& model, const Dataset& data,
                         double floor = kDefaultSlopeFloor);

}  // namespace ptoadj
