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

#include "ptoadj/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ptoadj {

namespace {

void check_config(const BootstrapConfig& config) {
  if (config.B < 1) throw std::invalid_argument("bootstrap: B must be at least 1");
  if (!(config.search_halfwidth_mult > 0.0) || !(config.grid_step_mult > 0.0)) {
    throw std::invalid_argument("bootstrap: search multipliers must be positive");
  }
  if (config.max_coord_rounds < 1) {
    throw std::invalid_argument("bootstrap: max_coord_rounds must be at least 1");
  }
}

/// True when no lambda in [-halfwidth, halfwidth] can change the estimate:
/// (1 + lambda/n) rounds to 1 across the whole region, so searching it
/// would only pick up noise. Keeps noise-free runs at exactly zero.
bool region_is_noop(double halfwidth, int n) {
  return 1.0 + halfwidth / n == 1.0 && 1.0 - halfwidth / n == 1.0;
}

std::vector<ParamVector> refit_resamples(const Dataset& data, const DemandModel& model,
                                         const EstimateReport& report,
                                         const BootstrapConfig& config, int* truncated) {
  const BootstrapRefitSampler sampler(data, model, report, config.floor);
  std::vector<ParamVector> estimates;
  estimates.reserve(static_cast<std::size_t>(config.B));
  *truncated = 0;
  for (int b = 0; b < config.B; ++b) {
    Philox rng(config.seed, config.stream, block_slice(static_cast<std::uint64_t>(b)));
    bool floored = false;
    estimates.push_back(sampler.draw(rng, &floored));
    if (floored) ++*truncated;
  }
  return estimates;
}

/// Candidate grid: halfwidth W scanned at `step`, endpoints included, with
/// zero always present so the result can never lose to PTO in-sample.
std::vector<double> candidate_grid(double halfwidth, double step) {
  std::vector<double> grid;
  const int half_count = static_cast<int>(std::llround(halfwidth / step));
  grid.reserve(static_cast<std::size_t>(2 * half_count) + 3);
  for (int k = -half_count; k <= half_count; ++k) grid.push_back(k * step);
  if (std::abs(grid.front() - (-halfwidth)) > 1e-12 * halfwidth) {
    grid.insert(grid.begin(), -halfwidth);
    grid.push_back(halfwidth);
  }
  if (std::none_of(grid.begin(), grid.end(), [](double g) { return g == 0.0; })) {
    grid.push_back(0.0);
  }
  return grid;
}

/// Deterministic tie policy for grid argmaxes: higher objective first, then
/// smaller |lambda| (PTO bias), then the smaller signed value.
bool improves(double obj, double c, double best_obj, double best) {
  return obj > best_obj ||
         (obj == best_obj &&
          (std::abs(c) < std::abs(best) || (std::abs(c) == std::abs(best) && c < best)));
}

/// Argmax over candidates for one coordinate, others held fixed, by direct
/// evaluation of the resampled objective.
double best_coordinate(const std::vector<double>& candidates, ParamVector lambda,
                       int coord, const std::vector<ParamVector>& estimates,
                       const ParamVector& anchor, const DemandModel& model, int n,
                       double floor) {
  double best = candidates.front();
  double best_obj = -std::numeric_limits<double>::infinity();
  for (const double c : candidates) {
    lambda[coord] = c;
    const double obj = bootstrap_objective(lambda, estimates, anchor, model, n, floor);
    if (improves(obj, c, best_obj, best)) {
      best = c;
      best_obj = obj;
    }
  }
  return best;
}

/// Argmax of q(c) = a1*f(c) - a2*f(c)^2 over the grid, same tie policy.
template <typename F>
double best_quadratic(const std::vector<double>& candidates, double a1, double a2,
                      const F& f) {
  double best = candidates.front();
  double best_obj = -std::numeric_limits<double>::infinity();
  for (const double c : candidates) {
    const double u = f(c);
    const double obj = a1 * u - a2 * u * u;
    if (improves(obj, c, best_obj, best)) {
      best = c;
      best_obj = obj;
    }
  }
  return best;
}

/// One coordinate pass of the two-parameter search. With the other
/// coordinate frozen, each resample's reward is a quadratic in the shared
/// scale factor, so the mean objective collapses to two coefficients and
/// the scan costs O(B + candidates) instead of O(B * candidates):
///   coord 0: x1 = est1*(1 + c/n),   R = sum_b [c1_b*(1+c/n) - c2_b*(1+c/n)^2]
///   coord 1: x2 = est2*(1 + c/n),   R in w = 1/(1+c/n) the same way.
/// The coord-1 collapse requires that the slope floor cannot fire anywhere
/// on the grid; otherwise the direct scan is used.
double scan_two_param_coordinate(const std::vector<double>& candidates,
                                 const ParamVector& lambda, int coord,
                                 const std::vector<ParamVector>& estimates,
                                 const ParamVector& anchor, const DemandModel& model,
                                 int n, double floor) {
  const double t1 = anchor[0], t2 = anchor[1];
  if (coord == 0) {
    double c1 = 0.0, c2 = 0.0;
    for (const ParamVector& est : estimates) {
      const double x2 = std::max(est[1] * (1.0 + lambda[1] / n), floor);
      c1 += t1 * est[0] / (2.0 * x2);
      c2 += t2 * est[0] * est[0] / (4.0 * x2 * x2);
    }
    const double inv_b = 1.0 / static_cast<double>(estimates.size());
    return best_quadratic(candidates, c1 * inv_b, c2 * inv_b,
                          [n](double c) { return 1.0 + c / n; });
  }
  double min_slope = estimates.front()[1];
  for (const ParamVector& est : estimates) min_slope = std::min(min_slope, est[1]);
  double min_factor = 1.0;
  for (const double c : candidates) min_factor = std::min(min_factor, 1.0 + c / n);
  if (!(min_factor > 0.0) || min_slope * min_factor < floor) {
    return best_coordinate(candidates, lambda, coord, estimates, anchor, model, n, floor);
  }
  double d1 = 0.0, d2 = 0.0;
  for (const ParamVector& est : estimates) {
    const double x1 = est[0] * (1.0 + lambda[0] / n);
    d1 += t1 * x1 / (2.0 * est[1]);
    d2 += t2 * x1 * x1 / (4.0 * est[1] * est[1]);
  }
  const double inv_b = 1.0 / static_cast<double>(estimates.size());
  return best_quadratic(candidates, d1 * inv_b, d2 * inv_b,
                        [n](double c) { return 1.0 / (1.0 + c / n); });
}

}  // namespace

Dataset wild_resample(const Dataset& data, const ParamVector& fitted_params,
                      const DemandModel& model, Philox& rng) {
  const int n = data.n();
  Dataset out;
  out.prices = data.prices;
  out.demands.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double p = data.prices[static_cast<std::size_t>(i)];
    const double d = data.demands[static_cast<std::size_t>(i)];
    const double v = rng.next_normal();
    double fitted = 0.0;
    switch (model.family) {
      case DemandFamily::kLinearKnownIntercept:
        fitted = model.intercept - fitted_params.scalar() * p;
        out.demands[static_cast<std::size_t>(i)] = fitted + v * (d - fitted);
        break;
      case DemandFamily::kLinearTwoParam:
        fitted = fitted_params[0] - fitted_params[1] * p;
        out.demands[static_cast<std::size_t>(i)] = fitted + v * (d - fitted);
        break;
      case DemandFamily::kLogLinearKnownIntercept: {
        fitted = model.intercept - fitted_params.scalar() * p;
        const double resid = std::log(d) - fitted;
        out.demands[static_cast<std::size_t>(i)] = std::exp(fitted + v * resid);
        break;
      }
      case DemandFamily::kPowerLaw:
        throw std::invalid_argument("wild_resample: power-law demand has no estimator");
    }
  }
  return out;
}

BootstrapRefitSampler::BootstrapRefitSampler(const Dataset& data, const DemandModel& model,
                                             const EstimateReport& report, double floor)
    : center_(report.theta_hat), floor_(floor), dim_(report.theta_hat.size()) {
  const int n = data.n();
  if (static_cast<int>(report.residuals.size()) != n) {
    throw std::invalid_argument("refit sampler: residuals do not match the dataset");
  }
  if (dim_ == 1) {
    if (model.family != DemandFamily::kLinearKnownIntercept &&
        model.family != DemandFamily::kLogLinearKnownIntercept) {
      throw std::invalid_argument("refit sampler: unsupported demand family");
    }
    double sum_p_sq = 0.0, sum_pe_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = data.prices[static_cast<std::size_t>(i)];
      const double pe = p * report.residuals[static_cast<std::size_t>(i)];
      sum_p_sq += p * p;
      sum_pe_sq += pe * pe;
    }
    scale_(0, 0) = std::sqrt(sum_pe_sq) / sum_p_sq;
  } else {
    if (model.family != DemandFamily::kLinearTwoParam) {
      throw std::invalid_argument("refit sampler: unsupported demand family");
    }
    // beta* = beta + (X'X)^-1 sum_i x_i e_i v_i with x_i = (1, -p_i); the sum
    // is Gaussian with covariance M = sum_i x_i x_i' e_i^2, so the map is
    // (X'X)^-1 L with L the Cholesky factor of M.
    double sum_p = 0.0, sum_p_sq = 0.0;
    double m11 = 0.0, m12 = 0.0, m22 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = data.prices[static_cast<std::size_t>(i)];
      const double e = report.residuals[static_cast<std::size_t>(i)];
      sum_p += p;
      sum_p_sq += p * p;
      m11 += e * e;
      m12 += -p * e * e;
      m22 += p * p * e * e;
    }
    const double det = n * sum_p_sq - sum_p * sum_p;
    if (!(det > 0.0)) throw std::invalid_argument("refit sampler: singular design");
    Eigen::Matrix2d xtx_inv;
    xtx_inv << sum_p_sq / det, sum_p / det, sum_p / det, static_cast<double>(n) / det;
    Eigen::Matrix2d chol = Eigen::Matrix2d::Zero();
    if (m11 > 0.0) {
      chol(0, 0) = std::sqrt(m11);
      chol(1, 0) = m12 / chol(0, 0);
      chol(1, 1) = std::sqrt(std::max(m22 - chol(1, 0) * chol(1, 0), 0.0));
    } else {
      chol(1, 1) = std::sqrt(m22);
    }
    scale_ = xtx_inv * chol;
  }
}

ParamVector BootstrapRefitSampler::draw(Philox& rng, bool* truncated) const {
  ParamVector estimate = center_;
  if (dim_ == 1) {
    estimate[0] = center_[0] - scale_(0, 0) * rng.next_normal();
  } else {
    const double z1 = rng.next_normal();
    const double z2 = rng.next_normal();
    estimate[0] = center_[0] + scale_(0, 0) * z1 + scale_(0, 1) * z2;
    estimate[1] = center_[1] + scale_(1, 0) * z1 + scale_(1, 1) * z2;
  }
  const int slope = estimate.size() - 1;
  bool floored = false;
  if (estimate[slope] < floor_) {
    estimate[slope] = floor_;
    floored = true;
  }
  if (truncated != nullptr) *truncated = floored;
  return estimate;
}

double bootstrap_objective(const ParamVector& lambda,
                           const std::vector<ParamVector>& boot_estimates,
                           const ParamVector& anchor, const DemandModel& model, int n,
                           double floor) {
  if (boot_estimates.empty()) {
    throw std::invalid_argument("bootstrap_objective: no resampled estimates");
  }
  double sum = 0.0;
  for (const ParamVector& est : boot_estimates) {
    sum += surrogate_reward(model, anchor, apply_adjustment(est, lambda, n, floor));
  }
  return sum / static_cast<double>(boot_estimates.size());
}

BootstrapResult bootstrap_adjust_single(const Dataset& data, const DemandModel& model,
                                        const EstimateReport& report,
                                        const BootstrapConfig& config) {
  check_config(config);
  if (!model.single_parameter() || report.theta_hat.size() != 1) {
    throw std::invalid_argument("bootstrap_adjust_single: needs a single-parameter model");
  }
  const int n = data.n();
  const double theta_hat = report.theta_hat.scalar();
  const double lambda_init =
      plugin_lambda_single(derivative_ratio_constant(model), report.sigma_sq(), theta_hat);
  const double halfwidth = config.search_halfwidth_mult * std::abs(lambda_init);
  BootstrapResult result;
  result.lambda = ParamVector(0.0);
  if (lambda_init == 0.0 || region_is_noop(halfwidth, n)) return result;

  const std::vector<ParamVector> estimates =
      refit_resamples(data, model, report, config, &result.truncated_resamples);

  double lambda = 0.0;
  if (model.family == DemandFamily::kLinearKnownIntercept) {
    // The objective is quadratic in u = 1/(1 + lambda/n), so the first-order
    // condition solves exactly: u* = mean(1/est) / (theta_hat * mean(1/est^2)).
    double m1 = 0.0, m2 = 0.0;
    for (const ParamVector& est : estimates) {
      const double inv = 1.0 / est.scalar();
      m1 += inv;
      m2 += inv * inv;
    }
    m1 /= static_cast<double>(estimates.size());
    m2 /= static_cast<double>(estimates.size());
    lambda = std::clamp(n * (theta_hat * m2 / m1 - 1.0), -halfwidth, halfwidth);
  } else {
    const std::vector<double> grid =
        candidate_grid(halfwidth, config.grid_step_mult * std::abs(lambda_init));
    lambda = best_coordinate(grid, ParamVector(0.0), 0, estimates, report.theta_hat,
                             model, n, config.floor);
  }

  // Never report an adjustment the bootstrap world itself ranks below PTO.
  const ParamVector zero(0.0);
  const double at_zero =
      bootstrap_objective(zero, estimates, report.theta_hat, model, n, config.floor);
  const double at_lambda = bootstrap_objective(ParamVector(lambda), estimates,
                                               report.theta_hat, model, n, config.floor);
  result.lambda = (at_lambda > at_zero) ? ParamVector(lambda) : zero;
  return result;
}

BootstrapResult bootstrap_adjust_multi(const Dataset& data, const DemandModel& model,
                                       const EstimateReport& report,
                                       const BootstrapConfig& config) {
  check_config(config);
  if (model.family != DemandFamily::kLinearTwoParam || report.theta_hat.size() != 2) {
    throw std::invalid_argument("bootstrap_adjust_multi: needs the two-parameter model");
  }
  const int n = data.n();
  const Eigen::Vector2d theta(report.theta_hat[0], report.theta_hat[1]);
  const double lambda1_init = two_param_pinned_lambda(theta, report.covariance)(0);

  BootstrapResult result;
  result.lambda = ParamVector(0.0, 0.0);

  std::vector<double> grid1;
  if (lambda1_init == 0.0 ||
      region_is_noop(config.search_halfwidth_mult * std::abs(lambda1_init), n)) {
    grid1 = {0.0};
  } else {
    grid1 = candidate_grid(config.search_halfwidth_mult * std::abs(lambda1_init),
                           config.grid_step_mult * std::abs(lambda1_init));
  }
  const std::vector<double> grid2 = candidate_grid(0.5, 0.01);

  const std::vector<ParamVector> estimates =
      refit_resamples(data, model, report, config, &result.truncated_resamples);

  // Start from the plug-in pinned solution, snapped onto the grid.
  ParamVector lambda(0.0, 0.0);
  if (grid1.size() > 1) {
    double nearest = grid1.front();
    for (const double g : grid1) {
      if (std::abs(g - lambda1_init) < std::abs(nearest - lambda1_init)) nearest = g;
    }
    lambda[0] = nearest;
  }

  for (int round = 0; round < config.max_coord_rounds; ++round) {
    bool changed = false;
    for (int coord = 0; coord < 2; ++coord) {
      const std::vector<double>& grid = (coord == 0) ? grid1 : grid2;
      const double chosen = scan_two_param_coordinate(
          grid, lambda, coord, estimates, report.theta_hat, model, n, config.floor);
      if (chosen != lambda[coord]) {
        lambda[coord] = chosen;
        changed = true;
      }
    }
    result.rounds = round + 1;
    if (!changed) break;
  }

  // Tie policy at the whole-search level: never report an adjustment the
  // bootstrap world does not strictly prefer to PTO.
  const ParamVector zero(0.0, 0.0);
  const double at_zero =
      bootstrap_objective(zero, estimates, report.theta_hat, model, n, config.floor);
  const double at_lambda =
      bootstrap_objective(lambda, estimates, report.theta_hat, model, n, config.floor);
  result.lambda = (at_lambda > at_zero) ? lambda : zero;
  return result;
}

}  // namespace ptoadj
