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

#include "ptoadj/simulation.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ptoadj {

std::string policy_column(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kPto: return "pto";
    case PolicyKind::kOracle: return "oracle";
    case PolicyKind::kPlugin: return "dd";
    case PolicyKind::kBootstrap: return "boot";
  }
  throw std::logic_error("unreachable");
}

void validate_config(const ExperimentConfig& config) {
  if (config.replications < 1) throw std::invalid_argument("config: replications >= 1");
  if (config.n_grid.empty()) throw std::invalid_argument("config: empty n grid");
  for (const int n : config.n_grid) {
    if (n < 2) throw std::invalid_argument("config: every n must be at least 2");
  }
  if (!(config.price_low > 0.0) || !(config.price_low < config.price_high)) {
    throw std::invalid_argument("config: need 0 < price_low < price_high");
  }
  if (config.noise_var < 0.0) throw std::invalid_argument("config: negative noise variance");
  if (config.policies.empty()) throw std::invalid_argument("config: no policies");
  const bool single = config.model.single_parameter();
  if (config.model.family == DemandFamily::kPowerLaw) {
    throw std::invalid_argument("config: no estimator is defined for power-law demand");
  }
  if (config.true_params.size() != (single ? 1 : 2)) {
    throw std::invalid_argument("config: parameter count does not match the model");
  }
  for (const AdjustmentPolicy& policy : config.policies) {
    if (policy.kind == PolicyKind::kPlugin && !single) {
      throw std::invalid_argument(
          "config: the plug-in adjustment exists only for single-parameter models");
    }
  }
}

namespace {

std::vector<double> price_grid(int n, double low, double high) {
  std::vector<double> prices(static_cast<std::size_t>(n));
  const double step = (high - low) / (n - 1);
  for (int i = 0; i < n; ++i) prices[static_cast<std::size_t>(i)] = low + i * step;
  prices.back() = high;  // exact endpoint regardless of rounding
  return prices;
}

/// Design quantities the oracle adjustments need: the n-scaled covariance
/// of the estimator under the true noise level, for the exact price grid.
struct DesignInfo {
  double sum_p = 0.0;
  double sum_p_sq = 0.0;
  int n = 0;
};

DesignInfo design_info(const std::vector<double>& prices) {
  DesignInfo info;
  info.n = static_cast<int>(prices.size());
  for (const double p : prices) {
    info.sum_p += p;
    info.sum_p_sq += p * p;
  }
  return info;
}

double oracle_sigma_sq_single(const DesignInfo& d, double noise_var) {
  return noise_var * d.n / d.sum_p_sq;
}

Eigen::Matrix2d oracle_sigma_two_param(const DesignInfo& d, double noise_var) {
  const double det = d.n * d.sum_p_sq - d.sum_p * d.sum_p;
  Eigen::Matrix2d sigma;
  const double scale = noise_var * d.n / det;
  sigma(0, 0) = scale * d.sum_p_sq;
  sigma(0, 1) = sigma(1, 0) = scale * d.sum_p;
  sigma(1, 1) = scale * d.n;
  return sigma;
}

ParamVector policy_lambda(const ExperimentConfig& config, const AdjustmentPolicy& policy,
                          const Dataset& data, const DesignInfo& design,
                          const EstimateReport& report, int n, std::uint64_t rep_index) {
  switch (policy.kind) {
    case PolicyKind::kPto:
      break;
    case PolicyKind::kOracle: {
      if (config.model.single_parameter()) {
        const double c = derivative_ratio_constant(config.model);
        const double sigma_sq = oracle_sigma_sq_single(design, config.noise_var);
        return ParamVector(
            oracle_lambda_single(c, sigma_sq, config.true_params.scalar()));
      }
      MultiStructure s;
      s.theta = Eigen::Vector2d(config.true_params[0], config.true_params[1]);
      s.hessian = reward_hessian(config.model, config.true_params, config.true_params);
      s.sigma = oracle_sigma_two_param(design, config.noise_var);
      s.third = reward_third_tensor(config.model, config.true_params, config.true_params);
      const Eigen::VectorXd lambda = oracle_lambda_multi(s, policy.strategy);
      return {lambda(0), lambda(1)};
    }
    case PolicyKind::kPlugin: {
      const double c = derivative_ratio_constant(config.model);
      return ParamVector(
          plugin_lambda_single(c, report.sigma_sq(), report.theta_hat.scalar()));
    }
    case PolicyKind::kBootstrap: {
      BootstrapConfig boot;
      boot.B = static_cast<int>(std::llround(policy.bootstrap_b_mult * n));
      boot.search_halfwidth_mult = policy.bootstrap_halfwidth_mult;
      boot.grid_step_mult = policy.bootstrap_grid_step_mult;
      boot.max_coord_rounds = policy.bootstrap_max_rounds;
      boot.seed = config.seed;
      boot.stream = substream_id(StreamKind::kBootstrap, static_cast<std::uint64_t>(n),
                                 rep_index);
      boot.floor = config.floor;
      const BootstrapResult result =
          config.model.single_parameter()
              ? bootstrap_adjust_single(data, config.model, report, boot)
              : bootstrap_adjust_multi(data, config.model, report, boot);
      return result.lambda;
    }
  }
  ParamVector zero = report.theta_hat;
  for (int i = 0; i < zero.size(); ++i) zero[i] = 0.0;
  return zero;
}

}  // namespace

Dataset generate_dataset(const ExperimentConfig& config, int n, Philox& rng) {
  if (n < 2) throw std::invalid_argument("generate_dataset: n must be at least 2");
  Dataset data;
  data.prices = price_grid(n, config.price_low, config.price_high);
  data.demands.resize(static_cast<std::size_t>(n));
  const double sd = std::sqrt(config.noise_var);
  for (int i = 0; i < n; ++i) {
    const double p = data.prices[static_cast<std::size_t>(i)];
    const double eps = sd == 0.0 ? 0.0 : sd * rng.next_normal();
    double d = 0.0;
    switch (config.model.family) {
      case DemandFamily::kLinearKnownIntercept:
        d = config.model.intercept - config.true_params.scalar() * p + eps;
        break;
      case DemandFamily::kLinearTwoParam:
        d = config.true_params[0] - config.true_params[1] * p + eps;
        break;
      case DemandFamily::kLogLinearKnownIntercept:
        d = std::exp(config.model.intercept - config.true_params.scalar() * p + eps);
        break;
      case DemandFamily::kPowerLaw:
        throw std::invalid_argument("generate_dataset: power-law demand unsupported");
    }
    data.demands[static_cast<std::size_t>(i)] = d;
  }
  return data;
}

ReplicationResult run_replication(const ExperimentConfig& config, int n,
                                  std::uint64_t rep_index) {
  ReplicationResult result;
  result.policy_rewards.assign(config.policies.size(), 0.0);

  Philox rng(config.seed,
             substream_id(StreamKind::kDatasetNoise, static_cast<std::uint64_t>(n),
                          rep_index));
  const Dataset data = generate_dataset(config, n, rng);
  EstimateReport report;
  try {
    report = fit_model(config.model, data, config.floor);
  } catch (const std::exception&) {
    result.valid = false;
    return result;
  }
  result.truncated = report.truncated;

  result.optimal_reward = realized_reward(
      config.model, config.true_params, optimal_price(config.model, config.true_params));
  const double pto_price = std::max(optimal_price(config.model, report.theta_hat), 0.0);
  result.pto_reward = realized_reward(config.model, config.true_params, pto_price);

  const DesignInfo design = design_info(data.prices);
  for (std::size_t k = 0; k < config.policies.size(); ++k) {
    const AdjustmentPolicy& policy = config.policies[k];
    if (policy.kind == PolicyKind::kPto) {
      result.policy_rewards[k] = result.pto_reward;
      continue;
    }
    const ParamVector lambda =
        policy_lambda(config, policy, data, design, report, n, rep_index);
    const ParamVector adjusted = apply_adjustment(report.theta_hat, lambda, n, config.floor);
    const double price = std::max(optimal_price(config.model, adjusted), 0.0);
    result.policy_rewards[k] = realized_reward(config.model, config.true_params, price);
  }
  return result;
}

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& config,
                                          ExecutionMode mode, int threads) {
  validate_config(config);
  const int reps = config.replications;
  const std::size_t policy_count = config.policies.size();

  std::vector<MetricsRecord> records;
  records.reserve(config.n_grid.size());

  std::vector<ReplicationResult> slots(static_cast<std::size_t>(reps));
  for (const int n : config.n_grid) {
    if (mode == ExecutionMode::kParallel) {
#ifdef _OPENMP
      const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
      for (int rep = 0; rep < reps; ++rep) {
        slots[static_cast<std::size_t>(rep)] =
            run_replication(config, n, static_cast<std::uint64_t>(rep));
      }
#else
      for (int rep = 0; rep < reps; ++rep) {
        slots[static_cast<std::size_t>(rep)] =
            run_replication(config, n, static_cast<std::uint64_t>(rep));
      }
#endif
    } else {
      for (int rep = 0; rep < reps; ++rep) {
        slots[static_cast<std::size_t>(rep)] =
            run_replication(config, n, static_cast<std::uint64_t>(rep));
      }
    }

    // Fixed-order reduction over the slot array: identical output for any
    // thread count, including the serial path.
    MetricsRecord record;
    record.n = n;
    record.by_policy.resize(policy_count);
    long valid = 0, truncated = 0, zero_pto = 0;
    double sum_rel = 0.0, sum_rel_sq = 0.0;
    std::vector<double> sum_imp(policy_count, 0.0), sum_imp_sq(policy_count, 0.0);
    for (const ReplicationResult& r : slots) {
      if (!r.valid) {
        ++record.invalid_replications;
        continue;
      }
      ++valid;
      if (r.truncated) ++truncated;
      const double rel = r.pto_reward / r.optimal_reward;
      sum_rel += rel;
      sum_rel_sq += rel * rel;
      if (r.pto_reward == 0.0) {
        ++zero_pto;
        continue;  // improvement ratio undefined; counted, not averaged
      }
      for (std::size_t k = 0; k < policy_count; ++k) {
        const double imp = (r.policy_rewards[k] - r.pto_reward) / r.pto_reward;
        sum_imp[k] += imp;
        sum_imp_sq[k] += imp * imp;
      }
    }
    const auto finalize = [](double sum, double sum_sq, long count, double* mean,
                             double* se) {
      *mean = count > 0 ? sum / count : 0.0;
      if (count > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum / count) / (count - 1));
        *se = std::sqrt(var / count);
      } else {
        *se = 0.0;
      }
    };
    finalize(sum_rel, sum_rel_sq, valid, &record.pto_relative,
             &record.stderr_pto_relative);
    for (std::size_t k = 0; k < policy_count; ++k) {
      finalize(sum_imp[k], sum_imp_sq[k], valid - zero_pto,
               &record.by_policy[k].mean_improvement,
               &record.by_policy[k].stderr_improvement);
    }
    record.truncation_rate = valid > 0 ? static_cast<double>(truncated) / valid : 0.0;
    record.zero_pto_reward_replications = static_cast<int>(zero_pto);
    records.push_back(std::move(record));
  }
  return records;
}

double synthetic_adjustment_gap(const DemandModel& model, double theta,
                                double sigma_theta_sq, int n, long draws,
                                std::uint64_t seed,
                                const std::function<double(double)>& lambda_of_estimate,
                                double floor) {
  if (draws < 1) throw std::invalid_argument("synthetic gap: draws must be positive");
  Philox rng(seed, substream_id(StreamKind::kSynthetic, static_cast<std::uint64_t>(n), 0));
  const ParamVector truth(theta);
  const double sd = std::sqrt(sigma_theta_sq / n);
  double sum = 0.0;
  for (long i = 0; i < draws; ++i) {
    const double draw = std::max(theta + sd * rng.next_normal(), floor);
    const ParamVector estimate(draw);
    const double lambda = lambda_of_estimate(draw);
    const ParamVector adjusted = apply_adjustment(estimate, lambda, n, floor);
    // Realized (clamped) reward: identical to the analytic surrogate when
    // demand at the implied price is nonnegative, but bounded in the far
    // tail where the floored estimate prices the product out of the market.
    sum += realized_reward(model, truth, optimal_price(model, adjusted)) -
           realized_reward(model, truth, optimal_price(model, estimate));
  }
  return static_cast<double>(n) * n * (sum / static_cast<double>(draws));
}

double synthetic_gap_log_slope(const DemandModel& model, double theta,
                               double sigma_theta_sq, const std::vector<int>& n_grid,
                               long draws, std::uint64_t seed) {
  if (n_grid.size() < 2) throw std::invalid_argument("log slope: need at least two n");
  const double c = derivative_ratio_constant(model);
  const double lambda =
      oracle_lambda_single(c, sigma_theta_sq, theta);  // constant in the draw
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const int n : n_grid) {
    const double raw_gap =
        synthetic_adjustment_gap(model, theta, sigma_theta_sq, n, draws, seed,
                                 [lambda](double) { return lambda; }) /
        (static_cast<double>(n) * n);
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(raw_gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(n_grid.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace ptoadj
