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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ptoadj/adjustment.hpp"
#include "ptoadj/bootstrap.hpp"
#include "ptoadj/demand.hpp"
#include "ptoadj/estimation.hpp"
#include "ptoadj/rng.hpp"

namespace ptoadj {

enum class PolicyKind {
  kPto,        // price straight from the estimate
  kOracle,     // adjustment from true parameter and true noise level
  kPlugin,     // closed-form data-driven adjustment (single-parameter only)
  kBootstrap,  // resampling-based adjustment search
};

/// Policy tag plus its knobs. Oracle information (true parameters, true
/// noise variance, the price design) is supplied by the experiment config
/// at evaluation time rather than stored here.
struct AdjustmentPolicy {
  PolicyKind kind = PolicyKind::kPto;
  SolveStrategy strategy = SolveStrategy::kPinLast;  // oracle, two-parameter
  double bootstrap_b_mult = 10.0;                    // B = round(mult * n)
  double bootstrap_halfwidth_mult = 5.0;
  double bootstrap_grid_step_mult = 0.1;
  int bootstrap_max_rounds = 50;

  static AdjustmentPolicy pto() { return {PolicyKind::kPto}; }
  static AdjustmentPolicy oracle() { return {PolicyKind::kOracle}; }
  static AdjustmentPolicy plugin() { return {PolicyKind::kPlugin}; }
  static AdjustmentPolicy bootstrap() { return {PolicyKind::kBootstrap}; }
};

/// Column name used for this policy in emitted CSVs.
std::string policy_column(PolicyKind kind);

/// Full description of one Monte Carlo experiment.
struct ExperimentConfig {
  DemandModel model;
  ParamVector true_params;
  double noise_var = 0.0;  // variance of the additive noise (log scale for log-linear)
  std::vector<int> n_grid;
  int replications = 10000;
  std::uint64_t seed = 0;
  std::vector<AdjustmentPolicy> policies;
  double price_low = 0.0;
  double price_high = 0.0;
  double floor = kDefaultSlopeFloor;
};

void validate_config(const ExperimentConfig& config);

struct PolicyMetrics {
  /// Mean over replications of (reward(policy) - reward(PTO)) / reward(PTO).
  double mean_improvement = 0.0;
  double stderr_improvement = 0.0;
};

struct MetricsRecord {
  int n = 0;
  double pto_relative = 0.0;  // mean of realized PTO reward over the optimum
  double stderr_pto_relative = 0.0;
  std::vector<PolicyMetrics> by_policy;  // parallel to config.policies
  double truncation_rate = 0.0;
  int invalid_replications = 0;
  /// Replications whose PTO price clamped demand to zero. They still enter
  /// pto_relative (contributing zero) but carry no defined improvement
  /// ratio, so they are excluded from the improvement means and counted.
  int zero_pto_reward_replications = 0;
};

/// n equally spaced prices spanning [low, high], both endpoints exact,
/// and demands from the model with i.i.d. Gaussian noise (applied to the
/// log demand for the log-linear family).
Dataset generate_dataset(const ExperimentConfig& config, int n, Philox& rng);

struct ReplicationResult {
  bool valid = true;
  bool truncated = false;
  double optimal_reward = 0.0;
  double pto_reward = 0.0;
  std::vector<double> policy_rewards;  // parallel to config.policies
};

/// One complete draw: generate, fit, adjust per policy, price, evaluate.
/// Deterministic in (config.seed, n, rep_index).
ReplicationResult run_replication(const ExperimentConfig& config, int n,
                                  std::uint64_t rep_index);

enum class ExecutionMode { kSerial, kParallel };

/// Monte Carlo sweep across the n grid. The parallel mode distributes
/// replications over OpenMP threads; results land in per-replication slots
/// and are reduced in a fixed order, so serial and parallel runs of the
/// same config agree bit for bit at any thread count.
std::vector<MetricsRecord> run_experiment(const ExperimentConfig& config,
                                          ExecutionMode mode = ExecutionMode::kParallel,
                                          int threads = 0);

/// n^2-scaled reward gap of an adjusted policy over PTO for a synthetic
/// estimator drawn as theta + sqrt(sigma_sq/n) * z (floored). The lambda
/// callback sees the floored draw, so it covers oracle (constant), plug-in
/// (depends on the draw) and perturbed variants.
double synthetic_adjustment_gap(const DemandModel& model, double theta,
                                double sigma_theta_sq, int n, long draws,
                                std::uint64_t seed,
                                const std::function<double(double)>& lambda_of_estimate,
                                double floor = kDefaultSlopeFloor);

/// Least-squares slope of log(gap) on log(n) for the synthetic oracle
/// improvement over an n grid; close to -2 when the gap law holds.
double synthetic_gap_log_slope(const DemandModel& model, double theta,
                               double sigma_theta_sq, const std::vector<int>& n_grid,
                               long draws, std::uint64_t seed);

}  // namespace ptoadj
