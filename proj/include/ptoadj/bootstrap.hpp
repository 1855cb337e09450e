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
#include <vector>

#include "ptoadj/adjustment.hpp"
#include "ptoadj/demand.hpp"
#include "ptoadj/estimation.hpp"
#include "ptoadj/rng.hpp"

namespace ptoadj {

/// Knobs for the bootstrap adjustment search. The search region per
/// coordinate is +/- search_halfwidth_mult times the plug-in initial
/// adjustment, scanned at grid_step_mult times that value.
struct BootstrapConfig {
  int B = 0;                            // resample count; experiments use 10n
  double search_halfwidth_mult = 5.0;
  double grid_step_mult = 0.1;
  int max_coord_rounds = 50;            // termination guarantee for descent
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;             // substream id, e.g. per replication
  double floor = kDefaultSlopeFloor;
};

/// One wild-bootstrap resample: fitted values from `fitted_params` plus a
/// standard-normal multiple of each original-sample residual. Log-linear
/// resampling happens on the log scale; prices are kept as-is.
Dataset wild_resample(const Dataset& data, const ParamVector& fitted_params,
                      const DemandModel& model, Philox& rng);

/// Draws wild-bootstrap refit estimates directly through their exact
/// sampling law. For the least-squares estimators here the refit is the
/// original estimate plus a fixed linear image of the resampling normals
/// (theta* = theta_hat - sum_i p_i e_i v_i / sum p_i^2 and its two-column
/// analogue), so one draw costs one or two normals instead of an n-point
/// dataset. The adjustment searches below consume resample b from block
/// slice b of the bootstrap substream.
class BootstrapRefitSampler {
 public:
  BootstrapRefitSampler(const Dataset& data, const DemandModel& model,
                        const EstimateReport& report, double floor = kDefaultSlopeFloor);

  /// One refit estimate, floored like any fresh fit; `truncated` (optional)
  /// reports whether the floor fired.
  ParamVector draw(Philox& rng, bool* truncated = nullptr) const;

 private:
  ParamVector center_;
  double floor_;
  int dim_;
  // Single-parameter: scale_(0) maps one normal. Two-parameter: lower
  // Cholesky factor of the refit covariance maps two normals.
  Eigen::Matrix2d scale_ = Eigen::Matrix2d::Zero();
};

/// Mean over resampled estimates of the reward the adjusted estimate would
/// earn if the anchor were the truth. Accumulated in index order so the
/// value is independent of any outer parallelism.
double bootstrap_objective(const ParamVector& lambda,
                           const std::vector<ParamVector>& boot_estimates,
                           const ParamVector& anchor, const DemandModel& model, int n,
                           double floor = kDefaultSlopeFloor);

struct BootstrapResult {
  ParamVector lambda;
  int truncated_resamples = 0;  // resamples whose refit hit the slope floor
  int rounds = 0;               // coordinate-descent rounds (multi only)
};

/// Single-parameter bootstrap adjustment. Linear demand admits an exact
/// maximizer (the objective is quadratic in the reciprocal scale factor),
/// clipped to the search region; other families are grid-searched. A
/// degenerate region (zero initial adjustment, or one too small to move the
/// estimate at all) returns lambda = 0.
BootstrapResult bootstrap_adjust_single(const Dataset& data, const DemandModel& model,
                                        const EstimateReport& report,
                                        const BootstrapConfig& config);

/// Two-parameter bootstrap adjustment by coordinate descent, started from
/// the plug-in pinned solution (lambda2 = 0). The slope coordinate is
/// scanned over the fixed window [-0.5, 0.5] at step 0.01. Descent stops
/// when a full round changes nothing or after max_coord_rounds.
BootstrapResult bootstrap_adjust_multi(const Dataset& data, const DemandModel& model,
                                       const EstimateReport& report,
                                       const BootstrapConfig& config);

}  // namespace ptoadj
