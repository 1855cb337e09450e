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

#include <algorithm>
#include <cmath>
#include <vector>

#include "ptoadj/bootstrap.hpp"
#include "ptoadj/rng.hpp"

using namespace ptoadj;

namespace {

Dataset synthetic_linear(double a, double theta, int n, double noise_sd, Philox* rng) {
  Dataset data;
  for (int i = 0; i < n; ++i) {
    const double p = 0.1 + i * (6.0 - 0.1) / (n - 1);
    data.prices.push_back(p);
    data.demands.push_back(a - theta * p +
                           (noise_sd == 0.0 ? 0.0 : noise_sd * rng->next_normal()));
  }
  return data;
}

Dataset synthetic_two_param(double theta1, double theta2, int n, double noise_sd,
                            Philox* rng) {
  Dataset data;
  for (int i = 0; i < n; ++i) {
    const double p = 0.1 + i * (6.0 - 0.1) / (n - 1);
    data.prices.push_back(p);
    data.demands.push_back(theta1 - theta2 * p +
                           (noise_sd == 0.0 ? 0.0 : noise_sd * rng->next_normal()));
  }
  return data;
}

/// Rebuilds the resampled estimates from the documented substream layout;
/// the adjustment search must behave as if computed from exactly these.
std::vector<ParamVector> reconstruct_estimates(const Dataset& data, const DemandModel& model,
                                               const EstimateReport& report,
                                               const BootstrapConfig& config) {
  const BootstrapRefitSampler sampler(data, model, report, config.floor);
  std::vector<ParamVector> out;
  for (int b = 0; b < config.B; ++b) {
    Philox rng(config.seed, config.stream, block_slice(static_cast<std::uint64_t>(b)));
    out.push_back(sampler.draw(rng));
  }
  return out;
}

}  // namespace

TEST_CASE("wild resample reproduces fitted values when residuals vanish") {
  // Demands lie exactly on 60 - 3p at representable points.
  Dataset data{{1.0, 2.0, 4.0}, {57.0, 54.0, 48.0}};
  const DemandModel model = DemandModel::linear(60.0);
  const EstimateReport report = fit_model(model, data);
  Philox rng(5, 5);
  const Dataset resample = wild_resample(data, report.theta_hat, model, rng);
  CHECK(resample.prices == data.prices);
  CHECK(resample.demands == data.demands);
}

TEST_CASE("wild resample first and second moments") {
  Philox noise(3, substream_id(StreamKind::kAux, 10, 0));
  const DemandModel model = DemandModel::linear(60.0);
  Dataset data = synthetic_linear(60.0, 3.0, 10, 3.0, &noise);
  const EstimateReport report = fit_model(model, data);

  const int draws = 100000;
  std::vector<double> mean(data.prices.size(), 0.0), var(data.prices.size(), 0.0);
  for (int b = 0; b < draws; ++b) {
    Philox rng(3, substream_id(StreamKind::kBootstrap, 10, 0),
               block_slice(static_cast<std::uint64_t>(b)));
    const Dataset resample = wild_resample(data, report.theta_hat, model, rng);
    for (std::size_t i = 0; i < resample.demands.size(); ++i) {
      const double fitted = 60.0 - report.theta_hat.scalar() * data.prices[i];
      const double dev = resample.demands[i] - fitted;
      mean[i] += dev;
      var[i] += dev * dev;
    }
  }
  for (std::size_t i = 0; i < data.prices.size(); ++i) {
    const double resid = report.residuals[i];
    CHECK(std::abs(mean[i] / draws) < 3.0 * std::abs(resid) / std::sqrt(double(draws)));
    CHECK(var[i] / draws == doctest::Approx(resid * resid).epsilon(0.03));
  }
}

TEST_CASE("refit sampler has the same law as resample-then-refit") {
  Philox noise(37, substream_id(StreamKind::kAux, 25, 4));
  const int draws = 40000;

  // Single parameter.
  {
    const DemandModel model = DemandModel::linear(60.0);
    const Dataset data = synthetic_linear(60.0, 3.0, 25, std::sqrt(10.0), &noise);
    const EstimateReport report = fit_model(model, data);
    const BootstrapRefitSampler sampler(data, model, report);
    double s1 = 0.0, s2 = 0.0, f1 = 0.0, f2 = 0.0;
    for (int b = 0; b < draws; ++b) {
      Philox direct(9, 1, block_slice(static_cast<std::uint64_t>(b)));
      const double via_sampler = sampler.draw(direct).scalar();
      s1 += via_sampler;
      s2 += via_sampler * via_sampler;
      Philox full(9, 2, block_slice(static_cast<std::uint64_t>(b)));
      const Dataset resample = wild_resample(data, report.theta_hat, model, full);
      const double via_refit = fit_model(model, resample).theta_hat.scalar();
      f1 += via_refit;
      f2 += via_refit * via_refit;
    }
    const double mean_s = s1 / draws, mean_f = f1 / draws;
    const double sd_s = std::sqrt(s2 / draws - mean_s * mean_s);
    const double sd_f = std::sqrt(f2 / draws - mean_f * mean_f);
    CHECK(std::abs(mean_s - mean_f) < 4.5 * sd_s / std::sqrt(double(draws)) * std::sqrt(2.0));
    CHECK(sd_s == doctest::Approx(sd_f).epsilon(0.03));
  }

  // Two parameters: compare both coordinate spreads and the correlation.
  {
    const DemandModel model = DemandModel::linear_two_param();
    const Dataset data = synthetic_two_param(60.0, 3.0, 25, std::sqrt(10.0), &noise);
    const EstimateReport report = fit_model(model, data);
    const BootstrapRefitSampler sampler(data, model, report);
    double s_mean[2] = {0, 0}, s_sq[2] = {0, 0}, s_cross = 0.0;
    double f_mean[2] = {0, 0}, f_sq[2] = {0, 0}, f_cross = 0.0;
    for (int b = 0; b < draws; ++b) {
      Philox direct(9, 3, block_slice(static_cast<std::uint64_t>(b)));
      const ParamVector via_sampler = sampler.draw(direct);
      Philox full(9, 4, block_slice(static_cast<std::uint64_t>(b)));
      const Dataset resample = wild_resample(data, report.theta_hat, model, full);
      const ParamVector via_refit = fit_model(model, resample).theta_hat;
      for (int k = 0; k < 2; ++k) {
        s_mean[k] += via_sampler[k];
        s_sq[k] += via_sampler[k] * via_sampler[k];
        f_mean[k] += via_refit[k];
        f_sq[k] += via_refit[k] * via_refit[k];
      }
      s_cross += via_sampler[0] * via_sampler[1];
      f_cross += via_refit[0] * via_refit[1];
    }
    for (int k = 0; k < 2; ++k) {
      const double ms = s_mean[k] / draws, mf = f_mean[k] / draws;
      const double sds = std::sqrt(s_sq[k] / draws - ms * ms);
      const double sdf = std::sqrt(f_sq[k] / draws - mf * mf);
      CHECK(ms == doctest::Approx(mf).epsilon(5e-3));
      CHECK(sds == doctest::Approx(sdf).epsilon(0.05));
    }
    const double cov_s = s_cross / draws - (s_mean[0] / draws) * (s_mean[1] / draws);
    const double cov_f = f_cross / draws - (f_mean[0] / draws) * (f_mean[1] / draws);
    CHECK(cov_s == doctest::Approx(cov_f).epsilon(0.08));
  }
}

TEST_CASE("bootstrap objective basics") {
  const DemandModel model = DemandModel::linear(60.0);
  const ParamVector anchor(3.0);

  // Single resample equal to the anchor, no adjustment: the maximum reward.
  const std::vector<ParamVector> at_anchor = {anchor};
  CHECK(bootstrap_objective(ParamVector(0.0), at_anchor, anchor, model, 50) ==
        doctest::Approx(300.0));

  // With every resample at the anchor, zero stays the argmax over any grid.
  for (const double lambda : {-5.0, -1.0, -0.1, 0.1, 1.0, 5.0}) {
    CHECK(bootstrap_objective(ParamVector(lambda), at_anchor, anchor, model, 50) <
          bootstrap_objective(ParamVector(0.0), at_anchor, anchor, model, 50));
  }

  // Two hand-set resamples: the mean of two surrogate evaluations.
  const std::vector<ParamVector> pair = {ParamVector(2.5), ParamVector(3.5)};
  const int n = 50;
  const double lambda = 0.8;
  const double expected =
      0.5 * (surrogate_reward(model, anchor, apply_adjustment(ParamVector(2.5), lambda, n)) +
             surrogate_reward(model, anchor, apply_adjustment(ParamVector(3.5), lambda, n)));
  CHECK(bootstrap_objective(ParamVector(lambda), pair, anchor, model, n) ==
        doctest::Approx(expected).epsilon(1e-15));

  CHECK_THROWS_AS(
      (void)bootstrap_objective(ParamVector(0.0), {}, anchor, model, n),
      std::invalid_argument);
}

TEST_CASE("noise-free data yields exactly zero adjustment") {
  Dataset data{{1.0, 2.0, 4.0}, {57.0, 54.0, 48.0}};
  const DemandModel model = DemandModel::linear(60.0);
  const EstimateReport report = fit_model(model, data);
  BootstrapConfig config;
  config.B = 30;
  config.seed = 42;
  const BootstrapResult result = bootstrap_adjust_single(data, model, report, config);
  CHECK(result.lambda.scalar() == 0.0);
  CHECK(result.truncated_resamples == 0);
}

TEST_CASE("closed-form solve equals a dense-grid argmax within one step") {
  Philox noise(19, substream_id(StreamKind::kAux, 40, 1));
  const DemandModel model = DemandModel::linear(60.0);
  const Dataset data = synthetic_linear(60.0, 3.0, 40, std::sqrt(10.0), &noise);
  const EstimateReport report = fit_model(model, data);
  BootstrapConfig config;
  config.B = 400;
  config.seed = 7;
  config.stream = substream_id(StreamKind::kBootstrap, 40, 0);
  const double closed = bootstrap_adjust_single(data, model, report, config).lambda.scalar();

  const double lambda_init = plugin_lambda_single(
      derivative_ratio_constant(model), report.sigma_sq(), report.theta_hat.scalar());
  const std::vector<ParamVector> estimates =
      reconstruct_estimates(data, model, report, config);
  const double fine_step = 1e-4 * lambda_init;
  double best = 0.0, best_obj = -1e300;
  for (double lambda = -5.0 * lambda_init; lambda <= 5.0 * lambda_init + fine_step / 2;
       lambda += fine_step) {
    const double obj =
        bootstrap_objective(ParamVector(lambda), estimates, report.theta_hat, model, 40);
    if (obj > best_obj) {
      best_obj = obj;
      best = lambda;
    }
  }
  CHECK(std::abs(closed - best) <= fine_step * 1.0001);
}

TEST_CASE("log-linear adjustment search stays on the coarse grid") {
  Philox noise(23, substream_id(StreamKind::kAux, 30, 2));
  const DemandModel model = DemandModel::log_linear(8.0);
  Dataset data;
  for (int i = 0; i < 30; ++i) {
    const double p = 0.05 + i * (1.0 - 0.05) / 29.0;
    data.prices.push_back(p);
    data.demands.push_back(std::exp(8.0 - 3.0 * p + 0.8 * noise.next_normal()));
  }
  const EstimateReport report = fit_model(model, data);
  BootstrapConfig config;
  config.B = 300;
  config.seed = 11;
  config.stream = substream_id(StreamKind::kBootstrap, 30, 0);
  const double lambda = bootstrap_adjust_single(data, model, report, config).lambda.scalar();

  const double lambda_init = plugin_lambda_single(
      derivative_ratio_constant(model), report.sigma_sq(), report.theta_hat.scalar());
  CHECK(std::abs(lambda) <= 5.0 * lambda_init * 1.0001);
  const double step = 0.1 * lambda_init;
  const double offset = std::abs(lambda / step - std::llround(lambda / step));
  CHECK(offset < 1e-9);

  // Never worse than PTO on the bootstrap objective.
  const std::vector<ParamVector> estimates =
      reconstruct_estimates(data, model, report, config);
  CHECK(bootstrap_objective(ParamVector(lambda), estimates, report.theta_hat, model, 30) >=
        bootstrap_objective(ParamVector(0.0), estimates, report.theta_hat, model, 30));
}

TEST_CASE("single-parameter bootstrap approaches the hatted oracle as n and B/n grow") {
  // The bootstrap adjustment carries conditional noise of order sqrt(n/B)
  // around the oracle-at-the-estimate value, so convergence needs B to
  // outpace n; B ~ n^2/10 makes the error visibly shrink over one decade.
  const DemandModel model = DemandModel::linear(60.0);
  const double c = derivative_ratio_constant(model);
  const auto median_error = [&](int n, int reps) {
    std::vector<double> errors;
    for (int rep = 0; rep < reps; ++rep) {
      Philox noise(501, substream_id(StreamKind::kAux, static_cast<std::uint64_t>(n),
                                     static_cast<std::uint64_t>(rep)));
      const Dataset data = synthetic_linear(60.0, 3.0, n, std::sqrt(10.0), &noise);
      const EstimateReport report = fit_model(model, data);
      BootstrapConfig config;
      config.B = n * n / 10;
      config.seed = 777;
      config.stream = substream_id(StreamKind::kBootstrap, static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(rep));
      const double lambda = bootstrap_adjust_single(data, model, report, config).lambda.scalar();
      const double hatted_oracle =
          oracle_lambda_single(c, report.sigma_sq(), report.theta_hat.scalar());
      errors.push_back(std::abs(lambda - hatted_oracle));
    }
    std::nth_element(errors.begin(), errors.begin() + errors.size() / 2, errors.end());
    return errors[errors.size() / 2];
  };
  const double coarse = median_error(100, 24);
  const double fine = median_error(1000, 24);
  CHECK(fine < 0.6 * coarse);
}

TEST_CASE("two-parameter bootstrap: degenerate cases") {
  // Exact data: the plug-in start is zero and the slope window keeps zero.
  Dataset data{{1.0, 2.0, 4.0}, {57.0, 54.0, 48.0}};
  const DemandModel model = DemandModel::linear_two_param();
  const EstimateReport report = fit_model(model, data);
  BootstrapConfig config;
  config.B = 20;
  config.seed = 3;
  const BootstrapResult result = bootstrap_adjust_multi(data, model, report, config);
  CHECK(result.lambda[0] == 0.0);
  CHECK(result.lambda[1] == 0.0);

  // B = 1 with the resample collapsing onto the anchor: same outcome.
  BootstrapConfig one = config;
  one.B = 1;
  const BootstrapResult single = bootstrap_adjust_multi(data, model, report, one);
  CHECK(single.lambda[0] == 0.0);
  CHECK(single.lambda[1] == 0.0);
}

TEST_CASE("two-parameter bootstrap lands near the closed-form oracle") {
  const int n = 1000;
  Philox noise(601, substream_id(StreamKind::kAux, n, 9));
  const DemandModel model = DemandModel::linear_two_param();
  const Dataset data = synthetic_two_param(60.0, 3.0, n, std::sqrt(10.0), &noise);
  const EstimateReport report = fit_model(model, data);
  BootstrapConfig config;
  config.B = 10 * n;
  config.seed = 909;
  config.stream = substream_id(StreamKind::kBootstrap, n, 9);
  const BootstrapResult result = bootstrap_adjust_multi(data, model, report, config);

  // True-parameter oracle for this design.
  double sum_p = 0.0, sum_p_sq = 0.0;
  for (const double p : data.prices) {
    sum_p += p;
    sum_p_sq += p * p;
  }
  const double det = n * sum_p_sq - sum_p * sum_p;
  Eigen::Matrix2d sigma_true;
  sigma_true << sum_p_sq, sum_p, sum_p, static_cast<double>(n);
  sigma_true *= 10.0 * n / det;
  const double oracle_lambda1 =
      two_param_pinned_lambda(Eigen::Vector2d(60.0, 3.0), sigma_true)(0);

  CHECK(std::abs(result.lambda[0] - oracle_lambda1) < 0.25 * std::abs(oracle_lambda1));
  CHECK(result.rounds >= 1);
  CHECK(result.rounds <= config.max_coord_rounds);

  // The search never leaves its box.
  const double lambda1_init =
      two_param_pinned_lambda(Eigen::Vector2d(report.theta_hat[0], report.theta_hat[1]),
                              report.covariance)(0);
  CHECK(std::abs(result.lambda[0]) <= 5.0 * std::abs(lambda1_init) * 1.0001);
  CHECK(std::abs(result.lambda[1]) <= 0.5 * 1.0001);

  // In the bootstrap world the returned adjustment is never worse than PTO.
  const std::vector<ParamVector> estimates =
      reconstruct_estimates(data, model, report, config);
  CHECK(bootstrap_objective(result.lambda, estimates, report.theta_hat, model, n) >=
        bootstrap_objective(ParamVector(0.0, 0.0), estimates, report.theta_hat, model, n));
}

TEST_CASE("bootstrap determinism in data and seed") {
  Philox noise(71, substream_id(StreamKind::kAux, 50, 3));
  const DemandModel model = DemandModel::linear(60.0);
  const Dataset data = synthetic_linear(60.0, 3.0, 50, std::sqrt(10.0), &noise);
  const EstimateReport report = fit_model(model, data);
  BootstrapConfig config;
  config.B = 500;
  config.seed = 1234;
  config.stream = substream_id(StreamKind::kBootstrap, 50, 3);

  const double first = bootstrap_adjust_single(data, model, report, config).lambda.scalar();
  const double second = bootstrap_adjust_single(data, model, report, config).lambda.scalar();
  CHECK(first == second);

  BootstrapConfig other = config;
  other.seed = 4321;
  const double reseeded = bootstrap_adjust_single(data, model, report, other).lambda.scalar();
  CHECK(first != reseeded);

  BootstrapConfig invalid = config;
  invalid.B = 0;
  CHECK_THROWS_AS((void)bootstrap_adjust_single(data, model, report, invalid),
                  std::invalid_argument);
}
