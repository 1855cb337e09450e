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

#include "ptoadj/demand.hpp"
#include "ptoadj/estimation.hpp"
#include "ptoadj/tensor.hpp"

namespace ptoadj {

// ---------------------------------------------------------------------------
// Single-parameter adjustments.
//
// A multiplicative correction theta*(1 + lambda/n) applied after estimation.
// With C the derivative-ratio constant of the reward and sigma^2 the
// n-scaled estimator variance, the reward-optimal coefficients are:
//   oracle  (true theta, true sigma^2):   lambda = -(C+2) sigma^2 / (2 theta^2)
//   plug-in (estimated quantities only):  lambda =  (2-C) sigma^2 / (2 theta^2)
// Both leave PTO unchanged when the respective coefficient vanishes.
// ---------------------------------------------------------------------------

double oracle_lambda_single(double c, double sigma_theta_sq, double theta);

double plugin_lambda_single(double c, double sigma_hat_sq, double theta_hat);

/// Componentwise theta_i * (1 + lambda_i/n), re-floored like a fresh
/// estimate so downstream pricing never divides by a vanishing slope.
ParamVector apply_adjustment(const ParamVector& theta_hat, const ParamVector& lambda,
                             int n, double floor = kDefaultSlopeFloor);
ParamVector apply_adjustment(const ParamVector& theta_hat, double lambda, int n,
                             double floor = kDefaultSlopeFloor);

/// n^2-scaled expected-reward improvement of the oracle adjustment over
/// PTO: -r2 (C+2)^2 sigma^4 / (8 theta^2), nonnegative since r2 < 0.
double oracle_gap_single(double c, double sigma_theta_sq, double theta, double r2);

/// Same with (2-C)^2: the plug-in improvement, which beats the oracle
/// whenever C < 0.
double plugin_gap_single(double c, double sigma_theta_sq, double theta, double r2);

// ---------------------------------------------------------------------------
// Multi-parameter adjustment.
//
// For a diagonal adjustment matrix diag(lambda), the n^2-scaled improvement
// over PTO is the quadratic gap(lambda) = (lambda'A lambda + b'lambda)/2 with
//   A_ij = H_ij theta_i theta_j
//   b_i  = 2 sum_j H_ij Sigma_ij + theta_i sum_jk T_ijk Sigma_jk,
// where H is the reward Hessian at the truth, Sigma the n-scaled estimator
// covariance and T the symmetric third-derivative tensor. The b contraction
// substitutes the third-derivative identity for the cross matrix that would
// otherwise be needed, so no extra model input is required.
// ---------------------------------------------------------------------------

struct MultiStructure {
  Eigen::MatrixXd hessian;
  Eigen::MatrixXd sigma;  // n-scaled covariance
  Tensor3 third;
  Eigen::VectorXd theta;
};

Eigen::MatrixXd quadratic_term(const MultiStructure& s);

Eigen::VectorXd linear_term(const MultiStructure& s);

/// How to resolve the stationarity system A lambda = -b/2 when A is
/// rank-deficient: pin one coordinate of lambda to zero and solve the rest.
enum class SolveStrategy { kPinLast, kPinFirst };

/// Maximizer of gap(lambda). Negative definite A gives -A^{-1} b / 2;
/// singular A (within 1e-10 relative) is resolved by the pin strategy.
/// A direction of positive curvature means the quadratic model is invalid
/// and raises an error.
Eigen::VectorXd solve_adjustment(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                 SolveStrategy strategy = SolveStrategy::kPinLast);

/// Convenience composition of the three steps above.
Eigen::VectorXd oracle_lambda_multi(const MultiStructure& s,
                                    SolveStrategy strategy = SolveStrategy::kPinLast);

/// The closed-form pinned solution for the two-parameter linear model:
/// lambda1 = -S11/t1^2 + 3 S12/(t1 t2) - 2 S22/t2^2, lambda2 = 0.
/// Kept as an independent algebraic route for cross-checking the general
/// (A, b) path; both must agree.
Eigen::Vector2d two_param_pinned_lambda(const Eigen::Vector2d& theta,
                                        const Eigen::Matrix2d& sigma);

}  // namespace ptoadj
