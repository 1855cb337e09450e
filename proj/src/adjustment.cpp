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

#include "ptoadj/adjustment.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace ptoadj {

namespace {
constexpr double kSingularRelTol = 1e-10;
}

double oracle_lambda_single(double c, double sigma_theta_sq, double theta) {
  if (theta == 0.0) throw std::invalid_argument("oracle adjustment: theta must be nonzero");
  if (sigma_theta_sq < 0.0) throw std::invalid_argument("variance must be nonnegative");
  return -(c + 2.0) * sigma_theta_sq / (2.0 * theta * theta);
}

double plugin_lambda_single(double c, double sigma_hat_sq, double theta_hat) {
  if (theta_hat == 0.0) throw std::invalid_argument("plug-in adjustment: estimate is zero");
  if (sigma_hat_sq < 0.0) throw std::invalid_argument("variance must be nonnegative");
  return (2.0 - c) * sigma_hat_sq / (2.0 * theta_hat * theta_hat);
}

ParamVector apply_adjustment(const ParamVector& theta_hat, const ParamVector& lambda,
                             int n, double floor) {
  if (n < 1) throw std::invalid_argument("apply_adjustment: n must be at least 1");
  if (lambda.size() != theta_hat.size()) {
    throw std::invalid_argument("apply_adjustment: dimension mismatch");
  }
  ParamVector out = theta_hat;
  for (int i = 0; i < out.size(); ++i) {
    out[i] = theta_hat[i] * (1.0 + lambda[i] / n);
  }
  const int slope = out.size() - 1;
  if (out[slope] < floor) out[slope] = floor;
  return out;
}

ParamVector apply_adjustment(const ParamVector& theta_hat, double lambda, int n,
                             double floor) {
  ParamVector lam = theta_hat;
  for (int i = 0; i < lam.size(); ++i) lam[i] = lambda;
  return apply_adjustment(theta_hat, lam, n, floor);
}

namespace {
double gap_single(double coeff_sq, double sigma_theta_sq, double theta, double r2) {
  if (!(r2 < 0.0)) {
    throw std::domain_error("improvement gap requires negative curvature at the truth");
  }
  if (theta == 0.0) throw std::invalid_argument("gap: theta must be nonzero");
  const double sigma4 = sigma_theta_sq * sigma_theta_sq;
  return -r2 * coeff_sq * sigma4 / (8.0 * theta * theta);
}
}  // namespace

double oracle_gap_single(double c, double sigma_theta_sq, double theta, double r2) {
  return gap_single((c + 2.0) * (c + 2.0), sigma_theta_sq, theta, r2);
}

double plugin_gap_single(double c, double sigma_theta_sq, double theta, double r2) {
  return gap_single((2.0 - c) * (2.0 - c), sigma_theta_sq, theta, r2);
}

Eigen::MatrixXd quadratic_term(const MultiStructure& s) {
  const auto m = s.theta.size();
  if (s.hessian.rows() != m || s.hessian.cols() != m) {
    throw std::invalid_argument("quadratic_term: Hessian dimension mismatch");
  }
  Eigen::MatrixXd a(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      a(i, j) = s.hessian(i, j) * s.theta(i) * s.theta(j);
    }
  }
  return a;
}

Eigen::VectorXd linear_term(const MultiStructure& s) {
  const auto m = s.theta.size();
  if (s.sigma.rows() != m || s.sigma.cols() != m || s.hessian.rows() != m ||
      s.third.dim() != m) {
    throw std::invalid_argument("linear_term: dimension mismatch");
  }
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < m; ++k)
        scale = std::max(scale, std::abs(s.third(static_cast<int>(i), static_cast<int>(j),
                                                 static_cast<int>(k))));
  if (s.third.symmetry_gap() > 1e-8 * std::max(scale, 1.0)) {
    throw std::invalid_argument("linear_term: third-derivative tensor is not symmetric");
  }
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double v = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) v += 2.0 * s.hessian(i, j) * s.sigma(i, j);
    double contraction = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index k = 0; k < m; ++k) {
        contraction += s.third(static_cast<int>(i), static_cast<int>(j),
                               static_cast<int>(k)) *
                       s.sigma(j, k);
      }
    }
    b(i) = v + s.theta(i) * contraction;
  }
  return b;
}

Eigen::VectorXd solve_adjustment(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                 SolveStrategy strategy) {
  const auto m = a.rows();
  if (a.cols() != m || b.size() != m) {
    throw std::invalid_argument("solve_adjustment: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  const double tol = kSingularRelTol * largest;
  if (largest == 0.0) throw std::runtime_error("solve_adjustment: zero curvature matrix");
  if (ev.maxCoeff() > tol) {
    throw std::runtime_error(
        "solve_adjustment: quadratic gap has a direction of positive curvature");
  }
  const bool singular = ev.cwiseAbs().minCoeff() <= tol;
  if (!singular) {
    return a.ldlt().solve(-0.5 * b);
  }
  // Rank-deficient stationarity system: fix one coordinate at zero and
  // solve the complementary principal block.
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  if (m == 1) return lambda;
  const Eigen::Index lo = (strategy == SolveStrategy::kPinFirst) ? 1 : 0;
  const Eigen::Index dim = m - 1;
  const Eigen::MatrixXd block = a.block(lo, lo, dim, dim);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
  if (!lu.isInvertible()) {
    throw std::runtime_error("solve_adjustment: pinned principal block is singular");
  }
  lambda.segment(lo, dim) = lu.solve(-0.5 * b.segment(lo, dim));
  return lambda;
}

Eigen::VectorXd oracle_lambda_multi(const MultiStructure& s, SolveStrategy strategy) {
  return solve_adjustment(quadratic_term(s), linear_term(s), strategy);
}

Eigen::Vector2d two_param_pinned_lambda(const Eigen::Vector2d& theta,
                                        const Eigen::Matrix2d& sigma) {
  const double t1 = theta(0), t2 = theta(1);
  if (t1 == 0.0 || t2 == 0.0) {
    throw std::invalid_argument("two_param_pinned_lambda: parameters must be nonzero");
  }
  const double lambda1 =
      -sigma(0, 0) / (t1 * t1) + 3.0 * sigma(0, 1) / (t1 * t2) - 2.0 * sigma(1, 1) / (t2 * t2);
  return {lambda1, 0.0};
}

}  // namespace ptoadj
